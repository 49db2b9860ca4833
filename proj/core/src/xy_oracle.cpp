#include "randblock/xy_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "randblock/error.hpp"
#include "randblock/parallel.hpp"

namespace randblock {

namespace {

using Mat2c = Eigen::Matrix2cd;
constexpr cplx I_UNIT{0.0, 1.0};

// I (x) ... (x) op (x) ... (x) I with op on site j (1-based).
SparseOp embed(const Mat2c& op, int j, int n) {
  const Eigen::Index dim = Eigen::Index{1} << n;
  const int shift = n - j;
  std::vector<Eigen::Triplet<cplx>> trip;
  trip.reserve(static_cast<std::size_t>(2 * dim));
  for (Eigen::Index col = 0; col < dim; ++col) {
    const int b = static_cast<int>((col >> shift) & 1);
    for (int r = 0; r < 2; ++r) {
      const cplx v = op(r, b);
      if (v == cplx(0.0)) continue;
      const Eigen::Index row = (col & ~(Eigen::Index{1} << shift)) | (static_cast<Eigen::Index>(r) << shift);
      trip.emplace_back(row, col, v);
    }
  }
  SparseOp S(dim, dim);
  S.setFromTriplets(trip.begin(), trip.end());
  return S;
}

Mat2c local_pauli(char which) {
  Mat2c m;
  switch (which) {
    case 'x': m << 0.0, 1.0, 1.0, 0.0; break;
    case 'y': m << 0.0, -I_UNIT, I_UNIT, 0.0; break;
    case 'z': m << 1.0, 0.0, 0.0, -1.0; break;
    default: throw ConfigError(std::string("unknown Pauli matrix '") + which + "'");
  }
  return m;
}

void check_sites(int n, int cap, const char* what) {
  if (n < 1 || n > cap) {
    throw ConfigError(std::string(what) + ": need 1 <= n <= " + std::to_string(cap) + " (dense budget)");
  }
}

SparseOp identity_op(int n) {
  const Eigen::Index dim = Eigen::Index{1} << n;
  SparseOp Id(dim, dim);
  Id.setIdentity();
  return Id;
}

double max_abs(const SparseOp& S) {
  double m = 0.0;
  for (int k = 0; k < S.outerSize(); ++k)
    for (SparseOp::InnerIterator it(S, k); it; ++it) m = std::max(m, std::abs(it.value()));
  return m;
}

// exp(-i tau Mhat) for real symmetric Mhat given its eigendecomposition.
CMat hat_propagator(const Eigen::SelfAdjointEigenSolver<Mat>& es, double tau) {
  const auto& lam = es.eigenvalues();
  CVec phase(lam.size());
  for (Eigen::Index i = 0; i < lam.size(); ++i) phase(i) = std::exp(cplx(0.0, -tau * lam(i)));
  const CMat V = es.eigenvectors().cast<cplx>();
  return V * phase.asDiagonal() * V.transpose();
}

}  // namespace

double ManyBodyOperator::hermiticity_defect() const {
  return (matrix - matrix.adjoint()).cwiseAbs().maxCoeff();
}

SparseOp pauli_site(char which, int j, int n) {
  check_sites(n, kMaxManyBodySites, "pauli_site");
  if (j < 1 || j > n) throw ConfigError("pauli_site: site out of range");
  return embed(local_pauli(which), j, n);
}

ManyBodyOperator build_hamiltonian(const ModelParams& params, const DisorderRealization& real) {
  params.validate();
  const int n = params.n;
  check_sites(n, kMaxManyBodySites, "build_hamiltonian");
  if (static_cast<int>(real.nu.size()) != n) throw ConfigError("build_hamiltonian: realization length != n");
  std::vector<SparseOp> X, Y, Z;
  for (int j = 1; j <= n; ++j) {
    X.push_back(pauli_site('x', j, n));
    Y.push_back(pauli_site('y', j, n));
    Z.push_back(pauli_site('z', j, n));
  }
  const Eigen::Index dim = Eigen::Index{1} << n;
  SparseOp H(dim, dim);
  for (int j = 0; j + 1 < n; ++j) {
    const auto ju = static_cast<std::size_t>(j);
    const double m = params.mu[ju];
    const double g = params.gamma[ju];
    H += (m * (1.0 + g)) * SparseOp(X[ju] * X[ju + 1]);
    H += (m * (1.0 - g)) * SparseOp(Y[ju] * Y[ju + 1]);
  }
  for (int j = 0; j < n; ++j) H += real.nu[static_cast<std::size_t>(j)] * Z[static_cast<std::size_t>(j)];
  ManyBodyOperator op;
  op.n = n;
  op.matrix = CMat(H);
  op.label = "H_" + std::to_string(n);
  return op;
}

SparseOp FermionSet::formal(int m) const {
  if (m < 0 || m >= 2 * n) throw ConfigError("FermionSet::formal: index out of range");
  if (m < n) return c[static_cast<std::size_t>(m)];
  return SparseOp(c[static_cast<std::size_t>(m - n)].adjoint());
}

FermionSet build_jordan_wigner(int n) {
  check_sites(n, kMaxManyBodySites, "build_jordan_wigner");
  Mat2c lower;
  lower << 0.0, 0.0, 1.0, 0.0;
  FermionSet F;
  F.n = n;
  SparseOp string = identity_op(n);
  for (int j = 1; j <= n; ++j) {
    F.a.push_back(embed(lower, j, n));
    F.c.push_back(SparseOp(string * F.a.back()));
    string = SparseOp(string * pauli_site('z', j, n));
  }
  return F;
}

CarReport car_defect(const FermionSet& F, double tol) {
  CarReport r;
  const SparseOp Id = identity_op(F.n);
  for (int j = 0; j < F.n; ++j) {
    const auto& cj = F.c[static_cast<std::size_t>(j)];
    for (int k = 0; k < F.n; ++k) {
      const auto& ck = F.c[static_cast<std::size_t>(k)];
      const SparseOp ckd = ck.adjoint();
      SparseOp mixed = SparseOp(cj * ckd) + SparseOp(ckd * cj);
      if (j == k) mixed -= Id;
      const SparseOp same = SparseOp(cj * ck) + SparseOp(ck * cj);
      r.max_defect = std::max({r.max_defect, max_abs(mixed), max_abs(same)});
    }
    r.max_defect = std::max(r.max_defect, max_abs(SparseOp(cj * cj)));
  }
  r.pass = r.max_defect <= tol;
  return r;
}

CMat quadratic_form(const FermionSet& F, const Mat& Mhat) {
  const int m = 2 * F.n;
  if (Mhat.rows() != m || Mhat.cols() != m) throw ConfigError("quadratic_form: Mhat must be 2n x 2n");
  std::vector<SparseOp> f, fd;
  for (int a = 0; a < m; ++a) {
    f.push_back(F.formal(a));
    fd.push_back(f.back().adjoint());
  }
  const Eigen::Index dim = Eigen::Index{1} << F.n;
  SparseOp Q(dim, dim);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      const double w = Mhat(a, b);
      if (w != 0.0) Q += w * SparseOp(fd[static_cast<std::size_t>(a)] * f[static_cast<std::size_t>(b)]);
    }
  return CMat(Q);
}

ConventionFit verify_quadratic_form(const ManyBodyOperator& H, const HatBlockMatrix& Mhat, double tol) {
  if (Mhat.n() != H.n) throw ConfigError("verify_quadratic_form: size mismatch");
  const auto F = build_jordan_wigner(H.n);
  const CMat Q = quadratic_form(F, Mhat.dense());
  const auto dim = static_cast<double>(H.matrix.rows());
  const std::array<double, 3> scales{1.0, 2.0, 0.5};
  ConventionFit best;
  best.residual = std::numeric_limits<double>::infinity();
  std::array<double, 3> residuals{};
  for (std::size_t i = 0; i < scales.size(); ++i) {
    const double s = scales[i];
    const double shift = (H.matrix.trace() - s * Q.trace()).real() / dim;
    CMat D = H.matrix - s * Q;
    D.diagonal().array() -= shift;
    residuals[i] = D.cwiseAbs().maxCoeff();
    if (residuals[i] < best.residual) {
      best.scale = s;
      best.shift = shift;
      best.residual = residuals[i];
    }
  }
  best.residual_by_scale = residuals;
  best.shift_per_site = best.shift / H.n;
  if (!(best.residual <= tol)) {
    std::ostringstream os;
    os.precision(3);
    os << "convention mismatch: H vs C^* Mhat C residuals (scale 1, 2, 1/2) = " << residuals[0] << ", "
       << residuals[1] << ", " << residuals[2] << " exceed " << tol;
    throw NumericalError(os.str());
  }
  return best;
}

double free_fermion_spectrum_error(const ManyBodyOperator& H, const HatBlockMatrix& Mhat,
                                   const ConventionFit& convention) {
  const int n = H.n;
  Eigen::SelfAdjointEigenSolver<Mat> es_hat(Mhat.dense(), Eigen::EigenvaluesOnly);
  // Symmetric spectrum: the top n eigenvalues are the nonnegative half.
  const Vec lam = es_hat.eigenvalues().tail(n);
  std::vector<double> predicted;
  predicted.reserve(std::size_t{1} << n);
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    double e = 0.0;
    for (int i = 0; i < n; ++i) e += (mask >> i & 1u) ? lam(i) : -lam(i);
    predicted.push_back(convention.scale * e + convention.shift);
  }
  std::sort(predicted.begin(), predicted.end());
  Eigen::SelfAdjointEigenSolver<CMat> es(H.matrix, Eigen::EigenvaluesOnly);
  double worst = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    worst = std::max(worst, std::abs(es.eigenvalues()(static_cast<Eigen::Index>(i)) - predicted[i]));
  }
  return worst;
}

double verify_heisenberg_identity(const ModelParams& params, const DisorderRealization& real,
                                  std::span<const double> t_list, double scale) {
  check_sites(params.n, 8, "verify_heisenberg_identity");
  const int n = params.n;
  const auto H = build_hamiltonian(params, real);
  const auto F = build_jordan_wigner(n);
  std::vector<CMat> c, cd;
  for (int k = 0; k < n; ++k) {
    c.emplace_back(F.c[static_cast<std::size_t>(k)]);
    cd.push_back(c.back().adjoint());
  }
  Eigen::SelfAdjointEigenSolver<CMat> es(H.matrix);
  const CMat& W = es.eigenvectors();
  Eigen::SelfAdjointEigenSolver<Mat> es_hat(assemble_hat_form(params, real).dense());

  double worst = 0.0;
  for (double t : t_list) {
    CVec ph(W.cols());
    for (Eigen::Index i = 0; i < ph.size(); ++i) ph(i) = std::exp(cplx(0.0, t * es.eigenvalues()(i)));
    const CMat Ut = W * ph.asDiagonal() * W.adjoint();  // exp(itH)
    const CMat Mt = hat_propagator(es_hat, 2.0 * scale * t);
    for (int j = 0; j < n; ++j) {
      const auto ju = static_cast<std::size_t>(j);
      CMat diff = Ut * c[ju] * Ut.adjoint();
      for (int k = 0; k < n; ++k) {
        const auto ku = static_cast<std::size_t>(k);
        diff -= Mt(j, k) * c[ku] + Mt(j, n + k) * cd[ku];
      }
      worst = std::max(worst, diff.norm());
    }
  }
  return worst;
}

double hermitian_norm(const SparseOp& Y, int max_iterations) {
  const Eigen::Index dim = Y.rows();
  const int m = static_cast<int>(std::min<Eigen::Index>(max_iterations, dim));
  CVec v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v(i) = 1.0 + 0.37 * std::sin(1.3 * static_cast<double>(i) + 0.7);
  v.normalize();
  std::vector<CVec> basis{v};
  std::vector<double> alpha, beta;
  double estimate = 0.0;
  for (int it = 0; it < m; ++it) {
    CVec w = Y * basis.back();
    const double a = basis.back().dot(w).real();
    alpha.push_back(a);
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& q : basis) w -= q.dot(w) * q;
    const double b = w.norm();

    const auto k = static_cast<Eigen::Index>(alpha.size());
    Mat T = Mat::Zero(k, k);
    for (Eigen::Index i = 0; i < k; ++i) {
      T(i, i) = alpha[static_cast<std::size_t>(i)];
      if (i + 1 < k) T(i, i + 1) = T(i + 1, i) = beta[static_cast<std::size_t>(i)];
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(T);
    const Vec& th = es.eigenvalues();
    const Eigen::Index top = std::abs(th(0)) > std::abs(th(k - 1)) ? 0 : k - 1;
    estimate = std::abs(th(top));
    const double ritz_residual = b * std::abs(es.eigenvectors()(k - 1, top));
    if (b <= 1e-14 * std::max(1.0, estimate) || ritz_residual <= 1e-13 * std::max(1e-300, estimate)) break;
    beta.push_back(b);
    basis.push_back(w / b);
  }
  return estimate;
}

std::vector<double> default_lr_time_grid() {
  std::vector<double> t(400);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = 10.0 * static_cast<double>(i) / 399.0;
  return t;
}

std::vector<double> sup_commutators(const ModelParams& params, const DisorderRealization& real,
                                    const LrOptions& options) {
  check_sites(params.n, 8, "sup_commutators");
  const int n = params.n;
  std::vector<double> sup(static_cast<std::size_t>(std::max(0, n - 1)), 0.0);
  std::vector<SparseOp> B;
  for (int k = 2; k <= n; ++k) B.push_back(pauli_site(options.observable_b, k, n));

  if (options.route == LrOptions::Route::dense) {
    const auto H = build_hamiltonian(params, real);
    Eigen::SelfAdjointEigenSolver<CMat> es(H.matrix);
    const CMat& W = es.eigenvectors();
    const CMat A = CMat(pauli_site(options.observable_a, 1, n));
    std::vector<CMat> Bd(B.begin(), B.end());
    for (double t : options.t_grid) {
      CVec ph(W.cols());
      for (Eigen::Index i = 0; i < ph.size(); ++i) ph(i) = std::exp(cplx(0.0, t * es.eigenvalues()(i)));
      const CMat Ut = W * ph.asDiagonal() * W.adjoint();
      const CMat X = Ut * A * Ut.adjoint();
      for (std::size_t d = 0; d < Bd.size(); ++d) {
        CMat Y = I_UNIT * (X * Bd[d] - Bd[d] * X);
        Y = 0.5 * (Y + Y.adjoint()).eval();
        Eigen::SelfAdjointEigenSolver<CMat> ey(Y, Eigen::EigenvaluesOnly);
        sup[d] = std::max(sup[d], ey.eigenvalues().cwiseAbs().maxCoeff());
      }
    }
    return sup;
  }

  if (options.observable_a != 'x' && options.observable_a != 'y') {
    throw ConfigError("quasi-free route supports A = sigma^x_1 or sigma^y_1; use the dense route");
  }
  const auto F = build_jordan_wigner(n);
  std::vector<SparseOp> cd;
  for (const auto& ck : F.c) cd.push_back(ck.adjoint());
  Eigen::SelfAdjointEigenSolver<Mat> es_hat(assemble_hat_form(params, real).dense());
  const Eigen::Index dim = Eigen::Index{1} << n;
  for (double t : options.t_grid) {
    // tau_t(c_1) = sum_k r_k c_k + r_{n+k} c_k^*, with r the first row of Mhat(2t).
    const CMat Mt = hat_propagator(es_hat, 2.0 * t);
    SparseOp X(dim, dim);
    for (int k = 0; k < n; ++k) {
      const cplx rk = Mt(0, k), rnk = Mt(0, n + k);
      cplx on_c, on_cd;
      if (options.observable_a == 'x') {
        on_c = rk + std::conj(rnk);
        on_cd = rnk + std::conj(rk);
      } else {
        on_c = I_UNIT * (rk - std::conj(rnk));
        on_cd = I_UNIT * (rnk - std::conj(rk));
      }
      X += on_c * F.c[static_cast<std::size_t>(k)] + on_cd * cd[static_cast<std::size_t>(k)];
    }
    for (std::size_t d = 0; d < B.size(); ++d) {
      const SparseOp Y = I_UNIT * (SparseOp(X * B[d]) - SparseOp(B[d] * X));
      sup[d] = std::max(sup[d], hermitian_norm(Y));
    }
  }
  return sup;
}

std::vector<LrRow> lr_commutator_stats(const ModelParams& params, const LrOptions& options) {
  check_sites(params.n, 8, "lr_commutator_stats");
  if (options.realizations < 1) throw ConfigError("lr_commutator_stats: need at least one realization");
  const auto per = parallel_map(static_cast<std::size_t>(options.realizations), options.threads,
                                [&](std::size_t r) {
                                  return sup_commutators(params, sample_disorder(params, options.seed, r), options);
                                });
  const int n = params.n;
  const double R = options.realizations;
  std::vector<LrRow> rows;
  for (int d = 1; d < n; ++d) {
    const auto du = static_cast<std::size_t>(d - 1);
    double s = 0.0, s2 = 0.0;
    for (const auto& v : per) {
      s += v[du];
      s2 += v[du] * v[du];
    }
    const double mean = s / R;
    const double var = options.realizations > 1 ? std::max(0.0, (s2 - R * mean * mean) / (R - 1.0)) : 0.0;
    rows.push_back({d, mean, std::sqrt(var / R)});
  }
  return rows;
}

}  // namespace randblock
