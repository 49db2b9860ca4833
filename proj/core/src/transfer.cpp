#include "randblock/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "randblock/error.hpp"

namespace randblock {

namespace {

void require_invertible(const Mat& S, const char* what) {
  Eigen::FullPivLU<Mat> lu(S);
  if (!lu.isInvertible()) throw ConfigError(std::string(what) + ": hopping block is singular");
}

bool all_finite(const CMat& X) { return X.allFinite(); }

double rel_diff(cplx a, cplx b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) / scale;
}

}  // namespace

TransferMatrix transfer_matrix(const Mat& V, const Mat& S_prev, cplx E, int site) {
  const auto l = V.rows();
  if (V.cols() != l || S_prev.rows() != l || S_prev.cols() != l) {
    throw ConfigError("transfer_matrix: block sizes differ");
  }
  Eigen::FullPivLU<Mat> lu(S_prev);
  if (!lu.isInvertible()) throw ConfigError("transfer_matrix: S_{k-1} is singular");
  const CMat Sinv = lu.inverse().cast<cplx>();
  const CMat VmE = V.cast<cplx>() - E * CMat::Identity(l, l);

  TransferMatrix T;
  T.energy = E;
  T.site = site;
  T.entries = CMat::Zero(2 * l, 2 * l);
  T.entries.topRightCorner(l, l) = Sinv;
  T.entries.bottomLeftCorner(l, l) = -S_prev.transpose().cast<cplx>();
  T.entries.bottomRightCorner(l, l) = VmE * Sinv;
  return T;
}

Mat symplectic_form(int ell) {
  Mat J = Mat::Zero(2 * ell, 2 * ell);
  J.topRightCorner(ell, ell).setIdentity();
  J.bottomLeftCorner(ell, ell) = -Mat::Identity(ell, ell);
  return J;
}

double symplectic_defect(const CMat& A) {
  const auto ell = static_cast<int>(A.rows() / 2);
  const CMat J = symplectic_form(ell).cast<cplx>();
  return (A.transpose() * J * A - J).cwiseAbs().maxCoeff();
}

Mat hopping(const BlockJacobiMatrix& M, int k) {
  if (k < 0 || k > M.n()) throw ConfigError("hopping: index out of range");
  if (k == 0 || k == M.n()) return Mat::Identity(M.ell, M.ell);
  return M.S[static_cast<std::size_t>(k - 1)];
}

std::vector<TransferMatrix> transfer_matrices(const BlockJacobiMatrix& M, cplx E) {
  std::vector<TransferMatrix> out;
  out.reserve(static_cast<std::size_t>(M.n()));
  for (int k = 1; k <= M.n(); ++k) {
    out.push_back(transfer_matrix(M.V[static_cast<std::size_t>(k - 1)], hopping(M, k - 1), E, k));
  }
  return out;
}

std::vector<CVec> propagate(const CVec& initial, std::span<const TransferMatrix> transfers) {
  std::vector<CVec> states;
  states.reserve(transfers.size() + 1);
  states.push_back(initial);
  for (const auto& T : transfers) {
    if (T.entries.cols() != states.back().size()) throw ConfigError("propagate: dimension mismatch");
    states.push_back(T.entries * states.back());
  }
  return states;
}

std::vector<CVec> solution_from_states(const BlockJacobiMatrix& M, std::span<const CVec> states) {
  const int L = M.n();
  const int l = M.ell;
  if (static_cast<int>(states.size()) != L + 1) {
    throw ConfigError("solution_from_states: need L+1 states");
  }
  std::vector<CVec> u(static_cast<std::size_t>(L + 2));
  for (int k = 0; k <= L; ++k) u[static_cast<std::size_t>(k)] = states[static_cast<std::size_t>(k)].head(l);
  // The last state carries S_L u(L+1) with S_L = I.
  u[static_cast<std::size_t>(L + 1)] = states[static_cast<std::size_t>(L)].tail(l);
  return u;
}

double recursion_residual(const BlockJacobiMatrix& M, cplx E, std::span<const CVec> u) {
  const int L = M.n();
  if (static_cast<int>(u.size()) != L + 2) throw ConfigError("recursion_residual: need u(0..L+1)");
  double scale = 0.0;
  for (const auto& x : u) scale = std::max(scale, x.cwiseAbs().maxCoeff());
  scale *= M.norm_bound() + std::abs(E) + 2.0;
  if (scale == 0.0) return 0.0;
  double worst = 0.0;
  for (int k = 1; k <= L; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    const CVec r = -hopping(M, k - 1).transpose().cast<cplx>() * u[ku - 1] +
                   M.V[ku - 1].cast<cplx>() * u[ku] - hopping(M, k).cast<cplx>() * u[ku + 1] -
                   E * u[ku];
    worst = std::max(worst, r.cwiseAbs().maxCoeff());
  }
  return worst / scale;
}

FundamentalSolutions fundamental_solutions(const BlockJacobiMatrix& M, cplx z) {
  const int L = M.n();
  const int l = M.ell;
  const CMat I = CMat::Identity(l, l);
  FundamentalSolutions fs;
  auto& U = fs.U.X;
  auto& V = fs.V.X;
  fs.U.boundary = MatrixSolution::Boundary::left;
  fs.V.boundary = MatrixSolution::Boundary::right;
  U.assign(static_cast<std::size_t>(L + 2), CMat::Zero(l, l));
  V.assign(static_cast<std::size_t>(L + 2), CMat::Zero(l, l));

  std::vector<Eigen::PartialPivLU<CMat>> lu_s;
  lu_s.reserve(static_cast<std::size_t>(L + 1));
  for (int k = 0; k <= L; ++k) {
    const Mat S = hopping(M, k);
    require_invertible(S, "fundamental_solutions");
    lu_s.emplace_back(S.cast<cplx>());
  }

  // U(k+1) = S_k^{-1} [ (V_k - z) U(k) - S_{k-1}^t U(k-1) ]
  U[1] = I;
  for (int k = 1; k <= L; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    const CMat rhs = (M.V[ku - 1].cast<cplx>() - z * I) * U[ku] -
                     hopping(M, k - 1).transpose().cast<cplx>() * U[ku - 1];
    U[ku + 1] = lu_s[ku].solve(rhs);
    if (!all_finite(U[ku + 1])) {
      throw NumericalError("fundamental_solutions: overflow in U at k=" + std::to_string(k + 1) +
                           "; use a complex z or a shorter chain");
    }
  }

  // S_{k-1}^t V(k-1) = (V_k - z) V(k) - S_k V(k+1)
  V[static_cast<std::size_t>(L)] = I;
  for (int k = L; k >= 1; --k) {
    const auto ku = static_cast<std::size_t>(k);
    const CMat rhs = (M.V[ku - 1].cast<cplx>() - z * I) * V[ku] - hopping(M, k).cast<cplx>() * V[ku + 1];
    V[ku - 1] = hopping(M, k - 1).transpose().cast<cplx>().partialPivLu().solve(rhs);
    if (!all_finite(V[ku - 1])) {
      throw NumericalError("fundamental_solutions: overflow in V at k=" + std::to_string(k - 1) +
                           "; use a complex z or a shorter chain");
    }
  }
  return fs;
}

double recursion_residual(const BlockJacobiMatrix& M, cplx z, const MatrixSolution& X) {
  const int L = M.n();
  if (static_cast<int>(X.X.size()) != L + 2) throw ConfigError("recursion_residual: need X(0..L+1)");
  double scale = 0.0;
  for (const auto& x : X.X) scale = std::max(scale, x.cwiseAbs().maxCoeff());
  scale *= M.norm_bound() + std::abs(z) + 2.0;
  if (scale == 0.0) return 0.0;
  const auto l = M.ell;
  double worst = 0.0;
  for (int k = 1; k <= L; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    const CMat r = -hopping(M, k - 1).transpose().cast<cplx>() * X.X[ku - 1] +
                   (M.V[ku - 1].cast<cplx>() - z * CMat::Identity(l, l)) * X.X[ku] -
                   hopping(M, k).cast<cplx>() * X.X[ku + 1];
    worst = std::max(worst, r.cwiseAbs().maxCoeff());
  }
  return worst / scale;
}

CMat wronskian(const BlockJacobiMatrix& M, const MatrixSolution& U, const MatrixSolution& V, int k) {
  const int L = M.n();
  if (k < 0 || k > L) throw ConfigError("wronskian: k out of range");
  const auto ku = static_cast<std::size_t>(k);
  if (U.X.size() <= ku + 1 || V.X.size() <= ku + 1) throw ConfigError("wronskian: solution too short");
  const CMat S = hopping(M, k).cast<cplx>();
  return V.X[ku].transpose() * S * U.X[ku + 1] - (S * V.X[ku + 1]).transpose() * U.X[ku];
}

namespace {

// scale * ||X^{-1}||. Applied to X = G(k,k)^{-1}, ||G(k,k)|| <= 1/dist(z, sigma(M)),
// so this only grows near the spectrum. cond(X) is no guide: for the
// Wronskian it grows exponentially in L away from the spectrum.
double condition(const CMat& W, double scale) {
  Eigen::JacobiSVD<CMat> svd(W);
  const auto& s = svd.singularValues();
  const double smin = s(s.size() - 1);
  if (!(smin > 0.0)) return std::numeric_limits<double>::infinity();
  return scale / smin;
}

}  // namespace

namespace {

// Solution ratios F(m) = U(m+1) U(m)^{-1} (m = 1..L) and
// B(m) = V(m) V(m-1)^{-1} (m = 2..L+1, B(L+1) = 0), obtained from Riccati
// recursions. Forward products of U collapse onto the fastest-growing
// direction once the exponent gap times L exceeds -log(eps); the ratios
// do not.
struct SolutionRatios {
  std::vector<CMat> F, Finv, B;  // indexed by site, unused slots empty
};

SolutionRatios solution_ratios(const BlockJacobiMatrix& M, cplx z) {
  const int L = M.n();
  const int l = M.ell;
  const CMat I = CMat::Identity(l, l);
  SolutionRatios r;
  r.F.assign(static_cast<std::size_t>(L + 1), CMat());
  r.Finv.assign(static_cast<std::size_t>(L + 1), CMat());
  r.B.assign(static_cast<std::size_t>(L + 2), CMat());
  auto check = [](const CMat& X, const char* what, int m) {
    if (!all_finite(X)) {
      throw NumericalError(std::string("solution ratio ") + what + " is not finite at site " + std::to_string(m) +
                           " (z at an eigenvalue of a truncated chain)");
    }
  };

  CMat prev_inv = CMat::Zero(l, l);  // U(0) U(1)^{-1} = 0
  for (int m = 1; m <= L; ++m) {
    const auto mu = static_cast<std::size_t>(m);
    const CMat rhs = M.V[mu - 1].cast<cplx>() - z * I - hopping(M, m - 1).transpose().cast<cplx>() * prev_inv;
    r.F[mu] = hopping(M, m).cast<cplx>().partialPivLu().solve(rhs);
    r.Finv[mu] = r.F[mu].partialPivLu().solve(I);
    check(r.Finv[mu], "U(m) U(m+1)^-1", m);
    prev_inv = r.Finv[mu];
  }

  r.B[static_cast<std::size_t>(L + 1)] = CMat::Zero(l, l);
  for (int m = L; m >= 2; --m) {
    const auto mu = static_cast<std::size_t>(m);
    // V(m-1) V(m)^{-1} = S_{m-1}^{-t} [ (V_m - z) - S_m B(m+1) ]
    const CMat rhs = M.V[mu - 1].cast<cplx>() - z * I - hopping(M, m).cast<cplx>() * r.B[mu + 1];
    const CMat psi = hopping(M, m - 1).transpose().cast<cplx>().partialPivLu().solve(rhs);
    r.B[mu] = psi.partialPivLu().solve(I);
    check(r.B[mu], "V(m) V(m-1)^-1", m);
  }
  return r;
}

}  // namespace

namespace {

CMat diagonal_inverse(const BlockJacobiMatrix& M, const SolutionRatios& r, int k) {
  const auto ku = static_cast<std::size_t>(k);
  const CMat S = hopping(M, k).cast<cplx>();
  return S * r.F[ku] - r.B[ku + 1].transpose() * S.transpose();
}

}  // namespace

double wronskian_condition(const BlockJacobiMatrix& M, cplx z) {
  const auto r = solution_ratios(M, z);
  const double scale = M.norm_bound() + std::abs(z);
  double worst = 0.0;
  for (int k = 1; k <= M.n(); ++k) worst = std::max(worst, condition(diagonal_inverse(M, r, k), scale));
  return worst;
}

CMat green_block(const BlockJacobiMatrix& M, cplx z, int j, int k, const GreenOptions& options) {
  const int L = M.n();
  if (j < 1 || j > L || k < 1 || k > L) throw ConfigError("green_block: site index out of range");
  // U(j) W^{-1} V(k)^t with W taken at k: W = V(k)^t X_k U(k), so
  // G(k,k) = X_k^{-1} with X_k = S_k F(k) - B(k+1)^t S_k^t, and the
  // off-diagonal blocks follow from U(j) U(k)^{-1} or V(j) V(k)^{-1}.
  const auto r = solution_ratios(M, z);
  const auto ku = static_cast<std::size_t>(k);
  const CMat X = diagonal_inverse(M, r, k);
  const double cond = condition(X, M.norm_bound() + std::abs(z));
  if (!(cond <= options.max_condition)) {
    throw NearSpectrumError("green_block: z is in or near the spectrum (Wronskian condition " +
                            std::to_string(cond) + ")");
  }
  CMat G = X.partialPivLu().solve(CMat::Identity(M.ell, M.ell));
  if (j < k) {
    CMat P = r.Finv[static_cast<std::size_t>(k - 1)];
    for (int m = k - 2; m >= j; --m) P = r.Finv[static_cast<std::size_t>(m)] * P;
    G = P * G;
  } else if (j > k) {
    CMat P = r.B[ku + 1];
    for (int m = k + 2; m <= j; ++m) P = r.B[static_cast<std::size_t>(m)] * P;
    G = P * G;
  }
  return G;
}

CMat green_block_dense(const BlockJacobiMatrix& M, cplx z, int j, int k) {
  const int L = M.n();
  if (j < 1 || j > L || k < 1 || k > L) throw ConfigError("green_block_dense: site index out of range");
  const auto l = M.ell;
  const CMat A = M.dense().cast<cplx>() - z * CMat::Identity(M.dim(), M.dim());
  CMat rhs = CMat::Zero(M.dim(), l);
  rhs.middleRows((k - 1) * l, l).setIdentity();
  const CMat cols = A.partialPivLu().solve(rhs);
  return cols.middleRows((j - 1) * l, l);
}

CharpolyCheck charpoly_identity_check(const BlockJacobiMatrix& M, cplx E) {
  const int L = M.n();
  const int l = M.ell;
  CharpolyCheck out;
  out.det_direct =
      (M.dense().cast<cplx>() - E * CMat::Identity(M.dim(), M.dim())).partialPivLu().determinant();

  cplx prod_det_s = 1.0;
  for (const auto& s : M.S) prod_det_s *= s.determinant();
  // det P(n+1) = prod_m det(P(m+1) P(m)^{-1}) since P(1) = I.
  const auto r = solution_ratios(M, E);
  cplx det_p = 1.0;
  for (int m = 1; m <= L; ++m) det_p *= r.F[static_cast<std::size_t>(m)].determinant();
  out.det_transfer = prod_det_s * det_p;

  // T_n applied to (P(0), S_0 P(1)) = (0, I) puts S_n P(n+1) = P(n+1) in the
  // lower-right block, so the l-fold wedge element is that block's
  // determinant. The l-frame is carried with QR so its columns stay apart.
  CMat Y = CMat::Zero(2 * l, l);
  Y.bottomRows(l).setIdentity();
  cplx acc = 1.0;
  for (const auto& A : transfer_matrices(M, E)) {
    Eigen::HouseholderQR<CMat> qr(A.entries * Y);
    const CMat R = qr.matrixQR().topRows(l).triangularView<Eigen::Upper>();
    acc *= R.diagonal().prod();
    Y = qr.householderQ() * CMat::Identity(2 * l, l);
  }
  out.exterior_element = acc * Y.bottomRows(l).determinant();

  out.det_residual = rel_diff(out.det_direct, out.det_transfer);
  out.exterior_residual = rel_diff(out.exterior_element, det_p);
  return out;
}

}  // namespace randblock
