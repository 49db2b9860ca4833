#include "randblock/furstenberg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "randblock/error.hpp"
#include "randblock/model.hpp"
#include "randblock/parallel.hpp"

namespace randblock {

namespace {

Mat4 sp_form() {
  Mat4 J = Mat4::Zero();
  J.topRightCorner<2, 2>().setIdentity();
  J.bottomLeftCorner<2, 2>() = -Mat2::Identity();
  return J;
}

Mat4 seed_element() {
  Mat4 X = Mat4::Zero();
  X.bottomLeftCorner<2, 2>() = pauli_z();
  return X;
}

void require_gamma(double gamma, const char* what) {
  if (gamma * gamma == 1.0) throw ConfigError(std::string(what) + ": gamma^2 = 1 is not allowed");
}

int rank_at(const Vec& sv, double tol) {
  int r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > tol) ++r;
  return r;
}

}  // namespace

Mat4 m_of(const Mat2& Q) {
  Mat4 M = Mat4::Identity();
  M.bottomLeftCorner<2, 2>() = Q;
  return M;
}

Mat4 block_u() {
  const double h = 1.0 / std::sqrt(2.0);
  Mat2 U;
  U << h, h, h, -h;
  Mat4 B = Mat4::Zero();
  B.topLeftCorner<2, 2>() = U;
  B.bottomRightCorner<2, 2>() = U;
  return B;
}

Mat4 build_A0(double E, double gamma) {
  require_gamma(gamma, "build_A0");
  const double c = 1.0 / (1.0 - gamma * gamma);
  Mat4 A;
  A << 0.0, 0.0, c, gamma * c,
       0.0, 0.0, -gamma * c, -c,
       -1.0, gamma, -E * c, -gamma * E * c,
       -gamma, 1.0, gamma * E * c, E * c;
  return A;
}

Mat4 canceled_generator(double a, double b, double E, double gamma) {
  const Mat4 A0 = build_A0(E, gamma);
  const Mat4 Ga = m_of(a * pauli_z()) * A0;
  const Mat4 Gb = m_of(b * pauli_z()) * A0;
  return Ga * Gb.inverse();
}

double sp2_group_defect(const Mat4& M) {
  const Mat4 J = sp_form();
  return (M.transpose() * J * M - J).cwiseAbs().maxCoeff();
}

double sp2_algebra_defect(const Mat4& X) {
  const Mat4 J = sp_form();
  return (X.transpose() * J + J * X).cwiseAbs().maxCoeff();
}

Sp2Coordinates sp2_coordinates(const Mat4& X) {
  Sp2Coordinates c;
  c << X(0, 0), X(0, 1), X(1, 0), X(1, 1),
       X(0, 2), X(1, 3), X(0, 3),
       X(2, 0), X(3, 1), X(2, 1);
  return c;
}

Mat4 sp2_from_coordinates(const Sp2Coordinates& c) {
  Mat2 a, b1, b2;
  a << c(0), c(1), c(2), c(3);
  b1 << c(4), c(6), c(6), c(5);
  b2 << c(7), c(9), c(9), c(8);
  Mat4 X;
  X.topLeftCorner<2, 2>() = a;
  X.topRightCorner<2, 2>() = b1;
  X.bottomLeftCorner<2, 2>() = b2;
  X.bottomRightCorner<2, 2>() = -a.transpose();
  return X;
}

LieClosure lie_closure_dimension(double E, double gamma, const LieClosureOptions& options) {
  if (gamma == 0.0) throw ConfigError("lie_closure_dimension: gamma = 0 is not allowed");
  require_gamma(gamma, "lie_closure_dimension");
  if (options.depth < 1) throw ConfigError("lie_closure_dimension: depth must be at least 1");

  const Mat4 U = block_u();
  const Mat4 A0 = build_A0(E, gamma);
  const Mat4 A0inv = A0.inverse();
  std::vector<std::pair<Mat4, Mat4>> conj = {
      {A0, A0inv}, {A0inv, A0}, {A0 * A0, A0inv * A0inv}, {A0inv * A0inv, A0 * A0}};
  Mat4 X0 = seed_element();
  if (options.conjugate_in_u_frame) {
    for (auto& [g, ginv] : conj) {
      g = U * g * U;
      ginv = U * ginv * U;
    }
    X0 = U * X0 * U;
  }

  LieClosure out;
  std::vector<Mat4> basis = {X0 / X0.norm()};
  std::vector<Mat4> generated;

  for (int round = 1; round <= options.depth; ++round) {
    generated = basis;
    auto push = [&](const Mat4& Y) {
      const double nrm = Y.norm();
      out.max_algebra_defect = std::max(out.max_algebra_defect, sp2_algebra_defect(Y) / std::max(nrm, 1.0));
      if (nrm > 0.0) generated.push_back(Y / nrm);
    };
    for (const auto& Y : basis)
      for (const auto& [g, ginv] : conj) push(g * Y * ginv);
    for (std::size_t i = 0; i < basis.size(); ++i)
      for (std::size_t j = i + 1; j < basis.size(); ++j) push(basis[i] * basis[j] - basis[j] * basis[i]);

    Mat coords(10, static_cast<Eigen::Index>(generated.size()));
    for (std::size_t i = 0; i < generated.size(); ++i) coords.col(static_cast<Eigen::Index>(i)) = sp2_coordinates(generated[i]);
    Eigen::JacobiSVD<Mat> svd(coords, Eigen::ComputeThinU);
    const Vec sv = svd.singularValues();
    const double scale = sv.size() > 0 ? sv(0) : 0.0;
    const double tol = options.rel_tol * scale;

    out.singular_values = sv;
    out.dimension = rank_at(sv, tol);
    out.marginal = rank_at(sv, tol * 10.0) != rank_at(sv, tol / 10.0);
    out.depth_used = round;

    const auto previous = basis.size();
    basis.clear();
    for (int i = 0; i < out.dimension; ++i) {
      basis.push_back(sp2_from_coordinates(svd.matrixU().col(i)));
    }
    // A round that adds nothing means the span is already closed.
    if (out.dimension == 10 || static_cast<std::size_t>(out.dimension) == previous) break;
  }
  out.basis = basis;
  return out;
}

std::vector<RankRow> energy_sweep_rank(double gamma, std::span<const double> energies,
                                       const LieClosureOptions& options, int threads) {
  return parallel_map(energies.size(), threads, [&](std::size_t i) {
    const auto c = lie_closure_dimension(energies[i], gamma, options);
    return RankRow{energies[i], c.dimension, c.marginal, c.dimension < 10};
  });
}

Mat4 reducing_permutation() {
  Mat4 P;
  P << 1, 0, 0, 0,
       0, 0, 1, 0,
       0, 0, 0, 1,
       0, 1, 0, 0;
  return P;
}

Mat2 reduced_block_d(double gamma, double nu) {
  Mat2 D;
  D << 0.0, 1.0 / (1.0 + gamma), gamma - 1.0, nu / (1.0 + gamma);
  return D;
}

Mat2 reduced_block_f(double gamma, double nu) {
  Mat2 F;
  F << 0.0, 1.0 / (1.0 - gamma), -1.0 - gamma, nu / (1.0 - gamma);
  return F;
}

ReducibilityReport zero_energy_reducibility_certificate(double gamma, std::span<const double> nu_samples,
                                                        double tol) {
  if (gamma == 0.0) throw ConfigError("reducibility certificate: gamma = 0 is not allowed");
  require_gamma(gamma, "reducibility certificate");
  ReducibilityReport r;
  r.gamma = gamma;
  r.samples = static_cast<int>(nu_samples.size());
  r.det_d_negative = gamma > 1.0;

  const Mat4 U = block_u();
  const Mat4 P = reducing_permutation();
  const Mat4 Pinv = P.transpose();
  const Mat4 A0 = build_A0(0.0, gamma);
  const double rescale = gamma < 1.0 ? std::sqrt((1.0 + gamma) / (1.0 - gamma)) : 0.0;

  for (double nu : nu_samples) {
    const Mat4 B = U * m_of(nu * pauli_z()) * A0 * U;
    // Rows 1,4 (0-based 0,3) must not see columns 2,3 (0-based 1,2), and vice versa.
    for (int i : {0, 3})
      for (int j : {1, 2}) {
        r.max_pattern_violation = std::max({r.max_pattern_violation, std::abs(B(i, j)), std::abs(B(j, i))});
      }
    Mat4 expected = Mat4::Zero();
    const Mat2 D = reduced_block_d(gamma, nu);
    expected.topLeftCorner<2, 2>() = D;
    expected.bottomRightCorner<2, 2>() = reduced_block_f(gamma, nu);
    r.max_block_error = std::max(r.max_block_error, (Pinv * B * P - expected).cwiseAbs().maxCoeff());
    if (gamma < 1.0) {
      r.max_det_error = std::max(r.max_det_error, std::abs((rescale * D).determinant() - 1.0));
    } else if (!(D.determinant() < 0.0)) {
      r.det_d_negative = false;
    }
  }
  r.pattern_ok = r.max_pattern_violation <= tol;
  r.blocks_ok = r.max_block_error <= tol;
  r.det_ok = gamma < 1.0 ? r.max_det_error <= tol : r.det_d_negative;
  r.pass = r.pattern_ok && r.blocks_ok && r.det_ok;
  return r;
}

}  // namespace randblock
