#pragma once

#include <span>
#include <vector>

#include "randblock/types.hpp"

// Sp_2(R) group elements and sp_2(R) algebra elements for the XY cocycle.
// All matrices are 4x4 and act on (u(k), S_k u(k+1)) in R^4.

namespace randblock {

using Sp2Coordinates = Eigen::Matrix<double, 10, 1>;

/// M(Q) = [[I, 0], [Q, I]].
Mat4 m_of(const Mat2& Q);
/// blockdiag(U, U) with U = [[1, 1], [1, -1]] / sqrt(2); symmetric, self-inverse, symplectic.
Mat4 block_u();

/// Energy factor A_0(E) with A^E_n = M(nu_n sigma^z) A_0(E). Rejects gamma^2 = 1.
Mat4 build_A0(double E, double gamma);

/// M(a sigma^z) A_0(E) [M(b sigma^z) A_0(E)]^{-1}; equals M((a-b) sigma^z) and is
/// the identity when a == b.
Mat4 canceled_generator(double a, double b, double E, double gamma);

/// max-abs of M^t J M - J.
double sp2_group_defect(const Mat4& M);
/// max-abs of X^t J + J X.
double sp2_algebra_defect(const Mat4& X);

/// Coordinates in the basis {a_11, a_12, a_21, a_22, b1_11, b1_22, b1_12, b2_11, b2_22, b2_12}
/// of X = [[a, b1], [b2, -a^t]] with b1, b2 symmetric.
Sp2Coordinates sp2_coordinates(const Mat4& X);
Mat4 sp2_from_coordinates(const Sp2Coordinates& c);

struct LieClosure {
  int dimension = 0;
  bool marginal = false;  // rank changes when the tolerance moves by 10x either way
  int depth_used = 0;
  std::vector<Mat4> basis;           // orthonormal in coordinates
  Vec singular_values;               // of the final generated set
  double max_algebra_defect = 0.0;   // over every generated element
};

struct LieClosureOptions {
  int depth = 3;
  double rel_tol = 1e-9;
  bool conjugate_in_u_frame = true;
};

/// Dimension of the smallest subspace containing [[0,0],[sigma^z,0]] that is
/// closed, up to `depth` rounds, under conjugation by A_0(E)^{+-1}, A_0(E)^{+-2}
/// and under brackets. Dimension 10 is the full sp_2(R).
LieClosure lie_closure_dimension(double E, double gamma, const LieClosureOptions& options = {});

struct RankRow {
  double energy = 0.0;
  int rank = 0;
  bool marginal = false;
  bool deficient = false;  // rank < 10
};

std::vector<RankRow> energy_sweep_rank(double gamma, std::span<const double> energies,
                                       const LieClosureOptions& options = {}, int threads = 1);

/// The permutation P with P^{-1} U A^0_n U P = diag(D_n, F_n).
Mat4 reducing_permutation();
Mat2 reduced_block_d(double gamma, double nu);  // [[0, 1/(1+g)], [g-1, nu/(1+g)]]
Mat2 reduced_block_f(double gamma, double nu);  // [[0, 1/(1-g)], [-1-g, nu/(1-g)]]

struct ReducibilityReport {
  double gamma = 0.0;
  int samples = 0;
  double max_pattern_violation = 0.0;  // entries coupling span{e1,e4} and span{e2,e3}
  double max_block_error = 0.0;        // P^{-1} B P vs diag(D, F)
  double max_det_error = 0.0;          // |det D~ - 1|, gamma in (0,1)
  bool det_d_negative = false;         // det D < 0 for every sample, gamma > 1
  bool pattern_ok = false;
  bool blocks_ok = false;
  bool det_ok = false;
  bool pass = false;
};

ReducibilityReport zero_energy_reducibility_certificate(double gamma, std::span<const double> nu_samples,
                                                        double tol = 1e-12);

}  // namespace randblock
