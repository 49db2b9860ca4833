#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "randblock/model.hpp"
#include "randblock/types.hpp"

// Exact many-body oracle for the XY chain on (C^2)^{(x)n}, n <= 10.
// Site j = 1..n is the j-th tensor factor; local basis (up, down) with
// sigma^z up = up.

namespace randblock {

using SparseOp = Eigen::SparseMatrix<cplx>;

inline constexpr int kMaxManyBodySites = 10;

struct ManyBodyOperator {
  int n = 0;
  CMat matrix;
  std::string label;

  [[nodiscard]] double hermiticity_defect() const;
};

/// sigma^{x,y,z} (which = 'x','y','z') acting on site j (1-based).
SparseOp pauli_site(char which, int j, int n);

/// sum mu_j [(1+g_j) X_j X_{j+1} + (1-g_j) Y_j Y_{j+1}] + sum nu_j Z_j.
/// gamma = +-1 is allowed here. Throws ConfigError for n > 10.
ManyBodyOperator build_hamiltonian(const ModelParams& params, const DisorderRealization& real);

/// Raising/lowering operators and their Jordan-Wigner fermions.
struct FermionSet {
  int n = 0;
  std::vector<SparseOp> a;  // a_j = (X_j - i Y_j)/2
  std::vector<SparseOp> c;  // c_j = Z_1 ... Z_{j-1} a_j

  /// Entry m = 0..2n-1 of the formal vector (c_1..c_n, c_1^*..c_n^*).
  [[nodiscard]] SparseOp formal(int m) const;
};

FermionSet build_jordan_wigner(int n);

struct CarReport {
  double max_defect = 0.0;  // over all {c_j, c_k^*} - delta I, {c_j, c_k}, and c_j^2
  bool pass = false;
};

CarReport car_defect(const FermionSet& F, double tol = 1e-12);

/// C^* Mhat C as a dense operator.
CMat quadratic_form(const FermionSet& F, const Mat& Mhat);

/// H = scale * C^* Mhat C + shift * I, fitted over scale in {1, 2, 1/2}
/// with the shift from trace matching.
struct ConventionFit {
  double scale = 1.0;
  double shift = 0.0;
  double shift_per_site = 0.0;
  double residual = 0.0;                 // max-abs entry of the reconciled difference
  std::array<double, 3> residual_by_scale{};  // for scale 1, 2, 1/2
};

/// Throws NumericalError ("convention mismatch", with all three residuals)
/// when the best residual exceeds tol.
ConventionFit verify_quadratic_form(const ManyBodyOperator& H, const HatBlockMatrix& Mhat, double tol = 1e-8);

/// Max distance between the sorted spectrum of H and the sorted values
/// scale * sum(+-lambda_i) + shift over the positive eigenvalues of Mhat.
double free_fermion_spectrum_error(const ManyBodyOperator& H, const HatBlockMatrix& Mhat,
                                   const ConventionFit& convention);

/// max over t and j of the Frobenius norm of
/// tau_t(c_j) - sum_k Mhat(2 s t)_{jk} c_k - sum_k Mhat(2 s t)_{j,n+k} c_k^*,
/// where s is the fitted scale. Requires n <= 8.
double verify_heisenberg_identity(const ModelParams& params, const DisorderRealization& real,
                                  std::span<const double> t_list, double scale = 1.0);

/// Largest |eigenvalue| of a Hermitian sparse operator by Lanczos with full
/// reorthogonalisation.
double hermitian_norm(const SparseOp& Y, int max_iterations = 80);

/// 400 points evenly spaced on [0, 10].
std::vector<double> default_lr_time_grid();

struct LrOptions {
  enum class Route { quasi_free, dense };
  Route route = Route::quasi_free;
  char observable_a = 'x';  // at site 1; quasi_free supports 'x' and 'y'
  char observable_b = 'x';  // at site 1 + separation
  std::vector<double> t_grid = default_lr_time_grid();
  int realizations = 50;
  std::uint64_t seed = 0;
  int threads = 1;
};

/// sup over the grid of ||[tau_t(A_1), B_k]|| for one realization, k = 2..n.
std::vector<double> sup_commutators(const ModelParams& params, const DisorderRealization& real,
                                    const LrOptions& options);

struct LrRow {
  int separation = 0;
  double mean_sup_comm = 0.0;
  double se = 0.0;
};

/// Realization mean and standard error of sup_t ||[tau_t(A_1), B_{1+d}]|| for
/// d = 1..n-1. Requires n <= 8.
std::vector<LrRow> lr_commutator_stats(const ModelParams& params, const LrOptions& options);

}  // namespace randblock
