#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "randblock/model.hpp"
#include "randblock/spectral.hpp"
#include "randblock/types.hpp"

namespace randblock {

struct LyapunovOptions {
  std::int64_t steps = 100000;
  int reorth_every = 10;  // in [1, 50]; an upper bound, large frame growth forces an earlier QR
  int batches = 50;
  std::int64_t warmup = 1000;  // discarded steps before averaging
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;  // CounterRng index
};

/// Lyapunov exponents of the transfer-matrix cocycle at one energy.
struct LyapunovSpectrum {
  cplx energy;
  std::vector<double> exponents;   // descending
  std::vector<double> std_errors;  // batch-mean standard errors
  Mat batch_values;                // batches x 2l, columns aligned with exponents
  std::int64_t steps = 0;          // steps averaged over
  int reorth_every = 0;            // value actually used
  std::uint64_t seed = 0;

  [[nodiscard]] int ell() const { return static_cast<int>(exponents.size() / 2); }
};

/// QR frame propagation of a full 2l frame. Throws NumericalError if the
/// run is non-finite even after halving reorth_every once.
LyapunovSpectrum lyapunov_spectrum(const BlockEnsemble& ensemble, cplx E,
                                   const LyapunovOptions& options = {});

/// (gamma_1 + ... + gamma_l) / l with its batch-mean standard error.
Estimate lyapunov_index(const LyapunovSpectrum& spectrum);

/// Largest |gamma_p + gamma_{2l+1-p}| divided by the combined standard error.
double symmetric_pair_score(const LyapunovSpectrum& spectrum);

/// int log|E - x| dN(x), midpoint rule over the histogram bins.
double log_potential(const DOSHistogram& dos, cplx E);

struct ThoulessResult {
  cplx energy;
  Estimate index;              // Lyapunov index
  double det_term = 0.0;       // -(1/l) E log|det g|
  double log_potential = 0.0;  // int log|E - E'| dN(E')
  double residual = 0.0;       // index - det_term - log_potential
  double residual_se = 0.0;    // from the Lyapunov side only
};

ThoulessResult thouless_check(const BlockEnsemble& ensemble, cplx E, const DOSHistogram& dos,
                              const LyapunovOptions& options = {});

/// Top exponent of i.i.d. [[0, 1], [-1, c nu_n]] with nu_n ~ rho.
Estimate anderson_lyapunov_2x2(double effective_coupling, const SingleSiteDistribution& rho,
                               const LyapunovOptions& options = {});

/// Two-step matrix [[1, a/(g^2-1)], [b, 1 + a b/(g^2-1)]] for gamma > 1.
Mat2 two_step_matrix(double gamma, double nu_odd, double nu_even);

/// Top exponent of the i.i.d. two-step matrices; det = 1 is checked every step.
Estimate two_step_lyapunov(double gamma, const SingleSiteDistribution& rho,
                           const LyapunovOptions& options = {});

struct ZeroEnergyDecomposition {
  enum class Branch { below_one, above_one };
  double gamma = 0.0;
  Branch branch = Branch::below_one;
  Estimate measured;  // reduced 2x2 exponent (below_one) or two-step exponent (above_one)
  double shift = 0.0;
  std::array<double, 4> predicted{};  // descending, closed under negation
  double predicted_se = 0.0;          // propagated from `measured`
};

/// gamma in (0,1): {gD + s, |gD - s|, -|gD - s|, -(gD + s)} with s = 1/2 log((1+g)/(1-g)).
/// gamma > 1:      1/2 {gG + s, |gG - s|, ...} with s = 1/2 log((g+1)/(g-1)).
ZeroEnergyDecomposition zero_energy_closed_form(double gamma, Estimate measured);

/// For gamma > 1, the quadruple obtained from the two-step factorisation when
/// the determinant prefactor (g-1)/(g+1) contributes its full logarithm:
/// 1/2 {gG + L, |gG - L|, ...} with L = log((g+1)/(g-1)). Diagnostic only.
std::array<double, 4> two_step_full_shift_prediction(double gamma, double gG);

struct AlphaPoint {
  double alpha = 0.0;
  double f = 0.0;  // Gamma_0(gamma, alpha) - 1/2 log((1+g)/(1-g))
  double se = 0.0;
};

struct AlphaScanOptions {
  double alpha_lo = 0.1;
  double alpha_hi = 20.0;
  int grid = 24;          // log-spaced scan points
  double width = 1e-2;    // bisection stops at this bracket width
  LyapunovOptions lyapunov;
};

struct AlphaScanResult {
  std::vector<AlphaPoint> scan;
  std::vector<AlphaPoint> roots;  // one per sign change of the scan
  AlphaPoint lo, hi;
};

/// Scans f over the bracket with common random numbers and bisects every
/// sign change. Throws NumericalError when no sign change is found.
AlphaScanResult critical_alpha_scan(double gamma, const SingleSiteDistribution& rho,
                                    const AlphaScanOptions& options = {});

AlphaPoint alpha_function(double gamma, const SingleSiteDistribution& rho, double alpha,
                          const LyapunovOptions& options);

}  // namespace randblock
