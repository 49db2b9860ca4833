#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "randblock/model.hpp"
#include "randblock/spectral.hpp"
#include "randblock/types.hpp"

namespace randblock {

/// Q(j,k) = sum over eigenvalues in J of |psi(j)| |psi(k)|, indexed by site.
struct CorrelatorField {
  Interval window;
  Mat mean;        // n x n
  Mat std_error;   // n x n, zero for a single realization
  int realizations = 0;
  bool empty_window = false;  // no eigenvalue fell in J (in every realization)

  [[nodiscard]] int sites() const { return static_cast<int>(mean.rows()); }
};

/// Single realization; requires eigenvectors.
CorrelatorField eigenfunction_correlator(const SpectralData& S, Interval J);

/// ||P_j exp(-itM) chi_J(M) P_k^*|| (operator 2-norm of an l x l block).
double propagator_block_norm(const SpectralData& S, Interval J, int j, int k, double t);

/// max over t_grid of propagator_block_norm; a lower bound for the sup over t.
double dynamical_sup_lower_bound(const SpectralData& S, Interval J, int j, int k,
                                 std::span<const double> t_grid);

struct DominationReport {
  double max_excess = 0.0;  // max over (j,k,t) of norm - Q(j,k)
  bool pass = false;        // max_excess <= tol
};

/// Spot-checks norm <= Q(j,k) + tol for all site pairs and every t.
DominationReport check_domination(const SpectralData& S, const CorrelatorField& Q,
                                  std::span<const double> t_grid, double tol = 1e-12);

struct EnsembleOptions {
  int realizations = 100;
  std::uint64_t seed = 0;
  std::uint64_t first_index = 0;
  int threads = 1;
};

/// Entrywise mean and standard error over independent realizations
/// (index first_index + r), reduced in index order.
CorrelatorField ensemble_correlator(const BlockEnsemble& ensemble, int n, Interval J,
                                    const EnsembleOptions& options);

struct DecayProfileRow {
  int dist = 0;
  double mean_logQ = 0.0;
  double se = 0.0;
  int count = 0;
};

struct FitOptions {
  int boundary = 5;              // sites dropped at each end
  double relative_floor = 1e-12; // bins below floor * max(mean Q) end the fitted range
  double confidence = 0.95;
  double curvature_alpha = 0.01; // F-test level for the quadratic term
};

/// log Q ~ log C - eta d^zeta fitted on distance-binned means of log Q.
struct DecayFit {
  double zeta = 0.9;
  double eta = 0.0;
  double eta_se = 0.0;
  double eta_ci_lo = 0.0;
  double eta_ci_hi = 0.0;
  double C = 0.0;
  double rss = 0.0;
  int bins_used = 0;
  double curvature_p = 1.0;
  bool curvature_flag = false;
  std::vector<DecayProfileRow> profile;
};

/// Throws NumericalError when fewer than three distance bins have positive means.
DecayFit fit_decay(const CorrelatorField& field, double zeta, const FitOptions& options = {});

struct WegnerRow {
  int L = 0;
  double threshold = 0.0;  // exp(-sigma L^beta)
  int hits = 0;
  int samples = 0;
  double probability = 0.0;
};

struct WegnerOptions {
  double beta = 0.5;
  double sigma = 1.0;
  int samples = 200;
  std::uint64_t seed = 0;
  int threads = 1;
};

/// Empirical P(dist(E, spectrum of M_L) <= exp(-sigma L^beta)) for each L.
std::vector<WegnerRow> wegner_probe(const BlockEnsemble& ensemble, double E, std::span<const int> L_list,
                                    const WegnerOptions& options);

}  // namespace randblock
