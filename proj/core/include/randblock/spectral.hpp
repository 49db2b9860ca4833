#pragma once

#include <optional>
#include <span>
#include <vector>

#include "randblock/model.hpp"
#include "randblock/types.hpp"

namespace randblock {

/// Eigenvalues (ascending) and optionally orthonormal eigenvectors of a
/// finite block Jacobi matrix.
struct SpectralData {
  int ell = 0;
  Vec eigenvalues;
  std::optional<Mat> eigenvectors;  // column i belongs to eigenvalues(i)

  [[nodiscard]] int dim() const { return static_cast<int>(eigenvalues.size()); }
  [[nodiscard]] int sites() const { return ell > 0 ? dim() / ell : 0; }
  /// psi_i(j) in R^ell; requires eigenvectors.
  [[nodiscard]] Vec site_block(int i, int j) const;
};

struct EigensolveOptions {
  int dense_cap = 12000;  // maximum ell*n
};

/// Dense symmetric eigensolver for vectors; banded LAPACK for values only.
/// Throws NumericalError (with a matrix fingerprint) if the solver fails.
SpectralData eigensolve(const BlockJacobiMatrix& M, bool want_vectors,
                        const EigensolveOptions& options = {});

/// Largest |M psi - lambda psi| over all pairs, relative to the norm bound of M.
double eigen_residual(const BlockJacobiMatrix& M, const SpectralData& S);

struct SymmetryReport {
  double max_deviation = 0.0;  // max_i |lambda_i + lambda_{N+1-i}|
  bool pass = false;
};

SymmetryReport check_spectral_symmetry(const SpectralData& S, double tol);

/// True iff no eigenvalue lies in the open interval (-lambda, lambda).
bool check_gap(const SpectralData& S, double lambda);

struct BinSpec {
  double lo = 0.0;
  double hi = 0.0;
  int count = 0;
};

/// Normalised density-of-states histogram averaged over an ensemble.
class DOSHistogram {
 public:
  DOSHistogram() = default;
  DOSHistogram(std::vector<double> edges, std::vector<double> mass, int realizations);

  [[nodiscard]] const std::vector<double>& edges() const { return edges_; }
  [[nodiscard]] const std::vector<double>& mass() const { return mass_; }
  [[nodiscard]] int bins() const { return static_cast<int>(mass_.size()); }
  [[nodiscard]] int realizations() const { return realizations_; }
  [[nodiscard]] bool empty() const { return mass_.empty(); }
  [[nodiscard]] double total_mass() const;

  /// Integrated density of states N(E), linear inside each bin.
  [[nodiscard]] double ids(double E) const;

  /// Pools two histograms on identical bins, weighted by realization count.
  [[nodiscard]] DOSHistogram merged(const DOSHistogram& other) const;

 private:
  std::vector<double> edges_;
  std::vector<double> mass_;
  std::vector<double> cumulative_;
  int realizations_ = 0;
};

/// Eigenvalues outside [lo, hi] are counted in the first/last bin. A BinSpec
/// with count > 0 and lo == hi takes its range from the ensemble.
DOSHistogram dos_histogram(std::span<const SpectralData> ensemble, BinSpec bins);
/// Same as above but from plain eigenvalue lists with a common block size.
DOSHistogram dos_histogram(std::span<const Vec> eigenvalue_sets, BinSpec bins);

/// Sorted union of disjoint closed intervals.
class IntervalUnion {
 public:
  static constexpr double kMergeTolerance = 1e-9;

  IntervalUnion() = default;
  explicit IntervalUnion(std::vector<Interval> intervals, double merge_tol = kMergeTolerance);

  void add(Interval iv);
  void add(const IntervalUnion& other);

  [[nodiscard]] const std::vector<Interval>& intervals() const { return intervals_; }
  [[nodiscard]] bool empty() const { return intervals_.empty(); }
  [[nodiscard]] std::size_t size() const { return intervals_.size(); }
  [[nodiscard]] double min() const { return intervals_.front().lo; }
  [[nodiscard]] double max() const { return intervals_.back().hi; }
  [[nodiscard]] bool contains(double x, double tol = 0.0) const;
  [[nodiscard]] double distance(double x) const;
  /// True when every point of `other` is within tol of this union.
  [[nodiscard]] bool covers(const IntervalUnion& other, double tol) const;
  /// Hausdorff distance between the two closed sets.
  [[nodiscard]] double hausdorff(const IntervalUnion& other) const;
  /// Hausdorff distance between this union and a finite point set.
  [[nodiscard]] double hausdorff(std::span<const double> points) const;

 private:
  void normalise();

  std::vector<Interval> intervals_;
  double merge_tol_ = kMergeTolerance;
};

struct FloquetOptions {
  int theta_points = 512;
  double theta_tolerance = 1e-13;  // final golden-section bracket width
};

/// 2p x 2p Hermitian Floquet symbol of the p-periodic block operator with
/// diagonal blocks c_j sigma^z and hopping -S(gamma), at quasi-momentum theta.
CMat floquet_symbol(std::span<const double> potential, double gamma, double theta);

/// Spectrum of the p-periodic infinite operator as a union of bands.
IntervalUnion periodic_spectrum(std::span<const double> potential, double gamma,
                                const FloquetOptions& options = {});

/// Union of periodic spectra over all potentials of period 1..max_period
/// whose values come from a deterministic lattice of supp rho.
IntervalUnion almost_sure_spectrum_approx(const SingleSiteDistribution& rho, double gamma,
                                          int max_period, int samples_per_period,
                                          const FloquetOptions& options = {});

}  // namespace randblock
