#include "randblock/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <numbers>
#include <sstream>

#include <lapacke.h>

#include "randblock/error.hpp"

namespace randblock {

namespace {

std::uint64_t fingerprint(const BlockJacobiMatrix& M) {
  std::uint64_t h = 0x243F6A8885A308D3ULL ^ static_cast<std::uint64_t>(M.dim());
  auto feed = [&h](const Mat& b) {
    for (Eigen::Index i = 0; i < b.size(); ++i) {
      std::uint64_t bits = 0;
      const double v = b.data()[i];
      std::memcpy(&bits, &v, sizeof bits);
      h = mix64(h ^ bits);
    }
  };
  for (const auto& v : M.V) feed(v);
  for (const auto& s : M.S) feed(s);
  return h;
}

[[noreturn]] void solver_failure(const BlockJacobiMatrix& M, const char* what, int info) {
  std::ostringstream os;
  os << "eigensolve failed (" << what << ", info=" << info << ") for matrix dim=" << M.dim()
     << " fingerprint=0x" << std::hex << fingerprint(M);
  throw NumericalError(os.str());
}

Vec banded_eigenvalues(const BlockJacobiMatrix& M) {
  const int l = M.ell;
  const int N = M.dim();
  const int kd = std::min(N - 1, 2 * l - 1);
  const int ldab = kd + 1;
  std::vector<double> ab(static_cast<std::size_t>(ldab) * static_cast<std::size_t>(N), 0.0);
  auto put = [&](int i, int j, double v) {  // upper triangle, i <= j
    ab[static_cast<std::size_t>(kd + i - j) + static_cast<std::size_t>(j) * ldab] = v;
  };
  for (int k = 0; k < M.n(); ++k) {
    const Mat& v = M.V[static_cast<std::size_t>(k)];
    for (int b = 0; b < l; ++b)
      for (int a = 0; a <= b; ++a) put(k * l + a, k * l + b, v(a, b));
    if (k + 1 < M.n()) {
      const Mat& s = M.S[static_cast<std::size_t>(k)];
      for (int a = 0; a < l; ++a)
        for (int b = 0; b < l; ++b) put(k * l + a, (k + 1) * l + b, -s(a, b));
    }
  }
  Vec w(N);
  const int info = LAPACKE_dsbev(LAPACK_COL_MAJOR, 'N', 'U', N, kd, ab.data(), ldab, w.data(),
                                 nullptr, 1);
  if (info != 0) solver_failure(M, "dsbev", info);
  return w;
}

}  // namespace

Vec SpectralData::site_block(int i, int j) const {
  if (!eigenvectors) throw ConfigError("site_block needs eigenvectors");
  return eigenvectors->col(i).segment(j * ell, ell);
}

SpectralData eigensolve(const BlockJacobiMatrix& M, bool want_vectors,
                        const EigensolveOptions& options) {
  if (M.n() < 1 || M.ell < 1) throw ConfigError("eigensolve: empty matrix");
  if (M.dim() > options.dense_cap) {
    throw ConfigError("eigensolve: ell*n = " + std::to_string(M.dim()) + " exceeds dense cap " +
                      std::to_string(options.dense_cap));
  }
  SpectralData out;
  out.ell = M.ell;
  if (!want_vectors) {
    out.eigenvalues = banded_eigenvalues(M);
    return out;
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(M.dense(), Eigen::ComputeEigenvectors);
  if (es.info() != Eigen::Success) solver_failure(M, "SelfAdjointEigenSolver", 1);
  out.eigenvalues = es.eigenvalues();
  out.eigenvectors = es.eigenvectors();
  return out;
}

double eigen_residual(const BlockJacobiMatrix& M, const SpectralData& S) {
  if (!S.eigenvectors) throw ConfigError("eigen_residual needs eigenvectors");
  const Mat D = M.dense();
  const Mat R = D * (*S.eigenvectors) - (*S.eigenvectors) * S.eigenvalues.asDiagonal();
  return R.colwise().norm().maxCoeff() / std::max(1.0, M.norm_bound());
}

SymmetryReport check_spectral_symmetry(const SpectralData& S, double tol) {
  SymmetryReport r;
  const int N = S.dim();
  for (int i = 0; i < N; ++i) {
    r.max_deviation = std::max(r.max_deviation, std::abs(S.eigenvalues(i) + S.eigenvalues(N - 1 - i)));
  }
  r.pass = r.max_deviation <= tol;
  return r;
}

bool check_gap(const SpectralData& S, double lambda) {
  if (!(lambda > 0.0)) throw ConfigError("check_gap: lambda must be positive");
  for (Eigen::Index i = 0; i < S.eigenvalues.size(); ++i) {
    if (std::abs(S.eigenvalues(i)) < lambda) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------

DOSHistogram::DOSHistogram(std::vector<double> edges, std::vector<double> mass, int realizations)
    : edges_(std::move(edges)), mass_(std::move(mass)), realizations_(realizations) {
  if (edges_.size() != mass_.size() + 1) throw ConfigError("DOSHistogram: edges/mass mismatch");
  cumulative_.resize(edges_.size());
  cumulative_[0] = 0.0;
  for (std::size_t i = 0; i < mass_.size(); ++i) cumulative_[i + 1] = cumulative_[i] + mass_[i];
}

double DOSHistogram::total_mass() const { return cumulative_.empty() ? 0.0 : cumulative_.back(); }

double DOSHistogram::ids(double E) const {
  if (mass_.empty()) return 0.0;
  if (E <= edges_.front()) return 0.0;
  if (E >= edges_.back()) return total_mass();
  const auto it = std::upper_bound(edges_.begin(), edges_.end(), E);
  const auto b = static_cast<std::size_t>(it - edges_.begin()) - 1;
  const double frac = (E - edges_[b]) / (edges_[b + 1] - edges_[b]);
  return cumulative_[b] + frac * mass_[b];
}

DOSHistogram DOSHistogram::merged(const DOSHistogram& other) const {
  if (empty()) return other;
  if (other.empty()) return *this;
  if (edges_ != other.edges_) throw ConfigError("DOSHistogram::merged: bins differ");
  const double wa = realizations_, wb = other.realizations_;
  std::vector<double> m(mass_.size());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = (wa * mass_[i] + wb * other.mass_[i]) / (wa + wb);
  return {edges_, std::move(m), realizations_ + other.realizations_};
}

DOSHistogram dos_histogram(std::span<const Vec> eigenvalue_sets, BinSpec bins) {
  if (eigenvalue_sets.empty()) throw ConfigError("dos_histogram: empty ensemble");
  if (bins.count < 1) throw ConfigError("dos_histogram: need at least one bin");
  if (bins.lo == bins.hi) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& ev : eigenvalue_sets) {
      if (ev.size() == 0) continue;
      lo = std::min(lo, ev.minCoeff());
      hi = std::max(hi, ev.maxCoeff());
    }
    const double pad = 1e-9 * std::max(1.0, hi - lo);
    bins.lo = lo - pad;
    bins.hi = hi + pad;
  }
  if (!(bins.hi > bins.lo)) throw ConfigError("dos_histogram: need hi > lo");
  std::vector<double> edges(static_cast<std::size_t>(bins.count) + 1);
  for (int i = 0; i <= bins.count; ++i) {
    edges[static_cast<std::size_t>(i)] =
        i == bins.count ? bins.hi : bins.lo + (bins.hi - bins.lo) * i / bins.count;
  }
  std::vector<double> mass(static_cast<std::size_t>(bins.count), 0.0);
  const double width = (bins.hi - bins.lo) / bins.count;
  for (const auto& ev : eigenvalue_sets) {
    if (ev.size() == 0) throw ConfigError("dos_histogram: realization without eigenvalues");
    std::vector<double> counts(mass.size(), 0.0);
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
      auto b = static_cast<long>(std::floor((ev(i) - bins.lo) / width));
      b = std::clamp<long>(b, 0, bins.count - 1);
      counts[static_cast<std::size_t>(b)] += 1.0;
    }
    const double w = 1.0 / static_cast<double>(ev.size());
    for (std::size_t b = 0; b < mass.size(); ++b) mass[b] += counts[b] * w;
  }
  const auto R = static_cast<double>(eigenvalue_sets.size());
  for (auto& m : mass) m /= R;
  return {std::move(edges), std::move(mass), static_cast<int>(eigenvalue_sets.size())};
}

DOSHistogram dos_histogram(std::span<const SpectralData> ensemble, BinSpec bins) {
  std::vector<Vec> sets;
  sets.reserve(ensemble.size());
  for (const auto& s : ensemble) sets.push_back(s.eigenvalues);
  return dos_histogram(std::span<const Vec>(sets), bins);
}

// ---------------------------------------------------------------------------

IntervalUnion::IntervalUnion(std::vector<Interval> intervals, double merge_tol)
    : intervals_(std::move(intervals)), merge_tol_(merge_tol) {
  normalise();
}

void IntervalUnion::add(Interval iv) {
  intervals_.push_back(iv);
  normalise();
}

void IntervalUnion::add(const IntervalUnion& other) {
  intervals_.insert(intervals_.end(), other.intervals_.begin(), other.intervals_.end());
  normalise();
}

void IntervalUnion::normalise() {
  for (auto& iv : intervals_) {
    if (iv.lo > iv.hi) std::swap(iv.lo, iv.hi);
  }
  std::sort(intervals_.begin(), intervals_.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  std::vector<Interval> merged;
  for (const auto& iv : intervals_) {
    if (!merged.empty() && iv.lo <= merged.back().hi + merge_tol_) {
      merged.back().hi = std::max(merged.back().hi, iv.hi);
    } else {
      merged.push_back(iv);
    }
  }
  intervals_ = std::move(merged);
}

bool IntervalUnion::contains(double x, double tol) const { return distance(x) <= tol; }

double IntervalUnion::distance(double x) const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& iv : intervals_) {
    if (iv.contains(x)) return 0.0;
    best = std::min({best, std::abs(x - iv.lo), std::abs(x - iv.hi)});
  }
  return best;
}

namespace {

// sup over x in a of dist(x, b); attained at endpoints of a or at gap
// midpoints of b that fall inside a.
double one_sided_excess(const IntervalUnion& a, const IntervalUnion& b) {
  double worst = 0.0;
  const auto& gaps = b.intervals();
  for (const auto& iv : a.intervals()) {
    worst = std::max({worst, b.distance(iv.lo), b.distance(iv.hi)});
    for (std::size_t i = 0; i + 1 < gaps.size(); ++i) {
      const double mid = 0.5 * (gaps[i].hi + gaps[i + 1].lo);
      if (iv.contains(mid)) worst = std::max(worst, b.distance(mid));
    }
  }
  return worst;
}

}  // namespace

bool IntervalUnion::covers(const IntervalUnion& other, double tol) const {
  return one_sided_excess(other, *this) <= tol;
}

double IntervalUnion::hausdorff(const IntervalUnion& other) const {
  return std::max(one_sided_excess(*this, other), one_sided_excess(other, *this));
}

double IntervalUnion::hausdorff(std::span<const double> points) const {
  if (points.empty() || intervals_.empty()) return std::numeric_limits<double>::infinity();
  std::vector<double> p(points.begin(), points.end());
  std::sort(p.begin(), p.end());
  auto point_dist = [&p](double x) {
    const auto it = std::lower_bound(p.begin(), p.end(), x);
    double d = std::numeric_limits<double>::infinity();
    if (it != p.end()) d = std::min(d, std::abs(*it - x));
    if (it != p.begin()) d = std::min(d, std::abs(*(it - 1) - x));
    return d;
  };
  double worst = 0.0;
  for (double x : p) worst = std::max(worst, distance(x));
  for (const auto& iv : intervals_) {
    worst = std::max({worst, point_dist(iv.lo), point_dist(iv.hi)});
    for (std::size_t i = 0; i + 1 < p.size(); ++i) {
      const double mid = 0.5 * (p[i] + p[i + 1]);
      if (iv.contains(mid)) worst = std::max(worst, point_dist(mid));
    }
  }
  return worst;
}

// ---------------------------------------------------------------------------

CMat floquet_symbol(std::span<const double> potential, double gamma, double theta) {
  const int p = static_cast<int>(potential.size());
  if (p < 1) throw ConfigError("floquet_symbol: empty potential");
  const Mat2 S = s_gamma(gamma);
  const Mat2 sz = pauli_z();
  CMat H = CMat::Zero(2 * p, 2 * p);
  for (int j = 0; j < p; ++j) {
    H.block(2 * j, 2 * j, 2, 2) = (potential[static_cast<std::size_t>(j)] * sz).cast<cplx>();
    if (j + 1 < p) {
      H.block(2 * j, 2 * j + 2, 2, 2) = (-S).cast<cplx>();
      H.block(2 * j + 2, 2 * j, 2, 2) = (-S.transpose()).cast<cplx>();
    }
  }
  const cplx phase = std::polar(1.0, theta);
  H.block(2 * (p - 1), 0, 2, 2) -= S.cast<cplx>() * phase;
  H.block(0, 2 * (p - 1), 2, 2) -= S.transpose().cast<cplx>() * std::conj(phase);
  return H;
}

namespace {

Vec symbol_eigenvalues(std::span<const double> potential, double gamma, double theta) {
  Eigen::SelfAdjointEigenSolver<CMat> es(floquet_symbol(potential, gamma, theta),
                                         Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

// Golden-section search for an extremum of band `band` on [a, b], run to a
// bracket of width tol: bands can have kinks (gamma = 0) where the error in E is
// linear in the error in theta.
double refine_extremum(std::span<const double> potential, double gamma, int band, double a,
                       double b, bool maximise, double tol) {
  const double sign = maximise ? -1.0 : 1.0;
  auto f = [&](double t) { return sign * symbol_eigenvalues(potential, gamma, t)(band); };
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - invphi * (b - a), d = a + invphi * (b - a);
  double fc = f(c), fd = f(d);
  double best = std::min({f(a), f(b), fc, fd});
  for (int it = 0; it < 200 && (b - a) > tol; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
    best = std::min({best, fc, fd});
  }
  return sign * best;
}

}  // namespace

IntervalUnion periodic_spectrum(std::span<const double> potential, double gamma,
                                const FloquetOptions& options) {
  if (potential.empty()) throw ConfigError("periodic_spectrum: need period p >= 1");
  if (std::abs(gamma) == 1.0) throw ConfigError("periodic_spectrum: gamma = +-1 rejected");
  const int grid = std::max(8, options.theta_points);
  const int bands = 2 * static_cast<int>(potential.size());
  // H(-theta) = conj(H(theta)), so [0, pi] carries every eigenvalue.
  std::vector<double> thetas(static_cast<std::size_t>(grid));
  Mat values(grid, bands);
  for (int i = 0; i < grid; ++i) {
    thetas[static_cast<std::size_t>(i)] = std::numbers::pi * i / (grid - 1);
    values.row(i) = symbol_eigenvalues(potential, gamma, thetas[static_cast<std::size_t>(i)]);
  }
  std::vector<Interval> out;
  out.reserve(static_cast<std::size_t>(bands));
  for (int b = 0; b < bands; ++b) {
    const auto col = values.col(b);
    double lo = col.minCoeff();
    double hi = col.maxCoeff();
    // Refine every grid-local extremum: two near-equal maxima at different
    // theta are common and the grid alone may rank them wrongly.
    for (int i = 0; i < grid; ++i) {
      const double left = i > 0 ? col(i - 1) : col(i);
      const double right = i + 1 < grid ? col(i + 1) : col(i);
      const double a = thetas[static_cast<std::size_t>(std::max(0, i - 1))];
      const double c = thetas[static_cast<std::size_t>(std::min(grid - 1, i + 1))];
      if (col(i) <= left && col(i) <= right) {
        lo = std::min(lo, refine_extremum(potential, gamma, b, a, c, false, options.theta_tolerance));
      }
      if (col(i) >= left && col(i) >= right) {
        hi = std::max(hi, refine_extremum(potential, gamma, b, a, c, true, options.theta_tolerance));
      }
    }
    out.push_back({lo, hi});
  }
  return IntervalUnion(std::move(out));
}

IntervalUnion almost_sure_spectrum_approx(const SingleSiteDistribution& rho, double gamma,
                                          int max_period, int samples_per_period,
                                          const FloquetOptions& options) {
  if (max_period < 1) throw ConfigError("almost_sure_spectrum_approx: max_period must be >= 1");
  const std::vector<double> lattice = rho.support_lattice(samples_per_period);
  const auto K = lattice.size();
  IntervalUnion total;
  for (int p = 1; p <= max_period; ++p) {
    std::vector<std::size_t> digits(static_cast<std::size_t>(p), 0);
    std::vector<double> potential(static_cast<std::size_t>(p));
    while (true) {
      // Only the lexicographically smallest rotation of each cycle.
      bool canonical = true;
      for (int r = 1; r < p && canonical; ++r) {
        for (int i = 0; i < p; ++i) {
          const auto a = digits[static_cast<std::size_t>(i)];
          const auto b = digits[static_cast<std::size_t>((i + r) % p)];
          if (b < a) {
            canonical = false;
            break;
          }
          if (b > a) break;
        }
      }
      if (canonical) {
        for (int i = 0; i < p; ++i) potential[static_cast<std::size_t>(i)] = lattice[digits[static_cast<std::size_t>(i)]];
        total.add(periodic_spectrum(potential, gamma, options));
      }
      int pos = p - 1;
      while (pos >= 0 && ++digits[static_cast<std::size_t>(pos)] == K) {
        digits[static_cast<std::size_t>(pos)] = 0;
        --pos;
      }
      if (pos < 0) break;
    }
  }
  return total;
}

}  // namespace randblock
