#include "randblock/localization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "randblock/error.hpp"
#include "randblock/parallel.hpp"
#include "randblock/rng.hpp"

namespace randblock {

namespace {

// Columns of the eigenvectors whose eigenvalue lies in J.
std::vector<int> window_indices(const SpectralData& S, Interval J) {
  std::vector<int> idx;
  for (int i = 0; i < S.dim(); ++i)
    if (J.contains(S.eigenvalues(i))) idx.push_back(i);
  return idx;
}

const Mat& vectors_of(const SpectralData& S) {
  if (!S.eigenvectors) throw ConfigError("eigenvectors are required");
  return *S.eigenvectors;
}

// sum over lambda in J of exp(-i t lambda) psi psi^t, as a dense matrix.
CMat windowed_propagator(const SpectralData& S, const std::vector<int>& idx, double t) {
  const Mat& V = vectors_of(S);
  const auto m = static_cast<Eigen::Index>(idx.size());
  Mat Psi(V.rows(), m);
  CVec phase(m);
  for (Eigen::Index c = 0; c < m; ++c) {
    Psi.col(c) = V.col(idx[static_cast<std::size_t>(c)]);
    phase(c) = std::exp(cplx(0.0, -t * S.eigenvalues(idx[static_cast<std::size_t>(c)])));
  }
  const CMat PsiC = Psi.cast<cplx>();
  return PsiC * phase.asDiagonal() * PsiC.transpose();
}

double block_norm(const CMat& W, int l, int j, int k) {
  const CMat B = W.block(j * l, k * l, l, l);
  Eigen::JacobiSVD<CMat> svd(B);
  return svd.singularValues()(0);
}

}  // namespace

CorrelatorField eigenfunction_correlator(const SpectralData& S, Interval J) {
  const Mat& V = vectors_of(S);
  const int n = S.sites();
  const int l = S.ell;
  const auto idx = window_indices(S, J);
  CorrelatorField f;
  f.window = J;
  f.realizations = 1;
  f.std_error = Mat::Zero(n, n);
  f.empty_window = idx.empty();
  Mat norms = Mat::Zero(n, static_cast<Eigen::Index>(idx.size()));
  for (std::size_t c = 0; c < idx.size(); ++c) {
    const auto col = V.col(idx[c]);
    for (int j = 0; j < n; ++j) norms(j, static_cast<Eigen::Index>(c)) = col.segment(j * l, l).norm();
  }
  f.mean = norms * norms.transpose();
  // Exact symmetry as stored.
  f.mean = 0.5 * (f.mean + f.mean.transpose()).eval();
  return f;
}

double propagator_block_norm(const SpectralData& S, Interval J, int j, int k, double t) {
  const auto idx = window_indices(S, J);
  if (idx.empty()) return 0.0;
  return block_norm(windowed_propagator(S, idx, t), S.ell, j, k);
}

double dynamical_sup_lower_bound(const SpectralData& S, Interval J, int j, int k,
                                 std::span<const double> t_grid) {
  const auto idx = window_indices(S, J);
  double best = 0.0;
  if (idx.empty()) return best;
  for (double t : t_grid) best = std::max(best, block_norm(windowed_propagator(S, idx, t), S.ell, j, k));
  return best;
}

DominationReport check_domination(const SpectralData& S, const CorrelatorField& Q,
                                  std::span<const double> t_grid, double tol) {
  DominationReport r;
  r.max_excess = -std::numeric_limits<double>::infinity();
  const auto idx = window_indices(S, Q.window);
  const int n = S.sites();
  for (double t : t_grid) {
    if (idx.empty()) {
      r.max_excess = std::max(r.max_excess, -Q.mean.maxCoeff());
      continue;
    }
    const CMat W = windowed_propagator(S, idx, t);
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) r.max_excess = std::max(r.max_excess, block_norm(W, S.ell, j, k) - Q.mean(j, k));
  }
  r.pass = r.max_excess <= tol;
  return r;
}

CorrelatorField ensemble_correlator(const BlockEnsemble& ensemble, int n, Interval J,
                                    const EnsembleOptions& options) {
  if (options.realizations < 1) throw ConfigError("ensemble_correlator: need at least one realization");
  const auto fields = parallel_map(static_cast<std::size_t>(options.realizations), options.threads,
                                   [&](std::size_t r) {
                                     const auto M = ensemble.sample(n, options.seed, options.first_index + r);
                                     return eigenfunction_correlator(eigensolve(M, true), J);
                                   });
  CorrelatorField out;
  out.window = J;
  out.realizations = options.realizations;
  out.empty_window = true;
  Mat sum = Mat::Zero(n, n);
  Mat sumsq = Mat::Zero(n, n);
  for (const auto& f : fields) {
    sum += f.mean;
    sumsq += f.mean.cwiseProduct(f.mean);
    out.empty_window = out.empty_window && f.empty_window;
  }
  const double R = options.realizations;
  out.mean = sum / R;
  if (options.realizations > 1) {
    const Mat var = ((sumsq - R * out.mean.cwiseProduct(out.mean)) / (R - 1.0)).cwiseMax(0.0);
    out.std_error = (var / R).cwiseSqrt();
  } else {
    out.std_error = Mat::Zero(n, n);
  }
  return out;
}

DecayFit fit_decay(const CorrelatorField& field, double zeta, const FitOptions& options) {
  if (!(zeta > 0.0 && zeta <= 1.0)) throw ConfigError("fit_decay: zeta must lie in (0, 1]");
  const int n = field.sites();
  const int lo = options.boundary;
  const int hi = n - 1 - options.boundary;
  if (hi - lo < 3) throw NumericalError("fit_decay: chain too short after boundary exclusion");

  double max_mean = 0.0;
  for (int j = lo; j <= hi; ++j)
    for (int k = j; k <= hi; ++k) max_mean = std::max(max_mean, field.mean(j, k));
  if (!(max_mean > 0.0)) throw NumericalError("fit_decay: insufficient positive entries");
  const double floor_log = std::log(options.relative_floor * max_mean);

  DecayFit fit;
  fit.zeta = zeta;
  for (int d = 0; d <= hi - lo; ++d) {
    double acc = 0.0, acc2 = 0.0;
    int count = 0;
    for (int j = lo; j + d <= hi; ++j) {
      const double q = field.mean(j, j + d);
      if (q > 0.0) {
        const double v = std::log(q);
        acc += v;
        acc2 += v * v;
        ++count;
      }
    }
    if (count == 0) break;
    const double mean = acc / count;
    if (mean < floor_log) break;
    const double var = count > 1 ? std::max(0.0, (acc2 - count * mean * mean) / (count - 1)) : 0.0;
    fit.profile.push_back({d, mean, std::sqrt(var / count), count});
  }
  const auto m = static_cast<int>(fit.profile.size());
  if (m < 3) throw NumericalError("fit_decay: insufficient positive entries (fewer than 3 distance bins)");
  fit.bins_used = m;

  Vec x(m), y(m);
  for (int i = 0; i < m; ++i) {
    x(i) = std::pow(static_cast<double>(fit.profile[static_cast<std::size_t>(i)].dist), zeta);
    y(i) = fit.profile[static_cast<std::size_t>(i)].mean_logQ;
  }
  const double xm = x.mean(), ym = y.mean();
  const double sxx = (x.array() - xm).square().sum();
  const double sxy = ((x.array() - xm) * (y.array() - ym)).sum();
  const double slope = sxy / sxx;
  const double intercept = ym - slope * xm;
  const Vec resid = y - (Vec::Constant(m, intercept) + slope * x);
  fit.rss = resid.squaredNorm();
  fit.eta = -slope;
  fit.C = std::exp(intercept);
  fit.eta_se = std::sqrt(fit.rss / (m - 2) / sxx);
  const boost::math::students_t tdist(m - 2);
  const double tq = boost::math::quantile(tdist, 1.0 - 0.5 * (1.0 - options.confidence));
  fit.eta_ci_lo = fit.eta - tq * fit.eta_se;
  fit.eta_ci_hi = fit.eta + tq * fit.eta_se;

  // Curvature: does a quadratic term in d^zeta reduce the residual significantly?
  if (m >= 4) {
    Mat X(m, 3);
    X.col(0).setOnes();
    X.col(1) = x;
    X.col(2) = x.cwiseProduct(x);
    const Vec beta = X.colPivHouseholderQr().solve(y);
    const double rss2 = (y - X * beta).squaredNorm();
    const double scale = std::max(1.0, (y.array() - ym).square().sum());
    if (fit.rss <= 1e-20 * scale) {
      fit.curvature_p = 1.0;
    } else if (rss2 <= 1e-24 * scale) {
      fit.curvature_p = 0.0;
    } else {
      const double F = (fit.rss - rss2) / (rss2 / (m - 3));
      const boost::math::fisher_f fdist(1.0, m - 3);
      fit.curvature_p = F <= 0.0 ? 1.0 : boost::math::cdf(boost::math::complement(fdist, F));
    }
    fit.curvature_flag = fit.curvature_p < options.curvature_alpha;
  }
  return fit;
}

std::vector<WegnerRow> wegner_probe(const BlockEnsemble& ensemble, double E, std::span<const int> L_list,
                                    const WegnerOptions& options) {
  if (options.samples < 1) throw ConfigError("wegner_probe: need at least one sample");
  std::vector<WegnerRow> rows;
  for (int L : L_list) {
    if (L < 1) throw ConfigError("wegner_probe: L must be positive");
    WegnerRow row;
    row.L = L;
    row.samples = options.samples;
    row.threshold = std::exp(-options.sigma * std::pow(static_cast<double>(L), options.beta));
    const std::uint64_t seed = mix64(options.seed ^ (0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(L)));
    const auto hit = parallel_map(static_cast<std::size_t>(options.samples), options.threads, [&](std::size_t s) {
      const auto S = eigensolve(ensemble.sample(L, seed, s), false);
      const double d = (S.eigenvalues.array() - E).abs().minCoeff();
      return d <= row.threshold ? 1 : 0;
    });
    for (int h : hit) row.hits += h;
    row.probability = static_cast<double>(row.hits) / options.samples;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace randblock
