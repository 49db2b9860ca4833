#include "randblock/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "randblock/error.hpp"
#include "randblock/rng.hpp"

namespace randblock {

namespace {

void validate(const LyapunovOptions& o) {
  if (o.steps < 1000) throw ConfigError("lyapunov: steps must be at least 1000");
  if (o.reorth_every < 1 || o.reorth_every > 50) {
    throw ConfigError("lyapunov: reorth_every must lie in [1, 50]");
  }
  if (o.batches < 2) throw ConfigError("lyapunov: need at least 2 batches");
  if (o.warmup < 0) throw ConfigError("lyapunov: warmup must be nonnegative");
}

Estimate batch_estimate(const std::vector<double>& values) {
  const auto n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

struct NonFinite {};

// One run of the frame propagation. Throws NonFinite on overflow/NaN.
LyapunovSpectrum run_frame(const BlockEnsemble& ensemble, cplx E, const LyapunovOptions& o,
                           int reorth) {
  const int l = ensemble.ell();
  const int d = 2 * l;
  const std::int64_t per_batch = std::max<std::int64_t>(reorth, (o.steps / o.batches) / reorth * reorth);

  CounterRng rng(o.seed, o.stream);
  Mat V, S, S_prev;
  ensemble.draw(rng, V, S_prev);

  // S_{k-1} enters the transfer matrix at site k; cache its inverse when fixed.
  const bool fixed_s = ensemble.is_xy();
  CMat s_inv_fixed;
  if (fixed_s) s_inv_fixed = S_prev.inverse().cast<cplx>();

  CMat Q = CMat::Identity(d, d);
  CMat A = CMat::Zero(d, d);
  const CMat El = E * CMat::Identity(l, l);

  auto step = [&] {
    ensemble.draw(rng, V, S);
    const CMat s_inv = fixed_s ? s_inv_fixed : CMat(S_prev.inverse().cast<cplx>());
    A.topLeftCorner(l, l).setZero();
    A.topRightCorner(l, l) = s_inv;
    A.bottomLeftCorner(l, l) = -S_prev.transpose().cast<cplx>();
    A.bottomRightCorner(l, l) = (V.cast<cplx>() - El) * s_inv;
    Q = A * Q;
    S_prev = S;
  };

  std::vector<double> logs(static_cast<std::size_t>(d));
  auto reorthonormalise = [&](bool record, Eigen::Ref<Eigen::RowVectorXd> acc) {
    Eigen::HouseholderQR<CMat> qr(Q);
    const CMat& R = qr.matrixQR();
    for (int i = 0; i < d; ++i) {
      const double v = std::log(std::abs(R(i, i)));
      if (!std::isfinite(v)) throw NonFinite{};
      if (record) acc(i) += v;
    }
    Q = qr.householderQ() * CMat::Identity(d, d);
  };

  Eigen::RowVectorXd scratch = Eigen::RowVectorXd::Zero(d);
  // The frame is also re-orthonormalised early once its entries pass
  // kGrowthCap: det T = 1, so the column spread is about |Q|^2, and past
  // ~1e8 the smallest direction starts to drown in roundoff (near |gamma| = 1
  // a single step can stretch by 1/|gamma^2 - 1|).
  constexpr double kGrowthCap = 1e4;
  auto due = [&](int since) { return since >= reorth || Q.cwiseAbs().maxCoeff() > kGrowthCap; };

  int since = 0;
  for (std::int64_t s = 0; s < o.warmup; ++s) {
    step();
    if (due(++since) || s + 1 == o.warmup) {
      reorthonormalise(false, scratch);
      since = 0;
    }
  }

  Mat batch = Mat::Zero(o.batches, d);
  for (int b = 0; b < o.batches; ++b) {
    Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(d);
    since = 0;
    for (std::int64_t s = 0; s < per_batch; ++s) {
      step();
      if (due(++since) || s + 1 == per_batch) {
        if (!Q.allFinite()) throw NonFinite{};
        reorthonormalise(true, acc);
        since = 0;
      }
    }
    batch.row(b) = acc / static_cast<double>(per_batch);
  }

  // Order columns by their mean, descending.
  const Eigen::RowVectorXd means = batch.colwise().mean();
  std::vector<int> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int c) { return means(a) > means(c); });

  LyapunovSpectrum out;
  out.energy = E;
  out.steps = per_batch * o.batches;
  out.reorth_every = reorth;
  out.seed = o.seed;
  out.batch_values.resize(o.batches, d);
  for (int i = 0; i < d; ++i) {
    const int c = order[static_cast<std::size_t>(i)];
    out.batch_values.col(i) = batch.col(c);
    std::vector<double> col(batch.col(c).data(), batch.col(c).data() + o.batches);
    const Estimate e = batch_estimate(col);
    out.exponents.push_back(e.value);
    out.std_errors.push_back(e.std_error);
  }
  return out;
}

// Top exponent of an i.i.d. 2x2 cocycle given a per-step matrix generator.
template <class Gen>
Estimate vector_cocycle(const LyapunovOptions& o, Gen&& next) {
  validate(o);
  const std::int64_t per_batch = std::max<std::int64_t>(1, o.steps / o.batches);
  CounterRng rng(o.seed, o.stream);
  Eigen::Vector2d v(1.0, 0.6180339887498949);
  v.normalize();
  for (std::int64_t s = 0; s < o.warmup; ++s) {
    v = next(rng) * v;
    v.normalize();
  }
  std::vector<double> batch(static_cast<std::size_t>(o.batches));
  for (int b = 0; b < o.batches; ++b) {
    double acc = 0.0;
    for (std::int64_t s = 0; s < per_batch; ++s) {
      v = next(rng) * v;
      const double nrm = v.norm();
      if (!(nrm > 0.0) || !std::isfinite(nrm)) throw NumericalError("2x2 cocycle became non-finite");
      acc += std::log(nrm);
      v /= nrm;
    }
    batch[static_cast<std::size_t>(b)] = acc / static_cast<double>(per_batch);
  }
  return batch_estimate(batch);
}

}  // namespace

LyapunovSpectrum lyapunov_spectrum(const BlockEnsemble& ensemble, cplx E, const LyapunovOptions& options) {
  validate(options);
  try {
    return run_frame(ensemble, E, options, options.reorth_every);
  } catch (const NonFinite&) {
  }
  const int retry = std::max(1, options.reorth_every / 2);
  try {
    return run_frame(ensemble, E, options, retry);
  } catch (const NonFinite&) {
    throw NumericalError("lyapunov_spectrum: non-finite frame at E=(" + std::to_string(E.real()) + "," +
                         std::to_string(E.imag()) + ") even with reorth_every=" + std::to_string(retry));
  }
}

Estimate lyapunov_index(const LyapunovSpectrum& spectrum) {
  const int l = spectrum.ell();
  const Vec per_batch = spectrum.batch_values.leftCols(l).rowwise().mean();
  return batch_estimate(std::vector<double>(per_batch.data(), per_batch.data() + per_batch.size()));
}

double symmetric_pair_score(const LyapunovSpectrum& spectrum) {
  const auto d = spectrum.exponents.size();
  double worst = 0.0;
  for (std::size_t p = 0; p < d / 2; ++p) {
    const std::size_t q = d - 1 - p;
    const double se = std::hypot(spectrum.std_errors[p], spectrum.std_errors[q]);
    const double dev = std::abs(spectrum.exponents[p] + spectrum.exponents[q]);
    worst = std::max(worst, se > 0.0 ? dev / se : (dev > 0.0 ? INFINITY : 0.0));
  }
  return worst;
}

double log_potential(const DOSHistogram& dos, cplx E) {
  if (dos.empty()) throw ConfigError("log_potential: empty density of states");
  const auto& edges = dos.edges();
  const auto& mass = dos.mass();
  double acc = 0.0;
  for (std::size_t i = 0; i < mass.size(); ++i) {
    if (mass[i] == 0.0) continue;
    const double mid = 0.5 * (edges[i] + edges[i + 1]);
    acc += mass[i] * std::log(std::abs(E - mid));
  }
  return acc;
}

ThoulessResult thouless_check(const BlockEnsemble& ensemble, cplx E, const DOSHistogram& dos,
                              const LyapunovOptions& options) {
  if (dos.empty()) throw ConfigError("thouless_check: empty density of states");
  ThoulessResult r;
  r.energy = E;
  const auto exps = lyapunov_spectrum(ensemble, E, options);
  r.index = lyapunov_index(exps);
  r.det_term = -ensemble.mean_log_abs_det_s() / ensemble.ell();
  r.log_potential = log_potential(dos, E);
  r.residual = r.index.value - r.det_term - r.log_potential;
  r.residual_se = r.index.std_error;
  return r;
}

Estimate anderson_lyapunov_2x2(double effective_coupling, const SingleSiteDistribution& rho,
                               const LyapunovOptions& options) {
  return vector_cocycle(options, [&](CounterRng& rng) {
    Mat2 D;
    D << 0.0, 1.0, -1.0, effective_coupling * rho.sample(rng);
    return D;
  });
}

Mat2 two_step_matrix(double gamma, double nu_odd, double nu_even) {
  const double c = gamma * gamma - 1.0;
  Mat2 G;
  G << 1.0, nu_odd / c, nu_even, 1.0 + nu_odd * nu_even / c;
  return G;
}

Estimate two_step_lyapunov(double gamma, const SingleSiteDistribution& rho, const LyapunovOptions& options) {
  if (!(gamma > 1.0)) throw ConfigError("two_step_lyapunov: requires gamma > 1");
  return vector_cocycle(options, [&](CounterRng& rng) {
    const double a = rho.sample(rng);
    const double b = rho.sample(rng);
    const Mat2 G = two_step_matrix(gamma, a, b);
    const double scale = 1.0 + G.cwiseAbs().maxCoeff() * G.cwiseAbs().maxCoeff();
    if (std::abs(G.determinant() - 1.0) > 1e-14 * scale) {
      throw NumericalError("two_step_lyapunov: det G != 1");
    }
    return G;
  });
}

ZeroEnergyDecomposition zero_energy_closed_form(double gamma, Estimate measured) {
  if (!(gamma > 0.0) || gamma == 1.0) {
    throw ConfigError("zero_energy_closed_form: gamma must lie in (0,1) or (1,inf)");
  }
  ZeroEnergyDecomposition z;
  z.gamma = gamma;
  z.measured = measured;
  double top, second;
  if (gamma < 1.0) {
    z.branch = ZeroEnergyDecomposition::Branch::below_one;
    z.shift = 0.5 * std::log((1.0 + gamma) / (1.0 - gamma));
    top = measured.value + z.shift;
    second = std::abs(measured.value - z.shift);
    z.predicted_se = measured.std_error;
  } else {
    z.branch = ZeroEnergyDecomposition::Branch::above_one;
    z.shift = 0.5 * std::log((gamma + 1.0) / (gamma - 1.0));
    top = 0.5 * (measured.value + z.shift);
    second = 0.5 * std::abs(measured.value - z.shift);
    z.predicted_se = 0.5 * measured.std_error;
  }
  z.predicted = {top, second, -second, -top};
  return z;
}

std::array<double, 4> two_step_full_shift_prediction(double gamma, double gG) {
  if (!(gamma > 1.0)) throw ConfigError("two_step_full_shift_prediction: requires gamma > 1");
  const double L = std::log((gamma + 1.0) / (gamma - 1.0));
  const double top = 0.5 * (gG + L);
  const double second = 0.5 * std::abs(gG - L);
  return {top, second, -second, -top};
}

AlphaPoint alpha_function(double gamma, const SingleSiteDistribution& rho, double alpha,
                          const LyapunovOptions& options) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("alpha scan: gamma must lie in (0,1)");
  const Estimate g0 = anderson_lyapunov_2x2(alpha / std::sqrt(1.0 - gamma * gamma), rho, options);
  const double shift = 0.5 * std::log((1.0 + gamma) / (1.0 - gamma));
  return {alpha, g0.value - shift, g0.std_error};
}

AlphaScanResult critical_alpha_scan(double gamma, const SingleSiteDistribution& rho,
                                    const AlphaScanOptions& options) {
  if (!(options.alpha_lo > 0.0 && options.alpha_hi > options.alpha_lo)) {
    throw ConfigError("critical_alpha_scan: need 0 < alpha_lo < alpha_hi");
  }
  if (options.grid < 2) throw ConfigError("critical_alpha_scan: grid needs at least 2 points");
  AlphaScanResult out;
  const double llo = std::log(options.alpha_lo);
  const double lhi = std::log(options.alpha_hi);
  for (int i = 0; i < options.grid; ++i) {
    const double a = i == options.grid - 1 ? options.alpha_hi
                                           : std::exp(llo + (lhi - llo) * i / (options.grid - 1));
    out.scan.push_back(alpha_function(gamma, rho, i == 0 ? options.alpha_lo : a, options.lyapunov));
  }
  out.lo = out.scan.front();
  out.hi = out.scan.back();

  for (std::size_t i = 0; i + 1 < out.scan.size(); ++i) {
    AlphaPoint a = out.scan[i];
    AlphaPoint b = out.scan[i + 1];
    if ((a.f < 0.0) == (b.f < 0.0)) continue;
    while (b.alpha - a.alpha > options.width) {
      const AlphaPoint m = alpha_function(gamma, rho, 0.5 * (a.alpha + b.alpha), options.lyapunov);
      if ((m.f < 0.0) == (a.f < 0.0)) {
        a = m;
      } else {
        b = m;
      }
    }
    out.roots.push_back(alpha_function(gamma, rho, 0.5 * (a.alpha + b.alpha), options.lyapunov));
  }
  if (out.roots.empty()) {
    throw NumericalError("critical_alpha_scan: no root bracketed in [" + std::to_string(options.alpha_lo) +
                         ", " + std::to_string(options.alpha_hi) + "] (f(lo)=" + std::to_string(out.lo.f) +
                         ", f(hi)=" + std::to_string(out.hi.f) + "); widen the bracket");
  }
  return out;
}

}  // namespace randblock
