#include <cmath>
#include <sstream>

#include "context.hpp"
#include "randblock/error.hpp"
#include "randblock/furstenberg.hpp"
#include "randblock/lyapunov.hpp"
#include "randblock/parallel.hpp"
#include "randblock/rng.hpp"
#include "randblock/spectral.hpp"

namespace randblock::cli {

namespace {

LyapunovOptions lyapunov_options(const RunContext& ctx) {
  LyapunovOptions o;
  o.steps = ctx.get<std::int64_t>("steps", o.steps);
  o.reorth_every = ctx.get<int>("reorth_every", o.reorth_every);
  o.batches = ctx.get<int>("batches", o.batches);
  o.warmup = ctx.get<std::int64_t>("warmup", o.warmup);
  o.seed = ctx.require_seed();
  return o;
}

BlockEnsemble ensemble(const RunContext& ctx) {
  return BlockEnsemble::xy(ctx.model.gamma, ctx.model.params.rho, ctx.model.mu);
}

std::vector<std::string> exponent_header() {
  return {"E_re", "E_im", "gamma_1", "gamma_2", "gamma_3", "gamma_4", "se_1", "se_2", "se_3", "se_4", "steps", "seed"};
}

ordered_json estimate_json(const Estimate& e) { return {{"value", e.value}, {"se", e.std_error}}; }

}  // namespace

void cmd_lyapunov(RunContext& ctx) {
  const auto ens = ensemble(ctx);
  const auto base = lyapunov_options(ctx);
  const auto energies = ctx.energies();
  const auto spectra = parallel_map(energies.size(), ctx.threads, [&](std::size_t i) {
    auto o = base;
    o.stream = i;
    return lyapunov_spectrum(ens, energies[i], o);
  });
  std::ostringstream os;
  CsvWriter w(os, exponent_header());
  double worst_pair = 0.0;
  for (const auto& s : spectra) {
    w.cell(s.energy.real()).cell(s.energy.imag());
    for (double g : s.exponents) w.cell(g);
    for (double e : s.std_errors) w.cell(e);
    w.cell(s.steps).cell(s.seed);
    w.end_row();
    worst_pair = std::max(worst_pair, symmetric_pair_score(s));
  }
  ctx.add_file("lyapunov.csv", os.str());
  ctx.report["max_symmetric_pair_score"] = worst_pair;
}

void cmd_thouless(RunContext& ctx) {
  const auto ens = ensemble(ctx);
  const auto lo = lyapunov_options(ctx);
  const int n = ctx.get<int>("dos_n", 1000);
  const int R = ctx.get<int>("dos_realizations", 50);
  const int bins = ctx.get<int>("dos_bins", 4000);
  if (n < 2 || R < 1 || bins < 1) throw ConfigError("dos_n, dos_realizations and dos_bins must be positive");
  ctx.log("density of states from " + std::to_string(R) + " chains of length " + std::to_string(n));
  std::vector<Vec> eig(static_cast<std::size_t>(R));
  parallel_for_index(eig.size(), ctx.threads,
                     [&](std::size_t r) { eig[r] = eigensolve(ens.sample(n, lo.seed, r), false).eigenvalues; });
  const auto dos = dos_histogram(std::span<const Vec>(eig), {0.0, 0.0, bins});

  const auto energies = ctx.energies();
  const auto rows = parallel_map(energies.size(), ctx.threads, [&](std::size_t i) {
    auto o = lo;
    o.stream = i;
    return thouless_check(ens, energies[i], dos, o);
  });
  std::ostringstream os;
  CsvWriter w(os, {"E_re", "E_im", "index", "index_se", "det_term", "log_potential", "residual"});
  double worst = 0.0;
  for (const auto& t : rows) {
    w.cell(t.energy.real()).cell(t.energy.imag()).cell(t.index.value).cell(t.index.std_error);
    w.cell(t.det_term).cell(t.log_potential).cell(t.residual);
    w.end_row();
    worst = std::max(worst, std::abs(t.residual));
  }
  ctx.add_file("thouless.csv", os.str());
  ctx.report["max_abs_residual"] = worst;
}

void cmd_zero_energy(RunContext& ctx) {
  const double g = ctx.model.gamma;
  if (g <= 0.0 || g == 1.0) throw ConfigError("zero-energy needs gamma > 0, gamma != 1");
  const auto ens = ensemble(ctx);
  const auto lo = lyapunov_options(ctx);
  const auto direct = lyapunov_spectrum(ens, cplx(0.0, 0.0), lo);
  const bool below = g < 1.0;
  const Estimate measured = below ? anderson_lyapunov_2x2(1.0 / std::sqrt(1.0 - g * g), ctx.model.params.rho, lo)
                                  : two_step_lyapunov(g, ctx.model.params.rho, lo);
  const auto closed = zero_energy_closed_form(g, measured);

  std::ostringstream os;
  CsvWriter w(os, {"p", "direct", "direct_se", "predicted", "predicted_se", "z_score"});
  double worst = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    const double se = std::hypot(direct.std_errors[i], closed.predicted_se);
    const double z = std::abs(direct.exponents[i] - closed.predicted[i]) / se;
    worst = std::max(worst, z);
    w.cell(static_cast<int>(i + 1)).cell(direct.exponents[i]).cell(direct.std_errors[i]);
    w.cell(closed.predicted[i]).cell(closed.predicted_se).cell(z);
    w.end_row();
  }
  ctx.add_file("zero_energy.csv", os.str());
  ctx.report["branch"] = below ? "below_one" : "above_one";
  ctx.report["measured"] = estimate_json(measured);
  ctx.report["shift"] = closed.shift;
  ctx.report["max_z_score"] = worst;
  ctx.report["symmetric_pair_score"] = symmetric_pair_score(direct);
  if (!below) {
    const auto full = two_step_full_shift_prediction(g, measured.value);
    ctx.report["full_shift_prediction"] = full;
  }
}

void cmd_alpha_scan(RunContext& ctx) {
  AlphaScanOptions o;
  o.alpha_lo = ctx.get<double>("alpha_lo", o.alpha_lo);
  o.alpha_hi = ctx.get<double>("alpha_hi", o.alpha_hi);
  o.grid = ctx.get<int>("grid", o.grid);
  o.width = ctx.get<double>("width", o.width);
  o.lyapunov = lyapunov_options(ctx);
  const auto r = critical_alpha_scan(ctx.model.gamma, ctx.model.params.rho, o);
  std::ostringstream os;
  CsvWriter w(os, {"alpha", "f_alpha", "se"});
  for (const auto& pt : r.scan) {
    w.cell(pt.alpha).cell(pt.f).cell(pt.se);
    w.end_row();
  }
  ctx.add_file("alpha_scan.csv", os.str());
  auto roots = ordered_json::array();
  for (const auto& pt : r.roots) roots.push_back({{"alpha", pt.alpha}, {"f_alpha", pt.f}, {"se", pt.se}});
  ctx.report["roots"] = roots;
}

void cmd_zariski(RunContext& ctx) {
  LieClosureOptions lo;
  lo.depth = ctx.get<int>("depth", lo.depth);
  lo.rel_tol = ctx.get<double>("rel_tol", lo.rel_tol);
  std::vector<double> grid;
  for (cplx E : ctx.energies()) {
    if (E.imag() != 0.0) throw ConfigError("zariski energies must be real");
    grid.push_back(E.real());
  }
  const auto rows = energy_sweep_rank(ctx.model.gamma, grid, lo, ctx.threads);
  std::ostringstream os;
  CsvWriter w(os, {"E", "rank", "marginal_flag"});
  int deficient = 0;
  for (const auto& r : rows) {
    w.cell(r.energy).cell(r.rank).cell(r.marginal ? 1 : 0);
    w.end_row();
    deficient += r.deficient ? 1 : 0;
  }
  ctx.add_file("zariski.csv", os.str());
  ctx.report["deficient_points"] = deficient;

  const int samples = ctx.get<int>("certificate_samples", 0);
  if (samples > 0) {
    CounterRng rng(ctx.require_seed(), 0);
    std::vector<double> nu(static_cast<std::size_t>(samples));
    for (auto& x : nu) x = ctx.model.params.rho.sample(rng);
    const auto c = zero_energy_reducibility_certificate(ctx.model.gamma, nu);
    ordered_json cert{{"gamma", c.gamma},
                      {"samples", c.samples},
                      {"max_pattern_violation", c.max_pattern_violation},
                      {"max_block_error", c.max_block_error},
                      {"pattern_ok", c.pattern_ok},
                      {"blocks_ok", c.blocks_ok},
                      {"det_ok", c.det_ok},
                      {"pass", c.pass}};
    if (ctx.model.gamma < 1.0) {
      cert["max_det_error"] = c.max_det_error;
    } else {
      cert["det_d_negative"] = c.det_d_negative;
    }
    ctx.add_file("certificate.json", cert.dump(2) + "\n");
    ctx.report["certificate"] = cert;
  }
}

}  // namespace randblock::cli
