#include <sstream>

#include "context.hpp"
#include "randblock/error.hpp"
#include "randblock/localization.hpp"
#include "randblock/xy_oracle.hpp"

namespace randblock::cli {

namespace {

BlockEnsemble ensemble(const RunContext& ctx) {
  return BlockEnsemble::xy(ctx.model.gamma, ctx.model.params.rho, ctx.model.mu);
}

char observable(const RunContext& ctx, const char* key) {
  const auto s = ctx.get<std::string>(key, "x");
  if (s.size() != 1) throw ConfigError(std::string("'") + key + "' must be one of x, y, z");
  return s[0];
}

}  // namespace

void cmd_correlator(RunContext& ctx) {
  EnsembleOptions eo;
  eo.realizations = ctx.get<int>("realizations", eo.realizations);
  eo.seed = ctx.require_seed();
  eo.threads = ctx.threads;
  const Interval J = ctx.window("J");
  const double zeta = ctx.get<double>("zeta", 0.9);
  FitOptions fo;
  fo.boundary = ctx.get<int>("boundary", fo.boundary);
  fo.relative_floor = ctx.get<double>("relative_floor", fo.relative_floor);

  const auto Q = ensemble_correlator(ensemble(ctx), ctx.model.params.n, J, eo);
  ctx.report["realizations"] = Q.realizations;
  if (Q.empty_window) {
    std::ostringstream os;
    CsvWriter w(os, {"dist", "mean_logQ", "se", "count"});
    ctx.add_file("profile.csv", os.str());
    ctx.report["fit"] = nullptr;
    ctx.report["note"] = "no eigenvalue in J in any realization";
    return;
  }
  const auto fit = fit_decay(Q, zeta, fo);
  std::ostringstream os;
  CsvWriter w(os, {"dist", "mean_logQ", "se", "count"});
  for (const auto& r : fit.profile) {
    w.cell(r.dist).cell(r.mean_logQ).cell(r.se).cell(r.count);
    w.end_row();
  }
  ctx.add_file("profile.csv", os.str());
  const ordered_json report{{"zeta", fit.zeta}, {"eta", fit.eta}, {"eta_ci", {fit.eta_ci_lo, fit.eta_ci_hi}},
                            {"C", fit.C}};
  ctx.add_file("fit.json", report.dump(2) + "\n");
  ctx.report["fit"] = report;
  ctx.report["eta_se"] = fit.eta_se;
  ctx.report["bins_used"] = fit.bins_used;
  ctx.report["curvature_p"] = fit.curvature_p;
  ctx.report["curvature_flag"] = fit.curvature_flag;
}

void cmd_wegner_probe(RunContext& ctx) {
  WegnerOptions o;
  o.beta = ctx.get<double>("beta", o.beta);
  o.sigma = ctx.get<double>("sigma", o.sigma);
  o.samples = ctx.get<int>("samples", o.samples);
  o.seed = ctx.require_seed();
  o.threads = ctx.threads;
  const double E = ctx.get<double>("E");
  const auto L = ctx.get<std::vector<int>>("L");
  const auto rows = wegner_probe(ensemble(ctx), E, L, o);
  std::ostringstream os;
  CsvWriter w(os, {"L", "threshold", "hits", "samples", "probability"});
  for (const auto& r : rows) {
    w.cell(r.L).cell(r.threshold).cell(r.hits).cell(r.samples).cell(r.probability);
    w.end_row();
  }
  ctx.add_file("wegner.csv", os.str());
}

void cmd_xy_verify(RunContext& ctx) {
  const auto& p = ctx.model.params;
  if (p.n > kMaxManyBodySites) {
    throw ConfigError("xy-verify needs n <= " + std::to_string(kMaxManyBodySites));
  }
  const int R = ctx.has("nu") ? 1 : ctx.get<int>("realizations", 1);
  std::vector<double> t_list = ctx.get<std::vector<double>>("t", {0.0, 0.5, 1.0, 2.0, 5.0});
  const bool heisenberg = p.n <= 8;

  const auto car = car_defect(build_jordan_wigner(p.n));
  std::ostringstream os;
  CsvWriter w(os, {"realization", "scale", "shift_per_site", "quadratic_residual", "heisenberg_residual",
                   "spectrum_error"});
  ConventionFit first;
  double worst_q = 0.0, worst_h = 0.0, worst_s = 0.0;
  for (int r = 0; r < R; ++r) {
    ctx.log("realization " + std::to_string(r));
    const auto real = ctx.realization(r);
    const auto H = build_hamiltonian(p, real);
    const auto Mhat = assemble_hat_form(p, real);
    const auto fit = verify_quadratic_form(H, Mhat);
    if (r == 0) first = fit;
    const double spec_err = free_fermion_spectrum_error(H, Mhat, fit);
    w.cell(r).cell(fit.scale).cell(fit.shift_per_site).cell(fit.residual);
    if (heisenberg) {
      const double h = verify_heisenberg_identity(p, real, t_list, fit.scale);
      worst_h = std::max(worst_h, h);
      w.cell(h);
    } else {
      w.cell(std::string("nan"));
    }
    w.cell(spec_err);
    w.end_row();
    worst_q = std::max(worst_q, fit.residual);
    worst_s = std::max(worst_s, spec_err);
  }
  ctx.add_file("xy_verify.csv", os.str());
  ctx.add_file("convention.json", convention_json({first.scale, first.shift_per_site}) + "\n");
  ctx.report["car_defect"] = car.max_defect;
  ctx.report["convention"] = {{"scale", first.scale}, {"shift_per_site", first.shift_per_site}};
  ctx.report["max_quadratic_residual"] = worst_q;
  ctx.report["max_heisenberg_residual"] = heisenberg ? ordered_json(worst_h) : ordered_json(nullptr);
  ctx.report["max_spectrum_error"] = worst_s;
}

void cmd_lr_stats(RunContext& ctx) {
  LrOptions o;
  o.realizations = ctx.get<int>("realizations", o.realizations);
  o.seed = ctx.require_seed();
  o.threads = ctx.threads;
  o.observable_a = observable(ctx, "observable_a");
  o.observable_b = observable(ctx, "observable_b");
  const auto route = ctx.get<std::string>("route", "quasi_free");
  if (route == "dense") {
    o.route = LrOptions::Route::dense;
  } else if (route != "quasi_free") {
    throw ConfigError("'route' must be quasi_free or dense");
  }
  if (ctx.has("t")) o.t_grid = ctx.get<std::vector<double>>("t");
  const auto rows = lr_commutator_stats(ctx.model.params, o);
  std::ostringstream os;
  CsvWriter w(os, {"separation", "mean_sup_comm", "se"});
  for (const auto& r : rows) {
    w.cell(r.separation).cell(r.mean_sup_comm).cell(r.se);
    w.end_row();
  }
  ctx.add_file("lr_stats.csv", os.str());
}

}  // namespace randblock::cli
