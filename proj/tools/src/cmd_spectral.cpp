#include <cmath>
#include <numbers>
#include <sstream>

#include "context.hpp"
#include "randblock/error.hpp"
#include "randblock/parallel.hpp"
#include "randblock/spectral.hpp"
#include "randblock/transfer.hpp"

namespace randblock::cli {

namespace {

std::string intervals_csv(const IntervalUnion& u) {
  std::ostringstream os;
  CsvWriter w(os, {"lo", "hi"});
  for (const auto& iv : u.intervals()) {
    w.cell(iv.lo).cell(iv.hi);
    w.end_row();
  }
  return os.str();
}

ordered_json intervals_json(const IntervalUnion& u) {
  auto a = ordered_json::array();
  for (const auto& iv : u.intervals()) a.push_back({iv.lo, iv.hi});
  return a;
}

FloquetOptions floquet_options(const RunContext& ctx) {
  FloquetOptions o;
  o.theta_points = ctx.get<int>("theta_points", o.theta_points);
  if (o.theta_points < 8) throw ConfigError("'theta_points' must be at least 8");
  return o;
}

int realization_count(const RunContext& ctx, int fallback) {
  const int r = ctx.has("nu") ? 1 : ctx.get<int>("realizations", fallback);
  if (r < 1) throw ConfigError("'realizations' must be positive");
  return r;
}

ordered_json complex_json(cplx z) { return {z.real(), z.imag()}; }

}  // namespace

void cmd_spectrum(RunContext& ctx) {
  const int R = realization_count(ctx, 1);
  const bool dump = ctx.get<bool>("dump_matrix", false);
  const auto& p = ctx.model.params;
  std::vector<BlockJacobiMatrix> mats(static_cast<std::size_t>(R));
  for (int r = 0; r < R; ++r) mats[static_cast<std::size_t>(r)] = assemble_block_jacobi(p, ctx.realization(r));
  const auto spectra = parallel_map(mats.size(), ctx.threads, [&](std::size_t r) { return eigensolve(mats[r], false); });

  std::ostringstream os;
  CsvWriter w(os, {"realization", "index", "lambda"});
  double worst_sym = 0.0;
  for (int r = 0; r < R; ++r) {
    const auto& S = spectra[static_cast<std::size_t>(r)];
    for (int i = 0; i < S.dim(); ++i) {
      w.cell(r).cell(i).cell(S.eigenvalues(i));
      w.end_row();
    }
    worst_sym = std::max(worst_sym, check_spectral_symmetry(S, 0.0).max_deviation);
  }
  ctx.add_file("eigenvalues.csv", os.str());
  if (dump) {
    for (int r = 0; r < R; ++r) {
      std::ostringstream m;
      write_matrix_csv(m, mats[static_cast<std::size_t>(r)].dense(), p.n, p.ell);
      ctx.add_file("matrix_" + std::to_string(r) + ".csv", m.str());
    }
  }
  ctx.report["realizations"] = R;
  ctx.report["dim"] = p.ell * p.n;
  ctx.report["symmetry_max_deviation"] = worst_sym;
  if (ctx.has("gap")) {
    const double lambda = ctx.get<double>("gap");
    int gapped = 0;
    for (const auto& S : spectra) gapped += check_gap(S, lambda) ? 1 : 0;
    ctx.report["gap"] = {{"lambda", lambda}, {"gapped_realizations", gapped}};
  }
}

void cmd_dos(RunContext& ctx) {
  const int R = realization_count(ctx, 50);
  BinSpec bins;
  bins.lo = ctx.get<double>("bin_lo", 0.0);
  bins.hi = ctx.get<double>("bin_hi", 0.0);
  bins.count = ctx.get<int>("bins", 400);
  std::vector<Vec> eig(static_cast<std::size_t>(R));
  parallel_for_index(eig.size(), ctx.threads, [&](std::size_t r) {
    eig[r] = eigensolve(assemble_block_jacobi(ctx.model.params, ctx.realization(r)), false).eigenvalues;
  });
  const auto dos = dos_histogram(std::span<const Vec>(eig), bins);
  std::ostringstream os;
  CsvWriter w(os, {"bin_lo", "bin_hi", "mass"});
  for (int b = 0; b < dos.bins(); ++b) {
    w.cell(dos.edges()[static_cast<std::size_t>(b)]).cell(dos.edges()[static_cast<std::size_t>(b) + 1]);
    w.cell(dos.mass()[static_cast<std::size_t>(b)]);
    w.end_row();
  }
  ctx.add_file("dos.csv", os.str());
  ctx.report["realizations"] = dos.realizations();
  ctx.report["bins"] = dos.bins();
  ctx.report["total_mass"] = dos.total_mass();
}

void cmd_periodic(RunContext& ctx) {
  const auto potential = ctx.get<std::vector<double>>("potential");
  if (potential.empty()) throw ConfigError("'potential' must be a nonempty list");
  const auto bands = periodic_spectrum(potential, ctx.model.gamma, floquet_options(ctx));
  ctx.add_file("intervals.csv", intervals_csv(bands));
  ctx.report["intervals"] = intervals_json(bands);
}

void cmd_asspec(RunContext& ctx) {
  const int period = ctx.get<int>("max_period", 2);
  const int samples = ctx.get<int>("samples_per_period", 41);
  const auto bands =
      almost_sure_spectrum_approx(ctx.model.params.rho, ctx.model.gamma, period, samples, floquet_options(ctx));
  ctx.add_file("intervals.csv", intervals_csv(bands));
  ctx.report["intervals"] = intervals_json(bands);
  ctx.report["max_period"] = period;
  ctx.report["samples_per_period"] = samples;
}

void cmd_green_check(RunContext& ctx) {
  const auto M = assemble_block_jacobi(ctx.model.params, ctx.realization(0));
  const cplx z = ctx.energy("z");
  GreenOptions go;
  go.max_condition = ctx.get<double>("max_condition", go.max_condition);
  const int L = M.n();

  std::ostringstream os;
  CsvWriter w(os, {"j", "k", "green_norm", "rel_error"});
  double worst = 0.0;
  for (int j = 1; j <= L; ++j) {
    for (int k = 1; k <= L; ++k) {
      const CMat G = green_block(M, z, j, k, go);
      const CMat D = green_block_dense(M, z, j, k);
      const double scale = std::max(D.norm(), 1e-300);
      const double err = (G - D).norm() / scale;
      worst = std::max(worst, err);
      w.cell(j).cell(k).cell(G.norm()).cell(err);
      w.end_row();
    }
  }
  ctx.add_file("green.csv", os.str());
  ctx.report["z"] = complex_json(z);
  ctx.report["max_rel_error"] = worst;
  ctx.report["wronskian_condition"] = wronskian_condition(M, z);
  try {
    const auto F = fundamental_solutions(M, z);
    const CMat W0 = wronskian(M, F.U, F.V, 0);
    double drift = 0.0;
    for (int k = 1; k <= L; ++k) drift = std::max(drift, (wronskian(M, F.U, F.V, k) - W0).norm() / W0.norm());
    ctx.report["wronskian_drift"] = drift;
  } catch (const NumericalError& e) {
    ctx.report["wronskian_drift"] = nullptr;
    ctx.report["wronskian_note"] = e.what();
  }
}

void cmd_charpoly_check(RunContext& ctx) {
  const auto M = assemble_block_jacobi(ctx.model.params, ctx.realization(0));
  std::ostringstream os;
  CsvWriter w(os, {"E_re", "E_im", "det_direct_re", "det_direct_im", "det_transfer_re", "det_transfer_im",
                   "exterior_re", "exterior_im", "det_residual", "exterior_residual"});
  double worst_det = 0.0, worst_ext = 0.0;
  for (cplx E : ctx.energies()) {
    const auto c = charpoly_identity_check(M, E);
    w.cell(E.real()).cell(E.imag());
    for (cplx v : {c.det_direct, c.det_transfer, c.exterior_element}) w.cell(v.real()).cell(v.imag());
    w.cell(c.det_residual).cell(c.exterior_residual);
    w.end_row();
    worst_det = std::max(worst_det, c.det_residual);
    worst_ext = std::max(worst_ext, c.exterior_residual);
  }
  ctx.add_file("charpoly.csv", os.str());
  ctx.report["max_det_residual"] = worst_det;
  ctx.report["max_exterior_residual"] = worst_ext;
}

}  // namespace randblock::cli
