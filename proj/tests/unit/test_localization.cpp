#include <doctest.h>

#include <cmath>
#include <vector>

#include "randblock/error.hpp"
#include "randblock/localization.hpp"

using namespace randblock;

namespace {

CorrelatorField synthetic(int n, double C, double eta, double zeta, double curvature = 0.0) {
  CorrelatorField f;
  f.mean = Mat(n, n);
  f.std_error = Mat::Zero(n, n);
  f.realizations = 1;
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      const double x = std::pow(std::abs(j - k), zeta);
      f.mean(j, k) = C * std::exp(-eta * x - curvature * x * x);
    }
  return f;
}

}  // namespace

TEST_SUITE("localization") {
  const auto ens = BlockEnsemble::xy(0.5, SingleSiteDistribution::two_point(0, 1, 0.5));

  TEST_CASE("full-window correlator has block trace on the diagonal") {
    const auto S = eigensolve(ens.sample(15, 1, 0), true);
    const auto Q = eigenfunction_correlator(S, {-100.0, 100.0});
    CHECK(Q.mean == Q.mean.transpose());
    for (int j = 0; j < 15; ++j) CHECK(Q.mean(j, j) == doctest::Approx(2.0).epsilon(1e-12));
    const auto empty = eigenfunction_correlator(S, {50.0, 60.0});
    CHECK(empty.empty_window);
    CHECK(empty.mean.cwiseAbs().maxCoeff() == 0.0);
  }

  TEST_CASE("propagator at t = 0 is the identity for the full window") {
    const auto S = eigensolve(ens.sample(8, 2, 0), true);
    CHECK(propagator_block_norm(S, {-100, 100}, 3, 3, 0.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(propagator_block_norm(S, {-100, 100}, 2, 5, 0.0) <= 1e-12);
  }

  TEST_CASE("correlator dominates the windowed propagator") {
    const auto S = eigensolve(ens.sample(20, 3, 0), true);
    const auto Q = eigenfunction_correlator(S, {0.5, 1.5});
    std::vector<double> t;
    for (int i = 0; i < 15; ++i) t.push_back(0.7 * i);
    const auto r = check_domination(S, Q, t);
    CHECK(r.pass);
    CHECK(dynamical_sup_lower_bound(S, {0.5, 1.5}, 2, 9, t) <= Q.mean(2, 9) + 1e-12);
  }

  TEST_CASE("ensemble average is thread-invariant") {
    EnsembleOptions a, b;
    a.realizations = b.realizations = 6;
    a.seed = b.seed = 5;
    a.threads = 1;
    b.threads = 4;
    const auto qa = ensemble_correlator(ens, 20, {0.5, 1.5}, a);
    const auto qb = ensemble_correlator(ens, 20, {0.5, 1.5}, b);
    CHECK(qa.mean == qb.mean);
    CHECK(qa.std_error == qb.std_error);
  }

  TEST_CASE("fit recovers a stretched exponential exactly") {
    const auto f = synthetic(60, 3.0, 0.7, 0.9);
    const auto fit = fit_decay(f, 0.9);
    CHECK(fit.eta == doctest::Approx(0.7).epsilon(1e-10));
    CHECK(fit.C == doctest::Approx(3.0).epsilon(1e-9));
    CHECK_FALSE(fit.curvature_flag);
    CHECK(fit.eta_ci_lo <= fit.eta);
    CHECK(fit.eta_ci_hi >= fit.eta);
  }

  TEST_CASE("fit stops at the relative floor") {
    const auto f = synthetic(200, 1.0, 2.0, 1.0);
    const auto fit = fit_decay(f, 1.0);
    // exp(-2 d) >= 1e-12 until d = 13.
    CHECK(fit.bins_used == 14);
  }

  TEST_CASE("curvature is flagged") {
    const auto fit = fit_decay(synthetic(60, 1.0, 0.1, 0.9, 0.02), 0.9);
    CHECK(fit.curvature_flag);
  }

  TEST_CASE("fit input errors") {
    CHECK_THROWS_AS(fit_decay(synthetic(60, 1.0, 0.1, 0.9), 0.0), ConfigError);
    CHECK_THROWS_AS(fit_decay(synthetic(12, 1.0, 0.1, 0.9), 0.9), NumericalError);
    auto zero = synthetic(40, 1.0, 0.1, 0.9);
    zero.mean.setZero();
    CHECK_THROWS_AS(fit_decay(zero, 0.9), NumericalError);
  }

  TEST_CASE("Wegner probe is a probability and reproducible") {
    const std::vector<int> L{10, 20};
    WegnerOptions o;
    o.samples = 20;
    o.seed = 3;
    const auto a = wegner_probe(ens, 1.0, L, o);
    const auto b = wegner_probe(ens, 1.0, L, o);
    for (std::size_t i = 0; i < L.size(); ++i) {
      CHECK(a[i].probability >= 0.0);
      CHECK(a[i].probability <= 1.0);
      CHECK(a[i].hits == b[i].hits);
      CHECK(a[i].threshold == doctest::Approx(std::exp(-std::sqrt(double(L[i])))));
    }
  }
}
