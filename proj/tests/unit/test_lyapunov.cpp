#include <doctest.h>

#include <cmath>
#include <complex>

#include "randblock/error.hpp"
#include "randblock/lyapunov.hpp"

using namespace randblock;

namespace {

BlockEnsemble free_chain() {
  return BlockEnsemble::general({Mat::Zero(1, 1)}, {1.0}, {Mat::Identity(1, 1)}, {1.0});
}

LyapunovOptions quick(std::uint64_t seed = 1, std::int64_t steps = 40000) {
  LyapunovOptions o;
  o.steps = steps;
  o.seed = seed;
  return o;
}

}  // namespace

TEST_SUITE("lyapunov") {
  TEST_CASE("free chain outside the band") {
    // Constant transfer matrix with eigenvalue (3 + sqrt5)/2.
    const auto s = lyapunov_spectrum(free_chain(), cplx(3.0, 0.0), quick());
    REQUIRE(s.exponents.size() == 2);
    CHECK(s.exponents[0] == doctest::Approx(std::log((3.0 + std::sqrt(5.0)) / 2.0)).epsilon(1e-4));
    CHECK(s.exponents[1] == doctest::Approx(-std::log((3.0 + std::sqrt(5.0)) / 2.0)).epsilon(1e-4));
  }

  TEST_CASE("exponents come in +- pairs") {
    const auto ens = BlockEnsemble::xy(0.5, SingleSiteDistribution::two_point(0, 1, 0.5));
    for (cplx E : {cplx(0.7, 0.0), cplx(-1.3, 0.2)}) {
      const auto s = lyapunov_spectrum(ens, E, quick(3));
      CHECK(symmetric_pair_score(s) < 4.0);
      CHECK(s.exponents[0] >= s.exponents[1]);
      CHECK(lyapunov_index(s).value > 0.0);
    }
  }

  TEST_CASE("option validation") {
    LyapunovOptions o;
    o.steps = 10;
    CHECK_THROWS_AS(lyapunov_spectrum(free_chain(), cplx(3.0, 0.0), o), ConfigError);
    o = {};
    o.reorth_every = 60;
    CHECK_THROWS_AS(lyapunov_spectrum(free_chain(), cplx(3.0, 0.0), o), ConfigError);
  }

  TEST_CASE("results do not depend on how often we reorthonormalise") {
    const auto ens = BlockEnsemble::xy(0.5, SingleSiteDistribution::two_point(0, 1, 0.5));
    auto a = quick(9), b = quick(9);
    a.reorth_every = 1;
    b.reorth_every = 10;
    const auto sa = lyapunov_spectrum(ens, cplx(0.5, 0.0), a);
    const auto sb = lyapunov_spectrum(ens, cplx(0.5, 0.0), b);
    for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(sa.exponents[i] - sb.exponents[i]) < 1e-9);
  }

  TEST_CASE("Thouless formula for the free chain at 2i") {
    std::vector<Vec> eig;
    const int n = 1000;
    Vec ev(n);
    for (int k = 1; k <= n; ++k) ev(k - 1) = -2.0 * std::cos(M_PI * k / (n + 1));
    eig.push_back(ev);
    const auto dos = dos_histogram(std::span<const Vec>(eig), {-2.5, 2.5, 500});
    const cplx z(0.0, 2.0);
    const auto t = thouless_check(free_chain(), z, dos, quick());
    const double exact = std::log(std::abs((z + std::sqrt(z * z - 4.0)) / 2.0));
    CHECK(t.index.value == doctest::Approx(exact).epsilon(1e-3));
    CHECK(std::abs(t.residual) < 5e-3);
    CHECK(t.det_term == 0.0);
  }

  TEST_CASE("two-step matrices are unimodular") {
    for (double a : {0.0, 1.0, -0.3})
      for (double b : {0.0, 2.0}) CHECK(two_step_matrix(2.0, a, b).determinant() == doctest::Approx(1.0).epsilon(1e-14));
  }

  TEST_CASE("zero-energy quadruple, gamma < 1, against the direct cocycle") {
    const double g = 0.5;
    const auto rho = SingleSiteDistribution::two_point(0, 1, 0.5);
    auto opts = quick(21, 200000);
    const auto direct = lyapunov_spectrum(BlockEnsemble::xy(g, rho), cplx(0.0, 0.0), opts);
    const auto reduced = anderson_lyapunov_2x2(1.0 / std::sqrt(1.0 - g * g), rho, opts);
    const auto z = zero_energy_closed_form(g, reduced);
    CHECK(z.branch == ZeroEnergyDecomposition::Branch::below_one);
    CHECK(z.shift == doctest::Approx(0.5 * std::log(3.0)));
    for (std::size_t i = 0; i < 4; ++i) {
      const double se = std::hypot(direct.std_errors[i], z.predicted_se);
      CHECK(std::abs(direct.exponents[i] - z.predicted[i]) <= 4.0 * se + 1e-3);
    }
  }

  TEST_CASE("zero-energy, gamma > 1: direct cocycle follows the full-shift two-step quadruple") {
    const double g = 2.0;
    const auto rho = SingleSiteDistribution::two_point(0, 1, 0.5);
    auto opts = quick(22, 200000);
    const auto direct = lyapunov_spectrum(BlockEnsemble::xy(g, rho), cplx(0.0, 0.0), opts);
    const auto two = two_step_lyapunov(g, rho, opts);
    const auto full = two_step_full_shift_prediction(g, two.value);
    for (std::size_t i = 0; i < 4; ++i) {
      const double se = std::hypot(direct.std_errors[i], 0.5 * two.std_error);
      CHECK(std::abs(direct.exponents[i] - full[i]) <= 4.0 * se + 1e-3);
    }
    const auto stated = zero_energy_closed_form(g, two);
    CHECK(stated.branch == ZeroEnergyDecomposition::Branch::above_one);
    CHECK(stated.predicted[0] + stated.predicted[3] == doctest::Approx(0.0));
  }

  TEST_CASE("alpha function is evaluated with common random numbers") {
    const auto rho = SingleSiteDistribution::two_point(0, 1, 0.5);
    const auto a = alpha_function(0.5, rho, 1.0, quick(4));
    const auto b = alpha_function(0.5, rho, 1.0, quick(4));
    CHECK(a.f == b.f);
    CHECK(a.se > 0.0);
  }
}
