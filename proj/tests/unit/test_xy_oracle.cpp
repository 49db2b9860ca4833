#include <doctest.h>

#include <cmath>
#include <vector>

#include "randblock/error.hpp"
#include "randblock/xy_oracle.hpp"

using namespace randblock;

namespace {

ModelParams chain(int n, double g = 0.5) { return ModelParams::xy(n, g, SingleSiteDistribution::uniform(-1, 1)); }

}  // namespace

TEST_SUITE("xy_oracle") {
  TEST_CASE("Pauli algebra on sites") {
    const int n = 3;
    const CMat X = CMat(pauli_site('x', 2, n)), Y = CMat(pauli_site('y', 2, n)), Z = CMat(pauli_site('z', 2, n));
    const CMat I = CMat::Identity(8, 8);
    CHECK((X * X - I).norm() == 0.0);
    CHECK((X * Y - cplx(0, 1) * Z).norm() <= 1e-15);
    CHECK((CMat(pauli_site('x', 1, n)) * X - X * CMat(pauli_site('x', 1, n))).norm() == 0.0);
    CHECK_THROWS_AS(pauli_site('q', 1, n), ConfigError);
    CHECK_THROWS_AS(pauli_site('x', 1, 11), ConfigError);
  }

  TEST_CASE("Jordan-Wigner fermions satisfy the CAR") {
    for (int n : {1, 4, 8}) {
      const auto F = build_jordan_wigner(n);
      const auto r = car_defect(F);
      CHECK(r.max_defect <= 1e-12);
      CHECK(r.pass);
    }
  }

  TEST_CASE("Hamiltonian is Hermitian and gamma = 1 is allowed") {
    auto p = chain(4, 1.0);
    const auto H = build_hamiltonian(p, sample_disorder(p, 1, 0));
    CHECK(H.hermiticity_defect() == 0.0);
    auto big = chain(11);
    CHECK_THROWS_AS(build_hamiltonian(big, sample_disorder(big, 1, 0)), ConfigError);
  }

  TEST_CASE("small chains against hand-written matrices") {
    // One site: nu sigma^z.
    auto p1 = chain(1);
    DisorderRealization r1;
    r1.nu = {0.7};
    const CMat H1 = build_hamiltonian(p1, r1).matrix;
    CHECK(H1(0, 0) == cplx(0.7));
    CHECK(H1(1, 1) == cplx(-0.7));
    CHECK(H1(0, 1) == cplx(0.0));

    // Two sites, gamma = 0, nu = 0: XX + YY = 2 (|01><10| + |10><01|).
    auto p2 = chain(2, 0.0);
    DisorderRealization r2;
    r2.nu = {0.0, 0.0};
    CMat hand = CMat::Zero(4, 4);
    hand(1, 2) = hand(2, 1) = 2.0;
    const CMat H2 = build_hamiltonian(p2, r2).matrix;
    CHECK((H2 - hand).norm() == 0.0);
    Eigen::SelfAdjointEigenSolver<CMat> es(H2, Eigen::EigenvaluesOnly);
    const Vec ev = es.eigenvalues();
    CHECK(ev(0) == doctest::Approx(-2.0));
    CHECK(std::abs(ev(1)) <= 1e-14);
    CHECK(std::abs(ev(2)) <= 1e-14);
    CHECK(ev(3) == doctest::Approx(2.0));

    // gamma = 1: only the XX coupling survives, 2 X (x) X.
    auto p3 = chain(2, 1.0);
    CMat xx = CMat::Zero(4, 4);
    xx(0, 3) = xx(3, 0) = xx(1, 2) = xx(2, 1) = 2.0;
    CHECK((build_hamiltonian(p3, r2).matrix - xx).norm() == 0.0);
  }

  TEST_CASE("quadratic form on a single site") {
    const auto p = chain(1);
    const auto r = sample_disorder(p, 9, 0);
    const auto fit = verify_quadratic_form(build_hamiltonian(p, r), assemble_hat_form(p, r));
    CHECK(fit.residual <= 1e-12);
  }

  TEST_CASE("quadratic form convention: scale 1, no shift") {
    for (int n : {2, 5}) {
      const auto p = chain(n);
      const auto r = sample_disorder(p, 2, 0);
      const auto fit = verify_quadratic_form(build_hamiltonian(p, r), assemble_hat_form(p, r));
      CHECK(fit.scale == 1.0);
      CHECK(std::abs(fit.shift) <= 1e-12);
      CHECK(fit.residual <= 1e-10);
      CHECK(fit.residual_by_scale[1] > 1e-3);
    }
  }

  TEST_CASE("a wrong Hamiltonian is reported as a convention mismatch") {
    const auto p = chain(3);
    const auto r = sample_disorder(p, 2, 0);
    auto H = build_hamiltonian(p, r);
    H.matrix += CMat(pauli_site('x', 1, 3));
    CHECK_THROWS_AS(verify_quadratic_form(H, assemble_hat_form(p, r)), NumericalError);
  }

  TEST_CASE("free-fermion spectrum reconstruction") {
    const auto p = chain(4, 0.3);
    const auto r = sample_disorder(p, 7, 0);
    const auto H = build_hamiltonian(p, r);
    const auto Mhat = assemble_hat_form(p, r);
    CHECK(free_fermion_spectrum_error(H, Mhat, verify_quadratic_form(H, Mhat)) <= 1e-8);
  }

  TEST_CASE("Heisenberg evolution of the fermions") {
    const auto p = chain(4, 2.0);
    const std::vector<double> t{0.0, 0.4, 1.7};
    CHECK(verify_heisenberg_identity(p, sample_disorder(p, 3, 0), t) <= 1e-8);
    // The wrong time scale is detected.
    CHECK(verify_heisenberg_identity(p, sample_disorder(p, 3, 0), t, 0.5) > 1e-3);
  }

  TEST_CASE("Lanczos norm matches dense diagonalisation") {
    const auto p = chain(5);
    const auto H = build_hamiltonian(p, sample_disorder(p, 4, 0));
    Eigen::SelfAdjointEigenSolver<CMat> es(H.matrix, Eigen::EigenvaluesOnly);
    const SparseOp Hs = H.matrix.sparseView();
    CHECK(hermitian_norm(Hs) == doctest::Approx(es.eigenvalues().cwiseAbs().maxCoeff()).epsilon(1e-10));
    CHECK(hermitian_norm(SparseOp(32, 32)) == 0.0);
  }

  TEST_CASE("quasi-free and dense commutator routes agree") {
    const auto p = ModelParams::xy(5, 0.5, SingleSiteDistribution::uniform(2.5, 3.5));
    const auto r = sample_disorder(p, 6, 0);
    for (char a : {'x', 'y'}) {
      LrOptions q;
      q.observable_a = a;
      q.t_grid.clear();
      for (int i = 0; i < 25; ++i) q.t_grid.push_back(0.2 * i);
      LrOptions d = q;
      d.route = LrOptions::Route::dense;
      const auto sq = sup_commutators(p, r, q);
      const auto sd = sup_commutators(p, r, d);
      REQUIRE(sq.size() == 4);
      for (std::size_t k = 0; k < sq.size(); ++k) CHECK(std::abs(sq[k] - sd[k]) <= 1e-8);
    }
  }

  TEST_CASE("commutator bounds are thread-invariant and at most 2") {
    const auto p = ModelParams::xy(5, 0.5, SingleSiteDistribution::uniform(2.5, 3.5));
    LrOptions o;
    o.realizations = 4;
    o.t_grid = {0.0, 1.0, 2.0};
    const auto a = lr_commutator_stats(p, o);
    o.threads = 3;
    const auto b = lr_commutator_stats(p, o);
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].mean_sup_comm == b[i].mean_sup_comm);
      CHECK(a[i].mean_sup_comm <= 2.0 + 1e-12);
    }
  }
}
