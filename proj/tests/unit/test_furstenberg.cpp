#include <doctest.h>

#include <cmath>
#include <vector>

#include "randblock/error.hpp"
#include "randblock/furstenberg.hpp"
#include "randblock/model.hpp"

using namespace randblock;

TEST_SUITE("furstenberg") {
  TEST_CASE("generators are symplectic") {
    Mat2 q;
    q << 0.3, -1.0, -1.0, 2.0;
    CHECK(sp2_group_defect(m_of(q)) <= 1e-15);
    for (double g : {0.3, 0.5, 2.0}) {
      CHECK(sp2_group_defect(build_A0(0.7, g)) <= 1e-12);
      CHECK(sp2_group_defect(canceled_generator(0.0, 1.0, 0.7, g)) <= 1e-12);
    }
    CHECK(sp2_group_defect(block_u() * block_u()) <= 1e-15);
    CHECK_THROWS_AS(build_A0(0.0, 1.0), ConfigError);
  }

  TEST_CASE("coordinates round-trip on sp_2") {
    Sp2Coordinates c;
    for (int i = 0; i < 10; ++i) c(i) = 0.1 * (i + 1) * (i % 2 ? -1.0 : 1.0);
    const Mat4 X = sp2_from_coordinates(c);
    CHECK(sp2_algebra_defect(X) == 0.0);
    CHECK((sp2_coordinates(X) - c).cwiseAbs().maxCoeff() == 0.0);
  }

  TEST_CASE("canceled generator: only the field difference survives") {
    // Ga Gb^{-1} = M((a - b) sigma^z).
    const Mat4 G = canceled_generator(1.5, 0.25, 0.4, 0.5);
    CHECK((G - m_of(1.25 * pauli_z())).cwiseAbs().maxCoeff() <= 1e-12);
  }

  TEST_CASE("full rank away from zero energy") {
    for (double g : {0.3, 0.5, 2.0})
      for (double E : {-1.7, 0.4, 2.2}) {
        const auto c = lie_closure_dimension(E, g);
        CHECK(c.dimension == 10);
        CHECK(c.max_algebra_defect <= 1e-10);
      }
  }

  TEST_CASE("rank deficiency at zero energy") {
    for (double g : {0.3, 0.5, 2.0}) {
      const auto c = lie_closure_dimension(0.0, g);
      CHECK(c.dimension < 10);
      CHECK_FALSE(c.marginal);
    }
  }

  TEST_CASE("energy sweep is thread-invariant") {
    const std::vector<double> E{-1.0, -0.5, 0.0, 0.5, 1.0};
    const auto a = energy_sweep_rank(0.5, E, {}, 1);
    const auto b = energy_sweep_rank(0.5, E, {}, 3);
    for (std::size_t i = 0; i < E.size(); ++i) {
      CHECK(a[i].rank == b[i].rank);
      CHECK(a[i].deficient == (E[i] == 0.0));
    }
  }

  TEST_CASE("zero-energy reducibility certificate") {
    std::vector<double> nu;
    for (int i = 0; i < 50; ++i) nu.push_back(-2.0 + 0.08 * i);
    for (double g : {0.3, 0.5, 2.0, 3.0}) {
      const auto r = zero_energy_reducibility_certificate(g, nu);
      CHECK(r.pattern_ok);
      CHECK(r.blocks_ok);
      CHECK(r.det_ok);
      CHECK(r.pass);
    }
    CHECK_THROWS_AS(zero_energy_reducibility_certificate(0.0, nu), ConfigError);
  }
}
