#include <doctest.h>

#include <cmath>
#include <random>

#include "randblock/error.hpp"
#include "randblock/model.hpp"
#include "randblock/transfer.hpp"

using namespace randblock;

namespace {

// Random symmetric V and well-conditioned random S.
BlockJacobiMatrix random_instance(int ell, int L, std::uint64_t seed) {
  CounterRng rng(seed, 77);
  auto u = [&] { return 2.0 * rng.uniform01() - 1.0; };
  std::vector<Mat> V, S;
  for (int k = 0; k < L; ++k) {
    Mat v(ell, ell);
    for (int i = 0; i < ell; ++i)
      for (int j = 0; j <= i; ++j) v(i, j) = v(j, i) = 2.0 * u();
    V.push_back(v);
    if (k + 1 < L) {
      Mat s = Mat::Identity(ell, ell);
      for (int i = 0; i < ell; ++i)
        for (int j = 0; j < ell; ++j) s(i, j) += 0.6 * u();
      S.push_back(s);
    }
  }
  return assemble_general(ell, V, S);
}

double rel(const CMat& a, const CMat& b) { return (a - b).norm() / std::max(1e-300, b.norm()); }

}  // namespace

TEST_SUITE("transfer") {
  TEST_CASE("transfer matrices are symplectic for real and complex energy") {
    const auto M = random_instance(3, 10, 1);
    for (cplx E : {cplx(0.3, 0.0), cplx(-1.0, 0.7)}) {
      for (const auto& A : transfer_matrices(M, E)) CHECK(symplectic_defect(A.entries) <= 1e-12 * A.entries.squaredNorm());
    }
  }

  TEST_CASE("hopping convention pads with identities") {
    const auto M = random_instance(2, 5, 2);
    CHECK(hopping(M, 0) == Mat::Identity(2, 2));
    CHECK(hopping(M, 5) == Mat::Identity(2, 2));
    CHECK(hopping(M, 2) == M.S[1]);
  }

  TEST_CASE("propagated vectors solve the recursion") {
    const auto M = random_instance(2, 30, 3);
    const cplx E(0.4, 0.1);
    CVec init = CVec::Zero(4);
    init(2) = 1.0;
    init(1) = cplx(0.0, 1.0);
    const auto Ts = transfer_matrices(M, E);
    const auto states = propagate(init, Ts);
    REQUIRE(states.size() == Ts.size() + 1);
    CHECK(recursion_residual(M, E, solution_from_states(M, states)) <= 1e-10);
  }

  TEST_CASE("single site Green function is the scalar resolvent") {
    const auto M = assemble_general(1, {Mat::Constant(1, 1, 0.7)}, {});
    const cplx z(0.2, 0.3);
    CHECK(std::abs(green_block(M, z, 1, 1)(0, 0) - 1.0 / (0.7 - z)) <= 1e-14);
  }

  TEST_CASE("Green blocks match the dense resolvent") {
    for (int ell : {1, 2, 3}) {
      for (std::uint64_t s = 0; s < 5; ++s) {
        const auto M = random_instance(ell, 12 + static_cast<int>(s), 100 + s);
        const cplx z(0.3 - 0.2 * static_cast<double>(s), 0.25);
        const auto L = M.n();
        for (auto [j, k] : {std::pair{1, 1}, {1, L}, {L, 1}, {3, 7}, {7, 3}, {L, L}}) {
          CHECK(rel(green_block(M, z, j, k), green_block_dense(M, z, j, k)) <= 1e-8);
        }
      }
    }
  }

  TEST_CASE("corner block is the inverse of U(L+1)") {
    const auto M = random_instance(2, 9, 8);
    const cplx z(1.0, 0.5);
    const auto F = fundamental_solutions(M, z);
    const CMat corner = green_block(M, z, 1, 9);
    CHECK(rel(corner, F.U.X[10].inverse()) <= 1e-10);
  }

  TEST_CASE("Wronskian is constant and solutions satisfy the recursion") {
    const auto M = random_instance(3, 20, 9);
    const cplx z(-0.5, 0.2);
    const auto F = fundamental_solutions(M, z);
    CHECK(recursion_residual(M, z, F.U) <= 1e-10);
    CHECK(recursion_residual(M, z, F.V) <= 1e-10);
    const CMat W0 = wronskian(M, F.U, F.V, 0);
    for (int k = 1; k <= M.n(); ++k) CHECK(rel(wronskian(M, F.U, F.V, k), W0) <= 1e-10);
  }

  TEST_CASE("near-spectrum energies are rejected") {
    const auto M = random_instance(1, 6, 4);
    Eigen::SelfAdjointEigenSolver<Mat> es(M.dense(), Eigen::EigenvaluesOnly);
    const double lam = es.eigenvalues()(2);
    CHECK_THROWS_AS(green_block(M, cplx(lam, 0.0), 1, 1), NearSpectrumError);
    CHECK(wronskian_condition(M, cplx(lam, 1e-3)) > wronskian_condition(M, cplx(lam, 1.0)));
  }

  TEST_CASE("characteristic polynomial identity") {
    for (int ell : {1, 2, 3}) {
      const auto M = random_instance(ell, 15, 200 + static_cast<std::uint64_t>(ell));
      for (cplx E : {cplx(0.1, 0.0), cplx(1.2, -0.4)}) {
        const auto c = charpoly_identity_check(M, E);
        CHECK(c.det_residual <= 1e-8);
        CHECK(c.exterior_residual <= 1e-8);
        // Independent oracle: eigenvalue product.
        Eigen::SelfAdjointEigenSolver<Mat> es(M.dense(), Eigen::EigenvaluesOnly);
        cplx prod = 1.0;
        for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) prod *= es.eigenvalues()(i) - E;
        CHECK(std::abs(prod - c.det_direct) <= 1e-9 * std::abs(prod));
      }
    }
  }
}
