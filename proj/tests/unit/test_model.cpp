#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "randblock/error.hpp"
#include "randblock/model.hpp"

using namespace randblock;

namespace {

Vec sorted_eigs(const Mat& M) {
  Eigen::SelfAdjointEigenSolver<Mat> es(M, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

DisorderRealization fixed(std::vector<double> nu) {
  DisorderRealization r;
  r.nu = std::move(nu);
  return r;
}

}  // namespace

TEST_SUITE("model") {
  TEST_CASE("n=2 fixture transcribes entrywise") {
    const auto p = ModelParams::xy(2, 0.5, SingleSiteDistribution::constant(0.0));
    const Mat M = assemble_block_jacobi(p, fixed({1.0, 2.0})).dense();
    Mat expect(4, 4);
    expect << 1, 0, -1, -0.5,
              0, -1, 0.5, 1,
              -1, 0.5, 2, 0,
              -0.5, 1, 0, -2;
    CHECK((M - expect).cwiseAbs().maxCoeff() == 0.0);
  }

  TEST_CASE("hat form fixture and symmetry") {
    const auto p = ModelParams::xy(2, 0.5, SingleSiteDistribution::constant(0.0));
    const auto h = assemble_hat_form(p, fixed({1.0, 2.0}));
    Mat A(2, 2), B(2, 2);
    A << 1, -1, -1, 2;
    B << 0, -0.5, 0.5, 0;
    CHECK(h.A == A);
    CHECK(h.B == B);

    const auto q = ModelParams::xy(9, 0.3, SingleSiteDistribution::uniform(-1, 2));
    const auto hq = assemble_hat_form(q, sample_disorder(q, 4, 1));
    CHECK(hq.A == hq.A.transpose());
    CHECK(hq.B == -hq.B.transpose());
  }

  TEST_CASE("interleaving permutation conjugates exactly") {
    for (double g : {0.0, 0.5, 2.0, -0.7}) {
      const auto p = ModelParams::xy(7, g, SingleSiteDistribution::two_point(0, 1, 0.5));
      const auto r = sample_disorder(p, 9, 2);
      const Mat hat = assemble_hat_form(p, r).dense();
      const Mat M = assemble_block_jacobi(p, r).dense();
      const auto P = interleaving_permutation(7);
      const Mat conj = P.transpose() * hat * P;
      CHECK((conj - M).cwiseAbs().maxCoeff() == 0.0);
      CHECK((sorted_eigs(hat) - sorted_eigs(M)).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }

  TEST_CASE("gamma = 0 splits into Anderson and its negative") {
    const int n = 6;
    const auto p = ModelParams::xy(n, 0.0, SingleSiteDistribution::uniform(-2, 2));
    const auto r = sample_disorder(p, 1, 0);
    Mat And = Mat::Zero(n, n);
    for (int j = 0; j < n; ++j) And(j, j) = r.nu[static_cast<std::size_t>(j)];
    for (int j = 0; j + 1 < n; ++j) And(j, j + 1) = And(j + 1, j) = -1.0;
    Mat both = Mat::Zero(2 * n, 2 * n);
    both.topLeftCorner(n, n) = And;
    both.bottomRightCorner(n, n) = -And;
    CHECK((sorted_eigs(assemble_block_jacobi(p, r).dense()) - sorted_eigs(both)).cwiseAbs().maxCoeff() <= 1e-12);
  }

  TEST_CASE("det S(gamma) = gamma^2 - 1") {
    CHECK(s_gamma(0.5).determinant() == doctest::Approx(-0.75).epsilon(1e-15));
    for (int i = 0; i <= 400; ++i) {
      const double g = -2.0 + 0.01 * i;
      if (std::abs(std::abs(g) - 1.0) < 1e-12) continue;
      CHECK(std::abs(s_gamma(g).determinant() - (g * g - 1.0)) <= 1e-14);
    }
  }

  TEST_CASE("gamma = +-1 rejected") {
    const auto p = ModelParams::xy(3, 1.0, SingleSiteDistribution::constant(0.0));
    CHECK_THROWS_AS(assemble_block_jacobi(p, fixed({0, 0, 0})), ConfigError);
    CHECK_THROWS_AS(BlockEnsemble::xy(-1.0, SingleSiteDistribution::constant(0.0)), ConfigError);
  }

  TEST_CASE("determinism and ensemble consistency") {
    const auto rho = SingleSiteDistribution::two_point(0, 1, 0.5);
    const auto p = ModelParams::xy(20, 0.5, rho);
    CHECK(sample_disorder(p, 3, 8).nu == sample_disorder(p, 3, 8).nu);
    CHECK(sample_disorder(p, 3, 8).nu != sample_disorder(p, 3, 9).nu);
    const auto ens = BlockEnsemble::xy(0.5, rho);
    CHECK(ens.sample(20, 3, 8).dense() == assemble_block_jacobi(p, sample_disorder(p, 3, 8)).dense());
  }

  TEST_CASE("two-point weights") {
    const auto rho = SingleSiteDistribution::two_point(0, 1, 0.25);
    CounterRng r(2, 0);
    const int N = 100000;
    int zeros = 0;
    for (int i = 0; i < N; ++i) zeros += rho.sample(r) == 0.0;
    CHECK(std::abs(zeros / double(N) - 0.25) < 6.0 * std::sqrt(0.25 * 0.75 / N));
    CHECK_FALSE(rho.trivial());
    CHECK(SingleSiteDistribution::constant(3).trivial());
    CHECK_THROWS_AS(SingleSiteDistribution::discrete({0, 1}, {0.5, 0.4}), ConfigError);
  }

  TEST_CASE("general assembly") {
    std::vector<Mat> V(3, Mat::Constant(1, 1, 0.0)), S(2, Mat::Identity(1, 1));
    V[1](0, 0) = 2.0;
    const auto M = assemble_general(1, V, S);
    Mat expect(3, 3);
    expect << 0, -1, 0, -1, 2, -1, 0, -1, 0;
    CHECK(M.dense() == expect);

    Mat asym(2, 2);
    asym << 0, 1, 2, 0;
    CHECK_THROWS_AS(assemble_general(2, {asym, asym}, {Mat::Identity(2, 2)}), ConfigError);
    CHECK_THROWS_AS(assemble_general(2, {Mat::Zero(2, 2), Mat::Zero(2, 2)}, {Mat::Zero(2, 2)}), ConfigError);
  }

  TEST_CASE("mean log|det S|") {
    CHECK(BlockEnsemble::xy(0.5, SingleSiteDistribution::constant(0)).mean_log_abs_det_s() ==
          doctest::Approx(std::log(0.75)));
    Mat s1 = Mat::Identity(2, 2), s2 = 2.0 * Mat::Identity(2, 2);
    const auto g = BlockEnsemble::general({Mat::Zero(2, 2)}, {1.0}, {s1, s2}, {0.5, 0.5});
    CHECK(g.mean_log_abs_det_s() == doctest::Approx(0.5 * std::log(4.0)));
  }
}
