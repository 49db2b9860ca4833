#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "randblock/error.hpp"
#include "randblock/model.hpp"
#include "randblock/spectral.hpp"

using namespace randblock;

namespace {

// Wrap-around XY chain of `cells` copies of the potential; its spectrum
// samples the Floquet bands at theta = 2 pi k / cells.
Vec cyclic_chain_eigs(const std::vector<double>& potential, double gamma, int cells) {
  const int p = static_cast<int>(potential.size());
  const int n = p * cells;
  Mat M = Mat::Zero(2 * n, 2 * n);
  const Mat2 S = s_gamma(gamma);
  for (int k = 0; k < n; ++k) {
    M.block<2, 2>(2 * k, 2 * k) = potential[static_cast<std::size_t>(k % p)] * pauli_z();
    const int k1 = (k + 1) % n;
    M.block<2, 2>(2 * k, 2 * k1) += -S;
    M.block<2, 2>(2 * k1, 2 * k) += -S.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(M, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

}  // namespace

TEST_SUITE("spectral") {
  TEST_CASE("banded and dense eigenvalues agree; eigenpairs are accurate") {
    const auto p = ModelParams::xy(60, 0.5, SingleSiteDistribution::two_point(0, 1, 0.5));
    const auto M = assemble_block_jacobi(p, sample_disorder(p, 5, 0));
    const auto vals = eigensolve(M, false);
    const auto full = eigensolve(M, true);
    REQUIRE(vals.dim() == 120);
    CHECK((vals.eigenvalues - full.eigenvalues).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK(eigen_residual(M, full) <= 1e-10);
    const Mat& V = *full.eigenvectors;
    CHECK((V.transpose() * V - Mat::Identity(120, 120)).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK(full.site_block(3, 7).size() == 2);
  }

  TEST_CASE("XY spectra are symmetric about zero") {
    const auto p = ModelParams::xy(40, 2.0, SingleSiteDistribution::uniform(-1, 3));
    const auto S = eigensolve(assemble_block_jacobi(p, sample_disorder(p, 1, 1)), false);
    CHECK(check_spectral_symmetry(S, 1e-10).pass);
  }

  TEST_CASE("gap for a field bounded away from zero") {
    const auto ens = BlockEnsemble::xy(0.5, SingleSiteDistribution::uniform(2.5, 3.5));
    for (std::uint64_t r = 0; r < 5; ++r) CHECK(check_gap(eigensolve(ens.sample(50, 2, r), false), 0.5));
    CHECK_THROWS_AS(check_gap(eigensolve(ens.sample(5, 2, 0), false), 0.0), ConfigError);
  }

  TEST_CASE("DOS normalisation and IDS") {
    const auto ens = BlockEnsemble::xy(0.5, SingleSiteDistribution::two_point(0, 1, 0.5));
    std::vector<SpectralData> data;
    for (std::uint64_t r = 0; r < 10; ++r) data.push_back(eigensolve(ens.sample(100, 3, r), false));
    const auto dos = dos_histogram(data, {-4.0, 4.0, 200});
    CHECK(dos.total_mass() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(dos.ids(-10.0) == 0.0);
    CHECK(dos.ids(10.0) == doctest::Approx(1.0));
    CHECK(dos.ids(0.0) == doctest::Approx(0.5).epsilon(1e-12));
    double prev = 0.0;
    for (double E = -4.0; E <= 4.0; E += 0.1) {
      CHECK(dos.ids(E) >= prev - 1e-15);
      prev = dos.ids(E);
    }
    const auto pooled = dos.merged(dos);
    CHECK(pooled.realizations() == 20);
    CHECK(pooled.total_mass() == doctest::Approx(1.0));
  }

  TEST_CASE("interval unions") {
    IntervalUnion u({{0, 1}, {0.5, 2}, {3, 4}});
    REQUIRE(u.size() == 2);
    CHECK(u.distance(2.5) == doctest::Approx(0.5));
    CHECK(u.contains(3.5));
    IntervalUnion v({{0, 4}});
    CHECK(u.hausdorff(v) == doctest::Approx(0.5));
    CHECK(v.covers(u, 0.0));
    CHECK_FALSE(u.covers(v, 0.4));
    // The midpoint 1 of [0, 2] is the farthest point from the set.
    const std::vector<double> pts{0.0, 2.0, 3.0, 4.0};
    CHECK(u.hausdorff(pts) == doctest::Approx(1.0));
  }

  TEST_CASE("constant field c = 1, gamma = 1/2 band edges") {
    const std::vector<double> c{1.0};
    const auto spec = periodic_spectrum(c, 0.5);
    REQUIRE(spec.size() == 2);
    CHECK(std::abs(spec.intervals()[1].lo - std::sqrt(2.0 / 3.0)) <= 1e-6);
    CHECK(std::abs(spec.intervals()[1].hi - 3.0) <= 1e-6);
    CHECK(std::abs(spec.intervals()[0].lo + 3.0) <= 1e-6);
    CHECK(std::abs(spec.intervals()[0].hi + std::sqrt(2.0 / 3.0)) <= 1e-6);
  }

  TEST_CASE("Floquet bands agree with the wrap-around chain") {
    const std::vector<std::vector<double>> potentials{{1.0}, {-1.0, 1.0}, {0.0, 1.0, 1.0}, {3.0}};
    for (double g : {0.5, 2.0, 0.0}) {
      for (const auto& pot : potentials) {
        const auto spec = periodic_spectrum(pot, g);
        const Vec ev = cyclic_chain_eigs(pot, g, 240);
        // Every sampled eigenvalue lies in a band; the bands are filled up to
        // the theta-grid spacing.
        for (Eigen::Index i = 0; i < ev.size(); ++i) CHECK(spec.distance(ev(i)) <= 1e-9);
        std::vector<double> pts(ev.data(), ev.data() + ev.size());
        CHECK(spec.hausdorff(pts) <= 5e-2);
      }
    }
  }

  TEST_CASE("alternating potential: computed hull") {
    // Frozen value from the wrap-around chain oracle: the hull is +-4/sqrt(3).
    const std::vector<double> alt{-1.0, 1.0};
    const auto spec = periodic_spectrum(alt, 0.5);
    CHECK(std::abs(spec.max() - 4.0 / std::sqrt(3.0)) <= 1e-6);
    CHECK(std::abs(spec.min() + 4.0 / std::sqrt(3.0)) <= 1e-6);
    CHECK(spec.contains(0.0));
    const Vec ev = cyclic_chain_eigs(alt, 0.5, 400);
    CHECK(std::abs(ev.maxCoeff() - 4.0 / std::sqrt(3.0)) <= 1e-4);
  }

  TEST_CASE("almost-sure approximation grows with the period") {
    const auto rho = SingleSiteDistribution::uniform(-1, 1);
    const auto s1 = almost_sure_spectrum_approx(rho, 0.5, 1, 9);
    const auto s2 = almost_sure_spectrum_approx(rho, 0.5, 2, 9);
    CHECK(s2.covers(s1, 1e-12));
    CHECK(s2.max() <= 3.0 + 1e-6);
  }
}
