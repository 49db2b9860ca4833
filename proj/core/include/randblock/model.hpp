#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "randblock/rng.hpp"
#include "randblock/types.hpp"

namespace randblock {

/// Single-site distribution of the random field values nu_j.
///
/// All supported kinds have compact support with a finite description.
class SingleSiteDistribution {
 public:
  enum class Kind { two_point, uniform, discrete };

  /// Value a with probability p, value b with probability 1-p.
  static SingleSiteDistribution two_point(double a, double b, double p);
  /// Uniform on [a, b]; a == b collapses to a point mass.
  static SingleSiteDistribution uniform(double a, double b);
  /// Atoms `points` with `weights` (summing to 1 within 1e-12).
  static SingleSiteDistribution discrete(std::vector<double> points, std::vector<double> weights);
  /// Point mass at c.
  static SingleSiteDistribution constant(double c) { return discrete({c}, {1.0}); }

  [[nodiscard]] Kind kind() const { return kind_; }
  [[nodiscard]] double sample(CounterRng& rng) const;

  [[nodiscard]] double support_min() const;
  [[nodiscard]] double support_max() const;
  /// True when the support is a single point ("trivial distribution").
  [[nodiscard]] bool trivial() const;

  /// Deterministic points of the support: the atoms for discrete kinds,
  /// an evenly spaced lattice of `count` points (endpoints included) for uniform.
  [[nodiscard]] std::vector<double> support_lattice(int count) const;

  [[nodiscard]] const std::vector<double>& points() const { return points_; }
  [[nodiscard]] const std::vector<double>& weights() const { return weights_; }
  [[nodiscard]] std::string describe() const;

 private:
  SingleSiteDistribution() = default;

  Kind kind_ = Kind::discrete;
  // two_point and discrete: atoms and weights. uniform: points_ = {a, b}.
  std::vector<double> points_;
  std::vector<double> weights_;
  std::vector<double> cumulative_;
};

/// Coefficient sequences of a finite chain of length n.
struct ModelParams {
  int ell = 2;
  int n = 0;
  std::vector<double> mu;     // coupling, length >= n-1
  std::vector<double> gamma;  // anisotropy, length >= n-1
  SingleSiteDistribution rho = SingleSiteDistribution::constant(0.0);

  /// XY specialisation: mu_j = mu, gamma_j = gamma for all j.
  static ModelParams xy(int n, double gamma, SingleSiteDistribution rho, double mu = 1.0);

  /// Throws ConfigError on inconsistent sizes.
  void validate() const;
};

struct DisorderRealization {
  std::uint64_t seed = 0;
  std::uint64_t index = 0;
  std::vector<double> nu;
};

/// Finite block Jacobi matrix with diagonal blocks V_k and off-diagonal
/// blocks -S_k (upper) and -S_k^t (lower), k = 1..n (0-based in storage).
struct BlockJacobiMatrix {
  int ell = 0;
  std::vector<Mat> V;  // n blocks, symmetric
  std::vector<Mat> S;  // n-1 blocks, invertible

  [[nodiscard]] int n() const { return static_cast<int>(V.size()); }
  [[nodiscard]] int dim() const { return ell * n(); }
  [[nodiscard]] Mat dense() const;
  /// Max abs row sum; an upper bound for the operator norm.
  [[nodiscard]] double norm_bound() const;
};

/// The 2n x 2n form [[A, B], [-B, -A]] with A symmetric and B antisymmetric.
struct HatBlockMatrix {
  Mat A;
  Mat B;

  [[nodiscard]] int n() const { return static_cast<int>(A.rows()); }
  [[nodiscard]] Mat dense() const;
};

Mat2 pauli_z();
/// S(gamma) = [[1, gamma], [-gamma, -1]]; det S(gamma) = gamma^2 - 1.
Mat2 s_gamma(double gamma);

/// Permutation P with P e_{2j} = e_j, P e_{2j+1} = e_{n+j}, so that
/// P^t * hat.dense() * P equals the block Jacobi dense form.
Eigen::PermutationMatrix<Eigen::Dynamic> interleaving_permutation(int n);

DisorderRealization sample_disorder(const ModelParams& params, std::uint64_t seed, std::uint64_t index);

/// XY assembly: V_k = nu_k sigma^z, S_k = mu_k S(gamma_k). Rejects gamma_k = +-1.
BlockJacobiMatrix assemble_block_jacobi(const ModelParams& params, const DisorderRealization& real);
HatBlockMatrix assemble_hat_form(const ModelParams& params, const DisorderRealization& real);

/// General instance; rejects non-symmetric V or singular S.
BlockJacobiMatrix assemble_general(int ell, std::vector<Mat> V, std::vector<Mat> S);

/// An i.i.d. source of (V_k, S_k) blocks used by the cocycle and ensemble engines.
///
/// Two families: the XY field model (V = nu sigma^z, S = mu S(gamma)) and a
/// discrete general ensemble choosing V and S independently from finite lists.
class BlockEnsemble {
 public:
  static BlockEnsemble xy(double gamma, SingleSiteDistribution rho, double mu = 1.0);
  static BlockEnsemble general(std::vector<Mat> v_choices, std::vector<double> v_weights,
                               std::vector<Mat> s_choices, std::vector<double> s_weights);

  [[nodiscard]] int ell() const { return ell_; }
  [[nodiscard]] bool is_xy() const { return xy_; }
  [[nodiscard]] double gamma() const { return gamma_; }
  [[nodiscard]] double mu() const { return mu_; }
  [[nodiscard]] const SingleSiteDistribution& rho() const { return rho_; }

  /// Draws the next (V, S) pair from the stream. For the XY family only
  /// nu is random and exactly one value is consumed per call.
  void draw(CounterRng& rng, Mat& V, Mat& S) const;

  /// E log|det g|, exact for both families.
  [[nodiscard]] double mean_log_abs_det_s() const;

  /// Finite truncation of length n drawn from stream (seed, index). For the
  /// XY family this agrees with assemble_block_jacobi(sample_disorder(...)).
  [[nodiscard]] BlockJacobiMatrix sample(int n, std::uint64_t seed, std::uint64_t index) const;

 private:
  BlockEnsemble() = default;

  int ell_ = 2;
  bool xy_ = true;
  double gamma_ = 0.0;
  double mu_ = 1.0;
  SingleSiteDistribution rho_ = SingleSiteDistribution::constant(0.0);
  std::vector<Mat> v_choices_, s_choices_;
  SingleSiteDistribution v_pick_ = SingleSiteDistribution::constant(0.0);
  SingleSiteDistribution s_pick_ = SingleSiteDistribution::constant(0.0);
};

}  // namespace randblock
