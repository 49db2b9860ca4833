#include "randblock/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "randblock/error.hpp"

namespace randblock {

SingleSiteDistribution SingleSiteDistribution::two_point(double a, double b, double p) {
  if (!(p >= 0.0 && p <= 1.0) || !std::isfinite(a) || !std::isfinite(b)) {
    throw ConfigError("two_point: need finite a, b and p in [0,1]");
  }
  SingleSiteDistribution d;
  d.kind_ = Kind::two_point;
  d.points_ = {a, b};
  d.weights_ = {p, 1.0 - p};
  d.cumulative_ = {p, 1.0};
  return d;
}

SingleSiteDistribution SingleSiteDistribution::uniform(double a, double b) {
  if (!(a <= b) || !std::isfinite(a) || !std::isfinite(b)) {
    throw ConfigError("uniform: need finite a <= b");
  }
  SingleSiteDistribution d;
  d.kind_ = Kind::uniform;
  d.points_ = {a, b};
  return d;
}

SingleSiteDistribution SingleSiteDistribution::discrete(std::vector<double> points,
                                                        std::vector<double> weights) {
  if (points.empty() || points.size() != weights.size()) {
    throw ConfigError("discrete: points and weights must be non-empty and of equal length");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!std::isfinite(points[i]) || !(weights[i] >= 0.0)) {
      throw ConfigError("discrete: points must be finite and weights nonnegative");
    }
    total += weights[i];
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw ConfigError("discrete: weights must sum to 1 within 1e-12");
  }
  SingleSiteDistribution d;
  d.kind_ = Kind::discrete;
  d.points_ = std::move(points);
  d.weights_ = std::move(weights);
  d.cumulative_.resize(d.weights_.size());
  std::partial_sum(d.weights_.begin(), d.weights_.end(), d.cumulative_.begin());
  d.cumulative_.back() = 1.0;
  return d;
}

double SingleSiteDistribution::sample(CounterRng& rng) const {
  const double u = rng.uniform01();
  if (kind_ == Kind::uniform) return points_[0] + (points_[1] - points_[0]) * u;
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  const auto idx = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()),
                                         points_.size() - 1);
  return points_[idx];
}

double SingleSiteDistribution::support_min() const {
  if (kind_ == Kind::uniform) return points_[0];
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points_.size(); ++i)
    if (weights_[i] > 0.0) m = std::min(m, points_[i]);
  return m;
}

double SingleSiteDistribution::support_max() const {
  if (kind_ == Kind::uniform) return points_[1];
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points_.size(); ++i)
    if (weights_[i] > 0.0) m = std::max(m, points_[i]);
  return m;
}

bool SingleSiteDistribution::trivial() const { return support_min() == support_max(); }

std::vector<double> SingleSiteDistribution::support_lattice(int count) const {
  std::vector<double> out;
  if (kind_ == Kind::uniform) {
    const double a = points_[0], b = points_[1];
    if (a == b || count <= 1) return {a};
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
      out.push_back(i == count - 1 ? b : a + (b - a) * static_cast<double>(i) / (count - 1));
    }
    return out;
  }
  for (std::size_t i = 0; i < points_.size(); ++i)
    if (weights_[i] > 0.0) out.push_back(points_[i]);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::string SingleSiteDistribution::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind_) {
    case Kind::two_point:
      os << "two_point(a=" << points_[0] << ",b=" << points_[1] << ",p=" << weights_[0] << ")";
      break;
    case Kind::uniform:
      os << "uniform(" << points_[0] << "," << points_[1] << ")";
      break;
    case Kind::discrete:
      os << "discrete(" << points_.size() << " atoms)";
      break;
  }
  return os.str();
}

ModelParams ModelParams::xy(int n, double gamma, SingleSiteDistribution rho, double mu) {
  ModelParams p;
  p.ell = 2;
  p.n = n;
  const auto links = static_cast<std::size_t>(std::max(0, n - 1));
  p.mu.assign(links, mu);
  p.gamma.assign(links, gamma);
  p.rho = std::move(rho);
  p.validate();
  return p;
}

void ModelParams::validate() const {
  if (ell < 1) throw ConfigError("ell must be positive");
  if (n < 1) throw ConfigError("chain length n must be positive");
  const auto links = static_cast<std::size_t>(n - 1);
  if (mu.size() < links || gamma.size() < links) {
    throw ConfigError("mu and gamma need at least n-1 entries");
  }
}

Mat BlockJacobiMatrix::dense() const {
  const int l = ell;
  Mat M = Mat::Zero(dim(), dim());
  for (int k = 0; k < n(); ++k) M.block(k * l, k * l, l, l) = V[static_cast<std::size_t>(k)];
  for (int k = 0; k + 1 < n(); ++k) {
    const Mat& s = S[static_cast<std::size_t>(k)];
    M.block(k * l, (k + 1) * l, l, l) = -s;
    M.block((k + 1) * l, k * l, l, l) = -s.transpose();
  }
  return M;
}

double BlockJacobiMatrix::norm_bound() const {
  double best = 0.0;
  for (int k = 0; k < n(); ++k) {
    const auto ku = static_cast<std::size_t>(k);
    Vec rows = V[ku].cwiseAbs().rowwise().sum();
    if (k + 1 < n()) rows += S[ku].cwiseAbs().rowwise().sum();
    if (k > 0) rows += S[ku - 1].cwiseAbs().colwise().sum().transpose();
    best = std::max(best, rows.maxCoeff());
  }
  return best;
}

Mat HatBlockMatrix::dense() const {
  const int m = n();
  Mat H(2 * m, 2 * m);
  H << A, B, -B, -A;
  return H;
}

Mat2 pauli_z() {
  Mat2 z;
  z << 1.0, 0.0, 0.0, -1.0;
  return z;
}

Mat2 s_gamma(double gamma) {
  Mat2 s;
  s << 1.0, gamma, -gamma, -1.0;
  return s;
}

Eigen::PermutationMatrix<Eigen::Dynamic> interleaving_permutation(int n) {
  // Eigen's P maps e_i to e_{idx(i)}.
  Eigen::VectorXi idx(2 * n);
  for (int j = 0; j < n; ++j) {
    idx(2 * j) = j;
    idx(2 * j + 1) = n + j;
  }
  return Eigen::PermutationMatrix<Eigen::Dynamic>(idx);
}

DisorderRealization sample_disorder(const ModelParams& params, std::uint64_t seed,
                                    std::uint64_t index) {
  params.validate();
  DisorderRealization r;
  r.seed = seed;
  r.index = index;
  r.nu.resize(static_cast<std::size_t>(params.n));
  CounterRng rng(seed, index);
  for (auto& v : r.nu) v = params.rho.sample(rng);
  return r;
}

namespace {

void check_realization(const ModelParams& params, const DisorderRealization& real) {
  params.validate();
  if (static_cast<int>(real.nu.size()) != params.n) {
    throw ConfigError("disorder realization length does not match n");
  }
}

}  // namespace

BlockJacobiMatrix assemble_block_jacobi(const ModelParams& params, const DisorderRealization& real) {
  check_realization(params, real);
  if (params.ell != 2) throw ConfigError("XY assembly requires ell = 2");
  BlockJacobiMatrix M;
  M.ell = 2;
  M.V.reserve(static_cast<std::size_t>(params.n));
  for (double nu : real.nu) M.V.emplace_back(nu * pauli_z());
  for (int k = 0; k + 1 < params.n; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    const double g = params.gamma[ku];
    if (std::abs(g) == 1.0) {
      throw ConfigError("gamma = +-1 makes S(gamma) singular (det = gamma^2 - 1 = 0)");
    }
    M.S.emplace_back(params.mu[ku] * s_gamma(g));
  }
  return M;
}

HatBlockMatrix assemble_hat_form(const ModelParams& params, const DisorderRealization& real) {
  check_realization(params, real);
  const int n = params.n;
  HatBlockMatrix h;
  h.A = Mat::Zero(n, n);
  h.B = Mat::Zero(n, n);
  for (int j = 0; j < n; ++j) h.A(j, j) = real.nu[static_cast<std::size_t>(j)];
  for (int j = 0; j + 1 < n; ++j) {
    const auto ju = static_cast<std::size_t>(j);
    const double m = params.mu[ju];
    const double mg = m * params.gamma[ju];
    h.A(j, j + 1) = -m;
    h.A(j + 1, j) = -m;
    h.B(j, j + 1) = -mg;
    h.B(j + 1, j) = mg;
  }
  return h;
}

BlockJacobiMatrix assemble_general(int ell, std::vector<Mat> V, std::vector<Mat> S) {
  if (ell < 1) throw ConfigError("ell must be positive");
  if (V.empty()) throw ConfigError("need at least one diagonal block");
  if (S.size() + 1 != V.size()) throw ConfigError("need exactly n-1 off-diagonal blocks");
  for (const auto& v : V) {
    if (v.rows() != ell || v.cols() != ell) throw ConfigError("diagonal block has wrong size");
    if (!(v - v.transpose()).isZero(0.0)) throw ConfigError("diagonal block is not symmetric");
  }
  for (const auto& s : S) {
    if (s.rows() != ell || s.cols() != ell) throw ConfigError("off-diagonal block has wrong size");
    Eigen::FullPivLU<Mat> lu(s);
    if (!lu.isInvertible()) throw ConfigError("off-diagonal block is singular");
  }
  BlockJacobiMatrix M;
  M.ell = ell;
  M.V = std::move(V);
  M.S = std::move(S);
  return M;
}

BlockEnsemble BlockEnsemble::xy(double gamma, SingleSiteDistribution rho, double mu) {
  if (std::abs(gamma) == 1.0) {
    throw ConfigError("gamma = +-1 makes S(gamma) singular (det = gamma^2 - 1 = 0)");
  }
  if (mu == 0.0) throw ConfigError("mu = 0 makes the hopping block singular");
  BlockEnsemble e;
  e.ell_ = 2;
  e.xy_ = true;
  e.gamma_ = gamma;
  e.mu_ = mu;
  e.rho_ = std::move(rho);
  return e;
}

BlockEnsemble BlockEnsemble::general(std::vector<Mat> v_choices, std::vector<double> v_weights,
                                     std::vector<Mat> s_choices, std::vector<double> s_weights) {
  if (v_choices.empty() || s_choices.empty()) throw ConfigError("general ensemble needs choices");
  const auto ell = static_cast<int>(v_choices.front().rows());
  // One diagonal block per choice plus a filler keeps assemble_general's shape rule.
  std::vector<Mat> probe_v = v_choices;
  std::vector<Mat> probe_s = s_choices;
  while (probe_s.size() + 1 < probe_v.size()) probe_s.push_back(s_choices.front());
  while (probe_s.size() + 1 > probe_v.size()) probe_v.push_back(v_choices.front());
  (void)assemble_general(ell, std::move(probe_v), std::move(probe_s));

  auto indices = [](std::size_t count) {
    std::vector<double> idx(count);
    std::iota(idx.begin(), idx.end(), 0.0);
    return idx;
  };
  BlockEnsemble e;
  e.ell_ = ell;
  e.xy_ = false;
  e.v_pick_ = SingleSiteDistribution::discrete(indices(v_choices.size()), std::move(v_weights));
  e.s_pick_ = SingleSiteDistribution::discrete(indices(s_choices.size()), std::move(s_weights));
  e.v_choices_ = std::move(v_choices);
  e.s_choices_ = std::move(s_choices);
  return e;
}

void BlockEnsemble::draw(CounterRng& rng, Mat& V, Mat& S) const {
  if (xy_) {
    V = rho_.sample(rng) * pauli_z();
    S = mu_ * s_gamma(gamma_);
    return;
  }
  V = v_choices_[static_cast<std::size_t>(v_pick_.sample(rng))];
  S = s_choices_[static_cast<std::size_t>(s_pick_.sample(rng))];
}

double BlockEnsemble::mean_log_abs_det_s() const {
  if (xy_) return std::log(std::abs(mu_ * mu_ * (gamma_ * gamma_ - 1.0)));
  double acc = 0.0;
  for (std::size_t i = 0; i < s_choices_.size(); ++i) {
    acc += s_pick_.weights()[i] * std::log(std::abs(s_choices_[i].determinant()));
  }
  return acc;
}

BlockJacobiMatrix BlockEnsemble::sample(int n, std::uint64_t seed, std::uint64_t index) const {
  if (n < 1) throw ConfigError("chain length n must be positive");
  if (xy_) {
    auto params = ModelParams::xy(n, gamma_, rho_, mu_);
    return assemble_block_jacobi(params, sample_disorder(params, seed, index));
  }
  CounterRng rng(seed, index);
  BlockJacobiMatrix M;
  M.ell = ell_;
  Mat V, S;
  for (int k = 0; k < n; ++k) {
    draw(rng, V, S);
    M.V.push_back(V);
    if (k + 1 < n) M.S.push_back(S);
  }
  return M;
}

}  // namespace randblock
