#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "tensorclust/rng.hpp"

namespace tensorclust {

// Mixture-of-finite-mixtures prior for one tensor direction:
//   K - 1 ~ Poisson(psi),  (pi | K) ~ Dirichlet(nu, ..., nu),
// with dirichlet_gamma the Dirichlet parameter appearing in the exchangeable
// urn representation. Defaults follow the reference analysis (all rates 1).
struct MfmConfig {
  double dirichlet_gamma = 1.0;
  double nu = 1.0;
  double psi = 1.0;
  // Stick-breaking truncation. P(K > 15) < 1e-12 at psi = 1.
  int truncation_T = 15;

  void validate() const;
};

// Cluster assignments for one direction, 1-based. Canonical form labels
// clusters 1..t in order of first appearance.
struct LabelVector {
  int direction = 0;  // 1..3, 0 when not tied to a tensor direction
  std::vector<int> labels;

  int cluster_count() const;
};

void canonicalize_labels(std::vector<int>& labels);
LabelVector canonicalized(LabelVector v);

// log P(K = k) for the shifted-Poisson prior, k >= 1.
double k_prior_log_pmf(int k, const MfmConfig& cfg);

// log V_n(t) = log sum_{k >= t} k_(t) / (gamma k)^(n) * p_K(k), summed in log
// space; terms decay super-exponentially under the Poisson prior, and the sum
// stops once the relative tail is below ~1e-13. Requires 1 <= t <= n.
double log_vn(int t, int n, const MfmConfig& cfg);

// Chain-local memo over (t, n) for a fixed config. Not thread-safe; give each
// chain its own instance.
class VnCache {
 public:
  explicit VnCache(MfmConfig cfg);
  double log_vn(int t, int n);
  const MfmConfig& config() const { return cfg_; }

 private:
  MfmConfig cfg_;
  std::unordered_map<std::uint64_t, double> memo_;
};

// Predictive urn weights given the labels of all observations except the
// current one; n counts the held-out observation as well. Existing cluster c
// gets |c| + gamma, a new cluster gets gamma * V_n(t+1) / V_n(t). For an
// empty partition the single new-cluster option is returned with weight 1
// (any positive constant normalizes to the same distribution).
struct UrnWeights {
  std::vector<int> cluster_ids;  // order of first appearance in the input
  std::vector<double> existing;
  double new_cluster = 0.0;
};
UrnWeights urn_weights(std::span<const int> labels_without_i, int n, const MfmConfig& cfg);

// Exponential stick-breaking draw of (K, pi): eta_j iid Exp(psi),
// K = min{j : eta_1 + ... + eta_j >= 1}, pi_h = eta_h for h < K and the
// remainder goes to pi_K. Equivalent in law to the shifted-Poisson K with
// uniform Dirichlet weights.
struct StickBreaking {
  int k = 0;
  Eigen::VectorXd pi;  // length k, sums to 1
};

// Deterministic core used by tests to inject eta sequences. Throws if the
// cumulative sum stays below 1 within truncation_T lengths.
StickBreaking stick_breaking_from_lengths(std::span<const double> etas, int truncation_T);
StickBreaking stick_breaking_sample(const MfmConfig& cfg, Rng& rng);

// Length-T vector with pi in front and exact zeros after entry k.
Eigen::VectorXd embed_weights(const StickBreaking& sb, int truncation_T);

}  // namespace tensorclust
