#include "tensorclust/mfm.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "tensorclust/numeric.hpp"

namespace tensorclust {

void MfmConfig::validate() const {
  if (!(dirichlet_gamma > 0.0)) throw std::invalid_argument("MfmConfig: dirichlet_gamma must be positive");
  if (!(nu > 0.0)) throw std::invalid_argument("MfmConfig: nu must be positive");
  if (!(psi > 0.0)) throw std::invalid_argument("MfmConfig: psi must be positive");
  if (truncation_T < 1) throw std::invalid_argument("MfmConfig: truncation_T must be >= 1");
}

int LabelVector::cluster_count() const {
  int count = 0;
  std::unordered_map<int, bool> seen;
  for (int z : labels) {
    if (!seen.count(z)) {
      seen[z] = true;
      ++count;
    }
  }
  return count;
}

void canonicalize_labels(std::vector<int>& labels) {
  std::unordered_map<int, int> remap;
  int next = 1;
  for (int& z : labels) {
    auto it = remap.find(z);
    if (it == remap.end()) {
      remap.emplace(z, next);
      z = next++;
    } else {
      z = it->second;
    }
  }
}

LabelVector canonicalized(LabelVector v) {
  canonicalize_labels(v.labels);
  return v;
}

double k_prior_log_pmf(int k, const MfmConfig& cfg) {
  cfg.validate();
  if (k < 1) throw std::invalid_argument("k_prior_log_pmf: k must be >= 1");
  // K - 1 ~ Poisson(psi).
  return (k - 1) * std::log(cfg.psi) - cfg.psi - log_gamma_fn(static_cast<double>(k));
}

double log_vn(int t, int n, const MfmConfig& cfg) {
  cfg.validate();
  if (t < 1 || n < 1 || t > n) {
    throw std::invalid_argument("log_vn: requires 1 <= t <= n, got t=" + std::to_string(t) +
                                " n=" + std::to_string(n));
  }
  constexpr int kCap = 5000;
  constexpr double kLogTailRatio = -29.9336;  // log(1e-13)
  double lse = -std::numeric_limits<double>::infinity();
  for (int k = t; k <= kCap; ++k) {
    const double term = log_falling_factorial(k, t) -
                        log_rising_factorial(cfg.dirichlet_gamma * k, n) +
                        k_prior_log_pmf(k, cfg);
    lse = log_add_exp(lse, term);
    // Terms decay super-exponentially once the Poisson factor dominates, so a
    // single term this far below the running sum bounds the whole tail.
    if (k >= t + 4 && term < lse + kLogTailRatio) return lse;
  }
  throw std::runtime_error("log_vn: series did not converge within k <= 5000 (t=" +
                           std::to_string(t) + ", n=" + std::to_string(n) +
                           ", gamma=" + std::to_string(cfg.dirichlet_gamma) + ")");
}

VnCache::VnCache(MfmConfig cfg) : cfg_(cfg) { cfg_.validate(); }

double VnCache::log_vn(int t, int n) {
  const std::uint64_t key =
      (static_cast<std::uint64_t>(static_cast<std::uint32_t>(n)) << 32) |
      static_cast<std::uint32_t>(t);
  auto it = memo_.find(key);
  if (it != memo_.end()) return it->second;
  const double v = tensorclust::log_vn(t, n, cfg_);
  memo_.emplace(key, v);
  return v;
}

UrnWeights urn_weights(std::span<const int> labels_without_i, int n, const MfmConfig& cfg) {
  cfg.validate();
  if (n < static_cast<int>(labels_without_i.size()) + 1) {
    throw std::invalid_argument("urn_weights: n must count the held-out observation");
  }
  UrnWeights out;
  std::unordered_map<int, std::size_t> index;
  for (int z : labels_without_i) {
    auto it = index.find(z);
    if (it == index.end()) {
      index.emplace(z, out.cluster_ids.size());
      out.cluster_ids.push_back(z);
      out.existing.push_back(1.0);
    } else {
      out.existing[it->second] += 1.0;
    }
  }
  for (double& w : out.existing) w += cfg.dirichlet_gamma;
  const int t = static_cast<int>(out.cluster_ids.size());
  if (t == 0) {
    out.new_cluster = 1.0;
    return out;
  }
  out.new_cluster = cfg.dirichlet_gamma * std::exp(log_vn(t + 1, n, cfg) - log_vn(t, n, cfg));
  return out;
}

StickBreaking stick_breaking_from_lengths(std::span<const double> etas, int truncation_T) {
  if (truncation_T < 1) throw std::invalid_argument("stick_breaking: truncation_T must be >= 1");
  double cum = 0.0;
  std::vector<double> pi;
  for (int j = 0; j < truncation_T; ++j) {
    if (j >= static_cast<int>(etas.size())) {
      throw std::invalid_argument("stick_breaking: eta sequence exhausted before reaching 1");
    }
    const double eta = etas[j];
    if (!(eta > 0.0)) throw std::invalid_argument("stick_breaking: lengths must be positive");
    if (cum + eta >= 1.0) {
      pi.push_back(1.0 - cum);
      StickBreaking sb;
      sb.k = j + 1;
      sb.pi = Eigen::Map<const Eigen::VectorXd>(pi.data(), static_cast<Eigen::Index>(pi.size()));
      return sb;
    }
    pi.push_back(eta);
    cum += eta;
  }
  throw std::runtime_error(
      "stick_breaking: cumulative length stayed below 1 within truncation_T = " +
      std::to_string(truncation_T) + "; increase truncation_T");
}

StickBreaking stick_breaking_sample(const MfmConfig& cfg, Rng& rng) {
  cfg.validate();
  std::vector<double> etas;
  etas.reserve(cfg.truncation_T);
  double cum = 0.0;
  for (int j = 0; j < cfg.truncation_T && cum < 1.0; ++j) {
    etas.push_back(rng.exponential(cfg.psi));
    cum += etas.back();
  }
  return stick_breaking_from_lengths(etas, cfg.truncation_T);
}

Eigen::VectorXd embed_weights(const StickBreaking& sb, int truncation_T) {
  if (sb.k > truncation_T) throw std::invalid_argument("embed_weights: k exceeds truncation_T");
  Eigen::VectorXd w = Eigen::VectorXd::Zero(truncation_T);
  w.head(sb.k) = sb.pi;
  return w;
}

}  // namespace tensorclust
