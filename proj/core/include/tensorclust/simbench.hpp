#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tensorclust/mfm.hpp"
#include "tensorclust/postprocess.hpp"
#include "tensorclust/rng.hpp"
#include "tensorclust/sampler.hpp"
#include "tensorclust/tensor.hpp"

namespace tensorclust {

struct DesignTruth {
  std::array<LabelVector, 3> labels;
  std::array<MixingMeasure, 3> mixing;
};

// Ground truth for one synthetic benchmark: per-direction cluster log-effects
// and the unit-to-cluster assignment. Units are generated cell-wise Poisson
// with the rank-one mean of their assigned cluster triplet.
struct DesignSpec {
  int design_id = 0;  // 1 or 2 for the shipped designs, 0 for custom specs
  int n_units = 0;
  Dims dims;
  std::array<std::vector<Eigen::VectorXd>, 3> effects;  // per direction, per cluster
  std::array<std::vector<int>, 3> assignments;          // per direction, unit -> cluster

  // The two shipped benchmarks. Design 1: dims (3,3,4), two clusters of 75
  // per direction. Design 2: dims (11,12,4), three clusters of 50 for angle
  // and distance, two of 75 for quarter, with effect profiles chosen so that
  // cross-direction volume differences swamp within-direction ones (hard for
  // raw-count baselines, unambiguous for the full model).
  static DesignSpec design(int id);

  void validate() const;
  DesignTruth truth() const;
  std::array<int, 3> cluster_counts() const;
};

std::vector<CountTensor> generate_design(const DesignSpec& spec, std::uint64_t seed);

// Counts summed over the two dropped directions (what the baselines see).
Eigen::VectorXd marginalize(const CountTensor& t, int keep_direction);

// Lloyd's algorithm, k-means++ seeding, best of `restarts` runs by
// within-cluster sum of squares; deterministic per seed. Labels canonical.
LabelVector kmeans(const std::vector<Eigen::VectorXd>& vectors, int k, std::uint64_t seed,
                   int restarts = 20, int direction = 0);

// One seeded run; objective_trace, when given, receives the within-cluster
// sum of squares after every assignment pass (never increasing).
std::vector<int> kmeans_single(const std::vector<Eigen::VectorXd>& vectors, int k, Rng& rng,
                               std::vector<double>* objective_trace = nullptr);

// Density clustering with Euclidean distance; neighborhoods count the point
// itself. Border points join their nearest core point's cluster and noise
// points become singletons, so the result is a full partition and is
// order-independent up to relabeling. Labels canonical.
LabelVector dbscan(const std::vector<Eigen::VectorXd>& vectors, double eps, int min_pts,
                   int direction = 0);

struct ReplicateRow {
  int replicate = 0;  // 1-based
  bool ok = false;
  std::string error;
  std::map<std::string, std::array<double, 3>> rand_index;     // method -> per direction
  std::map<std::string, std::array<int, 3>> cluster_counts;    // method -> per direction
  std::array<int, 3> k_mode{};  // posterior mode of the occupied-cluster count
};

struct SummaryRow {
  std::string method;
  int direction = 0;
  double mean_ri = 0.0;
  double sd_ri = 0.0;
  double pct_correct_k = 0.0;
};

struct ReplicateTable {
  std::vector<SummaryRow> summary;
  std::vector<ReplicateRow> rows;
  std::array<int, 3> true_k{};
};

// Fits every replicate with the model, then runs the marginal-vector
// baselines: K-means with k set to the model's cluster count (the reference
// protocol) and density clustering at reachability 25/50/75/100. A failed
// replicate is recorded with its error and excluded from the means. Results
// are bit-reproducible in (spec, n_rep, cfg, seed) regardless of threads.
ReplicateTable run_replicates(const DesignSpec& spec, int n_rep, const SamplerConfig& cfg,
                              std::uint64_t seed, int threads = 1);

}  // namespace tensorclust
