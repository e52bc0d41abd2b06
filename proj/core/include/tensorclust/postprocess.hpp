#pragma once

#include <map>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "tensorclust/mfm.hpp"
#include "tensorclust/sampler.hpp"

namespace tensorclust {

// Discrete mixing measure for one direction: atom j carries weight
// weights[j] at the log-effect vector atoms[j]. Weights sum to 1.
struct MixingMeasure {
  int direction = 0;
  std::vector<double> weights;
  std::vector<Eigen::VectorXd> atoms;

  void validate() const;
};

// Fraction of concordant pairs: both partitions agree on same-cluster versus
// different-cluster. Symmetric and relabeling-invariant; needs n >= 2.
double rand_index(std::span<const int> a, std::span<const int> b);
double rand_index(const LabelVector& a, const LabelVector& b);

struct DahlResult {
  LabelVector labels;
  std::size_t chosen_iteration = 0;  // 1-based position among the inputs
};

// Least-squares configuration: the sample whose membership matrix is closest
// to the mean membership matrix, ties toward the earliest sample.
DahlResult dahl_configuration(const std::vector<LabelVector>& samples);

// Mean membership matrix over the samples (the matrix Dahl's method scores
// against), for emission alongside the chosen configuration.
Eigen::MatrixXd mean_coclustering(const std::vector<LabelVector>& samples);

enum class GroundNorm { Euclidean, L1 };

// First-order optimal-transport distance between two discrete mixing
// measures: inf over couplings of sum q_ij * ||atom_i - atom_j||, solved
// exactly by the transportation simplex. Atom vectors must share length.
double wasserstein(const MixingMeasure& a, const MixingMeasure& b,
                   GroundNorm norm = GroundNorm::Euclidean);

struct KPosterior {
  std::map<int, double> histogram;  // occupied-cluster count -> frequency
  int mode = 0;                     // ties toward smaller K
};

KPosterior cluster_number_posterior(std::span<const int> counts);
// Occupied-cluster counts over the post-burn-in samples of one direction.
KPosterior cluster_number_posterior(const ChainRecord& chain, int direction);

}  // namespace tensorclust
