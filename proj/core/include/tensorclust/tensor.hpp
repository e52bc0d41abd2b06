#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace tensorclust {

struct Dims {
  int p1 = 0;
  int p2 = 0;
  int p3 = 0;

  long cells() const { return static_cast<long>(p1) * p2 * p3; }
  int extent(int direction) const;  // direction in 1..3
  bool operator==(const Dims&) const = default;
};

// Dense p1 x p2 x p3 count array for one observation unit, row-major
// ((i * p2 + j) * p3 + k). The shot-chart partition is at most 11 x 12 x 4,
// so there is nothing to gain from sparsity.
class CountTensor {
 public:
  CountTensor(std::string unit_id, Dims dims, std::vector<std::int64_t> counts);

  const std::string& unit_id() const { return unit_id_; }
  const Dims& dims() const { return dims_; }
  const std::vector<std::int64_t>& counts() const { return counts_; }
  std::int64_t at(int i, int j, int k) const;
  std::int64_t grand_total() const { return total_; }

  // Sum of log(y!) over all cells. Counts are fixed for the lifetime of a
  // chain, so this is computed once at construction.
  double log_factorial_sum() const { return log_factorial_sum_; }

  // Counts summed over the other two directions; length = extent(direction).
  Eigen::VectorXd marginal(int direction) const;

 private:
  std::string unit_id_;
  Dims dims_;
  std::vector<std::int64_t> counts_;
  std::int64_t total_ = 0;
  double log_factorial_sum_ = 0.0;
};

// One direction's cluster-level effect on the log scale: log E(Y_ijk) picks
// up log_gamma[i] from direction 1, [j] from 2, [k] from 3.
struct MainEffectVector {
  int direction = 0;  // 1..3
  Eigen::VectorXd log_gamma;
};

struct RealTensor {
  Dims dims;
  std::vector<double> values;  // row-major, same layout as CountTensor
  double at(int i, int j, int k) const;
};

// Outer-sum composition: entry (i,j,k) = g1[i] + g2[j] + g3[k].
RealTensor rank_one_log_mean(const MainEffectVector& g1, const MainEffectVector& g2,
                             const MainEffectVector& g3);

// Poisson log-likelihood sum(y * log mu - mu - log y!) with mu = exp(log_mean).
// Never returns NaN for finite log_mean; an overflowing mu yields -inf.
double poisson_loglik(const CountTensor& y, const RealTensor& log_mean);

// "angle", "distance", "quarter" for directions 1..3.
const char* direction_name(int direction);

}  // namespace tensorclust
