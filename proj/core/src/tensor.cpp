#include "tensorclust/tensor.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "tensorclust/numeric.hpp"

namespace tensorclust {

int Dims::extent(int direction) const {
  switch (direction) {
    case 1: return p1;
    case 2: return p2;
    case 3: return p3;
    default: throw std::invalid_argument("Dims::extent: direction must be 1, 2 or 3");
  }
}

CountTensor::CountTensor(std::string unit_id, Dims dims, std::vector<std::int64_t> counts)
    : unit_id_(std::move(unit_id)), dims_(dims), counts_(std::move(counts)) {
  if (dims_.p1 < 1 || dims_.p2 < 1 || dims_.p3 < 1) {
    throw std::invalid_argument("CountTensor: dims must be positive (unit " + unit_id_ + ")");
  }
  if (static_cast<long>(counts_.size()) != dims_.cells()) {
    throw std::invalid_argument("CountTensor: count vector length does not match dims (unit " +
                                unit_id_ + ")");
  }
  for (std::int64_t c : counts_) {
    if (c < 0) {
      throw std::invalid_argument("CountTensor: negative count (unit " + unit_id_ + ")");
    }
    total_ += c;
    log_factorial_sum_ += log_factorial(c);
  }
}

std::int64_t CountTensor::at(int i, int j, int k) const {
  if (i < 0 || i >= dims_.p1 || j < 0 || j >= dims_.p2 || k < 0 || k >= dims_.p3) {
    throw std::out_of_range("CountTensor::at: index outside dims");
  }
  return counts_[(static_cast<std::size_t>(i) * dims_.p2 + j) * dims_.p3 + k];
}

Eigen::VectorXd CountTensor::marginal(int direction) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(dims_.extent(direction));
  std::size_t idx = 0;
  for (int i = 0; i < dims_.p1; ++i) {
    for (int j = 0; j < dims_.p2; ++j) {
      for (int k = 0; k < dims_.p3; ++k, ++idx) {
        const auto c = static_cast<double>(counts_[idx]);
        if (direction == 1) out[i] += c;
        else if (direction == 2) out[j] += c;
        else out[k] += c;
      }
    }
  }
  return out;
}

double RealTensor::at(int i, int j, int k) const {
  return values[(static_cast<std::size_t>(i) * dims.p2 + j) * dims.p3 + k];
}

RealTensor rank_one_log_mean(const MainEffectVector& g1, const MainEffectVector& g2,
                             const MainEffectVector& g3) {
  if (g1.direction != 1 || g2.direction != 2 || g3.direction != 3) {
    throw std::invalid_argument("rank_one_log_mean: effects must carry directions 1, 2, 3");
  }
  Dims d{static_cast<int>(g1.log_gamma.size()), static_cast<int>(g2.log_gamma.size()),
         static_cast<int>(g3.log_gamma.size())};
  if (d.p1 < 1 || d.p2 < 1 || d.p3 < 1) {
    throw std::invalid_argument("rank_one_log_mean: empty effect vector");
  }
  RealTensor out{d, std::vector<double>(static_cast<std::size_t>(d.cells()))};
  std::size_t idx = 0;
  for (int i = 0; i < d.p1; ++i) {
    for (int j = 0; j < d.p2; ++j) {
      const double gij = g1.log_gamma[i] + g2.log_gamma[j];
      for (int k = 0; k < d.p3; ++k, ++idx) {
        out.values[idx] = gij + g3.log_gamma[k];
      }
    }
  }
  return out;
}

const char* direction_name(int direction) {
  switch (direction) {
    case 1: return "angle";
    case 2: return "distance";
    case 3: return "quarter";
    default: throw std::invalid_argument("direction_name: direction must be 1, 2 or 3");
  }
}

double poisson_loglik(const CountTensor& y, const RealTensor& log_mean) {
  if (!(y.dims() == log_mean.dims)) {
    throw std::invalid_argument("poisson_loglik: dims mismatch (unit " + y.unit_id() + ")");
  }
  double total = 0.0;
  const auto& counts = y.counts();
  for (std::size_t idx = 0; idx < counts.size(); ++idx) {
    const double lm = log_mean.values[idx];
    if (!std::isfinite(lm)) {
      throw std::invalid_argument("poisson_loglik: non-finite log mean");
    }
    const double c = static_cast<double>(counts[idx]);
    total += c * lm - std::exp(lm);
  }
  total -= y.log_factorial_sum();
  // exp overflow gives -inf above; y*lm can only produce NaN against it for
  // counts past 1e300, which no valid tensor holds. Guard anyway.
  if (std::isnan(total)) return -std::numeric_limits<double>::infinity();
  return total;
}

}  // namespace tensorclust
