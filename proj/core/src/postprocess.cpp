#include "tensorclust/postprocess.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <stdexcept>
#include <utility>

namespace tensorclust {

void MixingMeasure::validate() const {
  if (weights.empty() || weights.size() != atoms.size()) {
    throw std::invalid_argument("MixingMeasure: weights and atoms must be non-empty and aligned");
  }
  double sum = 0.0;
  for (double w : weights) {
    if (!(w > 0.0) || w > 1.0) {
      throw std::invalid_argument("MixingMeasure: weights must lie in (0, 1]");
    }
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw std::invalid_argument("MixingMeasure: weights must sum to 1");
  }
  const Eigen::Index p = atoms.front().size();
  for (const auto& a : atoms) {
    if (a.size() != p) throw std::invalid_argument("MixingMeasure: atoms must share length");
    if (!a.allFinite()) throw std::invalid_argument("MixingMeasure: atom entries must be finite");
  }
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    for (std::size_t j = i + 1; j < atoms.size(); ++j) {
      if (atoms[i] == atoms[j]) {
        throw std::invalid_argument("MixingMeasure: atoms must be distinct");
      }
    }
  }
}

double rand_index(std::span<const int> a, std::span<const int> b) {
  const std::size_t n = a.size();
  if (n != b.size()) throw std::invalid_argument("rand_index: label vectors differ in length");
  if (n < 2) throw std::invalid_argument("rand_index: needs at least two observations");
  std::map<std::pair<int, int>, long> joint;
  std::map<int, long> ma, mb;
  for (std::size_t i = 0; i < n; ++i) {
    ++joint[{a[i], b[i]}];
    ++ma[a[i]];
    ++mb[b[i]];
  }
  auto pairs = [](long c) { return 0.5 * static_cast<double>(c) * static_cast<double>(c - 1); };
  double sj = 0.0, sa = 0.0, sb = 0.0;
  for (const auto& [k, c] : joint) sj += pairs(c);
  for (const auto& [k, c] : ma) sa += pairs(c);
  for (const auto& [k, c] : mb) sb += pairs(c);
  const double total = pairs(static_cast<long>(n));
  return (total + 2.0 * sj - sa - sb) / total;
}

double rand_index(const LabelVector& a, const LabelVector& b) {
  return rand_index(std::span<const int>(a.labels), std::span<const int>(b.labels));
}

Eigen::MatrixXd mean_coclustering(const std::vector<LabelVector>& samples) {
  if (samples.empty()) throw std::invalid_argument("mean_coclustering: no samples");
  const std::size_t n = samples.front().labels.size();
  if (n == 0) throw std::invalid_argument("mean_coclustering: empty label vectors");
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                            static_cast<Eigen::Index>(n));
  std::map<int, std::vector<Eigen::Index>> groups;
  for (const auto& s : samples) {
    if (s.labels.size() != n) {
      throw std::invalid_argument("mean_coclustering: samples differ in length");
    }
    groups.clear();
    for (std::size_t i = 0; i < n; ++i) groups[s.labels[i]].push_back(static_cast<Eigen::Index>(i));
    for (const auto& [label, idx] : groups) {
      for (std::size_t p = 0; p < idx.size(); ++p) {
        for (std::size_t q = p + 1; q < idx.size(); ++q) m(idx[p], idx[q]) += 1.0;
      }
    }
  }
  m /= static_cast<double>(samples.size());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    m(i, i) = 1.0;
    for (Eigen::Index j = 0; j < i; ++j) m(i, j) = m(j, i);
  }
  return m;
}

DahlResult dahl_configuration(const std::vector<LabelVector>& samples) {
  if (samples.empty()) throw std::invalid_argument("dahl_configuration: no samples");
  const Eigen::MatrixXd mbar = mean_coclustering(samples);
  const Eigen::Index n = mbar.rows();
  double base = 0.0;  // sum over unordered pairs of mbar^2, shared by all scores
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) base += mbar(i, j) * mbar(i, j);
  }
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_idx = 0;
  std::map<int, std::vector<Eigen::Index>> groups;
  for (std::size_t t = 0; t < samples.size(); ++t) {
    groups.clear();
    for (std::size_t i = 0; i < samples[t].labels.size(); ++i) {
      groups[samples[t].labels[i]].push_back(static_cast<Eigen::Index>(i));
    }
    // (delta - mbar)^2 summed over pairs = base + sum_{same-cluster}(1 - 2 mbar)
    double score = base;
    for (const auto& [label, idx] : groups) {
      for (std::size_t p = 0; p < idx.size(); ++p) {
        for (std::size_t q = p + 1; q < idx.size(); ++q) {
          score += 1.0 - 2.0 * mbar(idx[p], idx[q]);
        }
      }
    }
    if (score < best) {
      best = score;
      best_idx = t;
    }
  }
  return DahlResult{samples[best_idx], best_idx + 1};
}

namespace {

// Exact transportation simplex (northwest-corner start, potentials, Bland's
// entering rule) on the coupling polytope of two discrete measures. Sizes
// here are at most truncation_T per side, so dense bookkeeping is fine.
class Transport {
 public:
  Transport(const Eigen::MatrixXd& cost, std::vector<double> supply, std::vector<double> demand)
      : c_(cost),
        m_(static_cast<int>(supply.size())),
        n_(static_cast<int>(demand.size())),
        flow_(Eigen::MatrixXd::Zero(m_, n_)),
        basis_(m_, std::vector<char>(n_, 0)) {
    northwest(std::move(supply), std::move(demand));
  }

  double solve() {
    const int max_pivots = 20000;
    for (int pivot = 0; pivot < max_pivots; ++pivot) {
      potentials();
      int ei = -1, ej = -1;
      for (int i = 0; i < m_ && ei < 0; ++i) {
        for (int j = 0; j < n_; ++j) {
          if (!basis_[i][j] && c_(i, j) - u_[i] - v_[j] < -1e-12) {
            ei = i;
            ej = j;
            break;
          }
        }
      }
      if (ei < 0) {
        double total = 0.0;
        for (int i = 0; i < m_; ++i) {
          for (int j = 0; j < n_; ++j) total += std::max(flow_(i, j), 0.0) * c_(i, j);
        }
        return total;
      }
      pivot_on(ei, ej);
    }
    throw std::runtime_error("wasserstein: transportation simplex failed to terminate");
  }

 private:
  void northwest(std::vector<double> s, std::vector<double> d) {
    int i = 0, j = 0;
    while (true) {
      const double q = std::min(s[static_cast<std::size_t>(i)], d[static_cast<std::size_t>(j)]);
      flow_(i, j) = q;
      basis_[i][j] = 1;
      s[static_cast<std::size_t>(i)] -= q;
      d[static_cast<std::size_t>(j)] -= q;
      if (i == m_ - 1 && j == n_ - 1) break;
      if (i < m_ - 1 && (s[static_cast<std::size_t>(i)] <= 1e-15 || j == n_ - 1)) {
        ++i;
      } else {
        ++j;
      }
    }
  }

  void potentials() {
    u_.assign(static_cast<std::size_t>(m_), 0.0);
    v_.assign(static_cast<std::size_t>(n_), 0.0);
    std::vector<char> ur(static_cast<std::size_t>(m_), 0), vr(static_cast<std::size_t>(n_), 0);
    std::deque<int> queue;  // rows 0..m-1, cols m..m+n-1
    ur[0] = 1;
    queue.push_back(0);
    while (!queue.empty()) {
      const int node = queue.front();
      queue.pop_front();
      if (node < m_) {
        for (int j = 0; j < n_; ++j) {
          if (basis_[node][j] && !vr[static_cast<std::size_t>(j)]) {
            v_[static_cast<std::size_t>(j)] = c_(node, j) - u_[static_cast<std::size_t>(node)];
            vr[static_cast<std::size_t>(j)] = 1;
            queue.push_back(m_ + j);
          }
        }
      } else {
        const int j = node - m_;
        for (int i = 0; i < m_; ++i) {
          if (basis_[i][j] && !ur[static_cast<std::size_t>(i)]) {
            u_[static_cast<std::size_t>(i)] = c_(i, j) - v_[static_cast<std::size_t>(j)];
            ur[static_cast<std::size_t>(i)] = 1;
            queue.push_back(i);
          }
        }
      }
    }
  }

  void pivot_on(int ei, int ej) {
    // Unique tree path from row node ei to column node ej; adding the
    // entering cell closes the cycle.
    const int rows = m_, total = m_ + n_;
    std::vector<int> parent(static_cast<std::size_t>(total), -2);
    parent[static_cast<std::size_t>(ei)] = -1;
    std::deque<int> queue{ei};
    while (!queue.empty()) {
      const int node = queue.front();
      queue.pop_front();
      if (node == rows + ej) break;
      if (node < rows) {
        for (int j = 0; j < n_; ++j) {
          if (basis_[node][j] && parent[static_cast<std::size_t>(rows + j)] == -2) {
            parent[static_cast<std::size_t>(rows + j)] = node;
            queue.push_back(rows + j);
          }
        }
      } else {
        const int j = node - rows;
        for (int i = 0; i < m_; ++i) {
          if (basis_[i][j] && parent[static_cast<std::size_t>(i)] == -2) {
            parent[static_cast<std::size_t>(i)] = rows + j;
            queue.push_back(i);
          }
        }
      }
    }
    if (parent[static_cast<std::size_t>(rows + ej)] == -2) {
      throw std::runtime_error("wasserstein: basis lost its spanning tree");
    }
    // Walk col ej back to row ei collecting path cells; signs alternate with
    // the cell adjacent to the entering column taking '-'.
    std::vector<std::pair<int, int>> minus, plus;
    int node = rows + ej;
    bool take_minus = true;
    while (parent[static_cast<std::size_t>(node)] != -1) {
      const int par = parent[static_cast<std::size_t>(node)];
      const int i = node < rows ? node : par;
      const int j = node < rows ? par - rows : node - rows;
      (take_minus ? minus : plus).emplace_back(i, j);
      take_minus = !take_minus;
      node = par;
    }
    double theta = std::numeric_limits<double>::infinity();
    for (const auto& [i, j] : minus) theta = std::min(theta, flow_(i, j));
    std::pair<int, int> leaving{-1, -1};
    long best_index = std::numeric_limits<long>::max();
    for (const auto& [i, j] : minus) {
      if (flow_(i, j) <= theta + 1e-15) {
        const long flat = static_cast<long>(i) * n_ + j;
        if (flat < best_index) {
          best_index = flat;
          leaving = {i, j};
        }
      }
    }
    for (const auto& [i, j] : plus) flow_(i, j) += theta;
    for (const auto& [i, j] : minus) flow_(i, j) -= theta;
    flow_(ei, ej) = theta;
    basis_[static_cast<std::size_t>(ei)][static_cast<std::size_t>(ej)] = 1;
    flow_(leaving.first, leaving.second) = 0.0;
    basis_[static_cast<std::size_t>(leaving.first)][static_cast<std::size_t>(leaving.second)] = 0;
  }

  Eigen::MatrixXd c_;
  int m_, n_;
  Eigen::MatrixXd flow_;
  std::vector<std::vector<char>> basis_;
  std::vector<double> u_, v_;
};

}  // namespace

double wasserstein(const MixingMeasure& a, const MixingMeasure& b, GroundNorm norm) {
  a.validate();
  b.validate();
  if (a.atoms.front().size() != b.atoms.front().size()) {
    throw std::invalid_argument("wasserstein: atom vectors differ in length");
  }
  const int m = static_cast<int>(a.atoms.size());
  const int n = static_cast<int>(b.atoms.size());
  Eigen::MatrixXd cost(m, n);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      const Eigen::VectorXd d = a.atoms[static_cast<std::size_t>(i)] -
                                b.atoms[static_cast<std::size_t>(j)];
      cost(i, j) = norm == GroundNorm::Euclidean ? d.norm() : d.lpNorm<1>();
    }
  }
  auto normalized = [](const std::vector<double>& w) {
    double s = 0.0;
    for (double x : w) s += x;
    std::vector<double> out(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) out[i] = w[i] / s;
    return out;
  };
  Transport solver(cost, normalized(a.weights), normalized(b.weights));
  return solver.solve();
}

KPosterior cluster_number_posterior(std::span<const int> counts) {
  if (counts.empty()) throw std::invalid_argument("cluster_number_posterior: no samples");
  KPosterior out;
  std::map<int, long> raw;
  for (int k : counts) ++raw[k];
  long best = 0;
  for (const auto& [k, c] : raw) {
    out.histogram[k] = static_cast<double>(c) / static_cast<double>(counts.size());
    if (c > best) {  // map iteration is ascending, so ties keep the smaller K
      best = c;
      out.mode = k;
    }
  }
  return out;
}

KPosterior cluster_number_posterior(const ChainRecord& chain, int direction) {
  if (direction < 1 || direction > 3) {
    throw std::invalid_argument("cluster_number_posterior: direction must be 1..3");
  }
  const auto kept = chain.kept();
  std::vector<int> counts;
  counts.reserve(kept.size());
  for (const ModelState& s : kept) {
    counts.push_back(s.dir[static_cast<std::size_t>(direction - 1)].occupied());
  }
  return cluster_number_posterior(counts);
}

}  // namespace tensorclust
