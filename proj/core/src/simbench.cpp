#include "tensorclust/simbench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <set>
#include <stdexcept>
#include <thread>

namespace tensorclust {

namespace {

Eigen::VectorXd from_list(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

// Smooth arch over p bins: lo + (hi - lo) * sin(pi * (q + 1/2) / p).
Eigen::VectorXd arch(int p, double lo, double hi) {
  Eigen::VectorXd out(p);
  for (int q = 0; q < p; ++q) {
    out[q] = lo + (hi - lo) * std::sin(std::numbers::pi * (q + 0.5) / p);
  }
  return out;
}

Eigen::VectorXd ramp(int p, double start, double step) {
  Eigen::VectorXd out(p);
  for (int q = 0; q < p; ++q) out[q] = start + step * q;
  return out;
}

}  // namespace

DesignSpec DesignSpec::design(int id) {
  DesignSpec s;
  s.design_id = id;
  s.n_units = 150;
  for (auto& a : s.assignments) a.resize(150);

  if (id == 1) {
    s.dims = Dims{3, 3, 4};
    s.effects[0] = {from_list({0.5, 1.5, 0.5}), from_list({1.5, 0.5, 1.5})};
    s.effects[1] = {from_list({1.5, 1.0, 0.5}), from_list({0.5, 1.0, 1.5})};
    s.effects[2] = {from_list({-1.0, -1.0, -1.0, -1.0}),
                    from_list({-0.5, -2.0, -0.5, -2.0})};
    for (int i = 0; i < 150; ++i) {
      s.assignments[0][static_cast<std::size_t>(i)] = i < 75 ? 1 : 2;
      s.assignments[1][static_cast<std::size_t>(i)] = i % 2 + 1;
      // Crossed with both other directions: residues 0 and 3 mod 4 form one
      // group of 75, residues 1 and 2 the other.
      s.assignments[2][static_cast<std::size_t>(i)] = (i % 4 == 0 || i % 4 == 3) ? 1 : 2;
    }
  } else if (id == 2) {
    s.dims = Dims{11, 12, 4};
    // Angle: center arch, inverted arch, gentle ramp. Pairwise log-scale L2
    // separation >= 1.5; the first two nearly share total volume while the
    // ramp carries clearly less, so angle marginals alone cannot be sorted
    // by size.
    s.effects[0] = {arch(11, -0.1, 1.3), arch(11, 1.3, -0.1), ramp(11, 0.15, 0.05)};
    // Distance: falling ramp, center arch, rising ramp. The two ramps share
    // volume; the arch carries about 1.6x more, which leaks into the other
    // directions' marginals as scale noise.
    s.effects[1] = {ramp(12, 1.1, -0.12), arch(12, 0.2, 1.39), ramp(12, -0.3, 0.13)};
    s.effects[2] = {from_list({-1.0, -1.0, -1.0, -1.0}),
                    from_list({-0.5, -2.0, -0.5, -2.0})};
    for (int i = 0; i < 150; ++i) {
      s.assignments[0][static_cast<std::size_t>(i)] = i % 3 + 1;
      s.assignments[1][static_cast<std::size_t>(i)] = i / 50 + 1;
      s.assignments[2][static_cast<std::size_t>(i)] = i % 2 + 1;
    }
  } else {
    throw std::invalid_argument("DesignSpec::design: id must be 1 or 2");
  }
  s.validate();
  return s;
}

void DesignSpec::validate() const {
  if (n_units < 1) throw std::invalid_argument("DesignSpec: n_units must be >= 1");
  if (dims.p1 < 1 || dims.p2 < 1 || dims.p3 < 1) {
    throw std::invalid_argument("DesignSpec: dims must be positive");
  }
  for (int e = 0; e < 3; ++e) {
    const auto& eff = effects[static_cast<std::size_t>(e)];
    const auto& z = assignments[static_cast<std::size_t>(e)];
    if (eff.empty()) throw std::invalid_argument("DesignSpec: direction without clusters");
    for (const auto& g : eff) {
      if (g.size() != dims.extent(e + 1)) {
        throw std::invalid_argument("DesignSpec: effect length does not match dims");
      }
      if (!g.allFinite()) throw std::invalid_argument("DesignSpec: non-finite effect");
    }
    if (static_cast<int>(z.size()) != n_units) {
      throw std::invalid_argument("DesignSpec: assignment length does not match n_units");
    }
    std::vector<long> occ(eff.size(), 0);
    for (int c : z) {
      if (c < 1 || c > static_cast<int>(eff.size())) {
        throw std::invalid_argument("DesignSpec: assignment outside cluster range");
      }
      ++occ[static_cast<std::size_t>(c - 1)];
    }
    for (long o : occ) {
      if (o == 0) throw std::invalid_argument("DesignSpec: cluster with no units");
    }
  }
}

DesignTruth DesignSpec::truth() const {
  validate();
  DesignTruth t;
  for (int e = 0; e < 3; ++e) {
    const auto& z = assignments[static_cast<std::size_t>(e)];
    t.labels[static_cast<std::size_t>(e)] = LabelVector{e + 1, z};
    MixingMeasure& g = t.mixing[static_cast<std::size_t>(e)];
    g.direction = e + 1;
    g.atoms = effects[static_cast<std::size_t>(e)];
    g.weights.assign(g.atoms.size(), 0.0);
    for (int c : z) g.weights[static_cast<std::size_t>(c - 1)] += 1.0 / n_units;
    g.validate();
  }
  return t;
}

std::array<int, 3> DesignSpec::cluster_counts() const {
  return {static_cast<int>(effects[0].size()), static_cast<int>(effects[1].size()),
          static_cast<int>(effects[2].size())};
}

std::vector<CountTensor> generate_design(const DesignSpec& spec, std::uint64_t seed) {
  spec.validate();
  Rng rng(seed);
  std::vector<CountTensor> out;
  out.reserve(static_cast<std::size_t>(spec.n_units));
  const int width = spec.n_units >= 100 ? 3 : 2;
  for (int i = 0; i < spec.n_units; ++i) {
    const Eigen::VectorXd& g1 = spec.effects[0][static_cast<std::size_t>(
        spec.assignments[0][static_cast<std::size_t>(i)] - 1)];
    const Eigen::VectorXd& g2 = spec.effects[1][static_cast<std::size_t>(
        spec.assignments[1][static_cast<std::size_t>(i)] - 1)];
    const Eigen::VectorXd& g3 = spec.effects[2][static_cast<std::size_t>(
        spec.assignments[2][static_cast<std::size_t>(i)] - 1)];
    std::vector<std::int64_t> counts;
    counts.reserve(static_cast<std::size_t>(spec.dims.cells()));
    for (int a = 0; a < spec.dims.p1; ++a) {
      for (int b = 0; b < spec.dims.p2; ++b) {
        for (int c = 0; c < spec.dims.p3; ++c) {
          counts.push_back(rng.poisson(std::exp(g1[a] + g2[b] + g3[c])));
        }
      }
    }
    char id[16];
    std::snprintf(id, sizeof(id), "u%0*d", width, i + 1);
    out.emplace_back(id, spec.dims, std::move(counts));
  }
  return out;
}

Eigen::VectorXd marginalize(const CountTensor& t, int keep_direction) {
  return t.marginal(keep_direction);
}

std::vector<int> kmeans_single(const std::vector<Eigen::VectorXd>& vectors, int k, Rng& rng,
                               std::vector<double>* objective_trace) {
  const int n = static_cast<int>(vectors.size());
  std::vector<Eigen::VectorXd> cent;
  cent.reserve(static_cast<std::size_t>(k));
  std::vector<char> seeded(static_cast<std::size_t>(n), 0);
  {
    const int first = rng.uniform_int(0, n - 1);
    cent.push_back(vectors[static_cast<std::size_t>(first)]);
    seeded[static_cast<std::size_t>(first)] = 1;
  }
  std::vector<double> d2(static_cast<std::size_t>(n));
  while (static_cast<int>(cent.size()) < k) {
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& c : cent) best = std::min(best, (vectors[static_cast<std::size_t>(i)] - c).squaredNorm());
      d2[static_cast<std::size_t>(i)] = seeded[static_cast<std::size_t>(i)] ? 0.0 : best;
      total += d2[static_cast<std::size_t>(i)];
    }
    int pick = -1;
    if (total > 0.0) {
      const double u = rng.uniform() * total;
      double cum = 0.0;
      for (int i = 0; i < n; ++i) {
        cum += d2[static_cast<std::size_t>(i)];
        if (u < cum) {
          pick = i;
          break;
        }
      }
      if (pick < 0) {  // rounding pushed u past the last positive mass
        for (int i = n - 1; i >= 0; --i) {
          if (d2[static_cast<std::size_t>(i)] > 0.0) {
            pick = i;
            break;
          }
        }
      }
    }
    if (pick < 0) {  // every remaining point duplicates a centroid
      for (int i = 0; i < n; ++i) {
        if (!seeded[static_cast<std::size_t>(i)]) {
          pick = i;
          break;
        }
      }
    }
    cent.push_back(vectors[static_cast<std::size_t>(pick)]);
    seeded[static_cast<std::size_t>(pick)] = 1;
  }

  std::vector<int> labels(static_cast<std::size_t>(n), -1);
  for (int iter = 0; iter < 500; ++iter) {
    bool changed = false;
    for (int i = 0; i < n; ++i) {
      int best = 0;
      double bestd = (vectors[static_cast<std::size_t>(i)] - cent[0]).squaredNorm();
      for (int j = 1; j < k; ++j) {
        const double d = (vectors[static_cast<std::size_t>(i)] - cent[static_cast<std::size_t>(j)]).squaredNorm();
        if (d < bestd) {
          bestd = d;
          best = j;
        }
      }
      if (labels[static_cast<std::size_t>(i)] != best) {
        labels[static_cast<std::size_t>(i)] = best;
        changed = true;
      }
    }
    if (objective_trace) {
      double obj = 0.0;
      for (int i = 0; i < n; ++i) {
        obj += (vectors[static_cast<std::size_t>(i)] -
                cent[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])]).squaredNorm();
      }
      objective_trace->push_back(obj);
    }
    if (!changed) break;

    std::vector<Eigen::VectorXd> sums(static_cast<std::size_t>(k),
                                      Eigen::VectorXd::Zero(vectors.front().size()));
    std::vector<long> counts(static_cast<std::size_t>(k), 0);
    for (int i = 0; i < n; ++i) {
      sums[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])] += vectors[static_cast<std::size_t>(i)];
      ++counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])];
    }
    for (int j = 0; j < k; ++j) {
      if (counts[static_cast<std::size_t>(j)] > 0) {
        cent[static_cast<std::size_t>(j)] = sums[static_cast<std::size_t>(j)] /
                                            static_cast<double>(counts[static_cast<std::size_t>(j)]);
      }
    }
    // An emptied centroid is re-seated on the point farthest from its own
    // centroid (among clusters that can spare one); its old cost drops to
    // zero at the next assignment, so the objective still never rises.
    std::vector<char> moved(static_cast<std::size_t>(n), 0);
    for (int j = 0; j < k; ++j) {
      if (counts[static_cast<std::size_t>(j)] > 0) continue;
      int far = -1;
      double fard = -1.0;
      for (int i = 0; i < n; ++i) {
        const int owner = labels[static_cast<std::size_t>(i)];
        if (moved[static_cast<std::size_t>(i)] || counts[static_cast<std::size_t>(owner)] < 2) continue;
        const double d = (vectors[static_cast<std::size_t>(i)] -
                          cent[static_cast<std::size_t>(owner)]).squaredNorm();
        if (d > fard) {
          fard = d;
          far = i;
        }
      }
      if (far >= 0) {
        cent[static_cast<std::size_t>(j)] = vectors[static_cast<std::size_t>(far)];
        moved[static_cast<std::size_t>(far)] = 1;
      }
    }
  }
  return labels;
}

LabelVector kmeans(const std::vector<Eigen::VectorXd>& vectors, int k, std::uint64_t seed,
                   int restarts, int direction) {
  const int n = static_cast<int>(vectors.size());
  if (n == 0) throw std::invalid_argument("kmeans: no vectors");
  for (const auto& v : vectors) {
    if (v.size() != vectors.front().size()) {
      throw std::invalid_argument("kmeans: vectors differ in length");
    }
  }
  if (k < 1 || k > n) throw std::invalid_argument("kmeans: k must be in 1..n");
  if (restarts < 1) throw std::invalid_argument("kmeans: restarts must be >= 1");

  std::vector<int> best;
  double best_obj = std::numeric_limits<double>::infinity();
  for (int r = 0; r < restarts; ++r) {
    Rng rng = Rng::for_stream(seed, static_cast<std::uint64_t>(r));
    std::vector<int> labels = kmeans_single(vectors, k, rng, nullptr);
    std::vector<Eigen::VectorXd> sums(static_cast<std::size_t>(k),
                                      Eigen::VectorXd::Zero(vectors.front().size()));
    std::vector<long> counts(static_cast<std::size_t>(k), 0);
    for (int i = 0; i < n; ++i) {
      sums[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])] += vectors[static_cast<std::size_t>(i)];
      ++counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])];
    }
    double obj = 0.0;
    for (int i = 0; i < n; ++i) {
      const int j = labels[static_cast<std::size_t>(i)];
      obj += (vectors[static_cast<std::size_t>(i)] -
              sums[static_cast<std::size_t>(j)] / static_cast<double>(counts[static_cast<std::size_t>(j)]))
                 .squaredNorm();
    }
    if (obj < best_obj) {
      best_obj = obj;
      best = std::move(labels);
    }
  }
  for (int& z : best) ++z;
  canonicalize_labels(best);
  return LabelVector{direction, std::move(best)};
}

LabelVector dbscan(const std::vector<Eigen::VectorXd>& vectors, double eps, int min_pts,
                   int direction) {
  if (vectors.empty()) throw std::invalid_argument("dbscan: no vectors");
  if (!(eps > 0.0)) throw std::invalid_argument("dbscan: eps must be positive");
  if (min_pts < 1) throw std::invalid_argument("dbscan: min_pts must be >= 1");
  const int n = static_cast<int>(vectors.size());
  for (const auto& v : vectors) {
    if (v.size() != vectors.front().size()) {
      throw std::invalid_argument("dbscan: vectors differ in length");
    }
  }

  const double eps2 = eps * eps;
  std::vector<std::vector<int>> nbr(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if ((vectors[static_cast<std::size_t>(i)] - vectors[static_cast<std::size_t>(j)]).squaredNorm() <= eps2) {
        nbr[static_cast<std::size_t>(i)].push_back(j);
      }
    }
  }
  std::vector<char> core(static_cast<std::size_t>(n), 0);
  for (int i = 0; i < n; ++i) {
    core[static_cast<std::size_t>(i)] = static_cast<int>(nbr[static_cast<std::size_t>(i)].size()) >= min_pts;
  }

  std::vector<int> labels(static_cast<std::size_t>(n), 0);
  int next = 0;
  for (int i = 0; i < n; ++i) {
    if (!core[static_cast<std::size_t>(i)] || labels[static_cast<std::size_t>(i)] != 0) continue;
    ++next;
    std::vector<int> stack{i};
    labels[static_cast<std::size_t>(i)] = next;
    while (!stack.empty()) {
      const int p = stack.back();
      stack.pop_back();
      for (int q : nbr[static_cast<std::size_t>(p)]) {
        if (core[static_cast<std::size_t>(q)] && labels[static_cast<std::size_t>(q)] == 0) {
          labels[static_cast<std::size_t>(q)] = next;
          stack.push_back(q);
        }
      }
    }
  }
  // Border points take their nearest core point's cluster (smallest index on
  // ties), which makes the labeling independent of scan order.
  for (int i = 0; i < n; ++i) {
    if (core[static_cast<std::size_t>(i)]) continue;
    int best = -1;
    double bestd = std::numeric_limits<double>::infinity();
    for (int q : nbr[static_cast<std::size_t>(i)]) {
      if (!core[static_cast<std::size_t>(q)]) continue;
      const double d = (vectors[static_cast<std::size_t>(i)] - vectors[static_cast<std::size_t>(q)]).squaredNorm();
      if (d < bestd) {
        bestd = d;
        best = q;
      }
    }
    if (best >= 0) labels[static_cast<std::size_t>(i)] = labels[static_cast<std::size_t>(best)];
  }
  for (int i = 0; i < n; ++i) {
    if (labels[static_cast<std::size_t>(i)] == 0) labels[static_cast<std::size_t>(i)] = ++next;
  }
  canonicalize_labels(labels);
  return LabelVector{direction, std::move(labels)};
}

namespace {

constexpr std::array<double, 4> kDbscanEps{25.0, 50.0, 75.0, 100.0};
constexpr int kDbscanMinPts = 5;

ReplicateRow one_replicate(const DesignSpec& spec, const SamplerConfig& cfg, std::uint64_t seed,
                           int r) {
  ReplicateRow row;
  row.replicate = r + 1;
  try {
    const DesignTruth truth = spec.truth();
    const std::vector<CountTensor> data =
        generate_design(spec, derive_seed(seed, 0x0da7a000ULL + static_cast<std::uint64_t>(r)));
    SamplerConfig run_cfg = cfg;
    run_cfg.seed = derive_seed(seed, 0xc4a10000ULL + static_cast<std::uint64_t>(r));
    GibbsSampler sampler(data, run_cfg);
    const ChainRecord rec = sampler.run();

    for (int e = 0; e < 3; ++e) {
      const int direction = e + 1;
      std::vector<LabelVector> samples;
      samples.reserve(rec.kept().size());
      for (const ModelState& s : rec.kept()) {
        samples.push_back(LabelVector{direction, s.dir[static_cast<std::size_t>(e)].labels});
      }
      const DahlResult dahl = dahl_configuration(samples);
      const int k_dahl = dahl.labels.cluster_count();
      row.rand_index["proposed"][static_cast<std::size_t>(e)] =
          rand_index(dahl.labels, truth.labels[static_cast<std::size_t>(e)]);
      row.cluster_counts["proposed"][static_cast<std::size_t>(e)] = k_dahl;
      row.k_mode[static_cast<std::size_t>(e)] = cluster_number_posterior(rec, direction).mode;

      std::vector<Eigen::VectorXd> margs;
      margs.reserve(data.size());
      for (const CountTensor& t : data) margs.push_back(marginalize(t, direction));

      const LabelVector km =
          kmeans(margs, k_dahl,
                 derive_seed(seed, 0xbead0000ULL + static_cast<std::uint64_t>(r) * 3 +
                                       static_cast<std::uint64_t>(e)),
                 20, direction);
      row.rand_index["kmeans"][static_cast<std::size_t>(e)] =
          rand_index(km, truth.labels[static_cast<std::size_t>(e)]);
      row.cluster_counts["kmeans"][static_cast<std::size_t>(e)] = km.cluster_count();

      for (double eps : kDbscanEps) {
        const LabelVector db = dbscan(margs, eps, kDbscanMinPts, direction);
        const std::string name = "dbscan-" + std::to_string(static_cast<int>(eps));
        row.rand_index[name][static_cast<std::size_t>(e)] =
            rand_index(db, truth.labels[static_cast<std::size_t>(e)]);
        row.cluster_counts[name][static_cast<std::size_t>(e)] = db.cluster_count();
      }
    }
    row.ok = true;
  } catch (const std::exception& ex) {
    row.ok = false;
    row.error = ex.what();
  }
  return row;
}

}  // namespace

ReplicateTable run_replicates(const DesignSpec& spec, int n_rep, const SamplerConfig& cfg,
                              std::uint64_t seed, int threads) {
  if (n_rep < 1) throw std::invalid_argument("run_replicates: n_rep must be >= 1");
  spec.validate();
  cfg.validate();

  ReplicateTable table;
  table.true_k = spec.cluster_counts();
  table.rows.resize(static_cast<std::size_t>(n_rep));

  const int workers = std::max(1, threads);
  if (workers == 1) {
    for (int r = 0; r < n_rep; ++r) {
      table.rows[static_cast<std::size_t>(r)] = one_replicate(spec, cfg, seed, r);
    }
  } else {
    std::atomic<int> cursor{0};
    auto work = [&]() {
      while (true) {
        const int r = cursor.fetch_add(1);
        if (r >= n_rep) break;
        table.rows[static_cast<std::size_t>(r)] = one_replicate(spec, cfg, seed, r);
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  std::vector<std::string> methods{"proposed", "kmeans"};
  for (double eps : kDbscanEps) methods.push_back("dbscan-" + std::to_string(static_cast<int>(eps)));
  for (const std::string& method : methods) {
    for (int e = 0; e < 3; ++e) {
      SummaryRow srow;
      srow.method = method;
      srow.direction = e + 1;
      double sum = 0.0, sumsq = 0.0;
      long ok = 0, correct = 0;
      for (const ReplicateRow& row : table.rows) {
        if (!row.ok) continue;
        const double ri = row.rand_index.at(method)[static_cast<std::size_t>(e)];
        sum += ri;
        sumsq += ri * ri;
        ++ok;
        const int k_est = method == "proposed"
                              ? row.k_mode[static_cast<std::size_t>(e)]
                              : row.cluster_counts.at(method)[static_cast<std::size_t>(e)];
        if (k_est == table.true_k[static_cast<std::size_t>(e)]) ++correct;
      }
      if (ok > 0) {
        srow.mean_ri = sum / static_cast<double>(ok);
        srow.sd_ri = ok > 1 ? std::sqrt(std::max(0.0, (sumsq - sum * sum / static_cast<double>(ok)) /
                                                          static_cast<double>(ok - 1)))
                            : 0.0;
        srow.pct_correct_k = static_cast<double>(correct) / static_cast<double>(ok);
      }
      table.summary.push_back(std::move(srow));
    }
  }
  return table;
}

}  // namespace tensorclust
