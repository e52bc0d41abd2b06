#include "tensorclust/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "tensorclust/numeric.hpp"

namespace tensorclust {

namespace {

double reflect_into(double x, double lo, double hi) {
  const double width = hi - lo;
  double y = std::fmod(x - lo, 2.0 * width);
  if (y < 0.0) y += 2.0 * width;
  return lo + (y <= width ? y : 2.0 * width - y);
}

double exp_sum(const Eigen::VectorXd& v) { return v.array().exp().sum(); }

}  // namespace

void SamplerConfig::validate() const {
  if (n_iter < 1) throw std::invalid_argument("SamplerConfig: n_iter must be >= 1");
  if (thin < 1) throw std::invalid_argument("SamplerConfig: thin must be >= 1");
  if (n_iter / thin < 1) throw std::invalid_argument("SamplerConfig: n_iter / thin must be >= 1");
  if (burn_in < 0) throw std::invalid_argument("SamplerConfig: burn_in must be >= 0");
  if (burn_in >= n_iter / thin) {
    throw std::invalid_argument("SamplerConfig: burn_in must leave at least one kept sample");
  }
  if (!(mh_step_effects >= 0.0) || !(mh_step_sigma2 >= 0.0) || !(mh_step_rho >= 0.0)) {
    throw std::invalid_argument("SamplerConfig: MH step sizes must be nonnegative");
  }
  if (init_components < 1) throw std::invalid_argument("SamplerConfig: init_components must be >= 1");
  if (!(init_jitter >= 0.0)) throw std::invalid_argument("SamplerConfig: init_jitter must be >= 0");
  if (!(sigma2_prior.a > 0.0) || !(sigma2_prior.b > 0.0)) {
    throw std::invalid_argument("SamplerConfig: sigma2 prior shape and rate must be positive");
  }
  for (const auto& m : mfm) m.validate();
}

std::span<const ModelState> ChainRecord::kept() const {
  const std::size_t skip = std::min<std::size_t>(static_cast<std::size_t>(burn_in), samples.size());
  return {samples.data() + skip, samples.size() - skip};
}

GibbsSampler::GibbsSampler(std::vector<CountTensor> data, SamplerConfig cfg)
    : data_(std::move(data)), cfg_(std::move(cfg)) {
  cfg_.validate();
  if (data_.empty()) throw std::invalid_argument("GibbsSampler: dataset is empty");
  dims_ = data_.front().dims();
  n_ = static_cast<int>(data_.size());
  for (const auto& t : data_) {
    if (!(t.dims() == dims_)) {
      throw std::invalid_argument("GibbsSampler: unit " + t.unit_id() +
                                  " has mismatched dims; all tensors must share dims");
    }
  }
  totals_.resize(n_);
  logfact_.resize(n_);
  for (int e = 0; e < 3; ++e) {
    const int p = dims_.extent(e + 1);
    marg_[e].resize(n_, p);
    for (int i = 0; i < n_; ++i) marg_[e].row(i) = data_[i].marginal(e + 1).transpose();

    if (cfg_.adjacency[e].has_value()) {
      adj_[e] = *cfg_.adjacency[e];
      if (adj_[e].size() != p) {
        throw std::invalid_argument("GibbsSampler: adjacency override for direction " +
                                    std::to_string(e + 1) + " has wrong size");
      }
    } else {
      adj_[e] = (p >= 2) ? Adjacency::path(p) : Adjacency::none(p);
    }
    // An edgeless direction has no smoothing parameter to identify; rho then
    // enters nothing and wanders its conventional (-1, 1) range.
    bounds_[e] = adj_[e].has_edges() ? rho_bounds(adj_[e]) : RhoBounds{-1.0, 1.0};
    den_[e] = CarDensity(adj_[e], cfg_.car_form, e + 1);
  }
  for (int i = 0; i < n_; ++i) {
    totals_[i] = static_cast<double>(data_[i].grand_total());
    logfact_[i] = data_[i].log_factorial_sum();
  }
  step_eff_ = {cfg_.mh_step_effects, cfg_.mh_step_effects, cfg_.mh_step_effects};
  step_sig_ = {cfg_.mh_step_sigma2, cfg_.mh_step_sigma2, cfg_.mh_step_sigma2};
  step_rho_ = {cfg_.mh_step_rho, cfg_.mh_step_rho, cfg_.mh_step_rho};
}

const RhoBounds& GibbsSampler::rho_bounds_for(int direction) const {
  if (direction < 1 || direction > 3) throw std::invalid_argument("direction must be 1..3");
  return bounds_[direction - 1];
}

const Adjacency& GibbsSampler::adjacency_for(int direction) const {
  if (direction < 1 || direction > 3) throw std::invalid_argument("direction must be 1..3");
  return adj_[direction - 1];
}

double GibbsSampler::current_step_effects(int direction) const { return step_eff_.at(direction - 1); }
double GibbsSampler::current_step_sigma2(int direction) const { return step_sig_.at(direction - 1); }
double GibbsSampler::current_step_rho(int direction) const { return step_rho_.at(direction - 1); }

Eigen::VectorXd GibbsSampler::other_scale(const ModelState& s, int e) const {
  Eigen::VectorXd out = Eigen::VectorXd::Ones(n_);
  for (int o = 0; o < 3; ++o) {
    if (o == e) continue;
    const DirectionState& d = s.dir[o];
    Eigen::VectorXd es(d.effects.size());
    for (std::size_t j = 0; j < d.effects.size(); ++j) es[static_cast<Eigen::Index>(j)] = exp_sum(d.effects[j]);
    for (int i = 0; i < n_; ++i) out[i] *= es[d.labels[i] - 1];
  }
  return out;
}

void GibbsSampler::normalize_direction(ModelState& s, int e,
                                       const Eigen::MatrixXd& working_effects) const {
  DirectionState& d = s.dir[e];
  const int k = d.k;
  std::vector<int> order;  // old component ids in first-appearance order
  std::vector<int> remap(static_cast<std::size_t>(k) + 1, 0);
  for (int& z : d.labels) {
    if (remap[z] == 0) {
      order.push_back(z);
      remap[z] = static_cast<int>(order.size());
    }
    z = remap[z];
  }
  const int t = static_cast<int>(order.size());
  std::vector<Eigen::VectorXd> effects(t);
  for (int j = 0; j < t; ++j) effects[j] = working_effects.col(order[j] - 1);
  d.effects = std::move(effects);
  // Occupied components move to the front with their weights; surviving
  // unoccupied components keep relative order behind them. Total mass and k
  // are unchanged, so the state stays aligned until the next weight redraw.
  Eigen::VectorXd w = Eigen::VectorXd::Zero(d.weights.size());
  int pos = 0;
  for (int j = 0; j < t; ++j) w[pos++] = d.weights[order[j] - 1];
  for (int c = 1; c <= k; ++c) {
    if (remap[c] == 0) w[pos++] = d.weights[c - 1];
  }
  d.weights = w;
}

void GibbsSampler::update_labels(ModelState& s, int direction, Rng& rng) {
  const int e = direction - 1;
  if (e < 0 || e > 2) throw std::invalid_argument("update_labels: direction must be 1..3");
  DirectionState& d = s.dir[e];
  const int k = d.k;
  const int t = d.occupied();
  const int p = dims_.extent(direction);

  Eigen::MatrixXd eff(p, k);
  for (int j = 0; j < t; ++j) eff.col(j) = d.effects[j];
  if (t < k) {
    den_[e].set(d.car.sigma2, d.car.rho);
    for (int j = t; j < k; ++j) eff.col(j) = den_[e].sample(rng);
  }

  Eigen::VectorXd logpi(k);
  for (int j = 0; j < k; ++j) logpi[j] = std::log(d.weights[j]);

  std::vector<double> score(static_cast<std::size_t>(k));
  if (cfg_.prior_only) {
    for (int j = 0; j < k; ++j) score[static_cast<std::size_t>(j)] = logpi[j];
    for (int i = 0; i < n_; ++i) d.labels[i] = rng.categorical_from_log(score) + 1;
  } else {
    Eigen::VectorXd esum(k);
    for (int j = 0; j < k; ++j) esum[j] = exp_sum(eff.col(j));
    const Eigen::VectorXd other = other_scale(s, e);
    for (int i = 0; i < n_; ++i) {
      const Eigen::VectorXd dots = eff.transpose() * marg_[e].row(i).transpose();
      for (int j = 0; j < k; ++j) {
        score[static_cast<std::size_t>(j)] = logpi[j] + dots[j] - other[i] * esum[j];
      }
      d.labels[i] = rng.categorical_from_log(score) + 1;
    }
  }
  normalize_direction(s, e, eff);
}

std::vector<Eigen::VectorXd> GibbsSampler::label_conditionals(const ModelState& s,
                                                              int direction) const {
  const int e = direction - 1;
  if (e < 0 || e > 2) throw std::invalid_argument("label_conditionals: direction must be 1..3");
  const DirectionState& d = s.dir[e];
  if (d.occupied() != d.k) {
    throw std::invalid_argument(
        "label_conditionals: needs a state whose effect list covers all k components");
  }
  const int k = d.k;
  Eigen::VectorXd logpi(k), esum(k);
  for (int j = 0; j < k; ++j) {
    logpi[j] = std::log(d.weights[j]);
    esum[j] = exp_sum(d.effects[static_cast<std::size_t>(j)]);
  }
  const Eigen::VectorXd other = other_scale(s, e);
  std::vector<Eigen::VectorXd> out(static_cast<std::size_t>(n_));
  for (int i = 0; i < n_; ++i) {
    Eigen::VectorXd lw(k);
    for (int j = 0; j < k; ++j) {
      double v = logpi[j];
      if (!cfg_.prior_only) {
        v += marg_[e].row(i).dot(d.effects[static_cast<std::size_t>(j)]) - other[i] * esum[j];
      }
      lw[j] = v;
    }
    const double norm = log_sum_exp(std::span<const double>(lw.data(), static_cast<std::size_t>(k)));
    out[static_cast<std::size_t>(i)] = (lw.array() - norm).exp();
  }
  return out;
}

void GibbsSampler::update_effects(ModelState& s, int direction, Rng& rng) {
  const int e = direction - 1;
  if (e < 0 || e > 2) throw std::invalid_argument("update_effects: direction must be 1..3");
  DirectionState& d = s.dir[e];
  const int t = d.occupied();
  const int p = dims_.extent(direction);
  den_[e].set(d.car.sigma2, d.car.rho);

  Eigen::MatrixXd msum = Eigen::MatrixXd::Zero(p, t);
  Eigen::VectorXd asum = Eigen::VectorXd::Zero(t);
  if (!cfg_.prior_only) {
    const Eigen::VectorXd other = other_scale(s, e);
    for (int i = 0; i < n_; ++i) {
      const int j = d.labels[i] - 1;
      msum.col(j) += marg_[e].row(i).transpose();
      asum[j] += other[i];
    }
  }

  for (int j = 0; j < t; ++j) {
    Eigen::VectorXd& g = d.effects[static_cast<std::size_t>(j)];
    Eigen::VectorXd gp(p);
    for (int q = 0; q < p; ++q) gp[q] = g[q] + step_eff_[e] * rng.normal();
    double delta = den_[e].logpdf(gp) - den_[e].logpdf(g);
    if (!cfg_.prior_only) {
      delta += (gp - g).dot(msum.col(j)) - (exp_sum(gp) - exp_sum(g)) * asum[j];
    }
    ++counters_.eff_prop[e];
    // NaN delta (non-finite proposal evaluation) compares false: reject.
    if (std::log(rng.uniform()) < delta) {
      g = gp;
      ++counters_.eff_acc[e];
    }
  }
}

void GibbsSampler::update_weights(ModelState& s, int direction, Rng& rng) {
  const int e = direction - 1;
  if (e < 0 || e > 2) throw std::invalid_argument("update_weights: direction must be 1..3");
  DirectionState& d = s.dir[e];
  const MfmConfig& m = cfg_.mfm[e];
  const int T = m.truncation_T;
  const int t = d.occupied();
  if (t > T) throw std::runtime_error("update_weights: occupied clusters exceed truncation_T");

  // K | occupancy: p(k) * k_(t) / (nu k)^(n) on t..T. The falling factorial
  // counts the embeddings of t labelled blocks into k components and must be
  // kept once labels are stored canonically.
  std::vector<double> logw(static_cast<std::size_t>(T - t + 1));
  for (int k = t; k <= T; ++k) {
    logw[static_cast<std::size_t>(k - t)] = k_prior_log_pmf(k, m) + log_falling_factorial(k, t) -
                                            log_rising_factorial(m.nu * k, n_);
  }
  const int K = t + rng.categorical_from_log(logw);

  std::vector<double> alpha(static_cast<std::size_t>(K), m.nu);
  for (int i = 0; i < n_; ++i) alpha[static_cast<std::size_t>(d.labels[i] - 1)] += 1.0;
  const Eigen::VectorXd pi = rng.dirichlet(alpha);

  d.weights = Eigen::VectorXd::Zero(T);
  d.weights.head(K) = pi;
  d.k = K;
}

void GibbsSampler::update_car(ModelState& s, int direction, Rng& rng) {
  const int e = direction - 1;
  if (e < 0 || e > 2) throw std::invalid_argument("update_car: direction must be 1..3");
  DirectionState& d = s.dir[e];
  const GammaPrior& pr = cfg_.sigma2_prior;

  den_[e].set(d.car.sigma2, d.car.rho);
  auto prior_sum = [&]() {
    double v = 0.0;
    for (const auto& g : d.effects) v += den_[e].logpdf(g);
    return v;
  };
  double cur = prior_sum();

  // sigma2, random walk on the log scale; the (zp - z) term is the Jacobian.
  {
    const double z = std::log(d.car.sigma2);
    const double zp = z + step_sig_[e] * rng.normal();
    const double s2p = std::exp(zp);
    ++counters_.sig_prop[e];
    double delta = -std::numeric_limits<double>::infinity();
    if (std::isfinite(s2p) && s2p > 0.0) {
      den_[e].set(s2p, d.car.rho);
      delta = prior_sum() - cur + gamma_log_pdf(s2p, pr.a, pr.b) -
              gamma_log_pdf(d.car.sigma2, pr.a, pr.b) + (zp - z);
    }
    if (std::log(rng.uniform()) < delta) {
      d.car.sigma2 = s2p;
      cur = prior_sum();
      ++counters_.sig_acc[e];
    } else {
      den_[e].set(d.car.sigma2, d.car.rho);
    }
  }

  // rho, random walk reflected into the open spectral interval. The flat
  // prior cancels; a proposal that lands on a non-PD boundary point rejects.
  {
    const double rp = reflect_into(d.car.rho + step_rho_[e] * rng.normal(), d.car.bounds.lo,
                                   d.car.bounds.hi);
    ++counters_.rho_prop[e];
    double delta = -std::numeric_limits<double>::infinity();
    try {
      den_[e].set(d.car.sigma2, rp);
      delta = prior_sum() - cur;
    } catch (const std::invalid_argument&) {
      delta = -std::numeric_limits<double>::infinity();
    }
    if (std::log(rng.uniform()) < delta) {
      d.car.rho = rp;
      ++counters_.rho_acc[e];
    } else {
      den_[e].set(d.car.sigma2, d.car.rho);
    }
  }
}

void GibbsSampler::sweep(ModelState& s, Rng& rng) {
  for (int dir = 1; dir <= 3; ++dir) update_labels(s, dir, rng);
  for (int dir = 1; dir <= 3; ++dir) update_effects(s, dir, rng);
  for (int dir = 1; dir <= 3; ++dir) update_weights(s, dir, rng);
  for (int dir = 1; dir <= 3; ++dir) update_car(s, dir, rng);
}

Eigen::VectorXd GibbsSampler::moment_init(int e, std::span<const int> members) const {
  const int p = dims_.extent(e + 1);
  Eigen::VectorXd msum = Eigen::VectorXd::Constant(p, 0.5);
  double tot = 1.0;
  double cnt = 0.0;
  auto add_unit = [&](int i) {
    msum += marg_[e].row(i).transpose();
    tot += totals_[i];
    cnt += 1.0;
  };
  if (members.empty()) {
    for (int i = 0; i < n_; ++i) add_unit(i);
  } else {
    for (int i : members) add_unit(i);
  }
  if (cnt < 1.0) cnt = 1.0;
  // log mean marginal minus (2/3) log mean total: the rank-one identity
  // prod_l sum_d exp(g_l[d]) = total then holds at the starting point.
  return (msum / cnt).array().log().matrix() -
         Eigen::VectorXd::Constant(p, (2.0 / 3.0) * std::log(tot / cnt));
}

ModelState GibbsSampler::init_state(Rng& rng) {
  ModelState s;
  for (int e = 0; e < 3; ++e) {
    DirectionState& d = s.dir[e];
    const MfmConfig& m = cfg_.mfm[e];
    const int T = m.truncation_T;
    const int p = dims_.extent(e + 1);
    d.car.bounds = bounds_[e];
    d.labels.assign(static_cast<std::size_t>(n_), 1);

    if (cfg_.prior_only) {
      d.car.sigma2 = rng.gamma(cfg_.sigma2_prior.a, cfg_.sigma2_prior.b);
      d.car.rho = rng.uniform(bounds_[e].lo, bounds_[e].hi);
      const StickBreaking sb = stick_breaking_sample(m, rng);
      d.k = sb.k;
      d.weights = embed_weights(sb, T);
      Eigen::VectorXd logpi(sb.k);
      for (int j = 0; j < sb.k; ++j) logpi[j] = std::log(sb.pi[j]);
      for (int i = 0; i < n_; ++i) {
        d.labels[i] = rng.categorical_from_log(
                          std::span<const double>(logpi.data(), static_cast<std::size_t>(sb.k))) +
                      1;
      }
      den_[e].set(d.car.sigma2, d.car.rho);
      Eigen::MatrixXd eff(p, d.k);
      for (int j = 0; j < d.k; ++j) eff.col(j) = den_[e].sample(rng);
      normalize_direction(s, e, eff);
    } else {
      const int k0 = std::clamp(cfg_.init_components, 1, T);
      d.k = k0;
      d.weights = Eigen::VectorXd::Zero(T);
      d.weights.head(k0).setConstant(1.0 / k0);
      for (int i = 0; i < n_; ++i) d.labels[i] = rng.uniform_int(1, k0);
      std::vector<std::vector<int>> members(static_cast<std::size_t>(k0));
      for (int i = 0; i < n_; ++i) members[static_cast<std::size_t>(d.labels[i] - 1)].push_back(i);
      Eigen::MatrixXd eff(p, k0);
      for (int j = 0; j < k0; ++j) {
        Eigen::VectorXd g = moment_init(e, members[static_cast<std::size_t>(j)]);
        for (int q = 0; q < p; ++q) g[q] += cfg_.init_jitter * rng.normal();
        eff.col(j) = g;
      }
      d.car.sigma2 = cfg_.sigma2_prior.a / cfg_.sigma2_prior.b;
      d.car.rho = (bounds_[e].lo < 0.0 && bounds_[e].hi > 0.0)
                      ? 0.0
                      : 0.5 * (bounds_[e].lo + bounds_[e].hi);
      normalize_direction(s, e, eff);
    }
  }
  s.log_posterior = log_joint(s);
  return s;
}

void GibbsSampler::check_state(const ModelState& s) const {
  for (int e = 0; e < 3; ++e) {
    const DirectionState& d = s.dir[e];
    const std::string tag = "direction " + std::to_string(e + 1);
    const int T = cfg_.mfm[e].truncation_T;
    const int t = d.occupied();
    if (static_cast<int>(d.labels.size()) != n_) {
      throw std::invalid_argument("state: label count != units in " + tag);
    }
    if (d.k < 1 || d.k > T || t > d.k) {
      throw std::invalid_argument("state: k outside [max(1,t), T] in " + tag);
    }
    if (d.weights.size() != T) throw std::invalid_argument("state: weights length != T in " + tag);
    double sum = 0.0;
    for (int j = 0; j < T; ++j) {
      if (j < d.k) {
        if (!(d.weights[j] > 0.0)) {
          throw std::invalid_argument("state: non-positive active weight in " + tag);
        }
        sum += d.weights[j];
      } else if (d.weights[j] != 0.0) {
        throw std::invalid_argument("state: inactive weight not exactly zero in " + tag);
      }
    }
    if (std::abs(sum - 1.0) > 1e-9) {
      throw std::invalid_argument("state: active weights do not sum to 1 in " + tag);
    }
    std::vector<bool> seen(static_cast<std::size_t>(t), false);
    for (int z : d.labels) {
      if (z < 1 || z > t) throw std::invalid_argument("state: label outside 1..t in " + tag);
      seen[static_cast<std::size_t>(z - 1)] = true;
    }
    for (bool b : seen) {
      if (!b) throw std::invalid_argument("state: unoccupied cluster in effect list in " + tag);
    }
    const int p = dims_.extent(e + 1);
    for (const auto& g : d.effects) {
      if (g.size() != p) throw std::invalid_argument("state: effect length != bins in " + tag);
      if (!g.allFinite()) throw std::invalid_argument("state: non-finite effect in " + tag);
    }
    if (!(d.car.sigma2 > 0.0) || !std::isfinite(d.car.sigma2)) {
      throw std::invalid_argument("state: sigma2 not positive finite in " + tag);
    }
    if (!(d.car.rho > d.car.bounds.lo) || !(d.car.rho < d.car.bounds.hi)) {
      throw std::invalid_argument("state: rho outside its bounds in " + tag);
    }
  }
}

double GibbsSampler::log_joint(const ModelState& s) const {
  check_state(s);
  double lp = 0.0;

  if (!cfg_.prior_only) {
    std::array<Eigen::VectorXd, 3> es;
    for (int e = 0; e < 3; ++e) {
      const auto& effects = s.dir[e].effects;
      es[e].resize(static_cast<Eigen::Index>(effects.size()));
      for (std::size_t j = 0; j < effects.size(); ++j) {
        es[e][static_cast<Eigen::Index>(j)] = exp_sum(effects[j]);
      }
    }
    for (int i = 0; i < n_; ++i) {
      double dots = 0.0;
      double scale = 1.0;
      for (int e = 0; e < 3; ++e) {
        const int j = s.dir[e].labels[static_cast<std::size_t>(i)] - 1;
        dots += marg_[e].row(i).dot(s.dir[e].effects[static_cast<std::size_t>(j)]);
        scale *= es[e][j];
      }
      lp += dots - scale - logfact_[i];
    }
  }

  for (int e = 0; e < 3; ++e) {
    const DirectionState& d = s.dir[e];
    const MfmConfig& m = cfg_.mfm[e];
    CarDensity den(adj_[e], cfg_.car_form, e + 1);
    den.set(d.car.sigma2, d.car.rho);
    for (const auto& g : d.effects) lp += den.logpdf(g);
    lp += gamma_log_pdf(d.car.sigma2, cfg_.sigma2_prior.a, cfg_.sigma2_prior.b);
    lp -= std::log(d.car.bounds.hi - d.car.bounds.lo);
    lp += k_prior_log_pmf(d.k, m);
    lp += log_gamma_fn(d.k * m.nu) - d.k * log_gamma_fn(m.nu);
    if (m.nu != 1.0) {
      for (int j = 0; j < d.k; ++j) lp += (m.nu - 1.0) * std::log(d.weights[j]);
    }
    for (int i = 0; i < n_; ++i) lp += std::log(d.weights[d.labels[static_cast<std::size_t>(i)] - 1]);
  }
  return lp;
}

void GibbsSampler::adapt_steps(long iter, const Counters& before) {
  const double gain = 1.0 / std::pow(static_cast<double>(iter) + 10.0, 0.7);
  constexpr double kTarget = 0.3;
  auto nudge = [&](double& step, long prop, long acc, double lo, double hi) {
    if (prop <= 0) return;
    const double frac = static_cast<double>(acc) / static_cast<double>(prop);
    step = std::clamp(step * std::exp(gain * (frac - kTarget)), lo, hi);
  };
  for (int e = 0; e < 3; ++e) {
    nudge(step_eff_[e], counters_.eff_prop[e] - before.eff_prop[e],
          counters_.eff_acc[e] - before.eff_acc[e], 1e-4, 5.0);
    nudge(step_sig_[e], counters_.sig_prop[e] - before.sig_prop[e],
          counters_.sig_acc[e] - before.sig_acc[e], 1e-4, 5.0);
    const double width = bounds_[e].hi - bounds_[e].lo;
    nudge(step_rho_[e], counters_.rho_prop[e] - before.rho_prop[e],
          counters_.rho_acc[e] - before.rho_acc[e], 1e-6 * width, width);
  }
}

ChainRecord GibbsSampler::run() {
  Rng rng(cfg_.seed);
  counters_ = Counters{};
  step_eff_ = {cfg_.mh_step_effects, cfg_.mh_step_effects, cfg_.mh_step_effects};
  step_sig_ = {cfg_.mh_step_sigma2, cfg_.mh_step_sigma2, cfg_.mh_step_sigma2};
  step_rho_ = {cfg_.mh_step_rho, cfg_.mh_step_rho, cfg_.mh_step_rho};

  ModelState state = init_state(rng);

  ChainRecord rec;
  rec.seed = cfg_.seed;
  rec.n_iter = cfg_.n_iter;
  rec.thin = cfg_.thin;
  rec.burn_in = cfg_.burn_in;
  rec.samples.reserve(static_cast<std::size_t>(cfg_.n_iter / cfg_.thin));

  const long adapt_until = static_cast<long>(cfg_.burn_in) * cfg_.thin;
  for (long iter = 1; iter <= cfg_.n_iter; ++iter) {
    const Counters before = counters_;
    sweep(state, rng);
    if (cfg_.adapt && iter <= adapt_until) adapt_steps(iter, before);
    if (iter % cfg_.thin == 0) {
      state.log_posterior = log_joint(state);
      rec.samples.push_back(state);
      rec.log_posterior_trace.push_back(state.log_posterior);
    }
  }

  auto rate = [](long acc, long prop) {
    return prop > 0 ? static_cast<double>(acc) / static_cast<double>(prop) : 0.0;
  };
  for (int e = 0; e < 3; ++e) {
    const std::string suffix = "." + std::to_string(e + 1);
    rec.acceptance_rates["effects" + suffix] = rate(counters_.eff_acc[e], counters_.eff_prop[e]);
    rec.acceptance_rates["sigma2" + suffix] = rate(counters_.sig_acc[e], counters_.sig_prop[e]);
    rec.acceptance_rates["rho" + suffix] = rate(counters_.rho_acc[e], counters_.rho_prop[e]);
  }
  return rec;
}

ChainRecord run_chain(const std::vector<CountTensor>& data, const SamplerConfig& cfg) {
  GibbsSampler sampler(data, cfg);
  return sampler.run();
}

double log_joint(const ModelState& s, const std::vector<CountTensor>& data,
                 const SamplerConfig& cfg) {
  GibbsSampler sampler(data, cfg);
  return sampler.log_joint(s);
}

}  // namespace tensorclust
