#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tensorclust/mfm.hpp"
#include "tensorclust/rng.hpp"
#include "tensorclust/spatial.hpp"
#include "tensorclust/tensor.hpp"

namespace tensorclust {

struct GammaPrior {
  double a = 1.0;  // shape
  double b = 1.0;  // rate
};

struct SamplerConfig {
  int n_iter = 10000;
  int thin = 2;
  int burn_in = 2000;  // in thinned samples; must leave at least one kept sample
  std::uint64_t seed = 1;

  double mh_step_effects = 0.1;
  double mh_step_sigma2 = 0.5;  // on log sigma2
  double mh_step_rho = 0.1;
  // Robbins-Monro adaptation toward 0.3 acceptance during burn-in sweeps,
  // frozen afterwards.
  bool adapt = true;

  // Over-dispersed start: this many components with uniformly assigned
  // labels and moment-matched, jittered effect vectors. Conditional samplers
  // merge surplus clusters far more readily than they split one, so starting
  // above the expected K avoids getting pinned at K = 1.
  int init_components = 5;
  double init_jitter = 0.25;

  // Replace the data term by a constant so the sweep targets the prior;
  // sampler validation mode (prior-recovery checks), not for fitting.
  bool prior_only = false;

  CarForm car_form = CarForm::Literal;
  std::array<MfmConfig, 3> mfm{};
  GammaPrior sigma2_prior{};
  // Per-direction adjacency override; default is the chain graph over that
  // direction's bins (no edges when the direction has a single bin).
  std::array<std::optional<Adjacency>, 3> adjacency{};

  void validate() const;
};

// One direction's block of the chain state. Well-formed means: labels are
// canonical 1..t (first-appearance order) with t == effects.size(), weights
// has exactly k positive entries summing to 1 followed by exact zeros, and
// t <= k <= truncation_T. Every update preserves well-formedness.
struct DirectionState {
  std::vector<int> labels;
  std::vector<Eigen::VectorXd> effects;  // log scale, one per occupied cluster
  Eigen::VectorXd weights;               // length truncation_T
  int k = 1;                             // mixture size including unoccupied components
  CarParams car;

  int occupied() const { return static_cast<int>(effects.size()); }
};

struct ModelState {
  std::array<DirectionState, 3> dir;
  double log_posterior = 0.0;
};

struct ChainRecord {
  std::vector<ModelState> samples;  // every thin-th sweep; n_iter / thin entries
  std::vector<double> log_posterior_trace;
  std::map<std::string, double> acceptance_rates;  // "effects.1", "sigma2.2", "rho.3", ...
  std::uint64_t seed = 0;
  int n_iter = 0;
  int thin = 0;
  int burn_in = 0;

  std::span<const ModelState> kept() const;  // post-burn-in samples
};

// Metropolis-within-Gibbs sampler for the rank-one Poisson tensor model with
// independent mixture-of-finite-mixtures priors per direction. The likelihood
// enters every conditional through per-unit marginal counts and per-cluster
// exp-sums, which is exact for the rank-one mean and keeps a sweep at
// O(n * K * p) per direction instead of O(n * K * p1 * p2 * p3).
class GibbsSampler {
 public:
  GibbsSampler(std::vector<CountTensor> data, SamplerConfig cfg);

  const SamplerConfig& config() const { return cfg_; }
  const Dims& dims() const { return dims_; }
  int n_units() const { return n_; }
  const std::vector<CountTensor>& data() const { return data_; }

  ModelState init_state(Rng& rng);

  // One systematic block each. update_labels redraws every z_i from its full
  // conditional over the k current components, instantiating unoccupied
  // components with fresh prior effect draws (sweep-local auxiliaries), then
  // prunes emptied clusters and re-canonicalizes. update_weights redraws
  // (K, pi) given occupancy counts under the truncated representation.
  void update_labels(ModelState& s, int direction, Rng& rng);
  void update_effects(ModelState& s, int direction, Rng& rng);
  void update_weights(ModelState& s, int direction, Rng& rng);
  void update_car(ModelState& s, int direction, Rng& rng);

  // Full sweep: labels x3, effects x3, weights x3, car x3.
  void sweep(ModelState& s, Rng& rng);

  ChainRecord run();

  // Joint log density of data and state (likelihood + all prior blocks).
  double log_joint(const ModelState& s) const;

  // Normalized conditional label distribution of every unit; requires a state
  // whose effect list covers all k components.
  std::vector<Eigen::VectorXd> label_conditionals(const ModelState& s, int direction) const;

  const RhoBounds& rho_bounds_for(int direction) const;
  const Adjacency& adjacency_for(int direction) const;
  double current_step_effects(int direction) const;
  double current_step_sigma2(int direction) const;
  double current_step_rho(int direction) const;

  // Throws when a state violates the documented invariants.
  void check_state(const ModelState& s) const;

 private:
  struct Counters {
    std::array<long, 3> eff_prop{}, eff_acc{}, sig_prop{}, sig_acc{}, rho_prop{}, rho_acc{};
  };

  Eigen::VectorXd other_scale(const ModelState& s, int e) const;
  void normalize_direction(ModelState& s, int e, const Eigen::MatrixXd& working_effects) const;
  Eigen::VectorXd moment_init(int e, std::span<const int> members) const;
  void adapt_steps(long iter, const Counters& before);

  std::vector<CountTensor> data_;
  SamplerConfig cfg_;
  Dims dims_;
  int n_ = 0;
  std::array<Eigen::MatrixXd, 3> marg_;  // n x p_e marginal counts
  Eigen::VectorXd totals_;
  Eigen::VectorXd logfact_;
  std::array<Adjacency, 3> adj_{Adjacency::none(1), Adjacency::none(1), Adjacency::none(1)};
  std::array<RhoBounds, 3> bounds_{};
  std::array<CarDensity, 3> den_{CarDensity(Adjacency::none(1), CarForm::Literal),
                                 CarDensity(Adjacency::none(1), CarForm::Literal),
                                 CarDensity(Adjacency::none(1), CarForm::Literal)};
  std::array<double, 3> step_eff_{}, step_sig_{}, step_rho_{};
  Counters counters_{};
};

ChainRecord run_chain(const std::vector<CountTensor>& data, const SamplerConfig& cfg);
double log_joint(const ModelState& s, const std::vector<CountTensor>& data,
                 const SamplerConfig& cfg);

}  // namespace tensorclust
