#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "tensorclust/rng.hpp"

namespace tensorclust {

// Symmetric 0/1 adjacency with zero diagonal over one direction's bins.
class Adjacency {
 public:
  explicit Adjacency(Eigen::MatrixXd entries);

  // Chain graph over ordered bins (bin i adjacent to i+1); p >= 2.
  static Adjacency path(int p);
  // No edges: direction without spatial structure (e.g. game quarters when
  // treated as unordered, or a single-bin direction).
  static Adjacency none(int p);

  int size() const { return static_cast<int>(w_.rows()); }
  const Eigen::MatrixXd& matrix() const { return w_; }
  bool has_edges() const { return has_edges_; }

 private:
  Eigen::MatrixXd w_;
  bool has_edges_ = false;
};

struct RhoBounds {
  double lo = 0.0;
  double hi = 0.0;
};

// Valid range (1/lambda_min, 1/lambda_max) of the smoothing parameter, from
// the extreme eigenvalues of W. Requires a spectrum with both signs, which
// any adjacency with at least one edge has; errors otherwise.
RhoBounds rho_bounds(const Adjacency& w);

// Zero-mean multivariate normal log density with an explicit covariance,
// evaluated through a Cholesky factorization. Errors if cov is not positive
// definite.
double mvn_logpdf(const Eigen::VectorXd& x, const Eigen::MatrixXd& cov);

// Covariance reading for the cluster-effect prior. Literal takes the model
// statement at face value, Sigma = sigma2 * (I - rho W); Inverse is the
// conventional autoregressive form Sigma = sigma2 * (I - rho W)^{-1}. Both
// are positive definite exactly for rho inside rho_bounds.
enum class CarForm { Literal, Inverse };

struct CarParams {
  double sigma2 = 1.0;
  double rho = 0.0;
  RhoBounds bounds;
};

// Zero-mean MVN with the structured covariance; caches the factorization of
// I - rho W for the current (sigma2, rho) so repeated density evaluations in
// a sweep are cheap.
class CarDensity {
 public:
  // direction_tag only labels error messages (1..3); 0 when untied.
  CarDensity(Adjacency w, CarForm form, int direction_tag = 0);

  // Throws, naming the direction and rho, if I - rho W fails to factor.
  void set(double sigma2, double rho);

  double logpdf(const Eigen::VectorXd& x) const;
  Eigen::VectorXd sample(Rng& rng) const;

  double sigma2() const { return sigma2_; }
  double rho() const { return rho_; }
  int dim() const { return w_.size(); }
  const Adjacency& adjacency() const { return w_; }

 private:
  void require_ready() const;

  Adjacency w_;
  CarForm form_;
  int tag_;
  double sigma2_ = 1.0;
  double rho_ = 0.0;
  bool ready_ = false;
  Eigen::LLT<Eigen::MatrixXd> llt_;  // of A = I - rho W
  double logdet_a_ = 0.0;
};

}  // namespace tensorclust
