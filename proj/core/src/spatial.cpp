#include "tensorclust/spatial.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

namespace tensorclust {

Adjacency::Adjacency(Eigen::MatrixXd entries) : w_(std::move(entries)) {
  if (w_.rows() != w_.cols() || w_.rows() < 1) {
    throw std::invalid_argument("Adjacency: matrix must be square and non-empty");
  }
  for (Eigen::Index i = 0; i < w_.rows(); ++i) {
    if (w_(i, i) != 0.0) throw std::invalid_argument("Adjacency: diagonal must be zero");
    for (Eigen::Index j = 0; j < w_.cols(); ++j) {
      const double v = w_(i, j);
      if (v != 0.0 && v != 1.0) throw std::invalid_argument("Adjacency: entries must be 0 or 1");
      if (v != w_(j, i)) throw std::invalid_argument("Adjacency: matrix must be symmetric");
      if (v == 1.0) has_edges_ = true;
    }
  }
}

Adjacency Adjacency::path(int p) {
  if (p < 2) throw std::invalid_argument("Adjacency::path: needs at least 2 bins");
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(p, p);
  for (int i = 0; i + 1 < p; ++i) {
    w(i, i + 1) = 1.0;
    w(i + 1, i) = 1.0;
  }
  return Adjacency(std::move(w));
}

Adjacency Adjacency::none(int p) {
  if (p < 1) throw std::invalid_argument("Adjacency::none: needs at least 1 bin");
  return Adjacency(Eigen::MatrixXd::Zero(p, p));
}

RhoBounds rho_bounds(const Adjacency& w) {
  if (!w.has_edges()) {
    throw std::invalid_argument(
        "rho_bounds: adjacency has no edges, spectrum is degenerate at zero");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(w.matrix(), Eigen::EigenvaluesOnly);
  const double lo_ev = es.eigenvalues().minCoeff();
  const double hi_ev = es.eigenvalues().maxCoeff();
  // trace(W) = 0 with an edge present forces eigenvalues of both signs; guard
  // against numerical zeros anyway.
  if (!(lo_ev < 0.0) || !(hi_ev > 0.0)) {
    throw std::invalid_argument("rho_bounds: spectrum does not span zero");
  }
  return RhoBounds{1.0 / lo_ev, 1.0 / hi_ev};
}

double mvn_logpdf(const Eigen::VectorXd& x, const Eigen::MatrixXd& cov) {
  const Eigen::Index p = x.size();
  if (cov.rows() != p || cov.cols() != p || p < 1) {
    throw std::invalid_argument("mvn_logpdf: dimension mismatch");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument("mvn_logpdf: covariance is not positive definite");
  }
  double logdet = 0.0;
  const auto& L = llt.matrixLLT();
  for (Eigen::Index i = 0; i < p; ++i) logdet += 2.0 * std::log(L(i, i));
  const double quad = llt.matrixL().solve(x).squaredNorm();
  return -0.5 * (p * std::log(2.0 * std::numbers::pi) + logdet + quad);
}

CarDensity::CarDensity(Adjacency w, CarForm form, int direction_tag)
    : w_(std::move(w)), form_(form), tag_(direction_tag) {}

void CarDensity::set(double sigma2, double rho) {
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) {
    throw std::invalid_argument("CarDensity: sigma2 must be positive and finite");
  }
  const int p = dim();
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(p, p) - rho * w_.matrix();
  llt_.compute(a);
  if (llt_.info() != Eigen::Success) {
    throw std::invalid_argument("CarDensity: I - rho W not positive definite for direction " +
                                std::to_string(tag_) + " at rho = " + std::to_string(rho));
  }
  logdet_a_ = 0.0;
  for (int i = 0; i < p; ++i) logdet_a_ += 2.0 * std::log(llt_.matrixLLT()(i, i));
  sigma2_ = sigma2;
  rho_ = rho;
  ready_ = true;
}

void CarDensity::require_ready() const {
  if (!ready_) throw std::logic_error("CarDensity: set(sigma2, rho) has not been called");
}

double CarDensity::logpdf(const Eigen::VectorXd& x) const {
  require_ready();
  const int p = dim();
  if (x.size() != p) throw std::invalid_argument("CarDensity::logpdf: dimension mismatch");
  const double log2pi = std::log(2.0 * std::numbers::pi);
  if (form_ == CarForm::Literal) {
    // Sigma = sigma2 * A: logdet = p log sigma2 + logdet A, quad via A^{-1}.
    const double quad = llt_.matrixL().solve(x).squaredNorm() / sigma2_;
    return -0.5 * (p * log2pi + p * std::log(sigma2_) + logdet_a_ + quad);
  }
  // Sigma = sigma2 * A^{-1}: logdet flips sign, quad uses A directly.
  const double quad = x.dot((Eigen::MatrixXd::Identity(p, p) - rho_ * w_.matrix()) * x) / sigma2_;
  return -0.5 * (p * log2pi + p * std::log(sigma2_) - logdet_a_ + quad);
}

Eigen::VectorXd CarDensity::sample(Rng& rng) const {
  require_ready();
  const int p = dim();
  Eigen::VectorXd z(p);
  for (int i = 0; i < p; ++i) z[i] = rng.normal();
  const double s = std::sqrt(sigma2_);
  if (form_ == CarForm::Literal) {
    // cov(L z) = A, scaled by sigma2.
    Eigen::VectorXd x = llt_.matrixL() * z;
    x *= s;
    return x;
  }
  // x = s * L^{-T} z has covariance sigma2 * (L L^T)^{-1} = sigma2 * A^{-1}.
  Eigen::VectorXd x = llt_.matrixU().solve(z);
  x *= s;
  return x;
}

}  // namespace tensorclust
