#pragma once

#include <Eigen/Dense>

#include "mgpf/errors.hpp"

namespace mgpf {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Condition numbers above this trip a SingularityError instead of
/// producing garbage results.
constexpr double kConditionLimit = 1e12;

/// Normalized multivariate normal density. The covariance is symmetrized on
/// construction and must be positive definite.
class Gaussian {
 public:
  Gaussian(Vector mean, Matrix cov);

  int dim() const { return static_cast<int>(mean_.size()); }
  const Vector& mean() const { return mean_; }
  const Matrix& cov() const { return cov_; }

  double log_det_cov() const { return log_det_cov_; }

  /// log N(x; mean, cov)
  double log_density(const Vector& x) const;
  double density(const Vector& x) const { return std::exp(log_density(x)); }

  /// Unnormalized exponential component: -1/2 (x-mu)' Sigma^-1 (x-mu).
  double log_exponential(const Vector& x) const;

  /// log of the peak density, -(d/2) log(2 pi) - 1/2 log det cov.
  double log_peak() const;

 private:
  Vector mean_;
  Matrix cov_;
  Eigen::LLT<Matrix> chol_;
  double log_det_cov_;
};

/// exp(log_scale) * N(x; gaussian). Scales are carried in log space; the
/// plain constants underflow within a few filter steps in d >= 3.
struct ScaledGaussian {
  double log_scale;
  Gaussian gaussian;

  double value(const Vector& x) const { return std::exp(log_scale + gaussian.log_density(x)); }
};

/// Information-form exponential exp(-1/2 x'Kx + h'x + g).
struct CanonicalForm {
  Matrix K;
  Vector h;
  double g = 0.0;

  int dim() const { return static_cast<int>(h.size()); }
  double log_value(const Vector& x) const { return -0.5 * x.dot(K * x) + h.dot(x) + g; }
  double value(const Vector& x) const { return std::exp(log_value(x)); }
};

/// Joint Gaussian over stacked (x, x') with partition index d = dim(x).
class BlockGaussian {
 public:
  BlockGaussian(Gaussian joint, int partition);

  const Gaussian& joint() const { return joint_; }
  int partition() const { return partition_; }

  Vector mean_x() const { return joint_.mean().head(partition_); }
  Vector mean_xp() const { return joint_.mean().tail(partition_); }
  Matrix cov_xx() const { return joint_.cov().topLeftCorner(partition_, partition_); }
  Matrix cov_xxp() const { return joint_.cov().topRightCorner(partition_, partition_); }
  Matrix cov_xpxp() const { return joint_.cov().bottomRightCorner(partition_, partition_); }

 private:
  Gaussian joint_;
  int partition_;
};

/// N1 * N2 = c N3 with c = (2pi)^{-d/2} det(S1+S2)^{-1/2}
/// exp(-1/2 (m1-m2)'(S1+S2)^{-1}(m1-m2)), S3 = S1 (S1+S2)^{-1} S2.
ScaledGaussian multiply(const Gaussian& a, const Gaussian& b);

/// Product of the unnormalized exponentials: same mean/cov as multiply, scale
/// s = exp(-1/2 (m1-m2)'(S1+S2)^{-1}(m1-m2)).
ScaledGaussian multiply_exponential(const Gaussian& a, const Gaussian& b);

/// Gaussian convolution: N(m1+m2, S1+S2).
Gaussian convolve(const Gaussian& a, const Gaussian& b);

/// K = Sigma^-1, h = K mu, g = -1/2 mu'h - d/2 log 2pi - 1/2 log det Sigma.
CanonicalForm to_canonical(const Gaussian& g);

/// Inverse map. The returned log_scale makes exp(g) bookkeeping lossless:
/// C(x) == exp(log_scale) N(x; mean, cov). K must be positive definite.
ScaledGaussian from_canonical(const CanonicalForm& c);

/// Componentwise sum; callers extend scopes first when dimensions differ.
CanonicalForm canonical_multiply(const CanonicalForm& a, const CanonicalForm& b);

/// Zero-pad K and h into a larger scope, placing the form's variables at
/// `offset`. g is unchanged.
CanonicalForm extend_scope(const CanonicalForm& c, int total_dim, int offset);

/// Integrate out the trailing dim-keep variables. The trailing K block must
/// be positive definite.
CanonicalForm canonical_marginalize(const CanonicalForm& c, int keep);

/// Canonical form over (x, x') of the additive motion model
/// N(x; x' + shift, noise_cov). Singular as a joint; only valid inside the
/// transition pipeline where the belief block makes it integrable.
CanonicalForm shift_transition_canonical(const Vector& shift, const Matrix& noise_cov);

/// One transition term: integrates belief(x') * trans(x, x') over x' through
/// the canonical pipeline. `trans_joint` is the canonical form of the
/// transition component over stacked (x, x').
ScaledGaussian transition_update(const ScaledGaussian& belief_prev, const CanonicalForm& trans_joint);

/// Same update for a proper joint-Gaussian transition component.
ScaledGaussian transition_update_general(const ScaledGaussian& belief_prev, const BlockGaussian& trans);

}  // namespace mgpf
