#include "mgpf/gaussian.hpp"

#include <cmath>
#include <string>

namespace mgpf {
namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

Matrix symmetrized(const Matrix& m) { return 0.5 * (m + m.transpose()); }

void require_same_dim(const Gaussian& a, const Gaussian& b, const char* op) {
  if (a.dim() != b.dim()) {
    throw DimensionError(std::string(op) + ": dimension mismatch " + std::to_string(a.dim()) +
                         " vs " + std::to_string(b.dim()));
  }
}

// LDLT with a condition-number guard on the pivots. Throws instead of
// returning a garbage factorization.
Eigen::LDLT<Matrix> guarded_ldlt(const Matrix& m, const char* what) {
  Eigen::LDLT<Matrix> ldlt(m);
  if (ldlt.info() != Eigen::Success) {
    throw SingularityError(std::string(what) + ": factorization failed");
  }
  const Vector d = ldlt.vectorD();
  const double dmax = d.maxCoeff();
  const double dmin = d.minCoeff();
  if (!(dmin > 0.0) || dmax / dmin > kConditionLimit) {
    throw SingularityError(std::string(what) + ": matrix singular or condition number above 1e12");
  }
  return ldlt;
}

double log_det_from_ldlt(const Eigen::LDLT<Matrix>& ldlt) {
  return ldlt.vectorD().array().log().sum();
}

}  // namespace

Gaussian::Gaussian(Vector mean, Matrix cov) : mean_(std::move(mean)), cov_(symmetrized(cov)) {
  if (mean_.size() != cov_.rows() || cov_.rows() != cov_.cols()) {
    throw DimensionError("Gaussian: mean/cov shape mismatch");
  }
  chol_.compute(cov_);
  if (chol_.info() != Eigen::Success) {
    throw SingularityError("Gaussian: covariance not positive definite");
  }
  log_det_cov_ = 2.0 * chol_.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

double Gaussian::log_exponential(const Vector& x) const {
  if (x.size() != mean_.size()) throw DimensionError("Gaussian: evaluation point dimension mismatch");
  const Vector delta = x - mean_;
  const Vector half = chol_.matrixL().solve(delta);
  return -0.5 * half.squaredNorm();
}

double Gaussian::log_density(const Vector& x) const {
  return log_exponential(x) - 0.5 * (dim() * kLog2Pi + log_det_cov_);
}

double Gaussian::log_peak() const { return -0.5 * (dim() * kLog2Pi + log_det_cov_); }

BlockGaussian::BlockGaussian(Gaussian joint, int partition)
    : joint_(std::move(joint)), partition_(partition) {
  if (2 * partition_ != joint_.dim()) {
    throw DimensionError("BlockGaussian: joint dimension must be twice the partition index");
  }
}

namespace {

struct ProductParts {
  Vector mean;
  Matrix cov;
  double log_quad;  // -1/2 (m1-m2)'(S1+S2)^{-1}(m1-m2)
  double log_det_sum;
};

ProductParts product_parts(const Gaussian& a, const Gaussian& b) {
  const Matrix sum = a.cov() + b.cov();
  const auto ldlt = guarded_ldlt(sum, "multiply: Sigma1+Sigma2");

  ProductParts out;
  // S1 (S1+S2)^{-1} S2 == (solve(S1))' S2 since (S1+S2)^{-1} is symmetric.
  out.cov = symmetrized(ldlt.solve(a.cov()).transpose() * b.cov());
  out.mean = b.cov() * ldlt.solve(a.mean()) + a.cov() * ldlt.solve(b.mean());
  const Vector delta = a.mean() - b.mean();
  out.log_quad = -0.5 * delta.dot(ldlt.solve(delta));
  out.log_det_sum = log_det_from_ldlt(ldlt);
  return out;
}

}  // namespace

ScaledGaussian multiply(const Gaussian& a, const Gaussian& b) {
  require_same_dim(a, b, "multiply");
  const ProductParts p = product_parts(a, b);
  const double log_c = -0.5 * (a.dim() * kLog2Pi + p.log_det_sum) + p.log_quad;
  return ScaledGaussian{log_c, Gaussian(p.mean, p.cov)};
}

ScaledGaussian multiply_exponential(const Gaussian& a, const Gaussian& b) {
  require_same_dim(a, b, "multiply_exponential");
  const ProductParts p = product_parts(a, b);
  return ScaledGaussian{p.log_quad, Gaussian(p.mean, p.cov)};
}

Gaussian convolve(const Gaussian& a, const Gaussian& b) {
  require_same_dim(a, b, "convolve");
  return Gaussian(a.mean() + b.mean(), a.cov() + b.cov());
}

CanonicalForm to_canonical(const Gaussian& g) {
  const auto ldlt = guarded_ldlt(g.cov(), "to_canonical: covariance");
  CanonicalForm c;
  c.K = symmetrized(ldlt.solve(Matrix::Identity(g.dim(), g.dim())));
  c.h = ldlt.solve(g.mean());
  c.g = -0.5 * g.mean().dot(c.h) - 0.5 * (g.dim() * kLog2Pi + g.log_det_cov());
  return c;
}

ScaledGaussian from_canonical(const CanonicalForm& c) {
  const auto ldlt = guarded_ldlt(c.K, "from_canonical: K");
  const int d = c.dim();
  const Matrix cov = symmetrized(ldlt.solve(Matrix::Identity(d, d)));
  const Vector mean = ldlt.solve(c.h);
  // g of the normalized Gaussian with these moments; the remainder is scale.
  const double log_det_k = log_det_from_ldlt(ldlt);
  const double g_normalized = -0.5 * mean.dot(c.h) - 0.5 * d * kLog2Pi + 0.5 * log_det_k;
  return ScaledGaussian{c.g - g_normalized, Gaussian(mean, cov)};
}

CanonicalForm canonical_multiply(const CanonicalForm& a, const CanonicalForm& b) {
  if (a.dim() != b.dim()) {
    throw DimensionError("canonical_multiply: dimension mismatch (extend scopes first)");
  }
  return CanonicalForm{a.K + b.K, a.h + b.h, a.g + b.g};
}

CanonicalForm extend_scope(const CanonicalForm& c, int total_dim, int offset) {
  const int d = c.dim();
  if (offset < 0 || offset + d > total_dim) {
    throw DimensionError("extend_scope: block does not fit in target scope");
  }
  CanonicalForm out;
  out.K = Matrix::Zero(total_dim, total_dim);
  out.K.block(offset, offset, d, d) = c.K;
  out.h = Vector::Zero(total_dim);
  out.h.segment(offset, d) = c.h;
  out.g = c.g;
  return out;
}

CanonicalForm canonical_marginalize(const CanonicalForm& c, int keep) {
  const int d = c.dim();
  if (keep <= 0 || keep >= d) throw DimensionError("canonical_marginalize: bad partition index");
  const int dy = d - keep;

  const Matrix kxx = c.K.topLeftCorner(keep, keep);
  const Matrix kxy = c.K.topRightCorner(keep, dy);
  const Matrix kyy = c.K.bottomRightCorner(dy, dy);
  const Vector hx = c.h.head(keep);
  const Vector hy = c.h.tail(dy);

  const auto ldlt = guarded_ldlt(kyy, "canonical_marginalize: K^yy");
  CanonicalForm out;
  out.K = symmetrized(kxx - kxy * ldlt.solve(kxy.transpose()));
  out.h = hx - kxy * ldlt.solve(hy);
  out.g = c.g + 0.5 * (dy * kLog2Pi - log_det_from_ldlt(ldlt) + hy.dot(ldlt.solve(hy)));
  return out;
}

CanonicalForm shift_transition_canonical(const Vector& shift, const Matrix& noise_cov) {
  const int d = static_cast<int>(shift.size());
  const auto ldlt = guarded_ldlt(symmetrized(noise_cov), "shift_transition_canonical: noise cov");
  const Matrix precision = symmetrized(ldlt.solve(Matrix::Identity(d, d)));
  const Vector pu = precision * shift;

  CanonicalForm c;
  c.K = Matrix::Zero(2 * d, 2 * d);
  c.K.topLeftCorner(d, d) = precision;
  c.K.topRightCorner(d, d) = -precision;
  c.K.bottomLeftCorner(d, d) = -precision;
  c.K.bottomRightCorner(d, d) = precision;
  c.h = Vector::Zero(2 * d);
  c.h.head(d) = pu;
  c.h.tail(d) = -pu;
  c.g = -0.5 * shift.dot(pu) - 0.5 * (d * kLog2Pi + log_det_from_ldlt(ldlt));
  return c;
}

ScaledGaussian transition_update(const ScaledGaussian& belief_prev, const CanonicalForm& trans_joint) {
  const int d = belief_prev.gaussian.dim();
  if (trans_joint.dim() != 2 * d) {
    throw DimensionError("transition_update: transition scope must be twice the belief dimension");
  }
  CanonicalForm belief = to_canonical(belief_prev.gaussian);
  belief.g += belief_prev.log_scale;
  // The prior state x' is the trailing block; it is what gets integrated out.
  const CanonicalForm extended = extend_scope(belief, 2 * d, d);
  const CanonicalForm product = canonical_multiply(extended, trans_joint);
  return from_canonical(canonical_marginalize(product, d));
}

ScaledGaussian transition_update_general(const ScaledGaussian& belief_prev, const BlockGaussian& trans) {
  return transition_update(belief_prev, to_canonical(trans.joint()));
}

}  // namespace mgpf
