#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "mgpf/gaussian.hpp"
#include "mgpf/rng.hpp"

namespace mgpf {

class Rng;

/// How mixture components are interpreted pointwise. Density components are
/// normalized N(x); Exponential components are the unit-peak exponentials the
/// max-norm scheme multiplies.
enum class ComponentForm { kDensity, kExponential };

enum class ProductMode { kNormalized, kExponential };

/// Weighted sum of Gaussians: value(x) = exp(log_mass) * sum_i exp(log_w_i) comp_i(x).
/// log_mass carries the overall scale so reductions can keep unit-sum weights
/// while the unnormalized product stays recoverable.
class GaussianMixture {
 public:
  GaussianMixture(std::vector<Gaussian> components, std::vector<double> log_weights,
                  ComponentForm form = ComponentForm::kDensity, double log_mass = 0.0);

  int size() const { return static_cast<int>(components_.size()); }
  int dim() const { return components_.front().dim(); }
  const Gaussian& component(int i) const { return components_[static_cast<std::size_t>(i)]; }
  const std::vector<Gaussian>& components() const { return components_; }
  const std::vector<double>& log_weights() const { return log_weights_; }
  double log_weight(int i) const { return log_weights_[static_cast<std::size_t>(i)]; }
  ComponentForm form() const { return form_; }
  double log_mass() const { return log_mass_; }
  void set_log_mass(double v) { log_mass_ = v; }

  /// Pointwise value, log-sum-exp accumulated. Never NaN; far tails give 0.
  double evaluate(const Vector& x) const;
  /// log evaluate; -inf when the value underflows to zero.
  double log_evaluate(const Vector& x) const;

  /// Weights rescaled to sum to one; the removed total moves into log_mass.
  /// Throws DegenerateMixtureError when every weight is -inf.
  GaussianMixture normalized() const;

 private:
  std::vector<Gaussian> components_;
  std::vector<double> log_weights_;
  ComponentForm form_;
  double log_mass_;
};

/// The K1*K2 term set of a mixture product before reduction.
struct ProductPlan {
  std::vector<std::pair<int, int>> index_pairs;
  std::vector<double> pair_log_weights;  // log(w_i v_j * pairwise scale)
};

/// Full K1*K2 multiplication. Pair weights include the pairwise scale (c in
/// normalized mode, s in exponential mode). The result is not normalized.
/// Singularity errors are rethrown with the offending (i, j) attached.
std::pair<GaussianMixture, ProductPlan> full_product(const GaussianMixture& a,
                                                     const GaussianMixture& b, ProductMode mode);

/// Draws `count` components i.i.d. with replacement from the plan's
/// normalized pair distribution; each kept with weight 1/count, total plan
/// mass moved into log_mass. Duplicate draws are merged by default (value
/// preserving: weights add).
GaussianMixture sample_product(const ProductPlan& plan, const GaussianMixture& product,
                               int count, Rng& rng, bool merge_duplicates = true);

/// Keeps the `count` largest-weight pairs (ties broken by ascending (i, j)),
/// renormalized to unit weight sum. Output components are in (i, j) order.
GaussianMixture top_k_product(const ProductPlan& plan, const GaussianMixture& product, int count);

/// Moves each component's peak density into its weight; components become
/// unit-peak exponentials. Pointwise values are unchanged.
GaussianMixture max_norm_reweight(const GaussianMixture& m);

/// Inverse of max_norm_reweight's form change: exponential components
/// reinterpreted as densities with compensating weights. Pointwise no-op.
GaussianMixture as_density(const GaussianMixture& m);

/// log(sum exp(v_i)); -inf for an empty or all -inf input.
double log_sum_exp(const std::vector<double>& values);

}  // namespace mgpf
