#include "mgpf/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <string>

namespace mgpf {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kLog2Pi = 1.8378770664093454836;
}  // namespace

double log_sum_exp(const std::vector<double>& values) {
  double peak = kNegInf;
  for (double v : values) peak = std::max(peak, v);
  if (!std::isfinite(peak)) return kNegInf;
  double acc = 0.0;
  for (double v : values) acc += std::exp(v - peak);
  return peak + std::log(acc);
}

GaussianMixture::GaussianMixture(std::vector<Gaussian> components, std::vector<double> log_weights,
                                 ComponentForm form, double log_mass)
    : components_(std::move(components)),
      log_weights_(std::move(log_weights)),
      form_(form),
      log_mass_(log_mass) {
  if (components_.empty()) throw DimensionError("GaussianMixture: needs at least one component");
  if (components_.size() != log_weights_.size()) {
    throw DimensionError("GaussianMixture: component/weight count mismatch");
  }
  const int d = components_.front().dim();
  for (const auto& c : components_) {
    if (c.dim() != d) throw DimensionError("GaussianMixture: mixed component dimensions");
  }
}

double GaussianMixture::log_evaluate(const Vector& x) const {
  std::vector<double> terms(components_.size());
  for (std::size_t i = 0; i < components_.size(); ++i) {
    const double comp = form_ == ComponentForm::kDensity ? components_[i].log_density(x)
                                                         : components_[i].log_exponential(x);
    terms[i] = log_weights_[i] + comp;
  }
  const double lse = log_sum_exp(terms);
  return std::isfinite(lse) ? log_mass_ + lse : kNegInf;
}

double GaussianMixture::evaluate(const Vector& x) const {
  const double lv = log_evaluate(x);
  return std::isfinite(lv) ? std::exp(lv) : 0.0;
}

GaussianMixture GaussianMixture::normalized() const {
  const double total = log_sum_exp(log_weights_);
  if (!std::isfinite(total)) throw DegenerateMixtureError("normalize: all weights are -inf");
  std::vector<double> w(log_weights_);
  for (double& v : w) v -= total;
  return GaussianMixture(components_, std::move(w), form_, log_mass_ + total);
}

std::pair<GaussianMixture, ProductPlan> full_product(const GaussianMixture& a,
                                                     const GaussianMixture& b, ProductMode mode) {
  if (a.dim() != b.dim()) throw DimensionError("full_product: dimension mismatch");

  ProductPlan plan;
  plan.index_pairs.reserve(static_cast<std::size_t>(a.size()) * b.size());
  plan.pair_log_weights.reserve(plan.index_pairs.capacity());
  std::vector<Gaussian> comps;
  comps.reserve(plan.index_pairs.capacity());

  for (int i = 0; i < a.size(); ++i) {
    for (int j = 0; j < b.size(); ++j) {
      try {
        ScaledGaussian term = mode == ProductMode::kNormalized
                                  ? multiply(a.component(i), b.component(j))
                                  : multiply_exponential(a.component(i), b.component(j));
        plan.index_pairs.emplace_back(i, j);
        plan.pair_log_weights.push_back(a.log_weight(i) + b.log_weight(j) + term.log_scale);
        comps.push_back(std::move(term.gaussian));
      } catch (const SingularityError& err) {
        throw SingularityError("full_product pair (" + std::to_string(i) + ", " +
                               std::to_string(j) + "): " + err.what());
      }
    }
  }

  const ComponentForm form =
      mode == ProductMode::kNormalized ? ComponentForm::kDensity : ComponentForm::kExponential;
  GaussianMixture product(std::move(comps), plan.pair_log_weights, form,
                          a.log_mass() + b.log_mass());
  return {std::move(product), std::move(plan)};
}

GaussianMixture sample_product(const ProductPlan& plan, const GaussianMixture& product, int count,
                               Rng& rng, bool merge_duplicates) {
  if (count < 1) throw DimensionError("sample_product: count must be >= 1");
  const double total = log_sum_exp(plan.pair_log_weights);
  if (!std::isfinite(total)) throw DegenerateMixtureError("sample_product: degenerate plan");

  std::vector<double> cumulative(plan.pair_log_weights.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < cumulative.size(); ++i) {
    acc += std::exp(plan.pair_log_weights[i] - total);
    cumulative[i] = acc;
  }
  cumulative.back() = 1.0;

  std::map<int, int> draw_counts;  // ordered: deterministic output layout
  std::vector<int> draws;
  draws.reserve(static_cast<std::size_t>(count));
  for (int r = 0; r < count; ++r) {
    const double u = rng.uniform();
    const auto it = std::lower_bound(cumulative.begin(), cumulative.end(), u);
    const int idx = static_cast<int>(it - cumulative.begin());
    draws.push_back(idx);
    ++draw_counts[idx];
  }

  std::vector<Gaussian> comps;
  std::vector<double> weights;
  if (merge_duplicates) {
    comps.reserve(draw_counts.size());
    weights.reserve(draw_counts.size());
    for (const auto& [idx, n] : draw_counts) {
      comps.push_back(product.component(idx));
      weights.push_back(std::log(static_cast<double>(n)) - std::log(static_cast<double>(count)));
    }
  } else {
    comps.reserve(draws.size());
    weights.reserve(draws.size());
    for (int idx : draws) {
      comps.push_back(product.component(idx));
      weights.push_back(-std::log(static_cast<double>(count)));
    }
  }
  return GaussianMixture(std::move(comps), std::move(weights), product.form(),
                         product.log_mass() + total);
}

GaussianMixture top_k_product(const ProductPlan& plan, const GaussianMixture& product, int count) {
  if (count < 1) throw DimensionError("top_k_product: count must be >= 1");
  const int n = static_cast<int>(plan.pair_log_weights.size());

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  // Plan pairs are generated in ascending (i, j) order, so a stable sort by
  // weight realizes the lexicographic tie-break.
  std::stable_sort(order.begin(), order.end(), [&](int lhs, int rhs) {
    return plan.pair_log_weights[static_cast<std::size_t>(lhs)] >
           plan.pair_log_weights[static_cast<std::size_t>(rhs)];
  });
  order.resize(static_cast<std::size_t>(std::min(count, n)));
  std::sort(order.begin(), order.end());  // emit kept pairs back in (i, j) order

  std::vector<double> kept_weights;
  kept_weights.reserve(order.size());
  for (int idx : order) kept_weights.push_back(plan.pair_log_weights[static_cast<std::size_t>(idx)]);
  const double total = log_sum_exp(kept_weights);
  if (!std::isfinite(total)) throw DegenerateMixtureError("top_k_product: degenerate plan");

  std::vector<Gaussian> comps;
  comps.reserve(order.size());
  for (int idx : order) comps.push_back(product.component(idx));
  for (double& w : kept_weights) w -= total;
  return GaussianMixture(std::move(comps), std::move(kept_weights), product.form(),
                         product.log_mass() + total);
}

GaussianMixture max_norm_reweight(const GaussianMixture& m) {
  if (m.form() != ComponentForm::kDensity) return m;
  std::vector<double> weights(m.log_weights());
  for (int i = 0; i < m.size(); ++i) {
    weights[static_cast<std::size_t>(i)] += m.component(i).log_peak();
  }
  return GaussianMixture(m.components(), std::move(weights), ComponentForm::kExponential,
                         m.log_mass());
}

GaussianMixture as_density(const GaussianMixture& m) {
  if (m.form() != ComponentForm::kExponential) return m;
  std::vector<double> weights(m.log_weights());
  for (int i = 0; i < m.size(); ++i) {
    const auto& c = m.component(i);
    weights[static_cast<std::size_t>(i)] += 0.5 * (c.dim() * kLog2Pi + c.log_det_cov());
  }
  return GaussianMixture(m.components(), std::move(weights), ComponentForm::kDensity,
                         m.log_mass());
}

}  // namespace mgpf
