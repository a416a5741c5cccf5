#include "eaparse/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "eaparse/error.hpp"
#include "eaparse/rng.hpp"

namespace eaparse {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
const double kHalfLog2Pi3 = 1.5 * std::log(2.0 * std::numbers::pi);

}  // namespace

ColorGmm::ColorGmm(std::vector<GmmComponent> components) : components_(std::move(components)) {
  if (components_.empty()) fail(Errc::InvalidArgument, "a GMM needs at least one component");
  double weight_sum = 0.0;
  cache_.resize(components_.size());
  for (std::size_t k = 0; k < components_.size(); ++k) {
    const auto& comp = components_[k];
    if (!(comp.weight >= 0.0)) fail(Errc::InvalidArgument, "negative GMM weight");
    weight_sum += comp.weight;
    Eigen::LLT<Eigen::Matrix3d> llt(comp.covariance);
    if (llt.info() != Eigen::Success) {
      fail(Errc::InvalidArgument, "GMM covariance " + std::to_string(k) + " is not SPD");
    }
    const Eigen::Matrix3d lower = llt.matrixL();
    const double log_det = 2.0 * lower.diagonal().array().log().sum();
    auto& c = cache_[k];
    c.inverse = llt.solve(Eigen::Matrix3d::Identity());
    c.log_norm = -kHalfLog2Pi3 - 0.5 * log_det;
    c.log_weight = comp.weight > 0.0 ? std::log(comp.weight) : kNegInf;
    c.jitter_penalty = 0.5 * kCovarianceRegularizer * c.inverse.trace();
  }
  if (std::abs(weight_sum - 1.0) > 1e-9) {
    fail(Errc::InvalidArgument, "GMM weights sum to " + std::to_string(weight_sum));
  }
}

double ColorGmm::component_log_density(std::size_t k, const Color& x) const {
  const Color d = x - components_[k].mean;
  return cache_[k].log_norm - 0.5 * d.dot(cache_[k].inverse * d);
}

double ColorGmm::log_likelihood(const Color& x) const {
  double best = kNegInf;
  thread_local std::vector<double> terms;
  terms.assign(components_.size(), kNegInf);
  for (std::size_t k = 0; k < components_.size(); ++k) {
    if (components_[k].weight <= 0.0) continue;
    terms[k] = cache_[k].log_weight + component_log_density(k, x);
    best = std::max(best, terms[k]);
  }
  double sum = 0.0;
  for (double t : terms) {
    if (t != kNegInf) sum += std::exp(t - best);
  }
  return best + std::log(sum);
}

double ColorGmm::assignment_score(std::size_t k, const Color& x) const {
  if (components_[k].weight <= 0.0) return kNegInf;
  return cache_[k].log_weight + component_log_density(k, x) - cache_[k].jitter_penalty;
}

std::size_t ColorGmm::assign(const Color& x) const {
  std::size_t best_k = 0;
  double best = kNegInf;
  for (std::size_t k = 0; k < components_.size(); ++k) {
    const double s = assignment_score(k, x);
    if (s > best) {
      best = s;
      best_k = k;
    }
  }
  return best_k;
}

ColorGmm estimate_gmm(std::span<const Color> pixels, std::span<const std::size_t> assignment,
                      const ColorGmm& previous) {
  const std::size_t k_count = previous.size();
  std::vector<std::size_t> counts(k_count, 0);
  std::vector<Color> sums(k_count, Color::Zero());
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    ++counts[assignment[i]];
    sums[assignment[i]] += pixels[i];
  }
  std::vector<GmmComponent> comps = previous.components();
  std::vector<Eigen::Matrix3d> scatter(k_count, Eigen::Matrix3d::Zero());
  for (std::size_t k = 0; k < k_count; ++k) {
    if (counts[k] > 0) comps[k].mean = sums[k] / static_cast<double>(counts[k]);
  }
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    const std::size_t k = assignment[i];
    const Color d = pixels[i] - comps[k].mean;
    scatter[k] += d * d.transpose();
  }
  const double total = static_cast<double>(pixels.size());
  for (std::size_t k = 0; k < k_count; ++k) {
    if (counts[k] == 0) {
      comps[k].weight = 0.0;
      continue;
    }
    comps[k].weight = static_cast<double>(counts[k]) / total;
    comps[k].covariance = scatter[k] / static_cast<double>(counts[k]) +
                          kCovarianceRegularizer * Eigen::Matrix3d::Identity();
  }
  return ColorGmm(std::move(comps));
}

double gmm_objective(const ColorGmm& gmm, std::span<const Color> pixels) {
  double sum = 0.0;
  for (const auto& x : pixels) sum += gmm.assignment_score(gmm.assign(x), x);
  return sum;
}

ColorGmm refine_gmm(const ColorGmm& start, std::span<const Color> pixels, int max_rounds,
                    std::vector<double>* objective_trace) {
  ColorGmm model = start;
  if (objective_trace != nullptr) objective_trace->push_back(gmm_objective(model, pixels));
  std::vector<std::size_t> assignment(pixels.size());
  std::vector<std::size_t> previous;
  for (int round = 0; round < max_rounds; ++round) {
    for (std::size_t i = 0; i < pixels.size(); ++i) assignment[i] = model.assign(pixels[i]);
    // Same members would reproduce the same parameters.
    if (assignment == previous) break;
    model = estimate_gmm(pixels, assignment, model);
    if (objective_trace != nullptr) objective_trace->push_back(gmm_objective(model, pixels));
    previous = assignment;
  }
  return model;
}

ColorGmm fit_gmm(std::span<const Color> pixels, int k, std::uint64_t rng_seed, int max_rounds,
                 std::vector<double>* objective_trace) {
  if (k < 1) fail(Errc::InvalidArgument, "component count must be >= 1");
  if (pixels.size() < static_cast<std::size_t>(k)) {
    fail(Errc::TooFewPixels, std::to_string(pixels.size()) + " pixels for " + std::to_string(k) +
                                 " components");
  }
  const std::size_t n = pixels.size();
  const auto k_count = static_cast<std::size_t>(k);
  Rng rng(rng_seed);

  // k-means++ seeding.
  std::vector<Color> centers;
  centers.reserve(k_count);
  centers.push_back(pixels[rng.below(n)]);
  std::vector<double> nearest(n);
  for (std::size_t i = 0; i < n; ++i) nearest[i] = (pixels[i] - centers[0]).squaredNorm();
  while (centers.size() < k_count) {
    double total = 0.0;
    for (double d : nearest) total += d;
    std::size_t pick = n - 1;
    if (total > 0.0) {
      const double target = rng.uniform() * total;
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        acc += nearest[i];
        if (acc > target) {
          pick = i;
          break;
        }
      }
    } else {
      pick = rng.below(n);
    }
    centers.push_back(pixels[pick]);
    for (std::size_t i = 0; i < n; ++i) {
      nearest[i] = std::min(nearest[i], (pixels[i] - centers.back()).squaredNorm());
    }
  }

  std::vector<std::size_t> assignment(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t best = 0;
    double best_d = (pixels[i] - centers[0]).squaredNorm();
    for (std::size_t c = 1; c < k_count; ++c) {
      const double d = (pixels[i] - centers[c]).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = c;
      }
    }
    assignment[i] = best;
  }

  std::vector<GmmComponent> placeholder(k_count);
  placeholder[0].weight = 1.0;
  for (std::size_t c = 0; c < k_count; ++c) placeholder[c].mean = centers[c];
  const ColorGmm initial = estimate_gmm(pixels, assignment, ColorGmm(std::move(placeholder)));
  return refine_gmm(initial, pixels, max_rounds, objective_trace);
}

}  // namespace eaparse
