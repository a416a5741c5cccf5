#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace eaparse {

using Color = Eigen::Vector3d;

/// Added to every covariance diagonal; keeps flat color regions non-singular.
inline constexpr double kCovarianceRegularizer = 1e-3;

struct GmmComponent {
  double weight = 0.0;
  Color mean = Color::Zero();
  Eigen::Matrix3d covariance = Eigen::Matrix3d::Identity();
};

/// Gaussian mixture over RGB colors. Components with weight 0 are kept (their
/// slot stays stable across re-estimation) but never contribute likelihood.
class ColorGmm {
 public:
  ColorGmm() = default;
  explicit ColorGmm(std::vector<GmmComponent> components);

  std::size_t size() const noexcept { return components_.size(); }
  const std::vector<GmmComponent>& components() const noexcept { return components_; }

  /// log N(x | mean_k, cov_k), without the mixture weight.
  double component_log_density(std::size_t k, const Color& x) const;

  /// log sum_k w_k N(x | k).
  double log_likelihood(const Color& x) const;

  /// Score used for hard assignment:
  ///   log w_k + log N(x | k) - (eps/2) tr(cov_k^-1).
  /// The trace term is the expected log-density under eps-isotropic jitter of
  /// x; it makes "sample covariance + eps I" the exact re-estimation optimum.
  double assignment_score(std::size_t k, const Color& x) const;

  /// Component with the highest assignment score; ties go to the lowest index.
  std::size_t assign(const Color& x) const;

 private:
  struct Cache {
    Eigen::Matrix3d inverse;
    double log_norm = 0.0;       // -1.5 log(2 pi) - 0.5 log det
    double log_weight = 0.0;
    double jitter_penalty = 0.0;  // (eps/2) tr(cov^-1)
  };

  std::vector<GmmComponent> components_;
  std::vector<Cache> cache_;
};

/// Re-estimates each component from its hard-assigned members. Components
/// without members get weight 0 and keep their previous mean/covariance.
ColorGmm estimate_gmm(std::span<const Color> pixels, std::span<const std::size_t> assignment,
                      const ColorGmm& previous);

/// Classification objective: sum_i max_k assignment_score(k, x_i).
double gmm_objective(const ColorGmm& gmm, std::span<const Color> pixels);

/// Runs assign / re-estimate rounds starting from `start` until no assignment
/// changes or `max_rounds` is reached. The objective is non-decreasing.
ColorGmm refine_gmm(const ColorGmm& start, std::span<const Color> pixels, int max_rounds,
                    std::vector<double>* objective_trace = nullptr);

inline constexpr int kDefaultGmmRounds = 10;

/// k-means++ seeding (deterministic for a fixed seed), nearest-center initial
/// assignment, then refine_gmm. Throws TooFewPixels when pixels.size() < k.
ColorGmm fit_gmm(std::span<const Color> pixels, int k, std::uint64_t rng_seed,
                 int max_rounds = kDefaultGmmRounds,
                 std::vector<double>* objective_trace = nullptr);

}  // namespace eaparse
