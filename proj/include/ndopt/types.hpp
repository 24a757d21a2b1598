#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace ndopt {

/// (P, N): expected class-conditional rewards. With the 0-1 reward these are
/// exactly TPR and TNR.
struct RatePair {
  double P = 0.0;
  double N = 0.0;
};

struct Feature {
  std::uint32_t index = 0;  // 0-based
  double value = 0.0;

  friend bool operator==(const Feature&, const Feature&) = default;
};

/// One labeled instance. Features are sorted by index without duplicates.
struct Sample {
  std::vector<Feature> features;
  int label = 1;  // -1 or +1

  friend bool operator==(const Sample&, const Sample&) = default;
};

double squared_norm(std::span<const Feature> x);

/// Linear scorer w.x + intercept. The intercept is treated as the weight of
/// an implicit constant feature and takes part in norm computations.
class LinearModel {
 public:
  LinearModel() = default;
  explicit LinearModel(std::size_t dim, double intercept = 0.0)
      : weights_(dim, 0.0), intercept_(intercept) {}
  LinearModel(std::vector<double> weights, double intercept)
      : weights_(std::move(weights)), intercept_(intercept) {}

  std::size_t dim() const noexcept { return weights_.size(); }
  std::span<const double> weights() const noexcept { return weights_; }
  std::span<double> weights() noexcept { return weights_; }
  double intercept() const noexcept { return intercept_; }
  void set_intercept(double b) noexcept { intercept_ = b; }

  /// Features with index >= dim() contribute nothing.
  double score(const Sample& s) const noexcept;

  /// Sign rule with ties going to the negative class.
  int predict(const Sample& s) const noexcept { return score(s) > 0.0 ? 1 : -1; }

  /// this += scale * (x, intercept_feature).
  void add_scaled(std::span<const Feature> x, double intercept_feature, double scale);

  /// Norm of (w, intercept).
  double norm() const noexcept;

  /// Radial projection onto the ball of the given radius.
  void project_to_ball(double radius) noexcept;

  void scale(double factor) noexcept;

  friend bool operator==(const LinearModel&, const LinearModel&) = default;

 private:
  std::vector<double> weights_;
  double intercept_ = 0.0;
};

/// Running uniform average of a sequence of models of a fixed dimension.
class ModelAverager {
 public:
  explicit ModelAverager(std::size_t dim) : sum_(dim, 0.0) {}

  void add(const LinearModel& m);
  std::uint64_t count() const noexcept { return count_; }

  /// Average of everything added so far; the zero model when empty.
  LinearModel average() const;

 private:
  std::vector<double> sum_;
  double intercept_sum_ = 0.0;
  std::uint64_t count_ = 0;
};

}  // namespace ndopt
