#include "ndopt/types.hpp"

#include <cmath>

namespace ndopt {

double squared_norm(std::span<const Feature> x) {
  double s = 0.0;
  for (const auto& f : x) s += f.value * f.value;
  return s;
}

double LinearModel::score(const Sample& s) const noexcept {
  double acc = intercept_;
  for (const auto& f : s.features) {
    if (f.index < weights_.size()) acc += weights_[f.index] * f.value;
  }
  return acc;
}

void LinearModel::add_scaled(std::span<const Feature> x, double intercept_feature,
                             double scale) {
  for (const auto& f : x) {
    if (f.index >= weights_.size()) weights_.resize(f.index + 1, 0.0);
    weights_[f.index] += scale * f.value;
  }
  intercept_ += scale * intercept_feature;
}

double LinearModel::norm() const noexcept {
  double s = intercept_ * intercept_;
  for (double w : weights_) s += w * w;
  return std::sqrt(s);
}

void LinearModel::project_to_ball(double radius) noexcept {
  const double n = norm();
  if (n > radius && n > 0.0) scale(radius / n);
}

void LinearModel::scale(double factor) noexcept {
  for (double& w : weights_) w *= factor;
  intercept_ *= factor;
}

void ModelAverager::add(const LinearModel& m) {
  if (m.dim() > sum_.size()) sum_.resize(m.dim(), 0.0);
  const auto w = m.weights();
  for (std::size_t i = 0; i < w.size(); ++i) sum_[i] += w[i];
  intercept_sum_ += m.intercept();
  ++count_;
}

LinearModel ModelAverager::average() const {
  if (count_ == 0) return LinearModel(sum_.size());
  const double inv = 1.0 / static_cast<double>(count_);
  std::vector<double> w(sum_.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = sum_[i] * inv;
  return LinearModel(std::move(w), intercept_sum_ * inv);
}

}  // namespace ndopt
