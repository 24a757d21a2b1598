#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "ndopt/types.hpp"

namespace ndopt {

enum class RewardKind { ZeroOne, TruncatedLinear };

/// Reward r(y, score). ZeroOne is 1(y score > 0) and is only used for
/// evaluation or level estimation; TruncatedLinear is min(1, y score), the
/// concave 1-Lipschitz surrogate used for gradient steps.
class RewardFn {
 public:
  static RewardFn zero_one();
  /// radius_w * radius_x bounds |score| and hence the magnitude of the reward.
  static RewardFn truncated_linear(double radius_w = 1.0, double radius_x = 1.0);

  RewardKind kind() const noexcept { return kind_; }
  std::optional<double> clip_low() const noexcept { return clip_low_; }

  /// Same reward with values clipped below at `low`.
  RewardFn clipped(double low) const;

  double bound() const noexcept { return bound_; }
  double lipschitz() const noexcept { return lipschitz_; }

  double operator()(int label, double score) const noexcept;

  /// Coefficient c such that c * x is a supergradient in w of r(y, w.x):
  /// y on the active linear piece, 0 on the flat piece. The clip is ignored.
  /// Throws InvalidParameter for ZeroOne.
  double supergradient_coeff(int label, double score) const;

 private:
  RewardFn(RewardKind kind, double bound, double lipschitz)
      : kind_(kind), bound_(bound), lipschitz_(lipschitz) {}

  RewardKind kind_;
  std::optional<double> clip_low_;
  double bound_;
  double lipschitz_;
};

/// eps(t) = t^(-1/4) when enabled, 0 otherwise.
class RegSchedule {
 public:
  RegSchedule() = default;
  explicit RegSchedule(bool enabled) : enabled_(enabled) {}

  bool enabled() const noexcept { return enabled_; }
  double value(std::uint64_t t) const noexcept;

 private:
  bool enabled_ = false;
};

/// (1/p) r(y, w.x) 1(y = +1) + eps(t). Throws InvalidParameter unless
/// 0 < p_hat < 1.
double reward_pos(const RewardFn& r, double p_hat, double score, int label, std::uint64_t t,
                  const RegSchedule& sched);
double reward_pos(const RewardFn& r, double p_hat, const LinearModel& w, const Sample& s,
                  std::uint64_t t, const RegSchedule& sched);

/// (1/(1-p)) r(y, w.x) 1(y = -1) + eps(t).
double reward_neg(const RewardFn& r, double p_hat, double score, int label, std::uint64_t t,
                  const RegSchedule& sched);
double reward_neg(const RewardFn& r, double p_hat, const LinearModel& w, const Sample& s,
                  std::uint64_t t, const RegSchedule& sched);

/// Sparse supergradient y x (or empty) of r(y, w.x) in w, excluding the
/// intercept coordinate whose entry equals supergradient_coeff.
std::vector<Feature> subgradient_w(const RewardFn& r, const LinearModel& w, const Sample& s);

/// `zeroone` or `tlin`.
RewardKind parse_reward_kind(std::string_view token);

}  // namespace ndopt
