#include "ndopt/rewards.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ndopt/errors.hpp"

namespace ndopt {
namespace {

void check_prior(double p_hat) {
  if (!(p_hat > 0.0 && p_hat < 1.0)) throw InvalidParameter("class prior must lie in (0, 1)");
}

}  // namespace

RewardFn RewardFn::zero_one() { return RewardFn(RewardKind::ZeroOne, 1.0, 0.0); }

RewardFn RewardFn::truncated_linear(double radius_w, double radius_x) {
  if (!(radius_w > 0.0) || !(radius_x > 0.0)) throw InvalidParameter("radii must be positive");
  return RewardFn(RewardKind::TruncatedLinear, std::max(1.0, radius_w * radius_x), 1.0);
}

RewardFn RewardFn::clipped(double low) const {
  RewardFn out = *this;
  out.clip_low_ = low;
  return out;
}

double RewardFn::operator()(int label, double score) const noexcept {
  const double margin = label * score;
  double r = kind_ == RewardKind::ZeroOne ? (margin > 0.0 ? 1.0 : 0.0) : std::min(1.0, margin);
  if (clip_low_) r = std::max(r, *clip_low_);
  return r;
}

double RewardFn::supergradient_coeff(int label, double score) const {
  if (kind_ != RewardKind::TruncatedLinear) {
    throw InvalidParameter("0-1 reward has no useful supergradient");
  }
  return label * score < 1.0 ? static_cast<double>(label) : 0.0;
}

double RegSchedule::value(std::uint64_t t) const noexcept {
  if (!enabled_) return 0.0;
  return std::pow(static_cast<double>(std::max<std::uint64_t>(t, 1)), -0.25);
}

double reward_pos(const RewardFn& r, double p_hat, double score, int label, std::uint64_t t,
                  const RegSchedule& sched) {
  check_prior(p_hat);
  const double base = label > 0 ? r(label, score) / p_hat : 0.0;
  return base + sched.value(t);
}

double reward_pos(const RewardFn& r, double p_hat, const LinearModel& w, const Sample& s,
                  std::uint64_t t, const RegSchedule& sched) {
  return reward_pos(r, p_hat, w.score(s), s.label, t, sched);
}

double reward_neg(const RewardFn& r, double p_hat, double score, int label, std::uint64_t t,
                  const RegSchedule& sched) {
  check_prior(p_hat);
  const double base = label < 0 ? r(label, score) / (1.0 - p_hat) : 0.0;
  return base + sched.value(t);
}

double reward_neg(const RewardFn& r, double p_hat, const LinearModel& w, const Sample& s,
                  std::uint64_t t, const RegSchedule& sched) {
  return reward_neg(r, p_hat, w.score(s), s.label, t, sched);
}

std::vector<Feature> subgradient_w(const RewardFn& r, const LinearModel& w, const Sample& s) {
  const double c = r.supergradient_coeff(s.label, w.score(s));
  std::vector<Feature> g;
  if (c == 0.0) return g;
  g.reserve(s.features.size());
  for (const auto& f : s.features) g.push_back({f.index, c * f.value});
  return g;
}

RewardKind parse_reward_kind(std::string_view token) {
  if (token == "zeroone") return RewardKind::ZeroOne;
  if (token == "tlin") return RewardKind::TruncatedLinear;
  throw InvalidParameter("unknown reward '" + std::string(token) + "'");
}

}  // namespace ndopt
