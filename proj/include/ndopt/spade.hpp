#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ndopt/measures_concave.hpp"
#include "ndopt/rewards.hpp"
#include "ndopt/trace.hpp"
#include "ndopt/types.hpp"

namespace ndopt {

struct SpadeConfig {
  std::size_t passes = 25;
  double radius_w = 100.0;
  std::uint64_t seed = 0;
  /// Multipliers on the 1/sqrt(t) primal and dual step sizes.
  double primal_scale = 1.0;
  double dual_scale = 1.0;
  /// Adds eps(t) = t^(-1/4) to both rewards and ties the G-mean dual radius
  /// to sqrt(1 / eps(t)).
  bool regularize = false;
  /// G-mean dual radius used when regularization is off.
  double gmean_cap = 10.0;
  bool fit_intercept = true;
  /// 0 picks checkpoint_interval(n).
  std::uint64_t checkpoint_every = 0;
  bool timing = true;
};

/// Stochastic primal-dual solver state for one concave measure.
///
/// Each sample takes one projected supergradient ascent step on the
/// dual-weighted reward in w, then one projected descent step on the dual
/// pair, whose stochastic gradient is (r+ - dPsi*/dalpha, r- - dPsi*/dbeta).
/// `reward` supplies the values r+ and r- of the dual step; the primal step
/// always follows the truncated-linear surrogate.
class SpadeSolver {
 public:
  SpadeSolver(ConcaveMeasure measure, RewardFn reward, double p_hat, std::size_t dim,
              SpadeConfig config);

  void step(const Sample& s);

  /// Samples consumed so far.
  std::uint64_t t() const noexcept { return t_; }
  const LinearModel& current() const noexcept { return w_; }
  /// Uniform average of the iterates; the zero model before any step.
  LinearModel average() const { return averager_.average(); }
  DualPoint dual() const noexcept { return dual_; }
  /// Measure with the dual radius cap currently in force.
  const ConcaveMeasure& measure() const noexcept { return measure_; }

  /// 1/sqrt(t) for t >= 1.
  static double step_size(std::uint64_t t) noexcept;

  /// Throws std::logic_error if w left the R_W ball or the dual left its region.
  void check_feasible() const;

 private:
  ConcaveMeasure measure_;
  RewardFn reward_;
  RewardFn surrogate_ = RewardFn::truncated_linear();
  double p_hat_;
  SpadeConfig config_;
  RegSchedule sched_;
  LinearModel w_;
  ModelAverager averager_;
  DualPoint dual_;
  std::uint64_t t_ = 0;
};

struct SpadeResult {
  LinearModel model;  // averaged iterate
  DualPoint dual;
  std::vector<TraceRecord> trace;
  double max_dual_norm = 0.0;
  double max_dual_cap_ratio = 0.0;  // max over steps of |dual| / cap
};

/// Runs config.passes shuffled passes over `train`. Trace metrics are the 0-1
/// measure of the averaged model on `train` and `test` (test may be empty).
/// Throws DataError on an empty training set.
SpadeResult spade_run(std::span<const Sample> train, std::span<const Sample> test,
                      const ConcaveMeasure& measure, const RewardFn& reward, double p_hat,
                      const SpadeConfig& config, const TraceSink& sink = {});

}  // namespace ndopt
