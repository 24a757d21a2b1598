#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "ndopt/measures_pseudolinear.hpp"
#include "ndopt/rewards.hpp"
#include "ndopt/trace.hpp"
#include "ndopt/types.hpp"

namespace ndopt {

// ---------------------------------------------------------------------------
// Batch alternating maximization
// ---------------------------------------------------------------------------

/// Iterate of alternating maximization: model w_t and challenge level v_t.
template <class Model>
struct AmState {
  Model w{};
  double v = 0.0;
  std::size_t t = 0;
};

/// One alternating-maximization iteration: w <- argmax_w V(w, v), then
/// v <- Pf(w), which is the largest level the new model achieves.
/// `inner_max(v)` returns a (possibly approximate) maximizer of the valuation
/// at level v and `rate_eval(w)` the model's (P, N).
template <class Model, class InnerMax, class RateEval>
void am_iterate(AmState<Model>& state, const PseudoLinearMeasure& measure, InnerMax&& inner_max,
                RateEval&& rate_eval) {
  state.w = inner_max(state.v);
  state.v = measure.value(rate_eval(state.w));
  ++state.t;
}

/// Exact maximizer of the valuation at level v over a finite set of rate
/// pairs, lowest index on ties.
std::size_t finite_valuation_argmax(std::span<const RatePair> set, const PseudoLinearMeasure& m,
                                    double level);

struct FiniteAmTrace {
  double optimum = 0.0;              // best measure value in the set
  std::vector<std::size_t> chosen;   // w_1, w_2, ...
  std::vector<double> levels;        // v_0 = 0, v_1, ...
  std::vector<double> excess;        // Delta_t = optimum - v_t, t = 0, 1, ...
  std::size_t iterations = 0;
};

/// Exact AM over a finite classifier set from v_0 = 0, stopping once
/// v_{t+1} <= v_t + tol or after max_iterations.
FiniteAmTrace am_finite(std::span<const RatePair> set, const PseudoLinearMeasure& m,
                        double tol = 1e-12, std::size_t max_iterations = 1000);

/// AM with perturbed inner maximizations and levels on a finite set, for the
/// F1 measure at theta = 1 with reward cap m. At step t the chosen model is
/// the worst-scoring one whose valuation is within eps[t] of the maximum at
/// level Pf(w_t) + delta[t]. The envelope is
///   eta^T Delta_0 + (eta'/eta) sum_i eta^(T-i) xi_i,
/// eta = 2m/(2+m), eta' = 2m/(2-m), xi_i = |delta_i| + eps_i/m, where eps_i
/// is the realized inexactness.
struct NoisyAmTrace {
  std::vector<double> excess;    // observed Delta_t, t = 0..T
  std::vector<double> envelope;  // bound on Delta_t, t = 0..T
  std::vector<double> xi;
  std::size_t violations = 0;
};

NoisyAmTrace noisy_am_simulate(std::span<const RatePair> set, const PseudoLinearMeasure& f1,
                               std::span<const double> eps, std::span<const double> delta,
                               std::size_t initial_index = 0);

struct BatchAmConfig {
  double radius_w = 100.0;
  bool fit_intercept = true;
  std::size_t max_outer = 50;
  double tol = 1e-4;
  std::size_t max_inner = 10000;
  double grad_tol = 1e-6;
  double step_scale = 1.0;
};

struct BatchAmResult {
  LinearModel model;
  std::vector<double> levels;  // v_0 = 0, v_1, ...
  std::vector<RatePair> rates;
};

/// Empirical (P, N): per-class average of `reward` over the samples.
RatePair empirical_rates(const LinearModel& w, std::span<const Sample> samples,
                         const RewardFn& reward);

/// Batch AM on a sample set. The inner step is full-gradient projected
/// ascent on the truncated-linear surrogate valuation (best iterate kept);
/// levels use `level_reward`.
BatchAmResult batch_am(std::span<const Sample> samples, const PseudoLinearMeasure& m,
                       const RewardFn& level_reward, const BatchAmConfig& config);

// ---------------------------------------------------------------------------
// Stochastic alternating maximization
// ---------------------------------------------------------------------------

enum class EpochSchedule { Doubling, Theoretical };

struct StampConfig {
  EpochSchedule schedule = EpochSchedule::Doubling;
  std::size_t initial = 100;  // Doubling: s_0
  double theory_eta = 0.5;    // Theoretical: s_e = ceil(c (1/eta)^(2e))
  double theory_c = 100.0;
  std::size_t passes = 25;
  double radius_w = 100.0;
  std::uint64_t seed = 0;
  double step_scale = 1.0;
  bool fit_intercept = true;
  /// Model-stage output: the average of the stage's iterates (true) or the
  /// last iterate (false).
  bool average_stage = true;
  /// Reward used to estimate (P, N) in the level stage. The 0-1 reward makes
  /// v_e an estimate of the measure itself.
  RewardFn level_reward = RewardFn::zero_one();
  bool timing = true;
};

/// (s_e, s'_e) for 0-based epoch e.
std::pair<std::size_t, std::size_t> epoch_lengths(const StampConfig& config, std::size_t e);

struct EpochRecord {
  std::size_t epoch = 0;
  std::uint64_t t_total = 0;
  double elapsed_ms = 0.0;
  double v = 0.0;
  double P_hat = 0.0;
  double N_hat = 0.0;
  double train_metric = 0.0;
  double test_metric = 0.0;
  bool degenerate_level = false;  // no positives in the level window
};

struct StampResult {
  LinearModel model;
  std::vector<EpochRecord> trace;
};

/// Alternates model stages (projected SGD on the level-weighted reward
/// (alpha - v gamma) r+ + (beta - v delta) r-, warm-started) with level
/// stages (fresh samples, v <- Pf(P_hat, N_hat)) until the stream of
/// config.passes shuffled passes runs out. train_metric and test_metric are
/// the 0-1 measure of the epoch's model on `train` and `test` (test_metric
/// falls back to train when test is empty).
StampResult stamp_run(std::span<const Sample> train, std::span<const Sample> test,
                      const PseudoLinearMeasure& measure, double p_hat, const StampConfig& config,
                      const std::function<void(const EpochRecord&)>& sink = {});

/// `epoch,t_total,elapsed_ms,v_e,P_hat,N_hat,test_metric`
void write_epoch_csv(std::ostream& out, const std::vector<EpochRecord>& trace);

}  // namespace ndopt
