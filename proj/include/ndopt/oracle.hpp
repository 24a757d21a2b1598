#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "ndopt/baselines.hpp"
#include "ndopt/eval.hpp"
#include "ndopt/measures_concave.hpp"
#include "ndopt/measures_pseudolinear.hpp"
#include "ndopt/types.hpp"

// Brute-force references used to check the solvers. Nothing here calls into
// the conjugate, projection or AM code it is meant to verify.
namespace ndopt::oracle {

struct FenchelResult {
  double value = 0.0;
  DualPoint point;  // attaining dual point (smallest norm among ties)
};

/// inf over the sufficient dual region of alpha u + beta v - Psi*(alpha, beta),
/// by evaluating a resolution x resolution grid over the region's bounding
/// box plus 200 * resolution points along each boundary piece. The G-mean
/// region is truncated to the ball of radius gmean_cap.
FenchelResult fenchel_infimum(ConcaveKind kind, RatePair r, std::size_t resolution = 201,
                              double gmean_cap = 1e4);

struct FenchelReport {
  double max_error = 0.0;  // max |infimum - link_value| over the rate grid
  RatePair worst;
};

/// Compares fenchel_infimum against link_value on a grid x grid rate grid over
/// [0, 1]^2.
FenchelReport fenchel_suite(ConcaveKind kind, std::size_t grid = 21);

struct AttainmentReport {
  double max_norm = 0.0;  // largest attaining-point norm over the rate grid
  double bound = 0.0;
  RatePair worst;
  bool ok() const noexcept { return max_norm <= bound; }
};

/// Attaining-point norms on a grid x grid rate grid over [rate_floor, 1]^2.
/// Bounds: min sqrt(2), hmean 2, qmean 1/sqrt(2), gmean 1.1 sqrt(1/(4 rate_floor)).
AttainmentReport dual_attainment(ConcaveKind kind, double rate_floor = 0.0,
                                   std::size_t grid = 21, std::size_t resolution = 201);

/// Dinkelbach iteration on a finite set of rate pairs, from v_0 = 0:
/// pick argmax num - v den (lowest index on ties), then v <- num / den, with
/// num / den the confusion-matrix form of the measure at its label skew.
/// Stops once v_{t+1} <= v_t + tol. Returns v_0, v_1, ...
std::vector<double> dj_scalar_reference(std::span<const RatePair> set,
                                        const PseudoLinearMeasure& m, double tol = 1e-12,
                                        std::size_t max_iterations = 1000);

/// Confusion-matrix value of a pseudo-linear measure at rates (P, N).
double popular_value(const PseudoLinearMeasure& m, RatePair r);

struct DjRateReport {
  std::size_t sets = 0;
  std::size_t steps = 0;
  std::size_t violations = 0;   // Delta_{t+1} > rate * Delta_t
  std::size_t mismatches = 0;   // AM and Dinkelbach level traces differ
  std::size_t overlong = 0;     // more iterations than the log(1/eps) bound
  double max_ratio = 0.0;       // largest observed Delta_{t+1} / Delta_t
  double rate = 0.0;
};

/// Random finite classifier sets of size 3..50 with rates uniform in
/// [0, m)^2, one label skew per set drawn from [0.25, 20].
DjRateReport djrate_check(PseudoLinearKind kind, double param, double reward_cap,
                          std::size_t sets, std::uint64_t seed);

/// Largest relative difference |g_i - fd_i| / max(1, |fd_i|) between a
/// gradient and central differences with step h.
double finite_diff_check(const std::function<double(std::span<const double>)>& f,
                         const std::function<std::vector<double>(std::span<const double>)>& grad,
                         std::span<const double> point, double h = 1e-6);

/// Threshold search that recounts the confusion matrix from scratch at each
/// of the n+1 candidate thresholds. Lowest threshold on ties.
ThresholdChoice brute_force_threshold(std::span<const double> scores, std::span<const int> labels,
                                      const Measure& measure);

struct GridSearchResult {
  LinearModel model;
  double value = 0.0;
};

/// Best linear classifier found by exhaustive search: for 1-D data both
/// directions, for 2-D data `angles` equally spaced unit directions, each
/// combined with every separating threshold of the projected scores.
GridSearchResult grid_model_search(std::span<const Sample> samples, const Measure& measure,
                                   std::size_t angles = 720);

}  // namespace ndopt::oracle
