#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ndopt/eval.hpp"
#include "ndopt/trace.hpp"
#include "ndopt/types.hpp"

namespace ndopt {

struct SgdConfig {
  std::size_t passes = 25;
  double radius_w = 100.0;
  std::uint64_t seed = 0;
  double step_scale = 1.0;
  bool fit_intercept = true;
  /// 0 picks checkpoint_interval(n).
  std::uint64_t checkpoint_every = 0;
  bool timing = true;
  /// Keep the averaged model of every checkpoint.
  bool keep_checkpoints = false;
};

struct SgdResult {
  LinearModel model;  // averaged iterate
  std::vector<TraceRecord> trace;
  std::vector<LinearModel> checkpoints;  // parallel to trace when kept
};

/// Unweighted logistic-loss SGD with 1/sqrt(t) steps and projection onto the
/// R_W ball. Trace metrics are `measure` of the averaged model on `train` and
/// `test`; alpha and beta are reported as 0. Throws DataError on an empty
/// training set.
SgdResult sgd_baseline(std::span<const Sample> train, std::span<const Sample> test,
                       const Measure& measure, const SgdConfig& config,
                       const TraceSink& sink = {});

struct ThresholdChoice {
  double threshold = 0.0;  // predict +1 iff score > threshold
  double value = 0.0;
};

/// Exhaustive sweep over the n+1 thresholds that separate the sorted distinct
/// scores: -inf, midpoints of neighbours, +inf. Returns the maximizer with the
/// lowest threshold on ties. Throws DataError unless both classes occur.
ThresholdChoice plugin_threshold(std::span<const double> scores, std::span<const int> labels,
                                 const Measure& measure);
ThresholdChoice plugin_threshold(const LinearModel& model, std::span<const Sample> samples,
                                 const Measure& measure);

/// Model predicting +1 iff model.score > threshold. Infinite thresholds give
/// the matching constant classifier.
LinearModel apply_threshold(const LinearModel& model, double threshold);

}  // namespace ndopt
