#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <variant>

#include "ndopt/measures_concave.hpp"
#include "ndopt/measures_pseudolinear.hpp"
#include "ndopt/types.hpp"

namespace ndopt {

struct Confusion {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;

  std::size_t positives() const noexcept { return tp + fn; }
  std::size_t negatives() const noexcept { return tn + fp; }
};

/// Counts with the tie rule score == 0 -> predict -1.
Confusion confusion(const LinearModel& model, std::span<const Sample> samples);

/// (TPR, TNR). Throws DataError unless both classes are present.
RatePair rates(const Confusion& c);
RatePair rates(const LinearModel& model, std::span<const Sample> samples);

using Measure = std::variant<ConcaveMeasure, PseudoLinearMeasure>;

/// Measure from its CLI token. theta and reward_cap only matter for
/// pseudo-linear measures.
Measure parse_measure(std::string_view token, double theta, double reward_cap = 1.0);
std::string measure_name(const Measure& m);
bool is_concave(const Measure& m);

/// Link value of the measure at the given rates.
double measure_value(const Measure& m, RatePair r);

/// Performance of the counts. Pseudo-linear measures are evaluated at the
/// label skew of the counts, so the result is the textbook metric of that set.
double metric(const Confusion& c, const Measure& m);
double metric(const LinearModel& model, std::span<const Sample> samples, const Measure& m);

/// Confusion-matrix ("popular") form of a pseudo-linear measure.
double popular_form(const PseudoLinearMeasure& m, const Confusion& c);

}  // namespace ndopt
