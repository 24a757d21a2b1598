#include "ndopt/eval.hpp"

#include "ndopt/errors.hpp"

namespace ndopt {

Confusion confusion(const LinearModel& model, std::span<const Sample> samples) {
  Confusion c;
  for (const auto& s : samples) {
    const bool pred_pos = model.predict(s) > 0;
    if (s.label > 0) {
      pred_pos ? ++c.tp : ++c.fn;
    } else {
      pred_pos ? ++c.fp : ++c.tn;
    }
  }
  return c;
}

RatePair rates(const Confusion& c) {
  if (c.positives() == 0 || c.negatives() == 0) throw DataError("rates need both classes");
  return {static_cast<double>(c.tp) / static_cast<double>(c.positives()),
          static_cast<double>(c.tn) / static_cast<double>(c.negatives())};
}

RatePair rates(const LinearModel& model, std::span<const Sample> samples) {
  return rates(confusion(model, samples));
}

Measure parse_measure(std::string_view token, double theta, double reward_cap) {
  if (token == "min" || token == "hmean" || token == "qmean" || token == "gmean") {
    return ConcaveMeasure(parse_concave_kind(token));
  }
  const auto [kind, param] = parse_pseudolinear_token(token);
  return PseudoLinearMeasure(kind, param, theta, reward_cap);
}

std::string measure_name(const Measure& m) {
  return std::visit([](const auto& x) { return x.name(); }, m);
}

bool is_concave(const Measure& m) { return std::holds_alternative<ConcaveMeasure>(m); }

double measure_value(const Measure& m, RatePair r) {
  if (const auto* c = std::get_if<ConcaveMeasure>(&m)) return c->link_value(r);
  return std::get<PseudoLinearMeasure>(m).value(r);
}

double metric(const Confusion& c, const Measure& m) {
  const RatePair r = rates(c);
  if (const auto* pl = std::get_if<PseudoLinearMeasure>(&m)) {
    const double theta = static_cast<double>(c.negatives()) / static_cast<double>(c.positives());
    return pl->with_theta(theta).value(r);
  }
  return std::get<ConcaveMeasure>(m).link_value(r);
}

double metric(const LinearModel& model, std::span<const Sample> samples, const Measure& m) {
  return metric(confusion(model, samples), m);
}

double popular_form(const PseudoLinearMeasure& m, const Confusion& c) {
  const auto tp = static_cast<double>(c.tp);
  const auto fp = static_cast<double>(c.fp);
  const auto fn = static_cast<double>(c.fn);
  const auto tn = static_cast<double>(c.tn);
  switch (m.kind()) {
    case PseudoLinearKind::FBeta: {
      const double b2 = m.param() * m.param();
      return (1 + b2) * tp / ((1 + b2) * tp + b2 * fn + fp);
    }
    case PseudoLinearKind::Jaccard:
      return tp / (tp + fp + fn);
    case PseudoLinearKind::GowerLegendre:
      return (tp + tn) / (tp + m.param() * (fp + fn) + tn);
  }
  return 0.0;
}

}  // namespace ndopt
