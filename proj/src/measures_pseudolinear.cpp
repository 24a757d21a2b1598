#include "ndopt/measures_pseudolinear.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "ndopt/errors.hpp"

namespace ndopt {

CanonicalForm canonical_coeffs(PseudoLinearKind kind, double param, double theta) {
  if (!(theta > 0.0) || !std::isfinite(theta)) throw InvalidParameter("theta must be positive");
  switch (kind) {
    case PseudoLinearKind::FBeta: {
      if (!(param > 0.0)) throw InvalidParameter("beta must be positive");
      const double b2 = param * param;
      return {{0.0, 1.0 + b2, 0.0}, {b2 + theta, 1.0, -theta}};
    }
    case PseudoLinearKind::Jaccard:
      return {{0.0, 1.0, 0.0}, {1.0 + theta, 0.0, -theta}};
    case PseudoLinearKind::GowerLegendre: {
      if (!(param > 0.0)) throw InvalidParameter("sigma must be positive");
      if (param == 1.0) throw InvalidParameter("sigma = 1 is not supported");
      const double s = param;
      return {{0.0, 1.0, theta}, {s * (1.0 + theta), 1.0 - s, theta * (1.0 - s)}};
    }
  }
  throw InvalidParameter("unknown pseudo-linear measure");
}

std::pair<double, double> regularity_bounds(const CanonicalForm& form, double m) {
  if (form.den.c0 == 0.0) throw RegularityError("b0 must be nonzero");
  if (!(m > 0.0)) throw InvalidParameter("reward cap must be positive");
  const double gamma = form.den.c1 / form.den.c0;
  const double delta = form.den.c2 / form.den.c0;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (double P : {0.0, m}) {
    for (double N : {0.0, m}) {
      const double v = gamma * P + delta * N;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (!(lo > -1.0)) {
    std::ostringstream msg;
    msg << "reward cap " << m << " breaks regularity (f = " << lo << " <= -1)";
    throw RegularityError(msg.str());
  }
  return {lo, hi};
}

PseudoLinearMeasure::PseudoLinearMeasure(PseudoLinearKind kind, double param, double theta,
                                         double reward_cap)
    : kind_(kind),
      param_(kind == PseudoLinearKind::Jaccard ? 0.0 : param),
      theta_(theta),
      m_(reward_cap),
      form_(canonical_coeffs(kind, param, theta)) {
  if (!std::isfinite(m_)) throw InvalidParameter("reward cap must be finite");
  std::tie(f_lo_, g_hi_) = regularity_bounds(form_, m_);
  const double b0 = form_.den.c0;
  coeffs_ = {form_.num.c0 / b0, form_.num.c1 / b0, form_.num.c2 / b0, form_.den.c1 / b0,
             form_.den.c2 / b0};
  const double r = rate();
  if (!(r > 0.0 && r < 1.0)) throw RegularityError("convergence rate outside (0, 1)");
}

std::string PseudoLinearMeasure::name() const {
  std::ostringstream out;
  switch (kind_) {
    case PseudoLinearKind::FBeta: out << "fbeta:" << param_; break;
    case PseudoLinearKind::Jaccard: out << "jaccard"; break;
    case PseudoLinearKind::GowerLegendre: out << "gl:" << param_; break;
  }
  return out.str();
}

double PseudoLinearMeasure::admissible_cap() const noexcept {
  switch (kind_) {
    case PseudoLinearKind::FBeta: return 1.0 + param_ * param_ / theta_;
    case PseudoLinearKind::Jaccard: return (1.0 + theta_) / theta_;
    case PseudoLinearKind::GowerLegendre:
      return param_ < 1.0 ? std::numeric_limits<double>::infinity() : param_ / (param_ - 1.0);
  }
  return 0.0;
}

double PseudoLinearMeasure::value(RatePair r) const {
  const double den = form_.den.at(r);
  if (!(den > 0.0)) throw DomainError("non-positive denominator: rates outside admissible range");
  return form_.num.at(r) / den;
}

double PseudoLinearMeasure::valuation(RatePair r, double v) const noexcept {
  const auto [wp, wn] = valuation_weights(v);
  return coeffs_.c + wp * r.P + wn * r.N;
}

std::pair<double, double> PseudoLinearMeasure::valuation_weights(double v) const noexcept {
  return {coeffs_.alpha - v * coeffs_.gamma, coeffs_.beta - v * coeffs_.delta};
}

double PseudoLinearMeasure::rate() const noexcept {
  const double m = m_;
  const double t = theta_;
  switch (kind_) {
    case PseudoLinearKind::FBeta: return m * (1.0 + t) / (m + param_ * param_ + t);
    case PseudoLinearKind::Jaccard: return m * t / (1.0 + t);
    case PseudoLinearKind::GowerLegendre: {
      const double s = param_;
      if (s < 1.0) return (1.0 - s) * m / ((1.0 - s) * m + s);
      return (s - 1.0) * m / s;
    }
  }
  return 1.0;
}

PseudoLinearMeasure PseudoLinearMeasure::with_theta(double theta) const {
  return PseudoLinearMeasure(kind_, param_, theta, m_);
}

std::pair<PseudoLinearKind, double> parse_pseudolinear_token(std::string_view token) {
  auto parse_param = [&](std::string_view rest) {
    double v = 0.0;
    const auto* end = rest.data() + rest.size();
    const auto res = std::from_chars(rest.data(), end, v);
    if (res.ec != std::errc() || res.ptr != end) {
      throw InvalidParameter("bad measure parameter in '" + std::string(token) + "'");
    }
    return v;
  };
  if (token == "jaccard") return {PseudoLinearKind::Jaccard, 0.0};
  if (token.starts_with("fbeta:")) return {PseudoLinearKind::FBeta, parse_param(token.substr(6))};
  if (token.starts_with("gl:")) return {PseudoLinearKind::GowerLegendre, parse_param(token.substr(3))};
  throw InvalidParameter("unknown pseudo-linear measure '" + std::string(token) + "'");
}

}  // namespace ndopt
