#pragma once

#include <string>
#include <string_view>
#include <utility>

#include "ndopt/types.hpp"

namespace ndopt {

enum class PseudoLinearKind { FBeta, Jaccard, GowerLegendre };

/// c0 + c1 P + c2 N
struct LinearForm {
  double c0 = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;

  double at(RatePair r) const noexcept { return c0 + c1 * r.P + c2 * r.N; }
};

/// Fractional-linear measure (a0 + a1 P + a2 N) / (b0 + b1 P + b2 N).
struct CanonicalForm {
  LinearForm num;
  LinearForm den;
};

/// Canonical (P, N) coefficients for a measure at label skew theta = (1-p)/p.
/// `param` is beta for F-beta, sigma for Gower-Legendre and ignored for
/// Jaccard. Throws InvalidParameter for theta <= 0, param <= 0, sigma == 1.
CanonicalForm canonical_coeffs(PseudoLinearKind kind, double param, double theta);

/// Level-v linearization coefficients: V(P, N, v) = c + (alpha - v gamma) P +
/// (beta - v delta) N, all normalized by b0.
struct ValuationCoeffs {
  double c = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double delta = 0.0;
};

/// Bounds f <= gamma P + delta N <= g over the reward box [0, m)^2. Throws
/// RegularityError when f <= -1 or b0 == 0.
std::pair<double, double> regularity_bounds(const CanonicalForm& form, double reward_cap);

class PseudoLinearMeasure {
 public:
  /// Throws InvalidParameter on bad (param, theta, m) and RegularityError
  /// when m is outside the admissible reward range of the measure.
  PseudoLinearMeasure(PseudoLinearKind kind, double param, double theta, double reward_cap = 1.0);

  PseudoLinearKind kind() const noexcept { return kind_; }
  double param() const noexcept { return param_; }
  double theta() const noexcept { return theta_; }
  double reward_cap() const noexcept { return m_; }
  const CanonicalForm& form() const noexcept { return form_; }
  const ValuationCoeffs& coeffs() const noexcept { return coeffs_; }
  std::string name() const;

  /// Supremum of admissible reward values (may be +inf).
  double admissible_cap() const noexcept;

  /// Throws DomainError when the denominator is not positive.
  double value(RatePair r) const;
  double valuation(RatePair r, double level) const noexcept;
  /// (alpha - v gamma, beta - v delta): weights on P and N at level v.
  std::pair<double, double> valuation_weights(double level) const noexcept;

  /// Geometric contraction factor of exact alternating maximization.
  double rate() const noexcept;
  std::pair<double, double> regularity() const noexcept { return {f_lo_, g_hi_}; }

  /// Same measure and reward cap at a different label skew.
  PseudoLinearMeasure with_theta(double theta) const;

 private:
  PseudoLinearKind kind_;
  double param_;
  double theta_;
  double m_;
  CanonicalForm form_;
  ValuationCoeffs coeffs_;
  double f_lo_ = 0.0;
  double g_hi_ = 0.0;
};

/// Parses `fbeta:<beta>`, `jaccard`, `gl:<sigma>` into (kind, param).
std::pair<PseudoLinearKind, double> parse_pseudolinear_token(std::string_view token);

}  // namespace ndopt
