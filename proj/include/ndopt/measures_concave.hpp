#pragma once

#include <limits>
#include <string>
#include <string_view>
#include <utility>

#include "ndopt/types.hpp"

namespace ndopt {

enum class ConcaveKind { Min, HMean, QMean, GMean };

/// Dual weights on (P, N).
struct DualPoint {
  double alpha = 0.0;
  double beta = 0.0;

  double norm() const noexcept;
};

/// A concave link function Psi(P, N) together with its Fenchel conjugate on
/// the sufficient dual region, the Euclidean projection onto that region and
/// its stability function.
///
/// Regions:
///   Min    {a + b = 1, a, b >= 0}
///   HMean  {sqrt(a) + sqrt(b) >= sqrt(2), a, b >= 0} intersected with B(0, 2)
///   QMean  {a^2 + b^2 <= 1/2, a, b >= 0}
///   GMean  {a b >= 1/4, a, b >= 0} intersected with B(0, cap)
///
/// G-mean's region is unbounded, so it carries an explicit radius cap
/// (infinite unless set). Solvers tighten it as the reward regularization
/// decays.
class ConcaveMeasure {
 public:
  explicit ConcaveMeasure(ConcaveKind kind,
                          double gmean_cap = std::numeric_limits<double>::infinity());

  ConcaveKind kind() const noexcept { return kind_; }
  std::string name() const;

  /// Norm bound on every point of the implemented region.
  double dual_radius_cap() const noexcept;

  /// Copy with a different G-mean radius cap. No-op for the Lipschitz measures.
  ConcaveMeasure with_cap(double cap) const;

  double link_value(RatePair rates) const;
  std::pair<double, double> conjugate_gradient(DualPoint d) const noexcept;
  double conjugate_value(DualPoint d) const noexcept;
  DualPoint project_dual(double a, double b) const;
  double stability(double eps) const;

  bool in_region(DualPoint d, double tol = 1e-9) const noexcept;

 private:
  ConcaveKind kind_;
  double gmean_cap_;
};

/// Parses `min`, `hmean`, `qmean`, `gmean`. Throws InvalidParameter.
ConcaveKind parse_concave_kind(std::string_view token);

}  // namespace ndopt
