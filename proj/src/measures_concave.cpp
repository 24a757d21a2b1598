#include "ndopt/measures_concave.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>

#include "ndopt/errors.hpp"

namespace ndopt {
namespace {

constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kQMeanRadius = 0.7071067811865476;  // 1/sqrt(2)
constexpr double kHMeanRadius = 2.0;
constexpr int kGridPoints = 96;
constexpr int kMaxIterations = 100;
constexpr double kRootTol = 1e-10;

struct Point {
  double a;
  double b;
};

double dist2(Point p, double a, double b) {
  return (p.a - a) * (p.a - a) + (p.b - b) * (p.b - b);
}

// Minimizes dist^2(curve(s), x) for s in [lo, hi]: a coarse grid locates the
// basin, bisection on the derivative brackets the stationary point and a
// Newton step (finite-difference curvature) polishes it.
double minimize_along_curve(const std::function<Point(double)>& curve,
                            const std::function<double(double)>& dcurve_dist2,
                            double a, double b, double lo, double hi) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  const double h = (hi - lo) / (kGridPoints - 1);
  for (int k = 0; k < kGridPoints; ++k) {
    const double d = dist2(curve(lo + k * h), a, b);
    if (d < best_d) {
      best_d = d;
      best = k;
    }
  }
  double left = lo + std::max(best - 1, 0) * h;
  double right = lo + std::min(best + 1, kGridPoints - 1) * h;
  double s = lo + best * h;

  double g_left = dcurve_dist2(left);
  double g_right = dcurve_dist2(right);
  if (g_left < 0.0 && g_right > 0.0) {
    for (int it = 0; it < kMaxIterations && right - left > kRootTol * std::max(1.0, std::abs(s)); ++it) {
      s = 0.5 * (left + right);
      const double g = dcurve_dist2(s);
      if (g < 0.0) {
        left = s;
      } else {
        right = s;
      }
    }
    s = 0.5 * (left + right);
    const double step = std::max(1e-7 * std::max(1.0, std::abs(s)), 1e-12);
    const double curvature = (dcurve_dist2(s + step) - dcurve_dist2(s - step)) / (2 * step);
    if (curvature > 0.0) {
      const double newton = s - dcurve_dist2(s) / curvature;
      if (newton > left - (right - left) && newton < right + (right - left) &&
          dist2(curve(newton), a, b) < dist2(curve(s), a, b)) {
        s = newton;
      }
    }
  } else {
    // Minimum at an end of the bracket (curve endpoint or flat derivative).
    for (double cand : {left, right}) {
      if (dist2(curve(cand), a, b) < dist2(curve(s), a, b)) s = cand;
    }
  }
  return std::clamp(s, lo, hi);
}

// Projection onto {a, b >= 0, sqrt(a) + sqrt(b) >= sqrt(2)}.
Point project_hmean_superlevel(double a, double b) {
  const Point q{std::max(a, 0.0), std::max(b, 0.0)};
  if (std::sqrt(q.a) + std::sqrt(q.b) >= kSqrt2) return q;

  // Boundary: the curve (2s^2, 2(1-s)^2) plus the axis rays beyond (2,0), (0,2).
  auto curve = [](double s) { return Point{2 * s * s, 2 * (1 - s) * (1 - s)}; };
  auto dd = [a, b](double s) {
    const double ca = 2 * s * s;
    const double cb = 2 * (1 - s) * (1 - s);
    return 2 * (ca - a) * (4 * s) - 2 * (cb - b) * (4 * (1 - s));
  };
  const double s = minimize_along_curve(curve, dd, a, b, 0.0, 1.0);
  std::array<Point, 3> cands{curve(s), Point{std::max(a, 2.0), 0.0}, Point{0.0, std::max(b, 2.0)}};
  return *std::min_element(cands.begin(), cands.end(), [a, b](Point l, Point r) {
    return dist2(l, a, b) < dist2(r, a, b);
  });
}

// Projection onto {a, b >= 0, a b >= 1/4}. The boundary hyperbola is
// parametrized as (e^u, e^-u / 4).
Point project_gmean_superlevel(double a, double b) {
  if (a >= 0.0 && b >= 0.0 && a * b >= 0.25) return Point{a, b};
  // The nearest point is no farther than (1/2, 1/2).
  const double reach = std::sqrt(dist2(Point{0.5, 0.5}, a, b));
  const double hi = std::log(std::max(a, 0.0) + reach + 1e-12);
  const double lo = -std::log(4.0 * (std::max(b, 0.0) + reach) + 1e-12);
  auto curve = [](double u) { return Point{std::exp(u), 0.25 * std::exp(-u)}; };
  auto dd = [a, b](double u) {
    const double ca = std::exp(u);
    const double cb = 0.25 * std::exp(-u);
    return 2 * (ca - a) * ca - 2 * (cb - b) * cb;
  };
  const double u = minimize_along_curve(curve, dd, a, b, std::min(lo, hi), std::max(lo, hi));
  return curve(u);
}

Point radial(double a, double b, double radius) {
  const double n = std::hypot(a, b);
  if (n <= radius || n == 0.0) return Point{a, b};
  return Point{a * radius / n, b * radius / n};
}

}  // namespace

double DualPoint::norm() const noexcept { return std::hypot(alpha, beta); }

ConcaveMeasure::ConcaveMeasure(ConcaveKind kind, double gmean_cap)
    : kind_(kind), gmean_cap_(gmean_cap) {
  if (kind_ == ConcaveKind::GMean && !(gmean_cap_ >= kQMeanRadius)) {
    throw InvalidParameter("G-mean dual cap must be at least 1/sqrt(2) for a nonempty region");
  }
}

std::string ConcaveMeasure::name() const {
  switch (kind_) {
    case ConcaveKind::Min: return "min";
    case ConcaveKind::HMean: return "hmean";
    case ConcaveKind::QMean: return "qmean";
    case ConcaveKind::GMean: return "gmean";
  }
  return "?";
}

double ConcaveMeasure::dual_radius_cap() const noexcept {
  switch (kind_) {
    case ConcaveKind::Min: return kSqrt2;
    case ConcaveKind::HMean: return kHMeanRadius;
    case ConcaveKind::QMean: return kQMeanRadius;
    case ConcaveKind::GMean: return gmean_cap_;
  }
  return 0.0;
}

ConcaveMeasure ConcaveMeasure::with_cap(double cap) const {
  if (kind_ != ConcaveKind::GMean) return *this;
  return ConcaveMeasure(kind_, cap);
}

double ConcaveMeasure::link_value(RatePair r) const {
  const double P = r.P;
  const double N = r.N;
  if (!std::isfinite(P) || !std::isfinite(N)) throw DomainError("non-finite rates");
  switch (kind_) {
    case ConcaveKind::Min:
      return std::min(P, N);
    case ConcaveKind::HMean:
      if (P + N == 0.0) {
        if (P == 0.0) return 0.0;
        throw DomainError("H-mean undefined for P + N = 0 away from the origin");
      }
      return 2.0 * P * N / (P + N);
    case ConcaveKind::QMean:
      return 1.0 - std::sqrt(((1 - P) * (1 - P) + (1 - N) * (1 - N)) / 2.0);
    case ConcaveKind::GMean:
      if (P < 0.0 || N < 0.0) throw DomainError("G-mean requires nonnegative rates");
      return std::sqrt(P * N);
  }
  return 0.0;
}

std::pair<double, double> ConcaveMeasure::conjugate_gradient(DualPoint) const noexcept {
  if (kind_ == ConcaveKind::QMean) return {1.0, 1.0};
  return {0.0, 0.0};
}

double ConcaveMeasure::conjugate_value(DualPoint d) const noexcept {
  if (kind_ == ConcaveKind::QMean) return d.alpha + d.beta - 1.0;
  return 0.0;
}

DualPoint ConcaveMeasure::project_dual(double a, double b) const {
  switch (kind_) {
    case ConcaveKind::Min: {
      const double alpha = std::clamp((a - b + 1.0) / 2.0, 0.0, 1.0);
      return DualPoint{alpha, 1.0 - alpha};
    }
    case ConcaveKind::QMean: {
      const Point p = radial(std::max(a, 0.0), std::max(b, 0.0), kQMeanRadius);
      return DualPoint{p.a, p.b};
    }
    case ConcaveKind::HMean:
    case ConcaveKind::GMean: {
      const bool hmean = kind_ == ConcaveKind::HMean;
      const double radius = hmean ? kHMeanRadius : gmean_cap_;
      const Point s = hmean ? project_hmean_superlevel(a, b) : project_gmean_superlevel(a, b);
      if (std::hypot(s.a, s.b) <= radius) return DualPoint{s.a, s.b};
      const Point r = radial(a, b, radius);
      const bool r_in_superlevel =
          r.a >= 0.0 && r.b >= 0.0 &&
          (hmean ? std::sqrt(r.a) + std::sqrt(r.b) >= kSqrt2 : r.a * r.b >= 0.25);
      if (r_in_superlevel) return DualPoint{r.a, r.b};
      // Both constraints active: nearest intersection of boundary and sphere.
      Point c1;
      Point c2;
      if (hmean) {
        c1 = Point{radius, 0.0};
        c2 = Point{0.0, radius};
      } else {
        const double sum = std::sqrt(radius * radius + 0.5);
        const double diff = std::sqrt(radius * radius - 0.5);
        c1 = Point{(sum + diff) / 2, (sum - diff) / 2};
        c2 = Point{c1.b, c1.a};
      }
      const Point best = dist2(c1, a, b) <= dist2(c2, a, b) ? c1 : c2;
      return DualPoint{best.a, best.b};
    }
  }
  return DualPoint{};
}

double ConcaveMeasure::stability(double eps) const {
  if (!(eps >= 0.0)) throw InvalidParameter("stability requires eps >= 0");
  switch (kind_) {
    case ConcaveKind::Min: return eps;
    case ConcaveKind::HMean: return 4.0 * eps;
    case ConcaveKind::QMean: return eps;
    case ConcaveKind::GMean: return 3.0 * std::sqrt(eps);
  }
  return 0.0;
}

bool ConcaveMeasure::in_region(DualPoint d, double tol) const noexcept {
  const double a = d.alpha;
  const double b = d.beta;
  if (a < -tol || b < -tol) return false;
  const double n = d.norm();
  switch (kind_) {
    case ConcaveKind::Min:
      return std::abs(a + b - 1.0) <= tol;
    case ConcaveKind::HMean:
      return std::sqrt(std::max(a, 0.0)) + std::sqrt(std::max(b, 0.0)) >= kSqrt2 - tol &&
             n <= kHMeanRadius + tol;
    case ConcaveKind::QMean:
      return n <= kQMeanRadius + tol;
    case ConcaveKind::GMean:
      return a * b >= 0.25 - tol && n <= gmean_cap_ + tol;
  }
  return false;
}

ConcaveKind parse_concave_kind(std::string_view token) {
  if (token == "min") return ConcaveKind::Min;
  if (token == "hmean") return ConcaveKind::HMean;
  if (token == "qmean") return ConcaveKind::QMean;
  if (token == "gmean") return ConcaveKind::GMean;
  throw InvalidParameter("unknown concave measure '" + std::string(token) + "'");
}

}  // namespace ndopt
