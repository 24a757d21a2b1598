#include "ndopt/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>

#include "ndopt/errors.hpp"
#include "ndopt/stamp.hpp"

namespace ndopt::oracle {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Region {
  ConcaveKind kind;
  double cap;

  double conjugate(double a, double b) const {
    return kind == ConcaveKind::QMean ? a + b - 1.0 : 0.0;
  }

  bool contains(double a, double b) const {
    if (a < 0 || b < 0) return false;
    const double r2 = a * a + b * b;
    switch (kind) {
      case ConcaveKind::Min: return std::abs(a + b - 1.0) <= 1e-12;
      case ConcaveKind::HMean: return std::sqrt(a) + std::sqrt(b) >= std::sqrt(2.0) && r2 <= 4.0;
      case ConcaveKind::QMean: return r2 <= 0.5;
      case ConcaveKind::GMean: return a * b >= 0.25 && r2 <= cap * cap;
    }
    return false;
  }

  double box() const {
    switch (kind) {
      case ConcaveKind::Min: return 1.0;
      case ConcaveKind::HMean: return 2.0;
      case ConcaveKind::QMean: return std::sqrt(0.5);
      case ConcaveKind::GMean: return cap;
    }
    return 0.0;
  }

  // Points along the boundary pieces, n per piece.
  template <class Visit>
  void boundary(std::size_t n, Visit&& visit) const {
    const double half_pi = std::numbers::pi / 2;
    auto arc = [&](double radius, double from, double to) {
      for (std::size_t i = 0; i <= n; ++i) {
        const double t = from + (to - from) * static_cast<double>(i) / static_cast<double>(n);
        visit(radius * std::cos(t), radius * std::sin(t));
      }
    };
    switch (kind) {
      case ConcaveKind::Min:
        for (std::size_t i = 0; i <= n; ++i) {
          const double a = static_cast<double>(i) / static_cast<double>(n);
          visit(a, 1.0 - a);
        }
        break;
      case ConcaveKind::HMean:
        for (std::size_t i = 0; i <= n; ++i) {
          const double s = static_cast<double>(i) / static_cast<double>(n);
          visit(2 * s * s, 2 * (1 - s) * (1 - s));
        }
        arc(2.0, 0.0, half_pi);
        break;
      case ConcaveKind::QMean:
        arc(std::sqrt(0.5), 0.0, half_pi);
        for (std::size_t i = 0; i <= n; ++i) {
          const double a = std::sqrt(0.5) * static_cast<double>(i) / static_cast<double>(n);
          visit(a, 0.0);
          visit(0.0, a);
        }
        break;
      case ConcaveKind::GMean: {
        if (cap * cap < 0.5) break;
        // a = e^x / 2, b = e^-x / 2, so a^2 + b^2 = cosh(2x) / 2 <= cap^2.
        const double lim = std::acosh(2 * cap * cap) / 2;
        for (std::size_t i = 0; i <= n; ++i) {
          const double x = -lim + 2 * lim * static_cast<double>(i) / static_cast<double>(n);
          visit(std::exp(x) / 2, std::exp(-x) / 2);
        }
        const double lo = std::atan2(std::exp(-lim) / 2, std::exp(lim) / 2);
        arc(cap, lo, half_pi - lo);
        break;
      }
    }
  }
};

}  // namespace

FenchelResult fenchel_infimum(ConcaveKind kind, RatePair r, std::size_t resolution,
                              double gmean_cap) {
  if (resolution < 2) throw InvalidParameter("grid resolution must be at least 2");
  const Region region{kind, gmean_cap};
  FenchelResult best{kInf, {}};
  double best_norm = kInf;
  auto consider = [&](double a, double b) {
    const double v = a * r.P + b * r.N - region.conjugate(a, b);
    const double n = std::hypot(a, b);
    if (v < best.value - 1e-12 || (v <= best.value + 1e-12 && n < best_norm)) {
      if (v < best.value) best.value = v;
      best.point = {a, b};
      best_norm = n;
    }
  };
  const double box = region.box();
  for (std::size_t i = 0; i < resolution; ++i) {
    for (std::size_t j = 0; j < resolution; ++j) {
      const double a = box * static_cast<double>(i) / static_cast<double>(resolution - 1);
      const double b = box * static_cast<double>(j) / static_cast<double>(resolution - 1);
      if (region.contains(a, b)) consider(a, b);
    }
  }
  region.boundary(200 * resolution, consider);
  return best;
}

FenchelReport fenchel_suite(ConcaveKind kind, std::size_t grid) {
  const ConcaveMeasure measure(kind);
  FenchelReport out;
  for (std::size_t i = 0; i < grid; ++i) {
    for (std::size_t j = 0; j < grid; ++j) {
      const RatePair r{static_cast<double>(i) / static_cast<double>(grid - 1),
                       static_cast<double>(j) / static_cast<double>(grid - 1)};
      const double err = std::abs(fenchel_infimum(kind, r).value - measure.link_value(r));
      if (err > out.max_error) {
        out.max_error = err;
        out.worst = r;
      }
    }
  }
  return out;
}

AttainmentReport dual_attainment(ConcaveKind kind, double rate_floor, std::size_t grid,
                                   std::size_t resolution) {
  if (!(rate_floor >= 0.0 && rate_floor < 1.0)) throw InvalidParameter("rate floor must lie in [0, 1)");
  AttainmentReport out;
  switch (kind) {
    case ConcaveKind::Min: out.bound = std::sqrt(2.0); break;
    case ConcaveKind::HMean: out.bound = 2.0; break;
    case ConcaveKind::QMean: out.bound = std::sqrt(0.5); break;
    case ConcaveKind::GMean:
      if (rate_floor <= 0.0) throw InvalidParameter("G-mean attainment needs a positive rate floor");
      out.bound = 1.1 * std::sqrt(1.0 / (4.0 * rate_floor));
      break;
  }
  // Tolerance for boundary points computed in floating point.
  out.bound *= 1.0 + 1e-9;
  for (std::size_t i = 0; i < grid; ++i) {
    for (std::size_t j = 0; j < grid; ++j) {
      const double step = (1.0 - rate_floor) / static_cast<double>(grid - 1);
      const RatePair r{rate_floor + step * static_cast<double>(i),
                       rate_floor + step * static_cast<double>(j)};
      const double n = fenchel_infimum(kind, r, resolution).point.norm();
      if (n > out.max_norm) {
        out.max_norm = n;
        out.worst = r;
      }
    }
  }
  return out;
}

double popular_value(const PseudoLinearMeasure& m, RatePair r) {
  // Counts per positive: TP = P, FN = 1 - P, FP = theta (1 - N), TN = theta N.
  const double th = m.theta();
  const double tp = r.P;
  const double fn = 1.0 - r.P;
  const double fp = th * (1.0 - r.N);
  const double tn = th * r.N;
  switch (m.kind()) {
    case PseudoLinearKind::FBeta: {
      const double b2 = m.param() * m.param();
      return (1 + b2) * tp / ((1 + b2) * tp + b2 * fn + fp);
    }
    case PseudoLinearKind::Jaccard: return tp / (tp + fn + fp);
    case PseudoLinearKind::GowerLegendre:
      return (tp + tn) / (tp + tn + m.param() * (fp + fn));
  }
  return 0.0;
}

namespace {

std::pair<double, double> popular_parts(const PseudoLinearMeasure& m, RatePair r) {
  const double th = m.theta();
  const double tp = r.P;
  const double fn = 1.0 - r.P;
  const double fp = th * (1.0 - r.N);
  const double tn = th * r.N;
  switch (m.kind()) {
    case PseudoLinearKind::FBeta: {
      const double b2 = m.param() * m.param();
      return {(1 + b2) * tp, (1 + b2) * tp + b2 * fn + fp};
    }
    case PseudoLinearKind::Jaccard: return {tp, tp + fn + fp};
    case PseudoLinearKind::GowerLegendre:
      return {tp + tn, tp + tn + m.param() * (fp + fn)};
  }
  return {0.0, 1.0};
}

}  // namespace

std::vector<double> dj_scalar_reference(std::span<const RatePair> set,
                                        const PseudoLinearMeasure& m, double tol,
                                        std::size_t max_iterations) {
  if (set.empty()) throw InvalidParameter("empty classifier set");
  std::vector<double> levels{0.0};
  double v = 0.0;
  for (std::size_t it = 0; it < max_iterations; ++it) {
    std::size_t pick = 0;
    double best = -kInf;
    for (std::size_t i = 0; i < set.size(); ++i) {
      const auto [num, den] = popular_parts(m, set[i]);
      const double score = num - v * den;
      if (score > best) {
        best = score;
        pick = i;
      }
    }
    const auto [num, den] = popular_parts(m, set[pick]);
    const double next = num / den;
    levels.push_back(next);
    if (next <= v + tol) break;
    v = next;
  }
  return levels;
}

DjRateReport djrate_check(PseudoLinearKind kind, double param, double reward_cap,
                          std::size_t sets, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> size_dist(3, 50);
  std::uniform_real_distribution<double> theta_dist(0.25, 20.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  DjRateReport out;
  out.sets = sets;
  for (std::size_t k = 0; k < sets; ++k) {
    const double theta = theta_dist(rng);
    const PseudoLinearMeasure m(kind, param, theta, reward_cap);
    out.rate = std::max(out.rate, m.rate());
    std::vector<RatePair> set(size_dist(rng));
    for (auto& r : set) r = {reward_cap * unit(rng), reward_cap * unit(rng)};

    const FiniteAmTrace am = am_finite(set, m);
    const std::vector<double> dj = dj_scalar_reference(set, m);
    if (dj.size() != am.levels.size()) {
      ++out.mismatches;
    } else {
      for (std::size_t i = 0; i < dj.size(); ++i) {
        if (std::abs(dj[i] - am.levels[i]) > 1e-12) {
          ++out.mismatches;
          break;
        }
      }
    }

    double optimum = -kInf;
    for (const auto& r : set) optimum = std::max(optimum, popular_value(m, r));
    const double rate = m.rate();
    for (std::size_t t = 0; t + 1 < dj.size(); ++t) {
      const double d0 = optimum - dj[t];
      const double d1 = optimum - dj[t + 1];
      ++out.steps;
      if (d1 > rate * d0 + 1e-12) ++out.violations;
      if (d0 > 1e-12) out.max_ratio = std::max(out.max_ratio, d1 / d0);
    }
    const double d0 = optimum - dj.front();
    if (d0 > 1e-12) {
      const double bound = std::ceil(std::log(d0 / 1e-12) / std::log(1.0 / rate)) + 1.0;
      if (static_cast<double>(dj.size() - 1) > bound) ++out.overlong;
    }
  }
  return out;
}

double finite_diff_check(const std::function<double(std::span<const double>)>& f,
                         const std::function<std::vector<double>(std::span<const double>)>& grad,
                         std::span<const double> point, double h) {
  const std::vector<double> g = grad(point);
  if (g.size() != point.size()) throw InvalidParameter("gradient has the wrong dimension");
  std::vector<double> x(point.begin(), point.end());
  double worst = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xi = x[i];
    x[i] = xi + h;
    const double up = f(x);
    x[i] = xi - h;
    const double down = f(x);
    x[i] = xi;
    const double fd = (up - down) / (2 * h);
    worst = std::max(worst, std::abs(g[i] - fd) / std::max(1.0, std::abs(fd)));
  }
  return worst;
}

ThresholdChoice brute_force_threshold(std::span<const double> scores, std::span<const int> labels,
                                      const Measure& measure) {
  if (scores.size() != labels.size()) throw InvalidParameter("scores and labels differ in size");
  std::vector<double> distinct(scores.begin(), scores.end());
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  std::vector<double> candidates{-kInf};
  for (std::size_t i = 0; i + 1 < distinct.size(); ++i) {
    double mid = distinct[i] + (distinct[i + 1] - distinct[i]) / 2;
    if (!(mid < distinct[i + 1])) mid = distinct[i];
    candidates.push_back(mid);
  }
  candidates.push_back(kInf);

  ThresholdChoice best{kInf, -kInf};
  for (double tau : candidates) {
    Confusion c;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      const bool pos = scores[i] > tau;
      if (labels[i] > 0) {
        (pos ? c.tp : c.fn) += 1;
      } else {
        (pos ? c.fp : c.tn) += 1;
      }
    }
    const double v = metric(c, measure);
    if (v > best.value) best = {tau, v};
  }
  return best;
}

namespace {

// Walks thresholds from +inf downwards, moving one block of equal scores to
// the positive side at a time. Ties keep the lowest threshold.
ThresholdChoice descending_sweep(std::span<const double> scores, std::span<const int> labels,
                                 const Measure& measure) {
  std::vector<std::pair<double, int>> items;
  items.reserve(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) items.emplace_back(scores[i], labels[i]);
  std::sort(items.begin(), items.end(),
            [](const auto& x, const auto& y) { return x.first > y.first; });
  Confusion c;
  for (const auto& it : items) (it.second > 0 ? c.fn : c.tn) += 1;
  ThresholdChoice best{kInf, metric(c, measure)};
  std::size_t i = 0;
  while (i < items.size()) {
    const double s = items[i].first;
    while (i < items.size() && items[i].first == s) {
      if (items[i].second > 0) {
        --c.fn;
        ++c.tp;
      } else {
        --c.tn;
        ++c.fp;
      }
      ++i;
    }
    double tau = -kInf;
    if (i < items.size()) {
      const double below = items[i].first;
      tau = below + (s - below) / 2;
      if (!(tau < s)) tau = below;
    }
    const double v = metric(c, measure);
    if (v >= best.value) best = {tau, v};
  }
  return best;
}

}  // namespace

GridSearchResult grid_model_search(std::span<const Sample> samples, const Measure& measure,
                                   std::size_t angles) {
  std::size_t dim = 0;
  for (const auto& s : samples) {
    if (!s.features.empty()) dim = std::max<std::size_t>(dim, s.features.back().index + 1);
  }
  if (dim > 2) throw InvalidParameter("grid search supports at most two features");
  if (angles == 0) throw InvalidParameter("need at least one direction");

  std::vector<std::pair<double, double>> dirs;
  if (dim <= 1) {
    dirs = {{1.0, 0.0}, {-1.0, 0.0}};
  } else {
    for (std::size_t k = 0; k < angles; ++k) {
      const double t = 2 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(angles);
      dirs.emplace_back(std::cos(t), std::sin(t));
    }
  }

  std::vector<int> labels;
  labels.reserve(samples.size());
  for (const auto& s : samples) labels.push_back(s.label);
  std::vector<double> scores(samples.size());

  GridSearchResult best{LinearModel(dim), -kInf};
  for (const auto& [c, s] : dirs) {
    LinearModel w(dim);
    auto wv = w.weights();
    if (dim >= 1) wv[0] = c;
    if (dim >= 2) wv[1] = s;
    for (std::size_t i = 0; i < samples.size(); ++i) scores[i] = w.score(samples[i]);
    const ThresholdChoice t = descending_sweep(scores, labels, measure);
    if (t.value > best.value) {
      best.value = t.value;
      if (std::isinf(t.threshold)) {
        best.model = LinearModel(dim, t.threshold < 0 ? 1.0 : 0.0);
      } else {
        w.set_intercept(-t.threshold);
        best.model = w;
      }
    }
  }
  return best;
}

}  // namespace ndopt::oracle
