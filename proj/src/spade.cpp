#include "ndopt/spade.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ndopt/data.hpp"
#include "ndopt/errors.hpp"
#include "ndopt/eval.hpp"

namespace ndopt {
namespace {

#ifdef NDEBUG
constexpr std::uint64_t kFeasibilityCheckEvery = 1000;
#else
constexpr std::uint64_t kFeasibilityCheckEvery = 1;
#endif

std::size_t data_dim(std::span<const Sample> samples) {
  std::size_t dim = 0;
  for (const auto& s : samples) {
    if (!s.features.empty()) dim = std::max<std::size_t>(dim, s.features.back().index + 1);
  }
  return dim;
}

}  // namespace

SpadeSolver::SpadeSolver(ConcaveMeasure measure, RewardFn reward, double p_hat, std::size_t dim,
                         SpadeConfig config)
    : measure_(measure),
      reward_(reward),
      p_hat_(p_hat),
      config_(config),
      sched_(config.regularize),
      w_(dim),
      averager_(dim) {
  if (!(p_hat > 0.0 && p_hat < 1.0)) throw InvalidParameter("class prior must lie in (0, 1)");
  if (!(config_.radius_w > 0.0)) throw InvalidParameter("R_W must be positive");
  if (measure_.kind() == ConcaveKind::GMean) {
    measure_ = measure_.with_cap(config_.regularize ? 1.0 / std::sqrt(sched_.value(1))
                                                    : config_.gmean_cap);
  }
  dual_ = measure_.project_dual(0.5, 0.5);
}

double SpadeSolver::step_size(std::uint64_t t) noexcept {
  return 1.0 / std::sqrt(static_cast<double>(std::max<std::uint64_t>(t, 1)));
}

void SpadeSolver::step(const Sample& s) {
  const std::uint64_t t = t_ + 1;
  const double eta = config_.primal_scale * step_size(t);
  const double eta_dual = config_.dual_scale * step_size(t);
  const double score = w_.score(s);

  // Rewards at the current iterate w_t feed the dual step.
  const double r_pos = reward_pos(reward_, p_hat_, score, s.label, t, sched_);
  const double r_neg = reward_neg(reward_, p_hat_, score, s.label, t, sched_);

  // Primal ascent on alpha r+ (positives) or beta r- (negatives).
  const double coeff = surrogate_.supergradient_coeff(s.label, score);
  if (coeff != 0.0) {
    const double weight = s.label > 0 ? dual_.alpha / p_hat_ : dual_.beta / (1.0 - p_hat_);
    w_.add_scaled(s.features, config_.fit_intercept ? 1.0 : 0.0, eta * weight * coeff);
    w_.project_to_ball(config_.radius_w);
  }

  // Dual descent.
  const auto [ga, gb] = measure_.conjugate_gradient(dual_);
  const double a = dual_.alpha + eta_dual * ga - eta_dual * r_pos;
  const double b = dual_.beta + eta_dual * gb - eta_dual * r_neg;
  if (measure_.kind() == ConcaveKind::GMean && config_.regularize) {
    measure_ = measure_.with_cap(1.0 / std::sqrt(sched_.value(t)));
  }
  dual_ = measure_.project_dual(a, b);

  t_ = t;
  averager_.add(w_);
  if (t_ % kFeasibilityCheckEvery == 0) check_feasible();
}

void SpadeSolver::check_feasible() const {
  if (!(w_.norm() <= config_.radius_w * (1.0 + 1e-12))) {
    throw std::logic_error("primal iterate left the R_W ball");
  }
  if (!measure_.in_region(dual_, 1e-9)) throw std::logic_error("dual iterate left its region");
}

SpadeResult spade_run(std::span<const Sample> train, std::span<const Sample> test,
                      const ConcaveMeasure& measure, const RewardFn& reward, double p_hat,
                      const SpadeConfig& config, const TraceSink& sink) {
  if (train.empty()) throw DataError("empty training stream");
  const Stopwatch clock(config.timing);
  SpadeSolver solver(measure, reward, p_hat, data_dim(train), config);
  SampleStream stream(train, config.passes, config.seed);
  const std::uint64_t every =
      config.checkpoint_every > 0 ? config.checkpoint_every : checkpoint_interval(train.size());
  const Measure eval_measure = measure;

  SpadeResult result;
  auto checkpoint = [&] {
    const LinearModel avg = solver.average();
    TraceRecord rec;
    rec.t = solver.t();
    rec.elapsed_ms = clock.elapsed_ms();
    rec.train_metric = metric(avg, train, eval_measure);
    rec.test_metric = test.empty() ? 0.0 : metric(avg, test, eval_measure);
    rec.alpha = solver.dual().alpha;
    rec.beta = solver.dual().beta;
    rec.w_norm = avg.norm();
    if (sink) sink(rec);
    result.trace.push_back(rec);
  };

  while (const Sample* s = stream.next()) {
    solver.step(*s);
    const double n = solver.dual().norm();
    result.max_dual_norm = std::max(result.max_dual_norm, n);
    result.max_dual_cap_ratio =
        std::max(result.max_dual_cap_ratio, n / solver.measure().dual_radius_cap());
    if (solver.t() % every == 0) checkpoint();
  }
  if (result.trace.empty() || result.trace.back().t != solver.t()) checkpoint();
  solver.check_feasible();
  result.model = solver.average();
  result.dual = solver.dual();
  return result;
}

}  // namespace ndopt
