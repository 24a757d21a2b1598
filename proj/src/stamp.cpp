#include "ndopt/stamp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "ndopt/data.hpp"
#include "ndopt/errors.hpp"
#include "ndopt/eval.hpp"

namespace ndopt {
namespace {

std::size_t data_dim(std::span<const Sample> samples) {
  std::size_t dim = 0;
  for (const auto& s : samples) {
    if (!s.features.empty()) dim = std::max<std::size_t>(dim, s.features.back().index + 1);
  }
  return dim;
}

double best_value(std::span<const RatePair> set, const PseudoLinearMeasure& m) {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& r : set) best = std::max(best, m.value(r));
  return best;
}

}  // namespace

std::size_t finite_valuation_argmax(std::span<const RatePair> set, const PseudoLinearMeasure& m,
                                    double level) {
  if (set.empty()) throw InvalidParameter("empty classifier set");
  std::size_t best = 0;
  double best_v = m.valuation(set[0], level);
  for (std::size_t i = 1; i < set.size(); ++i) {
    const double v = m.valuation(set[i], level);
    if (v > best_v) {
      best_v = v;
      best = i;
    }
  }
  return best;
}

FiniteAmTrace am_finite(std::span<const RatePair> set, const PseudoLinearMeasure& m, double tol,
                        std::size_t max_iterations) {
  FiniteAmTrace out;
  out.optimum = best_value(set, m);
  AmState<std::size_t> state;
  out.levels.push_back(state.v);
  out.excess.push_back(out.optimum - state.v);
  auto inner = [&](double v) { return finite_valuation_argmax(set, m, v); };
  auto eval = [&](std::size_t i) { return set[i]; };
  while (state.t < max_iterations) {
    const double previous = state.v;
    am_iterate(state, m, inner, eval);
    out.chosen.push_back(state.w);
    out.levels.push_back(state.v);
    out.excess.push_back(out.optimum - state.v);
    if (state.v <= previous + tol) break;
  }
  out.iterations = state.t;
  return out;
}

NoisyAmTrace noisy_am_simulate(std::span<const RatePair> set, const PseudoLinearMeasure& f1,
                               std::span<const double> eps, std::span<const double> delta,
                               std::size_t initial_index) {
  if (f1.kind() != PseudoLinearKind::FBeta || f1.param() != 1.0 || f1.theta() != 1.0) {
    throw InvalidParameter("noisy AM bound is stated for F1 at theta = 1");
  }
  if (delta.size() < eps.size()) throw InvalidParameter("need one level perturbation per step");
  if (initial_index >= set.size()) throw InvalidParameter("initial index out of range");
  const double m = f1.reward_cap();
  const double eta = 2 * m / (2 + m);
  const double eta_p = 2 * m / (2 - m);
  const double optimum = best_value(set, f1);

  NoisyAmTrace out;
  std::size_t current = initial_index;
  const double delta0 = optimum - f1.value(set[current]);
  out.excess.push_back(delta0);
  out.envelope.push_back(delta0);
  for (std::size_t t = 0; t < eps.size(); ++t) {
    const double level = f1.value(set[current]) + delta[t];
    double vmax = -std::numeric_limits<double>::infinity();
    for (const auto& r : set) vmax = std::max(vmax, f1.valuation(r, level));
    // Worst admissible choice: lowest measure among eps-maximizers.
    std::size_t pick = set.size();
    for (std::size_t i = 0; i < set.size(); ++i) {
      if (f1.valuation(set[i], level) >= vmax - eps[t] &&
          (pick == set.size() || f1.value(set[i]) < f1.value(set[pick]))) {
        pick = i;
      }
    }
    const double realized = vmax - f1.valuation(set[pick], level);
    out.xi.push_back(std::abs(delta[t]) + realized / m);
    current = pick;

    const std::size_t T = t + 1;
    double sum = 0.0;
    for (std::size_t i = 0; i < T; ++i) sum += std::pow(eta, static_cast<double>(T - i)) * out.xi[i];
    const double env = std::pow(eta, static_cast<double>(T)) * delta0 + (eta_p / eta) * sum;
    const double obs = optimum - f1.value(set[current]);
    out.excess.push_back(obs);
    out.envelope.push_back(env);
    if (obs > env + 1e-12) ++out.violations;
  }
  return out;
}

RatePair empirical_rates(const LinearModel& w, std::span<const Sample> samples,
                         const RewardFn& reward) {
  double sp = 0.0;
  double sn = 0.0;
  std::size_t np = 0;
  std::size_t nn = 0;
  for (const auto& s : samples) {
    const double r = reward(s.label, w.score(s));
    if (s.label > 0) {
      sp += r;
      ++np;
    } else {
      sn += r;
      ++nn;
    }
  }
  return {np ? sp / static_cast<double>(np) : 0.0, nn ? sn / static_cast<double>(nn) : 0.0};
}

namespace {

// Full-gradient projected ascent on the surrogate valuation
// wp * mean_pos min(1, s) + wn * mean_neg min(1, -s); keeps the best iterate.
LinearModel maximize_valuation(std::span<const Sample> samples, double wp, double wn,
                               const LinearModel& start, const BatchAmConfig& config) {
  const RewardFn surrogate = RewardFn::truncated_linear();
  std::size_t np = 0;
  for (const auto& s : samples) np += s.label > 0;
  const std::size_t nn = samples.size() - np;
  const double cp = np ? wp / static_cast<double>(np) : 0.0;
  const double cn = nn ? wn / static_cast<double>(nn) : 0.0;
  const double icpt = config.fit_intercept ? 1.0 : 0.0;

  LinearModel w = start;
  LinearModel best = start;
  double best_obj = -std::numeric_limits<double>::infinity();
  std::vector<double> grad(w.dim());
  for (std::size_t k = 1; k <= config.max_inner; ++k) {
    std::fill(grad.begin(), grad.end(), 0.0);
    double grad_b = 0.0;
    double obj = 0.0;
    for (const auto& s : samples) {
      const double score = w.score(s);
      const double c = s.label > 0 ? cp : cn;
      obj += c * surrogate(s.label, score);
      const double g = c * surrogate.supergradient_coeff(s.label, score);
      if (g == 0.0) continue;
      for (const auto& f : s.features) {
        if (f.index < grad.size()) grad[f.index] += g * f.value;
      }
      grad_b += g * icpt;
    }
    if (obj > best_obj) {
      best_obj = obj;
      best = w;
    }
    double gn = grad_b * grad_b;
    for (double g : grad) gn += g * g;
    if (std::sqrt(gn) <= config.grad_tol) break;
    const double eta = config.step_scale / std::sqrt(static_cast<double>(k));
    auto wv = w.weights();
    for (std::size_t i = 0; i < wv.size(); ++i) wv[i] += eta * grad[i];
    w.set_intercept(w.intercept() + eta * grad_b);
    w.project_to_ball(config.radius_w);
  }
  return best;
}

}  // namespace

BatchAmResult batch_am(std::span<const Sample> samples, const PseudoLinearMeasure& m,
                       const RewardFn& level_reward, const BatchAmConfig& config) {
  if (samples.empty()) throw DataError("empty training set");
  BatchAmResult out;
  AmState<LinearModel> state;
  state.w = LinearModel(data_dim(samples));
  out.levels.push_back(state.v);
  auto inner = [&](double v) {
    const auto [wp, wn] = m.valuation_weights(v);
    return maximize_valuation(samples, wp, wn, state.w, config);
  };
  auto eval = [&](const LinearModel& w) {
    const RatePair r = empirical_rates(w, samples, level_reward);
    out.rates.push_back(r);
    return r;
  };
  while (state.t < config.max_outer) {
    const double previous = state.v;
    am_iterate(state, m, inner, eval);
    out.levels.push_back(state.v);
    if (state.v <= previous + config.tol) break;
  }
  out.model = state.w;
  return out;
}

std::pair<std::size_t, std::size_t> epoch_lengths(const StampConfig& config, std::size_t e) {
  if (config.schedule == EpochSchedule::Doubling) {
    if (config.initial == 0) throw InvalidParameter("initial epoch length must be positive");
    const double len = static_cast<double>(config.initial) * std::pow(2.0, static_cast<double>(e));
    const auto s = static_cast<std::size_t>(std::min(len, 1e18));
    return {s, s};
  }
  if (!(config.theory_eta > 0.0 && config.theory_eta < 1.0) || !(config.theory_c > 0.0)) {
    throw InvalidParameter("theoretical schedule needs eta in (0, 1) and c > 0");
  }
  const double len = std::ceil(config.theory_c * std::pow(1.0 / config.theory_eta, 2.0 * static_cast<double>(e)));
  const auto s = static_cast<std::size_t>(std::clamp(len, 1.0, 1e18));
  return {s, s};
}

StampResult stamp_run(std::span<const Sample> train, std::span<const Sample> test,
                      const PseudoLinearMeasure& measure, double p_hat, const StampConfig& config,
                      const std::function<void(const EpochRecord&)>& sink) {
  if (train.empty()) throw DataError("empty training stream");
  if (!(p_hat > 0.0 && p_hat < 1.0)) throw InvalidParameter("class prior must lie in (0, 1)");
  const Stopwatch clock(config.timing);
  const Measure eval_measure = measure;
  const RewardFn surrogate = RewardFn::truncated_linear();
  const double icpt = config.fit_intercept ? 1.0 : 0.0;
  const std::size_t dim = data_dim(train);

  SampleStream stream(train, config.passes, config.seed);
  StampResult out;
  LinearModel w(dim);
  double v = 0.0;
  bool have_model = false;

  for (std::size_t e = 0;; ++e) {
    const auto [s_model, s_level] = epoch_lengths(config, e);

    // Model stage.
    const auto [wp, wn] = measure.valuation_weights(v);
    const double scale_pos = wp / p_hat;
    const double scale_neg = wn / (1.0 - p_hat);
    LinearModel wt = w;
    ModelAverager avg(dim);
    std::size_t done = 0;
    for (; done < s_model; ++done) {
      const Sample* s = stream.next();
      if (s == nullptr) break;
      const double c = surrogate.supergradient_coeff(s->label, wt.score(*s));
      if (c != 0.0) {
        const double eta = config.step_scale / std::sqrt(static_cast<double>(done + 1));
        wt.add_scaled(s->features, icpt, eta * c * (s->label > 0 ? scale_pos : scale_neg));
        wt.project_to_ball(config.radius_w);
      }
      avg.add(wt);
    }
    if (done < s_model) {
      if (!have_model && done > 0) w = config.average_stage ? avg.average() : wt;
      break;
    }
    w = config.average_stage ? avg.average() : wt;
    have_model = true;

    // Level stage on fresh samples.
    double sum_pos = 0.0;
    double sum_neg = 0.0;
    std::size_t n_pos = 0;
    std::size_t n_neg = 0;
    for (std::size_t k = 0; k < s_level; ++k) {
      const Sample* s = stream.next();
      if (s == nullptr) break;
      const double r = config.level_reward(s->label, w.score(*s));
      if (s->label > 0) {
        sum_pos += r;
        ++n_pos;
      } else {
        sum_neg += r;
        ++n_neg;
      }
    }
    if (n_pos + n_neg == 0) break;
    EpochRecord rec;
    rec.epoch = e + 1;
    rec.t_total = stream.consumed();
    rec.P_hat = n_pos ? sum_pos / static_cast<double>(n_pos) : 0.0;
    rec.N_hat = n_neg ? sum_neg / static_cast<double>(n_neg) : 0.0;
    rec.degenerate_level = n_pos == 0;
    v = measure.value({rec.P_hat, rec.N_hat});
    rec.v = v;
    rec.train_metric = metric(w, train, eval_measure);
    rec.test_metric = test.empty() ? rec.train_metric : metric(w, test, eval_measure);
    rec.elapsed_ms = clock.elapsed_ms();
    if (sink) sink(rec);
    out.trace.push_back(rec);
    if (n_pos + n_neg < s_level) break;
  }
  out.model = w;
  return out;
}

void write_epoch_csv(std::ostream& out, const std::vector<EpochRecord>& trace) {
  out << "epoch,t_total,elapsed_ms,v_e,P_hat,N_hat,test_metric\n";
  for (const auto& r : trace) {
    out << r.epoch << ',' << r.t_total << ',' << format_double(r.elapsed_ms) << ','
        << format_double(r.v) << ',' << format_double(r.P_hat) << ',' << format_double(r.N_hat)
        << ',' << format_double(r.test_metric) << '\n';
  }
}

}  // namespace ndopt
