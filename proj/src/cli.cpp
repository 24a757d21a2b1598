#include "ndopt/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "ndopt/baselines.hpp"
#include "ndopt/data.hpp"
#include "ndopt/errors.hpp"
#include "ndopt/eval.hpp"
#include "ndopt/oracle.hpp"
#include "ndopt/spade.hpp"
#include "ndopt/stamp.hpp"
#include "ndopt/trace.hpp"

namespace ndopt::cli {
namespace {

using json = nlohmann::ordered_json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DataOptions {
  std::string data;
  std::string synth;
  std::string split = "0.7,0.1,0.2";
  std::uint64_t seed = 0;
  bool no_normalize = false;
};

struct SolverOptions {
  std::string solver;
  std::string measure;
  std::size_t passes = 25;
  double radius_w = 100.0;
  std::string reward;  // empty: tlin for spade, zeroone for stamp and am
  std::string reg_gmean = "off";
  double gmean_cap = 10.0;
  std::size_t epoch0 = 100;
  std::string schedule = "doubling";
  double theory_eta = 0.5;
  double theory_c = 100.0;
  std::string stage_output = "average";
  std::string timing = "off";
  std::string model_out;
  std::string trace_out;
  std::string out;
};

struct Prepared {
  DataSplit parts;
  DatasetMeta meta;     // of the training split, after scaling
  double scale = 1.0;   // factor applied to every feature
};

void add_data_options(CLI::App* cmd, DataOptions& d) {
  cmd->add_option("--data", d.data, "LIBSVM file");
  cmd->add_option("--synth", d.synth, "Synthetic data: n=...,dim=...,p=...,sep=...");
  cmd->add_option("--split", d.split, "Train,validation,test fractions")->capture_default_str();
  cmd->add_option("--seed", d.seed, "Seed for every random choice")
      ->envname("NDOPT_SEED")
      ->capture_default_str();
  cmd->add_flag("--no-normalize", d.no_normalize, "Skip max-norm feature scaling");
}

std::vector<Sample> load_samples(const DataOptions& d) {
  if (d.data.empty() == d.synth.empty()) {
    throw UsageError("exactly one of --data and --synth is required");
  }
  if (!d.data.empty()) return parse_libsvm(std::filesystem::path(d.data)).samples;
  SynthSpec spec = parse_synth_spec(d.synth);
  spec.seed = d.seed;
  return synth_gaussian(spec);
}

Prepared prepare(const DataOptions& d) {
  const std::vector<Sample> all = load_samples(d);
  Prepared p;
  p.parts = split(all, parse_split_fractions(d.split), d.seed);
  p.meta = compute_meta(p.parts.train);
  if (!d.no_normalize && p.meta.r_x > 0.0) {
    p.scale = 1.0 / p.meta.r_x;
    scale_features(p.parts.train, p.scale);
    scale_features(p.parts.validation, p.scale);
    scale_features(p.parts.test, p.scale);
    p.meta = compute_meta(p.parts.train);
  }
  return p;
}

// Model on scaled features -> same scorer on raw features.
LinearModel unscale(const LinearModel& m, double scale) {
  LinearModel out = m;
  for (double& w : out.weights()) w *= scale;
  return out;
}

void write_model(const std::string& path, const LinearModel& m) {
  std::ofstream f(path);
  if (!f) throw DataError("cannot write " + path);
  f << m.dim() << '\n' << "0:" << format_double(m.intercept()) << '\n';
  const auto w = m.weights();
  for (std::size_t i = 0; i < w.size(); ++i) f << i + 1 << ':' << format_double(w[i]) << '\n';
}

LinearModel read_model(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DataError("cannot open model " + path);
  std::string line;
  std::size_t lineno = 0;
  auto next = [&] {
    while (std::getline(f, line)) {
      ++lineno;
      if (!line.empty()) return true;
    }
    return false;
  };
  if (!next()) throw ParseError(1, "empty model file");
  std::size_t dim = 0;
  try {
    dim = std::stoul(line);
  } catch (const std::exception&) {
    throw ParseError(lineno, "bad dimension");
  }
  LinearModel m(dim);
  while (next()) {
    const auto colon = line.find(':');
    std::size_t idx = 0;
    double val = 0.0;
    try {
      if (colon == std::string::npos) throw std::invalid_argument("no colon");
      idx = std::stoul(line.substr(0, colon));
      val = std::stod(line.substr(colon + 1));
    } catch (const std::exception&) {
      throw ParseError(lineno, "expected index:weight");
    }
    if (idx == 0) {
      m.set_intercept(val);
    } else if (idx <= dim) {
      m.weights()[idx - 1] = val;
    } else {
      throw ParseError(lineno, "index exceeds dimension");
    }
  }
  return m;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw DataError("cannot write " + path);
  return f;
}

RewardFn value_reward(const std::string& token) {
  if (token.empty()) return RewardFn::truncated_linear();
  return parse_reward_kind(token) == RewardKind::ZeroOne ? RewardFn::zero_one()
                                                         : RewardFn::truncated_linear();
}

bool timing_on(const std::string& t) {
  if (t == "wall") return true;
  if (t == "off") return false;
  throw UsageError("--timing must be wall or off");
}

SpadeConfig spade_config(const SolverOptions& o, std::uint64_t seed) {
  SpadeConfig c;
  c.passes = o.passes;
  c.radius_w = o.radius_w;
  c.seed = seed;
  if (o.reg_gmean != "on" && o.reg_gmean != "off") throw UsageError("--reg-gmean must be on or off");
  c.regularize = o.reg_gmean == "on";
  c.gmean_cap = o.gmean_cap;
  c.timing = timing_on(o.timing);
  return c;
}

StampConfig stamp_config(const SolverOptions& o, std::uint64_t seed) {
  StampConfig c;
  if (o.schedule == "doubling") {
    c.schedule = EpochSchedule::Doubling;
  } else if (o.schedule == "theoretical") {
    c.schedule = EpochSchedule::Theoretical;
  } else {
    throw UsageError("--schedule must be doubling or theoretical");
  }
  if (o.stage_output != "average" && o.stage_output != "last") {
    throw UsageError("--stage-output must be average or last");
  }
  c.initial = o.epoch0;
  c.theory_eta = o.theory_eta;
  c.theory_c = o.theory_c;
  c.passes = o.passes;
  c.radius_w = o.radius_w;
  c.seed = seed;
  c.average_stage = o.stage_output == "average";
  if (!o.reward.empty() && parse_reward_kind(o.reward) == RewardKind::TruncatedLinear) {
    c.level_reward = RewardFn::truncated_linear().clipped(0.0);
  }
  c.timing = timing_on(o.timing);
  return c;
}

SgdConfig sgd_config(const SolverOptions& o, std::uint64_t seed) {
  SgdConfig c;
  c.passes = o.passes;
  c.radius_w = o.radius_w;
  c.seed = seed;
  c.timing = timing_on(o.timing);
  return c;
}

const ConcaveMeasure& need_concave(const Measure& m, const std::string& solver) {
  if (!is_concave(m)) throw UsageError(solver + " needs a concave measure (min, hmean, qmean, gmean)");
  return std::get<ConcaveMeasure>(m);
}

const PseudoLinearMeasure& need_pseudolinear(const Measure& m, const std::string& solver) {
  if (is_concave(m)) throw UsageError(solver + " needs a pseudo-linear measure (fbeta:B, jaccard, gl:S)");
  return std::get<PseudoLinearMeasure>(m);
}

std::span<const Sample> tuning_set(const Prepared& p) {
  return p.parts.validation.empty() ? std::span<const Sample>(p.parts.train)
                                    : std::span<const Sample>(p.parts.validation);
}

int cmd_train(const DataOptions& d, const SolverOptions& o, std::ostream& out) {
  const Prepared p = prepare(d);
  const Measure measure = parse_measure(o.measure, p.meta.theta_hat);
  const auto& train = p.parts.train;
  const auto& test = p.parts.test;
  LinearModel model;
  std::ostringstream trace;

  if (o.solver == "spade") {
    const auto& m = need_concave(measure, o.solver);
    const SpadeResult r =
        spade_run(train, test, m, value_reward(o.reward), p.meta.p_hat, spade_config(o, d.seed));
    model = r.model;
    write_trace_csv(trace, r.trace);
  } else if (o.solver == "stamp") {
    const auto& m = need_pseudolinear(measure, o.solver);
    const StampResult r = stamp_run(train, test, m, p.meta.p_hat, stamp_config(o, d.seed));
    model = r.model;
    write_epoch_csv(trace, r.trace);
  } else if (o.solver == "am") {
    const auto& m = need_pseudolinear(measure, o.solver);
    BatchAmConfig c;
    c.radius_w = o.radius_w;
    const BatchAmResult r = batch_am(train, m, stamp_config(o, d.seed).level_reward, c);
    model = r.model;
    trace << "iteration,v,P,N\n";
    for (std::size_t i = 0; i < r.rates.size(); ++i) {
      trace << i + 1 << ',' << format_double(r.levels[i + 1]) << ','
            << format_double(r.rates[i].P) << ',' << format_double(r.rates[i].N) << '\n';
    }
  } else if (o.solver == "sgd" || o.solver == "plugin") {
    const SgdResult r = sgd_baseline(train, test, measure, sgd_config(o, d.seed));
    model = r.model;
    if (o.solver == "plugin") {
      model = apply_threshold(model, plugin_threshold(model, tuning_set(p), measure).threshold);
    }
    write_trace_csv(trace, r.trace);
  } else {
    throw UsageError("--solver must be one of spade, stamp, am, sgd, plugin");
  }

  if (!o.model_out.empty()) write_model(o.model_out, unscale(model, p.scale));
  if (!o.trace_out.empty()) open_out(o.trace_out) << trace.str();
  json summary;
  summary["solver"] = o.solver;
  summary["measure"] = measure_name(measure);
  summary["train_metric"] = metric(model, train, measure);
  if (!test.empty()) summary["test_metric"] = metric(model, test, measure);
  out << summary.dump() << '\n';
  return kOk;
}

int cmd_evaluate(const DataOptions& d, const std::string& model_path, const std::string& token,
                 std::ostream& out) {
  const std::vector<Sample> samples = load_samples(d);
  const DatasetMeta meta = compute_meta(samples);
  const LinearModel model = read_model(model_path);
  const Measure measure = parse_measure(token, meta.theta_hat);
  const Confusion c = confusion(model, samples);
  const RatePair r = rates(c);
  json j;
  j["P"] = r.P;
  j["N"] = r.N;
  j["value"] = metric(c, measure);
  out << j.dump() << '\n';
  return kOk;
}

int cmd_bench(const DataOptions& d, const SolverOptions& o, std::ostream& out) {
  const Prepared p = prepare(d);
  const Measure measure = parse_measure(o.measure, p.meta.theta_hat);
  const auto& train = p.parts.train;
  const auto& test = p.parts.test;
  const std::uint64_t every = checkpoint_interval(train.size());

  std::ostringstream csv;
  csv << "method,t,elapsed_ms,train_metric,test_metric\n";
  auto row = [&](const std::string& method, std::uint64_t t, double ms, double tr, double te) {
    csv << method << ',' << t << ',' << format_double(ms) << ',' << format_double(tr) << ','
        << format_double(te) << '\n';
  };

  if (o.solver == "spade") {
    const auto& m = need_concave(measure, o.solver);
    SpadeConfig c = spade_config(o, d.seed);
    c.checkpoint_every = every;
    const SpadeResult r = spade_run(train, test, m, value_reward(o.reward), p.meta.p_hat, c);
    for (const auto& rec : r.trace) row("spade", rec.t, rec.elapsed_ms, rec.train_metric, rec.test_metric);
  } else if (o.solver == "stamp") {
    const auto& m = need_pseudolinear(measure, o.solver);
    const StampResult r = stamp_run(train, test, m, p.meta.p_hat, stamp_config(o, d.seed));
    for (const auto& rec : r.trace) {
      row("stamp", rec.t_total, rec.elapsed_ms, rec.train_metric, rec.test_metric);
    }
  } else {
    throw UsageError("bench --solver must be spade or stamp");
  }

  SgdConfig c = sgd_config(o, d.seed);
  c.checkpoint_every = every;
  c.keep_checkpoints = true;
  const SgdResult r = sgd_baseline(train, test, measure, c);
  for (const auto& rec : r.trace) row("sgd", rec.t, rec.elapsed_ms, rec.train_metric, rec.test_metric);
  const Stopwatch tune_clock(c.timing);
  for (std::size_t i = 0; i < r.trace.size(); ++i) {
    const LinearModel& m = r.checkpoints[i];
    const LinearModel tuned =
        apply_threshold(m, plugin_threshold(m, tuning_set(p), measure).threshold);
    const double ms = c.timing ? r.trace[i].elapsed_ms + tune_clock.elapsed_ms() : 0.0;
    row("plugin", r.trace[i].t, ms, metric(tuned, train, measure),
        test.empty() ? 0.0 : metric(tuned, test, measure));
  }

  if (o.out.empty()) {
    out << csv.str();
  } else {
    open_out(o.out) << csv.str();
  }
  return kOk;
}

struct VerifyOptions {
  std::string what;
  std::string measure;
  std::size_t grid = 21;
  std::size_t sets = 200;
  std::uint64_t seed = 0;
  double rate_floor = -1.0;
  double reward_cap = 1.0;
};

int cmd_verify(const VerifyOptions& v, std::ostream& out) {
  json j;
  j["check"] = v.what;
  j["measure"] = v.measure;
  bool pass = false;
  if (v.what == "fenchel" || v.what == "attainment") {
    const ConcaveKind kind = parse_concave_kind(v.measure);
    if (v.what == "fenchel") {
      const oracle::FenchelReport r = oracle::fenchel_suite(kind, v.grid);
      j["max_error"] = r.max_error;
      j["tolerance"] = 1e-3;
      pass = r.max_error <= 1e-3;
    } else {
      double floor = v.rate_floor;
      if (floor < 0.0) floor = kind == ConcaveKind::GMean ? 0.01 : 0.0;
      const oracle::AttainmentReport r = oracle::dual_attainment(kind, floor, v.grid);
      j["max_norm"] = r.max_norm;
      j["bound"] = r.bound;
      pass = r.ok();
    }
  } else if (v.what == "djrate") {
    const auto [kind, param] = parse_pseudolinear_token(v.measure);
    const oracle::DjRateReport r = oracle::djrate_check(kind, param, v.reward_cap, v.sets, v.seed);
    j["sets"] = r.sets;
    j["steps"] = r.steps;
    j["violations"] = r.violations;
    j["mismatches"] = r.mismatches;
    j["overlong"] = r.overlong;
    j["max_ratio"] = r.max_ratio;
    pass = r.violations == 0 && r.mismatches == 0 && r.overlong == 0;
  } else {
    throw UsageError("verify target must be fenchel, attainment or djrate");
  }
  j["pass"] = pass;
  out << j.dump() << '\n';
  return pass ? kOk : kVerifyFailed;
}

void add_solver_options(CLI::App* cmd, SolverOptions& o, bool bench) {
  cmd->add_option("--solver", o.solver, bench ? "spade or stamp" : "spade, stamp, am, sgd or plugin")
      ->required();
  cmd->add_option("--measure", o.measure, "min, hmean, qmean, gmean, fbeta:B, jaccard, gl:S")
      ->required();
  cmd->add_option("--passes", o.passes, "Passes over the training split")->capture_default_str();
  cmd->add_option("--rw", o.radius_w, "Radius of the weight ball")->capture_default_str();
  cmd->add_option("--reward", o.reward, "Reward feeding dual and level updates: tlin or zeroone "
                 "(default tlin for spade, zeroone for stamp and am)");
  cmd->add_option("--reg-gmean", o.reg_gmean, "on: add t^(-1/4) to rewards and cap the G-mean dual")
      ->capture_default_str();
  cmd->add_option("--gmean-cap", o.gmean_cap, "G-mean dual radius without regularization")
      ->capture_default_str();
  cmd->add_option("--epoch0", o.epoch0, "First STAMP epoch length")->capture_default_str();
  cmd->add_option("--schedule", o.schedule, "doubling or theoretical")->capture_default_str();
  cmd->add_option("--theory-eta", o.theory_eta, "Theoretical schedule eta")->capture_default_str();
  cmd->add_option("--theory-c", o.theory_c, "Theoretical schedule constant")->capture_default_str();
  cmd->add_option("--stage-output", o.stage_output, "STAMP model stage output: average or last")
      ->capture_default_str();
  cmd->add_option("--timing", o.timing, "Trace clock: off (reproducible) or wall")
      ->capture_default_str();
  if (bench) {
    cmd->add_option("--out", o.out, "CSV output (stdout if omitted)");
  } else {
    cmd->add_option("--model-out", o.model_out, "Model file");
    cmd->add_option("--trace-out", o.trace_out, "Trace CSV");
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Training and checking classifiers for non-decomposable measures", "ndopt"};
  app.set_config("--config", "", "key=value file; flags override it");
  app.require_subcommand(1);

  DataOptions train_data;
  SolverOptions train_opts;
  auto* train = app.add_subcommand("train", "Train a model");
  add_data_options(train, train_data);
  add_solver_options(train, train_opts, false);

  DataOptions eval_data;
  std::string eval_model;
  std::string eval_measure;
  auto* evaluate = app.add_subcommand("evaluate", "Rates and measure value of a model on a file");
  add_data_options(evaluate, eval_data);
  evaluate->add_option("--model", eval_model, "Model file")->required();
  evaluate->add_option("--measure", eval_measure, "Measure token")->required();

  DataOptions bench_data;
  SolverOptions bench_opts;
  auto* bench = app.add_subcommand("bench", "Solver against sgd and plugin baselines");
  add_data_options(bench, bench_data);
  add_solver_options(bench, bench_opts, true);

  VerifyOptions verify_opts;
  auto* verify = app.add_subcommand("verify", "Brute-force checks of the theory");
  verify->add_option("check", verify_opts.what, "fenchel, attainment or djrate")->required();
  verify->add_option("--measure", verify_opts.measure, "Measure token")->required();
  verify->add_option("--grid", verify_opts.grid, "Rate grid size")->capture_default_str();
  verify->add_option("--sets", verify_opts.sets, "Random classifier sets")->capture_default_str();
  verify->add_option("--seed", verify_opts.seed, "Seed")->envname("NDOPT_SEED");
  verify->add_option("--rate-floor", verify_opts.rate_floor, "Smallest rate on the grid");
  verify->add_option("--reward-cap", verify_opts.reward_cap, "Reward cap m")->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (train->parsed()) return cmd_train(train_data, train_opts, out);
    if (evaluate->parsed()) return cmd_evaluate(eval_data, eval_model, eval_measure, out);
    if (bench->parsed()) return cmd_bench(bench_data, bench_opts, out);
    return cmd_verify(verify_opts, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kDataError;
  } catch (const InvalidParameter& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const RegularityError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << '\n';
    return kVerifyFailed;
  }
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace ndopt::cli
