#include <doctest.h>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "ndopt/cli.hpp"

namespace fs = std::filesystem;
using ndopt::cli::run;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result call(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "ndopt_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

const std::string kSynth = "n=2000,dim=2,p=0.1,sep=2";

}  // namespace

TEST_CASE("train without data is a usage error") {
  const Result r = call({"train", "--solver", "spade", "--measure", "qmean"});
  CHECK(r.code == ndopt::cli::kUsage);
  CHECK(r.err.find("--data") != std::string::npos);
  CHECK(call({}).code == ndopt::cli::kUsage);
  CHECK(call({"train", "--solver", "spade", "--measure", "qmean", "--synth", kSynth, "--data", "x"}).code ==
        ndopt::cli::kUsage);
  CHECK(call({"train", "--solver", "nope", "--measure", "qmean", "--synth", kSynth}).code == ndopt::cli::kUsage);
  CHECK(call({"train", "--solver", "spade", "--measure", "fbeta:1", "--synth", kSynth}).code ==
        ndopt::cli::kUsage);
}

TEST_CASE("STAMP training is reproducible byte for byte") {
  const fs::path a = scratch("a.model"), b = scratch("b.model"), ta = scratch("a.csv"), tb = scratch("b.csv");
  for (const auto& [model, trace] : {std::pair{a, ta}, std::pair{b, tb}}) {
    const Result r = call({"train", "--solver", "stamp", "--measure", "fbeta:1", "--synth", kSynth, "--seed", "7",
                           "--model-out", model.string(), "--trace-out", trace.string()});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["solver"] == "stamp");
    CHECK(j["test_metric"].get<double>() > 0.0);
  }
  CHECK(slurp(a) == slurp(b));
  CHECK(slurp(ta) == slurp(tb));
  CHECK(slurp(a).rfind("2\n0:", 0) == 0);
  CHECK(slurp(ta).rfind("epoch,t_total,elapsed_ms,v_e,P_hat,N_hat,test_metric\n", 0) == 0);
}

TEST_CASE("every solver trains and its model evaluates on a LIBSVM file") {
  const fs::path data = scratch("d.svm");
  {
    std::ofstream f(data);
    for (int i = 0; i < 200; ++i) {
      const bool pos = i % 4 == 0;
      f << (pos ? "+1" : "-1") << " 1:" << (pos ? 1.0 : -1.0) + 0.01 * (i % 7) << " 2:" << 0.1 * (i % 5) << '\n';
    }
  }
  for (const auto& [solver, measure] : {std::pair{"spade", "gmean"}, std::pair{"stamp", "jaccard"},
                                        std::pair{"am", "fbeta:1"}, std::pair{"sgd", "fbeta:1"},
                                        std::pair{"plugin", "hmean"}}) {
    CAPTURE(solver);
    const fs::path model = scratch(std::string(solver) + ".model");
    const Result t = call({"train", "--solver", solver, "--measure", measure, "--data", data.string(),
                           "--passes", "5", "--model-out", model.string()});
    REQUIRE(t.code == 0);
    const Result e = call({"evaluate", "--data", data.string(), "--model", model.string(), "--measure", measure});
    REQUIRE(e.code == 0);
    const auto j = nlohmann::json::parse(e.out);
    CHECK(j["value"].get<double>() >= 0.0);
    CHECK(j["value"].get<double>() <= 1.0);
    CHECK(j.contains("P"));
    CHECK(j.contains("N"));
  }
}

TEST_CASE("bench CSV schema") {
  const fs::path out = scratch("bench.csv");
  const Result r = call({"bench", "--solver", "spade", "--measure", "qmean", "--synth", kSynth, "--passes", "2",
                         "--out", out.string()});
  REQUIRE(r.code == 0);
  std::istringstream csv(slurp(out));
  std::string line;
  std::getline(csv, line);
  CHECK(line == "method,t,elapsed_ms,train_metric,test_metric");
  std::set<std::string> methods;
  std::set<std::pair<std::string, std::string>> keys;
  while (std::getline(csv, line)) {
    std::istringstream row(line);
    std::string method, t;
    std::getline(row, method, ',');
    std::getline(row, t, ',');
    methods.insert(method);
    CHECK(keys.insert({method, t}).second);
  }
  CHECK(methods == std::set<std::string>{"spade", "sgd", "plugin"});
  CHECK(call({"bench", "--solver", "am", "--measure", "fbeta:1", "--synth", kSynth}).code == ndopt::cli::kUsage);
}

TEST_CASE("verify exit codes") {
  Result r = call({"verify", "fenchel", "--measure", "qmean", "--grid", "5"});
  CHECK(r.code == 0);
  CHECK(nlohmann::json::parse(r.out)["pass"] == true);
  r = call({"verify", "djrate", "--measure", "jaccard", "--sets", "20"});
  CHECK(r.code == 0);
  r = call({"verify", "djrate", "--measure", "fbeta:1", "--sets", "50", "--reward-cap", "1.9"});
  CHECK(r.code == ndopt::cli::kUsage);
  CHECK(r.err.find("regularity") != std::string::npos);
  r = call({"verify", "attainment", "--measure", "gmean", "--grid", "5", "--rate-floor", "0.04"});
  CHECK(r.code == 0);
  CHECK(call({"verify", "nothing", "--measure", "qmean"}).code == ndopt::cli::kUsage);
}

TEST_CASE("missing data file is a data error") {
  const Result r = call({"train", "--solver", "sgd", "--measure", "fbeta:1", "--data", "/nonexistent/x.svm"});
  CHECK(r.code == ndopt::cli::kDataError);
}

TEST_CASE("config file and seed from the environment") {
  const fs::path cfg = scratch("train.ini");
  {
    std::ofstream f(cfg);
    f << "[train]\nsolver=sgd\nmeasure=fbeta:1\nsynth=" << '"' << kSynth << '"' << "\npasses=2\n";
  }
  const fs::path m1 = scratch("cfg1.model"), m2 = scratch("cfg2.model"), m3 = scratch("cfg3.model");
  REQUIRE(call({"--config", cfg.string(), "train", "--seed", "11", "--model-out", m1.string()}).code == 0);
  REQUIRE(call({"train", "--solver", "sgd", "--measure", "fbeta:1", "--synth", kSynth, "--passes", "2", "--seed",
                "11", "--model-out", m2.string()})
              .code == 0);
  CHECK(slurp(m1) == slurp(m2));
  ::setenv("NDOPT_SEED", "11", 1);
  REQUIRE(call({"--config", cfg.string(), "train", "--model-out", m3.string()}).code == 0);
  ::unsetenv("NDOPT_SEED");
  CHECK(slurp(m3) == slurp(m1));
  // Flags override the file.
  const Result r = call({"--config", cfg.string(), "train", "--measure", "jaccard"});
  REQUIRE(r.code == 0);
  CHECK(nlohmann::json::parse(r.out)["measure"] == "jaccard");
}
