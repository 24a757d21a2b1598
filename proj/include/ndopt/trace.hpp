#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace ndopt {

/// Wall-clock milliseconds since construction. A disabled stopwatch always
/// reads 0 so that traces are reproducible byte for byte.
class Stopwatch {
 public:
  explicit Stopwatch(bool enabled = true)
      : enabled_(enabled), start_(std::chrono::steady_clock::now()) {}

  double elapsed_ms() const;

 private:
  bool enabled_;
  std::chrono::steady_clock::time_point start_;
};

/// One convergence-curve point of a per-sample solver.
struct TraceRecord {
  std::uint64_t t = 0;
  double elapsed_ms = 0.0;
  double train_metric = 0.0;
  double test_metric = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double w_norm = 0.0;
};

using TraceSink = std::function<void(const TraceRecord&)>;

/// Checkpoint cadence: every max(1, n / 50) samples.
std::uint64_t checkpoint_interval(std::size_t n);

/// Shortest text that parses back to the same double.
std::string format_double(double v);

/// `t,elapsed_ms,train_metric,test_metric,alpha,beta,w_norm`
void write_trace_csv(std::ostream& out, const std::vector<TraceRecord>& trace);

}  // namespace ndopt
