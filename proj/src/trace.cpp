#include "ndopt/trace.hpp"

#include <algorithm>
#include <charconv>
#include <ostream>

namespace ndopt {

double Stopwatch::elapsed_ms() const {
  if (!enabled_) return 0.0;
  const auto d = std::chrono::steady_clock::now() - start_;
  return std::chrono::duration<double, std::milli>(d).count();
}

std::uint64_t checkpoint_interval(std::size_t n) {
  return std::max<std::uint64_t>(1, n / 50);
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRecord>& trace) {
  out << "t,elapsed_ms,train_metric,test_metric,alpha,beta,w_norm\n";
  for (const auto& r : trace) {
    out << r.t << ',' << format_double(r.elapsed_ms) << ',' << format_double(r.train_metric) << ','
        << format_double(r.test_metric) << ',' << format_double(r.alpha) << ','
        << format_double(r.beta) << ',' << format_double(r.w_norm) << '\n';
  }
}

}  // namespace ndopt
