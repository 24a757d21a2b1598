#include "ndopt/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include "ndopt/errors.hpp"

namespace ndopt {
namespace {

bool parse_double(std::string_view s, double& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto* end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, out);
  return res.ec == std::errc() && res.ptr == end && !s.empty();
}

int parse_label(std::string_view tok, std::size_t line) {
  double v = 0.0;
  if (!parse_double(tok, v)) throw ParseError(line, "bad label '" + std::string(tok) + "'");
  if (v == 1.0) return 1;
  if (v == -1.0 || v == 0.0) return -1;
  throw ParseError(line, "label must be -1, +1, 0 or 1");
}

std::vector<std::string_view> tokenize(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace

DatasetMeta compute_meta(std::span<const Sample> samples) {
  if (samples.empty()) throw DataError("empty sample set");
  DatasetMeta m;
  m.n = samples.size();
  for (const auto& s : samples) {
    if (s.label > 0) ++m.positives;
    if (!s.features.empty()) m.dim = std::max<std::size_t>(m.dim, s.features.back().index + 1);
    m.r_x = std::max(m.r_x, std::sqrt(squared_norm(s.features)));
  }
  if (m.positives == 0 || m.positives == m.n) throw DataError("sample set contains a single class");
  m.p_hat = static_cast<double>(m.positives) / static_cast<double>(m.n);
  m.theta_hat = static_cast<double>(m.n - m.positives) / static_cast<double>(m.positives);
  return m;
}

Dataset parse_libsvm(std::istream& in) {
  Dataset ds;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view(line);
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    const auto toks = tokenize(view);
    if (toks.empty()) continue;
    Sample s;
    s.label = parse_label(toks[0], lineno);
    for (std::size_t k = 1; k < toks.size(); ++k) {
      const auto tok = toks[k];
      const auto colon = tok.find(':');
      if (colon == std::string_view::npos) throw ParseError(lineno, "expected idx:val, got '" + std::string(tok) + "'");
      const auto idx_s = tok.substr(0, colon);
      unsigned long long idx = 0;
      const auto res = std::from_chars(idx_s.data(), idx_s.data() + idx_s.size(), idx);
      if (res.ec != std::errc() || res.ptr != idx_s.data() + idx_s.size() || idx == 0 ||
          idx > 0xffffffffULL) {
        throw ParseError(lineno, "bad feature index '" + std::string(idx_s) + "'");
      }
      double val = 0.0;
      if (!parse_double(tok.substr(colon + 1), val) || !std::isfinite(val)) {
        throw ParseError(lineno, "bad feature value in '" + std::string(tok) + "'");
      }
      s.features.push_back({static_cast<std::uint32_t>(idx - 1), val});
    }
    std::sort(s.features.begin(), s.features.end(),
              [](const Feature& a, const Feature& b) { return a.index < b.index; });
    for (std::size_t k = 1; k < s.features.size(); ++k) {
      if (s.features[k].index == s.features[k - 1].index) throw ParseError(lineno, "duplicate feature index");
    }
    ds.samples.push_back(std::move(s));
  }
  if (ds.samples.empty()) throw DataError("no samples in input");
  ds.meta = compute_meta(ds.samples);
  return ds;
}

Dataset parse_libsvm(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  return parse_libsvm(in);
}

void write_libsvm(std::ostream& out, std::span<const Sample> samples) {
  std::ostringstream buf;
  buf << std::setprecision(17);
  for (const auto& s : samples) {
    buf << (s.label > 0 ? "+1" : "-1");
    for (const auto& f : s.features) buf << ' ' << (f.index + 1) << ':' << f.value;
    buf << '\n';
  }
  out << buf.str();
}

DataSplit split(std::span<const Sample> samples, SplitFractions fr, std::uint64_t seed) {
  if (fr.train < 0 || fr.validation < 0 || fr.test < 0 ||
      std::abs(fr.train + fr.validation + fr.test - 1.0) > 1e-9) {
    throw InvalidParameter("split fractions must be nonnegative and sum to 1");
  }
  std::vector<std::uint32_t> pos;
  std::vector<std::uint32_t> neg;
  for (std::uint32_t i = 0; i < samples.size(); ++i) (samples[i].label > 0 ? pos : neg).push_back(i);

  std::mt19937_64 rng(seed);
  std::vector<int> assignment(samples.size(), 0);
  for (auto* cls : {&pos, &neg}) {
    std::shuffle(cls->begin(), cls->end(), rng);
    const auto n = static_cast<double>(cls->size());
    const auto n_train = static_cast<std::size_t>(std::llround(fr.train * n));
    const auto n_val = std::min(cls->size() - std::min(n_train, cls->size()),
                                static_cast<std::size_t>(std::llround(fr.validation * n)));
    const std::size_t n_tr = std::min(n_train, cls->size());
    const std::size_t n_test = cls->size() - n_tr - n_val;
    if ((fr.train > 0 && n_tr == 0) || (fr.validation > 0 && n_val == 0) || (fr.test > 0 && n_test == 0)) {
      throw DataError("split would leave a partition without one of the classes");
    }
    for (std::size_t k = 0; k < cls->size(); ++k) {
      assignment[(*cls)[k]] = k < n_tr ? 0 : (k < n_tr + n_val ? 1 : 2);
    }
  }
  DataSplit out;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    auto& dst = assignment[i] == 0 ? out.train : (assignment[i] == 1 ? out.validation : out.test);
    dst.push_back(samples[i]);
  }
  return out;
}

SplitFractions parse_split_fractions(std::string_view text) {
  std::vector<double> parts;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto piece = text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    double v = 0.0;
    if (!parse_double(piece, v)) throw InvalidParameter("bad split fraction '" + std::string(piece) + "'");
    parts.push_back(v);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (parts.size() != 3) throw InvalidParameter("split needs three fractions");
  return SplitFractions{parts[0], parts[1], parts[2]};
}

SampleStream::SampleStream(std::span<const Sample> samples, std::size_t passes, std::uint64_t seed)
    : samples_(samples), passes_(passes), seed_(seed), order_(samples.size()) {
  std::iota(order_.begin(), order_.end(), 0u);
  if (!samples_.empty() && passes_ > 0) reshuffle();
}

void SampleStream::reshuffle() {
  std::iota(order_.begin(), order_.end(), 0u);
  std::mt19937_64 rng(seed_ + pass_);
  std::shuffle(order_.begin(), order_.end(), rng);
}

const Sample* SampleStream::next() {
  if (samples_.empty() || pass_ >= passes_) return nullptr;
  const Sample* s = &samples_[order_[pos_]];
  ++consumed_;
  if (++pos_ == samples_.size()) {
    pos_ = 0;
    if (++pass_ < passes_) reshuffle();
  }
  return s;
}

std::vector<Sample> synth_gaussian(const SynthSpec& spec) {
  if (spec.n == 0 || spec.dim == 0) throw InvalidParameter("synthetic data needs n, dim > 0");
  if (!(spec.p > 0.0 && spec.p < 1.0)) throw InvalidParameter("synthetic prior must lie in (0, 1)");
  const auto positives = static_cast<std::size_t>(std::llround(spec.p * static_cast<double>(spec.n)));
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<Sample> out(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) {
    Sample& s = out[i];
    s.label = i < positives ? 1 : -1;
    s.features.resize(spec.dim);
    for (std::size_t d = 0; d < spec.dim; ++d) {
      double v = gauss(rng);
      if (d == 0) v += s.label * spec.separation / 2.0;
      s.features[d] = {static_cast<std::uint32_t>(d), v};
    }
  }
  std::shuffle(out.begin(), out.end(), rng);
  return out;
}

SynthSpec parse_synth_spec(std::string_view text) {
  SynthSpec spec;
  std::size_t start = 0;
  while (start < text.size()) {
    const auto comma = text.find(',', start);
    const auto item = text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) throw InvalidParameter("bad synth item '" + std::string(item) + "'");
    const auto key = item.substr(0, eq);
    double v = 0.0;
    if (!parse_double(item.substr(eq + 1), v)) throw InvalidParameter("bad synth value in '" + std::string(item) + "'");
    if (key == "n") {
      spec.n = static_cast<std::size_t>(v);
    } else if (key == "dim") {
      spec.dim = static_cast<std::size_t>(v);
    } else if (key == "p") {
      spec.p = v;
    } else if (key == "sep") {
      spec.separation = v;
    } else {
      throw InvalidParameter("unknown synth key '" + std::string(key) + "'");
    }
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return spec;
}

double max_norm(std::span<const Sample> samples) {
  double r = 0.0;
  for (const auto& s : samples) r = std::max(r, squared_norm(s.features));
  return std::sqrt(r);
}

void scale_features(std::vector<Sample>& samples, double factor) {
  for (auto& s : samples) {
    for (auto& f : s.features) f.value *= factor;
  }
}

}  // namespace ndopt
