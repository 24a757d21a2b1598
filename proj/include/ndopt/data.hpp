#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "ndopt/types.hpp"

namespace ndopt {

struct DatasetMeta {
  std::size_t n = 0;
  std::size_t dim = 0;  // max feature index + 1
  std::size_t positives = 0;
  double p_hat = 0.0;
  double theta_hat = 0.0;  // (1 - p) / p
  double r_x = 0.0;        // max sample norm
};

struct Dataset {
  std::vector<Sample> samples;
  DatasetMeta meta;
};

/// Throws DataError for an empty or single-class sample set.
DatasetMeta compute_meta(std::span<const Sample> samples);

/// LIBSVM text: `<label> <idx>:<val> ...` with 1-based indices. Labels are
/// -1/+1, or 0/1 (remapped). Blank lines and `#` comments are skipped.
/// Throws ParseError (with the line number) or DataError.
Dataset parse_libsvm(std::istream& in);
Dataset parse_libsvm(const std::filesystem::path& path);

/// Writes samples with 17 significant digits so parsing round-trips exactly.
void write_libsvm(std::ostream& out, std::span<const Sample> samples);

struct SplitFractions {
  double train = 0.7;
  double validation = 0.1;
  double test = 0.2;
};

struct DataSplit {
  std::vector<Sample> train;
  std::vector<Sample> validation;
  std::vector<Sample> test;
};

/// Stratified split, deterministic under seed. Each split keeps the file
/// order of its members. Throws InvalidParameter if the fractions are
/// negative or do not sum to 1, DataError if a nonempty split would miss a
/// class.
DataSplit split(std::span<const Sample> samples, SplitFractions fractions, std::uint64_t seed);

/// Parses "0.7,0.1,0.2".
SplitFractions parse_split_fractions(std::string_view text);

/// Multi-pass iterator that reshuffles with seed + pass before each pass.
class SampleStream {
 public:
  SampleStream(std::span<const Sample> samples, std::size_t passes, std::uint64_t seed);

  /// Next sample, or nullptr when all passes are exhausted.
  const Sample* next();

  std::size_t consumed() const noexcept { return consumed_; }
  std::size_t total() const noexcept { return samples_.size() * passes_; }
  std::size_t pass() const noexcept { return pass_; }

 private:
  void reshuffle();

  std::span<const Sample> samples_;
  std::size_t passes_;
  std::uint64_t seed_;
  std::vector<std::uint32_t> order_;
  std::size_t pass_ = 0;
  std::size_t pos_ = 0;
  std::size_t consumed_ = 0;
};

struct SynthSpec {
  std::size_t n = 10000;
  std::size_t dim = 2;
  double p = 0.05;
  double separation = 2.0;  // distance between class means, in std units
  std::uint64_t seed = 0;
};

/// Two unit-variance spherical Gaussians with means at +-separation/2 on the
/// first axis. Exactly round(p n) positives, shuffled.
std::vector<Sample> synth_gaussian(const SynthSpec& spec);

/// Parses "n=...,dim=...,p=...,sep=..." on top of the defaults.
SynthSpec parse_synth_spec(std::string_view text);

/// Largest Euclidean norm over the samples.
double max_norm(std::span<const Sample> samples);

/// Multiplies every feature value by factor.
void scale_features(std::vector<Sample>& samples, double factor);

}  // namespace ndopt
