#ifndef SONN_DATASET_HPP
#define SONN_DATASET_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace sonn {

/// Labelled examples: an n x m feature matrix, one class id per row and the
/// names of both the feature columns and the classes. `class_names[c]` is the
/// original label text of class id c.
struct Dataset {
  Eigen::MatrixXd features;
  std::vector<int> labels;
  std::vector<std::string> feature_names;
  std::vector<std::string> class_names;

  std::size_t rows() const { return static_cast<std::size_t>(features.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(features.cols()); }
  int class_count() const { return static_cast<int>(class_names.size()); }

  // Throws DataError when a structural invariant does not hold.
  void validate() const;

  Dataset subset(std::span<const std::size_t> row_indices) const;
  std::vector<std::size_t> class_counts() const;
  // Labels as 0/1 reals; requires a two-class dataset.
  std::vector<double> binary_targets() const;
};

// ---------------------------------------------------------------------------
// CSV

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::optional<std::size_t> column(std::string_view name) const;
};

// Comma separated, '.' decimal point, optional double-quoted fields ("" escapes
// a quote inside a quoted field), first row is the header.
CsvTable parse_csv(std::string_view text);
CsvTable read_csv(const std::filesystem::path& path);

struct LoadOptions {
  std::string label_column = "y";
  // Non-feature columns to skip (e.g. a recording id used for grouping).
  std::vector<std::string> exclude;
  // Fixed label mapping, e.g. the one stored in a model file. When absent the
  // mapping is derived from the data.
  std::optional<std::vector<std::string>> class_names;
};

Dataset dataset_from_table(const CsvTable& table, const LoadOptions& options);
Dataset load_csv(const std::filesystem::path& path, const std::string& label_column);
Dataset load_csv(const std::filesystem::path& path, const LoadOptions& options);

// Shortest decimal text that parses back to exactly the same double.
std::string format_double(double value);

void write_csv(const Dataset& data, std::ostream& out,
               const std::string& label_column = "y");
void write_csv(const Dataset& data, const std::filesystem::path& path,
               const std::string& label_column = "y");

// ---------------------------------------------------------------------------
// Normalization

/// Per-column z-score parameters (population standard deviation). Constant
/// columns carry sd = 1 so the transform only removes the mean.
struct NormParams {
  std::vector<double> mean;
  std::vector<double> sd;

  Dataset apply(const Dataset& data) const;
  void apply_row(std::span<double> row) const;
  static NormParams identity(std::size_t columns);
};

NormParams fit_zscore(const Dataset& data);
std::pair<Dataset, NormParams> normalize_zscore(const Dataset& data);

// ---------------------------------------------------------------------------
// Splits

struct SplitSpec {
  std::vector<double> fractions;
  std::uint64_t seed = 0;
  bool stratified = true;
};

// Part sizes are floor(fraction * count) with the remainder going to the first
// part; with `stratified` the rule is applied per class. Rows inside a part
// keep their original relative order.
std::vector<std::vector<std::size_t>> split_indices(const Dataset& data,
                                                    const SplitSpec& spec);
std::vector<Dataset> split(const Dataset& data, const SplitSpec& spec);

// Parses "2/3:1/3" or "0.7:0.3".
std::vector<double> parse_fractions(std::string_view text);

// ---------------------------------------------------------------------------
// Synthetic data

// Continuous XOR on [-1,1]^2: label 1 iff x1 * x2 > 0.
Dataset gen_xor(std::size_t n, std::uint64_t seed);

struct SurrogateEeg {
  Dataset data;
  std::vector<int> informative;  // ascending column indices
};

// `relevant` informative columns at seeded random positions among
// relevant + irrelevant columns. Informative column j of a class-c row is
// N(separation * (c - (r-1)/2) * s_j, 1) with s_j = +1 for even j, -1 for odd
// j; every other column is N(0, 1). Classes are drawn uniformly.
SurrogateEeg gen_surrogate_eeg(std::size_t n, std::size_t relevant,
                               std::size_t irrelevant, int classes,
                               std::uint64_t seed, double separation = 1.0);

// `classes` isotropic Gaussian blobs (unit sd) whose centres sit evenly on a
// circle of `radius` in the first two dimensions.
Dataset gen_blobs(std::size_t n, int classes, std::size_t dims, std::uint64_t seed,
                  double radius = 3.0);

// Points uniform on [-1,1]^dims labelled by a random linear machine; points
// whose top two discriminants differ by less than `margin` are rejected, so
// the result is linearly separable with that margin.
Dataset gen_separable(std::size_t n, int classes, std::size_t dims,
                      std::uint64_t seed, double margin = 0.1);

}  // namespace sonn

#endif  // SONN_DATASET_HPP
