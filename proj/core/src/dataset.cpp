#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <set>
#include <sstream>

#include "sonn/dataset.hpp"
#include "sonn/errors.hpp"
#include "sonn/random.hpp"

namespace sonn {

void Dataset::validate() const {
  if (features.cols() < 1) throw DataError("dataset has no feature columns");
  if (static_cast<std::size_t>(features.rows()) != labels.size()) {
    throw DataError("feature rows and label count differ");
  }
  if (feature_names.size() != cols()) throw DataError("feature name count differs from columns");
  std::set<std::string> unique(feature_names.begin(), feature_names.end());
  if (unique.size() != feature_names.size()) throw DataError("feature names are not unique");
  if (class_names.size() < 2) throw DataError("fewer than 2 classes");
  for (const int label : labels) {
    if (label < 0 || label >= class_count()) throw DataError("label out of range");
  }
}

Dataset Dataset::subset(std::span<const std::size_t> row_indices) const {
  Dataset out;
  out.feature_names = feature_names;
  out.class_names = class_names;
  out.features.resize(static_cast<Eigen::Index>(row_indices.size()), features.cols());
  out.labels.reserve(row_indices.size());
  for (std::size_t k = 0; k < row_indices.size(); ++k) {
    out.features.row(static_cast<Eigen::Index>(k)) =
        features.row(static_cast<Eigen::Index>(row_indices[k]));
    out.labels.push_back(labels[row_indices[k]]);
  }
  return out;
}

std::vector<std::size_t> Dataset::class_counts() const {
  std::vector<std::size_t> counts(class_names.size(), 0);
  for (const int label : labels) ++counts[static_cast<std::size_t>(label)];
  return counts;
}

std::vector<double> Dataset::binary_targets() const {
  if (class_count() != 2) throw DataError("binary learner needs exactly 2 classes");
  std::vector<double> targets(labels.size());
  std::transform(labels.begin(), labels.end(), targets.begin(),
                 [](int label) { return static_cast<double>(label); });
  return targets;
}

// ---------------------------------------------------------------------------

Dataset NormParams::apply(const Dataset& data) const {
  if (mean.size() != data.cols()) throw DataError("normalization column count mismatch");
  Dataset out = data;
  for (std::size_t c = 0; c < data.cols(); ++c) {
    auto col = out.features.col(static_cast<Eigen::Index>(c));
    col = (col.array() - mean[c]) / sd[c];
  }
  return out;
}

void NormParams::apply_row(std::span<double> row) const {
  if (row.size() != mean.size()) throw DataError("normalization column count mismatch");
  for (std::size_t c = 0; c < row.size(); ++c) row[c] = (row[c] - mean[c]) / sd[c];
}

NormParams NormParams::identity(std::size_t columns) {
  return NormParams{std::vector<double>(columns, 0.0), std::vector<double>(columns, 1.0)};
}

NormParams fit_zscore(const Dataset& data) {
  if (data.rows() == 0) throw DataError("cannot normalize an empty dataset");
  NormParams params;
  const double n = static_cast<double>(data.rows());
  for (std::size_t c = 0; c < data.cols(); ++c) {
    const auto col = data.features.col(static_cast<Eigen::Index>(c));
    const double mean = col.sum() / n;
    const double var = (col.array() - mean).square().sum() / n;
    const double sd = std::sqrt(var);
    params.mean.push_back(mean);
    params.sd.push_back(sd > 0.0 ? sd : 1.0);
  }
  return params;
}

std::pair<Dataset, NormParams> normalize_zscore(const Dataset& data) {
  NormParams params = fit_zscore(data);
  return {params.apply(data), std::move(params)};
}

// ---------------------------------------------------------------------------

namespace {

void check_fractions(const std::vector<double>& fractions) {
  if (fractions.empty()) throw std::invalid_argument("split: no fractions given");
  double total = 0.0;
  for (const double f : fractions) {
    if (!(f > 0.0)) throw std::invalid_argument("split: fractions must be positive");
    total += f;
  }
  if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("split: fractions must sum to 1");
}

// floor(fraction * count) per part, remainder to the first part.
std::vector<std::size_t> part_sizes(std::size_t count, const std::vector<double>& fractions) {
  std::vector<std::size_t> sizes;
  std::size_t assigned = 0;
  for (const double f : fractions) {
    const auto size = static_cast<std::size_t>(std::floor(f * static_cast<double>(count) + 1e-9));
    sizes.push_back(size);
    assigned += size;
  }
  sizes.front() += count - std::min(count, assigned);
  return sizes;
}

}  // namespace

std::vector<std::vector<std::size_t>> split_indices(const Dataset& data, const SplitSpec& spec) {
  check_fractions(spec.fractions);
  Rng rng(spec.seed);
  std::vector<std::vector<std::size_t>> groups;
  if (spec.stratified) {
    groups.resize(static_cast<std::size_t>(data.class_count()));
    for (std::size_t r = 0; r < data.rows(); ++r) {
      groups[static_cast<std::size_t>(data.labels[r])].push_back(r);
    }
  } else {
    groups.emplace_back(data.rows());
    std::iota(groups.front().begin(), groups.front().end(), std::size_t{0});
  }

  std::vector<std::vector<std::size_t>> parts(spec.fractions.size());
  for (auto& group : groups) {
    rng.shuffle(group);
    const auto sizes = part_sizes(group.size(), spec.fractions);
    std::size_t offset = 0;
    for (std::size_t p = 0; p < parts.size(); ++p) {
      parts[p].insert(parts[p].end(), group.begin() + static_cast<std::ptrdiff_t>(offset),
                      group.begin() + static_cast<std::ptrdiff_t>(offset + sizes[p]));
      offset += sizes[p];
    }
  }
  for (auto& part : parts) {
    if (part.empty()) throw DataError("split: a part would be empty");
    std::sort(part.begin(), part.end());
  }
  return parts;
}

std::vector<Dataset> split(const Dataset& data, const SplitSpec& spec) {
  std::vector<Dataset> out;
  for (const auto& part : split_indices(data, spec)) out.push_back(data.subset(part));
  return out;
}

std::vector<double> parse_fractions(std::string_view text) {
  std::vector<double> fractions;
  while (true) {
    const auto colon = text.find(':');
    const std::string_view item = text.substr(0, colon);
    const auto slash = item.find('/');
    auto number = [&](std::string_view s) {
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
        throw std::invalid_argument("bad split fraction '" + std::string(item) + "'");
      }
      return v;
    };
    if (slash == std::string_view::npos) {
      fractions.push_back(number(item));
    } else {
      const double den = number(item.substr(slash + 1));
      if (den == 0.0) throw std::invalid_argument("bad split fraction '" + std::string(item) + "'");
      fractions.push_back(number(item.substr(0, slash)) / den);
    }
    if (colon == std::string_view::npos) break;
    text.remove_prefix(colon + 1);
  }
  check_fractions(fractions);
  return fractions;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> numbered_names(std::size_t m) {
  std::vector<std::string> names;
  for (std::size_t j = 1; j <= m; ++j) names.push_back("x" + std::to_string(j));
  return names;
}

std::vector<std::string> class_ids(int classes) {
  std::vector<std::string> names;
  for (int c = 0; c < classes; ++c) names.push_back(std::to_string(c));
  return names;
}

}  // namespace

Dataset gen_xor(std::size_t n, std::uint64_t seed) {
  if (n < 4) throw std::invalid_argument("gen_xor: n must be at least 4");
  Rng rng(seed);
  Dataset data;
  data.features.resize(static_cast<Eigen::Index>(n), 2);
  for (std::size_t i = 0; i < n; ++i) {
    const double x1 = rng.uniform(-1.0, 1.0);
    const double x2 = rng.uniform(-1.0, 1.0);
    data.features(static_cast<Eigen::Index>(i), 0) = x1;
    data.features(static_cast<Eigen::Index>(i), 1) = x2;
    data.labels.push_back(x1 * x2 > 0.0 ? 1 : 0);
  }
  data.feature_names = {"x1", "x2"};
  data.class_names = class_ids(2);
  return data;
}

SurrogateEeg gen_surrogate_eeg(std::size_t n, std::size_t relevant, std::size_t irrelevant,
                               int classes, std::uint64_t seed, double separation) {
  if (relevant < 1) throw std::invalid_argument("gen_surrogate_eeg: need at least 1 relevant column");
  if (classes < 2) throw std::invalid_argument("gen_surrogate_eeg: need at least 2 classes");
  const std::size_t m = relevant + irrelevant;
  Rng rng(seed);

  std::vector<int> positions(m);
  std::iota(positions.begin(), positions.end(), 0);
  rng.shuffle(positions);
  std::vector<int> informative(positions.begin(),
                               positions.begin() + static_cast<std::ptrdiff_t>(relevant));
  // informative[j] is the column of informative feature j (in generation order)

  SurrogateEeg out;
  Dataset& data = out.data;
  data.features.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
  const double centre = (classes - 1) / 2.0;
  for (std::size_t i = 0; i < n; ++i) {
    const int label = static_cast<int>(rng.index(static_cast<std::size_t>(classes)));
    data.labels.push_back(label);
    for (std::size_t c = 0; c < m; ++c) {
      data.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = rng.normal();
    }
    for (std::size_t j = 0; j < relevant; ++j) {
      const double sign = (j % 2 == 0) ? 1.0 : -1.0;
      data.features(static_cast<Eigen::Index>(i), informative[j]) +=
          separation * (label - centre) * sign;
    }
  }
  data.feature_names = numbered_names(m);
  data.class_names = class_ids(classes);
  std::sort(informative.begin(), informative.end());
  out.informative = std::move(informative);
  return out;
}

Dataset gen_blobs(std::size_t n, int classes, std::size_t dims, std::uint64_t seed,
                  double radius) {
  if (classes < 2) throw std::invalid_argument("gen_blobs: need at least 2 classes");
  if (dims < 2) throw std::invalid_argument("gen_blobs: need at least 2 dimensions");
  Rng rng(seed);
  Dataset data;
  data.features.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dims));
  for (std::size_t i = 0; i < n; ++i) {
    const int label = static_cast<int>(i % static_cast<std::size_t>(classes));
    const double angle = 2.0 * std::numbers::pi * label / classes;
    for (std::size_t d = 0; d < dims; ++d) {
      double centre = 0.0;
      if (d == 0) centre = radius * std::cos(angle);
      if (d == 1) centre = radius * std::sin(angle);
      data.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d)) =
          centre + rng.normal();
    }
    data.labels.push_back(label);
  }
  data.feature_names = numbered_names(dims);
  data.class_names = class_ids(classes);
  return data;
}

Dataset gen_separable(std::size_t n, int classes, std::size_t dims, std::uint64_t seed,
                      double margin) {
  if (classes < 2) throw std::invalid_argument("gen_separable: need at least 2 classes");
  if (dims < 1) throw std::invalid_argument("gen_separable: need at least 1 dimension");
  if (dims < 2 && classes > 2) {
    throw std::invalid_argument("gen_separable: more than 2 classes need at least 2 dimensions");
  }
  Rng rng(seed);
  // Class c owns the direction at angle 2*pi*c/r (plus a random rotation) in
  // the first two dimensions, so every class wins a sector of the box.
  Eigen::MatrixXd truth = Eigen::MatrixXd::Zero(classes, static_cast<Eigen::Index>(dims + 1));
  const double rotation = rng.uniform(0.0, 2.0 * std::numbers::pi);
  for (Eigen::Index c = 0; c < truth.rows(); ++c) {
    if (dims == 1) {
      truth(c, 1) = c == 0 ? 1.0 : -1.0;
      continue;
    }
    const double angle = rotation + 2.0 * std::numbers::pi * static_cast<double>(c) / classes;
    truth(c, 1) = std::cos(angle);
    truth(c, 2) = std::sin(angle);
    for (Eigen::Index d = 3; d < truth.cols(); ++d) truth(c, d) = 0.3 * rng.normal();
  }

  Dataset data;
  data.features.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dims));
  std::vector<std::size_t> per_class(static_cast<std::size_t>(classes), 0);
  const std::size_t quota = (n + static_cast<std::size_t>(classes) - 1) /
                            static_cast<std::size_t>(classes);
  Eigen::VectorXd x(static_cast<Eigen::Index>(dims + 1));
  x(0) = 1.0;
  std::size_t filled = 0;
  std::size_t tries = 0;
  while (filled < n) {
    if (++tries > 1000 * n + 100000) {
      throw std::runtime_error("gen_separable: could not fill classes; reduce margin");
    }
    for (std::size_t d = 0; d < dims; ++d) x(static_cast<Eigen::Index>(d + 1)) = rng.uniform(-1.0, 1.0);
    const Eigen::VectorXd g = truth * x;
    Eigen::Index best = 0;
    g.maxCoeff(&best);
    double runner_up = -std::numeric_limits<double>::infinity();
    for (Eigen::Index c = 0; c < g.size(); ++c) {
      if (c != best) runner_up = std::max(runner_up, g(c));
    }
    if (g(best) - runner_up < margin) continue;
    auto& count = per_class[static_cast<std::size_t>(best)];
    if (count >= quota) continue;
    ++count;
    data.features.row(static_cast<Eigen::Index>(filled)) = x.tail(static_cast<Eigen::Index>(dims));
    data.labels.push_back(static_cast<int>(best));
    ++filled;
  }
  data.feature_names = numbered_names(dims);
  data.class_names = class_ids(classes);
  return data;
}

}  // namespace sonn
