#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "sonn/dataset.hpp"
#include "sonn/errors.hpp"

namespace sonn {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::optional<double> parse_real(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

std::optional<long long> parse_integer(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

bool is_blank(const std::vector<std::string>& row) {
  return row.size() == 1 && trim(row[0]).empty();
}

}  // namespace

std::optional<std::size_t> CsvTable::column(std::string_view name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) return std::nullopt;
  return static_cast<std::size_t>(it - header.begin());
}

CsvTable parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_was_quoted = false;

  auto end_field = [&] {
    record.push_back(field_was_quoted ? field : std::string(trim(field)));
    field.clear();
    field_was_quoted = false;
  };
  auto end_record = [&] {
    end_field();
    if (!is_blank(record)) records.push_back(std::move(record));
    record.clear();
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (in_quotes) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(ch);
      }
      continue;
    }
    switch (ch) {
      case '"':
        in_quotes = true;
        field_was_quoted = true;
        break;
      case ',':
        end_field();
        break;
      case '\n':
        end_record();
        break;
      case '\r':
        break;
      default:
        field.push_back(ch);
    }
  }
  if (in_quotes) throw DataError("csv: unterminated quoted field");
  if (!field.empty() || !record.empty() || field_was_quoted) end_record();

  if (records.empty()) throw DataError("csv: missing header row");
  CsvTable table;
  table.header = std::move(records.front());
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != table.header.size()) {
      std::ostringstream msg;
      msg << "csv: line " << r + 1 << " has " << records[r].size() << " fields, header has "
          << table.header.size();
      throw DataError(msg.str());
    }
    table.rows.push_back(std::move(records[r]));
  }
  std::set<std::string> seen;
  for (const auto& name : table.header) {
    if (!seen.insert(name).second) throw DataError("csv: duplicate column '" + name + "'");
  }
  return table;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_csv(buffer.str());
}

Dataset dataset_from_table(const CsvTable& table, const LoadOptions& options) {
  const auto label_col = table.column(options.label_column);
  if (!label_col) throw DataError("label column '" + options.label_column + "' not found");

  std::vector<std::size_t> feature_cols;
  Dataset data;
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    if (c == *label_col) continue;
    if (std::find(options.exclude.begin(), options.exclude.end(), table.header[c]) !=
        options.exclude.end()) {
      continue;
    }
    feature_cols.push_back(c);
    data.feature_names.push_back(table.header[c]);
  }
  if (feature_cols.empty()) throw DataError("no feature columns");

  const std::size_t n = table.rows.size();
  data.features.resize(static_cast<Eigen::Index>(n),
                       static_cast<Eigen::Index>(feature_cols.size()));
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t k = 0; k < feature_cols.size(); ++k) {
      const auto& cell = table.rows[r][feature_cols[k]];
      const auto value = parse_real(cell);
      if (!value) {
        std::ostringstream msg;
        msg << "non-numeric value '" << cell << "' at line " << r + 2 << ", column '"
            << table.header[feature_cols[k]] << "'";
        throw DataError(msg.str());
      }
      data.features(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) = *value;
    }
  }

  std::vector<std::string> raw;
  raw.reserve(n);
  for (const auto& row : table.rows) raw.emplace_back(trim(row[*label_col]));

  if (options.class_names) {
    data.class_names = *options.class_names;
    std::map<std::string, int> index;
    for (std::size_t c = 0; c < data.class_names.size(); ++c) {
      index.emplace(data.class_names[c], static_cast<int>(c));
    }
    for (std::size_t r = 0; r < n; ++r) {
      const auto it = index.find(raw[r]);
      if (it == index.end()) {
        std::ostringstream msg;
        msg << "unknown label '" << raw[r] << "' at line " << r + 2;
        throw DataError(msg.str());
      }
      data.labels.push_back(it->second);
    }
  } else {
    // Integer labels keep their numeric order; anything else is mapped in
    // order of first appearance.
    const bool all_integer = std::all_of(raw.begin(), raw.end(), [](const std::string& s) {
      return parse_integer(s).has_value();
    });
    std::vector<std::string> names;
    if (all_integer) {
      std::set<long long> distinct;
      for (const auto& s : raw) distinct.insert(*parse_integer(s));
      for (const long long v : distinct) names.push_back(std::to_string(v));
    } else {
      for (const auto& s : raw) {
        if (std::find(names.begin(), names.end(), s) == names.end()) names.push_back(s);
      }
    }
    std::map<std::string, int> index;
    for (std::size_t c = 0; c < names.size(); ++c) index.emplace(names[c], static_cast<int>(c));
    for (const auto& s : raw) {
      const std::string key = all_integer ? std::to_string(*parse_integer(s)) : s;
      data.labels.push_back(index.at(key));
    }
    if (names.size() < 2) throw DataError("fewer than 2 classes in label column");
    data.class_names = std::move(names);
  }
  data.validate();
  return data;
}

Dataset load_csv(const std::filesystem::path& path, const std::string& label_column) {
  LoadOptions options;
  options.label_column = label_column;
  return load_csv(path, options);
}

Dataset load_csv(const std::filesystem::path& path, const LoadOptions& options) {
  return dataset_from_table(read_csv(path), options);
}

std::string format_double(double value) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  if (ec != std::errc()) throw std::runtime_error("format_double: conversion failed");
  return std::string(buffer, ptr);
}

void write_csv(const Dataset& data, std::ostream& out, const std::string& label_column) {
  for (const auto& name : data.feature_names) out << name << ',';
  out << label_column << '\n';
  for (std::size_t r = 0; r < data.rows(); ++r) {
    for (std::size_t c = 0; c < data.cols(); ++c) {
      out << format_double(data.features(static_cast<Eigen::Index>(r),
                                         static_cast<Eigen::Index>(c)))
          << ',';
    }
    out << data.class_names[static_cast<std::size_t>(data.labels[r])] << '\n';
  }
}

void write_csv(const Dataset& data, const std::filesystem::path& path,
               const std::string& label_column) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  write_csv(data, out, label_column);
  if (!out) throw DataError("write failed for '" + path.string() + "'");
}

}  // namespace sonn
