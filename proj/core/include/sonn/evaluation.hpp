#ifndef SONN_EVALUATION_HPP
#define SONN_EVALUATION_HPP

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sonn/dataset.hpp"
#include "sonn/lmdt.hpp"
#include "sonn/model_io.hpp"

namespace sonn {

struct GroupSummary {
  std::string group;
  std::size_t count = 0;
  SegmentSummary summary;
};

/// confusion[true][predicted]; groups in order of first appearance.
struct EvalReport {
  double error = 0.0;
  std::vector<std::vector<std::size_t>> confusion;
  std::vector<std::string> class_names;
  std::vector<GroupSummary> groups;
};

EvalReport make_report(std::span<const int> truth, std::span<const int> predicted,
                       std::vector<std::string> class_names,
                       const std::vector<std::string>* groups = nullptr);

// Raw rows are normalized with the model's stored parameters.
EvalReport evaluate(const ModelFile& model, const Dataset& raw,
                    const std::vector<std::string>* groups = nullptr);

// Builds a dataset whose columns follow the model's feature order. Extra
// columns are ignored; a missing feature column is a DataError naming it.
Dataset dataset_for_model(const ModelFile& model, const CsvTable& table);
std::vector<std::string> group_column(const CsvTable& table, const std::string& name);

std::string format_report(const EvalReport& report);
void write_report_csv(const EvalReport& report, std::ostream& out);

}  // namespace sonn

#endif  // SONN_EVALUATION_HPP
