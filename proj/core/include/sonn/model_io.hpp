#ifndef SONN_MODEL_IO_HPP
#define SONN_MODEL_IO_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "sonn/baseline.hpp"
#include "sonn/dataset.hpp"
#include "sonn/ecnn.hpp"
#include "sonn/gmdh.hpp"
#include "sonn/lmdt.hpp"
#include "sonn/ruletree.hpp"

namespace sonn {

inline constexpr int kFormatVersion = 1;

enum class Method { Ecnn, GmdhLayered, GmdhRoulette, Lm, PairwiseDt, RuleTree, Fnn };

std::string method_tag(Method method);
// Throws std::invalid_argument for an unknown tag.
Method parse_method(std::string_view tag);

struct FnnPayload {
  FnnModel model;
  std::optional<PcaTransform> pca;
};

using Payload = std::variant<CascadeNetwork, PolyNetwork, LinearMachine, PairwiseTree, RuleTree,
                             FnnPayload>;

struct Provenance {
  std::uint64_t seed = 0;
  nlohmann::json config = nlohmann::json::object();
  std::string dataset_fingerprint;
};

/// A trained model together with everything needed to apply it to raw rows:
/// the normalization fitted at training time and the label mapping.
struct ModelFile {
  int format_version = kFormatVersion;
  Method method = Method::Ecnn;
  NormParams norm;
  std::vector<std::string> feature_names;
  std::vector<std::string> class_names;
  std::string label_column = "y";
  Payload payload;
  Provenance provenance;

  void validate() const;
};

nlohmann::json model_to_json(const ModelFile& model);
// Throws DataError on malformed content or an unsupported format_version.
ModelFile model_from_json(const nlohmann::json& doc);

std::string serialize_model(const ModelFile& model);
ModelFile deserialize_model(std::string_view text);
void save_model(const ModelFile& model, const std::filesystem::path& path);
ModelFile load_model(const std::filesystem::path& path);

// Applies the stored normalization to a raw row and predicts.
Prediction predict(const ModelFile& model, std::span<const double> raw);
// Prediction for a row that is already normalized.
Prediction predict_normalized(const ModelFile& model, std::span<const double> x);
std::vector<int> predict_all(const ModelFile& model, const Dataset& raw);

// Feature columns the model actually reads, in ascending order.
std::vector<int> selected_features(const ModelFile& model);

std::string export_text(const ModelFile& model);
// Throws std::invalid_argument for methods without a graph form.
std::string export_dot(const ModelFile& model);

// FNV-1a over names, labels and the bytes of every value.
std::string dataset_fingerprint(const Dataset& data);

}  // namespace sonn

#endif  // SONN_MODEL_IO_HPP
