#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "radiomics/features.hpp"
#include "radiomics/morphology.hpp"
#include "radiomics/preprocess.hpp"
#include "radiomics/texture.hpp"
#include "radiomics/volume.hpp"

namespace radiomics {

inline constexpr const char* kEngineName = "radiomics-engine";
inline constexpr const char* kEngineVersion = "1.0.0";

struct ExtractConfig {
  DiscretizationSpec discretization = DiscretizationSpec::identity();
  std::optional<InterpolationSpec> interpolation;
  TextureConfig texture;
  std::vector<FeatureClass> classes{kStandardClasses.begin(), kStandardClasses.end()};
  /// Appends the diag_* level quintet after the standard features.
  bool diagnostics = false;
};

struct RunManifest {
  std::string engine;
  std::string version;
  std::map<std::string, std::string> input_digests;  // path -> sha256 hex
  std::string discretization;
  std::string interpolation;
  std::string aggregation;
  std::string mesher;
  std::string timestamp;  // UTC, ISO 8601

  nlohmann::json to_json() const;
};

struct ExtractResult {
  FeatureSet features;
  RunManifest manifest;
  std::vector<std::string> warnings;
  std::optional<TriangleMesh> mesh;
};

/// Runs preprocessing and every requested feature class. Inputs are already
/// loaded; `manifest.input_digests` is left empty.
ExtractResult extract_features(const GrayVolume& volume, const RoiMask& mask, const ExtractConfig& config);

/// Loads both files, runs extract_features and fills in the digests.
ExtractResult extract_files(const std::filesystem::path& volume_path, const std::filesystem::path& mask_path,
                            const ExtractConfig& config);

std::string sha256_file(const std::filesystem::path& path);
std::string utc_timestamp();

/// Feature CSV: header feature_id,class,value,flag; values printed with %.17g,
/// undefined values as "nan" with flag "undefined".
std::string features_to_csv(const FeatureSet& set);
nlohmann::json features_to_json(const FeatureSet& set);
FeatureSet load_features_csv(const std::filesystem::path& path);

/// Parses "morphology,glcm,..." into classes; "all" selects every standard class.
std::vector<FeatureClass> parse_classes(const std::string& text);

/// key = value lines; '#' starts a comment. Throws ConfigError on malformed lines.
std::map<std::string, std::string> load_config_file(const std::filesystem::path& path);

}  // namespace radiomics
