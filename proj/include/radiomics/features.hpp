#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace radiomics {

enum class FeatureClass {
  Morphology,
  LocalIntensity,
  IntensityStatistics,
  IntensityHistogram,
  IntensityVolumeHistogram,
  Glcm,
  Glrlm,
  Glszm,
  Gldzm,
  Ngtdm,
  Ngldm,
  // Preprocessing diagnostics; not part of the 173 standardized features.
  Diagnostic,
};

/// Coarse grouping used for cross-software coverage analysis.
enum class FeatureCategory { Morphology, StatisticHistogram, Texture };

inline constexpr std::array<FeatureClass, 11> kStandardClasses = {
    FeatureClass::Morphology,         FeatureClass::LocalIntensity, FeatureClass::IntensityStatistics,
    FeatureClass::IntensityHistogram, FeatureClass::IntensityVolumeHistogram,
    FeatureClass::Glcm,               FeatureClass::Glrlm,          FeatureClass::Glszm,
    FeatureClass::Gldzm,              FeatureClass::Ngtdm,          FeatureClass::Ngldm};

std::string_view class_key(FeatureClass c);
std::optional<FeatureClass> class_from_key(std::string_view key);
FeatureCategory category_of(FeatureClass c);
std::string_view category_key(FeatureCategory c);
std::optional<FeatureCategory> category_from_key(std::string_view key);

enum class ValueFlag {
  None,
  Undefined,    // value not computable (zero denominator, empty matrix)
  Degenerate,   // computed under a documented degenerate-case convention
  Capped,       // clamped to a documented cap
  Approximate,  // computed by a fallback approximation
};

std::string_view flag_key(ValueFlag f);
std::optional<ValueFlag> flag_from_key(std::string_view key);

struct FeatureDef {
  std::string_view id;
  FeatureClass cls;
  std::string_view name;
};

/// Canonical feature registry: 173 standardized features in a fixed order.
std::span<const FeatureDef> registry();
std::span<const FeatureDef> registry(FeatureClass c);
const FeatureDef* find_feature(std::string_view id);
std::size_t registry_count(FeatureClass c);

/// Diagnostic preprocessing quintet (mean/median/min/max/range of levels).
std::span<const FeatureDef> diagnostic_registry();

struct FeatureValue {
  std::string id;
  FeatureClass cls = FeatureClass::Diagnostic;
  double value = 0.0;
  ValueFlag flag = ValueFlag::None;

  bool defined() const { return flag != ValueFlag::Undefined; }
};

class FeatureSet {
 public:
  /// Appends a value for a registered id. Throws std::logic_error on unknown
  /// or duplicate ids.
  void add(std::string_view id, double value, ValueFlag flag = ValueFlag::None);
  void add_undefined(std::string_view id);
  void append(const FeatureSet& other);

  const FeatureValue* find(std::string_view id) const;
  const FeatureValue& at(std::string_view id) const;
  double value(std::string_view id) const { return at(id).value; }

  std::span<const FeatureValue> values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  std::size_t count(FeatureClass c) const;

  /// Free-form provenance (engine version, discretization, aggregation, ...).
  std::map<std::string, std::string> provenance;

 private:
  std::vector<FeatureValue> values_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

}  // namespace radiomics
