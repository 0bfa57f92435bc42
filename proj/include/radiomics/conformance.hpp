#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "radiomics/features.hpp"

namespace radiomics {

struct RelativeDifference {
  double value = 0.0;
  /// Set when the benchmark is zero and |value| is reported instead.
  bool absolute_fallback = false;
};

/// |value - benchmark| / |benchmark|; falls back to |value| for a zero
/// benchmark. Throws std::invalid_argument on non-finite input.
RelativeDifference relative_difference(double value, double benchmark);

struct BenchmarkRow {
  std::string feature_id;
  double value = 0.0;
  std::optional<double> tolerance;
};

class BenchmarkTable {
 public:
  void add(BenchmarkRow row);
  const BenchmarkRow* find(const std::string& id) const;
  const std::vector<BenchmarkRow>& rows() const { return rows_; }

 private:
  std::vector<BenchmarkRow> rows_;
  std::map<std::string, std::size_t> index_;
};

/// CSV: feature_id,value[,tolerance] with a header row.
BenchmarkTable load_benchmark_csv(const std::filesystem::path& path);
BenchmarkTable benchmark_from_features(const FeatureSet& set);

struct GlossaryRow {
  std::string canonical_id;
  std::string source;  // "*" matches every source
  std::string alias;
  double scale = 1.0;
  double offset = 0.0;
};

class GlossaryMap {
 public:
  /// Throws std::invalid_argument on a zero scale, an unregistered canonical
  /// id, or a duplicate (source, alias) pair.
  void add(GlossaryRow row);
  /// Rows matching (source, alias) case-insensitively, source-specific
  /// rows taking precedence over "*" rows.
  std::vector<const GlossaryRow*> lookup(const std::string& source, const std::string& alias) const;
  std::size_t size() const { return rows_.size(); }

 private:
  std::vector<GlossaryRow> rows_;
};

/// CSV: canonical_id,source,alias[,scale,offset] with a header row.
GlossaryMap load_glossary_csv(const std::filesystem::path& path);

struct ExternalRow {
  std::string source;
  std::string feature_name;
  double value = 0.0;
};

/// CSV: source,feature_name,value with a header row.
std::vector<ExternalRow> load_external_csv(const std::filesystem::path& path);

struct MappedValue {
  std::string canonical_id;
  double value = 0.0;          // after correction
  double source_value = 0.0;   // as reported by the source
  double scale = 1.0;
  double offset = 0.0;
  std::string alias;
};

/// Inverse of the affine correction, a * x + b -> x.
double invert_correction(double corrected, double scale, double offset);

struct AliasMapping {
  std::map<std::string, FeatureSet> sets;             // per source
  std::map<std::string, std::vector<MappedValue>> mapped;
  std::vector<ExternalRow> unmapped;
};

/// Maps external rows onto canonical ids. A feature name that equals a
/// registry id maps to itself. Throws std::invalid_argument when an alias
/// resolves to two canonical ids or when a source reports a canonical id twice.
AliasMapping map_aliases(const std::vector<ExternalRow>& rows, const GlossaryMap& glossary);

enum class Tier { Match, Close, Divergent, Missing };
std::string tier_key(Tier t);

struct TierThresholds {
  double match = 1e-3;
  double close = 5e-2;
};

struct ConformanceEntry {
  std::string feature_id;
  FeatureClass cls = FeatureClass::Diagnostic;
  std::string source;
  std::optional<double> computed;
  double benchmark = 0.0;
  std::optional<double> difference;
  bool absolute_fallback = false;
  Tier tier = Tier::Missing;
};

struct NamedFeatureSet {
  std::string source;
  FeatureSet features;
};

struct ConformanceReport {
  std::vector<std::string> sources;
  std::vector<ConformanceEntry> entries;  // benchmark-row-major, then source
  TierThresholds thresholds;

  std::size_t count(Tier t) const;
  std::size_t count(const std::string& source, Tier t) const;
  const ConformanceEntry* find(const std::string& feature_id, const std::string& source) const;

  nlohmann::json to_json() const;
  std::string to_csv() const;
};

/// Scores every (benchmark feature, source) cell. A per-row benchmark
/// tolerance, when present, replaces the match threshold for that row.
/// Undefined or absent computed values are reported as Missing.
ConformanceReport conformance_report(const std::vector<NamedFeatureSet>& sets, const BenchmarkTable& benchmarks,
                                     TierThresholds thresholds = {});

}  // namespace radiomics
