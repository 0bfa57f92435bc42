#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "radiomics/features.hpp"

namespace radiomics {

class SupportMatrix {
 public:
  explicit SupportMatrix(std::vector<std::string> software);

  /// Throws std::invalid_argument if the flag count differs from the column
  /// count or the feature id is already present.
  void add_feature(std::string feature_id, FeatureCategory category, std::vector<bool> flags);

  std::size_t software_count() const { return software_.size(); }
  std::size_t feature_count() const { return ids_.size(); }
  const std::vector<std::string>& software() const { return software_; }
  const std::string& feature_id(std::size_t i) const { return ids_[i]; }
  FeatureCategory category(std::size_t i) const { return categories_[i]; }
  bool supports(std::size_t feature, std::size_t software) const { return flags_[feature][software]; }
  /// w_i, the number of software supporting feature i.
  std::size_t weight(std::size_t i) const;
  std::size_t column_sum(std::size_t software, std::optional<FeatureCategory> category = std::nullopt) const;
  std::vector<std::size_t> rows(std::optional<FeatureCategory> category) const;

 private:
  std::vector<std::string> software_;
  std::vector<std::string> ids_;
  std::vector<FeatureCategory> categories_;
  std::vector<std::vector<bool>> flags_;
};

/// CSV: feature_id,category,<one 0/1 column per software>.
SupportMatrix load_support_csv(const std::filesystem::path& path);

/// Builds a matrix from per-class support totals: for every class and
/// software column, the first `count` registry features of that class are
/// marked supported. Row order follows the registry.
struct ClassSupport {
  FeatureClass cls;
  std::vector<std::size_t> counts;  // one per software
};
SupportMatrix support_from_class_totals(const std::vector<std::string>& software,
                                        const std::vector<ClassSupport>& totals);

/// Per-software class totals for the six public packages (columns:
/// Pyradiomics, MITK, LIFEx, SERA, CaPTk, A2).
std::vector<std::string> builtin_software();
std::vector<ClassSupport> builtin_class_totals();

/// Sum of w_i over (#software * d). Throws ConfigError on an empty selection.
double popularity_p1(const SupportMatrix& m, std::optional<FeatureCategory> category = std::nullopt);

/// Strict cutoff for "popular": w_i > floor(2 * #software / 3).
std::size_t popular_cutoff(std::size_t software_count);

/// Fraction of features with w_i above popular_cutoff. Throws ConfigError on
/// an empty selection.
double popularity_p2(const SupportMatrix& m, std::optional<FeatureCategory> category = std::nullopt);

struct SubsetCount {
  std::vector<std::string> members;  // exact support set, in column order
  std::size_t count = 0;
};

struct IntersectionCounts {
  std::vector<SubsetCount> subsets;  // non-empty exact sets only, largest count first
  std::size_t unsupported = 0;       // features no software supports
  struct CategoryIntersection {
    FeatureCategory category;
    std::size_t shared = 0;  // supported by every software
    std::size_t total = 0;
  };
  std::vector<CategoryIntersection> full;
};

/// Throws std::invalid_argument on an empty matrix.
IntersectionCounts intersection_counts(const SupportMatrix& m);

nlohmann::json popularity_json(const SupportMatrix& m);

}  // namespace radiomics
