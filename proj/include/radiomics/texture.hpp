#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "radiomics/features.hpp"
#include "radiomics/preprocess.hpp"

namespace radiomics {

struct Offset {
  int dx = 0;
  int dy = 0;
  int dz = 0;
  bool operator==(const Offset&) const = default;
};

/// The 13 offsets covering half of the 26-neighbourhood, scaled by `distance`.
/// No offset is the negation of another and all have Chebyshev norm `distance`.
std::vector<Offset> direction_set(int distance = 1);

enum class AggregationMode { MergeMatrices, AverageFeatures };

AggregationMode parse_aggregation(const std::string& text);
std::string aggregation_key(AggregationMode mode);

/// Symmetric grey level co-occurrence counts. Row/column r corresponds to
/// grey level base_level + r.
struct Glcm {
  int base_level = 1;
  int n_levels = 0;
  std::vector<long long> counts;  // row-major n_levels x n_levels
  std::optional<Offset> direction;  // empty for a merged matrix

  long long at(int row, int col) const { return counts[static_cast<std::size_t>(row * n_levels + col)]; }
  long long total() const;
  bool operator==(const Glcm&) const = default;
};

/// Level x column count matrix used by the run, zone, distance and
/// dependence families. Row r is grey level base_level + r. Column c
/// stands for run length / zone size / zone distance c + 1, or for a
/// dependence count of c; in every family the feature formulas weight
/// column c by j = c + 1.
struct LevelCountMatrix {
  int base_level = 1;
  int n_levels = 0;
  int n_columns = 0;
  std::vector<long long> counts;  // row-major n_levels x n_columns
  std::optional<Offset> direction;

  long long at(int row, int col) const { return counts[static_cast<std::size_t>(row * n_columns + col)]; }
  long long total() const;
  bool operator==(const LevelCountMatrix&) const = default;
};

/// Neighbourhood grey tone difference matrix; index r is grey level base_level + r.
struct Ngtdm {
  int base_level = 1;
  int n_levels = 0;
  std::vector<long long> occurrences;  // n_i
  std::vector<double> abs_deviation;   // s_i
  bool operator==(const Ngtdm&) const = default;
};

std::vector<Glcm> build_glcm(const DiscreteVolume& dvol, int distance = 1);
Glcm merge_glcm(std::span<const Glcm> matrices);

std::vector<LevelCountMatrix> build_glrlm(const DiscreteVolume& dvol);
LevelCountMatrix merge_level_counts(std::span<const LevelCountMatrix> matrices);

/// Labels of maximal 26-connected equal-level zones; -1 outside the ROI.
/// Labels are consecutive from 0 in order of each zone's lowest linear index.
std::vector<int> label_zones(const DiscreteVolume& dvol);
LevelCountMatrix build_glszm(const DiscreteVolume& dvol);

/// City-block distance from every ROI voxel to the nearest position outside
/// the ROI (including positions beyond the grid); 0 outside the ROI.
std::vector<int> border_distance_map(const DiscreteVolume& dvol);
LevelCountMatrix build_gldzm(const DiscreteVolume& dvol);

Ngtdm build_ngtdm(const DiscreteVolume& dvol, int distance = 1);
LevelCountMatrix build_ngldm(const DiscreteVolume& dvol, int alpha = 0, int distance = 1);

FeatureSet glcm_features(const Glcm& matrix);
FeatureSet glcm_features(std::span<const Glcm> per_direction, AggregationMode mode);

/// `voxel_count` is the denominator of run percentage for one matrix.
FeatureSet glrlm_features(const LevelCountMatrix& matrix, double voxel_count);
FeatureSet glrlm_features(std::span<const LevelCountMatrix> per_direction, double voxel_count, AggregationMode mode);
FeatureSet glszm_features(const LevelCountMatrix& matrix, double voxel_count);
FeatureSet gldzm_features(const LevelCountMatrix& matrix, double voxel_count);
FeatureSet ngtdm_features(const Ngtdm& matrix);
FeatureSet ngldm_features(const LevelCountMatrix& matrix, double voxel_count);

/// Coarseness reported when its denominator vanishes.
inline constexpr double kCoarsenessCap = 1.0e6;

struct TextureConfig {
  int distance = 1;
  AggregationMode aggregation = AggregationMode::MergeMatrices;
  int ngldm_alpha = 0;
};

/// Computes the requested texture classes (any of Glcm, Glrlm, Glszm, Gldzm,
/// Ngtdm, Ngldm) on one discretised volume.
FeatureSet texture_features(const DiscreteVolume& dvol, const TextureConfig& config,
                            std::span<const FeatureClass> classes);

}  // namespace radiomics
