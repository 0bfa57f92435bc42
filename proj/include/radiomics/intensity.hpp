#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "radiomics/features.hpp"
#include "radiomics/preprocess.hpp"
#include "radiomics/volume.hpp"

namespace radiomics {

/// Radius in mm of a sphere with a volume of 1 cm^3.
inline const double kPeakSphereRadiusMm = 10.0 * std::cbrt(3.0 / (4.0 * 3.14159265358979323846));

/// Nearest-rank percentile: the ceil(p*N)-th smallest value (1-based),
/// with p in [0,1]. `sorted` must be ascending and non-empty.
double percentile_nearest_rank(std::span<const double> sorted, double p);

/// Median of an ascending sequence (mean of the two middle values for even N).
double median_sorted(std::span<const double> sorted);

/// The 18 intensity-based statistics over ROI intensities. Kurtosis is the
/// Pearson (non-excess) kurtosis.
FeatureSet intensity_statistics(const GrayVolume& volume, const RoiMask& mask);

/// Local and global intensity peaks: mean intensity of all grid voxels whose
/// centres lie within kPeakSphereRadiusMm of an ROI voxel centre.
FeatureSet local_intensity(const GrayVolume& volume, const RoiMask& mask);

/// The 23 intensity histogram features over discretised ROI levels.
FeatureSet intensity_histogram_features(const DiscreteVolume& dvol);

/// The 7 intensity-volume histogram features over discretised ROI levels.
FeatureSet ivh_features(const DiscreteVolume& dvol);

/// Mean, median, minimum, maximum and range of discretised ROI levels.
FeatureSet basic_discretized_stats(const DiscreteVolume& dvol);

}  // namespace radiomics
