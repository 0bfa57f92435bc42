#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "radiomics/volume.hpp"

namespace radiomics {

enum class DiscretizationMethod {
  FixedBinNumber,
  FixedBinSize,
  // Levels are the (integer) intensities themselves.
  Identity,
};

/// Whether the lowest bin is labelled 1 (standard) or 0.
enum class ShiftMode { OneBased, ZeroBased };

struct DiscretizationSpec {
  DiscretizationMethod method = DiscretizationMethod::Identity;
  std::optional<int> n_bins;
  std::optional<double> bin_width;
  ShiftMode shift_mode = ShiftMode::OneBased;

  static DiscretizationSpec fixed_bin_number(int n_bins, ShiftMode mode = ShiftMode::OneBased);
  static DiscretizationSpec fixed_bin_size(double width, ShiftMode mode = ShiftMode::OneBased);
  static DiscretizationSpec identity(ShiftMode mode = ShiftMode::OneBased);

  /// Throws ConfigError when the fields don't match the method.
  void validate() const;
  std::string describe() const;
};

/// Parses "fbn:<Ng>", "fbs:<wb>" or "none".
DiscretizationSpec parse_discretization(const std::string& text, ShiftMode mode);
ShiftMode parse_shift_mode(const std::string& text);
std::string shift_mode_key(ShiftMode mode);

/// Integer grey levels on the ROI of a volume. Voxels outside the ROI carry
/// no meaningful level.
class DiscreteVolume {
 public:
  DiscreteVolume(Dims dims, Spacing spacing, RoiMask mask, std::vector<int> levels, DiscretizationSpec spec,
                 int n_levels);

  const Dims& dims() const { return dims_; }
  const Spacing& spacing() const { return spacing_; }
  const RoiMask& mask() const { return mask_; }
  const DiscretizationSpec& spec() const { return spec_; }

  std::span<const int> levels() const { return levels_; }
  int level(std::size_t i) const { return levels_[i]; }
  int level(const Index3& p) const {
    return levels_[linear_index(dims_, static_cast<std::size_t>(p.x), static_cast<std::size_t>(p.y),
                                static_cast<std::size_t>(p.z))];
  }
  bool in_roi(const Index3& p) const { return mask_.contains(p); }

  std::pair<int, int> level_range() const { return level_range_; }
  /// Lowest representable level: 1 for OneBased, 0 for ZeroBased.
  int base_level() const { return spec_.shift_mode == ShiftMode::OneBased ? 1 : 0; }
  /// Number of grey levels N_g spanned by the discretization.
  int n_levels() const { return n_levels_; }
  /// Highest representable level, base_level() + n_levels() - 1.
  int top_level() const { return base_level() + n_levels_ - 1; }

  /// ROI levels in linear-index order.
  std::vector<int> roi_levels() const;

  /// Same grid with every level offset by `delta` and the given shift mode.
  DiscreteVolume relabeled(int delta, ShiftMode mode) const;

 private:
  Dims dims_;
  Spacing spacing_;
  RoiMask mask_;
  std::vector<int> levels_;
  DiscretizationSpec spec_;
  int n_levels_ = 1;
  std::pair<int, int> level_range_{0, 0};
};

struct DiscretizeResult {
  DiscreteVolume volume;
  /// Non-empty when a degenerate case was handled (e.g. zero intensity range).
  std::vector<std::string> warnings;
};

DiscretizeResult discretize_fbn(const GrayVolume& volume, const RoiMask& mask, int n_bins, ShiftMode mode);
DiscretizeResult discretize_fbs(const GrayVolume& volume, const RoiMask& mask, double bin_width, ShiftMode mode);
/// Requires integer-valued ROI intensities.
DiscretizeResult discretize_identity(const GrayVolume& volume, const RoiMask& mask, ShiftMode mode);
DiscretizeResult discretize(const GrayVolume& volume, const RoiMask& mask, const DiscretizationSpec& spec);

enum class InterpolationKernel { NearestNeighbor, Trilinear };

struct InterpolationSpec {
  Spacing target_spacing;
  InterpolationKernel kernel = InterpolationKernel::Trilinear;
};

InterpolationKernel parse_kernel(const std::string& text);

struct Resampled {
  GrayVolume volume;
  RoiMask mask;
};

/// Resamples onto a grid of ceil(n * s_old / s_new) voxels per axis whose
/// centre coincides with the input grid centre. Samples beyond the input
/// grid are clamped to the nearest edge voxel. The mask is resampled with
/// nearest neighbour and thresholded at 0.5.
Resampled interpolate(const GrayVolume& volume, const RoiMask& mask, const InterpolationSpec& spec);

}  // namespace radiomics
