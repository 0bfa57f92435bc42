#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace radiomics {

/// Error raised for malformed or inconsistent input data (files, grids, masks).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Error raised for invalid configuration (discretization, aggregation, CLI options).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Dims {
  std::size_t nx = 0;
  std::size_t ny = 0;
  std::size_t nz = 0;

  std::size_t count() const { return nx * ny * nz; }
  bool operator==(const Dims&) const = default;
};

/// Physical voxel spacing in millimeters.
struct Spacing {
  double sx = 1.0;
  double sy = 1.0;
  double sz = 1.0;

  double voxel_volume() const { return sx * sy * sz; }
  bool operator==(const Spacing&) const = default;
};

struct Index3 {
  std::ptrdiff_t x = 0;
  std::ptrdiff_t y = 0;
  std::ptrdiff_t z = 0;
  bool operator==(const Index3&) const = default;
};

/// Voxel (x,y,z) lives at x + nx*y + nx*ny*z.
inline std::size_t linear_index(const Dims& d, std::size_t x, std::size_t y, std::size_t z) {
  return x + d.nx * (y + d.ny * z);
}

inline Index3 grid_index(const Dims& d, std::size_t linear) {
  const auto plane = d.nx * d.ny;
  return {static_cast<std::ptrdiff_t>(linear % d.nx),
          static_cast<std::ptrdiff_t>((linear / d.nx) % d.ny),
          static_cast<std::ptrdiff_t>(linear / plane)};
}

inline bool in_grid(const Dims& d, const Index3& p) {
  return p.x >= 0 && p.y >= 0 && p.z >= 0 && p.x < static_cast<std::ptrdiff_t>(d.nx) &&
         p.y < static_cast<std::ptrdiff_t>(d.ny) && p.z < static_cast<std::ptrdiff_t>(d.nz);
}

/// Immutable scalar volume. Values are stored x-fastest.
class GrayVolume {
 public:
  GrayVolume(Dims dims, Spacing spacing, std::vector<double> values);

  const Dims& dims() const { return dims_; }
  const Spacing& spacing() const { return spacing_; }
  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }

  double at(std::size_t x, std::size_t y, std::size_t z) const {
    return values_[linear_index(dims_, x, y, z)];
  }
  double operator[](std::size_t i) const { return values_[i]; }

 private:
  Dims dims_;
  Spacing spacing_;
  std::vector<double> values_;
};

/// Binary region of interest on a volume grid. Never empty.
class RoiMask {
 public:
  RoiMask(Dims dims, std::vector<std::uint8_t> flags);

  const Dims& dims() const { return dims_; }
  bool contains(std::size_t i) const { return flags_[i] != 0; }
  bool contains(const Index3& p) const {
    return in_grid(dims_, p) &&
           flags_[linear_index(dims_, static_cast<std::size_t>(p.x), static_cast<std::size_t>(p.y),
                               static_cast<std::size_t>(p.z))] != 0;
  }
  std::span<const std::uint8_t> flags() const { return flags_; }
  std::size_t size() const { return flags_.size(); }
  std::size_t voxel_count() const { return count_; }

  /// Linear indices of ROI voxels in ascending order.
  std::vector<std::size_t> indices() const;

 private:
  Dims dims_;
  std::vector<std::uint8_t> flags_;
  std::size_t count_ = 0;
};

enum class VolumeFormat { JsonRaw, CsvSlices };

VolumeFormat format_from_path(const std::filesystem::path& path);

GrayVolume load_volume(const std::filesystem::path& path, VolumeFormat format);
GrayVolume load_volume(const std::filesystem::path& path);

/// Loads a mask stored in either volume format on the grid of `volume`.
/// Nonzero values become 1. CSV-slice masks inherit the volume's spacing.
RoiMask load_mask(const std::filesystem::path& path, const GrayVolume& volume);

enum class RawType { F32, I32 };

/// Writes `<stem>.json` and `<stem>.raw` next to each other; returns the json path.
std::filesystem::path save_volume_json_raw(const GrayVolume& volume, const std::filesystem::path& json_path,
                                           RawType dtype = RawType::F32);
void save_volume_csv(const GrayVolume& volume, const std::filesystem::path& path);

struct PhantomCheckReport {
  std::pair<double, double> whole_range;
  std::pair<double, double> roi_range;
  std::set<long long> roi_levels_present;
  bool dims_ok = false;
  bool spacing_ok = false;
  bool whole_range_ok = false;
  bool roi_range_ok = false;
  bool absent_levels_ok = false;

  bool all_ok() const { return dims_ok && spacing_ok && whole_range_ok && roi_range_ok && absent_levels_ok; }
};

/// Checks a (volume, mask) pair against the IBSI digital phantom layout:
/// 5x4x4 grid, 2 mm isotropic spacing, grey levels 1..9 overall, 1..6 in
/// the ROI with levels 2 and 5 absent.
PhantomCheckReport check_phantom(const GrayVolume& volume, const RoiMask& mask);

}  // namespace radiomics
