#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "radiomics/preprocess.hpp"
#include "radiomics/volume.hpp"

namespace testing_support {

inline std::filesystem::path data_dir() { return RADIOMICS_DATA_DIR; }
inline std::filesystem::path phantom_volume_path() { return data_dir() / "phantom" / "ibsi_phantom.csv"; }
inline std::filesystem::path phantom_mask_path() { return data_dir() / "phantom" / "ibsi_phantom_mask.csv"; }

struct Phantom {
  radiomics::GrayVolume volume;
  radiomics::RoiMask mask;
};

inline Phantom load_phantom() {
  auto volume = radiomics::load_volume(phantom_volume_path());
  auto mask = radiomics::load_mask(phantom_mask_path(), volume);
  return {std::move(volume), std::move(mask)};
}

inline std::filesystem::path temp_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("radiomics_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

inline radiomics::RoiMask random_mask(std::mt19937& rng, const radiomics::Dims& dims, double fill) {
  std::bernoulli_distribution in(fill);
  std::vector<std::uint8_t> flags(dims.count());
  for (auto& f : flags) f = in(rng) ? 1 : 0;
  flags[std::uniform_int_distribution<std::size_t>(0, flags.size() - 1)(rng)] = 1;
  return radiomics::RoiMask(dims, std::move(flags));
}

inline radiomics::Dims random_dims(std::mt19937& rng, int max_extent) {
  std::uniform_int_distribution<std::size_t> e(1, static_cast<std::size_t>(max_extent));
  return {e(rng), e(rng), e(rng)};
}

/// Random discretised volume with levels in [base, base + n_levels - 1].
inline radiomics::DiscreteVolume random_discrete(std::mt19937& rng, int max_extent, int n_levels,
                                                 radiomics::ShiftMode mode = radiomics::ShiftMode::OneBased) {
  const auto dims = random_dims(rng, max_extent);
  auto mask = random_mask(rng, dims, 0.75);
  const int base = mode == radiomics::ShiftMode::OneBased ? 1 : 0;
  std::uniform_int_distribution<int> level(base, base + n_levels - 1);
  std::vector<int> levels(dims.count());
  for (auto& l : levels) l = level(rng);
  auto spec = radiomics::DiscretizationSpec::fixed_bin_number(n_levels, mode);
  return radiomics::DiscreteVolume(dims, {1.0, 1.0, 1.0}, std::move(mask), std::move(levels), spec, n_levels);
}

}  // namespace testing_support
