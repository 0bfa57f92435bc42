#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "radiomics/preprocess.hpp"
#include "support.hpp"

using namespace radiomics;
namespace ts = testing_support;

namespace {

GrayVolume line(std::vector<double> v, double spacing = 1.0) {
  const auto n = v.size();
  return GrayVolume({n, 1, 1}, {spacing, spacing, spacing}, std::move(v));
}

RoiMask full(const Dims& d) { return RoiMask(d, std::vector<std::uint8_t>(d.count(), 1)); }

std::vector<int> roi(const DiscreteVolume& d) { return d.roi_levels(); }

}  // namespace

TEST(Discretize, FbnHandValues) {
  const auto v = line({1, 3, 6, 4});
  const auto r = discretize_fbn(v, full(v.dims()), 6, ShiftMode::OneBased);
  EXPECT_EQ(roi(r.volume), (std::vector<int>{1, 3, 6, 4}));
  EXPECT_EQ(r.volume.n_levels(), 6);
  EXPECT_TRUE(r.warnings.empty());
}

TEST(Discretize, FbnZeroBasedIsOneLower) {
  const auto v = line({1, 3, 6, 4});
  const auto one = discretize_fbn(v, full(v.dims()), 6, ShiftMode::OneBased);
  const auto zero = discretize_fbn(v, full(v.dims()), 6, ShiftMode::ZeroBased);
  EXPECT_EQ(roi(zero.volume), (std::vector<int>{0, 2, 5, 3}));
  EXPECT_EQ(zero.volume.base_level(), 0);
  EXPECT_EQ(zero.volume.top_level(), 5);
  EXPECT_EQ(one.volume.top_level(), 6);
}

TEST(Discretize, FbnZeroRangeWarns) {
  const auto v = line({2.5, 2.5});
  const auto r = discretize_fbn(v, full(v.dims()), 8, ShiftMode::OneBased);
  EXPECT_EQ(roi(r.volume), (std::vector<int>{1, 1}));
  EXPECT_FALSE(r.warnings.empty());
  const auto z = discretize_fbn(v, full(v.dims()), 8, ShiftMode::ZeroBased);
  EXPECT_EQ(roi(z.volume), (std::vector<int>{0, 0}));
}

TEST(Discretize, FbnUsesRoiRangeOnly) {
  const auto v = line({-100, 1, 6, 1000});
  RoiMask m(v.dims(), {0, 1, 1, 0});
  const auto r = discretize_fbn(v, m, 5, ShiftMode::OneBased);
  EXPECT_EQ(roi(r.volume), (std::vector<int>{1, 5}));
}

TEST(Discretize, FbsHandValues) {
  const auto v = line({2.1, 5.3});
  const auto r = discretize_fbs(v, full(v.dims()), 1.0, ShiftMode::OneBased);
  EXPECT_EQ(roi(r.volume), (std::vector<int>{1, 4}));
  const auto c = line({7, 7, 7});
  EXPECT_EQ(roi(discretize_fbs(c, full(c.dims()), 2.5, ShiftMode::OneBased).volume), (std::vector<int>{1, 1, 1}));
}

TEST(Discretize, FbsUnitWidthIsIdentityOnPhantom) {
  const auto p = ts::load_phantom();
  const auto fbs = discretize_fbs(p.volume, p.mask, 1.0, ShiftMode::OneBased);
  const auto id = discretize_identity(p.volume, p.mask, ShiftMode::OneBased);
  EXPECT_EQ(roi(fbs.volume), roi(id.volume));
  std::vector<int> original;
  for (auto i : p.mask.indices()) original.push_back(static_cast<int>(p.volume[i]));
  EXPECT_EQ(roi(fbs.volume), original);
  // FBN with N_g = 6 over [1,6] maps 1,3,4,6 onto themselves as well.
  EXPECT_EQ(roi(discretize_fbn(p.volume, p.mask, 6, ShiftMode::OneBased).volume), original);
}

TEST(Discretize, IdentityRejectsNonInteger) {
  const auto v = line({1.5, 2});
  EXPECT_THROW(discretize_identity(v, full(v.dims()), ShiftMode::OneBased), ConfigError);
  const auto w = line({0, 2});
  EXPECT_THROW(discretize_identity(w, full(w.dims()), ShiftMode::OneBased), ConfigError);
}

TEST(Discretize, SpecValidation) {
  EXPECT_THROW(DiscretizationSpec::fixed_bin_number(0).validate(), ConfigError);
  EXPECT_THROW(DiscretizationSpec::fixed_bin_size(0.0).validate(), ConfigError);
  EXPECT_THROW(DiscretizationSpec::fixed_bin_size(-1.0).validate(), ConfigError);
  EXPECT_THROW(parse_discretization("fbn:x", ShiftMode::OneBased), ConfigError);
  EXPECT_THROW(parse_discretization("bogus", ShiftMode::OneBased), ConfigError);
  EXPECT_THROW(parse_shift_mode("two-based"), ConfigError);
  const auto s = parse_discretization("fbs:0.5", ShiftMode::ZeroBased);
  EXPECT_EQ(s.method, DiscretizationMethod::FixedBinSize);
  EXPECT_EQ(*s.bin_width, 0.5);
  EXPECT_EQ(s.shift_mode, ShiftMode::ZeroBased);
  EXPECT_EQ(parse_discretization("fbn:32", ShiftMode::OneBased).n_bins, 32);
}

TEST(Discretize, LevelBoundsEnforced) {
  const Dims d{2, 1, 1};
  auto spec = DiscretizationSpec::fixed_bin_number(3, ShiftMode::OneBased);
  EXPECT_THROW(DiscreteVolume(d, {}, full(d), {0, 1}, spec, 3), ConfigError);
  EXPECT_THROW(DiscreteVolume(d, {}, full(d), {1, 4}, spec, 3), ConfigError);
  EXPECT_NO_THROW(DiscreteVolume(d, {}, full(d), {1, 3}, spec, 3));
}

TEST(DiscretizeProperty, MonotoneEndpointsAndShift) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> val(-50.0, 50.0);
  for (int trial = 0; trial < 100; ++trial) {
    const auto dims = ts::random_dims(rng, 5);
    std::vector<double> values(dims.count());
    for (auto& x : values) x = val(rng);
    const GrayVolume v(dims, {1, 1, 1}, values);
    const auto mask = ts::random_mask(rng, dims, 0.7);
    const int ng = 1 + trial % 9;
    const double wb = 0.5 + (trial % 5);
    const auto fbn1 = discretize_fbn(v, mask, ng, ShiftMode::OneBased).volume;
    const auto fbn0 = discretize_fbn(v, mask, ng, ShiftMode::ZeroBased).volume;
    const auto fbs1 = discretize_fbs(v, mask, wb, ShiftMode::OneBased).volume;
    const auto fbs0 = discretize_fbs(v, mask, wb, ShiftMode::ZeroBased).volume;
    const auto idx = mask.indices();
    double lo = 1e300, hi = -1e300;
    for (auto i : idx) {
      lo = std::min(lo, values[i]);
      hi = std::max(hi, values[i]);
    }
    for (auto i : idx) {
      EXPECT_EQ(fbn0.level(i), fbn1.level(i) - 1);
      EXPECT_EQ(fbs0.level(i), fbs1.level(i) - 1);
      if (values[i] == lo) {
        EXPECT_EQ(fbn1.level(i), 1);
        EXPECT_EQ(fbs1.level(i), 1);
      }
      if (values[i] == hi && hi > lo) EXPECT_EQ(fbn1.level(i), ng);
      for (auto j : idx) {
        if (values[i] <= values[j]) {
          EXPECT_LE(fbn1.level(i), fbn1.level(j));
          EXPECT_LE(fbs1.level(i), fbs1.level(j));
        }
      }
    }
  }
}

TEST(Interpolate, EqualSpacingIsIdentity) {
  const auto p = ts::load_phantom();
  for (auto k : {InterpolationKernel::NearestNeighbor, InterpolationKernel::Trilinear}) {
    const auto r = interpolate(p.volume, p.mask, {{2, 2, 2}, k});
    EXPECT_EQ(r.volume.dims(), p.volume.dims());
    EXPECT_TRUE(std::equal(r.volume.values().begin(), r.volume.values().end(), p.volume.values().begin()));
    EXPECT_TRUE(std::equal(r.mask.flags().begin(), r.mask.flags().end(), p.mask.flags().begin()));
  }
}

TEST(Interpolate, OutputDimsCeil) {
  const GrayVolume v({5, 4, 3}, {2, 2, 3}, std::vector<double>(60, 1.0));
  const auto r = interpolate(v, full(v.dims()), {{3, 1.5, 4}, InterpolationKernel::Trilinear});
  EXPECT_EQ(r.volume.dims(), (Dims{4, 6, 3}));  // ceil(10/3), ceil(8/1.5), ceil(9/4)
  EXPECT_EQ(r.volume.spacing(), (Spacing{3, 1.5, 4}));
}

TEST(Interpolate, ConstantPreserved) {
  const GrayVolume v({3, 4, 2}, {1.3, 0.7, 2}, std::vector<double>(24, 4.25));
  for (auto k : {InterpolationKernel::NearestNeighbor, InterpolationKernel::Trilinear}) {
    const auto r = interpolate(v, full(v.dims()), {{0.45, 1.1, 0.8}, k});
    for (double x : r.volume.values()) EXPECT_DOUBLE_EQ(x, 4.25);
  }
}

TEST(Interpolate, RampHandEvaluated) {
  // Input centres at 0 and 1 mm (values 0, 1). Output 4 samples at 0.5 mm,
  // centred on 0.5 mm: positions -0.25, 0.25, 0.75, 1.25 (clamped at ends).
  const auto v = line({0.0, 1.0});
  const auto r = interpolate(v, full(v.dims()), {{0.5, 1.0, 1.0}, InterpolationKernel::Trilinear});
  ASSERT_EQ(r.volume.dims(), (Dims{4, 1, 1}));
  const std::vector<double> expected{0.0, 0.25, 0.75, 1.0};
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(r.volume[i], expected[i], 1e-15);
}

TEST(Interpolate, MaskNearestNeighbour) {
  const auto v = line({1, 2, 3, 4});
  RoiMask m(v.dims(), {0, 1, 1, 0});
  const auto r = interpolate(v, m, {{0.5, 1, 1}, InterpolationKernel::Trilinear});
  ASSERT_EQ(r.mask.size(), 8u);
  // Output positions in input index units: -0.25, 0.25, ..., 3.25.
  const std::vector<int> expected{0, 0, 1, 1, 1, 1, 0, 0};
  for (std::size_t i = 0; i < 8; ++i) EXPECT_EQ(r.mask.flags()[i], expected[i]) << i;
}

TEST(Interpolate, Errors) {
  const auto v = line({1, 2});
  EXPECT_THROW(interpolate(v, full(v.dims()), {{0, 1, 1}, InterpolationKernel::Trilinear}), ConfigError);
  EXPECT_THROW(parse_kernel("bspline"), ConfigError);
  EXPECT_EQ(parse_kernel("nn"), InterpolationKernel::NearestNeighbor);
}
