#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "radiomics/intensity.hpp"
#include "support.hpp"

using namespace radiomics;
namespace ts = testing_support;

namespace {

GrayVolume line(std::vector<double> v) {
  const auto n = v.size();
  return GrayVolume({n, 1, 1}, {1, 1, 1}, std::move(v));
}

RoiMask full(const Dims& d) { return RoiMask(d, std::vector<std::uint8_t>(d.count(), 1)); }

DiscreteVolume levels(std::vector<int> l) {
  const Dims d{l.size(), 1, 1};
  const int top = *std::max_element(l.begin(), l.end());
  return DiscreteVolume(d, {1, 1, 1}, full(d), std::move(l), DiscretizationSpec::identity(), top);
}

// Smallest sample v with #{x <= v} >= p*N: nearest rank without indexing.
double percentile_by_count(const std::vector<double>& x, double p) {
  double best = std::numeric_limits<double>::infinity();
  for (double v : x) {
    const auto le = std::count_if(x.begin(), x.end(), [&](double y) { return y <= v; });
    if (static_cast<double>(le) >= p * static_cast<double>(x.size()) - 1e-12) best = std::min(best, v);
  }
  return best;
}

}  // namespace

TEST(IntensityStatistics, HandExample) {
  const auto v = line({1, 2, 3});
  const auto f = intensity_statistics(v, full(v.dims()));
  EXPECT_EQ(f.size(), 18u);
  EXPECT_DOUBLE_EQ(f.value("stat_mean"), 2.0);
  EXPECT_DOUBLE_EQ(f.value("stat_range"), 2.0);
  EXPECT_DOUBLE_EQ(f.value("stat_energy"), 14.0);
  EXPECT_DOUBLE_EQ(f.value("stat_var"), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(f.value("stat_skew"), 0.0);
  // Pearson kurtosis of {1,2,3}: m4/m2^2 = (2/3)/(4/9) = 1.5.
  EXPECT_DOUBLE_EQ(f.value("stat_kurt"), 1.5);
  EXPECT_EQ(f.provenance.at("kurtosis"), "pearson");
}

TEST(IntensityStatistics, ConstantRoiFlagsUndefined) {
  const auto v = line({4, 4, 4, 4});
  const auto f = intensity_statistics(v, full(v.dims()));
  EXPECT_DOUBLE_EQ(f.value("stat_var"), 0.0);
  EXPECT_FALSE(f.at("stat_skew").defined());
  EXPECT_FALSE(f.at("stat_kurt").defined());
  EXPECT_DOUBLE_EQ(f.value("stat_qcod"), 0.0);
}

TEST(IntensityStatistics, ZeroMeanCovUndefined) {
  const auto v = line({-1, 1});
  EXPECT_FALSE(intensity_statistics(v, full(v.dims())).at("stat_cov").defined());
}

TEST(IntensityStatistics, RandomAgainstOracle) {
  std::mt19937 rng(11);
  std::normal_distribution<double> val(3.0, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    const auto dims = ts::random_dims(rng, 5);
    std::vector<double> values(dims.count());
    for (auto& x : values) x = std::round(val(rng) * 4.0) / 4.0;
    const GrayVolume v(dims, {1, 1, 1}, values);
    const auto mask = ts::random_mask(rng, dims, 0.8);
    std::vector<double> x;
    for (auto i : mask.indices()) x.push_back(values[i]);
    const double n = static_cast<double>(x.size());

    // Raw power sums, an algebraically different route to the moments.
    double s1 = 0, s2 = 0, s3 = 0, s4 = 0;
    for (double a : x) {
      s1 += a;
      s2 += a * a;
      s3 += a * a * a;
      s4 += a * a * a * a;
    }
    const double mu = s1 / n;
    const double m2 = s2 / n - mu * mu;
    const double m3 = s3 / n - 3 * mu * s2 / n + 2 * mu * mu * mu;
    const double m4 = s4 / n - 4 * mu * s3 / n + 6 * mu * mu * s2 / n - 3 * mu * mu * mu * mu;

    const auto f = intensity_statistics(v, mask);
    EXPECT_NEAR(f.value("stat_mean"), mu, 1e-12);
    EXPECT_NEAR(f.value("stat_var"), m2, 1e-9);
    if (m2 > 1e-9) {
      EXPECT_NEAR(f.value("stat_skew"), m3 / std::pow(m2, 1.5), 1e-7);
      EXPECT_NEAR(f.value("stat_kurt"), m4 / (m2 * m2), 1e-7);
    }
    EXPECT_EQ(f.value("stat_p10"), percentile_by_count(x, 0.10));
    EXPECT_EQ(f.value("stat_p90"), percentile_by_count(x, 0.90));
    EXPECT_EQ(f.value("stat_iqr"), percentile_by_count(x, 0.75) - percentile_by_count(x, 0.25));
    EXPECT_LE(f.value("stat_p10"), f.value("stat_median"));
    EXPECT_LE(f.value("stat_median"), f.value("stat_p90"));
    EXPECT_NEAR(f.value("stat_rms"), std::sqrt(s2 / n), 1e-12);
  }
}

TEST(Percentile, NearestRank) {
  const std::vector<double> x{15, 20, 35, 40, 50};
  EXPECT_EQ(percentile_nearest_rank(x, 0.05), 15);
  EXPECT_EQ(percentile_nearest_rank(x, 0.30), 20);
  EXPECT_EQ(percentile_nearest_rank(x, 0.40), 20);
  EXPECT_EQ(percentile_nearest_rank(x, 0.50), 35);
  EXPECT_EQ(percentile_nearest_rank(x, 1.00), 50);
  EXPECT_EQ(median_sorted(std::vector<double>{1, 2, 3, 10}), 2.5);
}

TEST(LocalIntensity, SingleVoxelAndConstant) {
  const GrayVolume one({1, 1, 1}, {2, 2, 2}, {7.5});
  const auto f = local_intensity(one, full(one.dims()));
  EXPECT_EQ(f.value("loc_peak_loc"), 7.5);
  EXPECT_EQ(f.value("loc_peak_glob"), 7.5);
  const GrayVolume c({4, 3, 5}, {0.7, 1.2, 2}, std::vector<double>(60, 3.0));
  const auto g = local_intensity(c, full(c.dims()));
  EXPECT_DOUBLE_EQ(g.value("loc_peak_loc"), 3.0);
  EXPECT_DOUBLE_EQ(g.value("loc_peak_glob"), 3.0);
}

TEST(LocalIntensity, SphereMembershipByEnumeration) {
  // 3x3x3 at 2 mm, centre 10, others 0. Every in-grid voxel lies within
  // sqrt(3)*2 = 3.46 mm < 6.2035 mm of the centre, so the mean is 10/27.
  std::vector<double> v(27, 0.0);
  v[13] = 10.0;
  const GrayVolume vol({3, 3, 3}, {2, 2, 2}, v);
  const double r = 10.0 * std::cbrt(3.0 / (4.0 * std::numbers::pi));
  EXPECT_NEAR(kPeakSphereRadiusMm, 6.2035, 1e-4);
  EXPECT_NEAR(kPeakSphereRadiusMm, r, 1e-15);
  int members = 0;
  for (int z = 0; z < 3; ++z)
    for (int y = 0; y < 3; ++y)
      for (int x = 0; x < 3; ++x) members += std::hypot(2.0 * (x - 1), 2.0 * (y - 1), 2.0 * (z - 1)) <= r;
  ASSERT_EQ(members, 27);
  const auto f = local_intensity(vol, full(vol.dims()));
  EXPECT_NEAR(f.value("loc_peak_loc"), 10.0 / 27.0, 1e-15);
}

TEST(LocalIntensity, RandomAgainstEnumeration) {
  std::mt19937 rng(5);
  std::uniform_int_distribution<int> val(0, 9);
  std::uniform_real_distribution<double> sp(0.8, 3.5);
  for (int trial = 0; trial < 30; ++trial) {
    const auto dims = ts::random_dims(rng, 7);
    const Spacing s{sp(rng), sp(rng), sp(rng)};
    std::vector<double> values(dims.count());
    for (auto& x : values) x = val(rng);
    const GrayVolume v(dims, s, values);
    const auto mask = ts::random_mask(rng, dims, 0.5);
    double vmax = -1;
    for (auto i : mask.indices()) vmax = std::max(vmax, values[i]);
    double loc = -1, glob = -1;
    for (auto c : mask.indices()) {
      const auto pc = grid_index(dims, c);
      double sum = 0;
      int n = 0;
      for (std::size_t k = 0; k < dims.count(); ++k) {
        const auto p = grid_index(dims, k);
        const double dx = (p.x - pc.x) * s.sx, dy = (p.y - pc.y) * s.sy, dz = (p.z - pc.z) * s.sz;
        if (dx * dx + dy * dy + dz * dz <= kPeakSphereRadiusMm * kPeakSphereRadiusMm) {
          sum += values[k];
          ++n;
        }
      }
      glob = std::max(glob, sum / n);
      if (values[c] == vmax) loc = std::max(loc, sum / n);
    }
    const auto f = local_intensity(v, mask);
    EXPECT_NEAR(f.value("loc_peak_loc"), loc, 1e-12);
    EXPECT_NEAR(f.value("loc_peak_glob"), glob, 1e-12);
  }
}

TEST(IntensityHistogram, HandExamples) {
  const auto f = intensity_histogram_features(levels({1, 1, 2, 3}));
  EXPECT_EQ(f.size(), 23u);
  EXPECT_EQ(f.value("ih_mode"), 1);
  EXPECT_DOUBLE_EQ(f.value("ih_uniformity"), 0.375);
  const auto u = intensity_histogram_features(levels({1, 2, 3, 4, 4, 3, 2, 1}));
  EXPECT_DOUBLE_EQ(u.value("ih_entropy"), 2.0);
  EXPECT_DOUBLE_EQ(u.value("ih_uniformity"), 0.25);
  EXPECT_EQ(u.value("ih_mode"), 1);  // four-way tie, lowest level
}

TEST(IntensityHistogram, GradientsWithEmptyBins) {
  // Levels 1 (x3) and 4 (x1): histogram [3,0,0,1].
  const auto f = intensity_histogram_features(levels({1, 1, 1, 4}));
  // One-sided ends: g1 = 0-3 = -3, g4 = 1-0 = 1; central: g2 = (0-3)/2, g3 = (1-0)/2.
  EXPECT_DOUBLE_EQ(f.value("ih_max_grad"), 1.0);
  EXPECT_DOUBLE_EQ(f.value("ih_max_grad_g"), 4.0);
  EXPECT_DOUBLE_EQ(f.value("ih_min_grad"), -3.0);
  EXPECT_DOUBLE_EQ(f.value("ih_min_grad_g"), 1.0);
  const auto c = intensity_histogram_features(levels({2, 2}));
  EXPECT_FALSE(c.at("ih_max_grad").defined());
  EXPECT_FALSE(c.at("ih_min_grad_g").defined());
}

TEST(IntensityHistogram, EntropyAndUniformityBounds) {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 40; ++trial) {
    const auto d = ts::random_discrete(rng, 4, 6);
    const auto f = intensity_histogram_features(d);
    const double distinct = [&] {
      auto l = d.roi_levels();
      std::sort(l.begin(), l.end());
      return static_cast<double>(std::unique(l.begin(), l.end()) - l.begin());
    }();
    EXPECT_GE(f.value("ih_entropy"), 0.0);
    EXPECT_LE(f.value("ih_entropy"), std::log2(distinct) + 1e-12);
    EXPECT_GT(f.value("ih_uniformity"), 0.0);
    EXPECT_LE(f.value("ih_uniformity"), 1.0);
  }
}

TEST(Ivh, Examples) {
  const auto two = ivh_features(levels({1, 1, 2, 2}));
  EXPECT_DOUBLE_EQ(two.value("ivh_v10"), 0.5);
  EXPECT_DOUBLE_EQ(two.value("ivh_v90"), 0.5);
  const auto c = ivh_features(levels({3, 3, 3}));
  EXPECT_EQ(c.value("ivh_v10"), 1.0);
  EXPECT_EQ(c.value("ivh_v90"), 1.0);
  EXPECT_EQ(c.value("ivh_auc"), 1.0);
  EXPECT_EQ(c.value("ivh_i10"), 3.0);
  EXPECT_EQ(c.at("ivh_auc").flag, ValueFlag::Degenerate);
}

TEST(Ivh, PhantomValues) {
  const auto p = ts::load_phantom();
  const auto d = discretize_identity(p.volume, p.mask, ShiftMode::OneBased).volume;
  const auto f = ivh_features(d);
  // Level counts 1:50, 3:1, 4:16, 6:7 over 74 voxels.
  EXPECT_DOUBLE_EQ(f.value("ivh_v10"), 24.0 / 74.0);
  EXPECT_DOUBLE_EQ(f.value("ivh_v90"), 7.0 / 74.0);
  EXPECT_EQ(f.value("ivh_i10"), 5.0);
  EXPECT_EQ(f.value("ivh_i90"), 2.0);
  // Trapezoid over levels 1..6: nu = 1, 24/74, 24/74, 23/74, 7/74, 7/74.
  const double nu[] = {74, 24, 24, 23, 7, 7};
  double auc = 0;
  for (int k = 0; k < 5; ++k) auc += 0.5 * (nu[k] + nu[k + 1]) / 74.0 / 5.0;
  EXPECT_NEAR(f.value("ivh_auc"), auc, 1e-15);
}

TEST(Ivh, MonotoneAndBounded) {
  std::mt19937 rng(9);
  for (int trial = 0; trial < 40; ++trial) {
    const auto d = ts::random_discrete(rng, 4, 5);
    const auto f = ivh_features(d);
    EXPECT_GE(f.value("ivh_v10"), f.value("ivh_v90"));
    EXPECT_GE(f.value("ivh_i10"), f.value("ivh_i90"));
    EXPECT_GE(f.value("ivh_auc"), 0.0);
    EXPECT_LE(f.value("ivh_auc"), 1.0);
  }
}

TEST(BasicStats, PhantomOneAndZeroBased) {
  const auto p = ts::load_phantom();
  const auto one = basic_discretized_stats(discretize_identity(p.volume, p.mask, ShiftMode::OneBased).volume);
  const auto zero = basic_discretized_stats(discretize_identity(p.volume, p.mask, ShiftMode::ZeroBased).volume);
  EXPECT_NEAR(one.value("diag_mean_level"), 2.1486, 1e-4);
  EXPECT_DOUBLE_EQ(one.value("diag_mean_level"), 159.0 / 74.0);
  EXPECT_EQ(one.value("diag_median_level"), 1);
  EXPECT_EQ(one.value("diag_min_level"), 1);
  EXPECT_EQ(one.value("diag_max_level"), 6);
  EXPECT_EQ(one.value("diag_range_level"), 5);
  EXPECT_NEAR(zero.value("diag_mean_level"), 1.1486, 1e-4);
  EXPECT_EQ(zero.value("diag_median_level"), 0);
  EXPECT_EQ(zero.value("diag_min_level"), 0);
  EXPECT_EQ(zero.value("diag_max_level"), 5);
  EXPECT_EQ(zero.value("diag_range_level"), 5);
}

TEST(BasicStats, ConstantLevel) {
  const auto f = basic_discretized_stats(levels({3, 3, 3}));
  EXPECT_EQ(f.value("diag_mean_level"), 3);
  EXPECT_EQ(f.value("diag_median_level"), 3);
  EXPECT_EQ(f.value("diag_range_level"), 0);
}

TEST(BasicStats, ShiftDiffersByOneRangeInvariant) {
  std::mt19937 rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    const auto d = ts::random_discrete(rng, 4, 5);
    const auto a = basic_discretized_stats(d);
    const auto b = basic_discretized_stats(d.relabeled(-1, ShiftMode::ZeroBased));
    for (const char* id : {"diag_mean_level", "diag_median_level", "diag_min_level", "diag_max_level"}) {
      EXPECT_NEAR(a.value(id) - b.value(id), 1.0, 1e-12) << id;
    }
    EXPECT_EQ(a.value("diag_range_level"), b.value("diag_range_level"));
  }
}
