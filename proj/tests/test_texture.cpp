#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "radiomics/texture.hpp"
#include "support.hpp"
#include "texture_oracle.hpp"

using namespace radiomics;
namespace ts = testing_support;
using namespace texture_oracle;

namespace {

constexpr FeatureClass kAllTexture[] = {FeatureClass::Glcm,  FeatureClass::Glrlm, FeatureClass::Glszm,
                                        FeatureClass::Gldzm, FeatureClass::Ngtdm, FeatureClass::Ngldm};

DiscreteVolume make(const Dims& d, std::vector<int> levels, std::vector<std::uint8_t> mask, int n_levels,
                    ShiftMode mode = ShiftMode::OneBased) {
  return DiscreteVolume(d, {1, 1, 1}, RoiMask(d, std::move(mask)), std::move(levels),
                        DiscretizationSpec::fixed_bin_number(n_levels, mode), n_levels);
}

DiscreteVolume make_full(const Dims& d, std::vector<int> levels, int n_levels) {
  return make(d, std::move(levels), std::vector<std::uint8_t>(d.count(), 1), n_levels);
}

}  // namespace

TEST(Directions, ThirteenHalfNeighbourhood) {
  for (int delta : {1, 2}) {
    const auto dirs = direction_set(delta);
    ASSERT_EQ(dirs.size(), 13u);
    for (const auto& a : dirs) {
      EXPECT_EQ(cheb({a.dx, a.dy, a.dz}), delta);
      for (const auto& b : dirs) EXPECT_FALSE(a.dx == -b.dx && a.dy == -b.dy && a.dz == -b.dz);
    }
  }
  EXPECT_THROW(direction_set(0), ConfigError);
}

TEST(TextureOracle, AllBuildersMatchBruteForce) {
  std::mt19937 rng(20240611);
  for (int trial = 0; trial < 240; ++trial) {
    const auto mode = trial % 3 == 0 ? ShiftMode::ZeroBased : ShiftMode::OneBased;
    const auto v = ts::random_discrete(rng, 4, 1 + trial % 4, mode);
    const int distance = 1 + trial % 2;
    SCOPED_TRACE(trial);

    const auto glcm = build_glcm(v, distance);
    const auto dirs = direction_set(distance);
    ASSERT_EQ(glcm.size(), dirs.size());
    for (std::size_t i = 0; i < dirs.size(); ++i) EXPECT_EQ(glcm[i], oracle_glcm(v, dirs[i]));

    const auto glrlm = build_glrlm(v);
    const auto unit = direction_set(1);
    for (std::size_t i = 0; i < unit.size(); ++i) {
      auto expected = oracle_glrlm(v, unit[i]);
      expected.direction = unit[i];
      EXPECT_EQ(glrlm[i], expected);
    }

    EXPECT_EQ(build_glszm(v), oracle_glszm(v));
    EXPECT_EQ(build_gldzm(v), oracle_gldzm(v));
    EXPECT_EQ(build_ngtdm(v, distance), oracle_ngtdm(v, distance));
    for (int alpha : {0, 1}) EXPECT_EQ(build_ngldm(v, alpha, distance), oracle_ngldm(v, alpha, distance));
  }
}

TEST(TextureOracle, ZonePartitionAndDistanceMap) {
  std::mt19937 rng(77);
  for (int trial = 0; trial < 60; ++trial) {
    const auto v = ts::random_discrete(rng, 5, 3);
    const auto m = build_glszm(v);
    long long voxels = 0;
    for (int r = 0; r < m.n_levels; ++r) {
      for (int c = 0; c < m.n_columns; ++c) voxels += (c + 1) * m.at(r, c);
    }
    EXPECT_EQ(voxels, static_cast<long long>(v.mask().voxel_count()));
    const auto dist = border_distance_map(v);
    for (std::size_t k = 0; k < dist.size(); ++k) {
      const int expected = v.mask().contains(k) ? oracle_border_distance(v, grid_index(v.dims(), k)) : 0;
      EXPECT_EQ(dist[k], expected);
    }
  }
}

TEST(Glcm, SlabExample) {
  const auto v = make_full({2, 2, 1}, {1, 2, 2, 3}, 3);
  const auto merged = merge_glcm(build_glcm(v));
  EXPECT_EQ(merged.counts, (std::vector<long long>{0, 2, 1, 2, 2, 2, 1, 2, 0}));
  EXPECT_EQ(merged.total(), 12);
  EXPECT_FALSE(merged.direction.has_value());
  EXPECT_DOUBLE_EQ(glcm_features(merged).value("cm_joint_max"), 2.0 / 12.0);
}

TEST(Glcm, TrivialCases) {
  const auto one = make_full({1, 1, 1}, {1}, 1);
  for (const auto& m : build_glcm(one)) EXPECT_EQ(m.total(), 0);
  const auto f = glcm_features(build_glcm(one), AggregationMode::MergeMatrices);
  EXPECT_FALSE(f.at("cm_joint_max").defined());

  const auto pair = make_full({2, 1, 1}, {1, 1}, 1);
  const auto axis = build_glcm(pair).front();
  EXPECT_EQ(axis.direction, (Offset{1, 0, 0}));
  EXPECT_EQ(axis.at(0, 0), 2);

  const auto c = glcm_features(merge_glcm(build_glcm(make_full({3, 3, 1}, std::vector<int>(9, 2), 2))));
  EXPECT_EQ(c.value("cm_contrast"), 0.0);
  EXPECT_FALSE(c.at("cm_corr").defined());
}

TEST(Glcm, SymmetryMarginalsAndContrast) {
  std::mt19937 rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    const auto v = ts::random_discrete(rng, 4, 4);
    const auto per = build_glcm(v);
    const auto merged = merge_glcm(per);
    const int n = merged.n_levels;
    for (int r = 0; r < n; ++r) {
      long long row = 0, col = 0;
      for (int c = 0; c < n; ++c) {
        EXPECT_EQ(merged.at(r, c), merged.at(c, r));
        row += merged.at(r, c);
        col += merged.at(c, r);
      }
      EXPECT_EQ(row, col);
    }
    for (std::size_t i = 0; i < merged.counts.size(); ++i) {
      long long sum = 0;
      for (const auto& m : per) sum += m.counts[i];
      EXPECT_EQ(merged.counts[i], sum);
    }
    if (merged.total() == 0) continue;
    double contrast = 0.0, psum = 0.0;
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) {
        const double p = static_cast<double>(merged.at(r, c)) / static_cast<double>(merged.total());
        contrast += (r - c) * (r - c) * p;
        psum += p;
      }
    }
    EXPECT_NEAR(psum, 1.0, 1e-12);
    EXPECT_NEAR(glcm_features(merged).value("cm_contrast"), contrast, 1e-12);
  }
}

TEST(Glcm, ShiftRelabelling) {
  std::mt19937 rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const auto one = ts::random_discrete(rng, 4, 4);
    const auto zero = one.relabeled(-1, ShiftMode::ZeroBased);
    const auto a = glcm_features(build_glcm(one), AggregationMode::MergeMatrices);
    const auto b = glcm_features(build_glcm(zero), AggregationMode::MergeMatrices);
    if (!a.at("cm_joint_avg").defined()) continue;
    EXPECT_NEAR(b.value("cm_joint_avg") - a.value("cm_joint_avg"), -1.0, 1e-12);
    EXPECT_NEAR(b.value("cm_sum_avg") - a.value("cm_sum_avg"), -2.0, 1e-12);
    for (const char* id : {"cm_contrast", "cm_dissimilarity", "cm_diff_avg", "cm_diff_var", "cm_diff_entr",
                           "cm_sum_entr", "cm_energy", "cm_joint_entr", "cm_joint_max"}) {
      EXPECT_EQ(a.value(id), b.value(id)) << id;
    }
  }
}

TEST(Glrlm, Examples) {
  const auto row = make_full({3, 1, 1}, {1, 1, 2}, 2);
  const auto x = build_glrlm(row).front();
  ASSERT_EQ(x.direction, (Offset{1, 0, 0}));
  EXPECT_EQ(x.n_columns, 2);
  EXPECT_EQ(x.at(0, 1), 1);
  EXPECT_EQ(x.at(1, 0), 1);
  EXPECT_EQ(x.total(), 2);

  const auto one = make_full({1, 1, 1}, {1}, 1);
  EXPECT_DOUBLE_EQ(glrlm_features(build_glrlm(one).front(), 1.0).value("rlm_r_perc"), 1.0);

  const auto c = make_full({3, 1, 1}, {1, 1, 1}, 1);
  EXPECT_DOUBLE_EQ(glrlm_features(build_glrlm(c).front(), 3.0).value("rlm_lre"), 9.0);
}

TEST(Glszm, Examples) {
  const auto c = make_full({2, 2, 2}, std::vector<int>(8, 1), 1);
  const auto m = build_glszm(c);
  EXPECT_EQ(m.total(), 1);
  EXPECT_EQ(m.at(0, 7), 1);
  EXPECT_DOUBLE_EQ(glszm_features(m, 8.0).value("szm_z_perc"), 1.0 / 8.0);

  const auto diag = make({2, 2, 1}, {1, 1, 1, 1}, {1, 0, 0, 1}, 1);
  EXPECT_EQ(build_glszm(diag).total(), 1);

  const auto checker = make_full({2, 2, 1}, {1, 2, 2, 1}, 2);
  const auto z = build_glszm(checker);
  EXPECT_EQ(z.total(), 2);
  EXPECT_EQ(z.at(0, 1), 1);
  EXPECT_EQ(z.at(1, 1), 1);
}

TEST(Gldzm, Examples) {
  std::vector<int> levels(27, 1);
  levels[13] = 2;
  const auto cube = make_full({3, 3, 3}, levels, 2);
  const auto m = build_gldzm(cube);
  EXPECT_EQ(m.at(0, 0), 1);  // outer shell touches the border
  EXPECT_EQ(m.at(1, 1), 1);  // centre zone at distance 2
  EXPECT_EQ(m.total(), 2);

  const auto one = build_gldzm(make_full({1, 1, 1}, {1}, 1));
  EXPECT_EQ(one.n_columns, 1);
  EXPECT_EQ(one.at(0, 0), 1);
  EXPECT_EQ(gldzm_features(one, 1.0).provenance.at("gldzm_distance"), "city-block");
}

TEST(Ngtdm, Examples) {
  const auto c = build_ngtdm(make_full({2, 2, 1}, {3, 3, 3, 3}, 3));
  for (double s : c.abs_deviation) EXPECT_EQ(s, 0.0);
  const auto f = ngtdm_features(c);
  EXPECT_EQ(f.value("ngt_contrast"), 0.0);
  EXPECT_EQ(f.value("ngt_coarseness"), kCoarsenessCap);
  EXPECT_EQ(f.at("ngt_coarseness").flag, ValueFlag::Capped);

  const auto two = build_ngtdm(make_full({2, 1, 1}, {1, 2}, 2));
  EXPECT_EQ(two.abs_deviation, (std::vector<double>{1.0, 1.0}));
  EXPECT_EQ(two.occurrences, (std::vector<long long>{1, 1}));

  const auto lonely = build_ngtdm(make_full({1, 1, 1}, {1}, 1));
  EXPECT_EQ(lonely.occurrences.front(), 0);
}

TEST(Ngldm, Examples) {
  const auto one = build_ngldm(make_full({1, 1, 1}, {1}, 1));
  EXPECT_EQ(one.n_columns, 1);
  EXPECT_EQ(one.at(0, 0), 1);

  const auto pair = build_ngldm(make_full({2, 1, 1}, {1, 1}, 1));
  EXPECT_EQ(pair.at(0, 1), 2);

  const auto slab = build_ngldm(make_full({2, 2, 1}, {1, 2, 2, 3}, 3), 0);
  EXPECT_EQ(slab.at(0, 0), 1);
  EXPECT_EQ(slab.at(1, 1), 2);
  EXPECT_EQ(slab.at(2, 0), 1);
  EXPECT_EQ(slab.total(), 4);
  EXPECT_THROW(build_ngldm(make_full({1, 1, 1}, {1}, 1), -1), ConfigError);
}

TEST(Ngldm, DependenceCountBounded) {
  std::mt19937 rng(12);
  for (int trial = 0; trial < 30; ++trial) {
    const auto v = ts::random_discrete(rng, 5, 3);
    const auto m = build_ngldm(v, 2);
    EXPECT_LE(m.n_columns, 27);
    EXPECT_EQ(m.total(), static_cast<long long>(v.mask().voxel_count()));
  }
}

TEST(Aggregation, AverageMatchesMergeOnIsotropicConstant) {
  const auto cube = make_full({3, 3, 3}, std::vector<int>(27, 2), 3);
  const auto per = build_glcm(cube);
  const auto merged = glcm_features(per, AggregationMode::MergeMatrices);
  const auto averaged = glcm_features(per, AggregationMode::AverageFeatures);
  ASSERT_EQ(merged.size(), averaged.size());
  for (const auto& def : registry(FeatureClass::Glcm)) {
    const auto& a = merged.at(def.id);
    const auto& b = averaged.at(def.id);
    EXPECT_EQ(a.defined(), b.defined()) << def.id;
    if (a.defined()) EXPECT_DOUBLE_EQ(a.value, b.value) << def.id;
  }
  EXPECT_EQ(averaged.provenance.at("glcm_aggregation"), "average");
  EXPECT_EQ(parse_aggregation("merge"), AggregationMode::MergeMatrices);
  EXPECT_THROW(parse_aggregation("mean"), ConfigError);
}

TEST(Aggregation, AverageDiffersOnAnisotropicVolume) {
  std::vector<int> levels(27);
  for (std::size_t k = 0; k < 27; ++k) levels[k] = 1 + static_cast<int>(k % 3);
  const auto v = make_full({3, 3, 3}, levels, 3);
  const auto per = build_glcm(v);
  EXPECT_NE(glcm_features(per, AggregationMode::MergeMatrices).value("cm_contrast"),
            glcm_features(per, AggregationMode::AverageFeatures).value("cm_contrast"));
}

TEST(TextureFeatures, ClassCountsAndProvenance) {
  const auto p = ts::load_phantom();
  const auto d = discretize_identity(p.volume, p.mask, ShiftMode::OneBased).volume;
  const auto f = texture_features(d, {}, kAllTexture);
  EXPECT_EQ(f.size(), 25u + 16u * 4u + 5u);
  EXPECT_EQ(f.provenance.at("texture_distance"), "1");
  EXPECT_EQ(f.provenance.at("ngldm_alpha"), "0");
  const FeatureClass only[] = {FeatureClass::Ngtdm};
  EXPECT_EQ(texture_features(d, {}, only).size(), 5u);
}

TEST(TextureFeatures, PhantomReferenceMagnitudes) {
  const auto p = ts::load_phantom();
  const auto d = discretize_identity(p.volume, p.mask, ShiftMode::OneBased).volume;
  const auto f = texture_features(d, {}, kAllTexture);
  // Merged-matrix 3D reference values for the digital phantom.
  EXPECT_NEAR(f.value("cm_joint_max"), 0.509, 5e-4);
  EXPECT_NEAR(f.value("cm_joint_avg"), 2.149, 5e-4);
  EXPECT_NEAR(f.value("cm_joint_entr"), 2.574, 5e-4);
  EXPECT_NEAR(f.value("rlm_sre"), 0.729, 5e-4);
  EXPECT_NEAR(f.value("szm_sze"), 0.255, 5e-4);
  EXPECT_NEAR(f.value("dzm_sde"), 1.0, 1e-12);
  EXPECT_NEAR(f.value("ngt_coarseness"), 0.0296, 5e-5);
  EXPECT_NEAR(f.value("ngl_lde"), 0.045, 5e-4);
}

TEST(TextureFeatures, LowGreyEmphasisUndefinedWithZeroLevel) {
  const auto v = make({2, 1, 1}, {0, 1}, {1, 1}, 2, ShiftMode::ZeroBased);
  const auto f = glszm_features(build_glszm(v), 2.0);
  EXPECT_FALSE(f.at("szm_lgze").defined());
  EXPECT_TRUE(f.at("szm_hgze").defined());
}
