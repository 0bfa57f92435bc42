#include <fstream>
#include <numeric>

#include <gtest/gtest.h>

#include "radiomics/popularity.hpp"
#include "support.hpp"

using namespace radiomics;
namespace ts = testing_support;

namespace {

SupportMatrix from_weights(const std::vector<std::size_t>& weights, std::size_t n_software) {
  std::vector<std::string> sw;
  for (std::size_t s = 0; s < n_software; ++s) sw.push_back("S" + std::to_string(s));
  SupportMatrix m(sw);
  for (std::size_t i = 0; i < weights.size(); ++i) {
    std::vector<bool> flags(n_software, false);
    for (std::size_t s = 0; s < weights[i]; ++s) flags[s] = true;
    m.add_feature("f" + std::to_string(i), FeatureCategory::Texture, flags);
  }
  return m;
}

}  // namespace

TEST(Popularity, UniversalAndNone) {
  EXPECT_EQ(popularity_p1(from_weights({6, 6, 6}, 6)), 1.0);
  EXPECT_EQ(popularity_p2(from_weights({6, 6, 6}, 6)), 1.0);
  EXPECT_EQ(popularity_p1(from_weights({0, 0}, 6)), 0.0);
  EXPECT_EQ(popularity_p2(from_weights({0, 0}, 6)), 0.0);
}

TEST(Popularity, CutoffIsStrict) {
  EXPECT_EQ(popular_cutoff(6), 4u);
  EXPECT_EQ(popular_cutoff(4), 2u);
  EXPECT_EQ(popularity_p2(from_weights({6, 5, 4, 1}, 6)), 0.5);
  EXPECT_EQ(popularity_p2(from_weights({4, 4, 4, 4}, 6)), 0.0);
  EXPECT_DOUBLE_EQ(popularity_p1(from_weights({6, 5, 4, 1}, 6)), 16.0 / 24.0);
}

TEST(Popularity, BuiltinClassTotals) {
  const auto m = support_from_class_totals(builtin_software(), builtin_class_totals());
  EXPECT_EQ(m.software_count(), 6u);
  EXPECT_EQ(m.feature_count(), 173u);
  const double morph = popularity_p1(m, FeatureCategory::Morphology);
  const double stat = popularity_p1(m, FeatureCategory::StatisticHistogram);
  const double tex = popularity_p1(m, FeatureCategory::Texture);
  EXPECT_NEAR(morph, 91.0 / 174.0, 1e-12);
  EXPECT_NEAR(stat, 199.0 / 300.0, 1e-12);
  EXPECT_NEAR(tex, 417.0 / 564.0, 1e-12);
  EXPECT_LT(morph, stat);
  EXPECT_LT(stat, tex);
  std::size_t sum = 0;
  for (std::size_t s = 0; s < 6; ++s) sum += m.column_sum(s, FeatureCategory::Morphology);
  EXPECT_EQ(sum, 91u);
}

TEST(Popularity, SubsetsPartitionFeatures) {
  const auto m = support_from_class_totals(builtin_software(), builtin_class_totals());
  const auto c = intersection_counts(m);
  std::size_t total = c.unsupported;
  for (std::size_t i = 0; i < c.subsets.size(); ++i) {
    total += c.subsets[i].count;
    if (i > 0) EXPECT_GE(c.subsets[i - 1].count, c.subsets[i].count);
  }
  EXPECT_EQ(total, m.feature_count());
  std::size_t d = 0;
  for (const auto& f : c.full) d += f.total;
  EXPECT_EQ(d, 173u);
}

TEST(Popularity, TwoSoftwareDisjoint) {
  SupportMatrix m({"A", "B"});
  m.add_feature("x", FeatureCategory::Morphology, {true, false});
  m.add_feature("y", FeatureCategory::Morphology, {false, true});
  m.add_feature("z", FeatureCategory::Morphology, {false, true});
  m.add_feature("w", FeatureCategory::Texture, {false, false});
  const auto c = intersection_counts(m);
  ASSERT_EQ(c.subsets.size(), 2u);
  EXPECT_EQ(c.subsets[0].members, (std::vector<std::string>{"B"}));
  EXPECT_EQ(c.subsets[0].count, 2u);
  EXPECT_EQ(c.subsets[1].members, (std::vector<std::string>{"A"}));
  EXPECT_EQ(c.unsupported, 1u);
  for (const auto& f : c.full) EXPECT_EQ(f.shared, 0u);
}

TEST(Popularity, Errors) {
  SupportMatrix m({"A", "B"});
  EXPECT_THROW(m.add_feature("x", FeatureCategory::Texture, {true}), std::invalid_argument);
  m.add_feature("x", FeatureCategory::Texture, {true, true});
  EXPECT_THROW(m.add_feature("x", FeatureCategory::Texture, {true, true}), std::invalid_argument);
  EXPECT_THROW(popularity_p1(m, FeatureCategory::Morphology), ConfigError);
  EXPECT_THROW(popularity_p2(m, FeatureCategory::Morphology), ConfigError);
  EXPECT_THROW(intersection_counts(SupportMatrix({"A"})), std::invalid_argument);
}

TEST(Popularity, SupportCsv) {
  const auto dir = ts::temp_dir("support");
  std::ofstream(dir / "s.csv") << "feature_id,category,A,B,C\nf1,morphology,1,1,1\nf2,texture,1,0,0\n";
  const auto m = load_support_csv(dir / "s.csv");
  EXPECT_EQ(m.software(), (std::vector<std::string>{"A", "B", "C"}));
  EXPECT_EQ(m.weight(0), 3u);
  EXPECT_EQ(m.weight(1), 1u);
  EXPECT_EQ(m.category(1), FeatureCategory::Texture);
  std::ofstream(dir / "bad.csv") << "feature_id,category,A\nf1,morphology,2\n";
  EXPECT_THROW(load_support_csv(dir / "bad.csv"), InputError);
  const auto j = popularity_json(m);
  EXPECT_EQ(j.at("popular_cutoff"), 2);
  EXPECT_DOUBLE_EQ(j.at("p1").at("all").get<double>(), 4.0 / 6.0);
}
