#include "radiomics/popularity.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include <fmt/format.h>

#include "radiomics/csv.hpp"
#include "radiomics/volume.hpp"

namespace radiomics {

SupportMatrix::SupportMatrix(std::vector<std::string> software) : software_(std::move(software)) {
  if (software_.empty()) throw std::invalid_argument("support matrix needs at least one software column");
}

void SupportMatrix::add_feature(std::string feature_id, FeatureCategory category, std::vector<bool> flags) {
  if (flags.size() != software_.size()) {
    throw std::invalid_argument(fmt::format("feature '{}' has {} flags, expected {}", feature_id, flags.size(),
                                            software_.size()));
  }
  if (std::find(ids_.begin(), ids_.end(), feature_id) != ids_.end()) {
    throw std::invalid_argument(fmt::format("duplicate feature '{}'", feature_id));
  }
  ids_.push_back(std::move(feature_id));
  categories_.push_back(category);
  flags_.push_back(std::move(flags));
}

std::size_t SupportMatrix::weight(std::size_t i) const {
  return static_cast<std::size_t>(std::count(flags_[i].begin(), flags_[i].end(), true));
}

std::size_t SupportMatrix::column_sum(std::size_t software, std::optional<FeatureCategory> category) const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (category && categories_[i] != *category) continue;
    n += flags_[i][software] ? 1 : 0;
  }
  return n;
}

std::vector<std::size_t> SupportMatrix::rows(std::optional<FeatureCategory> category) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (!category || categories_[i] == *category) out.push_back(i);
  }
  return out;
}

SupportMatrix load_support_csv(const std::filesystem::path& path) {
  const auto csv = read_csv(path);
  if (csv.header.size() < 3) throw InputError("support matrix needs feature_id,category and software columns");
  SupportMatrix m({csv.header.begin() + 2, csv.header.end()});
  for (const auto& row : csv.rows) {
    if (row.size() != csv.header.size()) throw InputError(fmt::format("support row '{}' has wrong width", row[0]));
    const auto cat = category_from_key(to_lower(row[1]));
    if (!cat) throw InputError(fmt::format("unknown category '{}'", row[1]));
    std::vector<bool> flags;
    for (std::size_t c = 2; c < row.size(); ++c) {
      if (row[c] != "0" && row[c] != "1") throw InputError(fmt::format("support flag '{}' is not 0/1", row[c]));
      flags.push_back(row[c] == "1");
    }
    try {
      m.add_feature(row[0], *cat, std::move(flags));
    } catch (const std::invalid_argument& e) {
      throw InputError(e.what());
    }
  }
  return m;
}

SupportMatrix support_from_class_totals(const std::vector<std::string>& software,
                                        const std::vector<ClassSupport>& totals) {
  SupportMatrix m(software);
  for (const auto& t : totals) {
    const auto defs = registry(t.cls);
    if (t.counts.size() != software.size()) throw std::invalid_argument("class total width mismatch");
    for (std::size_t k = 0; k < defs.size(); ++k) {
      std::vector<bool> flags;
      for (const auto c : t.counts) {
        if (c > defs.size()) throw std::invalid_argument(fmt::format("class total exceeds {}", class_key(t.cls)));
        flags.push_back(k < c);
      }
      m.add_feature(std::string(defs[k].id), category_of(t.cls), std::move(flags));
    }
  }
  return m;
}

std::vector<std::string> builtin_software() { return {"Pyradiomics", "MITK", "LIFEx", "SERA", "CaPTk", "A2"}; }

std::vector<ClassSupport> builtin_class_totals() {
  using C = FeatureClass;
  return {
      {C::Morphology, {14, 20, 2, 25, 3, 27}},
      {C::LocalIntensity, {0, 2, 0, 2, 0, 1}},
      {C::IntensityStatistics, {15, 18, 5, 18, 15, 18}},
      {C::IntensityHistogram, {2, 21, 2, 19, 17, 23}},
      {C::IntensityVolumeHistogram, {0, 7, 0, 7, 0, 7}},
      {C::Glcm, {23, 25, 6, 25, 6, 25}},
      {C::Glrlm, {16, 16, 11, 16, 4, 16}},
      {C::Glszm, {16, 16, 11, 16, 16, 16}},
      {C::Gldzm, {0, 0, 0, 16, 0, 16}},
      {C::Ngtdm, {5, 5, 3, 5, 5, 5}},
      {C::Ngldm, {13, 16, 0, 16, 16, 16}},
  };
}

namespace {

std::vector<std::size_t> selection(const SupportMatrix& m, std::optional<FeatureCategory> category) {
  auto rows = m.rows(category);
  if (rows.empty()) {
    throw ConfigError(category ? fmt::format("category '{}' has no features", category_key(*category))
                               : std::string("support matrix has no features"));
  }
  return rows;
}

}  // namespace

double popularity_p1(const SupportMatrix& m, std::optional<FeatureCategory> category) {
  const auto rows = selection(m, category);
  std::size_t total = 0;
  for (const auto i : rows) total += m.weight(i);
  return static_cast<double>(total) / static_cast<double>(m.software_count() * rows.size());
}

std::size_t popular_cutoff(std::size_t software_count) { return (2 * software_count) / 3; }

double popularity_p2(const SupportMatrix& m, std::optional<FeatureCategory> category) {
  const auto rows = selection(m, category);
  const auto cutoff = popular_cutoff(m.software_count());
  const auto popular = std::count_if(rows.begin(), rows.end(), [&](std::size_t i) { return m.weight(i) > cutoff; });
  return static_cast<double>(popular) / static_cast<double>(rows.size());
}

IntersectionCounts intersection_counts(const SupportMatrix& m) {
  if (m.feature_count() == 0) throw std::invalid_argument("empty support matrix");
  IntersectionCounts out;
  std::map<std::vector<bool>, std::size_t> by_set;
  for (std::size_t i = 0; i < m.feature_count(); ++i) {
    std::vector<bool> key(m.software_count());
    for (std::size_t s = 0; s < m.software_count(); ++s) key[s] = m.supports(i, s);
    if (m.weight(i) == 0) {
      ++out.unsupported;
    } else {
      ++by_set[key];
    }
  }
  for (const auto& [key, count] : by_set) {
    SubsetCount sc;
    for (std::size_t s = 0; s < key.size(); ++s) {
      if (key[s]) sc.members.push_back(m.software()[s]);
    }
    sc.count = count;
    out.subsets.push_back(std::move(sc));
  }
  std::stable_sort(out.subsets.begin(), out.subsets.end(), [](const auto& a, const auto& b) {
    if (a.count != b.count) return a.count > b.count;
    return a.members.size() > b.members.size();
  });
  for (auto cat : {FeatureCategory::Morphology, FeatureCategory::StatisticHistogram, FeatureCategory::Texture}) {
    const auto rows = m.rows(cat);
    if (rows.empty()) continue;
    IntersectionCounts::CategoryIntersection ci{cat, 0, rows.size()};
    for (const auto i : rows) ci.shared += m.weight(i) == m.software_count() ? 1 : 0;
    out.full.push_back(ci);
  }
  return out;
}

nlohmann::json popularity_json(const SupportMatrix& m) {
  using nlohmann::json;
  json p1 = json::object(), p2 = json::object();
  p1["all"] = popularity_p1(m);
  p2["all"] = popularity_p2(m);
  for (auto cat : {FeatureCategory::Morphology, FeatureCategory::StatisticHistogram, FeatureCategory::Texture}) {
    if (m.rows(cat).empty()) continue;
    p1[std::string(category_key(cat))] = popularity_p1(m, cat);
    p2[std::string(category_key(cat))] = popularity_p2(m, cat);
  }
  const auto counts = intersection_counts(m);
  json subsets = json::array();
  for (const auto& s : counts.subsets) subsets.push_back({{"members", s.members}, {"count", s.count}});
  json full = json::object();
  for (const auto& f : counts.full) {
    full[std::string(category_key(f.category))] = {{"shared", f.shared}, {"total", f.total}};
  }
  return {{"software", m.software()},
          {"features", m.feature_count()},
          {"p1", p1},
          {"p2", p2},
          {"popular_cutoff", popular_cutoff(m.software_count())},
          {"subsets", subsets},
          {"unsupported", counts.unsupported},
          {"full_intersection", full}};
}

}  // namespace radiomics
