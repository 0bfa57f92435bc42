#include "radiomics/conformance.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "radiomics/csv.hpp"
#include "radiomics/volume.hpp"

namespace radiomics {

RelativeDifference relative_difference(double value, double benchmark) {
  if (!std::isfinite(value) || !std::isfinite(benchmark)) {
    throw std::invalid_argument("relative difference of non-finite values");
  }
  if (benchmark == 0.0) return {std::abs(value), true};
  return {std::abs(value - benchmark) / std::abs(benchmark), false};
}

void BenchmarkTable::add(BenchmarkRow row) {
  if (!std::isfinite(row.value)) throw InputError(fmt::format("benchmark '{}' is not finite", row.feature_id));
  if (index_.contains(row.feature_id)) throw InputError(fmt::format("duplicate benchmark id '{}'", row.feature_id));
  index_.emplace(row.feature_id, rows_.size());
  rows_.push_back(std::move(row));
}

const BenchmarkRow* BenchmarkTable::find(const std::string& id) const {
  const auto it = index_.find(id);
  return it == index_.end() ? nullptr : &rows_[it->second];
}

BenchmarkTable load_benchmark_csv(const std::filesystem::path& path) {
  const auto csv = read_csv(path);
  BenchmarkTable table;
  for (const auto& row : csv.rows) {
    if (row.size() < 2) throw InputError("benchmark row needs feature_id,value");
    BenchmarkRow b{row[0], parse_double(row[1]), std::nullopt};
    if (row.size() > 2 && !row[2].empty()) b.tolerance = parse_double(row[2]);
    table.add(std::move(b));
  }
  return table;
}

BenchmarkTable benchmark_from_features(const FeatureSet& set) {
  BenchmarkTable table;
  for (const auto& v : set.values()) {
    if (v.defined() && std::isfinite(v.value)) table.add({v.id, v.value, std::nullopt});
  }
  return table;
}

void GlossaryMap::add(GlossaryRow row) {
  if (row.scale == 0.0 || !std::isfinite(row.scale) || !std::isfinite(row.offset)) {
    throw std::invalid_argument(fmt::format("glossary correction for '{}' is not invertible", row.alias));
  }
  if (find_feature(row.canonical_id) == nullptr) {
    throw std::invalid_argument(fmt::format("glossary maps to unknown feature '{}'", row.canonical_id));
  }
  const auto src = to_lower(row.source), alias = to_lower(row.alias);
  for (const auto& r : rows_) {
    if (to_lower(r.source) == src && to_lower(r.alias) == alias) {
      throw std::invalid_argument(fmt::format("duplicate glossary alias '{}' for source '{}'", row.alias, row.source));
    }
  }
  rows_.push_back(std::move(row));
}

std::vector<const GlossaryRow*> GlossaryMap::lookup(const std::string& source, const std::string& alias) const {
  const auto src = to_lower(source), name = to_lower(alias);
  std::vector<const GlossaryRow*> specific, wildcard;
  for (const auto& r : rows_) {
    if (to_lower(r.alias) != name) continue;
    if (to_lower(r.source) == src) {
      specific.push_back(&r);
    } else if (r.source == "*") {
      wildcard.push_back(&r);
    }
  }
  return specific.empty() ? wildcard : specific;
}

GlossaryMap load_glossary_csv(const std::filesystem::path& path) {
  const auto csv = read_csv(path);
  GlossaryMap map;
  for (const auto& row : csv.rows) {
    if (row.size() < 3) throw InputError("glossary row needs canonical_id,source,alias");
    GlossaryRow g{row[0], row[1], row[2], 1.0, 0.0};
    if (row.size() > 3 && !row[3].empty()) g.scale = parse_double(row[3]);
    if (row.size() > 4 && !row[4].empty()) g.offset = parse_double(row[4]);
    try {
      map.add(std::move(g));
    } catch (const std::invalid_argument& e) {
      throw InputError(e.what());
    }
  }
  return map;
}

std::vector<ExternalRow> load_external_csv(const std::filesystem::path& path) {
  const auto csv = read_csv(path);
  std::vector<ExternalRow> rows;
  for (const auto& row : csv.rows) {
    if (row.size() < 3) throw InputError("external row needs source,feature_name,value");
    rows.push_back({row[0], row[1], parse_double(row[2])});
  }
  return rows;
}

double invert_correction(double corrected, double scale, double offset) { return (corrected - offset) / scale; }

AliasMapping map_aliases(const std::vector<ExternalRow>& rows, const GlossaryMap& glossary) {
  AliasMapping out;
  for (const auto& row : rows) {
    const auto hits = glossary.lookup(row.source, row.feature_name);
    std::string canonical;
    double scale = 1.0, offset = 0.0;
    if (!hits.empty()) {
      for (const auto* h : hits) {
        if (h->canonical_id != hits.front()->canonical_id) {
          throw std::invalid_argument(
              fmt::format("ambiguous alias '{}' for source '{}'", row.feature_name, row.source));
        }
      }
      canonical = hits.front()->canonical_id;
      scale = hits.front()->scale;
      offset = hits.front()->offset;
    } else if (const auto* def = find_feature(row.feature_name); def != nullptr) {
      canonical = std::string(def->id);
    } else {
      out.unmapped.push_back(row);
      continue;
    }

    auto& set = out.sets[row.source];
    if (set.find(canonical) != nullptr) {
      throw std::invalid_argument(fmt::format("source '{}' reports '{}' twice", row.source, canonical));
    }
    const double corrected = scale * row.value + offset;
    if (std::isnan(row.value)) {
      set.add_undefined(canonical);
    } else {
      set.add(canonical, corrected);
    }
    out.mapped[row.source].push_back({canonical, corrected, row.value, scale, offset, row.feature_name});
  }
  return out;
}

std::string tier_key(Tier t) {
  switch (t) {
    case Tier::Match:
      return "match";
    case Tier::Close:
      return "close";
    case Tier::Divergent:
      return "divergent";
    case Tier::Missing:
      return "missing";
  }
  return "missing";
}

std::size_t ConformanceReport::count(Tier t) const {
  return static_cast<std::size_t>(std::count_if(entries.begin(), entries.end(), [t](const auto& e) { return e.tier == t; }));
}

std::size_t ConformanceReport::count(const std::string& source, Tier t) const {
  return static_cast<std::size_t>(std::count_if(
      entries.begin(), entries.end(), [&](const auto& e) { return e.tier == t && e.source == source; }));
}

const ConformanceEntry* ConformanceReport::find(const std::string& feature_id, const std::string& source) const {
  for (const auto& e : entries) {
    if (e.feature_id == feature_id && e.source == source) return &e;
  }
  return nullptr;
}

ConformanceReport conformance_report(const std::vector<NamedFeatureSet>& sets, const BenchmarkTable& benchmarks,
                                     TierThresholds thresholds) {
  ConformanceReport report;
  report.thresholds = thresholds;
  for (const auto& s : sets) report.sources.push_back(s.source);

  for (const auto& row : benchmarks.rows()) {
    const auto* def = find_feature(row.feature_id);
    const double match_limit = row.tolerance.value_or(thresholds.match);
    for (const auto& s : sets) {
      ConformanceEntry e;
      e.feature_id = row.feature_id;
      e.cls = def ? def->cls : FeatureClass::Diagnostic;
      e.source = s.source;
      e.benchmark = row.value;
      const auto* v = s.features.find(row.feature_id);
      if (v != nullptr && v->defined() && std::isfinite(v->value)) {
        const auto rd = relative_difference(v->value, row.value);
        e.computed = v->value;
        e.difference = rd.value;
        e.absolute_fallback = rd.absolute_fallback;
        if (rd.value <= match_limit) {
          e.tier = Tier::Match;
        } else if (rd.value <= thresholds.close) {
          e.tier = Tier::Close;
        } else {
          e.tier = Tier::Divergent;
        }
      }
      report.entries.push_back(std::move(e));
    }
  }
  return report;
}

nlohmann::json ConformanceReport::to_json() const {
  using nlohmann::json;
  json matrix = json::array();
  std::map<std::string, std::map<std::string, std::map<std::string, std::size_t>>> summary;
  for (const auto& e : entries) {
    json cell = {{"feature_id", e.feature_id},
                 {"class", std::string(class_key(e.cls))},
                 {"source", e.source},
                 {"benchmark", e.benchmark},
                 {"tier", tier_key(e.tier)},
                 {"absolute_fallback", e.absolute_fallback}};
    cell["value"] = e.computed ? json(*e.computed) : json(nullptr);
    cell["difference"] = e.difference ? json(*e.difference) : json(nullptr);
    matrix.push_back(std::move(cell));
    ++summary[e.source][std::string(class_key(e.cls))][tier_key(e.tier)];
  }
  json totals = json::object();
  for (const auto& src : sources) {
    totals[src] = json::object();
    for (auto t : {Tier::Match, Tier::Close, Tier::Divergent, Tier::Missing}) totals[src][tier_key(t)] = count(src, t);
  }
  return {{"matrix", matrix},
          {"tiers", {{"match", thresholds.match}, {"close", thresholds.close}}},
          {"summary", {{"by_class", summary}, {"by_source", totals}}}};
}

std::string ConformanceReport::to_csv() const {
  std::string out = "feature_id,class,source,value,benchmark,difference,absolute_fallback,tier\n";
  for (const auto& e : entries) {
    out += fmt::format("{},{},{},{},{:.17g},{},{},{}\n", e.feature_id, class_key(e.cls), e.source,
                       e.computed ? fmt::format("{:.17g}", *e.computed) : std::string(), e.benchmark,
                       e.difference ? fmt::format("{:.17g}", *e.difference) : std::string(),
                       e.absolute_fallback ? 1 : 0, tier_key(e.tier));
  }
  return out;
}

}  // namespace radiomics
