#include "radiomics/pipeline.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "radiomics/csv.hpp"
#include "radiomics/intensity.hpp"

namespace radiomics {

namespace {

bool wants(const ExtractConfig& config, FeatureClass c) {
  return std::find(config.classes.begin(), config.classes.end(), c) != config.classes.end();
}

std::string kernel_key(InterpolationKernel k) { return k == InterpolationKernel::Trilinear ? "trilinear" : "nn"; }

std::string format_value(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return fmt::format("{:.17g}", v);
}

}  // namespace

nlohmann::json RunManifest::to_json() const {
  return {{"engine", engine},
          {"version", version},
          {"inputs", input_digests},
          {"discretization", discretization},
          {"interpolation", interpolation},
          {"aggregation", aggregation},
          {"mesher", mesher},
          {"timestamp", timestamp}};
}

ExtractResult extract_features(const GrayVolume& volume, const RoiMask& mask, const ExtractConfig& config) {
  config.discretization.validate();
  ExtractResult result;
  auto& m = result.manifest;
  m.engine = kEngineName;
  m.version = kEngineVersion;
  m.discretization = config.discretization.describe();
  m.aggregation = aggregation_key(config.texture.aggregation);
  m.mesher = kMesherIdentity;
  m.timestamp = utc_timestamp();

  std::optional<Resampled> resampled;
  if (config.interpolation) {
    resampled.emplace(interpolate(volume, mask, *config.interpolation));
    const auto& s = config.interpolation->target_spacing;
    m.interpolation = fmt::format("{}:{:.17g},{:.17g},{:.17g}", kernel_key(config.interpolation->kernel), s.sx, s.sy,
                                  s.sz);
  } else {
    m.interpolation = "none";
  }
  const GrayVolume& vol = resampled ? resampled->volume : volume;
  const RoiMask& roi = resampled ? resampled->mask : mask;

  FeatureSet& out = result.features;
  if (wants(config, FeatureClass::Morphology)) {
    result.mesh = marching_cubes(roi, vol.spacing());
    out.append(morphology_features(vol, roi, *result.mesh));
  }
  if (wants(config, FeatureClass::LocalIntensity)) out.append(local_intensity(vol, roi));
  if (wants(config, FeatureClass::IntensityStatistics)) out.append(intensity_statistics(vol, roi));

  const bool need_levels = wants(config, FeatureClass::IntensityHistogram) ||
                           wants(config, FeatureClass::IntensityVolumeHistogram) || config.diagnostics ||
                           std::any_of(config.classes.begin(), config.classes.end(), [](FeatureClass c) {
                             return category_of(c) == FeatureCategory::Texture;
                           });
  if (need_levels) {
    auto disc = discretize(vol, roi, config.discretization);
    result.warnings = std::move(disc.warnings);
    const auto& dvol = disc.volume;
    if (wants(config, FeatureClass::IntensityHistogram)) out.append(intensity_histogram_features(dvol));
    if (wants(config, FeatureClass::IntensityVolumeHistogram)) out.append(ivh_features(dvol));
    std::vector<FeatureClass> tex;
    std::copy_if(config.classes.begin(), config.classes.end(), std::back_inserter(tex),
                 [](FeatureClass c) { return category_of(c) == FeatureCategory::Texture; });
    if (!tex.empty()) out.append(texture_features(dvol, config.texture, tex));
    if (config.diagnostics) out.append(basic_discretized_stats(dvol));
  }

  // Registry order regardless of computation order.
  FeatureSet ordered;
  for (const auto& def : registry()) {
    if (const auto* v = out.find(def.id)) ordered.add(v->id, v->value, v->flag);
  }
  for (const auto& def : diagnostic_registry()) {
    if (const auto* v = out.find(def.id)) ordered.add(v->id, v->value, v->flag);
  }
  ordered.provenance = out.provenance;
  ordered.provenance["discretization"] = m.discretization;
  ordered.provenance["interpolation"] = m.interpolation;
  result.features = std::move(ordered);
  return result;
}

ExtractResult extract_files(const std::filesystem::path& volume_path, const std::filesystem::path& mask_path,
                            const ExtractConfig& config) {
  const auto volume = load_volume(volume_path);
  const auto mask = load_mask(mask_path, volume);
  auto result = extract_features(volume, mask, config);
  result.manifest.input_digests[volume_path.string()] = sha256_file(volume_path);
  result.manifest.input_digests[mask_path.string()] = sha256_file(mask_path);
  return result;
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(fmt::format("cannot open '{}'", path.string()));
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  std::array<char, 65536> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md.data(), &len);
  EVP_MD_CTX_free(ctx);
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", md[i]);
  return hex;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::array<char, 32> buf{};
  std::strftime(buf.data(), buf.size(), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf.data();
}

std::string features_to_csv(const FeatureSet& set) {
  std::string out = "feature_id,class,value,flag\n";
  for (const auto& v : set.values()) {
    out += fmt::format("{},{},{},{}\n", v.id, class_key(v.cls), v.defined() ? format_value(v.value) : "nan",
                       flag_key(v.flag));
  }
  return out;
}

nlohmann::json features_to_json(const FeatureSet& set) {
  using nlohmann::json;
  json rows = json::array();
  for (const auto& v : set.values()) {
    json row = {{"feature_id", v.id}, {"class", std::string(class_key(v.cls))}, {"flag", std::string(flag_key(v.flag))}};
    row["value"] = v.defined() && std::isfinite(v.value) ? json(v.value) : json(nullptr);
    rows.push_back(std::move(row));
  }
  return {{"features", rows}, {"provenance", set.provenance}};
}

FeatureSet load_features_csv(const std::filesystem::path& path) {
  const auto csv = read_csv(path);
  if (csv.header.empty() || csv.header[0] != "feature_id") {
    throw InputError(fmt::format("'{}' is not a feature CSV", path.string()));
  }
  FeatureSet set;
  for (const auto& row : csv.rows) {
    if (row.size() < 3) throw InputError("feature row needs feature_id,class,value");
    const auto flag = row.size() > 3 ? flag_from_key(row[3]) : std::optional<ValueFlag>(ValueFlag::None);
    if (!flag) throw InputError(fmt::format("unknown flag '{}'", row[3]));
    try {
      if (*flag == ValueFlag::Undefined) {
        set.add_undefined(row[0]);
      } else {
        set.add(row[0], parse_double(row[2]), *flag);
      }
    } catch (const std::logic_error& e) {
      throw InputError(e.what());
    }
  }
  return set;
}

std::vector<FeatureClass> parse_classes(const std::string& text) {
  if (text.empty() || text == "all") return {kStandardClasses.begin(), kStandardClasses.end()};
  std::vector<FeatureClass> out;
  for (const auto& key : split_csv_line(text)) {
    const auto c = class_from_key(to_lower(key));
    if (!c || *c == FeatureClass::Diagnostic) throw ConfigError(fmt::format("unknown feature class '{}'", key));
    if (std::find(out.begin(), out.end(), *c) == out.end()) out.push_back(*c);
  }
  return out;
}

std::map<std::string, std::string> load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config '{}'", path.string()));
  std::map<std::string, std::string> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(fmt::format("{}:{}: expected key = value", path.string(), lineno));
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r\"");
      if (a == std::string::npos) return std::string();
      const auto b = s.find_last_not_of(" \t\r\"");
      return s.substr(a, b - a + 1);
    };
    const auto key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError(fmt::format("{}:{}: empty key", path.string(), lineno));
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

}  // namespace radiomics
