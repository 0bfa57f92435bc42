#include "radiomics/cli.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <stdexcept>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "radiomics/conformance.hpp"
#include "radiomics/csv.hpp"
#include "radiomics/intensity.hpp"
#include "radiomics/pipeline.hpp"
#include "radiomics/popularity.hpp"

namespace radiomics {

namespace {

using Opt = std::optional<std::string>;

// Flag values win over config-file values, which win over defaults.
class Settings {
 public:
  void load(const Opt& config_path) {
    if (config_path) file_ = load_config_file(*config_path);
  }
  Opt get(const std::string& key, const Opt& flag) const {
    if (flag) return flag;
    if (const auto it = file_.find(key); it != file_.end()) return it->second;
    return std::nullopt;
  }
  std::string get(const std::string& key, const Opt& flag, const std::string& fallback) const {
    return get(key, flag).value_or(fallback);
  }
  std::string require(const std::string& key, const Opt& flag) const {
    auto v = get(key, flag);
    if (!v || v->empty()) throw ConfigError(fmt::format("--{} is required", key));
    return *v;
  }

 private:
  std::map<std::string, std::string> file_;
};

int parse_int(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError(fmt::format("--{} expects an integer, got '{}'", key, text));
}

double parse_real(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError(fmt::format("--{} expects a number, got '{}'", key, text));
}

bool parse_bool(const std::string& text) {
  const auto t = to_lower(text);
  if (t == "1" || t == "true" || t == "yes" || t == "on") return true;
  if (t == "0" || t == "false" || t == "no" || t == "off" || t.empty()) return false;
  throw ConfigError(fmt::format("'{}' is not a boolean", text));
}

Spacing parse_spacing(const std::string& text) {
  auto cells = split_csv_line(text);
  if (cells.size() == 1) cells = {cells[0], cells[0], cells[0]};
  if (cells.size() != 3) throw ConfigError(fmt::format("--resample expects s or sx,sy,sz, got '{}'", text));
  Spacing s{parse_real("resample", cells[0]), parse_real("resample", cells[1]), parse_real("resample", cells[2])};
  if (!(s.sx > 0 && s.sy > 0 && s.sz > 0)) throw ConfigError("--resample spacing must be positive");
  return s;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError(fmt::format("cannot write '{}'", path.string()));
  f << text;
}

std::filesystem::path with_suffix(const std::string& prefix, const std::string& suffix) { return prefix + suffix; }

struct ExtractFlags {
  Opt volume, mask, discretize, shift_mode, resample, kernel, aggregation, ngldm_alpha, distance, classes, out,
      export_mesh, diagnostics;
};

int cmd_extract(const Settings& cfg, const ExtractFlags& f, std::ostream& out, std::ostream& err) {
  ExtractConfig config;
  const auto shift = parse_shift_mode(cfg.get("shift-mode", f.shift_mode, "one-based"));
  config.discretization = parse_discretization(cfg.get("discretize", f.discretize, "none"), shift);
  if (const auto r = cfg.get("resample", f.resample); r && *r != "none") {
    config.interpolation = InterpolationSpec{parse_spacing(*r), parse_kernel(cfg.get("kernel", f.kernel, "trilinear"))};
  }
  config.texture.aggregation = parse_aggregation(cfg.get("aggregation", f.aggregation, "merge"));
  config.texture.ngldm_alpha = parse_int("ngldm-alpha", cfg.get("ngldm-alpha", f.ngldm_alpha, "0"));
  config.texture.distance = parse_int("distance", cfg.get("distance", f.distance, "1"));
  if (config.texture.distance < 1) throw ConfigError("--distance must be >= 1");
  if (config.texture.ngldm_alpha < 0) throw ConfigError("--ngldm-alpha must be >= 0");
  config.classes = parse_classes(cfg.get("classes", f.classes, "all"));
  config.diagnostics = parse_bool(cfg.get("diagnostics", f.diagnostics, "false"));

  const auto volume_path = cfg.require("volume", f.volume);
  const auto mask_path = cfg.require("mask", f.mask);
  auto result = extract_files(volume_path, mask_path, config);
  for (const auto& w : result.warnings) err << "warning: " << w << '\n';

  const auto csv = features_to_csv(result.features);
  if (const auto prefix = cfg.get("out", f.out)) {
    write_text(with_suffix(*prefix, ".csv"), csv);
    auto doc = features_to_json(result.features);
    doc["manifest"] = result.manifest.to_json();
    write_text(with_suffix(*prefix, ".json"), doc.dump(2) + "\n");
    write_text(with_suffix(*prefix, ".manifest.json"), result.manifest.to_json().dump(2) + "\n");
  } else {
    out << csv;
  }
  if (const auto mesh_path = cfg.get("export-mesh", f.export_mesh)) {
    if (!result.mesh) throw ConfigError("--export-mesh requires the morphology class");
    write_obj(*result.mesh, *mesh_path);
  }
  return kExitOk;
}

struct ConformFlags {
  std::vector<std::string> features;
  Opt external, benchmark, glossary, out, match_tol, close_tol;
};

// "name=path" or a bare path whose stem names the source.
std::pair<std::string, std::string> source_and_path(const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq != std::string::npos) return {spec.substr(0, eq), spec.substr(eq + 1)};
  return {std::filesystem::path(spec).stem().string(), spec};
}

int cmd_conform(const Settings& cfg, const ConformFlags& f, std::ostream& out) {
  TierThresholds tiers;
  tiers.match = parse_real("match-tol", cfg.get("match-tol", f.match_tol, "1e-3"));
  tiers.close = parse_real("close-tol", cfg.get("close-tol", f.close_tol, "5e-2"));
  if (!(tiers.match >= 0 && tiers.close >= tiers.match)) throw ConfigError("tier thresholds must satisfy 0 <= match <= close");

  const auto benchmarks = load_benchmark_csv(cfg.require("benchmark", f.benchmark));
  std::vector<NamedFeatureSet> sets;
  for (const auto& spec : f.features) {
    auto [name, path] = source_and_path(spec);
    sets.push_back({name, load_features_csv(path)});
  }
  std::vector<ExternalRow> unmapped;
  if (const auto ext = cfg.get("external", f.external)) {
    GlossaryMap glossary;
    if (const auto g = cfg.get("glossary", f.glossary)) glossary = load_glossary_csv(*g);
    AliasMapping mapping;
    try {
      mapping = map_aliases(load_external_csv(*ext), glossary);
    } catch (const std::invalid_argument& e) {
      throw InputError(e.what());
    }
    for (auto& [source, set] : mapping.sets) sets.push_back({source, std::move(set)});
    unmapped = std::move(mapping.unmapped);
  }
  if (sets.empty()) throw ConfigError("conform needs --features or --external");

  const auto report = conformance_report(sets, benchmarks, tiers);
  auto doc = report.to_json();
  doc["unmapped"] = nlohmann::json::array();
  for (const auto& u : unmapped) doc["unmapped"].push_back({{"source", u.source}, {"feature_name", u.feature_name}});
  if (const auto prefix = cfg.get("out", f.out)) {
    write_text(with_suffix(*prefix, ".json"), doc.dump(2) + "\n");
    write_text(with_suffix(*prefix, ".csv"), report.to_csv());
  }
  for (const auto& s : report.sources) {
    out << fmt::format("{}: match={} close={} divergent={} missing={}\n", s, report.count(s, Tier::Match),
                       report.count(s, Tier::Close), report.count(s, Tier::Divergent), report.count(s, Tier::Missing));
  }
  return kExitOk;
}

struct PopularityFlags {
  Opt support, category, out;
  bool builtin = false;
};

int cmd_popularity(const Settings& cfg, const PopularityFlags& f, std::ostream& out) {
  const auto support = cfg.get("support", f.support);
  if (!support && !f.builtin) throw ConfigError("popularity needs --support or --builtin");
  const auto matrix = support ? load_support_csv(*support)
                              : support_from_class_totals(builtin_software(), builtin_class_totals());
  nlohmann::json doc;
  if (const auto cat_text = cfg.get("category", f.category)) {
    const auto cat = category_from_key(to_lower(*cat_text));
    if (!cat) throw ConfigError(fmt::format("unknown category '{}'", *cat_text));
    doc = {{"category", std::string(category_key(*cat))},
           {"p1", popularity_p1(matrix, *cat)},
           {"p2", popularity_p2(matrix, *cat)}};
  } else {
    doc = popularity_json(matrix);
  }
  const auto text = doc.dump(2) + "\n";
  if (const auto path = cfg.get("out", f.out)) {
    write_text(*path, text);
  } else {
    out << text;
  }
  return kExitOk;
}

int cmd_phantom_check(const Settings& cfg, const Opt& volume_flag, const Opt& mask_flag, const Opt& shift_flag,
                      std::ostream& out) {
  const auto volume = load_volume(cfg.require("volume", volume_flag));
  const auto mask = load_mask(cfg.require("mask", mask_flag), volume);
  const auto report = check_phantom(volume, mask);
  auto line = [&](const char* what, bool ok) { out << fmt::format("{:<16}{}\n", what, ok ? "ok" : "FAIL"); };
  line("dims", report.dims_ok);
  line("spacing", report.spacing_ok);
  line("whole range", report.whole_range_ok);
  line("roi range", report.roi_range_ok);
  line("absent levels", report.absent_levels_ok);
  const auto shift = parse_shift_mode(cfg.get("shift-mode", shift_flag, "one-based"));
  auto disc = discretize(volume, mask, DiscretizationSpec::identity(shift));
  const auto stats = basic_discretized_stats(disc.volume);
  for (const auto& v : stats.values()) out << fmt::format("{:<20}{:.4f}\n", v.id, v.value);
  return report.all_ok() ? kExitOk : kExitInputError;
}

int cmd_mesh_export(const Settings& cfg, const Opt& volume_flag, const Opt& mask_flag, const Opt& out_flag,
                    std::ostream& out) {
  const auto volume = load_volume(cfg.require("volume", volume_flag));
  const auto mask = load_mask(cfg.require("mask", mask_flag), volume);
  const auto mesh = marching_cubes(mask, volume.spacing());
  const auto audit = audit_mesh(mesh);
  write_obj(mesh, cfg.require("out", out_flag));
  out << fmt::format("vertices {}\ntriangles {}\nwatertight {}\nvolume {:.6f}\narea {:.6f}\n", mesh.vertices.size(),
                     mesh.faces.size(), audit.ok() ? "yes" : "no", mesh_volume(mesh), mesh_area(mesh));
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"IBSI radiomics feature extraction engine", "radiomics"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kEngineVersion));
  Opt config_path;
  app.add_option("--config", config_path, "key = value file; flags override it");

  auto* extract = app.add_subcommand("extract", "Compute features for a volume and mask");
  ExtractFlags ef;
  extract->add_option("--volume", ef.volume, "Volume (.json with .raw payload, or .csv slices)");
  extract->add_option("--mask", ef.mask, "ROI mask on the same grid");
  extract->add_option("--discretize", ef.discretize, "fbn:N, fbs:W or none");
  extract->add_option("--shift-mode", ef.shift_mode, "one-based or zero-based");
  extract->add_option("--resample", ef.resample, "Target spacing in mm: s or sx,sy,sz");
  extract->add_option("--kernel", ef.kernel, "nn or trilinear");
  extract->add_option("--aggregation", ef.aggregation, "merge or average");
  extract->add_option("--ngldm-alpha", ef.ngldm_alpha, "NGLDM coarseness");
  extract->add_option("--distance", ef.distance, "Texture neighbour distance");
  extract->add_option("--classes", ef.classes, "Comma-separated feature classes, or all");
  extract->add_option("--diagnostics", ef.diagnostics, "Append discretised level statistics");
  extract->add_option("--out", ef.out, "Output prefix; writes .csv, .json and .manifest.json");
  extract->add_option("--export-mesh", ef.export_mesh, "Write the ROI mesh as OBJ");
  extract->add_option("--config", config_path, "key = value file; flags override it");

  auto* conform = app.add_subcommand("conform", "Score feature values against a benchmark");
  ConformFlags cf;
  conform->add_option("--features", cf.features, "Feature CSV, optionally name=path");
  conform->add_option("--external", cf.external, "External results: source,feature_name,value");
  conform->add_option("--glossary", cf.glossary, "Alias glossary");
  conform->add_option("--benchmark", cf.benchmark, "Benchmark values: feature_id,value[,tolerance]");
  conform->add_option("--match-tol", cf.match_tol, "Upper relative difference for match");
  conform->add_option("--close-tol", cf.close_tol, "Upper relative difference for close");
  conform->add_option("--out", cf.out, "Output prefix; writes .json and .csv");
  conform->add_option("--config", config_path, "key = value file; flags override it");

  auto* popularity = app.add_subcommand("popularity", "Feature coverage across software");
  PopularityFlags pf;
  popularity->add_option("--support", pf.support, "Support matrix CSV");
  popularity->add_flag("--builtin", pf.builtin, "Use the built-in class-total template");
  popularity->add_option("--category", pf.category, "morphology, statistic_histogram or texture");
  popularity->add_option("--out", pf.out, "Output JSON path");
  popularity->add_option("--config", config_path, "key = value file; flags override it");

  auto* phantom = app.add_subcommand("phantom-check", "Validate the digital phantom layout");
  Opt ph_volume, ph_mask, ph_shift;
  phantom->add_option("--volume", ph_volume, "Phantom volume");
  phantom->add_option("--mask", ph_mask, "Phantom mask");
  phantom->add_option("--shift-mode", ph_shift, "one-based or zero-based");
  phantom->add_option("--config", config_path, "key = value file; flags override it");

  auto* mesh = app.add_subcommand("mesh-export", "Write the ROI surface mesh");
  Opt me_volume, me_mask, me_out;
  mesh->add_option("--volume", me_volume, "Volume defining grid and spacing");
  mesh->add_option("--mask", me_mask, "ROI mask");
  mesh->add_option("--out", me_out, "OBJ path");
  mesh->add_option("--config", config_path, "key = value file; flags override it");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kEngineVersion << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfigError;
  }

  try {
    Settings cfg;
    cfg.load(config_path);
    if (*extract) return cmd_extract(cfg, ef, out, err);
    if (*conform) return cmd_conform(cfg, cf, out);
    if (*popularity) return cmd_popularity(cfg, pf, out);
    if (*phantom) return cmd_phantom_check(cfg, ph_volume, ph_mask, ph_shift, out);
    if (*mesh) return cmd_mesh_export(cfg, me_volume, me_mask, me_out, out);
  } catch (const InputError& e) {
    err << "input error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::invalid_argument& e) {
    err << "input error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "input error: " << e.what() << '\n';
    return kExitInputError;
  }
  return kExitConfigError;
}

}  // namespace radiomics
