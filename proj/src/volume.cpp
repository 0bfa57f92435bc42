#include "radiomics/volume.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

namespace radiomics {

namespace {

using nlohmann::json;

void require_positive(const Dims& d) {
  if (d.nx == 0 || d.ny == 0 || d.nz == 0) throw InputError("malformed header: dims must be positive");
}

void require_positive(const Spacing& s) {
  if (!(s.sx > 0.0) || !(s.sy > 0.0) || !(s.sz > 0.0) || !std::isfinite(s.sx) || !std::isfinite(s.sy) ||
      !std::isfinite(s.sz)) {
    throw InputError("malformed header: spacing must be positive");
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(fmt::format("cannot open '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

template <typename T>
T load_le(const char* p) {
  static_assert(sizeof(T) == 4);
  std::uint32_t bits = 0;
  for (int b = 3; b >= 0; --b) bits = (bits << 8) | static_cast<unsigned char>(p[b]);
  return std::bit_cast<T>(bits);
}

template <typename T>
void store_le(std::string& out, T v) {
  auto bits = std::bit_cast<std::uint32_t>(v);
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((bits >> (8 * b)) & 0xFFu));
}

struct RawGrid {
  Dims dims;
  Spacing spacing;
  std::vector<double> values;
  bool has_spacing = true;
};

RawGrid read_json_raw(const std::filesystem::path& path) {
  json header;
  try {
    header = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw InputError(fmt::format("malformed header: {}", e.what()));
  }
  RawGrid g;
  try {
    const auto& dims = header.at("dims");
    const auto& spacing = header.at("spacing_mm");
    if (dims.size() != 3 || spacing.size() != 3) throw InputError("malformed header: dims/spacing need 3 entries");
    for (const auto& d : dims) {
      if (!d.is_number_integer() || d.get<long long>() <= 0) throw InputError("malformed header: dims must be positive");
    }
    g.dims = {dims[0].get<std::size_t>(), dims[1].get<std::size_t>(), dims[2].get<std::size_t>()};
    g.spacing = {spacing[0].get<double>(), spacing[1].get<double>(), spacing[2].get<double>()};
  } catch (const json::exception& e) {
    throw InputError(fmt::format("malformed header: {}", e.what()));
  }
  require_positive(g.dims);
  require_positive(g.spacing);

  const std::string dtype = header.value("dtype", "f32");
  if (dtype != "f32" && dtype != "i32") throw InputError(fmt::format("malformed header: unknown dtype '{}'", dtype));
  if (!header.contains("data") || !header["data"].is_string()) throw InputError("malformed header: missing data path");

  const auto raw_path = path.parent_path() / header["data"].get<std::string>();
  const std::string payload = read_file(raw_path);
  const std::size_t n = g.dims.count();
  if (payload.size() % 4 != 0 || payload.size() / 4 != n) {
    throw InputError(fmt::format("payload length mismatch: expected {} values, found {} bytes", n, payload.size()));
  }
  g.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const char* p = payload.data() + 4 * i;
    g.values[i] = dtype == "f32" ? static_cast<double>(load_le<float>(p)) : static_cast<double>(load_le<std::int32_t>(p));
  }
  return g;
}

std::vector<double> parse_csv_row(const std::string& line) {
  std::vector<double> row;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    const auto first = cell.find_first_not_of(" \t\r");
    const auto last = cell.find_last_not_of(" \t\r");
    if (first == std::string::npos) throw InputError("malformed csv: empty cell");
    const std::string token = cell.substr(first, last - first + 1);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(token, &used);
    } catch (const std::exception&) {
      throw InputError(fmt::format("malformed csv: '{}' is not a number", token));
    }
    if (used != token.size()) throw InputError(fmt::format("malformed csv: '{}' is not a number", token));
    row.push_back(v);
  }
  return row;
}

// Optional first line "# spacing_mm=sx,sy,sz"; slices separated by blank lines.
RawGrid read_csv_slices(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  RawGrid g;
  g.has_spacing = false;
  std::vector<std::vector<std::vector<double>>> slices(1);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty() && line.front() == '#') {
      const auto eq = line.find("spacing_mm=");
      if (eq != std::string::npos) {
        const auto s = parse_csv_row(line.substr(eq + 11));
        if (s.size() != 3) throw InputError("malformed header: spacing_mm needs 3 entries");
        g.spacing = {s[0], s[1], s[2]};
        g.has_spacing = true;
      }
      continue;
    }
    if (line.find_first_not_of(" \t") == std::string::npos) {
      if (!slices.back().empty()) slices.emplace_back();
      continue;
    }
    slices.back().push_back(parse_csv_row(line));
  }
  if (slices.back().empty()) slices.pop_back();
  if (slices.empty()) throw InputError("malformed csv: no data");

  g.dims = {slices[0][0].size(), slices[0].size(), slices.size()};
  require_positive(g.dims);
  require_positive(g.spacing);
  g.values.reserve(g.dims.count());
  for (const auto& slice : slices) {
    if (slice.size() != g.dims.ny) throw InputError("payload length mismatch: ragged slice row count");
    for (const auto& row : slice) {
      if (row.size() != g.dims.nx) throw InputError("payload length mismatch: ragged row length");
      g.values.insert(g.values.end(), row.begin(), row.end());
    }
  }
  return g;
}

RawGrid read_grid(const std::filesystem::path& path, VolumeFormat format) {
  return format == VolumeFormat::JsonRaw ? read_json_raw(path) : read_csv_slices(path);
}

}  // namespace

GrayVolume::GrayVolume(Dims dims, Spacing spacing, std::vector<double> values)
    : dims_(dims), spacing_(spacing), values_(std::move(values)) {
  require_positive(dims_);
  require_positive(spacing_);
  if (values_.size() != dims_.count()) {
    throw InputError(fmt::format("payload length mismatch: expected {} values, got {}", dims_.count(), values_.size()));
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw InputError("non-finite voxel value");
  }
}

RoiMask::RoiMask(Dims dims, std::vector<std::uint8_t> flags) : dims_(dims), flags_(std::move(flags)) {
  require_positive(dims_);
  if (flags_.size() != dims_.count()) throw InputError("dims mismatch: mask size differs from grid");
  for (auto& f : flags_) {
    f = f != 0 ? 1 : 0;
    count_ += f;
  }
  if (count_ == 0) throw InputError("empty mask");
}

std::vector<std::size_t> RoiMask::indices() const {
  std::vector<std::size_t> out;
  out.reserve(count_);
  for (std::size_t i = 0; i < flags_.size(); ++i) {
    if (flags_[i]) out.push_back(i);
  }
  return out;
}

VolumeFormat format_from_path(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == ".json") return VolumeFormat::JsonRaw;
  if (ext == ".csv" || ext == ".txt") return VolumeFormat::CsvSlices;
  throw InputError(fmt::format("unrecognized volume format for '{}'", path.string()));
}

GrayVolume load_volume(const std::filesystem::path& path, VolumeFormat format) {
  auto g = read_grid(path, format);
  return GrayVolume(g.dims, g.spacing, std::move(g.values));
}

GrayVolume load_volume(const std::filesystem::path& path) { return load_volume(path, format_from_path(path)); }

RoiMask load_mask(const std::filesystem::path& path, const GrayVolume& volume) {
  auto g = read_grid(path, format_from_path(path));
  if (!(g.dims == volume.dims())) {
    throw InputError(fmt::format("dims mismatch: mask {}x{}x{} vs volume {}x{}x{}", g.dims.nx, g.dims.ny, g.dims.nz,
                                 volume.dims().nx, volume.dims().ny, volume.dims().nz));
  }
  std::vector<std::uint8_t> flags(g.values.size());
  std::transform(g.values.begin(), g.values.end(), flags.begin(), [](double v) { return v != 0.0 ? 1 : 0; });
  return RoiMask(g.dims, std::move(flags));
}

std::filesystem::path save_volume_json_raw(const GrayVolume& volume, const std::filesystem::path& json_path,
                                           RawType dtype) {
  auto raw_path = json_path;
  raw_path.replace_extension(".raw");
  std::string payload;
  payload.reserve(volume.size() * 4);
  for (double v : volume.values()) {
    if (dtype == RawType::F32) {
      store_le(payload, static_cast<float>(v));
    } else {
      store_le(payload, static_cast<std::int32_t>(std::llround(v)));
    }
  }
  std::ofstream raw(raw_path, std::ios::binary);
  if (!raw) throw InputError(fmt::format("cannot write '{}'", raw_path.string()));
  raw.write(payload.data(), static_cast<std::streamsize>(payload.size()));

  const auto& d = volume.dims();
  const auto& s = volume.spacing();
  json header = {{"dims", {d.nx, d.ny, d.nz}},
                 {"spacing_mm", {s.sx, s.sy, s.sz}},
                 {"dtype", dtype == RawType::F32 ? "f32" : "i32"},
                 {"data", raw_path.filename().string()}};
  std::ofstream out(json_path);
  if (!out) throw InputError(fmt::format("cannot write '{}'", json_path.string()));
  out << header.dump(2) << '\n';
  return json_path;
}

void save_volume_csv(const GrayVolume& volume, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError(fmt::format("cannot write '{}'", path.string()));
  const auto& d = volume.dims();
  const auto& s = volume.spacing();
  out << fmt::format("# spacing_mm={:.17g},{:.17g},{:.17g}\n", s.sx, s.sy, s.sz);
  for (std::size_t z = 0; z < d.nz; ++z) {
    if (z > 0) out << '\n';
    for (std::size_t y = 0; y < d.ny; ++y) {
      for (std::size_t x = 0; x < d.nx; ++x) {
        out << (x ? "," : "") << fmt::format("{:.17g}", volume.at(x, y, z));
      }
      out << '\n';
    }
  }
}

PhantomCheckReport check_phantom(const GrayVolume& volume, const RoiMask& mask) {
  PhantomCheckReport r;
  const auto values = volume.values();
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  r.whole_range = {*lo, *hi};

  double roi_lo = std::numeric_limits<double>::infinity();
  double roi_hi = -roi_lo;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!mask.contains(i)) continue;
    roi_lo = std::min(roi_lo, values[i]);
    roi_hi = std::max(roi_hi, values[i]);
    if (values[i] == std::floor(values[i])) r.roi_levels_present.insert(static_cast<long long>(values[i]));
  }
  r.roi_range = {roi_lo, roi_hi};

  r.dims_ok = volume.dims() == Dims{5, 4, 4} && mask.dims() == volume.dims();
  r.spacing_ok = volume.spacing() == Spacing{2.0, 2.0, 2.0};
  r.whole_range_ok = r.whole_range.first >= 1.0 && r.whole_range.second <= 9.0;
  r.roi_range_ok = roi_lo >= 1.0 && roi_hi <= 6.0;
  r.absent_levels_ok = !r.roi_levels_present.contains(2) && !r.roi_levels_present.contains(5);
  return r;
}

}  // namespace radiomics
