#include "radiomics/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace radiomics {

DiscretizationSpec DiscretizationSpec::fixed_bin_number(int n_bins, ShiftMode mode) {
  DiscretizationSpec s{DiscretizationMethod::FixedBinNumber, n_bins, std::nullopt, mode};
  s.validate();
  return s;
}

DiscretizationSpec DiscretizationSpec::fixed_bin_size(double width, ShiftMode mode) {
  DiscretizationSpec s{DiscretizationMethod::FixedBinSize, std::nullopt, width, mode};
  s.validate();
  return s;
}

DiscretizationSpec DiscretizationSpec::identity(ShiftMode mode) {
  return {DiscretizationMethod::Identity, std::nullopt, std::nullopt, mode};
}

void DiscretizationSpec::validate() const {
  switch (method) {
    case DiscretizationMethod::FixedBinNumber:
      if (!n_bins || bin_width) throw ConfigError("fixed bin number requires n_bins only");
      if (*n_bins < 1) throw ConfigError("n_bins must be >= 1");
      break;
    case DiscretizationMethod::FixedBinSize:
      if (!bin_width || n_bins) throw ConfigError("fixed bin size requires bin_width only");
      if (!(*bin_width > 0.0) || !std::isfinite(*bin_width)) throw ConfigError("bin_width must be > 0");
      break;
    case DiscretizationMethod::Identity:
      if (n_bins || bin_width) throw ConfigError("identity discretization takes no parameters");
      break;
  }
}

std::string DiscretizationSpec::describe() const {
  std::string m;
  switch (method) {
    case DiscretizationMethod::FixedBinNumber:
      m = fmt::format("fbn:{}", *n_bins);
      break;
    case DiscretizationMethod::FixedBinSize:
      m = fmt::format("fbs:{:.17g}", *bin_width);
      break;
    case DiscretizationMethod::Identity:
      m = "none";
      break;
  }
  return m + "/" + shift_mode_key(shift_mode);
}

DiscretizationSpec parse_discretization(const std::string& text, ShiftMode mode) {
  if (text == "none" || text.empty()) return DiscretizationSpec::identity(mode);
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw ConfigError(fmt::format("bad discretization '{}'", text));
  const auto kind = text.substr(0, colon);
  const auto arg = text.substr(colon + 1);
  try {
    std::size_t used = 0;
    if (kind == "fbn") {
      const int n = std::stoi(arg, &used);
      if (used != arg.size()) throw ConfigError(fmt::format("bad bin number '{}'", arg));
      return DiscretizationSpec::fixed_bin_number(n, mode);
    }
    if (kind == "fbs") {
      const double w = std::stod(arg, &used);
      if (used != arg.size()) throw ConfigError(fmt::format("bad bin width '{}'", arg));
      return DiscretizationSpec::fixed_bin_size(w, mode);
    }
  } catch (const std::logic_error&) {
    throw ConfigError(fmt::format("bad discretization argument '{}'", arg));
  }
  throw ConfigError(fmt::format("unknown discretization method '{}'", kind));
}

ShiftMode parse_shift_mode(const std::string& text) {
  if (text == "one-based") return ShiftMode::OneBased;
  if (text == "zero-based") return ShiftMode::ZeroBased;
  throw ConfigError(fmt::format("unknown shift mode '{}'", text));
}

std::string shift_mode_key(ShiftMode mode) { return mode == ShiftMode::OneBased ? "one-based" : "zero-based"; }

DiscreteVolume::DiscreteVolume(Dims dims, Spacing spacing, RoiMask mask, std::vector<int> levels,
                               DiscretizationSpec spec, int n_levels)
    : dims_(dims), spacing_(spacing), mask_(std::move(mask)), levels_(std::move(levels)), spec_(spec),
      n_levels_(n_levels) {
  if (!(mask_.dims() == dims_) || levels_.size() != dims_.count()) throw InputError("dims mismatch: levels vs mask");
  if (n_levels_ < 1) throw ConfigError("number of grey levels must be >= 1");
  int lo = std::numeric_limits<int>::max();
  int hi = std::numeric_limits<int>::min();
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    if (!mask_.contains(i)) continue;
    lo = std::min(lo, levels_[i]);
    hi = std::max(hi, levels_[i]);
  }
  level_range_ = {lo, hi};
  if (lo < base_level()) {
    throw ConfigError(fmt::format("discrete level {} below base level {} for {} mode", lo, base_level(),
                                  shift_mode_key(spec_.shift_mode)));
  }
  if (hi > top_level()) throw ConfigError(fmt::format("discrete level {} above top level {}", hi, top_level()));
}

std::vector<int> DiscreteVolume::roi_levels() const {
  std::vector<int> out;
  out.reserve(mask_.voxel_count());
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    if (mask_.contains(i)) out.push_back(levels_[i]);
  }
  return out;
}

DiscreteVolume DiscreteVolume::relabeled(int delta, ShiftMode mode) const {
  auto levels = levels_;
  for (auto& l : levels) l += delta;
  auto spec = spec_;
  spec.shift_mode = mode;
  return DiscreteVolume(dims_, spacing_, mask_, std::move(levels), spec, n_levels_);
}

namespace {

std::pair<double, double> roi_min_max(const GrayVolume& volume, const RoiMask& mask) {
  if (!(volume.dims() == mask.dims())) throw InputError("dims mismatch: mask vs volume");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < volume.size(); ++i) {
    if (!mask.contains(i)) continue;
    lo = std::min(lo, volume[i]);
    hi = std::max(hi, volume[i]);
  }
  return {lo, hi};
}

int shift_of(ShiftMode mode) { return mode == ShiftMode::OneBased ? 0 : -1; }

}  // namespace

DiscretizeResult discretize_fbn(const GrayVolume& volume, const RoiMask& mask, int n_bins, ShiftMode mode) {
  const auto spec = DiscretizationSpec::fixed_bin_number(n_bins, mode);
  const auto [lo, hi] = roi_min_max(volume, mask);
  const int shift = shift_of(mode);
  std::vector<int> levels(volume.size(), 0);
  std::vector<std::string> warnings;

  if (hi == lo) {
    warnings.push_back("zero intensity range in ROI: all levels set to the lowest bin");
    for (std::size_t i = 0; i < levels.size(); ++i) {
      if (mask.contains(i)) levels[i] = 1 + shift;
    }
  } else {
    const double span = hi - lo;
    for (std::size_t i = 0; i < levels.size(); ++i) {
      if (!mask.contains(i)) continue;
      const double x = volume[i];
      const int level = x >= hi ? n_bins : static_cast<int>(std::floor(n_bins * (x - lo) / span)) + 1;
      levels[i] = level + shift;
    }
  }
  return {DiscreteVolume(volume.dims(), volume.spacing(), mask, std::move(levels), spec, n_bins), std::move(warnings)};
}

DiscretizeResult discretize_fbs(const GrayVolume& volume, const RoiMask& mask, double bin_width, ShiftMode mode) {
  const auto spec = DiscretizationSpec::fixed_bin_size(bin_width, mode);
  const auto [lo, hi] = roi_min_max(volume, mask);
  const int shift = shift_of(mode);
  std::vector<int> levels(volume.size(), 0);
  int top = 1;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (!mask.contains(i)) continue;
    const int level = static_cast<int>(std::floor((volume[i] - lo) / bin_width)) + 1;
    top = std::max(top, level);
    levels[i] = level + shift;
  }
  (void)hi;
  return {DiscreteVolume(volume.dims(), volume.spacing(), mask, std::move(levels), spec, top), {}};
}

DiscretizeResult discretize_identity(const GrayVolume& volume, const RoiMask& mask, ShiftMode mode) {
  const auto spec = DiscretizationSpec::identity(mode);
  const auto [lo, hi] = roi_min_max(volume, mask);
  if (lo < 1.0) throw ConfigError("identity discretization requires ROI intensities >= 1");
  const int shift = shift_of(mode);
  std::vector<int> levels(volume.size(), 0);
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (!mask.contains(i)) continue;
    const double x = volume[i];
    if (x != std::floor(x) || x > std::numeric_limits<int>::max() / 2) {
      throw ConfigError("identity discretization requires integer ROI intensities");
    }
    levels[i] = static_cast<int>(x) + shift;
  }
  return {DiscreteVolume(volume.dims(), volume.spacing(), mask, std::move(levels), spec, static_cast<int>(hi)), {}};
}

DiscretizeResult discretize(const GrayVolume& volume, const RoiMask& mask, const DiscretizationSpec& spec) {
  spec.validate();
  switch (spec.method) {
    case DiscretizationMethod::FixedBinNumber:
      return discretize_fbn(volume, mask, *spec.n_bins, spec.shift_mode);
    case DiscretizationMethod::FixedBinSize:
      return discretize_fbs(volume, mask, *spec.bin_width, spec.shift_mode);
    case DiscretizationMethod::Identity:
      break;
  }
  return discretize_identity(volume, mask, spec.shift_mode);
}

InterpolationKernel parse_kernel(const std::string& text) {
  if (text == "nn") return InterpolationKernel::NearestNeighbor;
  if (text == "trilinear") return InterpolationKernel::Trilinear;
  throw ConfigError(fmt::format("unknown interpolation kernel '{}'", text));
}

namespace {

struct AxisMap {
  std::size_t n_out = 0;
  double offset = 0.0;  // input index of output sample 0
  double step = 1.0;    // input index increment per output sample

  double position(std::size_t j) const { return offset + static_cast<double>(j) * step; }
};

AxisMap axis_map(std::size_t n_in, double s_in, double s_out) {
  if (!(s_out > 0.0) || !std::isfinite(s_out)) throw ConfigError("target spacing must be positive");
  const double extent = static_cast<double>(n_in) * s_in / s_out;
  AxisMap m;
  m.n_out = static_cast<std::size_t>(std::ceil(extent - 1e-9 * extent));
  if (m.n_out == 0) throw ConfigError("degenerate output grid");
  m.step = s_out / s_in;
  m.offset = (static_cast<double>(n_in - 1) - static_cast<double>(m.n_out - 1) * m.step) / 2.0;
  return m;
}

struct Tap {
  std::size_t lo = 0;
  std::size_t hi = 0;
  double frac = 0.0;
};

Tap linear_tap(double pos, std::size_t n) {
  const double clamped = std::clamp(pos, 0.0, static_cast<double>(n - 1));
  Tap t;
  t.lo = static_cast<std::size_t>(std::floor(clamped));
  t.hi = std::min(t.lo + 1, n - 1);
  t.frac = clamped - static_cast<double>(t.lo);
  return t;
}

std::size_t nearest(double pos, std::size_t n) {
  const double clamped = std::clamp(pos, 0.0, static_cast<double>(n - 1));
  return static_cast<std::size_t>(std::floor(clamped + 0.5));
}

}  // namespace

Resampled interpolate(const GrayVolume& volume, const RoiMask& mask, const InterpolationSpec& spec) {
  if (!(volume.dims() == mask.dims())) throw InputError("dims mismatch: mask vs volume");
  const auto& d = volume.dims();
  const auto& s = volume.spacing();
  const auto& t = spec.target_spacing;
  const auto mx = axis_map(d.nx, s.sx, t.sx);
  const auto my = axis_map(d.ny, s.sy, t.sy);
  const auto mz = axis_map(d.nz, s.sz, t.sz);

  if (t == s) return {volume, mask};

  const Dims out{mx.n_out, my.n_out, mz.n_out};
  std::vector<double> values(out.count());
  std::vector<std::uint8_t> flags(out.count());

  for (std::size_t z = 0; z < out.nz; ++z) {
    for (std::size_t y = 0; y < out.ny; ++y) {
      for (std::size_t x = 0; x < out.nx; ++x) {
        const double px = mx.position(x);
        const double py = my.position(y);
        const double pz = mz.position(z);
        const auto i = linear_index(out, x, y, z);

        flags[i] = mask.flags()[linear_index(d, nearest(px, d.nx), nearest(py, d.ny), nearest(pz, d.nz))];

        if (spec.kernel == InterpolationKernel::NearestNeighbor) {
          values[i] = volume.at(nearest(px, d.nx), nearest(py, d.ny), nearest(pz, d.nz));
          continue;
        }
        const auto tx = linear_tap(px, d.nx);
        const auto ty = linear_tap(py, d.ny);
        const auto tz = linear_tap(pz, d.nz);
        double acc = 0.0;
        for (int cz = 0; cz < 2; ++cz) {
          const double wz = cz ? tz.frac : 1.0 - tz.frac;
          if (wz == 0.0) continue;
          for (int cy = 0; cy < 2; ++cy) {
            const double wy = cy ? ty.frac : 1.0 - ty.frac;
            if (wy == 0.0) continue;
            for (int cx = 0; cx < 2; ++cx) {
              const double wx = cx ? tx.frac : 1.0 - tx.frac;
              if (wx == 0.0) continue;
              acc += wx * wy * wz * volume.at(cx ? tx.hi : tx.lo, cy ? ty.hi : ty.lo, cz ? tz.hi : tz.lo);
            }
          }
        }
        values[i] = acc;
      }
    }
  }
  return {GrayVolume(out, t, std::move(values)), RoiMask(out, std::move(flags))};
}

}  // namespace radiomics
