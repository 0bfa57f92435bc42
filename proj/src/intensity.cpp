#include "radiomics/intensity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace radiomics {

double percentile_nearest_rank(std::span<const double> sorted, double p) {
  const auto n = sorted.size();
  auto rank = static_cast<std::size_t>(std::ceil(p * static_cast<double>(n)));
  rank = std::clamp<std::size_t>(rank, 1, n);
  return sorted[rank - 1];
}

double median_sorted(std::span<const double> sorted) {
  const auto n = sorted.size();
  if (n % 2 == 1) return sorted[n / 2];
  return 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
}

namespace {

double mean_of(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

double mean_abs_dev(std::span<const double> x, double centre) {
  double s = 0.0;
  for (double v : x) s += std::abs(v - centre);
  return s / static_cast<double>(x.size());
}

// Statistics shared by the intensity-statistics and intensity-histogram
// classes; `prefix` selects the id family ("stat_" or "ih_").
void add_first_order(FeatureSet& out, const std::string& prefix, std::vector<double> x) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  const double mean = mean_of(x);

  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : x) {
    const double d = v - mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;

  const double median = median_sorted(x);
  const double p10 = percentile_nearest_rank(x, 0.10);
  const double p25 = percentile_nearest_rank(x, 0.25);
  const double p75 = percentile_nearest_rank(x, 0.75);
  const double p90 = percentile_nearest_rank(x, 0.90);

  std::vector<double> window;
  std::copy_if(x.begin(), x.end(), std::back_inserter(window), [&](double v) { return v >= p10 && v <= p90; });
  const double rmad = mean_abs_dev(window, mean_of(window));

  const auto id = [&](const char* name) { return prefix + name; };
  out.add(id("mean"), mean);
  out.add(id("var"), m2);
  if (m2 > 0.0) {
    out.add(id("skew"), m3 / std::pow(m2, 1.5));
    out.add(id("kurt"), m4 / (m2 * m2));
  } else {
    out.add_undefined(id("skew"));
    out.add_undefined(id("kurt"));
  }
  out.add(id("median"), median);
  out.add(id("min"), x.front());
  out.add(id("p10"), p10);
  out.add(id("p90"), p90);
  out.add(id("max"), x.back());
  if (prefix == "ih_") {
    // Lowest level among the most frequent ones; x is sorted.
    double mode = x.front();
    std::size_t best = 0;
    for (std::size_t i = 0; i < x.size();) {
      std::size_t j = i;
      while (j < x.size() && x[j] == x[i]) ++j;
      if (j - i > best) {
        best = j - i;
        mode = x[i];
      }
      i = j;
    }
    out.add(id("mode"), mode);
  }
  out.add(id("iqr"), p75 - p25);
  out.add(id("range"), x.back() - x.front());
  out.add(id("mad"), mean_abs_dev(x, mean));
  out.add(id("rmad"), rmad);
  out.add(id("medad"), mean_abs_dev(x, median));
  if (mean != 0.0) {
    out.add(id("cov"), std::sqrt(m2) / mean);
  } else {
    out.add_undefined(id("cov"));
  }
  if (p75 + p25 != 0.0) {
    out.add(id("qcod"), (p75 - p25) / (p75 + p25));
  } else {
    out.add_undefined(id("qcod"));
  }
}

std::vector<double> roi_values(const GrayVolume& volume, const RoiMask& mask) {
  if (!(volume.dims() == mask.dims())) throw InputError("dims mismatch: mask vs volume");
  std::vector<double> x;
  x.reserve(mask.voxel_count());
  for (std::size_t i = 0; i < volume.size(); ++i) {
    if (mask.contains(i)) x.push_back(volume[i]);
  }
  return x;
}

std::vector<double> roi_levels_as_double(const DiscreteVolume& dvol) {
  const auto levels = dvol.roi_levels();
  return {levels.begin(), levels.end()};
}

}  // namespace

FeatureSet intensity_statistics(const GrayVolume& volume, const RoiMask& mask) {
  const auto x = roi_values(volume, mask);
  FeatureSet out;
  add_first_order(out, "stat_", x);

  double energy = 0.0;
  for (double v : x) energy += v * v;
  out.add("stat_energy", energy);
  out.add("stat_rms", std::sqrt(energy / static_cast<double>(x.size())));
  out.provenance["kurtosis"] = "pearson";
  return out;
}

FeatureSet local_intensity(const GrayVolume& volume, const RoiMask& mask) {
  if (!(volume.dims() == mask.dims())) throw InputError("dims mismatch: mask vs volume");
  const auto& d = volume.dims();
  const auto& s = volume.spacing();
  const double r2 = kPeakSphereRadiusMm * kPeakSphereRadiusMm;

  const auto reach = [&](double spacing) { return static_cast<std::ptrdiff_t>(std::floor(kPeakSphereRadiusMm / spacing)); };
  const auto rx = reach(s.sx), ry = reach(s.sy), rz = reach(s.sz);
  std::vector<Index3> offsets;
  for (std::ptrdiff_t dz = -rz; dz <= rz; ++dz) {
    for (std::ptrdiff_t dy = -ry; dy <= ry; ++dy) {
      for (std::ptrdiff_t dx = -rx; dx <= rx; ++dx) {
        const double mx = dx * s.sx, my = dy * s.sy, mz = dz * s.sz;
        if (mx * mx + my * my + mz * mz <= r2) offsets.push_back({dx, dy, dz});
      }
    }
  }

  const auto sphere_mean = [&](std::size_t centre) {
    const auto c = grid_index(d, centre);
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& o : offsets) {
      const Index3 p{c.x + o.x, c.y + o.y, c.z + o.z};
      if (!in_grid(d, p)) continue;
      sum += volume.at(static_cast<std::size_t>(p.x), static_cast<std::size_t>(p.y), static_cast<std::size_t>(p.z));
      ++n;
    }
    return sum / static_cast<double>(n);
  };

  double max_intensity = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < volume.size(); ++i) {
    if (mask.contains(i)) max_intensity = std::max(max_intensity, volume[i]);
  }

  double local_peak = -std::numeric_limits<double>::infinity();
  double global_peak = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < volume.size(); ++i) {
    if (!mask.contains(i)) continue;
    const double m = sphere_mean(i);
    global_peak = std::max(global_peak, m);
    if (volume[i] == max_intensity) local_peak = std::max(local_peak, m);
  }

  FeatureSet out;
  out.add("loc_peak_loc", local_peak);
  out.add("loc_peak_glob", global_peak);
  return out;
}

FeatureSet intensity_histogram_features(const DiscreteVolume& dvol) {
  const auto x = roi_levels_as_double(dvol);
  FeatureSet out;
  add_first_order(out, "ih_", x);

  const int base = dvol.base_level();
  const int top = dvol.level_range().second;
  std::vector<double> hist(static_cast<std::size_t>(top - base + 1), 0.0);
  for (int l : dvol.roi_levels()) hist[static_cast<std::size_t>(l - base)] += 1.0;

  const double n = static_cast<double>(x.size());
  double entropy = 0.0, uniformity = 0.0;
  std::size_t occupied = 0;
  for (double h : hist) {
    if (h == 0.0) continue;
    ++occupied;
    const double p = h / n;
    entropy -= p * std::log2(p);
    uniformity += p * p;
  }
  out.add("ih_entropy", entropy);
  out.add("ih_uniformity", uniformity);

  if (occupied < 2) {
    out.add_undefined("ih_max_grad");
    out.add_undefined("ih_max_grad_g");
    out.add_undefined("ih_min_grad");
    out.add_undefined("ih_min_grad_g");
    return out;
  }

  const std::size_t nb = hist.size();
  std::vector<double> grad(nb);
  for (std::size_t i = 0; i < nb; ++i) {
    if (i == 0) {
      grad[i] = hist[1] - hist[0];
    } else if (i == nb - 1) {
      grad[i] = hist[i] - hist[i - 1];
    } else {
      grad[i] = 0.5 * (hist[i + 1] - hist[i - 1]);
    }
  }
  const auto max_it = std::max_element(grad.begin(), grad.end());
  const auto min_it = std::min_element(grad.begin(), grad.end());
  out.add("ih_max_grad", *max_it);
  out.add("ih_max_grad_g", static_cast<double>(base + (max_it - grad.begin())));
  out.add("ih_min_grad", *min_it);
  out.add("ih_min_grad_g", static_cast<double>(base + (min_it - grad.begin())));
  return out;
}

FeatureSet ivh_features(const DiscreteVolume& dvol) {
  const auto levels = dvol.roi_levels();
  const auto [lo, hi] = dvol.level_range();
  const double n = static_cast<double>(levels.size());
  FeatureSet out;

  if (lo == hi) {
    out.add("ivh_v10", 1.0, ValueFlag::Degenerate);
    out.add("ivh_v90", 1.0, ValueFlag::Degenerate);
    out.add("ivh_i10", lo, ValueFlag::Degenerate);
    out.add("ivh_i90", lo, ValueFlag::Degenerate);
    out.add("ivh_diff_v10_v90", 0.0, ValueFlag::Degenerate);
    out.add("ivh_diff_i10_i90", 0.0, ValueFlag::Degenerate);
    out.add("ivh_auc", 1.0, ValueFlag::Degenerate);
    return out;
  }

  // at_least[k] = number of voxels with level >= lo + k, for k in [0, hi-lo+1].
  const std::size_t span = static_cast<std::size_t>(hi - lo);
  std::vector<double> at_least(span + 2, 0.0);
  for (int l : levels) at_least[static_cast<std::size_t>(l - lo)] += 1.0;
  for (std::size_t k = span + 1; k-- > 0;) at_least[k] += at_least[k + 1];

  const auto nu = [&](double threshold) {
    const double k = std::ceil(threshold - lo);
    if (k <= 0.0) return 1.0;
    if (k > static_cast<double>(span)) return 0.0;
    return at_least[static_cast<std::size_t>(k)] / n;
  };
  const auto volume_at = [&](double gamma) { return nu(lo + gamma * (hi - lo)); };
  const auto intensity_at = [&](double fraction) {
    for (std::size_t k = 0; k <= span + 1; ++k) {
      if (at_least[k] / n <= fraction) return static_cast<double>(lo + static_cast<int>(k));
    }
    return static_cast<double>(hi + 1);
  };

  const double v10 = volume_at(0.10), v90 = volume_at(0.90);
  const double i10 = intensity_at(0.10), i90 = intensity_at(0.90);

  double auc = 0.0;
  for (std::size_t k = 0; k < span; ++k) {
    auc += 0.5 * (at_least[k] + at_least[k + 1]) / n / static_cast<double>(span);
  }

  out.add("ivh_v10", v10);
  out.add("ivh_v90", v90);
  out.add("ivh_i10", i10);
  out.add("ivh_i90", i90);
  out.add("ivh_diff_v10_v90", v10 - v90);
  out.add("ivh_diff_i10_i90", i10 - i90);
  out.add("ivh_auc", auc);
  return out;
}

FeatureSet basic_discretized_stats(const DiscreteVolume& dvol) {
  auto x = roi_levels_as_double(dvol);
  std::sort(x.begin(), x.end());
  FeatureSet out;
  out.add("diag_mean_level", mean_of(x));
  out.add("diag_median_level", median_sorted(x));
  out.add("diag_min_level", x.front());
  out.add("diag_max_level", x.back());
  out.add("diag_range_level", x.back() - x.front());
  return out;
}

}  // namespace radiomics
