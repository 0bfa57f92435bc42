#include <algorithm>
#include <cmath>
#include <map>

#include "radiomics/texture.hpp"

namespace radiomics {

namespace {

std::vector<std::string> ids_of(FeatureClass c) {
  std::vector<std::string> ids;
  for (const auto& def : registry(c)) ids.emplace_back(def.id);
  return ids;
}

void add_all_undefined(FeatureSet& out, FeatureClass c) {
  for (const auto& def : registry(c)) out.add_undefined(def.id);
}

double plogp(double p) { return p > 0.0 ? p * std::log2(p) : 0.0; }

}  // namespace

FeatureSet glcm_features(const Glcm& m) {
  FeatureSet out;
  const long long total = m.total();
  if (total == 0) {
    add_all_undefined(out, FeatureClass::Glcm);
    return out;
  }
  const int n = m.n_levels;
  const double ng = n;
  const double t = static_cast<double>(total);
  const auto level = [&](int r) { return static_cast<double>(m.base_level + r); };

  std::vector<double> p(m.counts.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = static_cast<double>(m.counts[i]) / t;
  const auto P = [&](int r, int c) { return p[static_cast<std::size_t>(r * n + c)]; };

  std::vector<double> marginal(static_cast<std::size_t>(n), 0.0);
  std::vector<double> pdiff(static_cast<std::size_t>(n), 0.0);
  std::vector<double> psum(static_cast<std::size_t>(2 * n - 1), 0.0);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      marginal[static_cast<std::size_t>(r)] += P(r, c);
      pdiff[static_cast<std::size_t>(std::abs(r - c))] += P(r, c);
      psum[static_cast<std::size_t>(r + c)] += P(r, c);
    }
  }

  double joint_max = 0.0, mu = 0.0, entropy = 0.0, energy = 0.0;
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const double v = P(r, c);
      joint_max = std::max(joint_max, v);
      mu += level(r) * v;
      entropy -= plogp(v);
      energy += v * v;
    }
  }

  double joint_var = 0.0, contrast = 0.0, dissim = 0.0, inv_diff = 0.0, inv_diff_norm = 0.0, idm = 0.0,
         idm_norm = 0.0, cov = 0.0, auto_corr = 0.0, tend = 0.0, shade = 0.0, prom = 0.0;
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const double v = P(r, c);
      const double i = level(r), j = level(c);
      const double diff = std::abs(r - c);
      const double cluster = i + j - 2.0 * mu;
      joint_var += (i - mu) * (i - mu) * v;
      contrast += diff * diff * v;
      dissim += diff * v;
      inv_diff += v / (1.0 + diff);
      inv_diff_norm += v / (1.0 + diff / ng);
      idm += v / (1.0 + diff * diff);
      idm_norm += v / (1.0 + diff * diff / (ng * ng));
      cov += (i - mu) * (j - mu) * v;
      auto_corr += i * j * v;
      tend += cluster * cluster * v;
      shade += cluster * cluster * cluster * v;
      prom += cluster * cluster * cluster * cluster * v;
    }
  }

  double diff_avg = 0.0, diff_entr = 0.0, inv_var = 0.0;
  for (int k = 0; k < n; ++k) {
    const double v = pdiff[static_cast<std::size_t>(k)];
    diff_avg += k * v;
    diff_entr -= plogp(v);
    if (k > 0) inv_var += v / (static_cast<double>(k) * k);
  }
  double diff_var = 0.0;
  for (int k = 0; k < n; ++k) diff_var += (k - diff_avg) * (k - diff_avg) * pdiff[static_cast<std::size_t>(k)];

  double sum_avg = 0.0, sum_entr = 0.0;
  for (int k = 0; k < 2 * n - 1; ++k) {
    const double v = psum[static_cast<std::size_t>(k)];
    sum_avg += (2.0 * m.base_level + k) * v;
    sum_entr -= plogp(v);
  }
  double sum_var = 0.0;
  for (int k = 0; k < 2 * n - 1; ++k) {
    const double s = 2.0 * m.base_level + k;
    sum_var += (s - sum_avg) * (s - sum_avg) * psum[static_cast<std::size_t>(k)];
  }

  double marginal_var = 0.0, hx = 0.0;
  for (int r = 0; r < n; ++r) {
    const double v = marginal[static_cast<std::size_t>(r)];
    marginal_var += (level(r) - mu) * (level(r) - mu) * v;
    hx -= plogp(v);
  }
  double hxy1 = 0.0, hxy2 = 0.0;
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const double pp = marginal[static_cast<std::size_t>(r)] * marginal[static_cast<std::size_t>(c)];
      if (pp <= 0.0) continue;
      hxy1 -= P(r, c) * std::log2(pp);
      hxy2 -= pp * std::log2(pp);
    }
  }

  out.add("cm_joint_max", joint_max);
  out.add("cm_joint_avg", mu);
  out.add("cm_joint_var", joint_var);
  out.add("cm_joint_entr", entropy);
  out.add("cm_diff_avg", diff_avg);
  out.add("cm_diff_var", diff_var);
  out.add("cm_diff_entr", diff_entr);
  out.add("cm_sum_avg", sum_avg);
  out.add("cm_sum_var", sum_var);
  out.add("cm_sum_entr", sum_entr);
  out.add("cm_energy", energy);
  out.add("cm_contrast", contrast);
  out.add("cm_dissimilarity", dissim);
  out.add("cm_inv_diff", inv_diff);
  out.add("cm_inv_diff_norm", inv_diff_norm);
  out.add("cm_inv_diff_mom", idm);
  out.add("cm_inv_diff_mom_norm", idm_norm);
  out.add("cm_inv_var", inv_var);
  if (marginal_var > 0.0) {
    out.add("cm_corr", cov / marginal_var);
  } else {
    out.add_undefined("cm_corr");
  }
  out.add("cm_auto_corr", auto_corr);
  out.add("cm_clust_tend", tend);
  out.add("cm_clust_shade", shade);
  out.add("cm_clust_prom", prom);
  if (hx > 0.0) {
    out.add("cm_info_corr1", (entropy - hxy1) / hx);
  } else {
    out.add_undefined("cm_info_corr1");
  }
  out.add("cm_info_corr2", std::sqrt(1.0 - std::exp(-2.0 * std::max(0.0, hxy2 - entropy))));
  return out;
}

namespace {

// Averages per-direction feature sets over the directions where each
// feature is defined. Directions with an empty matrix are skipped by the caller.
FeatureSet average_sets(std::span<const FeatureSet> sets, FeatureClass c) {
  FeatureSet out;
  for (const auto& def : registry(c)) {
    double sum = 0.0;
    int n = 0;
    for (const auto& s : sets) {
      const auto& v = s.at(def.id);
      if (!v.defined()) continue;
      sum += v.value;
      ++n;
    }
    if (n == 0) {
      out.add_undefined(def.id);
    } else {
      out.add(def.id, sum / n);
    }
  }
  return out;
}

}  // namespace

FeatureSet glcm_features(std::span<const Glcm> per_direction, AggregationMode mode) {
  FeatureSet out;
  if (mode == AggregationMode::MergeMatrices) {
    out = glcm_features(merge_glcm(per_direction));
  } else {
    std::vector<FeatureSet> sets;
    for (const auto& m : per_direction) {
      if (m.total() > 0) sets.push_back(glcm_features(m));
    }
    if (sets.empty()) {
      add_all_undefined(out, FeatureClass::Glcm);
    } else {
      out = average_sets(sets, FeatureClass::Glcm);
    }
  }
  out.provenance["glcm_aggregation"] = aggregation_key(mode);
  return out;
}

namespace {

// Shared 16-feature template of the run-length, size-zone, distance-zone
// and dependence matrices. `ids` follows registry order.
FeatureSet level_count_features(const LevelCountMatrix& m, double voxel_count, FeatureClass c) {
  FeatureSet out;
  const auto ids = ids_of(c);
  const long long total = m.total();
  if (total == 0 || voxel_count <= 0.0) {
    add_all_undefined(out, c);
    return out;
  }
  const double ns = static_cast<double>(total);

  double short_e = 0.0, long_e = 0.0, low_g = 0.0, high_g = 0.0, short_low = 0.0, short_high = 0.0,
         long_low = 0.0, long_high = 0.0;
  bool zero_level_used = false;
  std::vector<double> row_sum(static_cast<std::size_t>(m.n_levels), 0.0);
  std::vector<double> col_sum(static_cast<std::size_t>(m.n_columns), 0.0);
  double mu_i = 0.0, mu_j = 0.0, entropy = 0.0;

  for (int r = 0; r < m.n_levels; ++r) {
    const double i = m.base_level + r;
    const double i2 = i * i;
    for (int col = 0; col < m.n_columns; ++col) {
      const long long count = m.at(r, col);
      if (count == 0) continue;
      const double v = static_cast<double>(count);
      const double j = col + 1.0;
      const double j2 = j * j;
      if (i == 0.0) zero_level_used = true;
      short_e += v / j2;
      long_e += v * j2;
      high_g += v * i2;
      short_high += v * i2 / j2;
      long_high += v * i2 * j2;
      if (i != 0.0) {
        low_g += v / i2;
        short_low += v / (i2 * j2);
        long_low += v * j2 / i2;
      }
      row_sum[static_cast<std::size_t>(r)] += v;
      col_sum[static_cast<std::size_t>(col)] += v;
      const double p = v / ns;
      mu_i += i * p;
      mu_j += j * p;
      entropy -= p * std::log2(p);
    }
  }

  double var_i = 0.0, var_j = 0.0;
  for (int r = 0; r < m.n_levels; ++r) {
    const double i = m.base_level + r;
    for (int col = 0; col < m.n_columns; ++col) {
      const long long count = m.at(r, col);
      if (count == 0) continue;
      const double p = static_cast<double>(count) / ns;
      const double j = col + 1.0;
      var_i += (i - mu_i) * (i - mu_i) * p;
      var_j += (j - mu_j) * (j - mu_j) * p;
    }
  }

  double gl_nu = 0.0, col_nu = 0.0;
  for (double s : row_sum) gl_nu += s * s;
  for (double s : col_sum) col_nu += s * s;

  const auto add_low = [&](const std::string& id, double v) {
    if (zero_level_used) {
      out.add_undefined(id);
    } else {
      out.add(id, v / ns);
    }
  };

  out.add(ids[0], short_e / ns);
  out.add(ids[1], long_e / ns);
  add_low(ids[2], low_g);
  out.add(ids[3], high_g / ns);
  add_low(ids[4], short_low);
  out.add(ids[5], short_high / ns);
  add_low(ids[6], long_low);
  out.add(ids[7], long_high / ns);
  out.add(ids[8], gl_nu / ns);
  out.add(ids[9], gl_nu / (ns * ns));
  out.add(ids[10], col_nu / ns);
  out.add(ids[11], col_nu / (ns * ns));
  out.add(ids[12], ns / voxel_count);
  out.add(ids[13], var_i);
  out.add(ids[14], var_j);
  out.add(ids[15], entropy);
  return out;
}

}  // namespace

FeatureSet glrlm_features(const LevelCountMatrix& matrix, double voxel_count) {
  return level_count_features(matrix, voxel_count, FeatureClass::Glrlm);
}

FeatureSet glrlm_features(std::span<const LevelCountMatrix> per_direction, double voxel_count, AggregationMode mode) {
  FeatureSet out;
  if (mode == AggregationMode::MergeMatrices) {
    // Every direction counts each ROI voxel once, so the merged run
    // percentage is normalised by voxel_count times the number of directions.
    out = glrlm_features(merge_level_counts(per_direction),
                         voxel_count * static_cast<double>(per_direction.size()));
  } else {
    std::vector<FeatureSet> sets;
    for (const auto& m : per_direction) {
      if (m.total() > 0) sets.push_back(glrlm_features(m, voxel_count));
    }
    if (sets.empty()) {
      add_all_undefined(out, FeatureClass::Glrlm);
    } else {
      out = average_sets(sets, FeatureClass::Glrlm);
    }
  }
  out.provenance["glrlm_aggregation"] = aggregation_key(mode);
  return out;
}

FeatureSet glszm_features(const LevelCountMatrix& matrix, double voxel_count) {
  return level_count_features(matrix, voxel_count, FeatureClass::Glszm);
}

FeatureSet gldzm_features(const LevelCountMatrix& matrix, double voxel_count) {
  auto out = level_count_features(matrix, voxel_count, FeatureClass::Gldzm);
  out.provenance["gldzm_distance"] = "city-block";
  return out;
}

FeatureSet ngldm_features(const LevelCountMatrix& matrix, double voxel_count) {
  return level_count_features(matrix, voxel_count, FeatureClass::Ngldm);
}

FeatureSet ngtdm_features(const Ngtdm& m) {
  FeatureSet out;
  double nvc = 0.0;
  for (long long n : m.occurrences) nvc += static_cast<double>(n);
  if (nvc == 0.0) {
    add_all_undefined(out, FeatureClass::Ngtdm);
    return out;
  }

  struct Level {
    double grey, p, s;
  };
  std::vector<Level> present;
  double s_total = 0.0, ps_total = 0.0;
  for (int r = 0; r < m.n_levels; ++r) {
    const auto n = m.occurrences[static_cast<std::size_t>(r)];
    const double s = m.abs_deviation[static_cast<std::size_t>(r)];
    s_total += s;
    if (n == 0) continue;
    const double p = static_cast<double>(n) / nvc;
    present.push_back({static_cast<double>(m.base_level + r), p, s});
    ps_total += p * s;
  }
  const double ngp = static_cast<double>(present.size());

  if (ps_total > 0.0) {
    out.add("ngt_coarseness", 1.0 / ps_total);
  } else {
    out.add("ngt_coarseness", kCoarsenessCap, ValueFlag::Capped);
  }

  double spread = 0.0, busy_den = 0.0, complexity = 0.0, strength_num = 0.0;
  for (const auto& a : present) {
    for (const auto& b : present) {
      const double d = a.grey - b.grey;
      spread += a.p * b.p * d * d;
      busy_den += std::abs(a.grey * a.p - b.grey * b.p);
      complexity += std::abs(d) * (a.p * a.s + b.p * b.s) / (a.p + b.p);
      strength_num += (a.p + b.p) * d * d;
    }
  }

  if (ngp > 1.0) {
    out.add("ngt_contrast", spread / (ngp * (ngp - 1.0)) * s_total / nvc);
  } else {
    out.add("ngt_contrast", 0.0, ValueFlag::Degenerate);
  }
  if (busy_den > 0.0) {
    out.add("ngt_busyness", ps_total / busy_den);
  } else {
    out.add("ngt_busyness", 0.0, ValueFlag::Degenerate);
  }
  out.add("ngt_complexity", complexity / nvc);
  if (s_total > 0.0) {
    out.add("ngt_strength", strength_num / s_total);
  } else {
    out.add("ngt_strength", 0.0, ValueFlag::Degenerate);
  }
  return out;
}

FeatureSet texture_features(const DiscreteVolume& dvol, const TextureConfig& config,
                            std::span<const FeatureClass> classes) {
  const auto wants = [&](FeatureClass c) { return std::find(classes.begin(), classes.end(), c) != classes.end(); };
  const double nv = static_cast<double>(dvol.mask().voxel_count());
  FeatureSet out;
  if (wants(FeatureClass::Glcm)) out.append(glcm_features(build_glcm(dvol, config.distance), config.aggregation));
  if (wants(FeatureClass::Glrlm)) out.append(glrlm_features(build_glrlm(dvol), nv, config.aggregation));
  if (wants(FeatureClass::Glszm)) out.append(glszm_features(build_glszm(dvol), nv));
  if (wants(FeatureClass::Gldzm)) out.append(gldzm_features(build_gldzm(dvol), nv));
  if (wants(FeatureClass::Ngtdm)) out.append(ngtdm_features(build_ngtdm(dvol, config.distance)));
  if (wants(FeatureClass::Ngldm)) {
    out.append(ngldm_features(build_ngldm(dvol, config.ngldm_alpha, config.distance), nv));
    out.provenance["ngldm_alpha"] = std::to_string(config.ngldm_alpha);
  }
  out.provenance["texture_distance"] = std::to_string(config.distance);
  return out;
}

}  // namespace radiomics
