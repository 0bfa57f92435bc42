#include "radiomics/features.hpp"

#include <algorithm>
#include <stdexcept>

#include <fmt/format.h>

namespace radiomics {

namespace {

using C = FeatureClass;

constexpr FeatureDef kRegistry[] = {
    // Morphology (29)
    {"morph_volume", C::Morphology, "Volume (mesh)"},
    {"morph_vol_approx", C::Morphology, "Volume (voxel counting)"},
    {"morph_area_mesh", C::Morphology, "Surface area (mesh)"},
    {"morph_av", C::Morphology, "Surface to volume ratio"},
    {"morph_comp_1", C::Morphology, "Compactness 1"},
    {"morph_comp_2", C::Morphology, "Compactness 2"},
    {"morph_sph_dispr", C::Morphology, "Spherical disproportion"},
    {"morph_sphericity", C::Morphology, "Sphericity"},
    {"morph_asphericity", C::Morphology, "Asphericity"},
    {"morph_com", C::Morphology, "Centre of mass shift"},
    {"morph_diam", C::Morphology, "Maximum 3D diameter"},
    {"morph_pca_maj_axis", C::Morphology, "Major axis length"},
    {"morph_pca_min_axis", C::Morphology, "Minor axis length"},
    {"morph_pca_least_axis", C::Morphology, "Least axis length"},
    {"morph_pca_elongation", C::Morphology, "Elongation"},
    {"morph_pca_flatness", C::Morphology, "Flatness"},
    {"morph_vol_dens_aabb", C::Morphology, "Volume density (AABB)"},
    {"morph_area_dens_aabb", C::Morphology, "Area density (AABB)"},
    {"morph_vol_dens_ombb", C::Morphology, "Volume density (OMBB)"},
    {"morph_area_dens_ombb", C::Morphology, "Area density (OMBB)"},
    {"morph_vol_dens_aee", C::Morphology, "Volume density (AEE)"},
    {"morph_area_dens_aee", C::Morphology, "Area density (AEE)"},
    {"morph_vol_dens_mvee", C::Morphology, "Volume density (MVEE)"},
    {"morph_area_dens_mvee", C::Morphology, "Area density (MVEE)"},
    {"morph_vol_dens_conv_hull", C::Morphology, "Volume density (convex hull)"},
    {"morph_area_dens_conv_hull", C::Morphology, "Area density (convex hull)"},
    {"morph_integ_int", C::Morphology, "Integrated intensity"},
    {"morph_moran_i", C::Morphology, "Moran's I index"},
    {"morph_geary_c", C::Morphology, "Geary's C measure"},
    // Local intensity (2)
    {"loc_peak_loc", C::LocalIntensity, "Local intensity peak"},
    {"loc_peak_glob", C::LocalIntensity, "Global intensity peak"},
    // Intensity-based statistics (18)
    {"stat_mean", C::IntensityStatistics, "Mean"},
    {"stat_var", C::IntensityStatistics, "Variance"},
    {"stat_skew", C::IntensityStatistics, "Skewness"},
    {"stat_kurt", C::IntensityStatistics, "Kurtosis"},
    {"stat_median", C::IntensityStatistics, "Median"},
    {"stat_min", C::IntensityStatistics, "Minimum"},
    {"stat_p10", C::IntensityStatistics, "10th percentile"},
    {"stat_p90", C::IntensityStatistics, "90th percentile"},
    {"stat_max", C::IntensityStatistics, "Maximum"},
    {"stat_iqr", C::IntensityStatistics, "Interquartile range"},
    {"stat_range", C::IntensityStatistics, "Range"},
    {"stat_mad", C::IntensityStatistics, "Mean absolute deviation"},
    {"stat_rmad", C::IntensityStatistics, "Robust mean absolute deviation"},
    {"stat_medad", C::IntensityStatistics, "Median absolute deviation"},
    {"stat_cov", C::IntensityStatistics, "Coefficient of variation"},
    {"stat_qcod", C::IntensityStatistics, "Quartile coefficient of dispersion"},
    {"stat_energy", C::IntensityStatistics, "Energy"},
    {"stat_rms", C::IntensityStatistics, "Root mean square"},
    // Intensity histogram (23)
    {"ih_mean", C::IntensityHistogram, "Mean discretised intensity"},
    {"ih_var", C::IntensityHistogram, "Discretised intensity variance"},
    {"ih_skew", C::IntensityHistogram, "Discretised intensity skewness"},
    {"ih_kurt", C::IntensityHistogram, "Discretised intensity kurtosis"},
    {"ih_median", C::IntensityHistogram, "Median discretised intensity"},
    {"ih_min", C::IntensityHistogram, "Minimum discretised intensity"},
    {"ih_p10", C::IntensityHistogram, "10th discretised intensity percentile"},
    {"ih_p90", C::IntensityHistogram, "90th discretised intensity percentile"},
    {"ih_max", C::IntensityHistogram, "Maximum discretised intensity"},
    {"ih_mode", C::IntensityHistogram, "Intensity histogram mode"},
    {"ih_iqr", C::IntensityHistogram, "Discretised intensity interquartile range"},
    {"ih_range", C::IntensityHistogram, "Discretised intensity range"},
    {"ih_mad", C::IntensityHistogram, "Intensity histogram mean absolute deviation"},
    {"ih_rmad", C::IntensityHistogram, "Intensity histogram robust mean absolute deviation"},
    {"ih_medad", C::IntensityHistogram, "Intensity histogram median absolute deviation"},
    {"ih_cov", C::IntensityHistogram, "Intensity histogram coefficient of variation"},
    {"ih_qcod", C::IntensityHistogram, "Intensity histogram quartile coefficient of dispersion"},
    {"ih_entropy", C::IntensityHistogram, "Discretised intensity entropy"},
    {"ih_uniformity", C::IntensityHistogram, "Discretised intensity uniformity"},
    {"ih_max_grad", C::IntensityHistogram, "Maximum histogram gradient"},
    {"ih_max_grad_g", C::IntensityHistogram, "Maximum histogram gradient intensity"},
    {"ih_min_grad", C::IntensityHistogram, "Minimum histogram gradient"},
    {"ih_min_grad_g", C::IntensityHistogram, "Minimum histogram gradient intensity"},
    // Intensity-volume histogram (7)
    {"ivh_v10", C::IntensityVolumeHistogram, "Volume at intensity fraction 10%"},
    {"ivh_v90", C::IntensityVolumeHistogram, "Volume at intensity fraction 90%"},
    {"ivh_i10", C::IntensityVolumeHistogram, "Intensity at volume fraction 10%"},
    {"ivh_i90", C::IntensityVolumeHistogram, "Intensity at volume fraction 90%"},
    {"ivh_diff_v10_v90", C::IntensityVolumeHistogram, "Volume fraction difference between 10% and 90% intensity"},
    {"ivh_diff_i10_i90", C::IntensityVolumeHistogram, "Intensity fraction difference between 10% and 90% volume"},
    {"ivh_auc", C::IntensityVolumeHistogram, "Area under the IVH curve"},
    // GLCM (25)
    {"cm_joint_max", C::Glcm, "Joint maximum"},
    {"cm_joint_avg", C::Glcm, "Joint average"},
    {"cm_joint_var", C::Glcm, "Joint variance"},
    {"cm_joint_entr", C::Glcm, "Joint entropy"},
    {"cm_diff_avg", C::Glcm, "Difference average"},
    {"cm_diff_var", C::Glcm, "Difference variance"},
    {"cm_diff_entr", C::Glcm, "Difference entropy"},
    {"cm_sum_avg", C::Glcm, "Sum average"},
    {"cm_sum_var", C::Glcm, "Sum variance"},
    {"cm_sum_entr", C::Glcm, "Sum entropy"},
    {"cm_energy", C::Glcm, "Angular second moment"},
    {"cm_contrast", C::Glcm, "Contrast"},
    {"cm_dissimilarity", C::Glcm, "Dissimilarity"},
    {"cm_inv_diff", C::Glcm, "Inverse difference"},
    {"cm_inv_diff_norm", C::Glcm, "Normalised inverse difference"},
    {"cm_inv_diff_mom", C::Glcm, "Inverse difference moment"},
    {"cm_inv_diff_mom_norm", C::Glcm, "Normalised inverse difference moment"},
    {"cm_inv_var", C::Glcm, "Inverse variance"},
    {"cm_corr", C::Glcm, "Correlation"},
    {"cm_auto_corr", C::Glcm, "Autocorrelation"},
    {"cm_clust_tend", C::Glcm, "Cluster tendency"},
    {"cm_clust_shade", C::Glcm, "Cluster shade"},
    {"cm_clust_prom", C::Glcm, "Cluster prominence"},
    {"cm_info_corr1", C::Glcm, "Information correlation 1"},
    {"cm_info_corr2", C::Glcm, "Information correlation 2"},
    // GLRLM (16)
    {"rlm_sre", C::Glrlm, "Short runs emphasis"},
    {"rlm_lre", C::Glrlm, "Long runs emphasis"},
    {"rlm_lgre", C::Glrlm, "Low grey level run emphasis"},
    {"rlm_hgre", C::Glrlm, "High grey level run emphasis"},
    {"rlm_srlge", C::Glrlm, "Short run low grey level emphasis"},
    {"rlm_srhge", C::Glrlm, "Short run high grey level emphasis"},
    {"rlm_lrlge", C::Glrlm, "Long run low grey level emphasis"},
    {"rlm_lrhge", C::Glrlm, "Long run high grey level emphasis"},
    {"rlm_glnu", C::Glrlm, "Grey level non-uniformity"},
    {"rlm_glnu_norm", C::Glrlm, "Normalised grey level non-uniformity"},
    {"rlm_rlnu", C::Glrlm, "Run length non-uniformity"},
    {"rlm_rlnu_norm", C::Glrlm, "Normalised run length non-uniformity"},
    {"rlm_r_perc", C::Glrlm, "Run percentage"},
    {"rlm_gl_var", C::Glrlm, "Grey level variance"},
    {"rlm_rl_var", C::Glrlm, "Run length variance"},
    {"rlm_rl_entr", C::Glrlm, "Run entropy"},
    // GLSZM (16)
    {"szm_sze", C::Glszm, "Small zone emphasis"},
    {"szm_lze", C::Glszm, "Large zone emphasis"},
    {"szm_lgze", C::Glszm, "Low grey level zone emphasis"},
    {"szm_hgze", C::Glszm, "High grey level zone emphasis"},
    {"szm_szlge", C::Glszm, "Small zone low grey level emphasis"},
    {"szm_szhge", C::Glszm, "Small zone high grey level emphasis"},
    {"szm_lzlge", C::Glszm, "Large zone low grey level emphasis"},
    {"szm_lzhge", C::Glszm, "Large zone high grey level emphasis"},
    {"szm_glnu", C::Glszm, "Grey level non-uniformity"},
    {"szm_glnu_norm", C::Glszm, "Normalised grey level non-uniformity"},
    {"szm_zsnu", C::Glszm, "Zone size non-uniformity"},
    {"szm_zsnu_norm", C::Glszm, "Normalised zone size non-uniformity"},
    {"szm_z_perc", C::Glszm, "Zone percentage"},
    {"szm_gl_var", C::Glszm, "Grey level variance"},
    {"szm_zs_var", C::Glszm, "Zone size variance"},
    {"szm_zs_entr", C::Glszm, "Zone size entropy"},
    // GLDZM (16)
    {"dzm_sde", C::Gldzm, "Small distance emphasis"},
    {"dzm_lde", C::Gldzm, "Large distance emphasis"},
    {"dzm_lgze", C::Gldzm, "Low grey level zone emphasis"},
    {"dzm_hgze", C::Gldzm, "High grey level zone emphasis"},
    {"dzm_sdlge", C::Gldzm, "Small distance low grey level emphasis"},
    {"dzm_sdhge", C::Gldzm, "Small distance high grey level emphasis"},
    {"dzm_ldlge", C::Gldzm, "Large distance low grey level emphasis"},
    {"dzm_ldhge", C::Gldzm, "Large distance high grey level emphasis"},
    {"dzm_glnu", C::Gldzm, "Grey level non-uniformity"},
    {"dzm_glnu_norm", C::Gldzm, "Normalised grey level non-uniformity"},
    {"dzm_zdnu", C::Gldzm, "Zone distance non-uniformity"},
    {"dzm_zdnu_norm", C::Gldzm, "Normalised zone distance non-uniformity"},
    {"dzm_z_perc", C::Gldzm, "Zone percentage"},
    {"dzm_gl_var", C::Gldzm, "Grey level variance"},
    {"dzm_zd_var", C::Gldzm, "Zone distance variance"},
    {"dzm_zd_entr", C::Gldzm, "Zone distance entropy"},
    // NGTDM (5)
    {"ngt_coarseness", C::Ngtdm, "Coarseness"},
    {"ngt_contrast", C::Ngtdm, "Contrast"},
    {"ngt_busyness", C::Ngtdm, "Busyness"},
    {"ngt_complexity", C::Ngtdm, "Complexity"},
    {"ngt_strength", C::Ngtdm, "Strength"},
    // NGLDM (16)
    {"ngl_lde", C::Ngldm, "Low dependence emphasis"},
    {"ngl_hde", C::Ngldm, "High dependence emphasis"},
    {"ngl_lgce", C::Ngldm, "Low grey level count emphasis"},
    {"ngl_hgce", C::Ngldm, "High grey level count emphasis"},
    {"ngl_ldlge", C::Ngldm, "Low dependence low grey level emphasis"},
    {"ngl_ldhge", C::Ngldm, "Low dependence high grey level emphasis"},
    {"ngl_hdlge", C::Ngldm, "High dependence low grey level emphasis"},
    {"ngl_hdhge", C::Ngldm, "High dependence high grey level emphasis"},
    {"ngl_glnu", C::Ngldm, "Grey level non-uniformity"},
    {"ngl_glnu_norm", C::Ngldm, "Normalised grey level non-uniformity"},
    {"ngl_dcnu", C::Ngldm, "Dependence count non-uniformity"},
    {"ngl_dcnu_norm", C::Ngldm, "Normalised dependence count non-uniformity"},
    {"ngl_dc_perc", C::Ngldm, "Dependence count percentage"},
    {"ngl_gl_var", C::Ngldm, "Grey level variance"},
    {"ngl_dc_var", C::Ngldm, "Dependence count variance"},
    {"ngl_dc_entr", C::Ngldm, "Dependence count entropy"},
};

constexpr FeatureDef kDiagnostics[] = {
    {"diag_mean_level", C::Diagnostic, "Mean discretised intensity"},
    {"diag_median_level", C::Diagnostic, "Median discretised intensity"},
    {"diag_min_level", C::Diagnostic, "Minimum discretised intensity"},
    {"diag_max_level", C::Diagnostic, "Maximum discretised intensity"},
    {"diag_range_level", C::Diagnostic, "Discretised intensity range"},
};

static_assert(std::size(kRegistry) == 173);

struct ClassInfo {
  FeatureClass cls;
  std::string_view key;
};

constexpr ClassInfo kClassKeys[] = {
    {C::Morphology, "morphology"}, {C::LocalIntensity, "local_intensity"},
    {C::IntensityStatistics, "statistics"}, {C::IntensityHistogram, "intensity_histogram"},
    {C::IntensityVolumeHistogram, "ivh"}, {C::Glcm, "glcm"}, {C::Glrlm, "glrlm"}, {C::Glszm, "glszm"},
    {C::Gldzm, "gldzm"}, {C::Ngtdm, "ngtdm"}, {C::Ngldm, "ngldm"}, {C::Diagnostic, "diagnostic"},
};

}  // namespace

std::string_view class_key(FeatureClass c) {
  for (const auto& k : kClassKeys) {
    if (k.cls == c) return k.key;
  }
  return "unknown";
}

std::optional<FeatureClass> class_from_key(std::string_view key) {
  for (const auto& k : kClassKeys) {
    if (k.key == key) return k.cls;
  }
  return std::nullopt;
}

FeatureCategory category_of(FeatureClass c) {
  switch (c) {
    case C::Morphology:
      return FeatureCategory::Morphology;
    case C::LocalIntensity:
    case C::IntensityStatistics:
    case C::IntensityHistogram:
    case C::IntensityVolumeHistogram:
    case C::Diagnostic:
      return FeatureCategory::StatisticHistogram;
    default:
      return FeatureCategory::Texture;
  }
}

std::string_view category_key(FeatureCategory c) {
  switch (c) {
    case FeatureCategory::Morphology:
      return "morphology";
    case FeatureCategory::StatisticHistogram:
      return "statistic_histogram";
    case FeatureCategory::Texture:
      return "texture";
  }
  return "unknown";
}

std::optional<FeatureCategory> category_from_key(std::string_view key) {
  if (key == "morphology") return FeatureCategory::Morphology;
  if (key == "statistic_histogram" || key == "statistic/histogram" || key == "stat_hist") {
    return FeatureCategory::StatisticHistogram;
  }
  if (key == "texture") return FeatureCategory::Texture;
  return std::nullopt;
}

std::string_view flag_key(ValueFlag f) {
  switch (f) {
    case ValueFlag::None:
      return "";
    case ValueFlag::Undefined:
      return "undefined";
    case ValueFlag::Degenerate:
      return "degenerate";
    case ValueFlag::Capped:
      return "capped";
    case ValueFlag::Approximate:
      return "approximate";
  }
  return "";
}

std::optional<ValueFlag> flag_from_key(std::string_view key) {
  for (auto f : {ValueFlag::None, ValueFlag::Undefined, ValueFlag::Degenerate, ValueFlag::Capped,
                 ValueFlag::Approximate}) {
    if (flag_key(f) == key) return f;
  }
  return std::nullopt;
}

std::span<const FeatureDef> registry() { return kRegistry; }

std::span<const FeatureDef> registry(FeatureClass c) {
  if (c == C::Diagnostic) return kDiagnostics;
  const auto* first = std::find_if(std::begin(kRegistry), std::end(kRegistry), [c](const auto& d) { return d.cls == c; });
  const auto* last = std::find_if(first, std::end(kRegistry), [c](const auto& d) { return d.cls != c; });
  return {first, last};
}

std::span<const FeatureDef> diagnostic_registry() { return kDiagnostics; }

const FeatureDef* find_feature(std::string_view id) {
  for (const auto& d : kRegistry) {
    if (d.id == id) return &d;
  }
  for (const auto& d : kDiagnostics) {
    if (d.id == id) return &d;
  }
  return nullptr;
}

std::size_t registry_count(FeatureClass c) { return registry(c).size(); }

void FeatureSet::add(std::string_view id, double value, ValueFlag flag) {
  const auto* def = find_feature(id);
  if (def == nullptr) throw std::logic_error(fmt::format("unregistered feature id '{}'", id));
  if (index_.contains(id)) throw std::logic_error(fmt::format("duplicate feature id '{}'", id));
  index_.emplace(std::string(id), values_.size());
  values_.push_back({std::string(id), def->cls, value, flag});
}

void FeatureSet::add_undefined(std::string_view id) {
  add(id, std::numeric_limits<double>::quiet_NaN(), ValueFlag::Undefined);
}

void FeatureSet::append(const FeatureSet& other) {
  for (const auto& v : other.values_) add(v.id, v.value, v.flag);
  for (const auto& [k, v] : other.provenance) provenance.insert_or_assign(k, v);
}

const FeatureValue* FeatureSet::find(std::string_view id) const {
  const auto it = index_.find(id);
  return it == index_.end() ? nullptr : &values_[it->second];
}

const FeatureValue& FeatureSet::at(std::string_view id) const {
  const auto* v = find(id);
  if (v == nullptr) throw std::out_of_range(fmt::format("feature '{}' not in set", id));
  return *v;
}

std::size_t FeatureSet::count(FeatureClass c) const {
  return static_cast<std::size_t>(std::count_if(values_.begin(), values_.end(), [c](const auto& v) { return v.cls == c; }));
}

}  // namespace radiomics
