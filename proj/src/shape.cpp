#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>

#include <Eigen/Eigenvalues>

#include "radiomics/morphology.hpp"

namespace radiomics {

namespace {

using LPoint = std::array<long long, 3>;

LPoint lsub(const LPoint& a, const LPoint& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
LPoint lcross(const LPoint& a, const LPoint& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
long long ldot(const LPoint& a, const LPoint& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

// Positive when d lies on the side of plane (a,b,c) its normal (b-a)x(c-a) points to.
long long orient(const LPoint& a, const LPoint& b, const LPoint& c, const LPoint& d) {
  return ldot(lcross(lsub(b, a), lsub(c, a)), lsub(d, a));
}

}  // namespace

ConvexHull convex_hull_lattice(std::span<const LPoint> input, const Spacing& spacing) {
  std::vector<LPoint> pts(input.begin(), input.end());
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 4) throw InputError("convex hull needs at least 4 distinct points");

  // Initial non-degenerate tetrahedron.
  const auto sqdist = [](const LPoint& a, const LPoint& b) {
    const auto d = lsub(a, b);
    return ldot(d, d);
  };
  std::size_t i0 = 0, i1 = 0, i2 = 0, i3 = 0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (sqdist(pts[i], pts[i0]) > sqdist(pts[i1], pts[i0])) i1 = i;
  }
  long long best = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto c = lcross(lsub(pts[i1], pts[i0]), lsub(pts[i], pts[i0]));
    if (ldot(c, c) > best) {
      best = ldot(c, c);
      i2 = i;
    }
  }
  if (best == 0) throw InputError("convex hull of collinear points");
  best = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto o = std::abs(orient(pts[i0], pts[i1], pts[i2], pts[i]));
    if (o > best) {
      best = o;
      i3 = i;
    }
  }
  if (best == 0) throw InputError("convex hull of coplanar points");

  std::vector<std::array<int, 3>> faces;
  const auto add_face = [&](int a, int b, int c, int interior) {
    if (orient(pts[static_cast<std::size_t>(a)], pts[static_cast<std::size_t>(b)], pts[static_cast<std::size_t>(c)],
               pts[static_cast<std::size_t>(interior)]) > 0) {
      std::swap(b, c);
    }
    faces.push_back({a, b, c});
  };
  const int t0 = static_cast<int>(i0), t1 = static_cast<int>(i1), t2 = static_cast<int>(i2), t3 = static_cast<int>(i3);
  add_face(t0, t1, t2, t3);
  add_face(t0, t1, t3, t2);
  add_face(t0, t2, t3, t1);
  add_face(t1, t2, t3, t0);

  for (std::size_t p = 0; p < pts.size(); ++p) {
    if (p == i0 || p == i1 || p == i2 || p == i3) continue;
    std::vector<bool> visible(faces.size(), false);
    bool any = false;
    for (std::size_t f = 0; f < faces.size(); ++f) {
      const auto& fc = faces[f];
      if (orient(pts[static_cast<std::size_t>(fc[0])], pts[static_cast<std::size_t>(fc[1])],
                 pts[static_cast<std::size_t>(fc[2])], pts[p]) > 0) {
        visible[f] = true;
        any = true;
      }
    }
    if (!any) continue;
    std::set<std::pair<int, int>> edges;
    for (std::size_t f = 0; f < faces.size(); ++f) {
      if (!visible[f]) continue;
      for (int k = 0; k < 3; ++k) edges.insert({faces[f][static_cast<std::size_t>(k)], faces[f][static_cast<std::size_t>((k + 1) % 3)]});
    }
    std::vector<std::array<int, 3>> kept;
    for (std::size_t f = 0; f < faces.size(); ++f) {
      if (!visible[f]) kept.push_back(faces[f]);
    }
    for (const auto& [a, b] : edges) {
      if (!edges.contains({b, a})) kept.push_back({a, b, static_cast<int>(p)});
    }
    faces = std::move(kept);
  }

  // Compact to the vertices actually used.
  ConvexHull hull;
  std::vector<int> remap(pts.size(), -1);
  const Vec3 scale(0.5 * spacing.sx, 0.5 * spacing.sy, 0.5 * spacing.sz);
  for (auto& f : faces) {
    for (auto& v : f) {
      auto& r = remap[static_cast<std::size_t>(v)];
      if (r < 0) {
        r = static_cast<int>(hull.vertices.size());
        const auto& q = pts[static_cast<std::size_t>(v)];
        hull.vertices.emplace_back(q[0] * scale.x(), q[1] * scale.y(), q[2] * scale.z());
      }
      v = r;
    }
  }
  hull.faces = std::move(faces);
  double vol = 0.0, area = 0.0;
  for (const auto& f : hull.faces) {
    const Vec3& a = hull.vertices[static_cast<std::size_t>(f[0])];
    const Vec3& b = hull.vertices[static_cast<std::size_t>(f[1])];
    const Vec3& c = hull.vertices[static_cast<std::size_t>(f[2])];
    vol += a.dot(b.cross(c));
    area += 0.5 * (b - a).cross(c - a).norm();
  }
  hull.volume = std::abs(vol) / 6.0;
  hull.area = area;
  return hull;
}

namespace {

using P2 = Eigen::Vector2d;

double cross2(const P2& o, const P2& a, const P2& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

std::vector<P2> hull_2d(std::vector<P2> p) {
  std::sort(p.begin(), p.end(), [](const P2& a, const P2& b) { return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y()); });
  if (p.size() < 3) return p;
  std::vector<P2> h(2 * p.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    while (k >= 2 && cross2(h[k - 2], h[k - 1], p[i]) <= 1e-12) --k;
    h[k++] = p[i];
  }
  for (std::size_t i = p.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross2(h[k - 2], h[k - 1], p[i]) <= 1e-12) --k;
    h[k++] = p[i];
  }
  h.resize(k - 1);
  return h;
}

struct Rect {
  double area = std::numeric_limits<double>::infinity();
  P2 dir{1.0, 0.0};
  double w = 0.0, h = 0.0;
};

// Minimum-area rectangle: one side is collinear with a hull edge.
Rect min_area_rect(const std::vector<P2>& hull) {
  Rect best;
  if (hull.size() < 3) {
    best.area = 0.0;
    return best;
  }
  for (std::size_t i = 0; i < hull.size(); ++i) {
    P2 e = hull[(i + 1) % hull.size()] - hull[i];
    if (e.norm() == 0.0) continue;
    e.normalize();
    const P2 n(-e.y(), e.x());
    double lo_e = std::numeric_limits<double>::infinity(), hi_e = -lo_e, lo_n = lo_e, hi_n = -lo_e;
    for (const auto& q : hull) {
      lo_e = std::min(lo_e, q.dot(e));
      hi_e = std::max(hi_e, q.dot(e));
      lo_n = std::min(lo_n, q.dot(n));
      hi_n = std::max(hi_n, q.dot(n));
    }
    const double a = (hi_e - lo_e) * (hi_n - lo_n);
    if (a < best.area) best = {a, e, hi_e - lo_e, hi_n - lo_n};
  }
  return best;
}

}  // namespace

Box minimum_bounding_box(const ConvexHull& hull) {
  Box best;
  double best_volume = std::numeric_limits<double>::infinity();
  for (const auto& f : hull.faces) {
    const Vec3& a = hull.vertices[static_cast<std::size_t>(f[0])];
    const Vec3& b = hull.vertices[static_cast<std::size_t>(f[1])];
    const Vec3& c = hull.vertices[static_cast<std::size_t>(f[2])];
    Vec3 n = (b - a).cross(c - a);
    if (n.norm() == 0.0) continue;
    n.normalize();
    const Vec3 u = (b - a).normalized();
    const Vec3 v = n.cross(u);

    std::vector<P2> proj;
    proj.reserve(hull.vertices.size());
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& q : hull.vertices) {
      proj.emplace_back(q.dot(u), q.dot(v));
      lo = std::min(lo, q.dot(n));
      hi = std::max(hi, q.dot(n));
    }
    const auto rect = min_area_rect(hull_2d(std::move(proj)));
    const double volume = rect.area * (hi - lo);
    if (volume < best_volume) {
      best_volume = volume;
      const Vec3 e1 = rect.dir.x() * u + rect.dir.y() * v;
      const Vec3 e2 = n.cross(e1);
      best.axes.col(0) = e1;
      best.axes.col(1) = e2;
      best.axes.col(2) = n;
      best.extents = Vec3(rect.w, rect.h, hi - lo);
    }
  }
  if (!std::isfinite(best_volume)) throw InputError("bounding box of degenerate hull");
  return best;
}

double ellipsoid_area(double a, double b, double c) {
  std::array<double, 3> s{a, b, c};
  std::sort(s.begin(), s.end(), std::greater<>());
  a = s[0];
  b = s[1];
  c = s[2];
  constexpr double pi = std::numbers::pi;
  if (a == 0.0) return 0.0;
  if (a - c <= 1e-12 * a) return 4.0 * pi * a * a;
  const double cos_phi = c / a;
  const double phi = std::acos(cos_phi);
  const double sin_phi = std::sin(phi);
  double k2 = a * a * (b * b - c * c) / (b * b * (a * a - c * c));
  k2 = std::clamp(k2, 0.0, 1.0);
  const double k = std::sqrt(k2);
  const double E = std::ellint_2(k, phi);
  const double F = std::ellint_1(k, phi);
  return 2.0 * pi * c * c + 2.0 * pi * a * b / sin_phi * (E * sin_phi * sin_phi + F * cos_phi * cos_phi);
}

double Ellipsoid::volume() const { return 4.0 / 3.0 * std::numbers::pi * semi_axes.prod(); }
double Ellipsoid::area() const { return ellipsoid_area(semi_axes.x(), semi_axes.y(), semi_axes.z()); }

Ellipsoid minimum_volume_enclosing_ellipsoid(std::span<const Vec3> points, double tolerance, int max_iterations) {
  const auto m = static_cast<Eigen::Index>(points.size());
  if (m < 4) throw InputError("enclosing ellipsoid needs at least 4 points");
  constexpr double d = 3.0;
  Eigen::MatrixXd q(4, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    q.col(j).head<3>() = points[static_cast<std::size_t>(j)];
    q(3, j) = 1.0;
  }
  Eigen::VectorXd u = Eigen::VectorXd::Constant(m, 1.0 / static_cast<double>(m));
  for (int it = 0; it < max_iterations; ++it) {
    const Eigen::Matrix4d x = q * u.asDiagonal() * q.transpose();
    const Eigen::Matrix4d xinv = x.inverse();
    Eigen::Index j = 0;
    double mj = -1.0;
    for (Eigen::Index c = 0; c < m; ++c) {
      const double v = q.col(c).dot(xinv * q.col(c));
      if (v > mj) {
        mj = v;
        j = c;
      }
    }
    const double step = (mj - d - 1.0) / ((d + 1.0) * (mj - 1.0));
    Eigen::VectorXd next = (1.0 - step) * u;
    next(j) += step;
    const double change = (next - u).norm();
    u = std::move(next);
    if (change < tolerance) break;
  }

  Eigen::MatrixXd p(3, m);
  for (Eigen::Index j = 0; j < m; ++j) p.col(j) = points[static_cast<std::size_t>(j)];
  const Vec3 centre = p * u;
  const Eigen::Matrix3d scatter = p * u.asDiagonal() * p.transpose() - centre * centre.transpose();
  const Eigen::Matrix3d shape = scatter.inverse() / d;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(shape);
  Vec3 axes;
  for (int k = 0; k < 3; ++k) axes(k) = 1.0 / std::sqrt(eig.eigenvalues()(k));
  std::sort(axes.data(), axes.data() + 3, std::greater<>());
  return {centre, axes};
}

PrincipalAxes principal_axes(std::span<const Vec3> points) {
  Vec3 mean = Vec3::Zero();
  for (const auto& p : points) mean += p;
  mean /= static_cast<double>(points.size());
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const auto& p : points) cov += (p - mean) * (p - mean).transpose();
  // Sample covariance (n - 1).
  cov /= static_cast<double>(std::max<std::size_t>(points.size(), 2) - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
  Vec3 ev = eig.eigenvalues().cwiseMax(0.0);
  std::sort(ev.data(), ev.data() + 3, std::greater<>());
  // Flat or collinear ROIs: residual rounding noise would otherwise survive
  // the square roots taken for axis lengths.
  for (int k = 1; k < 3; ++k) {
    if (ev(k) <= 1e-12 * ev(0)) ev(k) = 0.0;
  }
  return {ev};
}

FeatureSet morphology_features(const GrayVolume& volume, const RoiMask& mask, const TriangleMesh& mesh) {
  if (!(volume.dims() == mask.dims())) throw InputError("dims mismatch: mask vs volume");
  constexpr double pi = std::numbers::pi;
  const auto& d = volume.dims();
  const auto& s = volume.spacing();
  FeatureSet out;
  out.provenance["mesher"] = kMesherIdentity;

  const double v = mesh_volume(mesh);
  const double a = mesh_area(mesh);
  const auto idx = mask.indices();
  const double n = static_cast<double>(idx.size());

  std::vector<Vec3> centres;
  std::vector<double> intensity;
  centres.reserve(idx.size());
  for (auto i : idx) {
    const auto g = grid_index(d, i);
    centres.emplace_back(g.x * s.sx, g.y * s.sy, g.z * s.sz);
    intensity.push_back(volume[i]);
  }

  out.add("morph_volume", v);
  out.add("morph_vol_approx", n * s.voxel_volume());
  out.add("morph_area_mesh", a);
  out.add("morph_av", a / v);
  out.add("morph_comp_1", v / (std::sqrt(pi) * std::pow(a, 1.5)));
  out.add("morph_comp_2", 36.0 * pi * v * v / (a * a * a));
  out.add("morph_sph_dispr", a / std::cbrt(36.0 * pi * v * v));
  out.add("morph_sphericity", std::cbrt(36.0 * pi * v * v) / a);
  out.add("morph_asphericity", std::cbrt(a * a * a / (36.0 * pi * v * v)) - 1.0);

  Vec3 geo = Vec3::Zero(), weighted = Vec3::Zero();
  double total_intensity = 0.0;
  for (std::size_t k = 0; k < centres.size(); ++k) {
    geo += centres[k];
    weighted += intensity[k] * centres[k];
    total_intensity += intensity[k];
  }
  geo /= n;
  if (total_intensity != 0.0) {
    out.add("morph_com", (geo - weighted / total_intensity).norm());
  } else {
    out.add_undefined("morph_com");
  }

  std::vector<std::array<long long, 3>> lattice;
  lattice.reserve(mesh.vertices.size());
  for (const auto& p : mesh.vertices) {
    lattice.push_back({std::llround(p.x() / (0.5 * s.sx)), std::llround(p.y() / (0.5 * s.sy)),
                       std::llround(p.z() / (0.5 * s.sz))});
  }
  const auto hull = convex_hull_lattice(lattice, s);

  double diam2 = 0.0;
  for (std::size_t i = 0; i < hull.vertices.size(); ++i) {
    for (std::size_t j = i + 1; j < hull.vertices.size(); ++j) {
      diam2 = std::max(diam2, (hull.vertices[i] - hull.vertices[j]).squaredNorm());
    }
  }
  out.add("morph_diam", std::sqrt(diam2));

  const auto pca = principal_axes(centres);
  const Vec3& ev = pca.eigenvalues;
  out.add("morph_pca_maj_axis", 4.0 * std::sqrt(ev(0)));
  out.add("morph_pca_min_axis", 4.0 * std::sqrt(ev(1)));
  out.add("morph_pca_least_axis", 4.0 * std::sqrt(ev(2)));
  if (ev(0) > 0.0) {
    out.add("morph_pca_elongation", std::sqrt(ev(1) / ev(0)));
    out.add("morph_pca_flatness", std::sqrt(ev(2) / ev(0)));
  } else {
    out.add_undefined("morph_pca_elongation");
    out.add_undefined("morph_pca_flatness");
  }

  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity()), hi = -lo;
  for (const auto& p : mesh.vertices) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const Vec3 ext = hi - lo;
  out.add("morph_vol_dens_aabb", v / ext.prod());
  out.add("morph_area_dens_aabb", a / (2.0 * (ext.x() * ext.y() + ext.y() * ext.z() + ext.x() * ext.z())));

  const auto box = minimum_bounding_box(hull);
  out.add("morph_vol_dens_ombb", v / box.volume());
  out.add("morph_area_dens_ombb", a / box.area());

  const Ellipsoid aee{geo, Vec3(2.0 * std::sqrt(ev(0)), 2.0 * std::sqrt(ev(1)), 2.0 * std::sqrt(ev(2)))};
  if (aee.volume() > 0.0) {
    out.add("morph_vol_dens_aee", v / aee.volume());
    out.add("morph_area_dens_aee", a / aee.area());
  } else {
    out.add_undefined("morph_vol_dens_aee");
    out.add_undefined("morph_area_dens_aee");
  }

  const auto mvee = minimum_volume_enclosing_ellipsoid(hull.vertices);
  out.add("morph_vol_dens_mvee", v / mvee.volume());
  out.add("morph_area_dens_mvee", a / mvee.area());

  out.add("morph_vol_dens_conv_hull", v / hull.volume);
  out.add("morph_area_dens_conv_hull", a / hull.area);

  const double mean_intensity = total_intensity / n;
  out.add("morph_integ_int", mean_intensity * v);

  double dev2 = 0.0;
  for (double x : intensity) dev2 += (x - mean_intensity) * (x - mean_intensity);
  if (idx.size() < 2 || dev2 == 0.0) {
    out.add_undefined("morph_moran_i");
    out.add_undefined("morph_geary_c");
  } else {
    double wsum = 0.0, moran = 0.0, geary = 0.0;
    for (std::size_t i = 0; i < centres.size(); ++i) {
      for (std::size_t j = i + 1; j < centres.size(); ++j) {
        const double w = 1.0 / (centres[i] - centres[j]).norm();
        wsum += 2.0 * w;
        moran += 2.0 * w * (intensity[i] - mean_intensity) * (intensity[j] - mean_intensity);
        geary += 2.0 * w * (intensity[i] - intensity[j]) * (intensity[i] - intensity[j]);
      }
    }
    out.add("morph_moran_i", n / wsum * moran / dev2);
    out.add("morph_geary_c", (n - 1.0) / (2.0 * wsum) * geary / dev2);
  }
  return out;
}

}  // namespace radiomics
