#pragma once

#include <array>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "radiomics/features.hpp"
#include "radiomics/volume.hpp"

namespace radiomics {

using Vec3 = Eigen::Vector3d;

/// Triangle soup with shared vertices; faces are counter-clockwise when
/// viewed from outside the enclosed region.
struct TriangleMesh {
  std::vector<Vec3> vertices;                  // mm
  std::vector<std::array<int, 3>> faces;
};

/// Identifier recorded in run manifests and conformance reports.
inline constexpr const char* kMesherIdentity = "marching-cubes/face-separated-corners/max-volume-fan/v2";

/// Extracts the 0.5 iso-surface of the binary mask. Voxel centres sit on
/// grid points, the grid is padded with one layer of zeros, and every
/// surface vertex is the midpoint of a grid edge. The per-cube polygons are
/// derived from the cube faces: on a face with two diagonally opposite
/// inside corners the corners are kept separate. Each polygon is fanned
/// from the vertex that maximises enclosed volume among those whose fan
/// diagonals stay off the cube faces.
TriangleMesh marching_cubes(const RoiMask& mask, const Spacing& spacing);

struct WatertightAudit {
  bool closed = false;          // every undirected edge is shared by exactly two faces
  bool oriented = false;        // every directed edge appears once
  std::size_t degenerate_faces = 0;
  bool ok() const { return closed && oriented && degenerate_faces == 0; }
};

WatertightAudit audit_mesh(const TriangleMesh& mesh);

/// |sum of signed tetrahedron volumes|. Throws InputError("open mesh") if
/// the mesh fails the watertightness audit.
double mesh_volume(const TriangleMesh& mesh);
double mesh_area(const TriangleMesh& mesh);

void write_obj(const TriangleMesh& mesh, const std::filesystem::path& path);

struct ConvexHull {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> faces;  // outward oriented
  double volume = 0.0;
  double area = 0.0;
};

/// Exact convex hull of points lying on a half-voxel lattice: each input
/// point is given by integer coordinates in units of half the spacing.
ConvexHull convex_hull_lattice(std::span<const std::array<long long, 3>> points, const Spacing& spacing);

struct Box {
  Eigen::Matrix3d axes;  // columns are unit axes
  Vec3 extents;          // edge lengths along the axes
  double volume() const { return extents.prod(); }
  double area() const {
    return 2.0 * (extents.x() * extents.y() + extents.y() * extents.z() + extents.x() * extents.z());
  }
};

/// Smallest box among those with one face flush with a hull facet, each
/// found by rotating calipers on the facet-plane projection.
Box minimum_bounding_box(const ConvexHull& hull);

struct Ellipsoid {
  Vec3 centre;
  Vec3 semi_axes;  // descending
  double volume() const;
  double area() const;
};

/// Exact surface area of an ellipsoid with semi-axes a >= b >= c >= 0.
double ellipsoid_area(double a, double b, double c);

/// Minimum-volume enclosing ellipsoid (Khachiyan's algorithm).
Ellipsoid minimum_volume_enclosing_ellipsoid(std::span<const Vec3> points, double tolerance = 1e-6,
                                             int max_iterations = 100000);

struct PrincipalAxes {
  Vec3 eigenvalues;  // descending, of the sample covariance
};

PrincipalAxes principal_axes(std::span<const Vec3> points);

/// The 29 morphology features. `mesh` must come from `mask`.
FeatureSet morphology_features(const GrayVolume& volume, const RoiMask& mask, const TriangleMesh& mesh);

}  // namespace radiomics
