#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <stdexcept>
#include <unordered_map>

#include <fmt/format.h>

#include "radiomics/morphology.hpp"

namespace radiomics {

namespace {

using IVec = std::array<int, 3>;

IVec corner_bits(int c) { return {c & 1, (c >> 1) & 1, (c >> 2) & 1}; }

struct CubeTopology {
  std::array<std::array<int, 2>, 12> edges{};  // corner pairs
  std::array<std::array<int, 8>, 8> edge_of{};  // corner pair -> edge, -1 if none
  struct Face {
    int axis = 0;
    int sign = 0;                 // outward normal is sign * e_axis
    std::array<int, 4> corners{};  // cyclic order
  };
  std::array<Face, 6> faces{};

  CubeTopology() {
    for (auto& row : edge_of) row.fill(-1);
    int e = 0;
    for (int a = 0; a < 8; ++a) {
      for (int bit : {1, 2, 4}) {
        if (a & bit) continue;
        edges[static_cast<std::size_t>(e)] = {a, a | bit};
        edge_of[static_cast<std::size_t>(a)][static_cast<std::size_t>(a | bit)] = e;
        edge_of[static_cast<std::size_t>(a | bit)][static_cast<std::size_t>(a)] = e;
        ++e;
      }
    }
    int f = 0;
    for (int axis = 0; axis < 3; ++axis) {
      const int u = 1 << ((axis + 1) % 3);
      const int w = 1 << ((axis + 2) % 3);
      for (int v = 0; v < 2; ++v) {
        const int base = v ? (1 << axis) : 0;
        faces[static_cast<std::size_t>(f++)] = {axis, v ? 1 : -1, {base, base | u, base | u | w, base | w}};
      }
    }
  }

  IVec midpoint2(int edge) const {
    const auto a = corner_bits(edges[static_cast<std::size_t>(edge)][0]);
    const auto b = corner_bits(edges[static_cast<std::size_t>(edge)][1]);
    return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
  }
};

const CubeTopology& topology() {
  static const CubeTopology t;
  return t;
}

IVec sub(const IVec& a, const IVec& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
IVec cross(const IVec& a, const IVec& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
int dot(const IVec& a, const IVec& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

// Directed polygons (cycles of local edge ids) for one cube configuration.
std::vector<std::vector<int>> cube_polygons(unsigned config) {
  const auto& t = topology();
  const auto inside = [config](int c) { return ((config >> c) & 1u) != 0; };
  std::array<int, 12> next;
  next.fill(-1);

  for (const auto& face : t.faces) {
    const auto& q = face.corners;
    std::array<int, 4> crossing{};  // crossing[i]: edge q[i]-q[i+1] or -1
    int n_cross = 0;
    for (int i = 0; i < 4; ++i) {
      const int a = q[static_cast<std::size_t>(i)], b = q[static_cast<std::size_t>((i + 1) % 4)];
      crossing[static_cast<std::size_t>(i)] =
          inside(a) != inside(b) ? t.edge_of[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] : -1;
      n_cross += crossing[static_cast<std::size_t>(i)] >= 0;
    }
    if (n_cross == 0) continue;

    std::vector<std::array<int, 2>> segments;
    if (n_cross == 2) {
      std::array<int, 2> s{-1, -1};
      for (int e : crossing) {
        if (e >= 0) (s[0] < 0 ? s[0] : s[1]) = e;
      }
      segments.push_back(s);
    } else {
      // Diagonal inside corners: cut each inside corner off on its own.
      for (int i = 0; i < 4; ++i) {
        if (!inside(q[static_cast<std::size_t>(i)])) continue;
        segments.push_back({crossing[static_cast<std::size_t>((i + 3) % 4)], crossing[static_cast<std::size_t>(i)]});
      }
    }

    IVec normal{0, 0, 0};
    normal[static_cast<std::size_t>(face.axis)] = face.sign;
    for (auto [ea, eb] : segments) {
      const auto A = t.midpoint2(ea);
      const auto B = t.midpoint2(eb);
      const auto& ends = t.edges[static_cast<std::size_t>(ea)];
      const int in_corner = inside(ends[0]) ? ends[0] : ends[1];
      const auto cb = corner_bits(in_corner);
      const IVec C{2 * cb[0], 2 * cb[1], 2 * cb[2]};
      // The surface runs with the inside corner on its right when seen
      // from outside the cube, which orients the polygon outward.
      if (dot(cross(normal, sub(B, A)), sub(C, A)) > 0) std::swap(ea, eb);
      next[static_cast<std::size_t>(ea)] = eb;
    }
  }

  std::vector<std::vector<int>> polygons;
  std::array<bool, 12> used{};
  for (int start = 0; start < 12; ++start) {
    if (next[static_cast<std::size_t>(start)] < 0 || used[static_cast<std::size_t>(start)]) continue;
    std::vector<int> cycle;
    for (int e = start; !used[static_cast<std::size_t>(e)]; e = next[static_cast<std::size_t>(e)]) {
      used[static_cast<std::size_t>(e)] = true;
      cycle.push_back(e);
    }
    polygons.push_back(std::move(cycle));
  }
  return polygons;
}

// True when both edge midpoints lie in one face of the cube.
bool share_face(const IVec& a, const IVec& b) {
  for (std::size_t k = 0; k < 3; ++k) {
    if (a[k] == b[k] && a[k] != 1) return true;
  }
  return false;
}

// Rotates a cycle so that the fan from its first vertex encloses the most
// volume. Non-planar cycles otherwise depend on the edge numbering. Roots
// whose fan diagonals would lie in a cube face are skipped: the neighbouring
// cube can emit the same diagonal, leaving an edge shared by four triangles.
void choose_fan_root(std::vector<int>& cycle) {
  const auto& t = topology();
  const std::size_t n = cycle.size();
  if (n <= 3) return;
  std::optional<std::size_t> root;
  long long best = 0;
  for (std::size_t r = 0; r < n; ++r) {
    bool in_face = false;
    for (std::size_t k = 2; k + 1 < n; ++k) {
      in_face = in_face || share_face(t.midpoint2(cycle[r]), t.midpoint2(cycle[(r + k) % n]));
    }
    if (in_face) continue;
    long long v = 0;
    const auto a = t.midpoint2(cycle[r]);
    for (std::size_t k = 1; k + 1 < n; ++k) {
      const auto b = t.midpoint2(cycle[(r + k) % n]);
      const auto c = t.midpoint2(cycle[(r + k + 1) % n]);
      v += dot(a, cross(b, c));
    }
    if (!root || v > best) {
      best = v;
      root = r;
    }
  }
  if (!root) throw std::logic_error("marching cubes: no fan root avoids the cube faces");
  std::rotate(cycle.begin(), cycle.begin() + static_cast<std::ptrdiff_t>(*root), cycle.end());
}

const std::array<std::vector<std::vector<int>>, 256>& case_table() {
  static const auto table = [] {
    std::array<std::vector<std::vector<int>>, 256> t;
    for (unsigned c = 0; c < 256; ++c) {
      t[c] = cube_polygons(c);
      for (auto& cycle : t[c]) choose_fan_root(cycle);
    }
    return t;
  }();
  return table;
}

}  // namespace

TriangleMesh marching_cubes(const RoiMask& mask, const Spacing& spacing) {
  const auto& t = topology();
  const auto& table = case_table();
  const auto& d = mask.dims();
  const auto nx = static_cast<long long>(d.nx), ny = static_cast<long long>(d.ny), nz = static_cast<long long>(d.nz);

  TriangleMesh mesh;
  std::unordered_map<long long, int> vertex_of;
  // Doubled lattice coordinates are in [-2, 2n]; shift by 2 to pack.
  const long long wx = 2 * nx + 5, wy = 2 * ny + 5;
  const auto vertex_index = [&](const IVec& g) {
    const long long key = (g[0] + 2) + wx * ((g[1] + 2) + wy * (g[2] + 2));
    const auto [it, inserted] = vertex_of.try_emplace(key, static_cast<int>(mesh.vertices.size()));
    if (inserted) mesh.vertices.emplace_back(0.5 * g[0] * spacing.sx, 0.5 * g[1] * spacing.sy, 0.5 * g[2] * spacing.sz);
    return it->second;
  };

  for (long long cz = -1; cz < nz; ++cz) {
    for (long long cy = -1; cy < ny; ++cy) {
      for (long long cx = -1; cx < nx; ++cx) {
        unsigned config = 0;
        for (int c = 0; c < 8; ++c) {
          const auto b = corner_bits(c);
          if (mask.contains(Index3{cx + b[0], cy + b[1], cz + b[2]})) config |= 1u << c;
        }
        if (config == 0 || config == 255) continue;
        const IVec origin{static_cast<int>(2 * cx), static_cast<int>(2 * cy), static_cast<int>(2 * cz)};
        for (const auto& polygon : table[config]) {
          std::vector<int> ids;
          ids.reserve(polygon.size());
          for (int e : polygon) {
            const auto m = t.midpoint2(e);
            ids.push_back(vertex_index({origin[0] + m[0], origin[1] + m[1], origin[2] + m[2]}));
          }
          for (std::size_t k = 1; k + 1 < ids.size(); ++k) mesh.faces.push_back({ids[0], ids[k], ids[k + 1]});
        }
      }
    }
  }
  return mesh;
}

WatertightAudit audit_mesh(const TriangleMesh& mesh) {
  WatertightAudit audit;
  std::map<std::pair<int, int>, int> directed;
  for (const auto& f : mesh.faces) {
    const Vec3& a = mesh.vertices[static_cast<std::size_t>(f[0])];
    const Vec3& b = mesh.vertices[static_cast<std::size_t>(f[1])];
    const Vec3& c = mesh.vertices[static_cast<std::size_t>(f[2])];
    if ((b - a).cross(c - a).norm() == 0.0) ++audit.degenerate_faces;
    for (int k = 0; k < 3; ++k) ++directed[{f[static_cast<std::size_t>(k)], f[static_cast<std::size_t>((k + 1) % 3)]}];
  }
  audit.closed = !mesh.faces.empty();
  audit.oriented = !mesh.faces.empty();
  for (const auto& [edge, count] : directed) {
    const auto rev = directed.find({edge.second, edge.first});
    const int reverse = rev == directed.end() ? 0 : rev->second;
    if (count + reverse != 2) audit.closed = false;
    if (count != 1 || reverse != 1) audit.oriented = false;
  }
  return audit;
}

double mesh_volume(const TriangleMesh& mesh) {
  const auto audit = audit_mesh(mesh);
  if (!audit.closed) throw InputError("open mesh");
  double v = 0.0;
  for (const auto& f : mesh.faces) {
    const Vec3& a = mesh.vertices[static_cast<std::size_t>(f[0])];
    const Vec3& b = mesh.vertices[static_cast<std::size_t>(f[1])];
    const Vec3& c = mesh.vertices[static_cast<std::size_t>(f[2])];
    v += a.dot(b.cross(c));
  }
  return std::abs(v) / 6.0;
}

double mesh_area(const TriangleMesh& mesh) {
  double area = 0.0;
  for (const auto& f : mesh.faces) {
    const Vec3& a = mesh.vertices[static_cast<std::size_t>(f[0])];
    const Vec3& b = mesh.vertices[static_cast<std::size_t>(f[1])];
    const Vec3& c = mesh.vertices[static_cast<std::size_t>(f[2])];
    area += 0.5 * (b - a).cross(c - a).norm();
  }
  return area;
}

void write_obj(const TriangleMesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError(fmt::format("cannot write '{}'", path.string()));
  out << "# " << kMesherIdentity << '\n';
  for (const auto& v : mesh.vertices) out << fmt::format("v {:.17g} {:.17g} {:.17g}\n", v.x(), v.y(), v.z());
  for (const auto& f : mesh.faces) out << fmt::format("f {} {} {}\n", f[0] + 1, f[1] + 1, f[2] + 1);
}

}  // namespace radiomics
