#include <algorithm>
#include <cstdlib>
#include <deque>
#include <numeric>

#include <fmt/format.h>

#include "radiomics/texture.hpp"

namespace radiomics {

std::vector<Offset> direction_set(int distance) {
  if (distance < 1) throw ConfigError("texture distance must be >= 1");
  std::vector<Offset> out;
  for (int dz = -1; dz <= 1; ++dz) {
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        const bool forward = dz > 0 || (dz == 0 && dy > 0) || (dz == 0 && dy == 0 && dx > 0);
        if (forward) out.push_back({dx * distance, dy * distance, dz * distance});
      }
    }
  }
  return out;
}

AggregationMode parse_aggregation(const std::string& text) {
  if (text == "merge") return AggregationMode::MergeMatrices;
  if (text == "average") return AggregationMode::AverageFeatures;
  throw ConfigError(fmt::format("unknown aggregation mode '{}'", text));
}

std::string aggregation_key(AggregationMode mode) {
  return mode == AggregationMode::MergeMatrices ? "merge" : "average";
}

long long Glcm::total() const { return std::accumulate(counts.begin(), counts.end(), 0LL); }
long long LevelCountMatrix::total() const { return std::accumulate(counts.begin(), counts.end(), 0LL); }

namespace {

Index3 step(const Index3& p, const Offset& o, int sign = 1) {
  return {p.x + sign * o.dx, p.y + sign * o.dy, p.z + sign * o.dz};
}

int row_of(const DiscreteVolume& dvol, int level) { return level - dvol.base_level(); }

// Chebyshev-ball neighbours (self excluded) of radius `distance`.
std::vector<Offset> neighbourhood(int distance) {
  if (distance < 1) throw ConfigError("texture distance must be >= 1");
  std::vector<Offset> out;
  for (int dz = -distance; dz <= distance; ++dz) {
    for (int dy = -distance; dy <= distance; ++dy) {
      for (int dx = -distance; dx <= distance; ++dx) {
        if (dx || dy || dz) out.push_back({dx, dy, dz});
      }
    }
  }
  return out;
}

LevelCountMatrix from_columns(const DiscreteVolume& dvol, const std::vector<std::pair<int, int>>& entries) {
  LevelCountMatrix m;
  m.base_level = dvol.base_level();
  m.n_levels = dvol.n_levels();
  int max_col = 0;
  for (const auto& e : entries) max_col = std::max(max_col, e.second);
  m.n_columns = max_col + 1;
  m.counts.assign(static_cast<std::size_t>(m.n_levels * m.n_columns), 0);
  for (const auto& [row, col] : entries) ++m.counts[static_cast<std::size_t>(row * m.n_columns + col)];
  return m;
}

}  // namespace

std::vector<Glcm> build_glcm(const DiscreteVolume& dvol, int distance) {
  const auto& d = dvol.dims();
  const int n = dvol.n_levels();
  std::vector<Glcm> out;
  for (const auto& dir : direction_set(distance)) {
    Glcm m{dvol.base_level(), n, std::vector<long long>(static_cast<std::size_t>(n * n), 0), dir};
    for (std::size_t k = 0; k < d.count(); ++k) {
      if (!dvol.mask().contains(k)) continue;
      const auto q = step(grid_index(d, k), dir);
      if (!dvol.in_roi(q)) continue;
      const int i = row_of(dvol, dvol.level(k));
      const int j = row_of(dvol, dvol.level(q));
      ++m.counts[static_cast<std::size_t>(i * n + j)];
      ++m.counts[static_cast<std::size_t>(j * n + i)];
    }
    out.push_back(std::move(m));
  }
  return out;
}

Glcm merge_glcm(std::span<const Glcm> matrices) {
  if (matrices.empty()) throw std::invalid_argument("merge_glcm: no matrices");
  Glcm out{matrices[0].base_level, matrices[0].n_levels, std::vector<long long>(matrices[0].counts.size(), 0), {}};
  for (const auto& m : matrices) {
    if (m.n_levels != out.n_levels || m.base_level != out.base_level) {
      throw std::invalid_argument("merge_glcm: level ranges differ");
    }
    for (std::size_t i = 0; i < m.counts.size(); ++i) out.counts[i] += m.counts[i];
  }
  return out;
}

std::vector<LevelCountMatrix> build_glrlm(const DiscreteVolume& dvol) {
  const auto& d = dvol.dims();
  std::vector<LevelCountMatrix> out;
  for (const auto& dir : direction_set(1)) {
    std::vector<std::pair<int, int>> runs;
    for (std::size_t k = 0; k < d.count(); ++k) {
      if (!dvol.mask().contains(k)) continue;
      const auto p = grid_index(d, k);
      const int level = dvol.level(k);
      const auto prev = step(p, dir, -1);
      if (dvol.in_roi(prev) && dvol.level(prev) == level) continue;  // not a run start
      int length = 1;
      for (auto q = step(p, dir); dvol.in_roi(q) && dvol.level(q) == level; q = step(q, dir)) ++length;
      runs.emplace_back(row_of(dvol, level), length - 1);
    }
    auto m = from_columns(dvol, runs);
    m.direction = dir;
    out.push_back(std::move(m));
  }
  return out;
}

LevelCountMatrix merge_level_counts(std::span<const LevelCountMatrix> matrices) {
  if (matrices.empty()) throw std::invalid_argument("merge_level_counts: no matrices");
  LevelCountMatrix out;
  out.base_level = matrices[0].base_level;
  out.n_levels = matrices[0].n_levels;
  for (const auto& m : matrices) out.n_columns = std::max(out.n_columns, m.n_columns);
  out.counts.assign(static_cast<std::size_t>(out.n_levels * out.n_columns), 0);
  for (const auto& m : matrices) {
    if (m.n_levels != out.n_levels || m.base_level != out.base_level) {
      throw std::invalid_argument("merge_level_counts: level ranges differ");
    }
    for (int r = 0; r < m.n_levels; ++r) {
      for (int c = 0; c < m.n_columns; ++c) out.counts[static_cast<std::size_t>(r * out.n_columns + c)] += m.at(r, c);
    }
  }
  return out;
}

std::vector<int> label_zones(const DiscreteVolume& dvol) {
  const auto& d = dvol.dims();
  const auto nbrs = neighbourhood(1);
  std::vector<int> labels(d.count(), -1);
  int next = 0;
  std::deque<std::size_t> queue;
  for (std::size_t seed = 0; seed < d.count(); ++seed) {
    if (!dvol.mask().contains(seed) || labels[seed] >= 0) continue;
    const int level = dvol.level(seed);
    labels[seed] = next;
    queue.push_back(seed);
    while (!queue.empty()) {
      const auto k = queue.front();
      queue.pop_front();
      const auto p = grid_index(d, k);
      for (const auto& o : nbrs) {
        const auto q = step(p, o);
        if (!dvol.in_roi(q) || dvol.level(q) != level) continue;
        const auto qi = linear_index(d, static_cast<std::size_t>(q.x), static_cast<std::size_t>(q.y),
                                     static_cast<std::size_t>(q.z));
        if (labels[qi] >= 0) continue;
        labels[qi] = next;
        queue.push_back(qi);
      }
    }
    ++next;
  }
  return labels;
}

LevelCountMatrix build_glszm(const DiscreteVolume& dvol) {
  const auto labels = label_zones(dvol);
  const int n_zones = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
  std::vector<int> size(static_cast<std::size_t>(n_zones), 0);
  std::vector<int> level(static_cast<std::size_t>(n_zones), 0);
  for (std::size_t k = 0; k < labels.size(); ++k) {
    if (labels[k] < 0) continue;
    ++size[static_cast<std::size_t>(labels[k])];
    level[static_cast<std::size_t>(labels[k])] = dvol.level(k);
  }
  std::vector<std::pair<int, int>> entries;
  for (std::size_t z = 0; z < size.size(); ++z) entries.emplace_back(row_of(dvol, level[z]), size[z] - 1);
  return from_columns(dvol, entries);
}

std::vector<int> border_distance_map(const DiscreteVolume& dvol) {
  const auto& d = dvol.dims();
  // BFS over 6-neighbours, seeded by ROI voxels that touch the outside.
  const Offset faces[] = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
  std::vector<int> dist(d.count(), 0);
  std::deque<std::size_t> queue;
  for (std::size_t k = 0; k < d.count(); ++k) {
    if (!dvol.mask().contains(k)) continue;
    const auto p = grid_index(d, k);
    for (const auto& o : faces) {
      if (!dvol.in_roi(step(p, o))) {
        dist[k] = 1;
        queue.push_back(k);
        break;
      }
    }
  }
  while (!queue.empty()) {
    const auto k = queue.front();
    queue.pop_front();
    const auto p = grid_index(d, k);
    for (const auto& o : faces) {
      const auto q = step(p, o);
      if (!dvol.in_roi(q)) continue;
      const auto qi =
          linear_index(d, static_cast<std::size_t>(q.x), static_cast<std::size_t>(q.y), static_cast<std::size_t>(q.z));
      if (dist[qi] != 0) continue;
      dist[qi] = dist[k] + 1;
      queue.push_back(qi);
    }
  }
  return dist;
}

LevelCountMatrix build_gldzm(const DiscreteVolume& dvol) {
  const auto labels = label_zones(dvol);
  const auto dist = border_distance_map(dvol);
  const int n_zones = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
  std::vector<int> zone_dist(static_cast<std::size_t>(n_zones), std::numeric_limits<int>::max());
  std::vector<int> level(static_cast<std::size_t>(n_zones), 0);
  for (std::size_t k = 0; k < labels.size(); ++k) {
    if (labels[k] < 0) continue;
    auto& zd = zone_dist[static_cast<std::size_t>(labels[k])];
    zd = std::min(zd, dist[k]);
    level[static_cast<std::size_t>(labels[k])] = dvol.level(k);
  }
  std::vector<std::pair<int, int>> entries;
  for (std::size_t z = 0; z < zone_dist.size(); ++z) entries.emplace_back(row_of(dvol, level[z]), zone_dist[z] - 1);
  return from_columns(dvol, entries);
}

Ngtdm build_ngtdm(const DiscreteVolume& dvol, int distance) {
  const auto& d = dvol.dims();
  const auto nbrs = neighbourhood(distance);
  Ngtdm m;
  m.base_level = dvol.base_level();
  m.n_levels = dvol.n_levels();
  m.occurrences.assign(static_cast<std::size_t>(m.n_levels), 0);
  m.abs_deviation.assign(static_cast<std::size_t>(m.n_levels), 0.0);
  for (std::size_t k = 0; k < d.count(); ++k) {
    if (!dvol.mask().contains(k)) continue;
    const auto p = grid_index(d, k);
    long long sum = 0;
    long long count = 0;
    for (const auto& o : nbrs) {
      const auto q = step(p, o);
      if (!dvol.in_roi(q)) continue;
      sum += dvol.level(q);
      ++count;
    }
    if (count == 0) continue;
    const int level = dvol.level(k);
    const auto r = static_cast<std::size_t>(row_of(dvol, level));
    ++m.occurrences[r];
    m.abs_deviation[r] += std::abs(static_cast<double>(level) - static_cast<double>(sum) / static_cast<double>(count));
  }
  return m;
}

LevelCountMatrix build_ngldm(const DiscreteVolume& dvol, int alpha, int distance) {
  if (alpha < 0) throw ConfigError("NGLDM coarseness must be >= 0");
  const auto& d = dvol.dims();
  const auto nbrs = neighbourhood(distance);
  std::vector<std::pair<int, int>> entries;
  for (std::size_t k = 0; k < d.count(); ++k) {
    if (!dvol.mask().contains(k)) continue;
    const auto p = grid_index(d, k);
    const int level = dvol.level(k);
    int dependence = 0;
    for (const auto& o : nbrs) {
      const auto q = step(p, o);
      if (dvol.in_roi(q) && std::abs(dvol.level(q) - level) <= alpha) ++dependence;
    }
    entries.emplace_back(row_of(dvol, level), dependence);
  }
  return from_columns(dvol, entries);
}

}  // namespace radiomics
