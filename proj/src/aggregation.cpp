#include "flowsched/aggregation.hpp"

#include <algorithm>
#include <deque>
#include <string>

#include "flowsched/error.hpp"

namespace flowsched {

std::vector<CellId> station_cells(const GridMap& map, std::span<const Coord> stations) {
  std::vector<CellId> cells;
  cells.reserve(stations.size());
  for (const Coord& s : stations) {
    if (!map.in_bounds(s.x, s.y) || !map.traversable(map.cell(s))) {
      throw Error(ErrorCode::StationBlocked, "station (" + std::to_string(s.x) + "," +
                                                 std::to_string(s.y) + ") is not traversable");
    }
    cells.push_back(map.cell(s));
  }
  return cells;
}

std::vector<CellId> select_seeds(const GridMap& map, std::span<const CellId> stations) {
  std::vector<CellId> seeds;
  for (CellId s : stations) {
    if (!map.traversable(s)) {
      throw Error(ErrorCode::StationBlocked, "station cell " + std::to_string(s) + " is blocked");
    }
    seeds.push_back(s);
  }
  for (CellId c = 0; c < map.size(); ++c) {
    if (map.open_degree(c) >= 3) seeds.push_back(c);
  }
  std::sort(seeds.begin(), seeds.end());
  seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());
  if (!seeds.empty() || map.traversable_count() == 0) return seeds;

  // Lattice fallback: the coarsest stride that still yields min(4, |V|) seeds.
  const int wanted = std::min(4, map.traversable_count());
  for (int stride = std::max(map.width(), map.height()); stride >= 1; --stride) {
    seeds.clear();
    for (CellId c : map.traversable_cells()) {
      const Coord p = map.coord(c);
      if (p.x % stride == 0 && p.y % stride == 0) seeds.push_back(c);
    }
    if (static_cast<int>(seeds.size()) >= wanted) break;
  }
  return seeds;
}

std::vector<std::pair<RegionId, RegionId>> neighborhood_edges(const Matrix<Dist>& region_dist,
                                                              Dist epsilon) {
  std::vector<std::pair<RegionId, RegionId>> edges;
  const auto n = static_cast<RegionId>(region_dist.rows());
  for (RegionId i = 0; i < n; ++i) {
    for (RegionId j = 0; j < n; ++j) {
      if (i == j) continue;
      const Dist d = region_dist(i, j);
      if (is_reachable(d) && d <= epsilon) edges.emplace_back(i, j);
    }
  }
  return edges;
}

Dist default_epsilon(const Matrix<Dist>& region_dist) {
  const std::size_t n = region_dist.rows();
  std::vector<Dist> values;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && is_reachable(region_dist(i, j))) values.push_back(region_dist(i, j));
    }
  }
  if (values.empty()) return 0;
  std::sort(values.begin(), values.end());
  const std::size_t pairs = n * (n - 1);
  const std::size_t needed = std::max<std::size_t>(1, (9 * pairs + 9) / 10);
  return values[std::min(needed, values.size()) - 1];
}

RegionPartition build_partition(const GridMap& map, std::span<const CellId> seeds,
                                std::optional<Dist> epsilon) {
  if (seeds.empty()) throw Error(ErrorCode::ConfigError, "partition needs at least one seed");
  RegionPartition part;
  part.seeds.assign(seeds.begin(), seeds.end());
  const auto n = static_cast<RegionId>(seeds.size());
  const auto cells = static_cast<std::size_t>(map.size());

  // Layered BFS over reverse edges: dist[v] is dist_G(v, nearest seed). A cell
  // takes the smallest region among its successors one layer closer, which is
  // the lowest index among all equidistant seeds.
  std::vector<Dist> dist(cells, kUnreachable);
  part.region_of.assign(cells, kNoRegion);
  std::deque<CellId> queue;
  for (RegionId i = 0; i < n; ++i) {
    const CellId s = seeds[static_cast<std::size_t>(i)];
    if (!map.traversable(s)) {
      throw Error(ErrorCode::SourceBlocked, "seed cell " + std::to_string(s) + " is blocked");
    }
    if (dist[s] == 0) continue;  // duplicate seed; first index keeps it
    dist[s] = 0;
    part.region_of[s] = i;
    queue.push_back(s);
  }
  while (!queue.empty()) {
    const CellId u = queue.front();
    queue.pop_front();
    for (Direction d : kDirections) {
      const CellId v = map.in_neighbor(u, d);
      if (v == kNoCell) continue;
      if (dist[v] == kUnreachable) {
        dist[v] = dist[u] + 1;
        part.region_of[v] = part.region_of[u];
        queue.push_back(v);
      } else if (dist[v] == dist[u] + 1 && part.region_of[u] < part.region_of[v]) {
        part.region_of[v] = part.region_of[u];
      }
    }
  }

  part.region_size.assign(static_cast<std::size_t>(n), 0);
  for (CellId c = 0; c < map.size(); ++c) {
    if (!map.traversable(c)) continue;
    const RegionId r = part.region_of[c];
    if (r == kNoRegion) {
      part.unassigned.push_back(c);
    } else {
      ++part.region_size[static_cast<std::size_t>(r)];
    }
  }

  part.region_dist = Matrix<Dist>(static_cast<std::size_t>(n), static_cast<std::size_t>(n), kUnreachable);
  for (RegionId i = 0; i < n; ++i) {
    const DistField field = dist_field(map, seeds[static_cast<std::size_t>(i)]);
    for (RegionId j = 0; j < n; ++j) {
      part.region_dist(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) =
          field.at(seeds[static_cast<std::size_t>(j)]);
    }
  }

  part.epsilon = epsilon.value_or(default_epsilon(part.region_dist));
  part.nh_edges = neighborhood_edges(part.region_dist, part.epsilon);
  return part;
}

}  // namespace flowsched
