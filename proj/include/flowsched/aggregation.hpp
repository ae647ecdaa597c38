#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "flowsched/grid_map.hpp"
#include "flowsched/matrix.hpp"

namespace flowsched {

using RegionId = std::int32_t;
inline constexpr RegionId kNoRegion = -1;

// Shortest-path Voronoi partition of the traversable cells around a seed set.
struct RegionPartition {
  std::vector<CellId> seeds;
  // Per cell; kNoRegion for blocked cells and cells that reach no seed.
  std::vector<RegionId> region_of;
  // Seed-to-seed directed distances; diagonal is zero.
  Matrix<Dist> region_dist;
  // Ordered pairs (i, j), i != j, with region_dist(i, j) <= epsilon.
  std::vector<std::pair<RegionId, RegionId>> nh_edges;
  Dist epsilon = 0;
  // Traversable cells that cannot reach any seed; excluded from scheduling.
  std::vector<CellId> unassigned;
  // Number of cells per region.
  std::vector<int> region_size;

  int num_regions() const { return static_cast<int>(seeds.size()); }
  RegionId region(CellId c) const { return region_of[static_cast<std::size_t>(c)]; }
};

// Union of aisle intersections (traversable cells with at least three
// traversable 4-neighbors) and the given stations, sorted by cell id. Falls
// back to a stride lattice when the union is empty.
std::vector<CellId> select_seeds(const GridMap& map, std::span<const CellId> stations);

// Voronoi regions by multi-source BFS towards the seeds; equidistant cells go
// to the lowest seed index. Without an explicit epsilon, default_epsilon()
// picks it from region_dist.
RegionPartition build_partition(const GridMap& map, std::span<const CellId> seeds,
                                std::optional<Dist> epsilon = std::nullopt);

// Smallest threshold whose neighborhood graph keeps at least 90% of the
// off-diagonal pairs.
Dist default_epsilon(const Matrix<Dist>& region_dist);

std::vector<std::pair<RegionId, RegionId>> neighborhood_edges(const Matrix<Dist>& region_dist,
                                                              Dist epsilon);

// Sidecar station coordinates as cell ids; StationBlocked if any is not traversable.
std::vector<CellId> station_cells(const GridMap& map, std::span<const Coord> stations);

}  // namespace flowsched
