#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace flowsched {

using CellId = std::int32_t;
using Dist = std::int32_t;

inline constexpr CellId kNoCell = -1;
// Distance sentinel for cells with no directed path. Never compared
// numerically; callers test with is_reachable().
inline constexpr Dist kUnreachable = -1;

inline constexpr bool is_reachable(Dist d) { return d != kUnreachable; }

// Fixed direction order used for every neighbor iteration and tie-break.
enum class Direction : std::uint8_t { North = 0, East = 1, South = 2, West = 3 };
inline constexpr std::array<Direction, 4> kDirections = {Direction::North, Direction::East,
                                                          Direction::South, Direction::West};

Direction opposite(Direction d);
std::optional<Direction> parse_direction(std::string_view token);

struct Coord {
  int x = 0;
  int y = 0;
  auto operator<=>(const Coord&) const = default;
};

// Four-connected warehouse grid. Edges run between traversable 4-neighbors and
// every traversable cell carries an implicit self-loop. One-way restrictions
// remove individual directed edges.
class GridMap {
 public:
  GridMap(int width, int height, std::vector<bool> traversable);

  int width() const { return width_; }
  int height() const { return height_; }
  int size() const { return width_ * height_; }
  int traversable_count() const { return traversable_count_; }
  bool directed() const { return directed_; }

  bool in_bounds(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }
  bool valid(CellId c) const { return c >= 0 && c < size(); }
  bool traversable(CellId c) const { return valid(c) && traversable_[c]; }

  CellId cell(int x, int y) const { return y * width_ + x; }
  CellId cell(Coord c) const { return cell(c.x, c.y); }
  Coord coord(CellId c) const { return {c % width_, c / width_}; }

  // Out-neighbor of `c` in direction `d`, or kNoCell when that edge is absent.
  CellId neighbor(CellId c, Direction d) const { return out_[slot(c, d)]; }
  // Cell in direction `d` from `c` that has an edge into `c`, or kNoCell.
  CellId in_neighbor(CellId c, Direction d) const { return in_[slot(c, d)]; }

  // Includes the self-loop on traversable cells.
  bool has_edge(CellId from, CellId to) const;

  // Number of traversable 4-neighbors, ignoring one-way restrictions.
  int open_degree(CellId c) const;

  std::vector<CellId> traversable_cells() const;

  // Makes the edge from `from` towards `d` one-way by dropping its reverse.
  // Returns false if no such edge exists.
  bool restrict_one_way(CellId from, Direction d);

 private:
  static std::size_t slot(CellId c, Direction d) {
    return static_cast<std::size_t>(c) * 4 + static_cast<std::size_t>(d);
  }

  int width_;
  int height_;
  int traversable_count_ = 0;
  bool directed_ = false;
  std::vector<bool> traversable_;
  std::vector<CellId> out_;
  std::vector<CellId> in_;
};

// Station cells and one-way edges listed next to a map file.
struct MapSidecar {
  std::vector<Coord> stations;
  std::vector<std::pair<Coord, Direction>> one_way;
};

// MovingAI grid text: `type`, `height`, `width`, `map` header lines followed
// by rows over {'.', '@', 'T'}.
GridMap parse_map(std::string_view text);

// One tuple per line: `x,y` marks a station, `x,y,D` (D in N/E/S/W) marks the
// edge leaving (x,y) towards D as one-way. Blank lines and `#` comments are
// skipped.
MapSidecar parse_sidecar(std::string_view text);

// Applies the one-way edges; stations are consumed by seed selection.
void apply_sidecar(GridMap& map, const MapSidecar& sidecar);

std::string format_map(const GridMap& map);
std::string format_sidecar(const MapSidecar& sidecar);

// BFS distances from a source, following edge directions.
struct DistField {
  CellId source = kNoCell;
  std::vector<Dist> dist;

  Dist at(CellId c) const { return dist[static_cast<std::size_t>(c)]; }
};

DistField dist_field(const GridMap& map, CellId source);

// BFS distances *to* a target: result.at(v) is dist_G(v, target).
DistField dist_to_field(const GridMap& map, CellId target);

// Lazily cached all-pairs shortest-path lookups. One reverse BFS per target
// cell, computed on first use. Safe to query from several threads.
class DistanceOracle {
 public:
  explicit DistanceOracle(const GridMap& map);

  const GridMap& map() const { return map_; }

  // dist_G(from, to); kUnreachable if `to` cannot be reached.
  Dist dist(CellId from, CellId to) const;

  const std::vector<Dist>& field_to(CellId target) const;

 private:
  const GridMap& map_;
  mutable std::vector<std::vector<Dist>> to_fields_;
  mutable std::vector<std::once_flag> once_;
};

}  // namespace flowsched
