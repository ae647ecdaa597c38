#pragma once

#include <algorithm>
#include <functional>
#include <initializer_list>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "flowsched/aggregation.hpp"
#include "flowsched/grid_map.hpp"
#include "flowsched/local_match.hpp"
#include "flowsched/rebalance.hpp"
#include "flowsched/rng.hpp"
#include "flowsched/world.hpp"

namespace flowsched::testing {

// Rows of '.' and '@' joined into a MovingAI map.
inline GridMap grid(const std::vector<std::string>& rows) {
  std::string text = "type octile\nheight " + std::to_string(rows.size()) + "\nwidth " +
                     std::to_string(rows.empty() ? 0 : rows[0].size()) + "\nmap\n";
  for (const auto& r : rows) text += r + "\n";
  return parse_map(text);
}

inline GridMap open_grid(int w, int h) { return GridMap(w, h, std::vector<bool>(static_cast<std::size_t>(w * h), true)); }

// Random map whose traversable cells form one 4-connected component.
inline GridMap random_connected_grid(Rng& rng, int w, int h, double blocked) {
  while (true) {
    std::vector<bool> open(static_cast<std::size_t>(w * h));
    for (auto&& c : open) c = rng.uniform01() >= blocked;
    GridMap map(w, h, open);
    const auto cells = map.traversable_cells();
    if (cells.size() < 4) continue;
    const DistField f = dist_field(map, cells.front());
    if (std::all_of(cells.begin(), cells.end(), [&](CellId c) { return is_reachable(f.at(c)); })) return map;
  }
}

// Distinct random cells.
inline std::vector<CellId> sample_cells(Rng& rng, const GridMap& map, std::size_t n) {
  std::vector<CellId> cells = map.traversable_cells();
  for (std::size_t k = 0; k < n; ++k) std::swap(cells[k], cells[k + rng.uniform_index(cells.size() - k)]);
  cells.resize(n);
  return cells;
}

// All agents unassigned at distinct cells; pool filled to `tasks`.
inline WorldState random_state(Rng& rng, const GridMap& map, int agents, int tasks) {
  WorldState s(tasks, rng.next());
  s.positions = sample_cells(rng, map, static_cast<std::size_t>(agents));
  s.assignments.assign(static_cast<std::size_t>(agents), std::nullopt);
  s.prev_goal_map = GoalMap::stay_at(s.positions);
  s.pool.refill(map, s.positions, 0);
  return s;
}

// Hands task `id` to agent `a` in stage ToPickup.
inline void give(WorldState& s, AgentId a, TaskId id) {
  s.assignments[static_cast<std::size_t>(a)] = id;
  Task& t = s.pool.at(id);
  t.agent = a;
  t.stage = TaskStage::ToPickup;
}

// Unassigned agents at `positions`; one task per (pickup, delivery) pair,
// ids from 0. The pool capacity equals the task count.
inline WorldState state_with(std::vector<CellId> positions, std::vector<std::pair<CellId, CellId>> tasks) {
  WorldState s(static_cast<int>(std::max<std::size_t>(1, tasks.size())), 1);
  s.positions = std::move(positions);
  s.assignments.assign(s.positions.size(), std::nullopt);
  s.prev_goal_map = GoalMap::stay_at(s.positions);
  TaskId id = 0;
  for (const auto& [p, d] : tasks) {
    Task t;
    t.id = id++;
    t.pickup = p;
    t.delivery = d;
    t.t_created = 0;
    s.pool.add(t);
  }
  return s;
}

inline Flow flow_of(std::initializer_list<std::initializer_list<int>> rows) {
  Flow f{Matrix<int>(rows.size(), rows.size(), 0), 0};
  std::size_t i = 0;
  for (const auto& r : rows) {
    std::size_t j = 0;
    for (int v : r) f.y(i, j++) = v;
    ++i;
  }
  return f;
}

// Minimum cost over every integral flow with the given margins, by
// enumeration. -1 when no flow uses only reachable pairs.
inline std::int64_t transport_oracle(const TransportInstance& inst) {
  const std::size_t n = inst.supplies.size();
  std::vector<int> demand = inst.demands;
  std::int64_t best = -1;
  std::function<void(std::size_t, std::size_t, int, std::int64_t)> rec = [&](std::size_t i, std::size_t j, int left,
                                                                            std::int64_t cost) {
    if (i == n) {
      if (std::all_of(demand.begin(), demand.end(), [](int d) { return d == 0; }) && (best < 0 || cost < best)) {
        best = cost;
      }
      return;
    }
    if (j == n) {
      if (left == 0) rec(i + 1, 0, i + 1 < n ? inst.supplies[i + 1] : 0, cost);
      return;
    }
    const Dist c = inst.costs(i, j);
    const int cap = is_reachable(c) ? std::min(left, demand[j]) : 0;
    for (int y = 0; y <= cap; ++y) {
      demand[j] -= y;
      rec(i, j + 1, left - y, cost + static_cast<std::int64_t>(y) * (y ? c : 0));
      demand[j] += y;
    }
  };
  rec(0, 0, n ? inst.supplies[0] : 0, 0);
  return best;
}

// Minimum over matchings of cardinality kappa that use no forbidden or
// unreachable pair and cover every artificial column with a real row. -1
// when none exists.
inline std::int64_t local_oracle(const LocalProblem& p) {
  const std::size_t rows = p.rows.size();
  const std::size_t cols = p.cols.size();
  std::vector<char> used(cols, 0);
  std::int64_t best = -1;
  std::function<void(std::size_t, int, std::int64_t)> rec = [&](std::size_t r, int matched, std::int64_t cost) {
    if (r == rows) {
      if (matched != p.kappa) return;
      for (std::size_t c = 0; c < cols; ++c) {
        if (p.cols[c].artificial && !used[c]) return;
      }
      if (best < 0 || cost < best) best = cost;
      return;
    }
    rec(r + 1, matched, cost);
    for (std::size_t c = 0; c < cols; ++c) {
      if (used[c] || p.is_forbidden(static_cast<int>(r), static_cast<int>(c)) || !is_reachable(p.cost(r, c))) continue;
      used[c] = 1;
      rec(r + 1, matched + 1, cost + p.cost(r, c));
      used[c] = 0;
    }
  };
  rec(0, 0, 0);
  return best;
}

// Cheapest matching of maximum cardinality between agents and task cells by
// enumeration; every pair is assumed reachable.
inline std::int64_t matching_oracle(const std::vector<std::vector<Dist>>& cost) {
  const std::size_t rows = cost.size();
  const std::size_t cols = rows ? cost[0].size() : 0;
  const std::size_t k = std::min(rows, cols);
  std::vector<char> used(cols, 0);
  std::int64_t best = -1;
  std::function<void(std::size_t, std::size_t, std::int64_t)> rec = [&](std::size_t r, std::size_t matched,
                                                                        std::int64_t c) {
    if (r == rows) {
      if (matched == k && (best < 0 || c < best)) best = c;
      return;
    }
    if (rows - r > k - matched) rec(r + 1, matched, c);
    for (std::size_t j = 0; j < cols; ++j) {
      if (used[j]) continue;
      used[j] = 1;
      rec(r + 1, matched + 1, c + cost[r][j]);
      used[j] = 0;
    }
  };
  rec(0, 0, 0);
  return best < 0 ? 0 : best;
}

// Random local problem with up to `max_rows` rows and `max_cols` columns
// including placeholders, every cost finite.
inline LocalProblem random_local_problem(Rng& rng, int max_rows, int max_cols, int max_cost) {
  LocalProblem p;
  p.region = 0;
  const int rows = 1 + static_cast<int>(rng.uniform_index(static_cast<std::size_t>(max_rows)));
  const int cols = 1 + static_cast<int>(rng.uniform_index(static_cast<std::size_t>(max_cols)));
  const int real_rows = 1 + static_cast<int>(rng.uniform_index(static_cast<std::size_t>(rows)));
  const int art_cols = static_cast<int>(rng.uniform_index(static_cast<std::size_t>(std::min(cols, real_rows) + 1)));
  for (int r = 0; r < rows; ++r) {
    const bool art = r >= real_rows;
    p.rows.push_back({art, art ? -1 : r, art ? 1 : kNoRegion, art ? r - real_rows : 0, kNoCell});
  }
  for (int c = 0; c < cols; ++c) {
    const bool art = c >= cols - art_cols;
    p.cols.push_back({art, art ? -1 : c, art ? 2 : kNoRegion, 0, kNoCell});
  }
  p.cost = Matrix<Dist>(static_cast<std::size_t>(rows), static_cast<std::size_t>(cols));
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      p.cost(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) =
          static_cast<Dist>(rng.uniform_index(static_cast<std::size_t>(max_cost + 1)));
      if (p.rows[static_cast<std::size_t>(r)].artificial && p.cols[static_cast<std::size_t>(c)].artificial) {
        p.forbidden.emplace_back(r, c);
      }
    }
  }
  p.kappa = std::min(rows, cols);
  return p;
}

inline TransportInstance random_transport(Rng& rng, int max_regions, int max_units, int max_cost) {
  const auto n = 1 + rng.uniform_index(static_cast<std::size_t>(max_regions));
  const int units = static_cast<int>(rng.uniform_index(static_cast<std::size_t>(max_units + 1)));
  TransportInstance inst;
  inst.supplies.assign(n, 0);
  inst.demands.assign(n, 0);
  for (int u = 0; u < units; ++u) {
    ++inst.supplies[rng.uniform_index(n)];
    ++inst.demands[rng.uniform_index(n)];
  }
  inst.costs = Matrix<Dist>(n, n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j) inst.costs(i, j) = static_cast<Dist>(rng.uniform_index(static_cast<std::size_t>(max_cost + 1)));
    }
  }
  return inst;
}

// Sum of row sums check.
inline bool margins_hold(const TransportInstance& inst, const Flow& f) {
  const std::size_t n = inst.supplies.size();
  for (std::size_t i = 0; i < n; ++i) {
    int row = 0, col = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (f.y(i, j) < 0) return false;
      row += f.y(i, j);
      col += f.y(j, i);
    }
    if (row != inst.supplies[i] || col != inst.demands[i]) return false;
  }
  return true;
}

}  // namespace flowsched::testing
