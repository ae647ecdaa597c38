#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "flowsched/aggregation.hpp"
#include "flowsched/rebalance.hpp"
#include "flowsched/world.hpp"

namespace flowsched {

// Free agents and free tasks bucketed by the region of their cell. Entities
// on cells outside every region are dropped.
struct SchedulingSnapshot {
  std::vector<std::vector<AgentId>> agents;  // per region, ascending id
  std::vector<std::vector<FreeTask>> tasks;  // per region, ascending id
  std::vector<int> supplies;
  int n_free = 0;
  int n_tasks = 0;
};

SchedulingSnapshot make_snapshot(const WorldState& state, const RegionPartition& partition);

struct LocalRow {
  bool artificial = false;
  AgentId agent = -1;          // real rows
  RegionId from = kNoRegion;   // artificial rows: source region j of y^{ji}
  int unit = 0;
  CellId cell = kNoCell;       // agent position or seed of `from`
};

struct LocalCol {
  bool artificial = false;
  TaskId task = -1;            // real columns
  RegionId to = kNoRegion;     // artificial columns: destination region j of y^{ij}
  int unit = 0;
  CellId cell = kNoCell;       // task errand or seed of `to`
};

struct LocalProblem {
  RegionId region = kNoRegion;
  std::vector<LocalRow> rows;  // real agents, then artificial agents
  std::vector<LocalCol> cols;  // real tasks, then artificial tasks
  Matrix<Dist> cost;
  std::vector<std::pair<int, int>> forbidden;
  int kappa = 0;

  bool is_forbidden(int r, int c) const {
    return rows[static_cast<std::size_t>(r)].artificial && cols[static_cast<std::size_t>(c)].artificial;
  }
  int artificial_tasks() const;
  int real_agents() const;
};

struct CostOptions {
  // Adds the pickup-to-delivery leg to every real-task column.
  bool delivery_leg = false;
};

// FlowMismatch when the flow's row sum for `region` differs from the number
// of free agents there.
LocalProblem build_region_problem(RegionId region, const Flow& flow, const SchedulingSnapshot& snap,
                                  const WorldState& state, const RegionPartition& partition,
                                  const DistanceOracle& oracle, CostOptions options = {});

struct Matching {
  std::vector<std::pair<int, int>> pairs;  // (row, col), ascending row
  std::int64_t cost = 0;
};

// Minimum-cost matching of cardinality kappa in which every artificial task
// takes a real agent and no artificial pair is used. Infeasible otherwise.
// Real-real pairs without a path are left unmatched.
Matching solve_assignment(const LocalProblem& problem);

// Cells in BFS order from each seed; a region's own cells come first, then
// the rest of the graph as spill-over when the region is full.
class WaypointOrder {
 public:
  WaypointOrder(const GridMap& map, const RegionPartition& partition);

  // Next cell for region `r` not yet used as a goal; kNoCell if none remain.
  CellId next_free(RegionId r, const GoalMapBuilder& builder, std::vector<std::size_t>& cursor) const;
  std::size_t regions() const { return order_.size(); }

 private:
  std::vector<std::vector<CellId>> order_;
};

// Turns per-region matchings back into a goal map: real matches become Task
// goals, cross-region placeholders are paired in nearest-first order, and
// agents left without a task get distinct waypoint cells.
GoalMap recover_goal_map(std::span<const LocalProblem> problems, std::span<const Matching> matchings,
                         const Flow& flow, const WorldState& state, const RegionPartition& partition,
                         const DistanceOracle& oracle, const WaypointOrder& waypoints);

}  // namespace flowsched
