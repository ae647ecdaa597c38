#pragma once

#include <optional>
#include <span>
#include <vector>

#include "flowsched/aggregation.hpp"
#include "flowsched/grid_map.hpp"
#include "flowsched/tasking.hpp"

namespace flowsched {

enum class GoalKind : std::uint8_t { Task, Waypoint, Stay };

struct Goal {
  CellId cell = kNoCell;
  GoalKind kind = GoalKind::Stay;
  TaskId task = -1;             // GoalKind::Task
  RegionId region = kNoRegion;  // GoalKind::Waypoint; kNoRegion for a plain yield cell

  bool operator==(const Goal&) const = default;
};

// Per-step agent -> vertex map handed from the scheduler to the planner.
struct GoalMap {
  std::vector<Goal> goals;

  // No two agents share a goal cell.
  bool injective() const;

  static GoalMap stay_at(std::span<const CellId> positions);

  bool operator==(const GoalMap&) const = default;
};

// System state <x_t, C_t> plus the previous goal map.
struct WorldState {
  Timestep t = 0;
  std::vector<CellId> positions;
  TaskPool pool;
  std::vector<std::optional<TaskId>> assignments;
  GoalMap prev_goal_map;
  // When false, only unassigned agents are free (no reassignment).
  bool reassign = true;

  WorldState(int capacity, std::uint64_t task_seed) : pool(capacity, task_seed) {}

  int num_agents() const { return static_cast<int>(positions.size()); }
};

// An agent may take a new goal while it has no task, or, with reassignment
// enabled, while its task is still heading to the first errand.
bool is_free(const WorldState& state, AgentId agent);

// Free agents in ascending id.
std::vector<AgentId> free_agents(const WorldState& state);

struct FreeTask {
  TaskId id = -1;
  CellId cell = kNoCell;  // current errand (the pickup)
};

// Tasks that are unclaimed or held by a free agent, ascending id. Tasks whose
// errand cell is already the committed goal of a busy agent, or repeats an
// earlier free task's cell, are left out so that goals stay distinct.
std::vector<FreeTask> free_tasks(const WorldState& state);

// Collects goals for one step. Busy agents keep their task errand; free
// agents receive goals through assign_*; finish() settles the rest.
class GoalMapBuilder {
 public:
  explicit GoalMapBuilder(const WorldState& state);

  const std::vector<AgentId>& free() const { return free_; }
  bool used(CellId c) const {
    const auto k = static_cast<std::size_t>(c);
    return k < used_.size() && used_[k] != 0;
  }
  bool has_goal(AgentId a) const { return map_.goals[static_cast<std::size_t>(a)].cell != kNoCell; }
  const GoalMap& peek() const { return map_; }

  void assign_task(AgentId agent, TaskId task, CellId cell);
  void assign_waypoint(AgentId agent, CellId cell, RegionId region);

  // Free agents without a goal stay put; if their cell is already someone's
  // goal they are sent to the nearest unused cell instead.
  GoalMap finish(const GridMap& map);

 private:
  void set(AgentId agent, Goal goal);

  const WorldState& state_;
  std::vector<AgentId> free_;
  std::vector<char> used_;
  GoalMap map_;
};

// Sum of dist_G(agent, task errand) over free agents given a task this step.
std::int64_t assigned_distance(const GoalMap& goals, const WorldState& state,
                               const DistanceOracle& oracle);

}  // namespace flowsched
