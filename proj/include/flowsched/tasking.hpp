#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "flowsched/grid_map.hpp"
#include "flowsched/rng.hpp"

namespace flowsched {

using AgentId = std::int32_t;
using TaskId = std::int64_t;
using Timestep = std::int64_t;

inline constexpr Timestep kUnset = -1;

// Stages only move forward. A task released by a reassigned agent keeps its
// stage and simply has no agent until it is claimed again.
enum class TaskStage : std::uint8_t { Unclaimed, ToPickup, ToDelivery, Done };

struct Task {
  TaskId id = -1;
  CellId pickup = kNoCell;
  CellId delivery = kNoCell;
  TaskStage stage = TaskStage::Unclaimed;
  std::optional<AgentId> agent;
  Timestep t_created = kUnset;
  Timestep t_assigned = kUnset;
  Timestep t_pickup = kUnset;
  Timestep t_done = kUnset;

  // The actionable vertex: pickup until it is reached, delivery afterwards.
  CellId current_errand() const { return stage == TaskStage::ToDelivery ? delivery : pickup; }

  bool operator==(const Task&) const = default;
};

// Samples `count` two-errand tasks with pickup and delivery drawn
// independently and uniformly from traversable cells not in `occupied`,
// redrawing the delivery until it differs from the pickup. Ids run from
// `first_id`. MapSaturated when fewer than two candidate cells exist.
std::vector<Task> generate_tasks(const GridMap& map, std::span<const CellId> occupied, int count,
                                 Rng& rng, TaskId first_id = 0, Timestep t = 0);

struct Arrival {
  AgentId agent = -1;
  CellId cell = kNoCell;
  TaskId task = -1;
};

struct AdvanceResult {
  std::vector<Task> picked_up;
  std::vector<Task> completed;
};

// Lifelong pool holding exactly `capacity` open tasks between steps.
class TaskPool {
 public:
  TaskPool(int capacity, std::uint64_t seed);

  int capacity() const { return capacity_; }
  int size() const { return static_cast<int>(open_.size()); }
  TaskId next_id() const { return next_id_; }
  const Rng& rng() const { return rng_; }

  const std::map<TaskId, Task>& open() const { return open_; }
  bool contains(TaskId id) const { return open_.count(id) != 0; }
  Task& at(TaskId id) { return open_.at(id); }
  const Task& at(TaskId id) const { return open_.at(id); }

  // Inserts a prepared task (scenario setup). ConfigError on a duplicate id.
  void add(Task task);

  // Samples replacements until the pool is full again. New errands avoid
  // agent positions and the errand cells of open tasks, so open tasks never
  // share a cell; if that leaves fewer than two candidates, only agent
  // positions are avoided.
  void refill(const GridMap& map, std::span<const CellId> agent_positions, Timestep t);

  // Moves ToPickup tasks whose agent stands on the pickup to ToDelivery and
  // retires ToDelivery tasks whose agent stands on the delivery, then refills.
  // Arrivals that do not match the task's current errand are ignored.
  AdvanceResult advance(std::span<const Arrival> arrivals, Timestep t, const GridMap& map,
                        std::span<const CellId> agent_positions);

 private:
  int capacity_;
  TaskId next_id_ = 0;
  Rng rng_;
  std::map<TaskId, Task> open_;
};

// Free-function form of TaskPool::advance; returns the completed tasks.
std::vector<Task> advance_tasks(TaskPool& pool, std::span<const Arrival> arrivals, Timestep t,
                                const GridMap& map, std::span<const CellId> agent_positions);

}  // namespace flowsched
