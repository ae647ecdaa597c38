#include "flowsched/tasking.hpp"

#include <algorithm>

#include "flowsched/error.hpp"

namespace flowsched {

namespace {

std::vector<CellId> candidate_cells(const GridMap& map, std::span<const CellId> excluded) {
  std::vector<bool> blocked(static_cast<std::size_t>(map.size()), false);
  for (CellId c : excluded) {
    if (map.valid(c)) blocked[static_cast<std::size_t>(c)] = true;
  }
  std::vector<CellId> cells;
  for (CellId c = 0; c < map.size(); ++c) {
    if (map.traversable(c) && !blocked[static_cast<std::size_t>(c)]) cells.push_back(c);
  }
  return cells;
}

}  // namespace

std::vector<Task> generate_tasks(const GridMap& map, std::span<const CellId> occupied, int count,
                                 Rng& rng, TaskId first_id, Timestep t) {
  std::vector<Task> tasks;
  if (count <= 0) return tasks;
  const std::vector<CellId> cells = candidate_cells(map, occupied);
  if (cells.size() < 2) {
    throw Error(ErrorCode::MapSaturated,
                "only " + std::to_string(cells.size()) + " unoccupied cells to sample errands from");
  }
  tasks.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    Task task;
    task.id = first_id + k;
    task.t_created = t;
    task.pickup = cells[rng.uniform_index(cells.size())];
    do {
      task.delivery = cells[rng.uniform_index(cells.size())];
    } while (task.delivery == task.pickup);
    tasks.push_back(task);
  }
  return tasks;
}

TaskPool::TaskPool(int capacity, std::uint64_t seed) : capacity_(capacity), rng_(seed) {
  if (capacity < 1) throw Error(ErrorCode::ConfigError, "task pool size must be at least 1");
}

void TaskPool::add(Task task) {
  if (open_.count(task.id)) throw Error(ErrorCode::ConfigError, "task id " + std::to_string(task.id) + " already open");
  next_id_ = std::max(next_id_, task.id + 1);
  open_.emplace(task.id, task);
}

void TaskPool::refill(const GridMap& map, std::span<const CellId> agent_positions, Timestep t) {
  while (size() < capacity_) {
    std::vector<CellId> excluded(agent_positions.begin(), agent_positions.end());
    for (const auto& [id, task] : open_) {
      excluded.push_back(task.pickup);
      excluded.push_back(task.delivery);
    }
    std::span<const CellId> avoid = excluded;
    if (candidate_cells(map, excluded).size() < 2) avoid = agent_positions;
    for (Task& task : generate_tasks(map, avoid, 1, rng_, next_id_, t)) {
      open_.emplace(task.id, task);
    }
    ++next_id_;
  }
}

AdvanceResult TaskPool::advance(std::span<const Arrival> arrivals, Timestep t, const GridMap& map,
                                std::span<const CellId> agent_positions) {
  AdvanceResult result;
  for (const Arrival& arrival : arrivals) {
    auto it = open_.find(arrival.task);
    if (it == open_.end()) continue;
    Task& task = it->second;
    if (task.agent != arrival.agent) continue;
    if (task.stage == TaskStage::ToPickup && arrival.cell == task.pickup) {
      task.stage = TaskStage::ToDelivery;
      task.t_pickup = t;
      result.picked_up.push_back(task);
    } else if (task.stage == TaskStage::ToDelivery && arrival.cell == task.delivery) {
      task.stage = TaskStage::Done;
      task.t_done = t;
      result.completed.push_back(task);
      open_.erase(it);
    }
  }
  refill(map, agent_positions, t);
  return result;
}

std::vector<Task> advance_tasks(TaskPool& pool, std::span<const Arrival> arrivals, Timestep t,
                                const GridMap& map, std::span<const CellId> agent_positions) {
  return pool.advance(arrivals, t, map, agent_positions).completed;
}

}  // namespace flowsched
