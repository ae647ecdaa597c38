#include "flowsched/world.hpp"

#include <algorithm>
#include <cassert>
#include <deque>

namespace flowsched {

bool GoalMap::injective() const {
  std::vector<CellId> cells;
  cells.reserve(goals.size());
  for (const Goal& g : goals) cells.push_back(g.cell);
  std::sort(cells.begin(), cells.end());
  return std::adjacent_find(cells.begin(), cells.end()) == cells.end();
}

GoalMap GoalMap::stay_at(std::span<const CellId> positions) {
  GoalMap map;
  map.goals.reserve(positions.size());
  for (CellId c : positions) map.goals.push_back({c, GoalKind::Stay, -1, kNoRegion});
  return map;
}

bool is_free(const WorldState& state, AgentId agent) {
  const auto& assigned = state.assignments[static_cast<std::size_t>(agent)];
  if (!assigned) return true;
  if (!state.reassign) return false;
  const Task& task = state.pool.at(*assigned);
  return task.stage == TaskStage::ToPickup;
}

std::vector<AgentId> free_agents(const WorldState& state) {
  std::vector<AgentId> agents;
  for (AgentId a = 0; a < state.num_agents(); ++a) {
    if (is_free(state, a)) agents.push_back(a);
  }
  return agents;
}

namespace {

std::vector<CellId> committed_cells(const WorldState& state) {
  std::vector<CellId> cells;
  for (AgentId a = 0; a < state.num_agents(); ++a) {
    const auto& assigned = state.assignments[static_cast<std::size_t>(a)];
    if (assigned && !is_free(state, a)) cells.push_back(state.pool.at(*assigned).current_errand());
  }
  return cells;
}

}  // namespace

std::vector<FreeTask> free_tasks(const WorldState& state) {
  std::vector<CellId> taken = committed_cells(state);
  std::sort(taken.begin(), taken.end());
  std::vector<FreeTask> tasks;
  for (const auto& [id, task] : state.pool.open()) {
    if (task.stage != TaskStage::Unclaimed && task.stage != TaskStage::ToPickup) continue;
    if (task.agent && !is_free(state, *task.agent)) continue;
    const CellId cell = task.current_errand();
    const auto pos = std::lower_bound(taken.begin(), taken.end(), cell);
    if (pos != taken.end() && *pos == cell) continue;
    taken.insert(pos, cell);
    tasks.push_back({id, cell});
  }
  return tasks;
}

GoalMapBuilder::GoalMapBuilder(const WorldState& state)
    : state_(state), free_(free_agents(state)) {
  map_.goals.assign(static_cast<std::size_t>(state.num_agents()), Goal{});
  CellId max_cell = 0;
  for (CellId c : state.positions) max_cell = std::max(max_cell, c);
  for (const auto& [id, task] : state.pool.open()) {
    max_cell = std::max({max_cell, task.pickup, task.delivery});
  }
  used_.assign(static_cast<std::size_t>(max_cell) + 1, 0);
  for (AgentId a = 0; a < state.num_agents(); ++a) {
    const auto& assigned = state.assignments[static_cast<std::size_t>(a)];
    if (assigned && !is_free(state, a)) {
      set(a, {state.pool.at(*assigned).current_errand(), GoalKind::Task, *assigned, kNoRegion});
    }
  }
}

void GoalMapBuilder::set(AgentId agent, Goal goal) {
  if (static_cast<std::size_t>(goal.cell) >= used_.size()) {
    used_.resize(static_cast<std::size_t>(goal.cell) + 1, 0);
  }
  assert(!has_goal(agent));
  used_[static_cast<std::size_t>(goal.cell)] = 1;
  map_.goals[static_cast<std::size_t>(agent)] = goal;
}

void GoalMapBuilder::assign_task(AgentId agent, TaskId task, CellId cell) {
  set(agent, {cell, GoalKind::Task, task, kNoRegion});
}

void GoalMapBuilder::assign_waypoint(AgentId agent, CellId cell, RegionId region) {
  set(agent, {cell, GoalKind::Waypoint, -1, region});
}

GoalMap GoalMapBuilder::finish(const GridMap& map) {
  used_.resize(static_cast<std::size_t>(map.size()), 0);
  for (AgentId a : free_) {
    if (has_goal(a)) continue;
    const CellId here = state_.positions[static_cast<std::size_t>(a)];
    if (!used(here)) {
      set(a, {here, GoalKind::Stay, -1, kNoRegion});
      continue;
    }
    // Nearest unused cell, BFS in fixed direction order.
    std::vector<char> seen(static_cast<std::size_t>(map.size()), 0);
    std::deque<CellId> queue{here};
    seen[static_cast<std::size_t>(here)] = 1;
    CellId pick = kNoCell;
    while (!queue.empty() && pick == kNoCell) {
      const CellId u = queue.front();
      queue.pop_front();
      for (Direction d : kDirections) {
        const CellId v = map.neighbor(u, d);
        if (v == kNoCell || seen[static_cast<std::size_t>(v)]) continue;
        seen[static_cast<std::size_t>(v)] = 1;
        if (!used(v)) {
          pick = v;
          break;
        }
        queue.push_back(v);
      }
    }
    // Every reachable cell is taken: keep the agent in place.
    set(a, {pick == kNoCell ? here : pick, pick == kNoCell ? GoalKind::Stay : GoalKind::Waypoint, -1,
            kNoRegion});
  }
  // Busy agents were filled in the constructor; any agent still without a
  // goal (none expected) stays put.
  for (AgentId a = 0; a < state_.num_agents(); ++a) {
    if (!has_goal(a)) {
      map_.goals[static_cast<std::size_t>(a)] = {state_.positions[static_cast<std::size_t>(a)],
                                                 GoalKind::Stay, -1, kNoRegion};
    }
  }
  return map_;
}

std::int64_t assigned_distance(const GoalMap& goals, const WorldState& state,
                               const DistanceOracle& oracle) {
  std::int64_t total = 0;
  for (AgentId a : free_agents(state)) {
    const Goal& g = goals.goals[static_cast<std::size_t>(a)];
    if (g.kind != GoalKind::Task) continue;
    const Dist d = oracle.dist(state.positions[static_cast<std::size_t>(a)], g.cell);
    if (is_reachable(d)) total += d;
  }
  return total;
}

}  // namespace flowsched
