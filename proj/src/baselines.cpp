#include "flowsched/baselines.hpp"

#include <algorithm>

#include "flowsched/assignment.hpp"

namespace flowsched {

GoalMap greedy_schedule(const WorldState& state, const DistanceOracle& oracle) {
  GoalMapBuilder builder(state);
  std::vector<FreeTask> tasks = free_tasks(state);
  std::vector<char> taken(tasks.size(), 0);
  for (AgentId a : builder.free()) {
    const CellId pos = state.positions[static_cast<std::size_t>(a)];
    std::size_t best = tasks.size();
    Dist best_dist = kUnreachable;
    for (std::size_t k = 0; k < tasks.size(); ++k) {
      if (taken[k]) continue;
      const Dist d = oracle.dist(pos, tasks[k].cell);
      if (!is_reachable(d)) continue;
      if (best == tasks.size() || d < best_dist) {
        best = k;
        best_dist = d;
      }
    }
    if (best == tasks.size()) continue;
    taken[best] = 1;
    builder.assign_task(a, tasks[best].id, tasks[best].cell);
  }
  return builder.finish(oracle.map());
}

GoalMap gopt_schedule(const WorldState& state, const DistanceOracle& oracle) {
  GoalMapBuilder builder(state);
  const std::vector<AgentId>& agents = builder.free();
  const std::vector<FreeTask> tasks = free_tasks(state);
  if (!agents.empty() && !tasks.empty()) {
    const std::size_t n = std::max(agents.size(), tasks.size());
    Matrix<Dist> dist(agents.size(), tasks.size(), kUnreachable);
    std::int64_t prohibitive = 1;
    for (std::size_t r = 0; r < agents.size(); ++r) {
      const CellId pos = state.positions[static_cast<std::size_t>(agents[r])];
      for (std::size_t c = 0; c < tasks.size(); ++c) {
        dist(r, c) = oracle.dist(pos, tasks[c].cell);
        if (is_reachable(dist(r, c))) prohibitive += dist(r, c);
      }
    }
    Matrix<std::int64_t> cost(n, n, 0);
    for (std::size_t r = 0; r < agents.size(); ++r) {
      for (std::size_t c = 0; c < tasks.size(); ++c) {
        cost(r, c) = is_reachable(dist(r, c)) ? dist(r, c) : prohibitive;
      }
    }
    const std::vector<int> match = hungarian(cost);
    for (std::size_t r = 0; r < agents.size(); ++r) {
      const auto c = static_cast<std::size_t>(match[r]);
      if (c >= tasks.size() || !is_reachable(dist(r, c))) continue;
      builder.assign_task(agents[r], tasks[c].id, tasks[c].cell);
    }
  }
  return builder.finish(oracle.map());
}

}  // namespace flowsched
