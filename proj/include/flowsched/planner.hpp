#pragma once

#include <span>
#include <vector>

#include "flowsched/world.hpp"

namespace flowsched {

// An agent had to take something other than its first-choice move.
struct ConflictEvent {
  AgentId agent = -1;
  CellId cell = kNoCell;
  Timestep t = 0;

  bool operator==(const ConflictEvent&) const = default;
};

struct PlanStep {
  std::vector<CellId> next_pos;
  std::vector<ConflictEvent> conflicts;
  std::vector<double> priorities;

  bool operator==(const PlanStep&) const = default;
};

// Distinct starting priorities in (0, 1); lower ids rank higher.
std::vector<double> base_priorities(int agents);

// One step of priority inheritance with backtracking. Each agent tries its
// neighbors by distance to goal (ties N, E, S, W, then waiting). Priorities
// grow by one per step while an agent is away from its goal and drop back to
// the base value once it arrives.
PlanStep plan_step(const GridMap& map, const DistanceOracle& oracle, std::span<const CellId> positions,
                   const GoalMap& goals, std::span<const double> priorities, Timestep t);

}  // namespace flowsched
