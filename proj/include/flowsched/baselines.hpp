#pragma once

#include "flowsched/scheduler.hpp"

namespace flowsched {

// Free agents in ascending id each take the nearest remaining free task,
// ties to the lowest task id. Agents left over stay put.
GoalMap greedy_schedule(const WorldState& state, const DistanceOracle& oracle);

// Minimum total distance matching between all free agents and free tasks.
// Pairs without a path are left unmatched.
GoalMap gopt_schedule(const WorldState& state, const DistanceOracle& oracle);

class GreedyScheduler final : public Scheduler {
 public:
  explicit GreedyScheduler(const DistanceOracle& oracle) : oracle_(oracle) {}
  std::string name() const override { return "greedy"; }
  GoalMap schedule(const WorldState& state) override { return greedy_schedule(state, oracle_); }

 private:
  const DistanceOracle& oracle_;
};

class GoptScheduler final : public Scheduler {
 public:
  explicit GoptScheduler(const DistanceOracle& oracle) : oracle_(oracle) {}
  std::string name() const override { return "gopt"; }
  GoalMap schedule(const WorldState& state) override { return gopt_schedule(state, oracle_); }

 private:
  const DistanceOracle& oracle_;
};

}  // namespace flowsched
