#pragma once

#include <memory>

#include "flowsched/guidance.hpp"
#include "flowsched/local_match.hpp"
#include "flowsched/scheduler.hpp"

namespace flowsched {

struct FlowOptions {
  CostOptions cost;
  bool parallel_regions = false;
};

// Intermediate results of one scheduling call, kept for inspection.
struct FlowTrace {
  Distribution desired;
  std::vector<int> supplies;
  std::vector<int> demands;
  Flow flow;
  std::vector<LocalProblem> problems;
  std::vector<Matching> matchings;
};

// Guidance -> rounding -> transport -> per-region matching -> recovery, for a
// given desired distribution.
GoalMap flow_schedule(const WorldState& state, const RegionPartition& partition,
                      const DistanceOracle& oracle, const WaypointOrder& waypoints,
                      const Distribution& desired, const FlowOptions& options = {},
                      FlowTrace* trace = nullptr);

class FlowScheduler final : public Scheduler {
 public:
  FlowScheduler(const RegionPartition& partition, const DistanceOracle& oracle,
                std::unique_ptr<GuidancePolicy> guidance, FlowOptions options = {});

  std::string name() const override { return "flow"; }
  GoalMap schedule(const WorldState& state) override;
  int guidance_fallbacks() const override { return guidance_->fallbacks(); }

  GuidancePolicy& guidance() { return *guidance_; }
  const FlowTrace& last_trace() const { return trace_; }

 private:
  const RegionPartition& partition_;
  const DistanceOracle& oracle_;
  std::unique_ptr<GuidancePolicy> guidance_;
  FlowOptions options_;
  WaypointOrder waypoints_;
  FlowTrace trace_;
};

}  // namespace flowsched
