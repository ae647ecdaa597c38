#include "flowsched/pipeline.hpp"

#include <algorithm>
#include <exception>
#include <thread>

namespace flowsched {

GoalMap flow_schedule(const WorldState& state, const RegionPartition& partition,
                      const DistanceOracle& oracle, const WaypointOrder& waypoints,
                      const Distribution& desired, const FlowOptions& options, FlowTrace* trace) {
  const SchedulingSnapshot snap = make_snapshot(state, partition);
  if (snap.n_free == 0) return GoalMapBuilder(state).finish(oracle.map());

  TransportInstance instance{snap.supplies, round_distribution(desired, snap.n_free),
                             partition.region_dist};
  Flow flow = solve_transport(instance);

  const auto n = static_cast<std::size_t>(partition.num_regions());
  std::vector<LocalProblem> problems(n);
  std::vector<Matching> matchings(n);
  auto solve = [&](std::size_t i) {
    problems[i] = build_region_problem(static_cast<RegionId>(i), flow, snap, state, partition, oracle,
                                       options.cost);
    matchings[i] = solve_assignment(problems[i]);
  };
  if (options.parallel_regions && n > 1) {
    const std::size_t workers = std::min<std::size_t>(n, std::max(1u, std::thread::hardware_concurrency()));
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = w; i < n; i += workers) solve(i);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) solve(i);
  }

  GoalMap goals = recover_goal_map(problems, matchings, flow, state, partition, oracle, waypoints);
  if (trace) {
    trace->desired = desired;
    trace->supplies = std::move(instance.supplies);
    trace->demands = std::move(instance.demands);
    trace->flow = std::move(flow);
    trace->problems = std::move(problems);
    trace->matchings = std::move(matchings);
  }
  return goals;
}

FlowScheduler::FlowScheduler(const RegionPartition& partition, const DistanceOracle& oracle,
                             std::unique_ptr<GuidancePolicy> guidance, FlowOptions options)
    : partition_(partition),
      oracle_(oracle),
      guidance_(std::move(guidance)),
      options_(options),
      waypoints_(oracle.map(), partition) {}

GoalMap FlowScheduler::schedule(const WorldState& state) {
  const SchedulingSnapshot snap = make_snapshot(state, partition_);
  if (snap.n_free == 0) return GoalMapBuilder(state).finish(oracle_.map());
  const Distribution desired = guidance_->desired(state, partition_);
  return flow_schedule(state, partition_, oracle_, waypoints_, desired, options_, &trace_);
}

}  // namespace flowsched
