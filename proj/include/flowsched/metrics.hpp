#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "flowsched/planner.hpp"

namespace flowsched {

struct LatencySummary {
  int count = 0;
  double mean = 0;
  double p50 = 0;
  double p90 = 0;
  double p99 = 0;
  double max = 0;
};

// Percentiles by linear interpolation between order statistics.
LatencySummary summarize(std::vector<double> samples);
double percentile(std::vector<double> samples, double q);

// Contract checks made on every step. All zero in a healthy run.
struct SafetyCounters {
  std::int64_t vertex_collisions = 0;
  std::int64_t swap_collisions = 0;
  std::int64_t invalid_moves = 0;
  std::int64_t non_injective_steps = 0;
  std::int64_t pool_size_violations = 0;
  std::int64_t free_without_goal = 0;

  bool clean() const {
    return vertex_collisions == 0 && swap_collisions == 0 && invalid_moves == 0 && non_injective_steps == 0 &&
           pool_size_violations == 0 && free_without_goal == 0;
  }
  bool operator==(const SafetyCounters&) const = default;
};

struct StepLog {
  Timestep t = 0;
  int free_agents = 0;
  int free_tasks = 0;
  int assigned = 0;
  std::int64_t assigned_distance = 0;
  int conflicts = 0;
  int completed = 0;
  double latency_ms = 0;

  bool operator==(const StepLog&) const = default;
};

struct Metrics {
  std::int64_t throughput = 0;
  double time_to_task = 0;  // mean steps, assignment to first errand
  double time_in_task = 0;  // mean steps, first to second errand
  std::int64_t pickups = 0;
  std::int64_t reassignments = 0;  // held tasks released by a free agent
  std::int64_t conflicts = 0;
  int width = 0;
  int height = 0;
  std::vector<std::int64_t> conflict_heatmap;  // row-major over the grid
  std::vector<double> latency_initial_ms;
  std::vector<double> latency_lifelong_ms;
  int budget_overruns = 0;
  int guidance_fallbacks = 0;
  SafetyCounters safety;
  std::vector<StepLog> steps;  // filled only when step logging is on

  // Equal in everything except wall-clock measurements.
  bool same_outcome(const Metrics& other) const;
};

}  // namespace flowsched
