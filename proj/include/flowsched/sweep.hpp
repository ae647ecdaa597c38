#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "flowsched/engine.hpp"

namespace flowsched {

// Cartesian product over the listed axes; every other field comes from base.
struct SweepGrid {
  std::vector<std::string> maps;
  std::vector<int> agents;
  std::vector<int> tasks;
  std::vector<SchedulerKind> schedulers;
  std::vector<GuidanceKind> guidances;
  std::vector<std::uint64_t> seeds;
  EpisodeConfig base;
};

struct SweepResult {
  EpisodeConfig config;
  std::string scenario;
  Metrics metrics;
};

std::vector<EpisodeConfig> expand(const SweepGrid& grid);

// Runs every configuration on `jobs` worker threads. Results keep the order
// of expand(). Maps are resolved once and shared read-only.
std::vector<SweepResult> run_sweep(const SweepGrid& grid, int jobs);

std::string sweep_csv(const std::vector<SweepResult>& results);

}  // namespace flowsched
