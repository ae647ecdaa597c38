#include "flowsched/sweep.hpp"

#include <atomic>
#include <exception>
#include <map>
#include <memory>
#include <thread>

#include "flowsched/error.hpp"
#include "flowsched/fixtures.hpp"

namespace flowsched {

std::vector<EpisodeConfig> expand(const SweepGrid& grid) {
  auto or_base = [](auto values, auto fallback) {
    if (values.empty()) values.push_back(fallback);
    return values;
  };
  const auto maps = or_base(grid.maps, grid.base.map_path);
  const auto agents = or_base(grid.agents, grid.base.agents);
  const auto tasks = or_base(grid.tasks, grid.base.tasks);
  const auto schedulers = or_base(grid.schedulers, grid.base.scheduler);
  const auto guidances = or_base(grid.guidances, grid.base.guidance);
  const auto seeds = or_base(grid.seeds, grid.base.seed);
  std::vector<EpisodeConfig> out;
  for (const auto& m : maps)
    for (int a : agents)
      for (int k : tasks)
        for (SchedulerKind s : schedulers)
          for (GuidanceKind g : guidances)
            for (std::uint64_t seed : seeds) {
              EpisodeConfig c = grid.base;
              c.map_path = m;
              c.agents = a;
              c.tasks = k;
              c.scheduler = s;
              c.guidance = g;
              c.seed = seed;
              out.push_back(c);
            }
  return out;
}

std::vector<SweepResult> run_sweep(const SweepGrid& grid, int jobs) {
  const std::vector<EpisodeConfig> configs = expand(grid);
  for (const EpisodeConfig& c : configs) c.validate();
  std::map<std::string, std::unique_ptr<Scenario>> scenarios;
  for (const EpisodeConfig& c : configs) {
    if (!scenarios.count(c.map_path)) scenarios[c.map_path] = std::make_unique<Scenario>(resolve_scenario(c.map_path));
  }

  std::vector<SweepResult> results(configs.size());
  std::vector<std::exception_ptr> errors(configs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < configs.size(); k = next++) {
      try {
        const Scenario& scenario = *scenarios.at(configs[k].map_path);
        results[k] = {configs[k], scenario.name, run_episode(scenario, configs[k])};
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const int threads = std::max(1, std::min<int>(jobs, static_cast<int>(configs.size())));
  std::vector<std::thread> pool;
  for (int w = 1; w < threads; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

std::string sweep_csv(const std::vector<SweepResult>& results) {
  std::string out = csv_header() + "\n";
  for (const SweepResult& r : results) {
    out += csv_row(r.config, r.scenario, r.metrics) + "\n";
  }
  return out;
}

}  // namespace flowsched
