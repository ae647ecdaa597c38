#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "flowsched/aggregation.hpp"
#include "flowsched/engine.hpp"
#include "flowsched/error.hpp"
#include "flowsched/fixtures.hpp"
#include "flowsched/sweep.hpp"
#include "json.hpp"

using namespace flowsched;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::ConfigError, "cannot write " + path);
  out << text;
}

// Flag values land here; only flags actually given override the config file.
struct EpisodeFlags {
  std::string config;
  std::string map;
  int agents = 0;
  int tasks = 0;
  int horizon = 0;
  std::string scheduler;
  std::string guidance;
  std::string external_cmd;
  int external_timeout_ms = 0;
  int epsilon = 0;
  std::uint64_t seed = 0;
  bool no_reassign = false;
  int period = 0;
  bool delivery_leg = false;
  bool parallel_regions = false;
  bool step_log = false;
  bool training_mode = false;
  double budget_ms = 0;

  std::map<std::string, CLI::Option*> opts;

  void add(CLI::App& app, bool with_axes) {
    opts["config"] = app.add_option("--config", config, "JSON file with the same keys as the flags");
    opts["map"] = app.add_option("--map", map, "MovingAI map file or bundled fixture name");
    if (with_axes) {
      opts["agents"] = app.add_option("--agents", agents, "Number of agents");
      opts["tasks"] = app.add_option("--tasks", tasks, "Open tasks kept in the pool");
      opts["scheduler"] = app.add_option("--scheduler", scheduler, "greedy | gopt | flow");
      opts["guidance"] = app.add_option("--guidance", guidance, "proportional | uniform | external");
      opts["seed"] = app.add_option("--seed", seed, "Episode seed");
    }
    opts["horizon"] = app.add_option("--horizon", horizon, "Steps to simulate");
    opts["external_cmd"] = app.add_option("--external-cmd", external_cmd, "Command serving the guidance protocol");
    opts["external_timeout_ms"] =
        app.add_option("--external-timeout-ms", external_timeout_ms, "Reply deadline for the guidance process");
    opts["epsilon"] = app.add_option("--epsilon", epsilon, "Neighborhood threshold between region seeds");
    opts["no_reassign"] = app.add_flag("--no-reassign", no_reassign, "Keep assignments once made");
    opts["period"] = app.add_option("--period", period, "Period of the time encoding in steps");
    opts["delivery_leg"] = app.add_flag("--delivery-leg", delivery_leg, "Add the pickup-delivery leg to task costs");
    opts["parallel_regions"] = app.add_flag("--parallel-regions", parallel_regions, "Solve regions on worker threads");
    opts["step_log"] = app.add_flag("--step-log", step_log, "Include the per-step log in the output");
    opts["training_mode"] = app.add_flag("--training-mode", training_mode, "Append trainer fields to guidance requests");
    opts["budget_ms"] = app.add_option("--budget-ms", budget_ms, "Per-step time budget in milliseconds");
  }

  bool given(const std::string& key) const {
    const auto it = opts.find(key);
    return it != opts.end() && it->second->count() > 0;
  }

  EpisodeConfig resolve() const {
    EpisodeConfig c;
    if (given("config")) c = config_from_json(slurp(config));
    if (given("map")) c.map_path = map;
    if (given("agents")) c.agents = agents;
    if (given("tasks")) c.tasks = tasks;
    if (given("horizon")) c.horizon = horizon;
    if (given("scheduler")) c.scheduler = parse_scheduler(scheduler);
    if (given("guidance")) c.guidance = parse_guidance(guidance);
    if (given("external_cmd")) c.external_cmd = external_cmd;
    if (given("external_timeout_ms")) c.external_timeout_ms = external_timeout_ms;
    if (given("epsilon")) c.epsilon = epsilon;
    if (given("seed")) c.seed = seed;
    if (given("no_reassign")) c.reassign = !no_reassign;
    if (given("period")) c.period = period;
    if (given("delivery_leg")) c.delivery_leg = delivery_leg;
    if (given("parallel_regions")) c.parallel_regions = parallel_regions;
    if (given("step_log")) c.step_log = step_log;
    if (given("training_mode")) c.training_mode = training_mode;
    if (given("budget_ms")) c.budget_ms = budget_ms;
    return c;
  }
};

int cmd_run(const EpisodeFlags& flags, const std::string& out, const std::string& csv) {
  const EpisodeConfig config = flags.resolve();
  config.validate();
  if (config.map_path.empty()) throw Error(ErrorCode::ConfigError, "--map is required");
  const Scenario scenario = resolve_scenario(config.map_path);
  const Metrics metrics = run_episode(scenario, config);
  const std::string doc = metrics_json(config, scenario, metrics);
  if (out.empty()) {
    std::cout << doc << "\n";
  } else {
    write_text(out, doc + "\n");
    std::cerr << "throughput " << metrics.throughput << " -> " << out << "\n";
  }
  if (!csv.empty()) write_text(csv, csv_header() + "\n" + csv_row(config, scenario.name, metrics) + "\n");
  return 0;
}

int cmd_inspect(const std::string& map_spec, const std::optional<int>& epsilon, bool as_json) {
  const Scenario scenario = resolve_scenario(map_spec);
  const GridMap& map = scenario.map;
  const RegionPartition p = build_partition(map, select_seeds(map, scenario.stations), epsilon);
  const double ratio = static_cast<double>(p.num_regions()) / map.traversable_count();
  if (as_json) {
    nlohmann::json regions = nlohmann::json::array();
    for (RegionId r = 0; r < p.num_regions(); ++r) {
      const Coord c = map.coord(p.seeds[static_cast<std::size_t>(r)]);
      regions.push_back({{"seed", {c.x, c.y}}, {"cells", p.region_size[static_cast<std::size_t>(r)]}});
    }
    nlohmann::json doc = {{"map", scenario.name},
                          {"width", map.width()},
                          {"height", map.height()},
                          {"tile_cells", map.size()},
                          {"traversable_cells", map.traversable_count()},
                          {"regions", p.num_regions()},
                          {"compression_ratio", ratio},
                          {"epsilon", p.epsilon},
                          {"neighborhood_edges", p.nh_edges.size()},
                          {"unassigned_cells", p.unassigned.size()},
                          {"region_list", regions}};
    std::cout << doc.dump(2) << "\n";
    return 0;
  }
  std::printf("map: %s\n", scenario.name.c_str());
  std::printf("size: %dx%d\n", map.width(), map.height());
  std::printf("tile_cells: %d\n", map.size());
  std::printf("traversable_cells: %d\n", map.traversable_count());
  std::printf("regions: %d\n", p.num_regions());
  std::printf("compression_ratio: %.4f\n", ratio);
  std::printf("epsilon: %d\n", p.epsilon);
  std::printf("neighborhood_edges: %zu\n", p.nh_edges.size());
  std::printf("unassigned_cells: %zu\n", p.unassigned.size());
  std::printf("region seed_x seed_y cells\n");
  for (RegionId r = 0; r < p.num_regions(); ++r) {
    const Coord c = map.coord(p.seeds[static_cast<std::size_t>(r)]);
    std::printf("%d %d %d %d\n", r, c.x, c.y, p.region_size[static_cast<std::size_t>(r)]);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lifelong pickup-and-delivery scheduling simulator"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Simulate one episode");
  EpisodeFlags run_flags;
  run_flags.add(*run, true);
  std::string run_out, run_csv;
  run->add_option("--out", run_out, "Metrics JSON path (stdout if omitted)");
  run->add_option("--csv", run_csv, "Also write a one-row CSV summary");

  auto* sweep = app.add_subcommand("sweep", "Run a cartesian grid of episodes");
  EpisodeFlags sweep_flags;
  sweep_flags.add(*sweep, false);
  std::vector<std::string> maps, schedulers, guidances;
  std::vector<int> agent_axis, task_axis;
  std::vector<std::uint64_t> seed_axis;
  int jobs = 1;
  std::string sweep_out;
  sweep->add_option("--maps", maps, "Maps (comma separated)")->delimiter(',');
  sweep->add_option("--agents", agent_axis, "Agent counts")->delimiter(',');
  sweep->add_option("--tasks", task_axis, "Task pool sizes")->delimiter(',');
  sweep->add_option("--scheduler", schedulers, "Schedulers")->delimiter(',');
  sweep->add_option("--guidance", guidances, "Guidance policies")->delimiter(',');
  sweep->add_option("--seeds", seed_axis, "Seeds")->delimiter(',');
  sweep->add_option("--jobs", jobs, "Parallel episodes");
  sweep->add_option("--out", sweep_out, "Combined CSV path (stdout if omitted)");

  auto* inspect = app.add_subcommand("inspect-partition", "Print the region partition of a map");
  std::string inspect_map;
  std::optional<int> inspect_eps;
  bool inspect_json = false;
  inspect->add_option("--map", inspect_map, "Map file or bundled fixture name")->required();
  inspect->add_option("--epsilon", inspect_eps, "Neighborhood threshold");
  inspect->add_flag("--json", inspect_json, "JSON output");

  auto* gen = app.add_subcommand("gen-fixtures", "Write the bundled warehouse maps");
  std::string gen_dir = "fixtures";
  gen->add_option("--dir", gen_dir, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*run) return cmd_run(run_flags, run_out, run_csv);
    if (*sweep) {
      SweepGrid grid;
      grid.base = sweep_flags.resolve();
      grid.maps = maps;
      grid.agents = agent_axis;
      grid.tasks = task_axis;
      for (const auto& s : schedulers) grid.schedulers.push_back(parse_scheduler(s));
      for (const auto& g : guidances) grid.guidances.push_back(parse_guidance(g));
      grid.seeds = seed_axis;
      const std::string csv = sweep_csv(run_sweep(grid, jobs));
      if (sweep_out.empty()) std::cout << csv;
      else write_text(sweep_out, csv);
      return 0;
    }
    if (*inspect) return cmd_inspect(inspect_map, inspect_eps, inspect_json);
    if (*gen) {
      for (const std::string& path : write_fixtures(gen_dir)) std::cout << path << "\n";
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::ConfigError ? 1 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
