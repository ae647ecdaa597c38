#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "flowsched/aggregation.hpp"
#include "flowsched/metrics.hpp"
#include "flowsched/planner.hpp"
#include "flowsched/scheduler.hpp"
#include "flowsched/world.hpp"

namespace flowsched {

class ExternalGuidance;
class FeatureExtractor;

enum class SchedulerKind { Greedy, Gopt, Flow };
enum class GuidanceKind { Proportional, Uniform, External };

SchedulerKind parse_scheduler(std::string_view name);
GuidanceKind parse_guidance(std::string_view name);
std::string_view to_string(SchedulerKind kind);
std::string_view to_string(GuidanceKind kind);

struct EpisodeConfig {
  std::string map_path;
  int agents = 8;
  int tasks = 12;
  int horizon = 500;
  SchedulerKind scheduler = SchedulerKind::Flow;
  GuidanceKind guidance = GuidanceKind::Proportional;
  std::string external_cmd;
  int external_timeout_ms = 200;
  std::optional<Dist> epsilon;
  std::uint64_t seed = 0;
  bool reassign = true;
  int period = 1000;
  bool delivery_leg = false;
  bool parallel_regions = false;
  bool step_log = false;
  bool training_mode = false;
  double budget_ms = 1000.0;

  // ConfigError on values no episode can run with.
  void validate() const;
};

// Keys mirror the long CLI flag names with dashes as underscores.
EpisodeConfig config_from_json(std::string_view text, EpisodeConfig base = {});
std::string config_to_json(const EpisodeConfig& config);

struct Scenario {
  std::string name;
  GridMap map;
  MapSidecar sidecar;
  std::vector<CellId> stations;

  // Parses the map and applies the sidecar; stations become seed candidates.
  static Scenario from_text(std::string name, std::string_view map_text, std::string_view sidecar_text = {});
  // Reads `path` and, if present, the file next to it with extension .sidecar.
  static Scenario load(const std::string& path);
};

std::string sidecar_path_for(const std::string& map_path);

// Everything the observer may want about one completed step.
struct StepRecord {
  const WorldState& before;  // state the scheduler saw
  const GoalMap& goals;
  const PlanStep& plan;
  const std::vector<Task>& completed;
  double latency_ms;
};

class Simulation {
 public:
  Simulation(const Scenario& scenario, EpisodeConfig config);
  ~Simulation();

  // Runs one closed-loop step; returns false once the horizon is reached.
  bool step();
  void run();

  const WorldState& state() const { return *state_; }
  const Metrics& metrics() const { return metrics_; }
  const RegionPartition* partition() const { return partition_.get(); }
  const DistanceOracle& oracle() const { return *oracle_; }
  Scheduler& scheduler() { return *scheduler_; }

  void set_observer(std::function<void(const StepRecord&)> observer) { observer_ = std::move(observer); }

 private:
  void apply_goals(const GoalMap& goals);
  void check_safety(const GoalMap& goals, const std::vector<CellId>& next);
  void update_training_info();

  const Scenario& scenario_;
  EpisodeConfig config_;
  std::unique_ptr<DistanceOracle> oracle_;
  std::unique_ptr<RegionPartition> partition_;
  std::unique_ptr<FeatureExtractor> extractor_;
  ExternalGuidance* external_ = nullptr;
  std::unique_ptr<Scheduler> scheduler_;
  std::unique_ptr<WorldState> state_;
  std::vector<double> priorities_;
  Metrics metrics_;
  std::int64_t wait_total_ = 0;
  std::int64_t carry_total_ = 0;
  int last_completions_ = 0;
  std::function<void(const StepRecord&)> observer_;
};

Metrics run_episode(const Scenario& scenario, const EpisodeConfig& config);

// JSON document: config echo, scalar metrics, latency percentiles, dense
// row-major conflict heatmap, safety counters, optional per-step log.
std::string metrics_json(const EpisodeConfig& config, const Scenario& scenario, const Metrics& metrics);

std::string csv_header();
std::string csv_row(const EpisodeConfig& config, std::string_view map_name, const Metrics& metrics);

}  // namespace flowsched
