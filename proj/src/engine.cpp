#include "flowsched/engine.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "flowsched/baselines.hpp"
#include "flowsched/error.hpp"
#include "flowsched/guidance.hpp"
#include "flowsched/pipeline.hpp"
#include "flowsched/policy_client.hpp"
#include "json.hpp"

namespace flowsched {

using nlohmann::json;

SchedulerKind parse_scheduler(std::string_view name) {
  if (name == "greedy") return SchedulerKind::Greedy;
  if (name == "gopt") return SchedulerKind::Gopt;
  if (name == "flow") return SchedulerKind::Flow;
  throw Error(ErrorCode::ConfigError, "unknown scheduler '" + std::string(name) + "' (greedy, gopt, flow)");
}

GuidanceKind parse_guidance(std::string_view name) {
  if (name == "proportional") return GuidanceKind::Proportional;
  if (name == "uniform") return GuidanceKind::Uniform;
  if (name == "external") return GuidanceKind::External;
  throw Error(ErrorCode::ConfigError,
              "unknown guidance '" + std::string(name) + "' (proportional, uniform, external)");
}

std::string_view to_string(SchedulerKind kind) {
  switch (kind) {
    case SchedulerKind::Greedy: return "greedy";
    case SchedulerKind::Gopt: return "gopt";
    case SchedulerKind::Flow: return "flow";
  }
  return "?";
}

std::string_view to_string(GuidanceKind kind) {
  switch (kind) {
    case GuidanceKind::Proportional: return "proportional";
    case GuidanceKind::Uniform: return "uniform";
    case GuidanceKind::External: return "external";
  }
  return "?";
}

void EpisodeConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::ConfigError, msg); };
  if (agents < 0) fail("--agents must be non-negative");
  if (tasks < 1) fail("--tasks must be at least 1");
  if (horizon < 0) fail("--horizon must be non-negative");
  if (guidance == GuidanceKind::External && external_cmd.empty()) {
    fail("--external-cmd is required with --guidance external");
  }
  if (external_timeout_ms < 1) fail("--external-timeout-ms must be positive");
  if (epsilon && *epsilon < 0) fail("--epsilon must be non-negative");
  if (period < 1) fail("--period must be at least 1");
  if (!(budget_ms > 0)) fail("--budget-ms must be positive");
}

EpisodeConfig config_from_json(std::string_view text, EpisodeConfig c) {
  const json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) throw Error(ErrorCode::ConfigError, "config is not a JSON object");
  try {
    for (const auto& [key, value] : doc.items()) {
      if (key == "map") c.map_path = value.get<std::string>();
      else if (key == "agents") c.agents = value.get<int>();
      else if (key == "tasks") c.tasks = value.get<int>();
      else if (key == "horizon") c.horizon = value.get<int>();
      else if (key == "scheduler") c.scheduler = parse_scheduler(value.get<std::string>());
      else if (key == "guidance") c.guidance = parse_guidance(value.get<std::string>());
      else if (key == "external_cmd") c.external_cmd = value.get<std::string>();
      else if (key == "external_timeout_ms") c.external_timeout_ms = value.get<int>();
      else if (key == "epsilon") c.epsilon = value.is_null() ? std::nullopt : std::optional<Dist>(value.get<Dist>());
      else if (key == "seed") c.seed = value.get<std::uint64_t>();
      else if (key == "no_reassign") c.reassign = !value.get<bool>();
      else if (key == "period") c.period = value.get<int>();
      else if (key == "delivery_leg") c.delivery_leg = value.get<bool>();
      else if (key == "parallel_regions") c.parallel_regions = value.get<bool>();
      else if (key == "step_log") c.step_log = value.get<bool>();
      else if (key == "training_mode") c.training_mode = value.get<bool>();
      else if (key == "budget_ms") c.budget_ms = value.get<double>();
      else throw Error(ErrorCode::ConfigError, "unknown config key '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigError, std::string("bad config value: ") + e.what());
  }
  return c;
}

namespace {

json config_doc(const EpisodeConfig& c) {
  return {{"map", c.map_path},
          {"agents", c.agents},
          {"tasks", c.tasks},
          {"horizon", c.horizon},
          {"scheduler", to_string(c.scheduler)},
          {"guidance", to_string(c.guidance)},
          {"external_cmd", c.external_cmd},
          {"external_timeout_ms", c.external_timeout_ms},
          {"epsilon", c.epsilon ? json(*c.epsilon) : json(nullptr)},
          {"seed", c.seed},
          {"no_reassign", !c.reassign},
          {"period", c.period},
          {"delivery_leg", c.delivery_leg},
          {"parallel_regions", c.parallel_regions},
          {"step_log", c.step_log},
          {"training_mode", c.training_mode},
          {"budget_ms", c.budget_ms}};
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::string config_to_json(const EpisodeConfig& config) { return config_doc(config).dump(2); }

Scenario Scenario::from_text(std::string name, std::string_view map_text, std::string_view sidecar_text) {
  GridMap map = parse_map(map_text);
  MapSidecar sidecar = parse_sidecar(sidecar_text);
  apply_sidecar(map, sidecar);
  std::vector<CellId> stations = station_cells(map, sidecar.stations);
  return Scenario{std::move(name), std::move(map), std::move(sidecar), std::move(stations)};
}

std::string sidecar_path_for(const std::string& map_path) {
  return std::filesystem::path(map_path).replace_extension(".sidecar").string();
}

Scenario Scenario::load(const std::string& path) {
  const std::string sidecar = sidecar_path_for(path);
  const std::string sidecar_text = std::filesystem::exists(sidecar) ? read_file(sidecar) : std::string();
  return from_text(std::filesystem::path(path).stem().string(), read_file(path), sidecar_text);
}

Simulation::Simulation(const Scenario& scenario, EpisodeConfig config)
    : scenario_(scenario), config_(std::move(config)) {
  config_.validate();
  const GridMap& map = scenario.map;
  if (config_.agents > map.traversable_count()) {
    throw Error(ErrorCode::ConfigError, std::to_string(config_.agents) + " agents do not fit on " +
                                            std::to_string(map.traversable_count()) + " traversable cells");
  }
  oracle_ = std::make_unique<DistanceOracle>(map);

  switch (config_.scheduler) {
    case SchedulerKind::Greedy:
      scheduler_ = std::make_unique<GreedyScheduler>(*oracle_);
      break;
    case SchedulerKind::Gopt:
      scheduler_ = std::make_unique<GoptScheduler>(*oracle_);
      break;
    case SchedulerKind::Flow: {
      partition_ = std::make_unique<RegionPartition>(
          build_partition(map, select_seeds(map, scenario.stations), config_.epsilon));
      std::unique_ptr<GuidancePolicy> guidance;
      switch (config_.guidance) {
        case GuidanceKind::Proportional: guidance = std::make_unique<ProportionalGuidance>(); break;
        case GuidanceKind::Uniform: guidance = std::make_unique<UniformGuidance>(); break;
        case GuidanceKind::External: {
          extractor_ = std::make_unique<FeatureExtractor>(map, *partition_, *oracle_, config_.period);
          auto external = std::make_unique<ExternalGuidance>(
              config_.external_cmd, *extractor_, std::chrono::milliseconds(config_.external_timeout_ms));
          external_ = external.get();
          guidance = std::move(external);
          break;
        }
      }
      FlowOptions options;
      options.cost.delivery_leg = config_.delivery_leg;
      options.parallel_regions = config_.parallel_regions;
      scheduler_ = std::make_unique<FlowScheduler>(*partition_, *oracle_, std::move(guidance), options);
      break;
    }
  }

  Rng init(config_.seed);
  std::vector<CellId> cells = map.traversable_cells();
  const auto n = static_cast<std::size_t>(config_.agents);
  for (std::size_t k = 0; k < n; ++k) {
    std::swap(cells[k], cells[k + init.uniform_index(cells.size() - k)]);
  }
  state_ = std::make_unique<WorldState>(config_.tasks, init.next());
  state_->reassign = config_.reassign;
  state_->positions.assign(cells.begin(), cells.begin() + static_cast<std::ptrdiff_t>(n));
  state_->assignments.assign(n, std::nullopt);
  state_->prev_goal_map = GoalMap::stay_at(state_->positions);
  state_->pool.refill(map, state_->positions, 0);
  priorities_ = base_priorities(config_.agents);

  metrics_.width = map.width();
  metrics_.height = map.height();
  metrics_.conflict_heatmap.assign(static_cast<std::size_t>(map.size()), 0);
}

Simulation::~Simulation() = default;

void Simulation::update_training_info() {
  TrainingInfo info;
  info.completions = last_completions_;
  const WorldState& s = *state_;
  for (AgentId a = 0; a < s.num_agents(); ++a) {
    const auto& assigned = s.assignments[static_cast<std::size_t>(a)];
    if (!assigned) continue;
    const Task& task = s.pool.at(*assigned);
    const CellId pos = s.positions[static_cast<std::size_t>(a)];
    Dist d = oracle_->dist(pos, task.current_errand());
    if (task.stage == TaskStage::ToPickup && is_reachable(d)) {
      const Dist leg = oracle_->dist(task.pickup, task.delivery);
      d = is_reachable(leg) ? d + leg : kUnreachable;
    }
    info.active.emplace_back(a, d);
  }
  external_->set_training_info(std::move(info));
}

void Simulation::apply_goals(const GoalMap& goals) {
  WorldState& s = *state_;
  const std::vector<AgentId> free = free_agents(s);
  for (AgentId a : free) {
    auto& assigned = s.assignments[static_cast<std::size_t>(a)];
    const Goal& g = goals.goals[static_cast<std::size_t>(a)];
    if (assigned && !(g.kind == GoalKind::Task && g.task == *assigned)) {
      s.pool.at(*assigned).agent.reset();
      assigned.reset();
      ++metrics_.reassignments;
    }
  }
  for (AgentId a : free) {
    auto& assigned = s.assignments[static_cast<std::size_t>(a)];
    const Goal& g = goals.goals[static_cast<std::size_t>(a)];
    if (g.kind != GoalKind::Task || assigned) continue;
    Task& task = s.pool.at(g.task);
    if (task.agent) throw Error(ErrorCode::Infeasible, "task " + std::to_string(g.task) + " given to two agents");
    task.agent = a;
    task.stage = TaskStage::ToPickup;
    task.t_assigned = s.t;
    assigned = g.task;
  }
}

void Simulation::check_safety(const GoalMap& goals, const std::vector<CellId>& next) {
  SafetyCounters& safety = metrics_.safety;
  const WorldState& s = *state_;
  if (!goals.injective()) ++safety.non_injective_steps;
  if (goals.goals.size() != s.positions.size()) {
    safety.free_without_goal += static_cast<std::int64_t>(free_agents(s).size());
  } else {
    for (AgentId a : free_agents(s)) {
      if (!scenario_.map.traversable(goals.goals[static_cast<std::size_t>(a)].cell)) ++safety.free_without_goal;
    }
  }
  std::vector<AgentId> at(static_cast<std::size_t>(scenario_.map.size()), -1);
  for (std::size_t a = 0; a < next.size(); ++a) {
    if (!scenario_.map.has_edge(s.positions[a], next[a])) ++safety.invalid_moves;
    auto& slot = at[static_cast<std::size_t>(next[a])];
    if (slot != -1) ++safety.vertex_collisions;
    slot = static_cast<AgentId>(a);
  }
  std::vector<AgentId> now(static_cast<std::size_t>(scenario_.map.size()), -1);
  for (std::size_t a = 0; a < next.size(); ++a) now[static_cast<std::size_t>(s.positions[a])] = static_cast<AgentId>(a);
  for (std::size_t a = 0; a < next.size(); ++a) {
    if (next[a] == s.positions[a]) continue;
    const AgentId b = now[static_cast<std::size_t>(next[a])];
    if (b != -1 && static_cast<std::size_t>(b) > a && next[static_cast<std::size_t>(b)] == s.positions[a]) {
      ++safety.swap_collisions;
    }
  }
}

bool Simulation::step() {
  WorldState& s = *state_;
  if (s.t >= config_.horizon) return false;
  const GridMap& map = scenario_.map;
  if (external_ && config_.training_mode) update_training_info();

  const auto t0 = std::chrono::steady_clock::now();
  const GoalMap goals = scheduler_->schedule(s);
  const auto t1 = std::chrono::steady_clock::now();
  const double sched_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  (s.t == 0 ? metrics_.latency_initial_ms : metrics_.latency_lifelong_ms).push_back(sched_ms);

  std::optional<WorldState> before;
  if (observer_) before.emplace(s);
  StepLog log;
  log.t = s.t;
  log.latency_ms = sched_ms;
  if (config_.step_log) {
    const std::vector<AgentId> free = free_agents(s);
    log.free_agents = static_cast<int>(free.size());
    log.free_tasks = static_cast<int>(free_tasks(s).size());
    for (AgentId a : free) log.assigned += goals.goals[static_cast<std::size_t>(a)].kind == GoalKind::Task;
    log.assigned_distance = assigned_distance(goals, s, *oracle_);
  }

  const auto t2 = std::chrono::steady_clock::now();
  PlanStep plan = plan_step(map, *oracle_, s.positions, goals, priorities_, s.t);
  const auto t3 = std::chrono::steady_clock::now();
  const double plan_ms = std::chrono::duration<double, std::milli>(t3 - t2).count();
  if (sched_ms + plan_ms > config_.budget_ms) ++metrics_.budget_overruns;

  check_safety(goals, plan.next_pos);
  apply_goals(goals);
  metrics_.conflicts += static_cast<std::int64_t>(plan.conflicts.size());
  for (const ConflictEvent& e : plan.conflicts) ++metrics_.conflict_heatmap[static_cast<std::size_t>(e.cell)];

  s.positions = plan.next_pos;
  priorities_ = plan.priorities;
  std::vector<Arrival> arrivals;
  for (AgentId a = 0; a < s.num_agents(); ++a) {
    const auto& assigned = s.assignments[static_cast<std::size_t>(a)];
    if (!assigned) continue;
    const CellId pos = s.positions[static_cast<std::size_t>(a)];
    if (s.pool.at(*assigned).current_errand() == pos) arrivals.push_back({a, pos, *assigned});
  }
  const Timestep t_next = s.t + 1;
  const AdvanceResult advanced = s.pool.advance(arrivals, t_next, map, s.positions);
  for (const Task& task : advanced.picked_up) {
    ++metrics_.pickups;
    wait_total_ += task.t_pickup - task.t_assigned;
  }
  for (const Task& task : advanced.completed) {
    ++metrics_.throughput;
    carry_total_ += task.t_done - task.t_pickup;
    s.assignments[static_cast<std::size_t>(*task.agent)].reset();
  }
  last_completions_ = static_cast<int>(advanced.completed.size());
  if (s.pool.size() != s.pool.capacity()) ++metrics_.safety.pool_size_violations;
  metrics_.time_to_task = metrics_.pickups ? static_cast<double>(wait_total_) / metrics_.pickups : 0.0;
  metrics_.time_in_task = metrics_.throughput ? static_cast<double>(carry_total_) / metrics_.throughput : 0.0;
  metrics_.guidance_fallbacks = scheduler_->guidance_fallbacks();

  if (config_.step_log) {
    log.conflicts = static_cast<int>(plan.conflicts.size());
    log.completed = last_completions_;
    metrics_.steps.push_back(log);
  }
  if (observer_) observer_(StepRecord{*before, goals, plan, advanced.completed, sched_ms});

  s.prev_goal_map = goals;
  s.t = t_next;
  return true;
}

void Simulation::run() {
  while (step()) {
  }
}

Metrics run_episode(const Scenario& scenario, const EpisodeConfig& config) {
  Simulation sim(scenario, config);
  sim.run();
  return sim.metrics();
}

namespace {

json latency_doc(const std::vector<double>& samples) {
  const LatencySummary s = summarize(samples);
  return {{"count", s.count}, {"mean", s.mean}, {"p50", s.p50}, {"p90", s.p90}, {"p99", s.p99}, {"max", s.max}};
}

}  // namespace

std::string metrics_json(const EpisodeConfig& config, const Scenario& scenario, const Metrics& m) {
  json doc;
  doc["config"] = config_doc(config);
  doc["map"] = {{"name", scenario.name},
                {"width", scenario.map.width()},
                {"height", scenario.map.height()},
                {"traversable", scenario.map.traversable_count()}};
  doc["throughput"] = m.throughput;
  doc["pickups"] = m.pickups;
  doc["reassignments"] = m.reassignments;
  doc["time_to_task"] = m.time_to_task;
  doc["time_in_task"] = m.time_in_task;
  doc["conflicts"] = m.conflicts;
  doc["conflict_definition"] = "deviation from the planner's first-choice move";
  doc["conflict_heatmap"] = {{"width", m.width}, {"height", m.height}, {"counts", m.conflict_heatmap}};
  doc["latency_ms"] = {{"initial", latency_doc(m.latency_initial_ms)},
                       {"lifelong", latency_doc(m.latency_lifelong_ms)}};
  doc["budget_ms"] = config.budget_ms;
  doc["budget_overruns"] = m.budget_overruns;
  doc["guidance_fallbacks"] = m.guidance_fallbacks;
  doc["safety"] = {{"vertex_collisions", m.safety.vertex_collisions},
                   {"swap_collisions", m.safety.swap_collisions},
                   {"invalid_moves", m.safety.invalid_moves},
                   {"non_injective_steps", m.safety.non_injective_steps},
                   {"pool_size_violations", m.safety.pool_size_violations},
                   {"free_without_goal", m.safety.free_without_goal}};
  if (!m.steps.empty()) {
    json steps = json::array();
    for (const StepLog& s : m.steps) {
      steps.push_back({{"t", s.t},
                       {"free_agents", s.free_agents},
                       {"free_tasks", s.free_tasks},
                       {"assigned", s.assigned},
                       {"assigned_distance", s.assigned_distance},
                       {"conflicts", s.conflicts},
                       {"completed", s.completed},
                       {"latency_ms", s.latency_ms}});
    }
    doc["steps"] = std::move(steps);
  }
  return doc.dump(2);
}

std::string csv_header() {
  return "map,scheduler,guidance,agents,tasks,horizon,seed,reassign,throughput,time_to_task,time_in_task,"
         "conflicts,latency_initial_ms,latency_p50_ms,latency_p90_ms,latency_max_ms,budget_overruns,"
         "guidance_fallbacks,safety_clean";
}

std::string csv_row(const EpisodeConfig& c, std::string_view map_name, const Metrics& m) {
  const LatencySummary initial = summarize(m.latency_initial_ms);
  const LatencySummary life = summarize(m.latency_lifelong_ms);
  std::ostringstream out;
  out << map_name << ',' << to_string(c.scheduler) << ',' << to_string(c.guidance) << ',' << c.agents << ','
      << c.tasks << ',' << c.horizon << ',' << c.seed << ',' << (c.reassign ? 1 : 0) << ',' << m.throughput << ','
      << m.time_to_task << ',' << m.time_in_task << ',' << m.conflicts << ',' << initial.max << ',' << life.p50
      << ',' << life.p90 << ',' << life.max << ',' << m.budget_overruns << ',' << m.guidance_fallbacks << ','
      << (m.safety.clean() ? 1 : 0);
  return out.str();
}

}  // namespace flowsched
