#include "flowsched/guidance.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "flowsched/error.hpp"

namespace flowsched {

Distribution uniform_distribution(int regions) {
  Distribution d;
  if (regions > 0) d.probs.assign(static_cast<std::size_t>(regions), 1.0 / regions);
  return d;
}

Distribution current_distribution(const WorldState& state, const RegionPartition& partition) {
  std::vector<double> counts(static_cast<std::size_t>(partition.num_regions()), 0.0);
  double total = 0.0;
  for (AgentId a : free_agents(state)) {
    const RegionId r = partition.region(state.positions[static_cast<std::size_t>(a)]);
    if (r == kNoRegion) continue;
    counts[static_cast<std::size_t>(r)] += 1.0;
    total += 1.0;
  }
  if (total == 0.0) throw Error(ErrorCode::NoFreeAgents, "no free agents at t=" + std::to_string(state.t));
  for (double& c : counts) c /= total;
  return {counts};
}

Distribution proportional_guidance(const WorldState& state, const RegionPartition& partition) {
  std::vector<double> counts(static_cast<std::size_t>(partition.num_regions()), 0.0);
  double total = 0.0;
  for (const FreeTask& task : free_tasks(state)) {
    const RegionId r = partition.region(task.cell);
    if (r == kNoRegion) continue;
    counts[static_cast<std::size_t>(r)] += 1.0;
    total += 1.0;
  }
  if (total == 0.0) return uniform_distribution(partition.num_regions());
  for (double& c : counts) c /= total;
  return {counts};
}

namespace {

// Path from `from` to `to` in the BFS tree rooted at `from`, each cell's
// parent being the lowest-id predecessor one layer closer.
std::vector<CellId> tree_path(const GridMap& map, const DistField& field, CellId to) {
  std::vector<CellId> path;
  if (!is_reachable(field.at(to))) return path;
  CellId v = to;
  path.push_back(v);
  while (v != field.source) {
    CellId parent = kNoCell;
    for (Direction d : kDirections) {
      const CellId u = map.in_neighbor(v, d);
      if (u == kNoCell || field.at(u) != field.at(v) - 1) continue;
      if (parent == kNoCell || u < parent) parent = u;
    }
    v = parent;
    path.push_back(v);
  }
  std::reverse(path.begin(), path.end());
  return path;
}

}  // namespace

FeatureExtractor::FeatureExtractor(const GridMap& map, const RegionPartition& partition,
                                   const DistanceOracle& oracle, int period)
    : map_(map), partition_(partition), oracle_(oracle), period_(period) {
  if (period < 1) throw Error(ErrorCode::ConfigError, "time period must be at least 1");
  std::vector<std::vector<std::size_t>> edges_from(static_cast<std::size_t>(partition.num_regions()));
  for (std::size_t e = 0; e < partition.nh_edges.size(); ++e) {
    edges_from[static_cast<std::size_t>(partition.nh_edges[e].first)].push_back(e);
  }
  corridors_.resize(partition.nh_edges.size());
  for (std::size_t i = 0; i < edges_from.size(); ++i) {
    if (edges_from[i].empty()) continue;
    const DistField field = dist_field(map, partition.seeds[i]);
    for (std::size_t e : edges_from[i]) {
      const auto j = static_cast<std::size_t>(partition.nh_edges[e].second);
      corridors_[e] = tree_path(map, field, partition.seeds[j]);
    }
  }
}

FeatureGraph FeatureExtractor::extract(const WorldState& state, const GoalMap& prev_goal_map) const {
  const auto n = static_cast<std::size_t>(partition_.num_regions());
  std::vector<double> agents(n, 0), free(n, 0), tasks(n, 0), free_task_count(n, 0), inflow(n, 0),
      outflow(n, 0);
  std::vector<char> occupied(static_cast<std::size_t>(map_.size()), 0);

  const std::vector<AgentId> free_ids = free_agents(state);
  std::vector<char> is_free_agent(static_cast<std::size_t>(state.num_agents()), 0);
  for (AgentId a : free_ids) is_free_agent[static_cast<std::size_t>(a)] = 1;

  int n_free = 0;
  for (AgentId a = 0; a < state.num_agents(); ++a) {
    const CellId pos = state.positions[static_cast<std::size_t>(a)];
    occupied[static_cast<std::size_t>(pos)] = 1;
    const RegionId r = partition_.region(pos);
    if (r == kNoRegion) continue;
    agents[static_cast<std::size_t>(r)] += 1;
    if (is_free_agent[static_cast<std::size_t>(a)]) {
      free[static_cast<std::size_t>(r)] += 1;
      ++n_free;
    }
    if (prev_goal_map.goals.size() == state.positions.size()) {
      const RegionId g = partition_.region(prev_goal_map.goals[static_cast<std::size_t>(a)].cell);
      if (g != kNoRegion && g != r) {
        inflow[static_cast<std::size_t>(g)] += 1;
        outflow[static_cast<std::size_t>(r)] += 1;
      }
    }
  }
  for (const auto& [id, task] : state.pool.open()) {
    const RegionId r = partition_.region(task.current_errand());
    if (r != kNoRegion) tasks[static_cast<std::size_t>(r)] += 1;
  }
  const std::vector<FreeTask> open_free = free_tasks(state);
  for (const FreeTask& task : open_free) {
    const RegionId r = partition_.region(task.cell);
    if (r != kNoRegion) free_task_count[static_cast<std::size_t>(r)] += 1;
  }

  FeatureGraph g;
  g.t = state.t;
  g.n_free = n_free;
  g.node_feats = Matrix<double>(n, kNodeFeatures, 0.0);
  const double per_free = n_free > 0 ? 1.0 / n_free : 0.0;
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  const double phase = kTwoPi * static_cast<double>(state.t % period_) / period_;
  for (std::size_t i = 0; i < n; ++i) {
    const double size = std::max(1, partition_.region_size[i]);
    const Coord seed = map_.coord(partition_.seeds[i]);
    const double ax = kTwoPi * seed.x / map_.width();
    const double ay = kTwoPi * seed.y / map_.height();
    const double row[kNodeFeatures] = {agents[i] / size,
                                       free[i] * per_free,
                                       tasks[i] / size,
                                       free_task_count[i] * per_free,
                                       std::clamp(1.0 - agents[i] / size, 0.0, 1.0),
                                       inflow[i] * per_free,
                                       outflow[i] * per_free,
                                       std::sin(ax),
                                       std::cos(ax),
                                       std::sin(ay),
                                       std::cos(ay),
                                       std::sin(phase),
                                       std::cos(phase)};
    for (std::size_t k = 0; k < kNodeFeatures; ++k) g.node_feats(i, k) = row[k];
  }

  // A free task counts towards (i, j) when the closest free agents all sit
  // in region i.
  Matrix<double> hint(n, n, 0.0);
  for (const FreeTask& task : open_free) {
    const RegionId j = partition_.region(task.cell);
    if (j == kNoRegion) continue;
    const auto& to_task = oracle_.field_to(task.cell);
    Dist best = kUnreachable;
    RegionId best_region = kNoRegion;
    bool shared = false;
    for (AgentId a : free_ids) {
      const CellId pos = state.positions[static_cast<std::size_t>(a)];
      const Dist d = to_task[static_cast<std::size_t>(pos)];
      if (!is_reachable(d)) continue;
      const RegionId r = partition_.region(pos);
      if (!is_reachable(best) || d < best) {
        best = d;
        best_region = r;
        shared = false;
      } else if (d == best && r != best_region) {
        shared = true;
      }
    }
    if (is_reachable(best) && !shared && best_region != kNoRegion) {
      hint(static_cast<std::size_t>(best_region), static_cast<std::size_t>(j)) += 1.0;
    }
  }

  g.edge_index = partition_.nh_edges;
  g.edge_feats = Matrix<double>(g.edge_index.size(), kEdgeFeatures, 0.0);
  for (std::size_t e = 0; e < g.edge_index.size(); ++e) {
    const auto i = static_cast<std::size_t>(g.edge_index[e].first);
    const auto j = static_cast<std::size_t>(g.edge_index[e].second);
    const double len = partition_.region_dist(i, j);
    double load = 0.0;
    for (CellId c : corridors_[e]) load += occupied[static_cast<std::size_t>(c)];
    if (!corridors_[e].empty()) load /= static_cast<double>(corridors_[e].size());
    g.edge_feats(e, 0) = len;
    g.edge_feats(e, 1) = 1.0 / (1.0 + len);
    g.edge_feats(e, 2) = hint(i, j) / std::max(1, partition_.region_size[j]);
    g.edge_feats(e, 3) = std::clamp(load, 0.0, 1.0);
  }
  return g;
}

}  // namespace flowsched
