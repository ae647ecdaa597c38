#include "flowsched/local_match.hpp"

#include <algorithm>
#include <map>
#include <string>

#include "flowsched/assignment.hpp"
#include "flowsched/error.hpp"

namespace flowsched {

SchedulingSnapshot make_snapshot(const WorldState& state, const RegionPartition& partition) {
  const auto n = static_cast<std::size_t>(partition.num_regions());
  SchedulingSnapshot snap;
  snap.agents.resize(n);
  snap.tasks.resize(n);
  snap.supplies.assign(n, 0);
  for (AgentId a : free_agents(state)) {
    const RegionId r = partition.region(state.positions[static_cast<std::size_t>(a)]);
    if (r == kNoRegion) continue;
    snap.agents[static_cast<std::size_t>(r)].push_back(a);
    ++snap.supplies[static_cast<std::size_t>(r)];
    ++snap.n_free;
  }
  for (const FreeTask& task : free_tasks(state)) {
    const RegionId r = partition.region(task.cell);
    if (r == kNoRegion) continue;
    snap.tasks[static_cast<std::size_t>(r)].push_back(task);
    ++snap.n_tasks;
  }
  return snap;
}

int LocalProblem::artificial_tasks() const {
  return static_cast<int>(std::count_if(cols.begin(), cols.end(), [](const LocalCol& c) { return c.artificial; }));
}

int LocalProblem::real_agents() const {
  return static_cast<int>(std::count_if(rows.begin(), rows.end(), [](const LocalRow& r) { return !r.artificial; }));
}

LocalProblem build_region_problem(RegionId region, const Flow& flow, const SchedulingSnapshot& snap,
                                  const WorldState& state, const RegionPartition& partition,
                                  const DistanceOracle& oracle, CostOptions options) {
  const auto i = static_cast<std::size_t>(region);
  const auto n = static_cast<std::size_t>(partition.num_regions());
  const auto& agents = snap.agents[i];

  int out_total = 0;
  for (std::size_t j = 0; j < n; ++j) out_total += flow.y(i, j);
  if (out_total != static_cast<int>(agents.size())) {
    throw Error(ErrorCode::FlowMismatch, "region " + std::to_string(region) + " ships " +
                                             std::to_string(out_total) + " units but holds " +
                                             std::to_string(agents.size()) + " free agents");
  }

  LocalProblem p;
  p.region = region;
  for (AgentId a : agents) {
    p.rows.push_back({false, a, kNoRegion, 0, state.positions[static_cast<std::size_t>(a)]});
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (j == i) continue;
    for (int u = 0; u < flow.y(j, i); ++u) {
      p.rows.push_back({true, -1, static_cast<RegionId>(j), u, partition.seeds[j]});
    }
  }
  for (const FreeTask& t : snap.tasks[i]) p.cols.push_back({false, t.id, kNoRegion, 0, t.cell});
  for (std::size_t j = 0; j < n; ++j) {
    if (j == i) continue;
    for (int u = 0; u < flow.y(i, j); ++u) {
      p.cols.push_back({true, -1, static_cast<RegionId>(j), u, partition.seeds[j]});
    }
  }

  p.cost = Matrix<Dist>(p.rows.size(), p.cols.size(), kUnreachable);
  for (std::size_t r = 0; r < p.rows.size(); ++r) {
    for (std::size_t c = 0; c < p.cols.size(); ++c) {
      Dist d = oracle.dist(p.rows[r].cell, p.cols[c].cell);
      if (options.delivery_leg && !p.cols[c].artificial && is_reachable(d)) {
        const Task& task = state.pool.at(p.cols[c].task);
        const Dist leg = oracle.dist(task.pickup, task.delivery);
        d = is_reachable(leg) ? d + leg : kUnreachable;
      }
      p.cost(r, c) = d;
      if (p.rows[r].artificial && p.cols[c].artificial) {
        p.forbidden.emplace_back(static_cast<int>(r), static_cast<int>(c));
      }
    }
  }
  p.kappa = static_cast<int>(std::min(p.rows.size(), p.cols.size()));
  return p;
}

Matching solve_assignment(const LocalProblem& p) {
  const std::size_t rows = p.rows.size();
  const std::size_t cols = p.cols.size();
  if (p.artificial_tasks() > p.real_agents()) {
    throw Error(ErrorCode::Infeasible, "region " + std::to_string(p.region) + " has " +
                                           std::to_string(p.artificial_tasks()) +
                                           " outgoing placeholders but only " +
                                           std::to_string(p.real_agents()) + " real agents");
  }
  Matching m;
  if (rows == 0 || cols == 0) return m;

  std::int64_t prohibitive = 1;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      if (is_reachable(p.cost(r, c)) && !p.is_forbidden(static_cast<int>(r), static_cast<int>(c))) {
        prohibitive += p.cost(r, c);
      }
    }
  }
  const std::size_t n = std::max(rows, cols);
  Matrix<std::int64_t> padded(n, n, 0);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      if (r >= rows) {
        padded(r, c) = p.cols[c].artificial ? prohibitive : 0;
      } else if (p.is_forbidden(static_cast<int>(r), static_cast<int>(c)) || !is_reachable(p.cost(r, c))) {
        padded(r, c) = prohibitive;
      } else {
        padded(r, c) = p.cost(r, c);
      }
    }
  }

  const std::vector<int> assign = hungarian(padded);
  for (std::size_t r = 0; r < n; ++r) {
    const auto c = static_cast<std::size_t>(assign[r]);
    if (c >= cols) continue;
    if (r >= rows) {
      if (p.cols[c].artificial) {
        throw Error(ErrorCode::Infeasible, "region " + std::to_string(p.region) +
                                               ": outgoing placeholder left without a real agent");
      }
      continue;
    }
    if (p.is_forbidden(static_cast<int>(r), static_cast<int>(c))) {
      throw Error(ErrorCode::Infeasible,
                  "region " + std::to_string(p.region) + ": artificial agent matched to artificial task");
    }
    if (!is_reachable(p.cost(r, c))) {
      if (p.cols[c].artificial) {
        throw Error(ErrorCode::Infeasible, "region " + std::to_string(p.region) +
                                               ": no real agent can reach an outgoing placeholder");
      }
      continue;
    }
    m.pairs.emplace_back(static_cast<int>(r), static_cast<int>(c));
    m.cost += p.cost(r, c);
  }
  return m;
}

WaypointOrder::WaypointOrder(const GridMap& map, const RegionPartition& partition) {
  order_.resize(static_cast<std::size_t>(partition.num_regions()));
  for (RegionId r = 0; r < partition.num_regions(); ++r) {
    const DistField field = dist_field(map, partition.seeds[static_cast<std::size_t>(r)]);
    std::vector<CellId> cells;
    for (CellId c = 0; c < map.size(); ++c) {
      if (is_reachable(field.at(c))) cells.push_back(c);
    }
    // BFS order: by distance from the seed, then cell id.
    std::stable_sort(cells.begin(), cells.end(),
                     [&](CellId a, CellId b) { return field.at(a) < field.at(b); });
    auto& out = order_[static_cast<std::size_t>(r)];
    for (CellId c : cells) {
      if (partition.region(c) == r) out.push_back(c);
    }
    for (CellId c : cells) {
      if (partition.region(c) != r) out.push_back(c);
    }
  }
}

CellId WaypointOrder::next_free(RegionId r, const GoalMapBuilder& builder,
                                std::vector<std::size_t>& cursor) const {
  const auto& cells = order_[static_cast<std::size_t>(r)];
  std::size_t& k = cursor[static_cast<std::size_t>(r)];
  while (k < cells.size() && builder.used(cells[k])) ++k;
  return k < cells.size() ? cells[k] : kNoCell;
}

GoalMap recover_goal_map(std::span<const LocalProblem> problems, std::span<const Matching> matchings,
                         const Flow& flow, const WorldState& state, const RegionPartition& partition,
                         const DistanceOracle& oracle, const WaypointOrder& waypoints) {
  GoalMapBuilder builder(state);
  std::map<std::pair<RegionId, RegionId>, std::vector<AgentId>> outbound;
  std::map<std::pair<RegionId, RegionId>, std::vector<std::pair<TaskId, CellId>>> inbound;
  std::vector<std::pair<RegionId, AgentId>> waypoint_agents;

  for (std::size_t k = 0; k < problems.size(); ++k) {
    const LocalProblem& p = problems[k];
    std::vector<char> row_done(p.rows.size(), 0);
    for (const auto& [r, c] : matchings[k].pairs) {
      const LocalRow& row = p.rows[static_cast<std::size_t>(r)];
      const LocalCol& col = p.cols[static_cast<std::size_t>(c)];
      row_done[static_cast<std::size_t>(r)] = 1;
      if (!row.artificial && !col.artificial) {
        builder.assign_task(row.agent, col.task, col.cell);
      } else if (!row.artificial) {
        outbound[{p.region, col.to}].push_back(row.agent);
      } else {
        inbound[{row.from, p.region}].emplace_back(col.task, col.cell);
      }
    }
    for (std::size_t r = 0; r < p.rows.size(); ++r) {
      if (!p.rows[r].artificial && !row_done[r]) waypoint_agents.emplace_back(p.region, p.rows[r].agent);
    }
  }

  for (auto& [key, agents] : outbound) {
    const auto [i, j] = key;
    if (static_cast<int>(agents.size()) != flow.y(static_cast<std::size_t>(i), static_cast<std::size_t>(j))) {
      throw Error(ErrorCode::FlowMismatch, "placeholders from region " + std::to_string(i) + " to " +
                                               std::to_string(j) + " disagree with the flow");
    }
    const CellId seed_i = partition.seeds[static_cast<std::size_t>(i)];
    const CellId seed_j = partition.seeds[static_cast<std::size_t>(j)];
    auto dist_or_max = [](Dist d) { return is_reachable(d) ? static_cast<std::int64_t>(d) : INT64_MAX; };
    std::sort(agents.begin(), agents.end(), [&](AgentId a, AgentId b) {
      const auto da = dist_or_max(oracle.dist(state.positions[static_cast<std::size_t>(a)], seed_j));
      const auto db = dist_or_max(oracle.dist(state.positions[static_cast<std::size_t>(b)], seed_j));
      return da != db ? da < db : a < b;
    });
    auto& tasks = inbound[key];
    std::sort(tasks.begin(), tasks.end(), [&](const auto& a, const auto& b) {
      const auto da = dist_or_max(oracle.dist(seed_i, a.second));
      const auto db = dist_or_max(oracle.dist(seed_i, b.second));
      return da != db ? da < db : a.first < b.first;
    });
    for (std::size_t k = 0; k < agents.size(); ++k) {
      if (k < tasks.size()) {
        builder.assign_task(agents[k], tasks[k].first, tasks[k].second);
      } else {
        waypoint_agents.emplace_back(j, agents[k]);
      }
    }
  }

  std::sort(waypoint_agents.begin(), waypoint_agents.end());
  std::vector<std::size_t> cursor(waypoints.regions(), 0);
  for (const auto& [region, agent] : waypoint_agents) {
    const CellId cell = waypoints.next_free(region, builder, cursor);
    if (cell == kNoCell) {
      throw Error(ErrorCode::WaypointExhausted,
                  "no unused cell left for a waypoint towards region " + std::to_string(region));
    }
    builder.assign_waypoint(agent, cell, region);
  }
  return builder.finish(oracle.map());
}

}  // namespace flowsched
