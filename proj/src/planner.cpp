#include "flowsched/planner.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <numeric>

namespace flowsched {

std::vector<double> base_priorities(int agents) {
  std::vector<double> p(static_cast<std::size_t>(std::max(agents, 0)));
  for (int a = 0; a < agents; ++a) p[static_cast<std::size_t>(a)] = static_cast<double>(agents - a) / (agents + 1);
  return p;
}

namespace {

class Pibt {
 public:
  Pibt(const GridMap& map, const DistanceOracle& oracle, std::span<const CellId> positions, const GoalMap& goals)
      : map_(map),
        oracle_(oracle),
        pos_(positions),
        goals_(goals),
        next_(positions.size(), kNoCell),
        first_choice_(positions.size(), kNoCell),
        occupied_now_(static_cast<std::size_t>(map.size()), -1),
        occupied_next_(static_cast<std::size_t>(map.size()), -1) {
    for (std::size_t a = 0; a < pos_.size(); ++a) occupied_now_[static_cast<std::size_t>(pos_[a])] = static_cast<AgentId>(a);
  }

  bool plan(AgentId ai, AgentId aj) {
    const auto a = static_cast<std::size_t>(ai);
    const auto candidates = ordered_moves(ai);
    if (first_choice_[a] == kNoCell) first_choice_[a] = candidates.cells[0];
    for (std::size_t k = 0; k < candidates.count; ++k) {
      const CellId v = candidates.cells[k];
      if (occupied_next_[static_cast<std::size_t>(v)] != -1) continue;
      if (aj != -1 && v == pos_[static_cast<std::size_t>(aj)]) continue;
      occupied_next_[static_cast<std::size_t>(v)] = ai;
      next_[a] = v;
      const AgentId ak = occupied_now_[static_cast<std::size_t>(v)];
      if (ak != -1 && ak != ai && next_[static_cast<std::size_t>(ak)] == kNoCell) {
        if (!plan(ak, ai)) continue;
      }
      return true;
    }
    occupied_next_[static_cast<std::size_t>(pos_[a])] = ai;
    next_[a] = pos_[a];
    return false;
  }

  std::vector<CellId>& next() { return next_; }
  const std::vector<CellId>& first_choice() const { return first_choice_; }

 private:
  struct Moves {
    std::array<CellId, 5> cells{};
    std::size_t count = 0;
  };

  Moves ordered_moves(AgentId ai) const {
    const auto a = static_cast<std::size_t>(ai);
    const CellId here = pos_[a];
    const auto& to_goal = oracle_.field_to(goals_.goals[a].cell);
    auto key = [&](CellId c) {
      const Dist d = to_goal[static_cast<std::size_t>(c)];
      return is_reachable(d) ? d : std::numeric_limits<Dist>::max();
    };
    Moves m;
    std::array<std::pair<Dist, int>, 5> keyed{};
    for (Direction d : kDirections) {
      const CellId v = map_.neighbor(here, d);
      if (v == kNoCell) continue;
      keyed[m.count] = {key(v), static_cast<int>(d)};
      m.cells[m.count++] = v;
    }
    keyed[m.count] = {key(here), 4};
    m.cells[m.count++] = here;
    std::array<std::size_t, 5> idx{};
    std::iota(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(m.count), 0);
    std::sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(m.count),
              [&](std::size_t x, std::size_t y) { return keyed[x] < keyed[y]; });
    Moves sorted;
    sorted.count = m.count;
    for (std::size_t k = 0; k < m.count; ++k) sorted.cells[k] = m.cells[idx[k]];
    return sorted;
  }

  const GridMap& map_;
  const DistanceOracle& oracle_;
  std::span<const CellId> pos_;
  const GoalMap& goals_;
  std::vector<CellId> next_;
  std::vector<CellId> first_choice_;
  std::vector<AgentId> occupied_now_;
  std::vector<AgentId> occupied_next_;
};

}  // namespace

PlanStep plan_step(const GridMap& map, const DistanceOracle& oracle, std::span<const CellId> positions,
                   const GoalMap& goals, std::span<const double> priorities, Timestep t) {
  const std::size_t n = positions.size();
  PlanStep step;
  const std::vector<double> base = base_priorities(static_cast<int>(n));
  step.priorities.resize(n);
  for (std::size_t a = 0; a < n; ++a) {
    const double prev = a < priorities.size() ? priorities[a] : base[a];
    step.priorities[a] = positions[a] == goals.goals[a].cell ? base[a] : prev + 1.0;
  }
  std::vector<AgentId> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](AgentId x, AgentId y) {
    return step.priorities[static_cast<std::size_t>(x)] > step.priorities[static_cast<std::size_t>(y)];
  });

  Pibt pibt(map, oracle, positions, goals);
  for (AgentId a : order) {
    if (pibt.next()[static_cast<std::size_t>(a)] == kNoCell) pibt.plan(a, -1);
  }
  step.next_pos = std::move(pibt.next());
  for (std::size_t a = 0; a < n; ++a) {
    if (step.next_pos[a] != pibt.first_choice()[a]) {
      step.conflicts.push_back({static_cast<AgentId>(a), positions[a], t});
    }
  }
  return step;
}

}  // namespace flowsched
