#include "doctest.h"
#include "flowsched/baselines.hpp"
#include "helpers.hpp"

using namespace flowsched;
using namespace flowsched::testing;

namespace {

int task_goals(const GoalMap& g) {
  int n = 0;
  for (const Goal& goal : g.goals) n += goal.kind == GoalKind::Task;
  return n;
}

}  // namespace

TEST_SUITE("baselines") {
  TEST_CASE("greedy takes the nearest task in agent order") {
    const GridMap map = open_grid(9, 1);
    const DistanceOracle oracle(map);
    const WorldState s = state_with({2, 6}, {{3, 8}, {0, 8}});
    const GoalMap g = greedy_schedule(s, oracle);
    CHECK(g.goals[0] == Goal{3, GoalKind::Task, 0, kNoRegion});
    CHECK(g.goals[1] == Goal{0, GoalKind::Task, 1, kNoRegion});
    CHECK(assigned_distance(g, s, oracle) == 7);

    const GoalMap opt = gopt_schedule(s, oracle);
    CHECK(opt.goals[0].task == 1);
    CHECK(opt.goals[1].task == 0);
    CHECK(assigned_distance(opt, s, oracle) == 5);
  }

  TEST_CASE("greedy ties go to the lowest task id") {
    const GridMap map = open_grid(5, 1);
    const DistanceOracle oracle(map);
    const WorldState s = state_with({2}, {{3, 0}, {1, 4}});
    CHECK(greedy_schedule(s, oracle).goals[0].task == 0);
  }

  TEST_CASE("surplus agents stay put") {
    const GridMap map = open_grid(9, 1);
    const DistanceOracle oracle(map);
    const WorldState s = state_with({0, 4, 8}, {{5, 7}});
    const GoalMap opt = gopt_schedule(s, oracle);
    CHECK(opt.goals[1].task == 0);
    CHECK(opt.goals[0] == Goal{0, GoalKind::Stay, -1, kNoRegion});
    CHECK(opt.goals[2] == Goal{8, GoalKind::Stay, -1, kNoRegion});
    // Greedy serves agent 0 first even though agent 1 is closer.
    const GoalMap gr = greedy_schedule(s, oracle);
    CHECK(gr.goals[0].task == 0);
    CHECK(gr.goals[1] == Goal{4, GoalKind::Stay, -1, kNoRegion});
  }

  TEST_CASE("unreachable task is left unassigned") {
    const GridMap map = grid({"..@.."});
    const DistanceOracle oracle(map);
    const WorldState s = state_with({0}, {{4, 3}});
    CHECK(greedy_schedule(s, oracle).goals[0].kind == GoalKind::Stay);
    CHECK(gopt_schedule(s, oracle).goals[0].kind == GoalKind::Stay);
  }

  TEST_CASE("busy agents keep their errand") {
    const GridMap map = open_grid(9, 1);
    const DistanceOracle oracle(map);
    WorldState s = state_with({0, 8}, {{1, 5}, {7, 2}});
    give(s, 0, 0);
    s.pool.at(0).stage = TaskStage::ToDelivery;
    const GoalMap g = gopt_schedule(s, oracle);
    CHECK(g.goals[0] == Goal{5, GoalKind::Task, 0, kNoRegion});
    CHECK(g.goals[1].task == 1);
  }

  TEST_CASE("G-OPT matches brute force and never loses to greedy") {
    Rng rng(2024);
    for (int trial = 0; trial < 200; ++trial) {
      const GridMap map = random_connected_grid(rng, 8, 6, 0.2);
      const DistanceOracle oracle(map);
      const int agents = 1 + static_cast<int>(rng.uniform_index(6));
      const int tasks = 1 + static_cast<int>(rng.uniform_index(6));
      const WorldState s = random_state(rng, map, agents, tasks);
      std::vector<std::vector<Dist>> cost;
      const auto ft = free_tasks(s);
      for (AgentId a : free_agents(s)) {
        cost.emplace_back();
        for (const FreeTask& t : ft) cost.back().push_back(oracle.dist(s.positions[static_cast<std::size_t>(a)], t.cell));
      }
      const GoalMap opt = gopt_schedule(s, oracle);
      const GoalMap gr = greedy_schedule(s, oracle);
      CHECK(opt.injective());
      CHECK(gr.injective());
      CHECK(assigned_distance(opt, s, oracle) == matching_oracle(cost));
      CHECK(task_goals(opt) == task_goals(gr));
      CHECK(assigned_distance(opt, s, oracle) <= assigned_distance(gr, s, oracle));
    }
  }
}
