#include <set>

#include "doctest.h"
#include "flowsched/error.hpp"
#include "flowsched/fixtures.hpp"
#include "flowsched/tasking.hpp"
#include "helpers.hpp"

using namespace flowsched;

TEST_SUITE("tasking") {
  TEST_CASE("two free cells force the errand support") {
    const GridMap map = flowsched::testing::open_grid(3, 1);
    Rng rng(1);
    const std::vector<CellId> occupied = {1};
    for (const Task& t : generate_tasks(map, occupied, 50, rng)) {
      CHECK(((t.pickup == 0 && t.delivery == 2) || (t.pickup == 2 && t.delivery == 0)));
    }
  }

  TEST_CASE("count zero leaves the generator alone") {
    const GridMap map = flowsched::testing::open_grid(3, 3);
    Rng rng(3);
    const Rng before = rng;
    CHECK(generate_tasks(map, {}, 0, rng).empty());
    CHECK(rng == before);
  }

  TEST_CASE("saturated map") {
    const GridMap map = flowsched::testing::open_grid(2, 1);
    Rng rng(1);
    const std::vector<CellId> occupied = {0};
    CHECK_THROWS_AS(generate_tasks(map, occupied, 1, rng), Error);
  }

  TEST_CASE("same seed, same tasks") {
    const Scenario s = fixture_scenario("warehouse-small");
    Rng a(42), b(42);
    CHECK(generate_tasks(s.map, {}, 20, a) == generate_tasks(s.map, {}, 20, b));
  }

  TEST_CASE("errands avoid agents and are traversable and distinct") {
    const Scenario s = fixture_scenario("warehouse-small");
    Rng rng(4);
    const auto agents = flowsched::testing::sample_cells(rng, s.map, 30);
    TaskPool pool(40, 8);
    pool.refill(s.map, agents, 0);
    CHECK(pool.size() == 40);
    std::set<CellId> cells;
    for (const auto& [id, t] : pool.open()) {
      CHECK(s.map.traversable(t.pickup));
      CHECK(s.map.traversable(t.delivery));
      CHECK(t.pickup != t.delivery);
      CHECK(std::find(agents.begin(), agents.end(), t.pickup) == agents.end());
      cells.insert(t.pickup);
      cells.insert(t.delivery);
    }
    CHECK(cells.size() == 80);
  }

  TEST_CASE("stage transitions and constant pool size") {
    const GridMap map = flowsched::testing::open_grid(6, 6);
    TaskPool pool(5, 2);
    std::vector<CellId> agents = {0};
    pool.refill(map, agents, 0);
    Task& t = pool.at(0);
    t.agent = 0;
    t.stage = TaskStage::ToPickup;
    const CellId pickup = t.pickup;
    const CellId delivery = t.delivery;

    auto r0 = pool.advance({}, 1, map, agents);
    CHECK(r0.completed.empty());
    CHECK(pool.size() == 5);

    // Wrong agent and wrong cell are ignored.
    const std::vector<Arrival> wrong = {{1, pickup, 0}, {0, delivery, 0}};
    pool.advance(wrong, 2, map, agents);
    CHECK(pool.at(0).stage == TaskStage::ToPickup);

    agents = {pickup};
    const std::vector<Arrival> at_pickup = {{0, pickup, 0}};
    auto r1 = pool.advance(at_pickup, 3, map, agents);
    CHECK(r1.picked_up.size() == 1);
    CHECK(pool.at(0).stage == TaskStage::ToDelivery);
    CHECK(pool.at(0).t_pickup == 3);
    CHECK(pool.size() == 5);

    agents = {delivery};
    const std::vector<Arrival> at_delivery = {{0, delivery, 0}};
    const auto done = advance_tasks(pool, at_delivery, 7, map, agents);
    REQUIRE(done.size() == 1);
    CHECK(done[0].stage == TaskStage::Done);
    CHECK(done[0].t_done == 7);
    CHECK_FALSE(pool.contains(0));
    CHECK(pool.size() == 5);
    CHECK(pool.next_id() == 6);
  }

  TEST_CASE("pool size must be positive") { CHECK_THROWS_AS(TaskPool(0, 1), Error); }
}
