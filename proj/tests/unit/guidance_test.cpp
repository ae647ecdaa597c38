#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "doctest.h"
#include "flowsched/error.hpp"
#include "flowsched/guidance.hpp"
#include "flowsched/policy_client.hpp"
#include "helpers.hpp"
#include "json.hpp"

using namespace flowsched;
using namespace flowsched::testing;

namespace {

struct Corridor {
  GridMap map = open_grid(9, 1);
  std::vector<CellId> seeds{0, 8};
  RegionPartition part = build_partition(map, seeds);  // {0..4}, {5..8}
  DistanceOracle oracle{map};
};

std::string policy_cmd(const std::string& args) { return std::string(FAKE_POLICY_PATH) + " " + args; }

ErrorCode decode_error(const std::string& line, std::size_t n) {
  try {
    decode_reply(line, n);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::ConfigError;  // sentinel: no error raised
}

}  // namespace

TEST_SUITE("guidance") {
  TEST_CASE("current distribution counts free agents only") {
    Corridor c;
    WorldState s = state_with({1, 2, 6}, {{3, 7}});
    CHECK(current_distribution(s, c.part).probs == std::vector<double>{2.0 / 3, 1.0 / 3});
    s.reassign = false;
    give(s, 0, 0);
    CHECK(current_distribution(s, c.part).probs == std::vector<double>{0.5, 0.5});
    give(s, 1, 0);
    s.assignments[1] = 0;
    s.assignments[2] = 0;
    try {
      current_distribution(s, c.part);
      FAIL("expected NoFreeAgents");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NoFreeAgents);
    }
  }

  TEST_CASE("proportional guidance") {
    const GridMap map = open_grid(9, 1);
    const std::vector<CellId> seeds{0, 4, 8};
    const RegionPartition part = build_partition(map, seeds);  // {0,1,2}, {3..6}, {7,8}
    const WorldState s = state_with({0}, {{1, 6}, {2, 6}, {4, 3}, {8, 3}});
    const Distribution d = proportional_guidance(s, part);
    CHECK(d.valid());
    CHECK(d.probs == std::vector<double>{0.5, 0.25, 0.25});

    const WorldState none = state_with({0}, {});
    CHECK(proportional_guidance(WorldState(1, 1), build_partition(map, std::vector<CellId>{0, 8})).probs ==
          std::vector<double>{0.5, 0.5});
    CHECK(proportional_guidance(none, build_partition(map, std::vector<CellId>{4})).probs ==
          std::vector<double>{1.0});
  }

  TEST_CASE("proportional demand lands only where free tasks are") {
    Rng rng(5);
    const GridMap map = random_connected_grid(rng, 14, 10, 0.2);
    const RegionPartition part = build_partition(map, select_seeds(map, {}));
    for (int trial = 0; trial < 100; ++trial) {
      const WorldState s = random_state(rng, map, 1 + static_cast<int>(rng.uniform_index(6)), 8);
      const auto tasks = free_tasks(s);
      const int n = static_cast<int>(free_agents(s).size());
      if (n > static_cast<int>(tasks.size())) continue;
      const auto demand = round_distribution(proportional_guidance(s, part), n);
      std::vector<int> with_tasks(static_cast<std::size_t>(part.num_regions()), 0);
      for (const FreeTask& t : tasks) with_tasks[static_cast<std::size_t>(part.region(t.cell))] = 1;
      for (std::size_t r = 0; r < demand.size(); ++r) {
        if (demand[r] > 0) CHECK(with_tasks[r] == 1);
      }
    }
  }

  TEST_CASE("empty region features") {
    Corridor c;
    const FeatureExtractor fx(c.map, c.part, c.oracle);
    const WorldState s = state_with({1}, {{2, 3}});
    const FeatureGraph g = fx.extract(s, s.prev_goal_map);
    REQUIRE(g.node_feats.rows() == 2);
    REQUIRE(g.node_feats.cols() == kNodeFeatures);
    const double expected[7] = {0, 0, 0, 0, 1, 0, 0};
    for (std::size_t k = 0; k < 7; ++k) CHECK(g.node_feats(1, k) == expected[k]);
    // Region 0 holds the one agent and the one task.
    CHECK(g.node_feats(0, 0) == doctest::Approx(1.0 / 5));
    CHECK(g.node_feats(0, 1) == 1.0);
    CHECK(g.node_feats(0, 2) == doctest::Approx(1.0 / 5));
    CHECK(g.node_feats(0, 3) == 1.0);
    CHECK(g.node_feats(0, 4) == doctest::Approx(4.0 / 5));
    // Seed 8 of a width-9 map sits at angle 2*pi*8/9.
    CHECK(g.node_feats(1, 7) == doctest::Approx(std::sin(2 * M_PI * 8 / 9)));
    CHECK(g.node_feats(1, 8) == doctest::Approx(std::cos(2 * M_PI * 8 / 9)));
    CHECK(g.node_feats(1, 11) == doctest::Approx(0.0));
    CHECK(g.node_feats(1, 12) == doctest::Approx(1.0));
  }

  TEST_CASE("edge features") {
    const GridMap map = open_grid(5, 1);
    const std::vector<CellId> seeds{0, 4};
    const RegionPartition part = build_partition(map, seeds);
    const DistanceOracle oracle(map);
    const FeatureExtractor fx(map, part, oracle);
    REQUIRE(part.nh_edges.size() == 2);
    const WorldState s = state_with({1}, {{4, 2}});
    const FeatureGraph g = fx.extract(s, s.prev_goal_map);
    CHECK(g.edge_index == part.nh_edges);
    CHECK(g.edge_feats(0, 0) == 4);
    CHECK(g.edge_feats(0, 1) == doctest::Approx(0.2));
    // One free agent in region 0, one free task in region 1 of size 2.
    CHECK(g.edge_feats(0, 2) == doctest::Approx(0.5));
    CHECK(g.edge_feats(1, 2) == 0.0);
    // One agent on the five-cell corridor.
    CHECK(g.edge_feats(0, 3) == doctest::Approx(0.2));
    CHECK(fx.corridors()[0] == std::vector<CellId>{0, 1, 2, 3, 4});
  }

  TEST_CASE("hint matches a brute-force nearest-agent count") {
    Rng rng(31);
    for (int trial = 0; trial < 30; ++trial) {
      const GridMap map = random_connected_grid(rng, 12, 9, 0.2);
      const RegionPartition part = build_partition(map, select_seeds(map, {}));
      const DistanceOracle oracle(map);
      const FeatureExtractor fx(map, part, oracle);
      const WorldState s = random_state(rng, map, 4, 6);
      const FeatureGraph g = fx.extract(s, s.prev_goal_map);
      const auto agents = free_agents(s);
      for (std::size_t e = 0; e < g.edge_index.size(); ++e) {
        const auto [i, j] = g.edge_index[e];
        int count = 0;
        for (const FreeTask& t : free_tasks(s)) {
          if (part.region(t.cell) != j) continue;
          Dist best = std::numeric_limits<Dist>::max();
          for (AgentId a : agents) {
            const Dist d = oracle.dist(s.positions[static_cast<std::size_t>(a)], t.cell);
            if (is_reachable(d)) best = std::min(best, d);
          }
          bool inside = false, outside = false;
          for (AgentId a : agents) {
            const CellId p = s.positions[static_cast<std::size_t>(a)];
            if (oracle.dist(p, t.cell) != best) continue;
            (part.region(p) == i ? inside : outside) = true;
          }
          if (inside && !outside) ++count;
        }
        CHECK(g.edge_feats(e, 2) == doctest::Approx(static_cast<double>(count) / part.region_size[static_cast<std::size_t>(j)]));
      }
    }
  }

  TEST_CASE("flows follow the previous goal map") {
    Corridor c;
    const FeatureExtractor fx(c.map, c.part, c.oracle);
    WorldState s = state_with({1, 2}, {{3, 4}});
    GoalMap prev = GoalMap::stay_at(s.positions);
    prev.goals[0].cell = 7;
    const FeatureGraph g = fx.extract(s, prev);
    CHECK(g.node_feats(1, 5) == 0.5);  // inflow to region 1
    CHECK(g.node_feats(0, 6) == 0.5);  // outflow from region 0
    CHECK(g.node_feats(0, 5) == 0.0);
  }

  TEST_CASE("extraction is deterministic") {
    Rng rng(8);
    const GridMap map = random_connected_grid(rng, 16, 12, 0.25);
    const RegionPartition part = build_partition(map, select_seeds(map, {}));
    const DistanceOracle oracle(map);
    const FeatureExtractor fx(map, part, oracle);
    const WorldState s = random_state(rng, map, 10, 10);
    const FeatureGraph a = fx.extract(s, s.prev_goal_map);
    const FeatureGraph b = fx.extract(s, s.prev_goal_map);
    CHECK(a.node_feats.data() == b.node_feats.data());
    CHECK(a.edge_feats.data() == b.edge_feats.data());
  }

  TEST_CASE("request layout") {
    Corridor c;
    const FeatureExtractor fx(c.map, c.part, c.oracle);
    WorldState s = state_with({1, 6}, {{3, 4}});
    s.t = 17;
    const auto g = fx.extract(s, s.prev_goal_map);
    auto req = nlohmann::json::parse(encode_request(g));
    CHECK(req["t"] == 17);
    CHECK(req["n_free"] == 2);
    REQUIRE(req["nodes"].size() == 2);
    CHECK(req["nodes"][0].size() == kNodeFeatures);
    REQUIRE(req["edges"].size() == 2);
    CHECK(req["edges"][0].size() == 2 + kEdgeFeatures);
    CHECK(req["edges"][0][0] == 0);
    CHECK(req["edges"][0][1] == 1);
    CHECK_FALSE(req.contains("completions"));

    TrainingInfo info{3, {{0, 5}, {1, -1}}};
    req = nlohmann::json::parse(encode_request(g, &info));
    CHECK(req["completions"] == 3);
    CHECK(req["active"].size() == 2);
  }

  TEST_CASE("reply decoding") {
    CHECK(decode_reply(R"({"probs": [0.25, 0.75]})", 2).probs == std::vector<double>{0.25, 0.75});
    const Distribution d = decode_reply(R"({"probs": [0.2, 0.799]})", 2);
    CHECK(d.valid());
    CHECK(d.probs[0] == doctest::Approx(0.2 / 0.999));
    const Distribution conc = decode_reply(R"({"concentration": [1, 3]})", 2);
    CHECK(conc.probs == std::vector<double>{0.25, 0.75});
    CHECK(decode_error(R"({"probs": [-0.25, 1.25]})", 2) == ErrorCode::ProtocolError);
    CHECK(decode_error(R"({"probs": [0.5, 0.4]})", 2) == ErrorCode::ProtocolError);
    CHECK(decode_error(R"({"probs": [1.0]})", 2) == ErrorCode::ProtocolError);
    CHECK(decode_error(R"({"probs": ["a", 1]})", 2) == ErrorCode::ProtocolError);
    CHECK(decode_error("not json", 2) == ErrorCode::ProtocolError);
    CHECK(decode_error(R"({"concentration": [0, 0]})", 2) == ErrorCode::ProtocolError);
  }

  TEST_CASE("external guidance round trip") {
    Corridor c;
    const FeatureExtractor fx(c.map, c.part, c.oracle);
    ExternalGuidance ext(policy_cmd("uniform"), fx);
    const WorldState s = state_with({1}, {{3, 4}});
    CHECK(ext.desired(s, c.part).probs == std::vector<double>{0.5, 0.5});
    CHECK(ext.desired(s, c.part).probs == std::vector<double>{0.5, 0.5});
    CHECK(ext.fallbacks() == 0);
  }

  TEST_CASE("bad replies fall back to proportional guidance") {
    Corridor c;
    const FeatureExtractor fx(c.map, c.part, c.oracle);
    const WorldState s = state_with({1}, {{3, 4}});
    for (const char* reply : {"'{\"probs\": [-0.5, 1.5]}'", "garbage", "'{\"probs\": [1]}'"}) {
      ExternalGuidance ext(policy_cmd(std::string("raw ") + reply), fx);
      CHECK(ext.desired(s, c.part).probs == std::vector<double>{1.0, 0.0});
      CHECK(ext.fallbacks() == 1);
      CHECK_FALSE(ext.last_error().empty());
    }
    ExternalGuidance dead(policy_cmd("exit"), fx);
    CHECK(dead.desired(s, c.part).probs == std::vector<double>{1.0, 0.0});
    CHECK(dead.fallbacks() == 1);
  }

  TEST_CASE("slow replies time out and later replies resync") {
    Corridor c;
    const FeatureExtractor fx(c.map, c.part, c.oracle);
    const WorldState s = state_with({1}, {{3, 4}});
    ExternalGuidance ext(policy_cmd("sleep 150"), fx, std::chrono::milliseconds(50));
    CHECK(ext.desired(s, c.part).probs == std::vector<double>{1.0, 0.0});
    CHECK(ext.fallbacks() == 1);
    CHECK(ext.last_error().find("Timeout") != std::string::npos);

    ExternalGuidance patient(policy_cmd("sleep 20"), fx, std::chrono::milliseconds(2000));
    CHECK(patient.desired(s, c.part).probs == std::vector<double>{0.5, 0.5});
    CHECK(patient.fallbacks() == 0);
  }

  TEST_CASE("training fields reach the process") {
    Corridor c;
    const FeatureExtractor fx(c.map, c.part, c.oracle);
    const std::string path = "guidance_test_record.jsonl";
    std::remove(path.c_str());
    {
      ExternalGuidance ext(policy_cmd("record " + path), fx);
      ext.set_training_info(TrainingInfo{2, {{0, 4}}});
      const WorldState s = state_with({1}, {{3, 4}});
      ext.desired(s, c.part);
    }
    std::ifstream in(path);
    std::string line;
    REQUIRE(std::getline(in, line));
    const auto req = nlohmann::json::parse(line);
    CHECK(req["completions"] == 2);
    CHECK(req["active"] == nlohmann::json::parse("[[0, 4]]"));
    std::remove(path.c_str());
  }
}
