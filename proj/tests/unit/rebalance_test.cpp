#include <chrono>
#include <numeric>

#include "doctest.h"
#include "flowsched/error.hpp"
#include "flowsched/rebalance.hpp"
#include "helpers.hpp"

using namespace flowsched;
using namespace flowsched::testing;

namespace {

Matrix<Dist> square(std::initializer_list<std::initializer_list<Dist>> rows) {
  Matrix<Dist> m(rows.size(), rows.size());
  std::size_t i = 0;
  for (const auto& r : rows) {
    std::size_t j = 0;
    for (Dist v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

}  // namespace

TEST_SUITE("rebalance") {
  TEST_CASE("largest remainder rounding") {
    CHECK(round_distribution({{0.25, 0.25, 0.5}}, 10) == std::vector<int>{3, 2, 5});
    CHECK(round_distribution({{1.0, 0.0, 0.0}}, 7) == std::vector<int>{7, 0, 0});
    CHECK(round_distribution({{1.0 / 3, 1.0 / 3, 1.0 / 3}}, 2) == std::vector<int>{1, 1, 0});
    CHECK(round_distribution({{0.5, 0.5}}, 0) == std::vector<int>{0, 0});
  }

  TEST_CASE("rounding always sums to n and stays within one of the target") {
    Rng rng(17);
    for (int trial = 0; trial < 500; ++trial) {
      const std::size_t k = 1 + rng.uniform_index(8);
      Distribution d;
      double sum = 0;
      for (std::size_t i = 0; i < k; ++i) {
        d.probs.push_back(rng.uniform01());
        sum += d.probs.back();
      }
      for (double& p : d.probs) p /= sum;
      const int n = static_cast<int>(rng.uniform_index(40));
      const auto r = round_distribution(d, n);
      CHECK(std::accumulate(r.begin(), r.end(), 0) == n);
      for (std::size_t i = 0; i < k; ++i) CHECK(std::abs(r[i] - d.probs[i] * n) < 1.0 + 1e-9);
    }
  }

  TEST_CASE("transport examples") {
    const Flow a = solve_transport({{2, 0}, {0, 2}, square({{0, 3}, {3, 0}})});
    CHECK(a.y(0, 1) == 2);
    CHECK(a.cost == 6);

    const Flow b = solve_transport({{1, 1, 0}, {0, 0, 2}, square({{0, 1, 5}, {1, 0, 2}, {5, 2, 0}})});
    CHECK(b.y(0, 2) == 1);
    CHECK(b.y(1, 2) == 1);
    CHECK(b.cost == 7);

    const Flow c = solve_transport({{2, 1, 3}, {2, 1, 3}, square({{0, 4, 5}, {4, 0, 2}, {5, 2, 0}})});
    CHECK(c.cost == 0);
    CHECK(c.y(0, 0) == 2);
    CHECK(c.y(1, 1) == 1);
    CHECK(c.y(2, 2) == 3);
  }

  TEST_CASE("transport errors") {
    CHECK_THROWS_AS(solve_transport({{1, 0}, {0, 2}, square({{0, 1}, {1, 0}})}), Error);
    try {
      solve_transport({{1, 0}, {0, 1}, square({{0, kUnreachable}, {1, 0}})});
      FAIL("expected InfeasibleCost");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::InfeasibleCost);
    }
    // Unreachable pairs that are not needed are fine.
    const Flow f = solve_transport({{1, 1}, {1, 1}, square({{0, kUnreachable}, {kUnreachable, 0}})});
    CHECK(f.cost == 0);
  }

  TEST_CASE("transport matches exhaustive enumeration") {
    Rng rng(2024);
    for (int trial = 0; trial < 300; ++trial) {
      TransportInstance inst = random_transport(rng, 5, 8, 20);
      if (trial % 3 == 0) {
        const std::size_t n = inst.supplies.size();
        inst.costs(rng.uniform_index(n), rng.uniform_index(n)) = kUnreachable;
        for (std::size_t i = 0; i < n; ++i) inst.costs(i, i) = 0;
      }
      const std::int64_t want = transport_oracle(inst);
      if (want < 0) {
        CHECK_THROWS_AS(solve_transport(inst), Error);
        continue;
      }
      const Flow f = solve_transport(inst);
      CHECK(margins_hold(inst, f));
      CHECK(f.cost == want);
      CHECK(solve_transport(inst) == f);
    }
  }

  TEST_CASE("identity supplies give the diagonal") {
    Rng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
      TransportInstance inst = random_transport(rng, 6, 12, 20);
      inst.demands = inst.supplies;
      for (std::size_t i = 0; i < inst.supplies.size(); ++i)
        for (std::size_t j = 0; j < inst.supplies.size(); ++j)
          if (i != j) inst.costs(i, j) += 1;
      const Flow f = solve_transport(inst);
      CHECK(f.cost == 0);
      for (std::size_t i = 0; i < inst.supplies.size(); ++i) CHECK(f.y(i, i) == inst.supplies[i]);
    }
  }

  TEST_CASE("large instance stays fast") {
    Rng rng(8);
    const std::size_t n = 120;
    TransportInstance inst;
    inst.supplies.assign(n, 0);
    inst.demands.assign(n, 0);
    for (int u = 0; u < 200; ++u) {
      ++inst.supplies[rng.uniform_index(n)];
      ++inst.demands[rng.uniform_index(n)];
    }
    inst.costs = Matrix<Dist>(n, n, 0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) inst.costs(i, j) = static_cast<Dist>(1 + rng.uniform_index(80));
    const auto t0 = std::chrono::steady_clock::now();
    const Flow f = solve_transport(inst);
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    CHECK(margins_hold(inst, f));
    CHECK(ms < 100.0);
  }

  TEST_CASE("distribution validity") {
    CHECK(Distribution{{0.5, 0.5}}.valid());
    CHECK_FALSE(Distribution{{0.5, 0.6}}.valid());
    CHECK_FALSE(Distribution{{-0.1, 1.1}}.valid());
  }
}
