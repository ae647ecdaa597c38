#pragma once

#include <cstdint>
#include <vector>

#include "flowsched/grid_map.hpp"
#include "flowsched/matrix.hpp"

namespace flowsched {

// Probability vector over regions.
struct Distribution {
  std::vector<double> probs;

  std::size_t size() const { return probs.size(); }
  // Non-negative entries summing to one within `tol`.
  bool valid(double tol = 1e-6) const;
};

// Integer counts summing to `total`: floors of probs * total, with the
// remaining units handed out by largest fractional part, ties to the lowest
// index.
std::vector<int> round_distribution(const Distribution& dist, int total);

struct TransportInstance {
  std::vector<int> supplies;
  std::vector<int> demands;
  // costs(i, j) = region_dist(i, j); kUnreachable entries are not usable.
  Matrix<Dist> costs;
};

struct Flow {
  Matrix<int> y;
  std::int64_t cost = 0;

  bool operator==(const Flow&) const = default;
};

// Minimum-cost integral transport plan. Unbalanced when supply and demand
// totals differ; InfeasibleCost when some demand cannot be reached from the
// supplies. Only regions with positive supply or demand enter the network.
Flow solve_transport(const TransportInstance& instance);

}  // namespace flowsched
