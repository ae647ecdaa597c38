#pragma once

#include <string>
#include <utility>
#include <vector>

#include "flowsched/aggregation.hpp"
#include "flowsched/matrix.hpp"
#include "flowsched/rebalance.hpp"
#include "flowsched/world.hpp"

namespace flowsched {

// Free agents per region over the free-agent total. NoFreeAgents if none.
Distribution current_distribution(const WorldState& state, const RegionPartition& partition);

// Proportional to free tasks per region; uniform when there are none.
Distribution proportional_guidance(const WorldState& state, const RegionPartition& partition);

Distribution uniform_distribution(int regions);

inline constexpr int kNodeFeatures = 13;
inline constexpr int kEdgeFeatures = 4;

// Node columns: agents/|V_i|, free agents/N, tasks/|V_i|, free tasks/N,
// unoccupied fraction, inflow/N, outflow/N, sin/cos of seed x, sin/cos of
// seed y, sin/cos of the time phase. Edge columns: seed distance, its
// bounded reciprocal, demand-supply hint, corridor load.
struct FeatureGraph {
  Matrix<double> node_feats;
  Matrix<double> edge_feats;
  std::vector<std::pair<RegionId, RegionId>> edge_index;
  Timestep t = 0;
  int n_free = 0;
};

// Holds the per-edge corridor paths so extraction itself stays cheap.
class FeatureExtractor {
 public:
  FeatureExtractor(const GridMap& map, const RegionPartition& partition, const DistanceOracle& oracle,
                   int period = 1000);

  FeatureGraph extract(const WorldState& state, const GoalMap& prev_goal_map) const;

  const RegionPartition& partition() const { return partition_; }
  // Cells on the representative seed-to-seed path for each neighborhood edge.
  const std::vector<std::vector<CellId>>& corridors() const { return corridors_; }

 private:
  const GridMap& map_;
  const RegionPartition& partition_;
  const DistanceOracle& oracle_;
  int period_;
  std::vector<std::vector<CellId>> corridors_;
};

// Desired free-agent distribution for the flow scheduler.
class GuidancePolicy {
 public:
  virtual ~GuidancePolicy() = default;
  virtual std::string name() const = 0;
  virtual Distribution desired(const WorldState& state, const RegionPartition& partition) = 0;
  // Steps on which the policy had to fall back to proportional guidance.
  virtual int fallbacks() const { return 0; }
};

class ProportionalGuidance final : public GuidancePolicy {
 public:
  std::string name() const override { return "proportional"; }
  Distribution desired(const WorldState& state, const RegionPartition& partition) override {
    return proportional_guidance(state, partition);
  }
};

class UniformGuidance final : public GuidancePolicy {
 public:
  std::string name() const override { return "uniform"; }
  Distribution desired(const WorldState&, const RegionPartition& partition) override {
    return uniform_distribution(partition.num_regions());
  }
};

}  // namespace flowsched
