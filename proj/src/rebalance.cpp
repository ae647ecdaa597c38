#include "flowsched/rebalance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "flowsched/error.hpp"

namespace flowsched {

bool Distribution::valid(double tol) const {
  double sum = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0) || !std::isfinite(p)) return false;
    sum += p;
  }
  return std::abs(sum - 1.0) <= tol;
}

std::vector<int> round_distribution(const Distribution& dist, int total) {
  const std::size_t n = dist.size();
  std::vector<int> counts(n, 0);
  if (n == 0) return counts;
  std::vector<double> frac(n, 0.0);
  int assigned = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double scaled = std::max(0.0, dist.probs[i]) * total;
    counts[i] = static_cast<int>(std::floor(scaled));
    frac[i] = scaled - counts[i];
    assigned += counts[i];
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return frac[a] > frac[b]; });
  // Floating error can push the floor sum past the total; trim from the end.
  for (std::size_t k = 0; assigned > total; k = (k + 1) % n) {
    const std::size_t i = order[n - 1 - k];
    if (counts[i] > 0) {
      --counts[i];
      --assigned;
    }
  }
  for (std::size_t k = 0; assigned < total; k = (k + 1) % n) {
    ++counts[order[k]];
    ++assigned;
  }
  return counts;
}

namespace {

constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;

// Successive shortest paths on the bipartite residual graph. Left nodes are
// supply regions, right nodes demand regions; reverse arcs exist where flow
// is positive. Dijkstra is dense with Johnson potentials.
class SspSolver {
 public:
  SspSolver(std::vector<int> left, std::vector<int> right, std::vector<int> supply,
            std::vector<int> demand, const Matrix<Dist>& costs)
      : left_(std::move(left)),
        right_(std::move(right)),
        supply_(std::move(supply)),
        demand_(std::move(demand)),
        costs_(costs),
        flow_(left_.size(), right_.size(), 0),
        pot_(left_.size() + right_.size(), 0) {}

  void run() {
    const std::size_t k = left_.size();
    const std::size_t m = right_.size();
    const std::size_t n = k + m;
    std::vector<std::int64_t> dist(n);
    std::vector<std::int64_t> prev(n);
    std::vector<char> done(n);
    while (true) {
      std::fill(dist.begin(), dist.end(), kInf);
      std::fill(prev.begin(), prev.end(), -1);
      std::fill(done.begin(), done.end(), 0);
      bool any_supply = false;
      for (std::size_t a = 0; a < k; ++a) {
        if (supply_[a] > 0) {
          dist[a] = 0;
          any_supply = true;
        }
      }
      if (!any_supply) return;
      for (std::size_t step = 0; step < n; ++step) {
        std::size_t u = n;
        for (std::size_t v = 0; v < n; ++v) {
          if (!done[v] && dist[v] < kInf && (u == n || dist[v] < dist[u])) u = v;
        }
        if (u == n) break;
        done[u] = 1;
        if (u < k) {
          for (std::size_t b = 0; b < m; ++b) {
            const Dist c = cost(u, b);
            if (!is_reachable(c)) continue;
            const std::int64_t nd = dist[u] + c + pot_[u] - pot_[k + b];
            if (nd < dist[k + b]) {
              dist[k + b] = nd;
              prev[k + b] = static_cast<std::int64_t>(u);
            }
          }
        } else {
          const std::size_t b = u - k;
          for (std::size_t a = 0; a < k; ++a) {
            if (flow_(a, b) <= 0) continue;
            const std::int64_t nd = dist[u] - cost(a, b) + pot_[u] - pot_[a];
            if (nd < dist[a]) {
              dist[a] = nd;
              prev[a] = static_cast<std::int64_t>(u);
            }
          }
        }
      }
      std::size_t target = n;
      for (std::size_t b = 0; b < m; ++b) {
        if (demand_[b] > 0 && dist[k + b] < kInf && (target == n || dist[k + b] < dist[target])) {
          target = k + b;
        }
      }
      if (target == n) {
        throw_infeasible();
      }
      const std::int64_t reach = dist[target];
      for (std::size_t v = 0; v < n; ++v) pot_[v] += std::min(dist[v], reach);

      // Walk back to the source to find the bottleneck.
      int push = demand_[target - k];
      std::size_t v = target;
      while (true) {
        const auto p = static_cast<std::size_t>(prev[v]);
        if (v >= k) {
          // Forward arc p -> v; unbounded capacity.
        } else {
          push = std::min(push, flow_(v, p - k));
        }
        v = p;
        if (v < k && prev[v] < 0) break;
      }
      push = std::min(push, supply_[v]);
      supply_[v] -= push;
      demand_[target - k] -= push;
      v = target;
      while (true) {
        const auto p = static_cast<std::size_t>(prev[v]);
        if (v >= k) {
          flow_(p, v - k) += push;
        } else {
          flow_(v, p - k) -= push;
        }
        v = p;
        if (v < k && prev[v] < 0) break;
      }
    }
  }

  const Matrix<int>& flow() const { return flow_; }

 private:
  Dist cost(std::size_t a, std::size_t b) const {
    return costs_(static_cast<std::size_t>(left_[a]), static_cast<std::size_t>(right_[b]));
  }

  [[noreturn]] void throw_infeasible() const {
    int from = -1;
    int to = -1;
    for (std::size_t a = 0; a < left_.size() && from < 0; ++a) {
      if (supply_[a] > 0) from = left_[a];
    }
    for (std::size_t b = 0; b < right_.size() && to < 0; ++b) {
      if (demand_[b] > 0) to = right_[b];
    }
    throw Error(ErrorCode::InfeasibleCost, "remaining supply in region " + std::to_string(from) +
                                               " cannot reach demand in region " +
                                               std::to_string(to));
  }

  std::vector<int> left_;
  std::vector<int> right_;
  std::vector<int> supply_;
  std::vector<int> demand_;
  const Matrix<Dist>& costs_;
  Matrix<int> flow_;
  std::vector<std::int64_t> pot_;
};

}  // namespace

Flow solve_transport(const TransportInstance& instance) {
  const std::size_t n = instance.supplies.size();
  if (instance.demands.size() != n || instance.costs.rows() != n || instance.costs.cols() != n) {
    throw Error(ErrorCode::ConfigError, "transport instance dimensions disagree");
  }
  std::int64_t total_supply = 0;
  std::int64_t total_demand = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (instance.supplies[i] < 0 || instance.demands[i] < 0) {
      throw Error(ErrorCode::Unbalanced, "negative supply or demand at region " + std::to_string(i));
    }
    total_supply += instance.supplies[i];
    total_demand += instance.demands[i];
  }
  if (total_supply != total_demand) {
    throw Error(ErrorCode::Unbalanced, "supply " + std::to_string(total_supply) +
                                           " != demand " + std::to_string(total_demand));
  }

  std::vector<int> left, right, supply, demand;
  for (std::size_t i = 0; i < n; ++i) {
    if (instance.supplies[i] > 0) {
      left.push_back(static_cast<int>(i));
      supply.push_back(instance.supplies[i]);
    }
    if (instance.demands[i] > 0) {
      right.push_back(static_cast<int>(i));
      demand.push_back(instance.demands[i]);
    }
  }
  for (int j : right) {
    bool reachable = false;
    for (int i : left) {
      if (is_reachable(instance.costs(static_cast<std::size_t>(i), static_cast<std::size_t>(j)))) {
        reachable = true;
        break;
      }
    }
    if (!reachable) {
      throw Error(ErrorCode::InfeasibleCost,
                  "no supply region reaches demand in region " + std::to_string(j));
    }
  }

  SspSolver solver(left, right, supply, demand, instance.costs);
  solver.run();

  Flow result{Matrix<int>(n, n, 0), 0};
  for (std::size_t a = 0; a < left.size(); ++a) {
    for (std::size_t b = 0; b < right.size(); ++b) {
      const int y = solver.flow()(a, b);
      if (y == 0) continue;
      const auto i = static_cast<std::size_t>(left[a]);
      const auto j = static_cast<std::size_t>(right[b]);
      result.y(i, j) = y;
      result.cost += static_cast<std::int64_t>(y) * instance.costs(i, j);
    }
  }
  return result;
}

}  // namespace flowsched
