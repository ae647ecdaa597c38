#include "flowsched/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace flowsched {

double percentile(std::vector<double> samples, double q) {
  if (samples.empty()) return 0.0;
  std::sort(samples.begin(), samples.end());
  const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(samples.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, samples.size() - 1);
  return samples[lo] + (samples[hi] - samples[lo]) * (pos - static_cast<double>(lo));
}

LatencySummary summarize(std::vector<double> samples) {
  LatencySummary s;
  if (samples.empty()) return s;
  s.count = static_cast<int>(samples.size());
  s.mean = std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(samples.size());
  s.p50 = percentile(samples, 0.5);
  s.p90 = percentile(samples, 0.9);
  s.p99 = percentile(samples, 0.99);
  s.max = *std::max_element(samples.begin(), samples.end());
  return s;
}

bool Metrics::same_outcome(const Metrics& o) const {
  if (steps.size() != o.steps.size()) return false;
  for (std::size_t k = 0; k < steps.size(); ++k) {
    StepLog a = steps[k];
    StepLog b = o.steps[k];
    a.latency_ms = b.latency_ms = 0;
    if (!(a == b)) return false;
  }
  return throughput == o.throughput && time_to_task == o.time_to_task && time_in_task == o.time_in_task &&
         pickups == o.pickups && reassignments == o.reassignments && conflicts == o.conflicts && conflict_heatmap == o.conflict_heatmap &&
         latency_initial_ms.size() == o.latency_initial_ms.size() &&
         latency_lifelong_ms.size() == o.latency_lifelong_ms.size() &&
         guidance_fallbacks == o.guidance_fallbacks && safety == o.safety;
}

}  // namespace flowsched
