#pragma once

#include <chrono>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "flowsched/guidance.hpp"

namespace flowsched {

// Extra fields appended to each request when an external trainer drives the
// engine: tasks completed on the previous step and, per busy agent, the
// remaining distance to its current goal (-1 when unreachable).
struct TrainingInfo {
  int completions = 0;
  std::vector<std::pair<AgentId, Dist>> active;
};

// One JSON object per line: {"t", "n_free", "nodes", "edges"} plus the
// training fields when given.
std::string encode_request(const FeatureGraph& features, const TrainingInfo* training = nullptr);

// Accepts {"probs": [...]} or {"concentration": [...]} (normalized). Sums off
// by at most 1e-3 are renormalized; anything else is a ProtocolError.
Distribution decode_reply(std::string_view line, std::size_t regions);

// Child process speaking the line protocol over stdin/stdout.
class PolicyProcess {
 public:
  explicit PolicyProcess(const std::string& command);
  ~PolicyProcess();
  PolicyProcess(const PolicyProcess&) = delete;
  PolicyProcess& operator=(const PolicyProcess&) = delete;

  // Sends one line and waits for one reply line. Timeout when the deadline
  // passes, ProtocolError when the process is gone.
  std::string exchange(const std::string& line, std::chrono::milliseconds deadline);

 private:
  void discard_pending();

  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
  bool stale_ = false;
};

// Guidance served by an external process, falling back to proportional
// guidance on any protocol failure.
class ExternalGuidance final : public GuidancePolicy {
 public:
  ExternalGuidance(const std::string& command, const FeatureExtractor& extractor,
                   std::chrono::milliseconds deadline = std::chrono::milliseconds(200));

  std::string name() const override { return "external"; }
  Distribution desired(const WorldState& state, const RegionPartition& partition) override;
  int fallbacks() const override { return fallbacks_; }

  void set_training_info(std::optional<TrainingInfo> info) { training_ = std::move(info); }
  const std::string& last_error() const { return last_error_; }

 private:
  PolicyProcess process_;
  const FeatureExtractor& extractor_;
  std::chrono::milliseconds deadline_;
  std::optional<TrainingInfo> training_;
  int fallbacks_ = 0;
  std::string last_error_;
};

}  // namespace flowsched
