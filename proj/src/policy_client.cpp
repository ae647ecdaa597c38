#include "flowsched/policy_client.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <cstring>
#include <iostream>
#include "json.hpp"

#include "flowsched/error.hpp"

namespace flowsched {

using nlohmann::json;

std::string encode_request(const FeatureGraph& features, const TrainingInfo* training) {
  json nodes = json::array();
  for (std::size_t i = 0; i < features.node_feats.rows(); ++i) {
    json row = json::array();
    for (std::size_t k = 0; k < features.node_feats.cols(); ++k) row.push_back(features.node_feats(i, k));
    nodes.push_back(std::move(row));
  }
  json edges = json::array();
  for (std::size_t e = 0; e < features.edge_index.size(); ++e) {
    json row = json::array({features.edge_index[e].first, features.edge_index[e].second});
    for (std::size_t k = 0; k < features.edge_feats.cols(); ++k) row.push_back(features.edge_feats(e, k));
    edges.push_back(std::move(row));
  }
  json request = {{"t", features.t}, {"n_free", features.n_free}, {"nodes", std::move(nodes)},
                  {"edges", std::move(edges)}};
  if (training) {
    json active = json::array();
    for (const auto& [agent, d] : training->active) active.push_back(json::array({agent, d}));
    request["completions"] = training->completions;
    request["active"] = std::move(active);
  }
  return request.dump();
}

Distribution decode_reply(std::string_view line, std::size_t regions) {
  constexpr double kSumTolerance = 1e-3;
  json reply = json::parse(line, nullptr, false);
  if (reply.is_discarded() || !reply.is_object()) {
    throw Error(ErrorCode::ProtocolError, "reply is not a JSON object");
  }
  const bool concentration = !reply.contains("probs") && reply.contains("concentration");
  const json& values = concentration ? reply["concentration"] : reply.value("probs", json());
  if (!values.is_array() || values.size() != regions) {
    throw Error(ErrorCode::ProtocolError,
                "expected an array of " + std::to_string(regions) + " probabilities");
  }
  Distribution d;
  double sum = 0.0;
  for (const json& v : values) {
    if (!v.is_number()) throw Error(ErrorCode::ProtocolError, "non-numeric probability");
    const double p = v.get<double>();
    if (!std::isfinite(p) || p < 0.0) throw Error(ErrorCode::ProtocolError, "negative or non-finite entry");
    d.probs.push_back(p);
    sum += p;
  }
  if (concentration) {
    if (!(sum > 0.0)) throw Error(ErrorCode::ProtocolError, "concentration sums to zero");
  } else if (std::abs(sum - 1.0) > kSumTolerance) {
    throw Error(ErrorCode::ProtocolError, "probabilities sum to " + std::to_string(sum));
  }
  for (double& p : d.probs) p /= sum;
  return d;
}

PolicyProcess::PolicyProcess(const std::string& command) {
  // Writes to a dead child must surface as EPIPE, not kill the engine.
  ::signal(SIGPIPE, SIG_IGN);
  int in_pipe[2];
  int out_pipe[2];
  if (::pipe2(in_pipe, O_CLOEXEC) != 0 || ::pipe2(out_pipe, O_CLOEXEC) != 0) {
    throw Error(ErrorCode::ProtocolError, std::string("pipe: ") + std::strerror(errno));
  }
  pid_ = ::fork();
  if (pid_ < 0) throw Error(ErrorCode::ProtocolError, std::string("fork: ") + std::strerror(errno));
  if (pid_ == 0) {
    ::dup2(in_pipe[0], STDIN_FILENO);
    ::dup2(out_pipe[1], STDOUT_FILENO);
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
}

PolicyProcess::~PolicyProcess() {
  if (to_child_ >= 0) ::close(to_child_);
  if (from_child_ >= 0) ::close(from_child_);
  if (pid_ > 0) {
    int status = 0;
    if (::waitpid(pid_, &status, WNOHANG) == 0) {
      ::kill(pid_, SIGTERM);
      ::waitpid(pid_, &status, 0);
    }
  }
}

void PolicyProcess::discard_pending() {
  // A reply that missed its deadline may still be in flight; drop whatever
  // has arrived so it is not taken as the answer to the next request.
  buffer_.clear();
  char chunk[4096];
  pollfd pfd{from_child_, POLLIN, 0};
  while (::poll(&pfd, 1, 0) > 0 && (pfd.revents & POLLIN)) {
    const ssize_t got = ::read(from_child_, chunk, sizeof(chunk));
    if (got <= 0) break;
  }
  stale_ = false;
}

std::string PolicyProcess::exchange(const std::string& line, std::chrono::milliseconds deadline) {
  if (stale_) discard_pending();
  const std::string payload = line + "\n";
  std::size_t sent = 0;
  while (sent < payload.size()) {
    const ssize_t n = ::write(to_child_, payload.data() + sent, payload.size() - sent);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw Error(ErrorCode::ProtocolError, std::string("policy process write: ") + std::strerror(errno));
    }
    sent += static_cast<std::size_t>(n);
  }

  const auto until = std::chrono::steady_clock::now() + deadline;
  char chunk[4096];
  while (true) {
    const auto nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      std::string reply = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      return reply;
    }
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(until - std::chrono::steady_clock::now());
    if (left.count() <= 0) {
      stale_ = true;
      throw Error(ErrorCode::Timeout, "no reply within " + std::to_string(deadline.count()) + " ms");
    }
    pollfd pfd{from_child_, POLLIN, 0};
    const int ready = ::poll(&pfd, 1, static_cast<int>(left.count()));
    if (ready < 0) {
      if (errno == EINTR) continue;
      throw Error(ErrorCode::ProtocolError, std::string("poll: ") + std::strerror(errno));
    }
    if (ready == 0) continue;
    const ssize_t got = ::read(from_child_, chunk, sizeof(chunk));
    if (got < 0) {
      if (errno == EINTR) continue;
      throw Error(ErrorCode::ProtocolError, std::string("policy process read: ") + std::strerror(errno));
    }
    if (got == 0) throw Error(ErrorCode::ProtocolError, "policy process closed its output");
    buffer_.append(chunk, static_cast<std::size_t>(got));
  }
}

ExternalGuidance::ExternalGuidance(const std::string& command, const FeatureExtractor& extractor,
                                   std::chrono::milliseconds deadline)
    : process_(command), extractor_(extractor), deadline_(deadline) {}

Distribution ExternalGuidance::desired(const WorldState& state, const RegionPartition& partition) {
  try {
    const FeatureGraph features = extractor_.extract(state, state.prev_goal_map);
    const std::string request = encode_request(features, training_ ? &*training_ : nullptr);
    return decode_reply(process_.exchange(request, deadline_),
                        static_cast<std::size_t>(partition.num_regions()));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::ProtocolError && e.code() != ErrorCode::Timeout) throw;
    ++fallbacks_;
    if (last_error_ != e.what()) std::cerr << "guidance fallback at t=" << state.t << ": " << e.what() << "\n";
    last_error_ = e.what();
    return proportional_guidance(state, partition);
  }
}

}  // namespace flowsched
