#pragma once

#include <memory>
#include <string>

#include "flowsched/world.hpp"

namespace flowsched {

// Scheduling policy: state snapshot in, goal map out.
class Scheduler {
 public:
  virtual ~Scheduler() = default;
  virtual std::string name() const = 0;
  virtual GoalMap schedule(const WorldState& state) = 0;
  virtual int guidance_fallbacks() const { return 0; }
};

}  // namespace flowsched
