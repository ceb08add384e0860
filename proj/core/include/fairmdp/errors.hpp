#pragma once

#include <stdexcept>
#include <string>

namespace fairmdp {

// Malformed or inconsistent input (shapes, probabilities, ranges).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A Nash-welfare program with an agent whose value is zero on every feasible
// occupancy measure.
class DegenerateInstance : public std::runtime_error {
 public:
  DegenerateInstance(const std::string& what, int agent)
      : std::runtime_error(what), agent_(agent) {}
  int agent() const noexcept { return agent_; }

 private:
  int agent_;
};

// An iterative solver ran out of iterations before reaching its tolerance.
class NonConvergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fairmdp
