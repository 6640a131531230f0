#pragma once

#include <stdexcept>

namespace amsim {

// Scenario file could not be read or is not valid JSON.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A configured value violates an invariant; the message names the field.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Inverse kinematics target outside the arm workspace.
struct UnreachableError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Integration produced a non-finite state.
struct DivergedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Every sampled rollout diverged; the controller has no usable update.
struct ControllerError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An operation requiring a fresh target estimate was given a stale one.
struct StaleTargetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace amsim
