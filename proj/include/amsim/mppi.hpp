#pragma once

#include <cstdint>
#include <vector>

#include "amsim/dynamics.hpp"
#include "amsim/types.hpp"

namespace amsim {

// Nominal control plan over the horizon.
using ControlSequence = std::vector<ControlInput>;

struct MppiConfig {
  int rollouts = 512;      // K
  int horizon = 30;        // T
  double dt_ctrl_s = 0.02;
  double lambda = 0.5;     // softmax temperature, cost units
  double sigma_thrust_n = 2.0;
  double sigma_tau_nm = 0.05;
  double w_p = 10.0;       // position error
  double w_v = 1.0;        // velocity error
  double w_u = 0.01;       // control effort (thrust offset from hover + torque)
  double w_terminal = 50.0;
  double w_yaw = 2.0;      // heading-error part of the tracking branch
  double w_omega = 0.2;    // body-rate part of the effort branch
  int threads = 0;         // 0 = hardware concurrency, 1 = serial

  void validate() const;
};

struct MppiDiag {
  double min_cost = 0.0;
  double mean_cost = 0.0;   // over finite rollouts
  double ess = 0.0;         // 1 / sum(w^2)
};

struct MppiStepResult {
  ControlInput command;
  ControlSequence next_nominal;
  MppiDiag diag;
};

// Exponential path-integral weights with min-subtraction: infinite costs get
// zero weight, the rest are exp(-(S_k - min S)/lambda) normalized to sum 1.
// Adding a constant to every cost leaves the result bit-identical.
std::vector<double> softmax_weights(const std::vector<double>& costs, double lambda);

// Hover-trim input for the current coupling wrench: thrust balances total
// weight minus the coupling lift, torque cancels the coupling torque.
// Assumes near-level attitude.
ControlInput hover_trim(const ModelParams& params, const Wrench& coupling);

ControlSequence make_constant_sequence(const ControlInput& u, int horizon);

ControlInput clamp_control(const ControlInput& u, const ModelParams& params);

// Quadratic tracking cost:
//   w_p*|p-p_des|^2 + w_yaw*wrap(yaw-yaw_des)^2 + w_v*|v-v_des|^2
//   + w_u*((thrust-hover)^2 + |tau|^2) + w_omega*|omega|^2
double stage_cost(const FullState& state, const ControlInput& u,
                  const Setpoint& sp, const MppiConfig& cfg,
                  const ModelParams& params);

// Simulate the sequence with the arm frozen at its x0 configuration,
// accumulating stage costs plus a terminal position cost. When arm_coupling
// is set, the frozen arm's gravity wrench is applied along the rollout with
// its torque re-expressed in the predicted attitude each step; the planner
// must see the attitude dependence or it cancels the arm's restoring torque
// and the real closed loop rings. A diverged rollout returns +infinity.
double rollout_cost(const FullState& x0, const ControlSequence& seq,
                    const Setpoint& sp, const MppiConfig& cfg,
                    const ModelParams& params, bool arm_coupling);

// One importance-sampling refinement of the nominal sequence, no receding
// shift: sample K clamped perturbations, score them, and blend with
// exponential weights (min-subtracted for numerical stability). Rollout k
// draws from the child stream (seed, step_index, k), so the result does not
// depend on the parallelism setting. Throws ControllerError when every
// rollout diverges.
ControlSequence mppi_update(const FullState& x0, const Setpoint& sp,
                            const ControlSequence& nominal, const MppiConfig& cfg,
                            const ModelParams& params, bool arm_coupling,
                            std::uint64_t master_seed, std::uint64_t step_index,
                            MppiDiag* diag = nullptr);

// Receding-horizon step: refine, return the first control, and shift the
// plan left by one with the last entry repeated.
MppiStepResult mppi_step(const FullState& x0, const Setpoint& sp,
                         const ControlSequence& nominal, const MppiConfig& cfg,
                         const ModelParams& params, bool arm_coupling,
                         std::uint64_t master_seed, std::uint64_t step_index);

}  // namespace amsim
