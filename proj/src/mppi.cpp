#include "amsim/mppi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>
#include <vector>

#include "amsim/errors.hpp"
#include "amsim/rng.hpp"
#include "amsim/rotation.hpp"

namespace amsim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int resolve_threads(int configured) {
  if (configured > 0) return configured;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace

void MppiConfig::validate() const {
  if (rollouts < 1) throw ValidationError("mppi.rollouts must be >= 1");
  if (horizon < 1) throw ValidationError("mppi.horizon must be >= 1");
  if (!(dt_ctrl_s > 0.0)) throw ValidationError("mppi.dt_ctrl_s must be > 0");
  if (!(lambda > 0.0)) throw ValidationError("mppi.lambda must be > 0");
  if (!(sigma_thrust_n > 0.0)) throw ValidationError("mppi.sigma_thrust_n must be > 0");
  if (!(sigma_tau_nm > 0.0)) throw ValidationError("mppi.sigma_tau_nm must be > 0");
  if (w_p < 0.0 || w_v < 0.0 || w_u < 0.0 || w_terminal < 0.0 || w_yaw < 0.0 ||
      w_omega < 0.0) {
    throw ValidationError("mppi weights must be >= 0");
  }
  if (threads < 0) throw ValidationError("mppi.threads must be >= 0");
}

std::vector<double> softmax_weights(const std::vector<double>& costs, double lambda) {
  const double min_cost = *std::min_element(costs.begin(), costs.end());
  if (!std::isfinite(min_cost)) {
    throw ControllerError("softmax_weights: no finite cost");
  }
  std::vector<double> weights(costs.size(), 0.0);
  double norm = 0.0;
  for (std::size_t k = 0; k < costs.size(); ++k) {
    if (!std::isfinite(costs[k])) continue;
    weights[k] = std::exp(-(costs[k] - min_cost) / lambda);
    norm += weights[k];
  }
  for (double& w : weights) w /= norm;
  return weights;
}

ControlInput hover_trim(const ModelParams& params, const Wrench& coupling) {
  ControlInput u;
  u.thrust = params.total_mass_kg() * params.gravity_mps2 - coupling.force.z();
  u.tau = -coupling.torque;
  return clamp_control(u, params);
}

ControlSequence make_constant_sequence(const ControlInput& u, int horizon) {
  return ControlSequence(static_cast<std::size_t>(horizon), u);
}

ControlInput clamp_control(const ControlInput& u, const ModelParams& params) {
  ControlInput out;
  out.thrust = std::clamp(u.thrust, 0.0, params.thrust_max_n);
  out.tau.x() = std::clamp(u.tau.x(), -params.tau_max_nm, params.tau_max_nm);
  out.tau.y() = std::clamp(u.tau.y(), -params.tau_max_nm, params.tau_max_nm);
  out.tau.z() = std::clamp(u.tau.z(), -params.tau_max_nm, params.tau_max_nm);
  return out;
}

double stage_cost(const FullState& state, const ControlInput& u,
                  const Setpoint& sp, const MppiConfig& cfg,
                  const ModelParams& params) {
  const Vec3 ep = state.p - sp.p_des;
  const Vec3 ev = state.v - sp.v_des;
  const double eyaw = wrap_angle(yaw_of(state.q) - sp.yaw_des);
  const double dthrust = u.thrust - params.hover_thrust_n();
  return cfg.w_p * ep.squaredNorm() + cfg.w_yaw * eyaw * eyaw +
         cfg.w_v * ev.squaredNorm() +
         cfg.w_u * (dthrust * dthrust + u.tau.squaredNorm()) +
         cfg.w_omega * state.omega.squaredNorm();
}

double rollout_cost(const FullState& x0, const ControlSequence& seq,
                    const Setpoint& sp, const MppiConfig& cfg,
                    const ModelParams& params, bool arm_coupling) {
  FullState x = x0;
  double cost = 0.0;
  for (const ControlInput& u : seq) {
    cost += stage_cost(x, u, sp, cfg, params);
    const Wrench w =
        arm_coupling ? arm_coupling_wrench(x.arm, x.q, params) : Wrench{};
    try {
      x = step_rk4(x, u, params, w, cfg.dt_ctrl_s);
    } catch (const DivergedError&) {
      return kInf;
    }
  }
  cost += cfg.w_terminal * (x.p - sp.p_des).squaredNorm();
  return std::isfinite(cost) ? cost : kInf;
}

ControlSequence mppi_update(const FullState& x0, const Setpoint& sp,
                            const ControlSequence& nominal, const MppiConfig& cfg,
                            const ModelParams& params, bool arm_coupling,
                            std::uint64_t master_seed, std::uint64_t step_index,
                            MppiDiag* diag) {
  const int K = cfg.rollouts;
  const int T = cfg.horizon;
  if (static_cast<int>(nominal.size()) != T) {
    throw ValidationError("mppi_update: nominal length must equal the horizon");
  }

  // Perturbed sequences are kept so the blend averages exactly what was
  // scored.
  std::vector<ControlInput> samples(static_cast<std::size_t>(K) * T);
  std::vector<double> costs(K, kInf);

  auto evaluate_range = [&](int k_begin, int k_end) {
    ControlSequence seq(static_cast<std::size_t>(T));
    for (int k = k_begin; k < k_end; ++k) {
      RngStream rng(substream_seed(master_seed, kStreamMppi, step_index,
                                   static_cast<std::uint64_t>(k)));
      for (int t = 0; t < T; ++t) {
        ControlInput u = nominal[static_cast<std::size_t>(t)];
        u.thrust += rng.gaussian(0.0, cfg.sigma_thrust_n);
        u.tau.x() += rng.gaussian(0.0, cfg.sigma_tau_nm);
        u.tau.y() += rng.gaussian(0.0, cfg.sigma_tau_nm);
        u.tau.z() += rng.gaussian(0.0, cfg.sigma_tau_nm);
        seq[static_cast<std::size_t>(t)] = clamp_control(u, params);
      }
      costs[static_cast<std::size_t>(k)] =
          rollout_cost(x0, seq, sp, cfg, params, arm_coupling);
      std::copy(seq.begin(), seq.end(),
                samples.begin() + static_cast<std::ptrdiff_t>(k) * T);
    }
  };

  const int n_threads = std::min(resolve_threads(cfg.threads), K);
  if (n_threads <= 1) {
    evaluate_range(0, K);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    const int chunk = (K + n_threads - 1) / n_threads;
    for (int i = 0; i < n_threads; ++i) {
      const int b = i * chunk;
      const int e = std::min(K, b + chunk);
      if (b >= e) break;
      pool.emplace_back(evaluate_range, b, e);
    }
    for (auto& th : pool) th.join();
  }

  std::vector<double> weights;
  try {
    weights = softmax_weights(costs, cfg.lambda);
  } catch (const ControllerError&) {
    throw ControllerError("mppi_update: every rollout diverged");
  }

  // Blend the weighted deviations onto the nominal (fixed-order reduction so
  // the result is independent of thread count; delta form keeps the
  // zero-noise limit bit-exact).
  ControlSequence updated(static_cast<std::size_t>(T));
  for (int t = 0; t < T; ++t) {
    const ControlInput& nom = nominal[static_cast<std::size_t>(t)];
    double dthrust = 0.0;
    Vec3 dtau = Vec3::Zero();
    for (int k = 0; k < K; ++k) {
      const double w = weights[static_cast<std::size_t>(k)];
      if (w == 0.0) continue;
      const ControlInput& u =
          samples[static_cast<std::size_t>(k) * T + static_cast<std::size_t>(t)];
      dthrust += w * (u.thrust - nom.thrust);
      dtau += w * (u.tau - nom.tau);
    }
    ControlInput u;
    u.thrust = nom.thrust + dthrust;
    u.tau = nom.tau + dtau;
    updated[static_cast<std::size_t>(t)] = clamp_control(u, params);
  }

  if (diag) {
    double sum = 0.0, sum_w2 = 0.0;
    int finite_count = 0;
    for (int k = 0; k < K; ++k) {
      if (std::isfinite(costs[static_cast<std::size_t>(k)])) {
        sum += costs[static_cast<std::size_t>(k)];
        ++finite_count;
      }
      sum_w2 += weights[static_cast<std::size_t>(k)] * weights[static_cast<std::size_t>(k)];
    }
    diag->min_cost = *std::min_element(costs.begin(), costs.end());
    diag->mean_cost = sum / finite_count;
    diag->ess = 1.0 / sum_w2;
  }
  return updated;
}

MppiStepResult mppi_step(const FullState& x0, const Setpoint& sp,
                         const ControlSequence& nominal, const MppiConfig& cfg,
                         const ModelParams& params, bool arm_coupling,
                         std::uint64_t master_seed, std::uint64_t step_index) {
  MppiStepResult res;
  ControlSequence updated = mppi_update(x0, sp, nominal, cfg, params, arm_coupling,
                                        master_seed, step_index, &res.diag);
  res.command = updated.front();
  res.next_nominal = std::move(updated);
  if (res.next_nominal.size() > 1) {
    std::rotate(res.next_nominal.begin(), res.next_nominal.begin() + 1,
                res.next_nominal.end());
    res.next_nominal.back() = res.next_nominal[res.next_nominal.size() - 2];
  }
  return res;
}

}  // namespace amsim
