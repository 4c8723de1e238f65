// Trajectory sampling, the trajectory-balance objective and the training
// loop.
#pragma once

#include <chrono>
#include <cmath>
#include <functional>
#include <thread>
#include <vector>

#include "crystalflow/common.hpp"
#include "crystalflow/encoding.hpp"
#include "crystalflow/env.hpp"
#include "crystalflow/nn.hpp"
#include "crystalflow/policy.hpp"
#include "crystalflow/reward.hpp"

namespace crystalflow {

inline constexpr int kLogZWeights = 16;

struct Trajectory {
  std::vector<CrystalState> states; // s_0 .. s_T
  std::vector<Action> actions;      // a_0 .. a_{T-1}
  std::vector<ActionMask> masks;    // mask at s_t
  std::vector<double> log_pf;       // log P_F(a_t | s_t)
  std::vector<double> log_pb;       // log P_B(a_t | s_{t+1})
  double energy = 0.0;
  double reward = 0.0;

  const CrystalState& terminal() const { return states.back(); }
  double sum_log_pf() const {
    double s = 0;
    for (double v : log_pf) s += v;
    return s;
  }
  double sum_log_pb() const {
    double s = 0;
    for (double v : log_pb) s += v;
    return s;
  }
};

// Uniform draw over the valid actions of a mask: uniform categorical on the
// discrete stages, fair continue/stop plus uniform increments on the lattice
// stage. Used for epsilon-exploration and as the untrained baseline.
inline Action uniform_valid_action(const CrystalEnv& env, const CrystalState& s,
                                   const ActionMask& m, Rng& rng) {
  if (m.stage == Stage::Lattice) {
    const auto& c = env.active_constraint(s);
    if (m.lp_from_source) {
      LpFromSource a{};
      for (int d : c.free_dims()) a.coords[static_cast<std::size_t>(d)] = uniform01(rng);
      return a;
    }
    bool stop = !m.lp_increment || uniform01(rng) < 0.5;
    if (stop) return LpStop{};
    LpIncrement a{};
    double delta = env.config().min_increment;
    for (int d : c.free_dims()) {
      double x = s.lat.coords[static_cast<std::size_t>(d)];
      a.delta[static_cast<std::size_t>(d)] = delta + uniform01(rng) * (1.0 - x - delta);
    }
    return a;
  }
  int n = m.discrete_valid_count();
  if (n == 0) throw StateError("dead end: empty action mask");
  int pick = static_cast<int>(rng() % static_cast<unsigned>(n));
  for (std::size_t i = 0; i < m.discrete.size(); ++i) {
    if (!m.discrete[i]) continue;
    if (pick-- == 0) return env.slot_to_action(m.stage, static_cast<int>(i));
  }
  throw StateError("unreachable");
}

// ---------------------------------------------------------------------------
// Model bundle: forward and backward policies plus the 16 partition-function
// weights (logZ is their sum).

struct GfnModel {
  const CrystalEnv* env = nullptr;
  StateEncoder encoder;
  PolicyNet forward;
  PolicyNet backward;
  nn::Tensor logz;

  GfnModel(const CrystalEnv& e, std::vector<int> hidden, int beta_components, std::uint64_t seed)
      : env(&e), encoder(e) {
    Rng rng_f = make_rng(seed, 0x66, 0);
    Rng rng_b = make_rng(seed, 0x62, 0);
    forward = PolicyNet(Direction::Forward, e, encoder, hidden, beta_components, rng_f);
    backward = PolicyNet(Direction::Backward, e, encoder, hidden, beta_components, rng_b);
    logz = nn::make_tensor("logz", {kLogZWeights});
  }

  double logz_value() const {
    double s = 0;
    for (double v : logz.value) s += v;
    return s;
  }

  std::vector<nn::Tensor*> policy_parameters() {
    auto out = forward.mlp().parameters();
    for (auto* t : backward.mlp().parameters()) out.push_back(t);
    return out;
  }

  std::vector<nn::Tensor*> all_parameters() {
    auto out = policy_parameters();
    out.push_back(&logz);
    return out;
  }

  void zero_grad() {
    forward.mlp().zero_grad();
    backward.mlp().zero_grad();
    logz.zero_grad();
  }
};

// A discrete mask with exactly one valid action carries no probability mass
// or gradient, so the network evaluation can be skipped.
inline bool forced_discrete(const ActionMask& m) {
  return m.stage != Stage::Lattice && m.discrete_valid_count() == 1;
}

// ---------------------------------------------------------------------------
// Rollout

// Samples one trajectory. With probability epsilon a step is drawn uniformly
// from the valid actions instead of from the policy; forward log-probs are
// always evaluated under the policy itself.
inline Trajectory rollout(const GfnModel& model, double epsilon, Rng& rng) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw ConfigError("epsilon must be in [0, 1]");
  const CrystalEnv& env = *model.env;
  Trajectory t;
  CrystalState s = env.initial_state();
  t.states.push_back(s);
  int cap = env.max_trajectory_length();
  std::vector<double> out;
  for (int i = 0; i <= cap; ++i) {
    if (s.stage == Stage::Done) return t;
    ActionMask m = env.valid_actions(s);
    if (!m.any()) throw StateError("dead end before a terminal state: environment mask bug");
    Action a;
    double lpf;
    if (forced_discrete(m)) {
      int slot = 0;
      for (std::size_t j = 0; j < m.discrete.size(); ++j)
        if (m.discrete[j]) slot = static_cast<int>(j);
      a = env.slot_to_action(m.stage, slot);
      lpf = 0.0;
    } else {
      model.forward.eval(s, out);
      bool explore = epsilon > 0.0 && uniform01(rng) < epsilon;
      a = explore ? uniform_valid_action(env, s, m, rng)
                  : model.forward.forward_sample(s, m, out, rng);
      lpf = model.forward.forward_log_prob(s, m, a, out);
    }
    CrystalState next = env.step(s, a, m);
    double lpb = 0.0;
    if (!model.backward.backward_forced(next, a)) {
      model.backward.eval(next, out);
      lpb = model.backward.backward_log_prob(next, a, s, out);
    }
    t.masks.push_back(std::move(m));
    t.actions.push_back(std::move(a));
    t.log_pf.push_back(lpf);
    t.log_pb.push_back(lpb);
    s = std::move(next);
    t.states.push_back(s);
  }
  throw StateError("rollout exceeded the derived step bound");
}

// ---------------------------------------------------------------------------
// Trajectory balance

// residual(tau) = logZ + sum log P_F - log R - sum log P_B
inline double tb_residual(double logz, double sum_log_pf, double log_reward, double sum_log_pb) {
  return logz + sum_log_pf - log_reward - sum_log_pb;
}

// Mean squared residual over the batch. When with_grad is set, accumulates
// exact gradients into the model tensors (call model.zero_grad() first).
// Rewards must be strictly positive.
inline double tb_loss(GfnModel& model, std::span<const Trajectory> batch, bool with_grad = false) {
  if (batch.empty()) throw ConfigError("empty trajectory batch");
  const CrystalEnv& env = *model.env;
  double loss = 0.0;
  double inv_b = 1.0 / static_cast<double>(batch.size());
  std::vector<double> out, dout;
  nn::Mlp::Cache cache;

  for (const Trajectory& traj : batch) {
    if (!(traj.reward > 0.0) || !std::isfinite(traj.reward))
      throw NumericalError("trajectory balance needs strictly positive rewards");

    // forward pass residual (probabilities under the current parameters)
    double sum_pf = 0.0, sum_pb = 0.0;
    std::vector<double> step_pf(traj.actions.size()), step_pb(traj.actions.size());
    for (std::size_t i = 0; i < traj.actions.size(); ++i) {
      const CrystalState& s = traj.states[i];
      const CrystalState& next = traj.states[i + 1];
      const Action& a = traj.actions[i];
      const ActionMask& m = traj.masks[i];
      double lpf = 0.0, lpb = 0.0;
      if (!forced_discrete(m)) {
        model.forward.eval(s, out);
        lpf = model.forward.forward_log_prob(s, m, a, out);
      }
      if (!model.backward.backward_forced(next, a)) {
        model.backward.eval(next, out);
        lpb = model.backward.backward_log_prob(next, a, s, out);
      }
      step_pf[i] = lpf;
      step_pb[i] = lpb;
      sum_pf += lpf;
      sum_pb += lpb;
    }
    double residual = tb_residual(model.logz_value(), sum_pf, std::log(traj.reward), sum_pb);
    loss += residual * residual * inv_b;

    if (!with_grad) continue;
    double coef = 2.0 * residual * inv_b;
    for (double& g : model.logz.grad) g += coef;
    for (std::size_t i = 0; i < traj.actions.size(); ++i) {
      const CrystalState& s = traj.states[i];
      const CrystalState& next = traj.states[i + 1];
      const Action& a = traj.actions[i];
      const ActionMask& m = traj.masks[i];
      if (!forced_discrete(m)) {
        model.forward.eval(s, out, &cache);
        dout.assign(out.size(), 0.0);
        model.forward.forward_log_prob(s, m, a, out, coef, dout);
        model.forward.mlp().backward(cache, dout);
      }
      if (!model.backward.backward_forced(next, a)) {
        model.backward.eval(next, out, &cache);
        dout.assign(out.size(), 0.0);
        model.backward.backward_log_prob(next, a, s, out, -coef, dout);
        model.backward.mlp().backward(cache, dout);
      }
    }
  }
  return loss;
}

// ---------------------------------------------------------------------------
// Training loop

struct TrainConfig {
  int iterations = 50000;
  int trajectories_per_iter = 10;
  double epsilon = 0.10;
  double lr_policy = 0.0001;
  double lr_logz = 0.01;
  std::uint64_t seed = 0;
  int threads = 1;
  int checkpoint_every = 0; // 0 = no periodic checkpoints
};

struct TrainRow {
  int iteration;
  double loss;
  double logz;
  double mean_reward;
  double mean_energy;
};

struct TrainResult {
  std::vector<TrainRow> rows;
};

// Runs the trajectory-balance training loop. Rewards come from
// exp(-energy / temperature) over the terminal record.
inline TrainResult train(GfnModel& model, const TrainConfig& cfg, const EnergyFn& energy_fn,
                         double temperature,
                         const std::function<void(int, const GfnModel&)>& checkpoint_hook = {},
                         const std::function<void(const TrainRow&, double)>& row_hook = {}) {
  if (cfg.iterations < 0 || cfg.trajectories_per_iter < 1) throw ConfigError("bad train config");
  if (!(cfg.epsilon >= 0.0 && cfg.epsilon <= 1.0)) throw ConfigError("epsilon must be in [0, 1]");
  if (temperature <= 0.0) throw ConfigError("temperature must be positive");

  nn::Adam opt_policy(cfg.lr_policy);
  nn::Adam opt_logz(cfg.lr_logz);
  auto policy_params = model.policy_parameters();
  std::vector<nn::Tensor*> logz_params{&model.logz};

  TrainResult result;
  result.rows.reserve(static_cast<std::size_t>(cfg.iterations));
  int batch = cfg.trajectories_per_iter;
  std::vector<Trajectory> trajs(static_cast<std::size_t>(batch));
  int threads = std::max(1, cfg.threads);

  for (int iter = 0; iter < cfg.iterations; ++iter) {
    auto t0 = std::chrono::steady_clock::now();
    auto sample_range = [&](int lo, int hi) {
      for (int j = lo; j < hi; ++j) {
        Rng rng = make_rng(cfg.seed, static_cast<std::uint64_t>(iter) + 1,
                           static_cast<std::uint64_t>(j));
        trajs[static_cast<std::size_t>(j)] = rollout(model, cfg.epsilon, rng);
      }
    };
    if (threads <= 1 || batch < 2) {
      sample_range(0, batch);
    } else {
      int n = std::min(threads, batch);
      std::vector<std::thread> pool;
      for (int w = 0; w < n; ++w) {
        int lo = batch * w / n, hi = batch * (w + 1) / n;
        pool.emplace_back(sample_range, lo, hi);
      }
      for (auto& th : pool) th.join();
    }

    double mean_r = 0.0, mean_e = 0.0;
    for (auto& t : trajs) {
      TerminalRecord rec = model.env->terminal_record(t.terminal());
      t.energy = energy_fn(rec);
      t.reward = reward_from_energy(t.energy, temperature);
      mean_r += t.reward / batch;
      mean_e += t.energy / batch;
    }

    model.zero_grad();
    double loss = tb_loss(model, trajs, /*with_grad=*/true);
    if (!std::isfinite(loss))
      throw NumericalError("training diverged: non-finite loss at iteration " +
                           std::to_string(iter));
    opt_policy.step(policy_params);
    opt_logz.step(logz_params);

    TrainRow row{iter, loss, model.logz_value(), mean_r, mean_e};
    result.rows.push_back(row);
    if (row_hook) {
      double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                      .count();
      row_hook(row, ms);
    }
    if (checkpoint_hook && cfg.checkpoint_every > 0 && (iter + 1) % cfg.checkpoint_every == 0)
      checkpoint_hook(iter + 1, model);
  }
  if (checkpoint_hook) checkpoint_hook(cfg.iterations, model);
  return result;
}

} // namespace crystalflow
