// Brute-force ground truth for small configurations: exhaustive terminal
// enumeration, the exact target distribution R/Z, and divergence metrics.
#pragma once

#include <functional>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "crystalflow/common.hpp"
#include "crystalflow/env.hpp"
#include "crystalflow/reward.hpp"

namespace crystalflow {

// Every reachable terminal state exactly once, in deterministic preorder.
// Requires a discrete configuration (lattice stage disabled); throws when the
// traversal exceeds the state budget.
inline std::vector<CrystalState> enumerate_terminals(const CrystalEnv& env,
                                                     std::size_t budget = 1000000) {
  if (env.config().lp_stage)
    throw ResourceError("terminal enumeration needs the lattice stage disabled");
  std::vector<CrystalState> terminals;
  std::unordered_set<CrystalState> seen;
  std::vector<CrystalState> stack{env.initial_state()};
  seen.insert(env.initial_state());
  while (!stack.empty()) {
    CrystalState s = std::move(stack.back());
    stack.pop_back();
    if (s.stage == Stage::Done) {
      terminals.push_back(std::move(s));
      continue;
    }
    ActionMask m = env.valid_actions(s);
    // push in reverse slot order so the traversal pops in ascending order
    for (std::size_t i = m.discrete.size(); i-- > 0;) {
      if (!m.discrete[i]) continue;
      CrystalState n = env.step(s, env.slot_to_action(m.stage, static_cast<int>(i)), m);
      if (!seen.insert(n).second) continue;
      if (seen.size() > budget)
        throw ResourceError("state space exceeds the enumeration budget");
      stack.push_back(std::move(n));
    }
  }
  return terminals;
}

struct ExactDistribution {
  std::vector<CrystalState> terminals;
  std::vector<double> probs;
  double logz_true = 0.0;
  std::unordered_map<CrystalState, std::size_t> index;

  double prob_of(const CrystalState& s) const {
    auto it = index.find(s);
    return it == index.end() ? 0.0 : probs[it->second];
  }
};

// p(x) = R(x) / sum R; logz_true = log sum R. Rewards must be positive.
inline ExactDistribution exact_distribution(const CrystalEnv& env,
                                            std::vector<CrystalState> terminals,
                                            const std::function<double(const TerminalRecord&)>&
                                                reward) {
  if (terminals.empty()) throw ConfigError("no terminal states to normalize over");
  ExactDistribution d;
  d.terminals = std::move(terminals);
  d.probs.resize(d.terminals.size());
  double z = 0.0;
  for (std::size_t i = 0; i < d.terminals.size(); ++i) {
    double r = reward(env.terminal_record(d.terminals[i]));
    if (!(r > 0.0) || !std::isfinite(r)) throw NumericalError("rewards must be positive");
    d.probs[i] = r;
    z += r;
  }
  for (auto& p : d.probs) p /= z;
  d.logz_true = std::log(z);
  for (std::size_t i = 0; i < d.terminals.size(); ++i) d.index[d.terminals[i]] = i;
  return d;
}

// L1 distance between empirical frequencies and the exact distribution;
// lies in [0, 2]. States outside the exact support contribute their full
// empirical mass.
inline double l1_divergence(const std::unordered_map<CrystalState, long>& counts,
                            const ExactDistribution& exact) {
  long total = 0;
  for (const auto& [_, c] : counts) total += c;
  if (total <= 0) throw ConfigError("empty empirical sample");
  double l1 = 0.0;
  for (std::size_t i = 0; i < exact.terminals.size(); ++i) {
    auto it = counts.find(exact.terminals[i]);
    double emp = it == counts.end() ? 0.0 : static_cast<double>(it->second) / total;
    l1 += std::abs(emp - exact.probs[i]);
  }
  for (const auto& [s, c] : counts)
    if (!exact.index.count(s)) l1 += static_cast<double>(c) / total;
  return l1;
}

// Exact per-bin masses of the density p(x) proportional to reward(x) over
// [0, 1], by composite Simpson quadrature inside each bin. Ground truth for
// one-free-dimension lattice configurations.
inline std::vector<double> exact_bin_masses(const std::function<double(double)>& reward, int bins,
                                            int points_per_bin = 2000) {
  if (bins < 1) throw ConfigError("bins must be positive");
  std::vector<double> mass(static_cast<std::size_t>(bins), 0.0);
  double z = 0.0;
  for (int b = 0; b < bins; ++b) {
    double lo = static_cast<double>(b) / bins, hi = static_cast<double>(b + 1) / bins;
    int n = points_per_bin % 2 ? points_per_bin + 1 : points_per_bin; // Simpson needs even
    double h = (hi - lo) / n, acc = reward(lo) + reward(hi);
    for (int i = 1; i < n; ++i) acc += reward(lo + i * h) * (i % 2 ? 4.0 : 2.0);
    mass[static_cast<std::size_t>(b)] = acc * h / 3.0;
    z += mass[static_cast<std::size_t>(b)];
  }
  for (auto& m : mass) m /= z;
  return mass;
}

} // namespace crystalflow
