// Forward and backward parametric policies.
//
// One network per direction, a shared trunk with stage-specific output
// slices. Discrete stages use masked categorical logits; the lattice stage
// emits a stop (forward) or source-vs-increment (backward) logit plus a
// mixture of Beta distributions per free dimension. Coefficients are squashed
// smoothly into [0.1, 100], never clipped, so gradients stay alive at the
// bounds.
#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "crystalflow/common.hpp"
#include "crystalflow/encoding.hpp"
#include "crystalflow/env.hpp"
#include "crystalflow/nn.hpp"

namespace crystalflow {

enum class Direction { Forward, Backward };

// Backward discrete slots for the space-group stage: which transition led to
// this state. SetSg transitions are split by what was already set beforehand.
inline constexpr int kBwdSetClsLast = 0;
inline constexpr int kBwdSetPsLast = 1;
inline constexpr int kBwdSetSgFromBoth = 2;
inline constexpr int kBwdSetSgFromCls = 3;
inline constexpr int kBwdSetSgFromPs = 4;
inline constexpr int kBwdSetSgFromNone = 5;
inline constexpr int kBwdSgSlotCount = 6;

inline constexpr double kBetaCoefMin = 0.1;
inline constexpr double kBetaCoefMax = 100.0;
inline constexpr double kRClampEps = 1e-9;

// Squash raw -> [0.1, 100]; the offset puts raw = 0 at exactly 1, so a
// zero-initialized output layer yields uniform Beta(1,1) components.
inline double squash_coef(double z) {
  static const double z0 = std::log((1.0 - kBetaCoefMin) / (kBetaCoefMax - 1.0));
  return kBetaCoefMin + (kBetaCoefMax - kBetaCoefMin) * sigmoid(z + z0);
}
inline double squash_coef_grad(double z) {
  static const double z0 = std::log((1.0 - kBetaCoefMin) / (kBetaCoefMax - 1.0));
  double s = sigmoid(z + z0);
  return (kBetaCoefMax - kBetaCoefMin) * s * (1.0 - s);
}

// ---------------------------------------------------------------------------
// Beta mixture head over one dimension. Raw block layout: KB weight logits,
// KB alpha raws, KB beta raws.

// log density at r; optionally accumulates coef * d(logf)/d(raw) into draw.
inline double mixture_log_pdf(std::span<const double> raw, int kb, double r, double coef = 0.0,
                              std::span<double> draw = {}) {
  r = std::min(std::max(r, kRClampEps), 1.0 - kRClampEps);
  std::vector<double> logw(static_cast<std::size_t>(kb));
  double wmax = -1e300;
  for (int j = 0; j < kb; ++j) wmax = std::max(wmax, raw[static_cast<std::size_t>(j)]);
  double wsum = 0.0;
  for (int j = 0; j < kb; ++j) wsum += std::exp(raw[static_cast<std::size_t>(j)] - wmax);
  double logz = wmax + std::log(wsum);
  for (int j = 0; j < kb; ++j) logw[static_cast<std::size_t>(j)] = raw[static_cast<std::size_t>(j)] - logz;

  std::vector<double> comp(static_cast<std::size_t>(kb));
  double lr = std::log(r), l1r = std::log1p(-r);
  for (int j = 0; j < kb; ++j) {
    double a = squash_coef(raw[static_cast<std::size_t>(kb + j)]);
    double b = squash_coef(raw[static_cast<std::size_t>(2 * kb + j)]);
    comp[static_cast<std::size_t>(j)] =
        logw[static_cast<std::size_t>(j)] + (a - 1.0) * lr + (b - 1.0) * l1r - log_beta_fn(a, b);
  }
  double logf = logsumexp(comp);

  if (!draw.empty()) {
    for (int j = 0; j < kb; ++j) {
      double resp = std::exp(comp[static_cast<std::size_t>(j)] - logf);
      double w = std::exp(logw[static_cast<std::size_t>(j)]);
      draw[static_cast<std::size_t>(j)] += coef * (resp - w);
      double za = raw[static_cast<std::size_t>(kb + j)];
      double zb = raw[static_cast<std::size_t>(2 * kb + j)];
      double a = squash_coef(za), b = squash_coef(zb);
      double dla = lr - digamma(a) + digamma(a + b);
      double dlb = l1r - digamma(b) + digamma(a + b);
      draw[static_cast<std::size_t>(kb + j)] += coef * resp * dla * squash_coef_grad(za);
      draw[static_cast<std::size_t>(2 * kb + j)] += coef * resp * dlb * squash_coef_grad(zb);
    }
  }
  return logf;
}

inline double mixture_sample(std::span<const double> raw, int kb, Rng& rng) {
  // categorical over the softmax weights
  double wmax = -1e300;
  for (int j = 0; j < kb; ++j) wmax = std::max(wmax, raw[static_cast<std::size_t>(j)]);
  double wsum = 0.0;
  for (int j = 0; j < kb; ++j) wsum += std::exp(raw[static_cast<std::size_t>(j)] - wmax);
  double u = uniform01(rng) * wsum;
  int pick = kb - 1;
  double acc = 0.0;
  for (int j = 0; j < kb; ++j) {
    acc += std::exp(raw[static_cast<std::size_t>(j)] - wmax);
    if (u <= acc) {
      pick = j;
      break;
    }
  }
  double a = squash_coef(raw[static_cast<std::size_t>(kb + pick)]);
  double b = squash_coef(raw[static_cast<std::size_t>(2 * kb + pick)]);
  std::gamma_distribution<double> ga(a, 1.0), gb(b, 1.0);
  double x = ga(rng), y = gb(rng);
  double r = x / (x + y);
  return std::min(std::max(r, kRClampEps), 1.0 - kRClampEps);
}

// ---------------------------------------------------------------------------
// PolicyNet

class PolicyNet {
 public:
  PolicyNet() = default;

  PolicyNet(Direction dir, const CrystalEnv& env, const StateEncoder& encoder,
            std::vector<int> hidden, int beta_components, Rng& rng)
      : dir_(dir), env_(&env), encoder_(&encoder), kb_(beta_components) {
    const auto& cfg = env.config();
    discrete_size_ = 0;
    if (dir == Direction::Forward) {
      if (cfg.sg_stage) discrete_size_ = std::max(discrete_size_, kSgSlotCount);
      if (cfg.comp_stage) discrete_size_ = std::max(discrete_size_, env.comp_slot_count());
    } else {
      if (cfg.sg_stage) discrete_size_ = std::max(discrete_size_, kBwdSgSlotCount);
      if (cfg.comp_stage) discrete_size_ = std::max(discrete_size_, env.num_elements());
    }
    lp_block_ = cfg.lp_stage ? 1 + 6 * 3 * kb_ : 0;
    out_dim_ = std::max(discrete_size_ + lp_block_, 1);
    mlp_ = nn::Mlp(dir == Direction::Forward ? "pf" : "pb", encoder.dim(), std::move(hidden),
                   out_dim_, rng);
  }

  Direction direction() const { return dir_; }
  int out_dim() const { return out_dim_; }
  int beta_components() const { return kb_; }
  nn::Mlp& mlp() { return mlp_; }
  const nn::Mlp& mlp() const { return mlp_; }

  void eval(const CrystalState& s, std::vector<double>& out, nn::Mlp::Cache* cache = nullptr) const {
    std::vector<double> x(static_cast<std::size_t>(encoder_->dim()));
    encoder_->encode(s, x);
    out.assign(static_cast<std::size_t>(out_dim_), 0.0);
    mlp_.forward(x, out, cache);
  }

  int stop_index() const { return discrete_size_; }
  int dim_block_offset(int free_dim_slot) const {
    return discrete_size_ + 1 + free_dim_slot * 3 * kb_;
  }

  // -------------------------------------------------------------------------
  // Forward direction

  // log P_F(a | s); with coef != 0 accumulates coef * dlogp/dout into dout.
  double forward_log_prob(const CrystalState& s, const ActionMask& m, const Action& a,
                          std::span<const double> out, double coef = 0.0,
                          std::span<double> dout = {}) const {
    if (m.stage != Stage::Lattice)
      return discrete_log_prob(m.discrete, env_->action_to_slot(m.stage, a), out, coef, dout);

    const auto& c = env_->active_constraint(s);
    if (const auto* p = std::get_if<LpFromSource>(&a)) {
      double lp = 0.0;
      int slot = 0;
      for (int d : c.free_dims())
        lp += dim_log_pdf(slot++, p->coords[static_cast<std::size_t>(d)], out, coef, dout);
      return lp;
    }
    bool both = m.lp_increment; // stop is always valid post-source
    if (std::holds_alternative<LpStop>(a)) {
      if (!both) return 0.0; // forced
      return stop_log_prob(true, out, coef, dout);
    }
    const auto& inc = std::get<LpIncrement>(a);
    double lp = both ? stop_log_prob(false, out, coef, dout) : 0.0;
    int slot = 0;
    for (int d : c.free_dims()) {
      double x = s.lat.coords[static_cast<std::size_t>(d)];
      double span = 1.0 - x - env_->config().min_increment;
      double r = (inc.delta[static_cast<std::size_t>(d)] - env_->config().min_increment) / span;
      lp += dim_log_pdf(slot++, r, out, coef, dout);
      lp -= std::log(span); // change of variables u = delta + r * span
    }
    return lp;
  }

  Action forward_sample(const CrystalState& s, const ActionMask& m, std::span<const double> out,
                        Rng& rng) const {
    if (m.stage != Stage::Lattice) {
      int slot = sample_discrete(m.discrete, out, rng);
      return env_->slot_to_action(m.stage, slot);
    }
    const auto& c = env_->active_constraint(s);
    if (m.lp_from_source) {
      LpFromSource a{};
      int slot = 0;
      for (int d : c.free_dims())
        a.coords[static_cast<std::size_t>(d)] = dim_sample(slot++, out, rng);
      return a;
    }
    bool stop = !m.lp_increment ||
                uniform01(rng) < sigmoid(out[static_cast<std::size_t>(stop_index())]);
    if (stop) return LpStop{};
    LpIncrement a{};
    int slot = 0;
    double delta = env_->config().min_increment;
    for (int d : c.free_dims()) {
      double x = s.lat.coords[static_cast<std::size_t>(d)];
      double r = dim_sample(slot++, out, rng);
      a.delta[static_cast<std::size_t>(d)] = delta + r * (1.0 - x - delta);
    }
    return a;
  }

  // -------------------------------------------------------------------------
  // Backward direction: log P_B(a | child), i.e. the probability that the
  // trajectory arrived at `child` via `a` from `parent`.

  // True when the transition is the only possibility and needs no network.
  bool backward_forced(const CrystalState& child, const Action& a) const {
    if (std::holds_alternative<SgStop>(a) || std::holds_alternative<CompStop>(a) ||
        std::holds_alternative<LpStop>(a))
      return true;
    if (std::holds_alternative<SetCls>(a) || std::holds_alternative<SetPs>(a))
      return !(child.sg.cls && child.sg.ps); // both set -> two candidate parents
    if (std::holds_alternative<AddAtoms>(a)) return child.comp.distinct() == 1;
    if (std::holds_alternative<LpFromSource>(a)) return !increment_parent_possible(child);
    return false;
  }

  double backward_log_prob(const CrystalState& child, const Action& a, const CrystalState& parent,
                           std::span<const double> out, double coef = 0.0,
                           std::span<double> dout = {}) const {
    if (std::holds_alternative<SgStop>(a) || std::holds_alternative<CompStop>(a) ||
        std::holds_alternative<LpStop>(a))
      return 0.0; // unique parent

    if (std::holds_alternative<SetCls>(a) || std::holds_alternative<SetPs>(a) ||
        std::holds_alternative<SetSg>(a)) {
      std::vector<std::uint8_t> valid(kBwdSgSlotCount, 0);
      int chosen;
      if (std::holds_alternative<SetSg>(a)) {
        valid[kBwdSetSgFromBoth] = valid[kBwdSetSgFromCls] = valid[kBwdSetSgFromPs] =
            valid[kBwdSetSgFromNone] = 1;
        chosen = parent.sg.cls ? (parent.sg.ps ? kBwdSetSgFromBoth : kBwdSetSgFromCls)
                               : (parent.sg.ps ? kBwdSetSgFromPs : kBwdSetSgFromNone);
      } else {
        bool both = child.sg.cls && child.sg.ps;
        if (!both) return 0.0; // unique parent
        valid[kBwdSetClsLast] = valid[kBwdSetPsLast] = 1;
        chosen = std::holds_alternative<SetCls>(a) ? kBwdSetClsLast : kBwdSetPsLast;
      }
      return discrete_log_prob(valid, chosen, out, coef, dout);
    }

    if (const auto* add = std::get_if<AddAtoms>(&a)) {
      std::vector<std::uint8_t> valid(static_cast<std::size_t>(env_->num_elements()), 0);
      for (int d = 0; d < env_->num_elements(); ++d)
        valid[static_cast<std::size_t>(d)] = child.comp.counts[static_cast<std::size_t>(d)] > 0;
      return discrete_log_prob(valid, add->element, out, coef, dout);
    }

    bool inc_possible = increment_parent_possible(child);
    if (std::holds_alternative<LpFromSource>(a)) {
      if (!inc_possible) return 0.0;
      return stop_log_prob(true, out, coef, dout); // "parent is the source"
    }

    const auto& inc = std::get<LpIncrement>(a);
    double lp = stop_log_prob(false, out, coef, dout);
    const auto& c = env_->active_constraint(child);
    int slot = 0;
    double delta = env_->config().min_increment;
    for (int d : c.free_dims()) {
      double y = child.lat.coords[static_cast<std::size_t>(d)];
      double span = y - delta;
      double r = (inc.delta[static_cast<std::size_t>(d)] - delta) / span;
      lp += dim_log_pdf(slot++, r, out, coef, dout);
      lp -= std::log(span);
    }
    return lp;
  }

  // -------------------------------------------------------------------------
  // Shared heads

  double discrete_log_prob(std::span<const std::uint8_t> valid, int chosen,
                           std::span<const double> out, double coef = 0.0,
                           std::span<double> dout = {}) const {
    if (chosen < 0 || !valid[static_cast<std::size_t>(chosen)])
      throw MaskedActionError("log_prob of a masked action");
    double mx = -1e300;
    for (std::size_t i = 0; i < valid.size(); ++i)
      if (valid[i]) mx = std::max(mx, out[i]);
    double sum = 0.0;
    for (std::size_t i = 0; i < valid.size(); ++i)
      if (valid[i]) sum += std::exp(out[i] - mx);
    double logz = mx + std::log(sum);
    if (!dout.empty()) {
      for (std::size_t i = 0; i < valid.size(); ++i) {
        if (!valid[i]) continue;
        double p = std::exp(out[i] - logz);
        dout[i] += coef * ((static_cast<int>(i) == chosen ? 1.0 : 0.0) - p);
      }
    }
    return out[static_cast<std::size_t>(chosen)] - logz;
  }

  int sample_discrete(std::span<const std::uint8_t> valid, std::span<const double> out,
                      Rng& rng) const {
    double mx = -1e300;
    for (std::size_t i = 0; i < valid.size(); ++i)
      if (valid[i]) mx = std::max(mx, out[i]);
    double sum = 0.0;
    for (std::size_t i = 0; i < valid.size(); ++i)
      if (valid[i]) sum += std::exp(out[i] - mx);
    double u = uniform01(rng) * sum;
    double acc = 0.0;
    int last = -1;
    for (std::size_t i = 0; i < valid.size(); ++i) {
      if (!valid[i]) continue;
      last = static_cast<int>(i);
      acc += std::exp(out[i] - mx);
      if (u <= acc) return last;
    }
    if (last < 0) throw StateError("empty mask in sample_discrete");
    return last;
  }

  double stop_log_prob(bool stop, std::span<const double> out, double coef,
                       std::span<double> dout) const {
    double z = out[static_cast<std::size_t>(stop_index())];
    if (!dout.empty()) {
      double s = sigmoid(z);
      dout[static_cast<std::size_t>(stop_index())] += coef * ((stop ? 1.0 : 0.0) - s);
    }
    return stop ? log_sigmoid(z) : log_sigmoid(-z);
  }

  double dim_log_pdf(int free_dim_slot, double r, std::span<const double> out, double coef,
                     std::span<double> dout) const {
    int off = dim_block_offset(free_dim_slot);
    return mixture_log_pdf(out.subspan(static_cast<std::size_t>(off), 3 * static_cast<std::size_t>(kb_)),
                           kb_, r, coef,
                           dout.empty() ? std::span<double>{}
                                        : dout.subspan(static_cast<std::size_t>(off),
                                                       3 * static_cast<std::size_t>(kb_)));
  }

  double dim_sample(int free_dim_slot, std::span<const double> out, Rng& rng) const {
    int off = dim_block_offset(free_dim_slot);
    return mixture_sample(
        out.subspan(static_cast<std::size_t>(off), 3 * static_cast<std::size_t>(kb_)), kb_, rng);
  }

 private:
  bool increment_parent_possible(const CrystalState& child) const {
    if (child.stage != Stage::Lattice || child.lat.at_source) return false;
    const auto& c = env_->active_constraint(child);
    for (int d : c.free_dims())
      if (child.lat.coords[static_cast<std::size_t>(d)] <= env_->config().min_increment)
        return false;
    return true;
  }

  Direction dir_ = Direction::Forward;
  const CrystalEnv* env_ = nullptr;
  const StateEncoder* encoder_ = nullptr;
  int kb_ = 5;
  int discrete_size_ = 0;
  int lp_block_ = 0;
  int out_dim_ = 0;
  nn::Mlp mlp_;
};

} // namespace crystalflow
