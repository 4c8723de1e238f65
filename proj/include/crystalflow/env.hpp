// The staged crystal environment: space group -> composition -> lattice
// parameters, with valid-action masks that enforce the hard constraints and
// never strand a trajectory.
#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "crystalflow/common.hpp"
#include "crystalflow/symtab.hpp"

namespace crystalflow {

// ---------------------------------------------------------------------------
// States

enum class Stage : std::uint8_t { SpaceGroup, Composition, Lattice, Done };

struct SpaceGroupState {
  std::optional<CrystalLatticeSystem> cls;
  std::optional<PointSymmetry> ps;
  std::optional<int> sg;
  bool operator==(const SpaceGroupState&) const = default;
};

struct CompositionState {
  std::vector<std::uint8_t> counts; // indexed by vocabulary position
  bool operator==(const CompositionState&) const = default;

  int total() const {
    int s = 0;
    for (auto c : counts) s += c;
    return s;
  }
  int distinct() const {
    int s = 0;
    for (auto c : counts) s += c > 0;
    return s;
  }
};

struct LatticeState {
  bool at_source = true;
  bool done = false;
  std::array<double, 6> coords{}; // cube coordinates in [0,1]; a,b,c,alpha,beta,gamma
  bool operator==(const LatticeState&) const = default;
};

struct CrystalState {
  Stage stage = Stage::SpaceGroup;
  SpaceGroupState sg;
  CompositionState comp;
  LatticeState lat;
  bool operator==(const CrystalState&) const = default;
};

// ---------------------------------------------------------------------------
// Actions

struct SetCls {
  CrystalLatticeSystem value;
  bool operator==(const SetCls&) const = default;
};
struct SetPs {
  PointSymmetry value;
  bool operator==(const SetPs&) const = default;
};
struct SetSg {
  int number;
  bool operator==(const SetSg&) const = default;
};
struct SgStop {
  bool operator==(const SgStop&) const = default;
};
struct AddAtoms {
  int element; // vocabulary index
  int amount;
  bool operator==(const AddAtoms&) const = default;
};
struct CompStop {
  bool operator==(const CompStop&) const = default;
};
struct LpFromSource {
  std::array<double, 6> coords; // absolute cube coords; free dims meaningful
  bool operator==(const LpFromSource&) const = default;
};
struct LpIncrement {
  std::array<double, 6> delta; // increments; free dims meaningful
  bool operator==(const LpIncrement&) const = default;
};
struct LpStop {
  bool operator==(const LpStop&) const = default;
};

using Action = std::variant<SetCls, SetPs, SetSg, SgStop, AddAtoms, CompStop, LpFromSource,
                            LpIncrement, LpStop>;

// ---------------------------------------------------------------------------
// Action mask
//
// Discrete stages expose a flat slot space:
//   space-group stage: [0,8) SetCls, [8,13) SetPs, [13,243) SetSg(n=slot-12),
//                      243 SgStop
//   composition stage: d*K + (k-1) for AddAtoms(d, k), then D*K for CompStop
// The lattice stage is continuous: flags say which move kinds are available.

struct ActionMask {
  Stage stage = Stage::SpaceGroup;
  std::vector<std::uint8_t> discrete; // SG / COMP stages
  bool lp_from_source = false;
  bool lp_increment = false;
  bool lp_stop = false;

  int discrete_valid_count() const {
    int n = 0;
    for (auto v : discrete) n += v != 0;
    return n;
  }
  bool any() const {
    return discrete_valid_count() > 0 || lp_from_source || lp_increment || lp_stop;
  }
};

inline constexpr int kSgStopSlot = 13 + kNumSpaceGroups; // 243
inline constexpr int kSgSlotCount = kSgStopSlot + 1;     // 244

// ---------------------------------------------------------------------------
// Terminal record (the canonical interchange representation)

struct TerminalRecord {
  std::optional<int> space_group;
  std::optional<CrystalLatticeSystem> crystal_lattice_system;
  std::optional<PointSymmetry> point_symmetry;
  std::vector<std::pair<std::string, int>> composition; // sorted by symbol
  std::optional<std::array<double, 6>> lattice;         // a,b,c in A; angles in degrees
};

// ---------------------------------------------------------------------------
// Environment configuration

struct EnvConfig {
  bool sg_stage = true;
  bool comp_stage = true;
  bool lp_stage = true;

  std::vector<std::string> elements;  // vocabulary; empty = full table
  std::vector<int> sg_whitelist;      // empty = shipped default list

  int max_per_element = 16; // K
  int max_atoms = 50;       // N_max
  int max_elements = 5;     // E_max

  double length_min = 0.9;
  double length_max = 100.0;
  double angle_min = 50.0;
  double angle_max = 150.0;
  double min_increment = 0.1; // delta, fraction of the unit range

  // Used when the space-group stage is disabled:
  int fixed_space_group = 0; // 0 = none
  LatticeSystem fixed_lattice_system = LatticeSystem::Cubic;
};

// ---------------------------------------------------------------------------
// Composition completability
//
// Decides whether a partial composition can still be extended (choosing new
// elements from the unused set, each with an allowed count) to an exactly
// charge-neutral composition within the atom and element budgets. Masking
// with this predicate guarantees rollouts never reach a dead end. A cheap
// reachable-charge interval bound rejects most infeasible candidates and a
// single-element patch check accepts most feasible ones; the full memoized
// set DP only runs on the residual hard cases.

class CompletionOracle {
 public:
  CompletionOracle() = default;

  CompletionOracle(std::vector<const ElementInfo*> elems, int max_per_element, int max_atoms)
      : elems_(std::move(elems)), K_(max_per_element), N_(max_atoms) {
    if (elems_.size() > 30) throw ConfigError("element vocabulary capped at 30");
    achievable_.resize(elems_.size());
    min_ox_ = 0;
    max_ox_ = 0;
    for (std::size_t d = 0; d < elems_.size(); ++d) {
      achievable_[d].resize(static_cast<std::size_t>(K_) + 1);
      achievable_[d][0] = IntSet::singleton(0);
      for (int k = 1; k <= K_; ++k)
        achievable_[d][k] = achievable_charges(elems_[d]->oxidation_states, k);
      min_ox_ = std::min(min_ox_, elems_[d]->oxidation_states.front());
      max_ox_ = std::max(max_ox_, elems_[d]->oxidation_states.back());
    }
    register_kmask(all_kmask()); // id 0: every count 1..K allowed
  }

  std::uint32_t all_kmask() const {
    return K_ >= 32 ? ~0u : ((1u << K_) - 1u);
  }

  // kmask bit (k-1) set = count k allowed for a single element.
  int register_kmask(std::uint32_t kmask) {
    for (std::size_t i = 0; i < kmasks_.size(); ++i)
      if (kmasks_[i] == kmask) return static_cast<int>(i);
    kmasks_.push_back(kmask);
    // prefix unions of achievable sets over allowed counts <= b
    PerKmask pk;
    pk.union_upto.resize(elems_.size());
    for (std::size_t d = 0; d < elems_.size(); ++d) {
      pk.union_upto[d].resize(static_cast<std::size_t>(K_) + 1);
      IntSet acc(std::min(0, min_ox_ * K_), std::max(0, max_ox_ * K_));
      pk.union_upto[d][0] = acc; // empty
      for (int k = 1; k <= K_; ++k) {
        if (kmask & (1u << (k - 1))) acc.union_with(achievable_[d][static_cast<std::size_t>(k)]);
        pk.union_upto[d][static_cast<std::size_t>(k)] = acc;
      }
    }
    per_kmask_.push_back(std::move(pk));
    return static_cast<int>(kmasks_.size()) - 1;
  }

  bool count_allowed(int kmask_id, int k) const {
    return k >= 1 && k <= K_ && (kmasks_[static_cast<std::size_t>(kmask_id)] & (1u << (k - 1)));
  }

  const IntSet& achievable(int elem, int k) const {
    return achievable_[static_cast<std::size_t>(elem)][static_cast<std::size_t>(k)];
  }

  // Exact: can charges in `reached` be cancelled by adding at most `slots`
  // new elements from `unused_mask`, each with a kmask-allowed count, using
  // at most `budget` further atoms? The empty addition counts, so a reached
  // zero always answers true.
  bool completable(const IntSet& reached, std::uint32_t unused_mask, int slots, int budget,
                   int kmask_id) const {
    if (reached.contains(0)) return true;
    if (slots <= 0 || budget <= 0 || unused_mask == 0) return false;

    // interval bound (sound rejection)
    int lo_add = 0, hi_add = 0;
    for (std::uint32_t m = unused_mask; m;) {
      int d = std::countr_zero(m);
      m &= m - 1;
      lo_add = std::min(lo_add, elems_[static_cast<std::size_t>(d)]->oxidation_states.front());
      hi_add = std::max(hi_add, elems_[static_cast<std::size_t>(d)]->oxidation_states.back());
    }
    if (reached.min_value() + budget * lo_add > 0 || reached.max_value() + budget * hi_add < 0)
      return false;

    // single-element patch (fast acceptance)
    int cap = std::min(K_, budget);
    const auto& pk = per_kmask_[static_cast<std::size_t>(kmask_id)];
    for (std::uint32_t m = unused_mask; m;) {
      int d = std::countr_zero(m);
      m &= m - 1;
      const IntSet& u = pk.union_upto[static_cast<std::size_t>(d)][static_cast<std::size_t>(cap)];
      if (IntSet::sum_contains(reached, u, 0)) return true;
    }
    if (slots == 1) return false;

    // full memoized set DP
    const IntSet& add = addable(unused_mask, slots, budget, kmask_id);
    return IntSet::sum_contains(reached, add, 0);
  }

  int min_ox() const { return min_ox_; }
  int max_ox() const { return max_ox_; }

 private:
  struct PerKmask {
    std::vector<std::vector<IntSet>> union_upto; // [elem][budget-capped prefix union]
  };

  // Achievable total charges of additions drawn from unused_mask with at most
  // `slots` elements and `budget` atoms (0 always included).
  const IntSet& addable(std::uint32_t unused_mask, int slots, int budget, int kmask_id) const {
    slots = std::min(slots, std::popcount(unused_mask));
    std::uint64_t key = (static_cast<std::uint64_t>(kmask_id) << 48) |
                        (static_cast<std::uint64_t>(unused_mask) << 16) |
                        (static_cast<std::uint64_t>(slots) << 8) |
                        static_cast<std::uint64_t>(budget);
    {
      std::lock_guard<std::mutex> lock(memo_mutex_);
      auto it = memo_.find(key);
      if (it != memo_.end()) return it->second;
    }
    IntSet result;
    if (unused_mask == 0 || slots == 0 || budget == 0) {
      result = IntSet::singleton(0);
    } else {
      int top = 31 - std::countl_zero(unused_mask);
      std::uint32_t rest = unused_mask & ~(1u << top);
      result = IntSet(std::min(0, budget * min_ox_), std::max(0, budget * max_ox_));
      result.union_with(addable(rest, slots, budget, kmask_id));
      for (int k = 1; k <= std::min(K_, budget); ++k) {
        if (!count_allowed(kmask_id, k)) continue;
        const IntSet& tail = addable(rest, slots - 1, budget - k, kmask_id);
        for (int v : achievable_[static_cast<std::size_t>(top)][static_cast<std::size_t>(k)].values())
          result.union_shifted(tail, v);
      }
    }
    std::lock_guard<std::mutex> lock(memo_mutex_);
    return memo_.emplace(key, std::move(result)).first->second;
  }

  std::vector<const ElementInfo*> elems_;
  int K_ = 0;
  int N_ = 0;
  int min_ox_ = 0, max_ox_ = 0;
  std::vector<std::vector<IntSet>> achievable_; // [elem][k]
  std::vector<std::uint32_t> kmasks_;
  std::vector<PerKmask> per_kmask_;
  mutable std::map<std::uint64_t, IntSet> memo_;
  mutable std::mutex memo_mutex_;
};

// ---------------------------------------------------------------------------
// Parent transitions

struct ParentSet {
  std::vector<std::pair<CrystalState, Action>> discrete;
  // Lattice states reachable by an increment have a continuous family of
  // parents parameterized by the increment vector.
  bool increment_family = false;
};

// ---------------------------------------------------------------------------
// CrystalEnv

class CrystalEnv {
 public:
  explicit CrystalEnv(EnvConfig cfg, const SymbolTable& table = SymbolTable::builtin())
      : cfg_(std::move(cfg)), table_(&table) {
    if (!cfg_.sg_stage && !cfg_.comp_stage && !cfg_.lp_stage)
      throw ConfigError("at least one stage must be enabled");
    if (cfg_.min_increment <= 0.0 || cfg_.min_increment >= 1.0)
      throw ConfigError("min_increment must be in (0, 1)");
    if (cfg_.length_min <= 0.0 || cfg_.length_min >= cfg_.length_max)
      throw ConfigError("bad length range");
    if (cfg_.angle_min >= cfg_.angle_max) throw ConfigError("bad angle range");
    if (cfg_.fixed_space_group != 0) table_->space_group(cfg_.fixed_space_group); // validates

    if (cfg_.comp_stage) {
      if (cfg_.max_per_element < 1 || cfg_.max_atoms < 1 || cfg_.max_elements < 1)
        throw ConfigError("composition bounds must be positive");
      if (cfg_.elements.empty())
        for (const auto& e : table_->elements()) cfg_.elements.push_back(e.symbol);
      for (const auto& sym : cfg_.elements) vocab_.push_back(&table_->element(sym));
      if (vocab_.size() > 30) throw ConfigError("element vocabulary capped at 30");
      for (std::size_t i = 0; i < vocab_.size(); ++i)
        for (std::size_t j = i + 1; j < vocab_.size(); ++j)
          if (vocab_[i] == vocab_[j]) throw ConfigError("duplicate element in vocabulary");
      cfg_.max_elements = std::min<int>(cfg_.max_elements, static_cast<int>(vocab_.size()));
      oracle_ = std::make_unique<CompletionOracle>(vocab_, cfg_.max_per_element, cfg_.max_atoms);
    }

    if (cfg_.sg_stage) {
      std::vector<int> wl = cfg_.sg_whitelist.empty() ? SymbolTable::default_whitelist()
                                                      : cfg_.sg_whitelist;
      std::sort(wl.begin(), wl.end());
      wl.erase(std::unique(wl.begin(), wl.end()), wl.end());
      for (int n : wl) {
        table_->space_group(n); // validates the number
        if (cfg_.comp_stage && !sg_supports_any_composition(n)) continue;
        effective_sgs_.push_back(n);
      }
      if (effective_sgs_.empty())
        throw ConfigError("no whitelisted space group admits a valid composition");
      configured_sg_count_ = static_cast<int>(wl.size());
    } else if (cfg_.comp_stage) {
      if (cfg_.fixed_space_group != 0) fixed_kmask_id_ = kmask_id_for(cfg_.fixed_space_group);
      // the composition stage is entered unconditionally, so some valid
      // composition must exist
      std::uint32_t all = (vocab_.size() >= 32) ? ~0u : ((1u << vocab_.size()) - 1u);
      bool any = false;
      for (int d = 0; d < num_elements() && !any; ++d)
        for (int k = 1; k <= std::min(cfg_.max_per_element, cfg_.max_atoms) && !any; ++k) {
          if (!oracle_->count_allowed(fixed_kmask_id_, k)) continue;
          any = oracle_->completable(oracle_->achievable(d, k), all & ~(1u << d),
                                     cfg_.max_elements - 1, cfg_.max_atoms - k, fixed_kmask_id_);
        }
      if (!any) throw ConfigError("no valid composition exists under this configuration");
    }

    // pinned cube coordinates for fixed angles
    for (int s = 0; s < kNumLatticeSystems; ++s) {
      const auto& c = table_->constraint(static_cast<LatticeSystem>(s));
      for (int d = 3; d < 6; ++d) {
        if (!c.is_fixed(d)) continue;
        double v = c.fixed_value[d];
        if (v < cfg_.angle_min || v > cfg_.angle_max)
          throw ConfigError("fixed angle outside configured angle range");
        pinned_coord_[static_cast<std::size_t>(s)][static_cast<std::size_t>(d)] =
            (v - cfg_.angle_min) / (cfg_.angle_max - cfg_.angle_min);
      }
    }
  }

  const EnvConfig& config() const { return cfg_; }
  const SymbolTable& table() const { return *table_; }
  const std::vector<const ElementInfo*>& vocabulary() const { return vocab_; }
  const std::vector<int>& effective_space_groups() const { return effective_sgs_; }
  int configured_space_group_count() const { return configured_sg_count_; }

  int num_elements() const { return static_cast<int>(vocab_.size()); }
  int comp_slot_count() const { return num_elements() * cfg_.max_per_element + 1; }
  int comp_stop_slot() const { return num_elements() * cfg_.max_per_element; }

  Stage first_stage() const {
    if (cfg_.sg_stage) return Stage::SpaceGroup;
    if (cfg_.comp_stage) return Stage::Composition;
    return Stage::Lattice;
  }

  Stage stage_after(Stage s) const {
    switch (s) {
      case Stage::SpaceGroup:
        if (cfg_.comp_stage) return Stage::Composition;
        [[fallthrough]];
      case Stage::Composition:
        if (cfg_.lp_stage) return Stage::Lattice;
        [[fallthrough]];
      default:
        return Stage::Done;
    }
  }

  CrystalState initial_state() const {
    CrystalState s;
    s.stage = first_stage();
    s.comp.counts.assign(static_cast<std::size_t>(num_elements()), 0);
    return s;
  }

  bool is_initial(const CrystalState& s) const { return s == initial_state(); }

  // Upper bound on trajectory length, derived from the stage caps.
  int max_trajectory_length() const {
    int n = 0;
    if (cfg_.sg_stage) n += 4; // cls, ps, sg, stop
    if (cfg_.comp_stage) n += cfg_.max_elements + 1;
    if (cfg_.lp_stage)
      n += 2 + static_cast<int>(std::ceil(1.0 / cfg_.min_increment));
    return n;
  }

  // The lattice constraint active for a state (or for a given space group).
  const LatticeConstraint& active_constraint(const CrystalState& s) const {
    if (cfg_.sg_stage) {
      if (!s.sg.sg) throw StateError("lattice constraint requested before space group selection");
      return table_->lattice_constraint(*s.sg.sg);
    }
    if (cfg_.fixed_space_group != 0) return table_->lattice_constraint(cfg_.fixed_space_group);
    return table_->constraint(cfg_.fixed_lattice_system);
  }

  double pinned_coord(LatticeSystem sys, int dim) const {
    return pinned_coord_[static_cast<std::size_t>(sys)][static_cast<std::size_t>(dim)];
  }

  // -------------------------------------------------------------------------
  // Valid actions

  ActionMask valid_actions(const CrystalState& s) const {
    if (s.stage == Stage::Done) throw StateError("terminal state has no actions");
    ActionMask m;
    m.stage = s.stage;
    switch (s.stage) {
      case Stage::SpaceGroup: {
        m.discrete.assign(kSgSlotCount, 0);
        if (s.sg.sg) {
          m.discrete[kSgStopSlot] = 1; // stop valid iff the space group is set
          break;
        }
        for (int n : effective_sgs_) {
          const auto& rec = table_->space_group(n);
          if (s.sg.cls && rec.crystal_lattice_system != *s.sg.cls) continue;
          if (s.sg.ps && rec.point_symmetry != *s.sg.ps) continue;
          m.discrete[static_cast<std::size_t>(12 + n)] = 1;
          if (!s.sg.cls)
            m.discrete[static_cast<std::size_t>(rec.crystal_lattice_system)] = 1;
          if (!s.sg.ps)
            m.discrete[static_cast<std::size_t>(8 + static_cast<int>(rec.point_symmetry))] = 1;
        }
        break;
      }
      case Stage::Composition: {
        m.discrete.assign(static_cast<std::size_t>(comp_slot_count()), 0);
        fill_comp_mask(s, m.discrete);
        break;
      }
      case Stage::Lattice: {
        const auto& c = active_constraint(s);
        if (s.lat.at_source) {
          m.lp_from_source = true;
        } else {
          m.lp_stop = true;
          bool room = true;
          for (int d : c.free_dims())
            if (1.0 - s.lat.coords[static_cast<std::size_t>(d)] < cfg_.min_increment) {
              room = false;
              break;
            }
          m.lp_increment = room;
        }
        break;
      }
      case Stage::Done:
        break;
    }
    return m;
  }

  bool action_valid(const CrystalState& s, const Action& a) const {
    if (s.stage == Stage::Done) return false;
    ActionMask m = valid_actions(s);
    return action_valid(s, a, m);
  }

  bool action_valid(const CrystalState& s, const Action& a, const ActionMask& m) const {
    switch (s.stage) {
      case Stage::SpaceGroup:
      case Stage::Composition: {
        int slot = action_to_slot(s.stage, a);
        if (slot < 0 || slot >= static_cast<int>(m.discrete.size())) return false;
        return m.discrete[static_cast<std::size_t>(slot)] != 0;
      }
      case Stage::Lattice: {
        const auto& c = active_constraint(s);
        if (const auto* p = std::get_if<LpFromSource>(&a)) {
          if (!m.lp_from_source) return false;
          for (int d : c.free_dims()) {
            double v = p->coords[static_cast<std::size_t>(d)];
            if (!(v > 0.0 && v < 1.0)) return false;
          }
          return true;
        }
        if (const auto* p = std::get_if<LpIncrement>(&a)) {
          if (!m.lp_increment) return false;
          for (int d : c.free_dims()) {
            double u = p->delta[static_cast<std::size_t>(d)];
            double x = s.lat.coords[static_cast<std::size_t>(d)];
            if (!(u >= cfg_.min_increment && x + u <= 1.0)) return false;
          }
          return true;
        }
        return std::holds_alternative<LpStop>(a) && m.lp_stop;
      }
      case Stage::Done:
        return false;
    }
    return false;
  }

  // -------------------------------------------------------------------------
  // Transition

  CrystalState step(const CrystalState& s, const Action& a) const {
    ActionMask m = valid_actions(s);
    return step(s, a, m);
  }

  CrystalState step(const CrystalState& s, const Action& a, const ActionMask& m) const {
    if (!action_valid(s, a, m)) throw MaskedActionError("action is masked in this state");
    return apply(s, a);
  }

  // -------------------------------------------------------------------------
  // Parents

  // Deterministic inverse: the unique parent reached by undoing `a` from `s`.
  CrystalState parent_via(const CrystalState& s, const Action& a) const {
    CrystalState p = s;
    if (std::holds_alternative<SetCls>(a)) {
      p.sg.cls.reset();
    } else if (std::holds_alternative<SetPs>(a)) {
      p.sg.ps.reset();
    } else if (const auto* x = std::get_if<SetSg>(&a)) {
      (void)x;
      throw StateError("SetSg parent is ambiguous; enumerate parent_transitions");
    } else if (std::holds_alternative<SgStop>(a)) {
      p.stage = Stage::SpaceGroup;
    } else if (const auto* add = std::get_if<AddAtoms>(&a)) {
      p.comp.counts[static_cast<std::size_t>(add->element)] = 0;
    } else if (std::holds_alternative<CompStop>(a)) {
      p.stage = Stage::Composition;
      p.lat = LatticeState{};
    } else if (const auto* src = std::get_if<LpFromSource>(&a)) {
      (void)src;
      p.lat = LatticeState{};
      p.lat.at_source = true;
    } else if (const auto* inc = std::get_if<LpIncrement>(&a)) {
      const auto& c = active_constraint(s);
      for (int d = 0; d < 6; ++d) {
        int rep = c.representative[d];
        if (rep >= 0)
          p.lat.coords[static_cast<std::size_t>(d)] =
              s.lat.coords[static_cast<std::size_t>(rep)] -
              inc->delta[static_cast<std::size_t>(rep)];
      }
    } else if (std::holds_alternative<LpStop>(a)) {
      p.stage = Stage::Lattice;
      p.lat.done = false;
    }
    return p;
  }

  // All (parent, action) pairs with step(parent, action) == s. Candidates are
  // re-validated against the parent's own mask.
  ParentSet parent_transitions(const CrystalState& s) const {
    if (is_initial(s)) throw StateError("the source state has no parents");
    ParentSet out;
    auto consider = [&](CrystalState parent, Action a) {
      if (!action_valid(parent, a)) return;
      if (!(apply(parent, a) == s)) return;
      out.discrete.emplace_back(std::move(parent), std::move(a));
    };

    switch (s.stage) {
      case Stage::SpaceGroup: {
        if (s.sg.sg) {
          // any subset of {cls, ps} may have been set before SetSg
          for (bool had_cls : {true, false})
            for (bool had_ps : {true, false}) {
              CrystalState p = s;
              p.sg.sg.reset();
              if (!had_cls) p.sg.cls.reset();
              if (!had_ps) p.sg.ps.reset();
              consider(std::move(p), SetSg{*s.sg.sg});
            }
        } else {
          if (s.sg.cls) {
            CrystalState p = s;
            p.sg.cls.reset();
            consider(std::move(p), SetCls{*s.sg.cls});
          }
          if (s.sg.ps) {
            CrystalState p = s;
            p.sg.ps.reset();
            consider(std::move(p), SetPs{*s.sg.ps});
          }
        }
        break;
      }
      case Stage::Composition: {
        if (s.comp.total() == 0) {
          if (cfg_.sg_stage) {
            CrystalState p = s;
            p.stage = Stage::SpaceGroup;
            consider(std::move(p), SgStop{});
          }
        } else {
          for (int d = 0; d < num_elements(); ++d) {
            int k = s.comp.counts[static_cast<std::size_t>(d)];
            if (k == 0) continue;
            CrystalState p = s;
            p.comp.counts[static_cast<std::size_t>(d)] = 0;
            consider(std::move(p), AddAtoms{d, k});
          }
        }
        break;
      }
      case Stage::Lattice: {
        if (s.lat.at_source) {
          CrystalState p = s;
          p.lat = LatticeState{};
          if (cfg_.comp_stage) {
            p.stage = Stage::Composition;
            consider(std::move(p), CompStop{});
          } else if (cfg_.sg_stage) {
            p.stage = Stage::SpaceGroup;
            consider(std::move(p), SgStop{});
          }
        } else {
          CrystalState p = s;
          p.lat = LatticeState{};
          consider(std::move(p), LpFromSource{s.lat.coords});
          const auto& c = active_constraint(s);
          out.increment_family = true;
          for (int d : c.free_dims())
            if (s.lat.coords[static_cast<std::size_t>(d)] <= cfg_.min_increment)
              out.increment_family = false;
        }
        break;
      }
      case Stage::Done: {
        CrystalState p = s;
        p.stage = Stage::Lattice;
        p.lat.done = false;
        if (cfg_.lp_stage) {
          consider(std::move(p), LpStop{});
        } else if (cfg_.comp_stage) {
          p.stage = Stage::Composition;
          p.lat = LatticeState{};
          consider(std::move(p), CompStop{});
        } else {
          p.stage = Stage::SpaceGroup;
          p.lat = LatticeState{};
          consider(std::move(p), SgStop{});
        }
        break;
      }
    }
    return out;
  }

  // -------------------------------------------------------------------------
  // Cube -> physical lattice parameters

  std::array<double, 6> cube_to_physical(const LatticeState& lat,
                                         const LatticeConstraint& c) const {
    if (lat.at_source) throw StateError("lattice parameters are unset at the source");
    std::array<double, 6> out{};
    for (int d = 0; d < 3; ++d) {
      int rep = c.representative[d];
      double x = lat.coords[static_cast<std::size_t>(rep)];
      out[static_cast<std::size_t>(d)] = cfg_.length_min + x * (cfg_.length_max - cfg_.length_min);
    }
    for (int d = 3; d < 6; ++d) {
      if (c.is_fixed(d)) {
        out[static_cast<std::size_t>(d)] = c.fixed_value[d]; // exact constant
      } else {
        int rep = c.representative[d];
        double x = lat.coords[static_cast<std::size_t>(rep)];
        out[static_cast<std::size_t>(d)] = cfg_.angle_min + x * (cfg_.angle_max - cfg_.angle_min);
      }
    }
    // tied dims share a representative coordinate, so equality is exact
    return out;
  }

  TerminalRecord terminal_record(const CrystalState& s) const {
    if (s.stage != Stage::Done) throw StateError("terminal record requested for a live state");
    TerminalRecord r;
    if (cfg_.sg_stage) {
      r.space_group = s.sg.sg;
      r.crystal_lattice_system = s.sg.cls;
      r.point_symmetry = s.sg.ps;
    } else if (cfg_.fixed_space_group != 0) {
      const auto& rec = table_->space_group(cfg_.fixed_space_group);
      r.space_group = rec.number;
      r.crystal_lattice_system = rec.crystal_lattice_system;
      r.point_symmetry = rec.point_symmetry;
    }
    if (cfg_.comp_stage) {
      for (int d = 0; d < num_elements(); ++d)
        if (s.comp.counts[static_cast<std::size_t>(d)] > 0)
          r.composition.emplace_back(vocab_[static_cast<std::size_t>(d)]->symbol,
                                     s.comp.counts[static_cast<std::size_t>(d)]);
      std::sort(r.composition.begin(), r.composition.end());
    }
    if (cfg_.lp_stage) r.lattice = cube_to_physical(s.lat, active_constraint(s));
    return r;
  }

  // -------------------------------------------------------------------------
  // Slot mapping for discrete stages

  int action_to_slot(Stage stage, const Action& a) const {
    if (stage == Stage::SpaceGroup) {
      if (const auto* x = std::get_if<SetCls>(&a)) return static_cast<int>(x->value);
      if (const auto* x = std::get_if<SetPs>(&a)) return 8 + static_cast<int>(x->value);
      if (const auto* x = std::get_if<SetSg>(&a)) return 12 + x->number;
      if (std::holds_alternative<SgStop>(a)) return kSgStopSlot;
      return -1;
    }
    if (stage == Stage::Composition) {
      if (const auto* x = std::get_if<AddAtoms>(&a))
        return x->element * cfg_.max_per_element + (x->amount - 1);
      if (std::holds_alternative<CompStop>(a)) return comp_stop_slot();
      return -1;
    }
    return -1;
  }

  Action slot_to_action(Stage stage, int slot) const {
    if (stage == Stage::SpaceGroup) {
      if (slot < 8) return SetCls{static_cast<CrystalLatticeSystem>(slot)};
      if (slot < 13) return SetPs{static_cast<PointSymmetry>(slot - 8)};
      if (slot < kSgStopSlot) return SetSg{slot - 12};
      return SgStop{};
    }
    if (slot == comp_stop_slot()) return CompStop{};
    return AddAtoms{slot / cfg_.max_per_element, slot % cfg_.max_per_element + 1};
  }

  // Reachable charge set of the current composition (exact).
  IntSet reached_charges(const CompositionState& comp) const {
    IntSet q = IntSet::singleton(0);
    for (int d = 0; d < num_elements(); ++d) {
      int k = comp.counts[static_cast<std::size_t>(d)];
      if (k > 0) q = IntSet::sum(q, oracle_->achievable(d, k));
    }
    return q;
  }

  int kmask_id_for_state(const CrystalState& s) const {
    if (cfg_.sg_stage) return kmask_id_for(*s.sg.sg);
    return fixed_kmask_id_;
  }

 private:
  CrystalState apply(const CrystalState& s, const Action& a) const {
    CrystalState n = s;
    if (const auto* x = std::get_if<SetCls>(&a)) {
      n.sg.cls = x->value;
    } else if (const auto* x = std::get_if<SetPs>(&a)) {
      n.sg.ps = x->value;
    } else if (const auto* x = std::get_if<SetSg>(&a)) {
      const auto& rec = table_->space_group(x->number);
      n.sg.sg = x->number;
      n.sg.cls = rec.crystal_lattice_system; // back-fill
      n.sg.ps = rec.point_symmetry;
    } else if (std::holds_alternative<SgStop>(a)) {
      n.stage = stage_after(Stage::SpaceGroup);
    } else if (const auto* x = std::get_if<AddAtoms>(&a)) {
      n.comp.counts[static_cast<std::size_t>(x->element)] =
          static_cast<std::uint8_t>(x->amount);
    } else if (std::holds_alternative<CompStop>(a)) {
      n.stage = stage_after(Stage::Composition);
    } else if (const auto* x = std::get_if<LpFromSource>(&a)) {
      n.lat.at_source = false;
      set_lattice_coords(n, x->coords);
    } else if (const auto* x = std::get_if<LpIncrement>(&a)) {
      std::array<double, 6> next = s.lat.coords;
      const auto& c = active_constraint(s);
      for (int d : c.free_dims())
        next[static_cast<std::size_t>(d)] += x->delta[static_cast<std::size_t>(d)];
      set_lattice_coords(n, next);
    } else if (std::holds_alternative<LpStop>(a)) {
      n.lat.done = true;
      n.stage = Stage::Done;
    }
    if (n.stage == Stage::Lattice && !cfg_.lp_stage) n.stage = Stage::Done;
    return n;
  }

  // Writes free-dim values, mirrors ties, pins fixed angles.
  void set_lattice_coords(CrystalState& s, const std::array<double, 6>& values) const {
    const auto& c = active_constraint(s);
    for (int d = 0; d < 6; ++d) {
      int rep = c.representative[d];
      if (rep < 0)
        s.lat.coords[static_cast<std::size_t>(d)] = pinned_coord(c.system, d);
      else
        s.lat.coords[static_cast<std::size_t>(d)] = values[static_cast<std::size_t>(rep)];
    }
  }

  int kmask_id_for(int sg) const {
    std::lock_guard<std::mutex> lock(kmask_mutex_);
    auto it = sg_kmask_id_.find(sg);
    if (it != sg_kmask_id_.end()) return it->second;
    std::uint32_t mask = 0;
    for (int k = 1; k <= cfg_.max_per_element; ++k)
      if (table_->count_compatible(sg, k)) mask |= 1u << (k - 1);
    int id = oracle_->register_kmask(mask);
    sg_kmask_id_[sg] = id;
    return id;
  }

  bool sg_supports_any_composition(int sg) const {
    int kid = kmask_id_for(sg);
    std::uint32_t all = (vocab_.size() >= 32) ? ~0u : ((1u << vocab_.size()) - 1u);
    for (int d = 0; d < num_elements(); ++d)
      for (int k = 1; k <= std::min(cfg_.max_per_element, cfg_.max_atoms); ++k) {
        if (!oracle_->count_allowed(kid, k)) continue;
        if (oracle_->completable(oracle_->achievable(d, k), all & ~(1u << d),
                                 cfg_.max_elements - 1, cfg_.max_atoms - k, kid))
          return true;
      }
    return false;
  }

  void fill_comp_mask(const CrystalState& s, std::vector<std::uint8_t>& mask) const {
    int kid = kmask_id_for_state(s);
    int total = s.comp.total();
    int distinct = s.comp.distinct();
    IntSet q = reached_charges(s.comp);

    // stop: nonempty, exactly neutral, all counts representable
    if (total > 0 && q.contains(0)) {
      bool counts_ok = true;
      for (int d = 0; d < num_elements(); ++d) {
        int k = s.comp.counts[static_cast<std::size_t>(d)];
        if (k > 0 && !oracle_->count_allowed(kid, k)) counts_ok = false;
      }
      if (counts_ok) mask[static_cast<std::size_t>(comp_stop_slot())] = 1;
    }

    if (distinct >= cfg_.max_elements) return;
    std::uint32_t unused = 0;
    for (int d = 0; d < num_elements(); ++d)
      if (s.comp.counts[static_cast<std::size_t>(d)] == 0) unused |= 1u << d;

    for (int d = 0; d < num_elements(); ++d) {
      if (s.comp.counts[static_cast<std::size_t>(d)] != 0) continue;
      int kcap = std::min(cfg_.max_per_element, cfg_.max_atoms - total);
      for (int k = 1; k <= kcap; ++k) {
        if (!oracle_->count_allowed(kid, k)) continue;
        IntSet with = IntSet::sum(q, oracle_->achievable(d, k));
        if (oracle_->completable(with, unused & ~(1u << d), cfg_.max_elements - distinct - 1,
                                 cfg_.max_atoms - total - k, kid))
          mask[static_cast<std::size_t>(d * cfg_.max_per_element + k - 1)] = 1;
      }
    }
  }

  EnvConfig cfg_;
  const SymbolTable* table_;
  std::vector<const ElementInfo*> vocab_;
  std::vector<int> effective_sgs_;
  int configured_sg_count_ = 0;
  std::unique_ptr<CompletionOracle> oracle_;
  int fixed_kmask_id_ = 0;
  mutable std::map<int, int> sg_kmask_id_;
  mutable std::mutex kmask_mutex_;
  std::array<std::array<double, 6>, kNumLatticeSystems> pinned_coord_{};
};

// ---------------------------------------------------------------------------
// Hash support (oracle enumeration, test bookkeeping)

inline std::size_t hash_combine(std::size_t h, std::size_t v) {
  return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

} // namespace crystalflow

template <>
struct std::hash<crystalflow::CrystalState> {
  std::size_t operator()(const crystalflow::CrystalState& s) const {
    using crystalflow::hash_combine;
    std::size_t h = static_cast<std::size_t>(s.stage);
    h = hash_combine(h, s.sg.cls ? 1 + static_cast<std::size_t>(*s.sg.cls) : 0);
    h = hash_combine(h, s.sg.ps ? 1 + static_cast<std::size_t>(*s.sg.ps) : 0);
    h = hash_combine(h, s.sg.sg ? static_cast<std::size_t>(*s.sg.sg) : 0);
    for (auto c : s.comp.counts) h = hash_combine(h, c);
    h = hash_combine(h, s.lat.at_source);
    h = hash_combine(h, s.lat.done);
    if (!s.lat.at_source)
      for (double x : s.lat.coords) h = hash_combine(h, std::bit_cast<std::uint64_t>(x));
    return h;
  }
};
