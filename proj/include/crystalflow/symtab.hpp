// Static crystallographic and chemical lookup tables.
//
// Single source of truth for the four hard constraints:
//   C1  space-group / crystal-lattice-system / point-symmetry compatibility
//   C2  per-element atom counts representable by Wyckoff multiplicities
//   C3  charge neutrality feasibility over per-atom oxidation states
//   C4  lattice-parameter ties and fixed angles per lattice system
//
// Tables are parsed once from the embedded copies of the data/ files and are
// immutable afterwards; all queries are safe for concurrent use.
#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "crystalflow/common.hpp"
#include "crystalflow/data/embedded_tables.hpp"

namespace crystalflow {

// ---------------------------------------------------------------------------
// Category enums

enum class CrystalLatticeSystem : std::uint8_t {
  Triclinic,
  Monoclinic,
  Orthorhombic,
  Tetragonal,
  TrigonalRhombohedral,
  TrigonalHexagonal,
  HexagonalHexagonal,
  Cubic,
};
inline constexpr int kNumCrystalLatticeSystems = 8;

enum class PointSymmetry : std::uint8_t {
  Centrosymmetric,
  NonCentrosymmetric,
  Enantiomorphic,
  Polar,
  EnantiomorphicPolar,
};
inline constexpr int kNumPointSymmetries = 5;

enum class LatticeSystem : std::uint8_t {
  Triclinic,
  Monoclinic,
  Orthorhombic,
  Tetragonal,
  Rhombohedral,
  Hexagonal,
  Cubic,
};
inline constexpr int kNumLatticeSystems = 7;

inline constexpr int kNumSpaceGroups = 230;

inline std::string_view to_string(CrystalLatticeSystem c) {
  switch (c) {
    case CrystalLatticeSystem::Triclinic: return "triclinic";
    case CrystalLatticeSystem::Monoclinic: return "monoclinic";
    case CrystalLatticeSystem::Orthorhombic: return "orthorhombic";
    case CrystalLatticeSystem::Tetragonal: return "tetragonal";
    case CrystalLatticeSystem::TrigonalRhombohedral: return "trigonal-rhombohedral";
    case CrystalLatticeSystem::TrigonalHexagonal: return "trigonal-hexagonal";
    case CrystalLatticeSystem::HexagonalHexagonal: return "hexagonal-hexagonal";
    case CrystalLatticeSystem::Cubic: return "cubic";
  }
  throw TableKeyError("bad crystal-lattice system value");
}

inline std::string_view to_string(PointSymmetry p) {
  switch (p) {
    case PointSymmetry::Centrosymmetric: return "centrosymmetric";
    case PointSymmetry::NonCentrosymmetric: return "non-centrosymmetric";
    case PointSymmetry::Enantiomorphic: return "enantiomorphic";
    case PointSymmetry::Polar: return "polar";
    case PointSymmetry::EnantiomorphicPolar: return "enantiomorphic-polar";
  }
  throw TableKeyError("bad point symmetry value");
}

inline std::string_view to_string(LatticeSystem s) {
  switch (s) {
    case LatticeSystem::Triclinic: return "triclinic";
    case LatticeSystem::Monoclinic: return "monoclinic";
    case LatticeSystem::Orthorhombic: return "orthorhombic";
    case LatticeSystem::Tetragonal: return "tetragonal";
    case LatticeSystem::Rhombohedral: return "rhombohedral";
    case LatticeSystem::Hexagonal: return "hexagonal";
    case LatticeSystem::Cubic: return "cubic";
  }
  throw TableKeyError("bad lattice system value");
}

template <typename Enum>
inline Enum parse_enum(std::string_view name, int count, std::string_view what) {
  for (int i = 0; i < count; ++i)
    if (to_string(static_cast<Enum>(i)) == name) return static_cast<Enum>(i);
  throw TableKeyError("unknown " + std::string(what) + ": " + std::string(name));
}

inline CrystalLatticeSystem parse_crystal_lattice_system(std::string_view s) {
  return parse_enum<CrystalLatticeSystem>(s, kNumCrystalLatticeSystems, "crystal-lattice system");
}
inline PointSymmetry parse_point_symmetry(std::string_view s) {
  return parse_enum<PointSymmetry>(s, kNumPointSymmetries, "point symmetry");
}
inline LatticeSystem parse_lattice_system(std::string_view s) {
  return parse_enum<LatticeSystem>(s, kNumLatticeSystems, "lattice system");
}

// The 8-way crystal-lattice system determines the 7-way lattice system.
inline LatticeSystem lattice_system_of(CrystalLatticeSystem c) {
  switch (c) {
    case CrystalLatticeSystem::Triclinic: return LatticeSystem::Triclinic;
    case CrystalLatticeSystem::Monoclinic: return LatticeSystem::Monoclinic;
    case CrystalLatticeSystem::Orthorhombic: return LatticeSystem::Orthorhombic;
    case CrystalLatticeSystem::Tetragonal: return LatticeSystem::Tetragonal;
    case CrystalLatticeSystem::TrigonalRhombohedral: return LatticeSystem::Rhombohedral;
    case CrystalLatticeSystem::TrigonalHexagonal: return LatticeSystem::Hexagonal;
    case CrystalLatticeSystem::HexagonalHexagonal: return LatticeSystem::Hexagonal;
    case CrystalLatticeSystem::Cubic: return LatticeSystem::Cubic;
  }
  throw TableKeyError("bad crystal-lattice system value");
}

// ---------------------------------------------------------------------------
// Records

struct SpaceGroupRecord {
  int number = 0;
  std::string hermann_mauguin;
  CrystalLatticeSystem crystal_lattice_system{};
  PointSymmetry point_symmetry{};
  LatticeSystem lattice_system{};
  std::vector<int> wyckoff_multiplicities; // ascending, unique, non-empty

  int min_multiplicity() const { return wyckoff_multiplicities.front(); }
};

inline constexpr int kNumElementProperties = 8;

struct ElementInfo {
  std::string symbol;
  int z = 0;
  int period = 0;
  int group = 0;
  std::vector<int> oxidation_states;                  // ascending, non-empty
  std::array<double, kNumElementProperties> properties{}; // see data/elements.tsv
};

// Compiled per-dimension view of the lattice constraints. The six lattice
// dimensions are indexed 0..5 as a, b, c, alpha, beta, gamma. Each dimension
// is either fixed (angles only) or tied to a representative free dimension
// (possibly itself).
struct LatticeConstraint {
  LatticeSystem system{};
  std::array<int, 6> representative{};   // -1 for fixed dims, else dim index
  std::array<double, 6> fixed_value{};   // degrees; NaN unless fixed

  bool is_fixed(int dim) const { return representative[dim] < 0; }
  bool is_free(int dim) const { return representative[dim] == dim; }

  std::vector<int> free_dims() const {
    std::vector<int> out;
    for (int d = 0; d < 6; ++d)
      if (is_free(d)) out.push_back(d);
    return out;
  }
};

// ---------------------------------------------------------------------------
// Charge-set algebra (used by C3 feasibility and the composition masks)

// A set of integers stored as a bitset with an offset. The base is fixed at
// construction; capacity grows upward on demand. Set operations work on whole
// 64-bit words, which keeps the charge algebra in the action masks cheap.
class IntSet {
 public:
  IntSet() : IntSet(0, 0) {}
  IntSet(int lo, int hi)
      : lo_(lo), words_(static_cast<std::size_t>(std::max(hi - lo, 0)) / 64 + 1) {}

  static IntSet singleton(int v) {
    IntSet s(v, v);
    s.insert(v);
    return s;
  }

  int lo() const { return lo_; }
  int hi() const { return lo_ + static_cast<int>(words_.size()) * 64 - 1; }

  void insert(int v) {
    if (v < lo_) throw std::logic_error("IntSet: value below base");
    grow_for(v);
    words_[idx(v)] |= bit_of(v);
  }

  bool contains(int v) const {
    if (v < lo_ || v > hi()) return false;
    return (words_[idx(v)] & bit_of(v)) != 0;
  }

  bool empty() const {
    for (auto w : words_)
      if (w) return false;
    return true;
  }

  int count() const {
    int n = 0;
    for (auto w : words_) n += std::popcount(w);
    return n;
  }

  // smallest / largest member; set must be non-empty
  int min_value() const {
    for (std::size_t w = 0; w < words_.size(); ++w)
      if (words_[w]) return lo_ + static_cast<int>(w) * 64 + std::countr_zero(words_[w]);
    throw std::logic_error("IntSet: empty");
  }
  int max_value() const {
    for (std::size_t w = words_.size(); w-- > 0;)
      if (words_[w]) return lo_ + static_cast<int>(w) * 64 + 63 - std::countl_zero(words_[w]);
    throw std::logic_error("IntSet: empty");
  }

  void union_with(const IntSet& other) { union_shifted(other, 0); }

  // this |= (other + shift), word-level
  void union_shifted(const IntSet& other, int shift) {
    int delta = other.lo_ + shift - lo_;
    if (delta < 0) throw std::logic_error("IntSet: shift below base");
    grow_for(other.hi() + shift);
    std::size_t word_off = static_cast<std::size_t>(delta) / 64;
    int bit_off = delta % 64;
    for (std::size_t w = 0; w < other.words_.size(); ++w) {
      std::uint64_t bits = other.words_[w];
      if (!bits) continue;
      words_[w + word_off] |= bits << bit_off;
      if (bit_off && w + word_off + 1 < words_.size())
        words_[w + word_off + 1] |= bits >> (64 - bit_off);
    }
  }

  std::vector<int> values() const {
    std::vector<int> out;
    for (std::size_t w = 0; w < words_.size(); ++w) {
      std::uint64_t bits = words_[w];
      while (bits) {
        int b = std::countr_zero(bits);
        out.push_back(lo_ + static_cast<int>(w) * 64 + b);
        bits &= bits - 1;
      }
    }
    return out;
  }

  // Minkowski sum {x + y}
  static IntSet sum(const IntSet& a, const IntSet& b) {
    const IntSet& big = a.count() >= b.count() ? a : b;
    const IntSet& small = a.count() >= b.count() ? b : a;
    IntSet out(a.lo_ + b.lo_, a.hi() + b.hi());
    for (int v : small.values()) out.union_shifted(big, v);
    return out;
  }

  // true iff target ∈ {x + y : x ∈ a, y ∈ b}
  static bool sum_contains(const IntSet& a, const IntSet& b, int target) {
    const IntSet& big = a.count() >= b.count() ? a : b;
    const IntSet& small = a.count() >= b.count() ? b : a;
    for (int v : small.values())
      if (big.contains(target - v)) return true;
    return false;
  }

 private:
  void grow_for(int v) {
    std::size_t need = static_cast<std::size_t>(v - lo_) / 64 + 1;
    if (need > words_.size()) words_.resize(need, 0);
  }
  std::size_t idx(int v) const { return static_cast<std::size_t>(v - lo_) / 64; }
  std::uint64_t bit_of(int v) const {
    return std::uint64_t{1} << (static_cast<std::size_t>(v - lo_) % 64);
  }
  int lo_ = 0;
  std::vector<std::uint64_t> words_;
};

// All total charges achievable by k atoms, each independently choosing one of
// the given oxidation states. k = 0 gives {0}.
inline IntSet achievable_charges(std::span<const int> oxidation_states, int k) {
  int mn = *std::min_element(oxidation_states.begin(), oxidation_states.end());
  int mx = *std::max_element(oxidation_states.begin(), oxidation_states.end());
  IntSet cur = IntSet::singleton(0);
  for (int i = 0; i < k; ++i) {
    IntSet next(cur.lo() + mn, cur.hi() + mx);
    for (int s : oxidation_states) next.union_shifted(cur, s);
    cur = std::move(next);
  }
  return cur;
}

// Coin-problem feasibility: can n be written as a non-negative integer
// combination of the given denominations?
inline bool representable(int n, std::span<const int> denominations) {
  if (n < 0) return false;
  std::vector<char> dp(static_cast<std::size_t>(n) + 1, 0);
  dp[0] = 1;
  for (int c : denominations) {
    if (c <= 0) throw ConfigError("denominations must be positive");
    for (int v = c; v <= n; ++v)
      if (dp[v - c]) dp[v] = 1;
  }
  return dp[n] != 0;
}

// ---------------------------------------------------------------------------
// SymbolTable

class SymbolTable {
 public:
  // Parses the three table files (contents, not paths).
  static SymbolTable parse(std::string_view space_groups_tsv,
                           std::string_view elements_tsv,
                           std::string_view lattice_constraints_tsv) {
    SymbolTable t;
    t.parse_space_groups(space_groups_tsv);
    t.parse_elements(elements_tsv);
    t.parse_lattice_constraints(lattice_constraints_tsv);
    t.validate();
    return t;
  }

  // The embedded tables, parsed once per process.
  static const SymbolTable& builtin() {
    static const SymbolTable t = parse(data::kSpaceGroupsTsv, data::kElementsTsv,
                                       data::kLatticeConstraintsTsv);
    return t;
  }

  // The shipped default space-group whitelist (113 groups).
  static const std::vector<int>& default_whitelist() {
    static const std::vector<int> wl = [] {
      std::vector<int> out;
      for (std::string_view line : split_lines(data::kDefaultWhitelist)) {
        if (line.empty() || line[0] == '#') continue;
        out.push_back(parse_int(line));
      }
      return out;
    }();
    return wl;
  }

  const std::vector<SpaceGroupRecord>& space_groups() const { return groups_; }
  const std::vector<ElementInfo>& elements() const { return elements_; }

  const SpaceGroupRecord& space_group(int number) const {
    if (number < 1 || number > kNumSpaceGroups)
      throw TableKeyError("space group number out of range: " + std::to_string(number));
    return groups_[static_cast<std::size_t>(number - 1)];
  }

  const ElementInfo& element(std::string_view symbol) const {
    auto it = element_index_.find(std::string(symbol));
    if (it == element_index_.end())
      throw TableKeyError("unknown element symbol: " + std::string(symbol));
    return elements_[it->second];
  }
  bool has_element(std::string_view symbol) const {
    return element_index_.count(std::string(symbol)) != 0;
  }

  const LatticeConstraint& constraint(LatticeSystem s) const {
    return constraints_[static_cast<std::size_t>(s)];
  }

  // C4: the lattice constraint active under a space group.
  const LatticeConstraint& lattice_constraint(int sg) const {
    return constraint(space_group(sg).lattice_system);
  }

  // C1: all space groups whose record matches every provided filter.
  std::vector<int> space_groups_matching(std::optional<CrystalLatticeSystem> cls,
                                         std::optional<PointSymmetry> ps) const {
    std::vector<int> out;
    for (const auto& g : groups_) {
      if (cls && g.crystal_lattice_system != *cls) continue;
      if (ps && g.point_symmetry != *ps) continue;
      out.push_back(g.number);
    }
    return out;
  }

  // C1: category values that co-occur with the filters in at least one record.
  std::pair<std::set<CrystalLatticeSystem>, std::set<PointSymmetry>> compatible_categories(
      std::optional<PointSymmetry> ps, std::optional<CrystalLatticeSystem> cls) const {
    std::set<CrystalLatticeSystem> cs;
    std::set<PointSymmetry> pss;
    for (const auto& g : groups_) {
      if (cls && g.crystal_lattice_system != *cls) continue;
      if (ps && g.point_symmetry != *ps) continue;
      cs.insert(g.crystal_lattice_system);
      pss.insert(g.point_symmetry);
    }
    return {cs, pss};
  }

  // C2: n atoms of one element representable by the group's multiplicities.
  bool count_compatible(int sg, int n) const {
    if (n < 1) throw ConfigError("count_compatible requires n >= 1");
    return representable(n, space_group(sg).wyckoff_multiplicities);
  }

  // C3: exact feasibility of total charge zero, each atom of element d
  // choosing independently among that element's oxidation states.
  bool neutrality_feasible(std::span<const std::pair<const ElementInfo*, int>> counts) const {
    IntSet reached = IntSet::singleton(0);
    for (const auto& [elem, k] : counts) {
      if (k < 0) throw ConfigError("negative element count");
      if (k == 0) continue;
      reached = IntSet::sum(reached, achievable_charges(elem->oxidation_states, k));
    }
    return reached.contains(0);
  }

  bool neutrality_feasible(const std::map<std::string, int>& counts) const {
    std::vector<std::pair<const ElementInfo*, int>> v;
    for (const auto& [sym, k] : counts) v.emplace_back(&element(sym), k);
    return neutrality_feasible(v);
  }

 private:
  static std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (pos < text.size()) {
      std::size_t end = text.find('\n', pos);
      if (end == std::string_view::npos) end = text.size();
      out.push_back(text.substr(pos, end - pos));
      pos = end + 1;
    }
    return out;
  }

  static std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
      std::size_t end = line.find(sep, pos);
      if (end == std::string_view::npos) {
        out.push_back(line.substr(pos));
        break;
      }
      out.push_back(line.substr(pos, end - pos));
      pos = end + 1;
    }
    return out;
  }

  static int parse_int(std::string_view s) {
    int v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size())
      throw FormatError("bad integer field: " + std::string(s));
    return v;
  }

  static double parse_double(std::string_view s) {
    // not all libstdc++ versions ship from_chars for double
    try {
      std::size_t used = 0;
      double v = std::stod(std::string(s), &used);
      if (used != s.size()) throw FormatError("");
      return v;
    } catch (const std::exception&) {
      throw FormatError("bad numeric field: " + std::string(s));
    }
  }

  static std::vector<int> parse_int_list(std::string_view s) {
    std::vector<int> out;
    for (auto part : split(s, ',')) out.push_back(parse_int(part));
    return out;
  }

  void parse_space_groups(std::string_view tsv) {
    groups_.clear();
    for (std::string_view line : split_lines(tsv)) {
      if (line.empty() || line[0] == '#' || line.starts_with("number")) continue;
      auto f = split(line, '\t');
      if (f.size() != 6) throw FormatError("space group row needs 6 fields");
      SpaceGroupRecord r;
      r.number = parse_int(f[0]);
      r.hermann_mauguin = std::string(f[1]);
      r.crystal_lattice_system = parse_crystal_lattice_system(f[2]);
      r.point_symmetry = parse_point_symmetry(f[3]);
      r.lattice_system = parse_lattice_system(f[4]);
      r.wyckoff_multiplicities = parse_int_list(f[5]);
      std::sort(r.wyckoff_multiplicities.begin(), r.wyckoff_multiplicities.end());
      groups_.push_back(std::move(r));
    }
  }

  void parse_elements(std::string_view tsv) {
    elements_.clear();
    element_index_.clear();
    for (std::string_view line : split_lines(tsv)) {
      if (line.empty() || line[0] == '#' || line.starts_with("symbol")) continue;
      auto f = split(line, '\t');
      if (f.size() != 5 + kNumElementProperties)
        throw FormatError("element row needs " + std::to_string(5 + kNumElementProperties) +
                          " fields");
      ElementInfo e;
      e.symbol = std::string(f[0]);
      e.z = parse_int(f[1]);
      e.period = parse_int(f[2]);
      e.group = parse_int(f[3]);
      e.oxidation_states = parse_int_list(f[4]);
      std::sort(e.oxidation_states.begin(), e.oxidation_states.end());
      if (e.oxidation_states.empty()) throw FormatError("empty oxidation state set");
      for (int i = 0; i < kNumElementProperties; ++i)
        e.properties[static_cast<std::size_t>(i)] = parse_double(f[static_cast<std::size_t>(5 + i)]);
      element_index_[e.symbol] = elements_.size();
      elements_.push_back(std::move(e));
    }
  }

  void parse_lattice_constraints(std::string_view tsv) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    bool seen[kNumLatticeSystems] = {};
    for (std::string_view line : split_lines(tsv)) {
      if (line.empty() || line[0] == '#' || line.starts_with("lattice_system")) continue;
      auto f = split(line, '\t');
      if (f.size() != 6) throw FormatError("lattice constraint row needs 6 fields");
      LatticeConstraint c;
      c.system = parse_lattice_system(f[0]);
      for (int d = 0; d < 6; ++d) {
        c.representative[d] = d;
        c.fixed_value[d] = nan;
      }
      auto apply_ties = [&](std::string_view spec, bool angles) {
        if (spec == "-") return;
        int base = angles ? 3 : 0;
        int rep = -1;
        for (char ch : spec) {
          int d;
          if (!angles)
            d = ch - 'a';
          else
            d = ch == 'a' ? 0 : ch == 'b' ? 1 : ch == 'g' ? 2 : -1;
          if (d < 0 || d > 2) throw FormatError("bad tie spec: " + std::string(spec));
          d += base;
          if (rep < 0) rep = d;
          c.representative[d] = rep;
        }
      };
      apply_ties(f[1], false);
      apply_ties(f[2], true);
      for (int a = 0; a < 3; ++a) {
        std::string_view v = f[static_cast<std::size_t>(3 + a)];
        if (v == "free") continue;
        c.representative[3 + a] = -1;
        c.fixed_value[3 + a] = parse_double(v);
      }
      seen[static_cast<std::size_t>(c.system)] = true;
      constraints_[static_cast<std::size_t>(c.system)] = c;
    }
    for (bool s : seen)
      if (!s) throw FormatError("lattice constraint table is missing a system");
  }

  void validate() const {
    if (groups_.size() != kNumSpaceGroups)
      throw FormatError("expected 230 space group rows, got " + std::to_string(groups_.size()));
    for (std::size_t i = 0; i < groups_.size(); ++i) {
      const auto& g = groups_[i];
      if (g.number != static_cast<int>(i) + 1)
        throw FormatError("space group rows must be sorted by number");
      if (g.wyckoff_multiplicities.empty() || g.wyckoff_multiplicities.front() < 1)
        throw FormatError("bad multiplicity set for group " + std::to_string(g.number));
      if (lattice_system_of(g.crystal_lattice_system) != g.lattice_system)
        throw FormatError("lattice system mismatch for group " + std::to_string(g.number));
    }
    if (elements_.empty()) throw FormatError("element table is empty");
  }

  std::vector<SpaceGroupRecord> groups_;
  std::vector<ElementInfo> elements_;
  std::map<std::string, std::size_t> element_index_;
  std::array<LatticeConstraint, kNumLatticeSystems> constraints_{};
};

} // namespace crystalflow
