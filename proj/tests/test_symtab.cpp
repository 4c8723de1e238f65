#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "crystalflow/symtab.hpp"

using namespace crystalflow;

namespace {

// ---------------------------------------------------------------------------
// Independently sourced classification reference, written out from the
// standard International Tables numbering rather than from the shipped data
// file: crystal systems as number ranges, the seven rhombohedral (R-lattice)
// groups, and crystal classes (point groups) as number ranges.

struct ClassRange {
  int first, last;
  const char* point_group;
};

const ClassRange kClassRanges[] = {
    {1, 1, "1"},       {2, 2, "-1"},      {3, 5, "2"},       {6, 9, "m"},
    {10, 15, "2/m"},   {16, 24, "222"},   {25, 46, "mm2"},   {47, 74, "mmm"},
    {75, 80, "4"},     {81, 82, "-4"},    {83, 88, "4/m"},   {89, 98, "422"},
    {99, 110, "4mm"},  {111, 122, "-42m"}, {123, 142, "4/mmm"}, {143, 146, "3"},
    {147, 148, "-3"},  {149, 155, "32"},  {156, 161, "3m"},  {162, 167, "-3m"},
    {168, 173, "6"},   {174, 174, "-6"},  {175, 176, "6/m"}, {177, 182, "622"},
    {183, 186, "6mm"}, {187, 190, "-6m2"}, {191, 194, "6/mmm"}, {195, 199, "23"},
    {200, 206, "m-3"}, {207, 214, "432"}, {215, 220, "-43m"}, {221, 230, "m-3m"},
};

const std::set<int> kRhombohedralGroups = {146, 148, 155, 160, 161, 166, 167};

std::string reference_point_group(int sg) {
  for (const auto& r : kClassRanges)
    if (sg >= r.first && sg <= r.last) return r.point_group;
  FAIL("space group out of range");
  return {};
}

PointSymmetry reference_point_symmetry(int sg) {
  const std::set<std::string> centro = {"-1", "2/m", "mmm", "4/m", "4/mmm", "-3",
                                        "-3m", "6/m", "6/mmm", "m-3", "m-3m"};
  const std::set<std::string> chiral = {"1", "2", "222", "4", "422", "3",
                                        "32", "6", "622", "23", "432"};
  const std::set<std::string> polar = {"1", "2", "m", "mm2", "4", "4mm", "3", "3m", "6", "6mm"};
  std::string pg = reference_point_group(sg);
  if (centro.count(pg)) return PointSymmetry::Centrosymmetric;
  bool ch = chiral.count(pg) != 0, po = polar.count(pg) != 0;
  if (ch && po) return PointSymmetry::EnantiomorphicPolar;
  if (ch) return PointSymmetry::Enantiomorphic;
  if (po) return PointSymmetry::Polar;
  return PointSymmetry::NonCentrosymmetric;
}

LatticeSystem reference_lattice_system(int sg) {
  if (sg <= 2) return LatticeSystem::Triclinic;
  if (sg <= 15) return LatticeSystem::Monoclinic;
  if (sg <= 74) return LatticeSystem::Orthorhombic;
  if (sg <= 142) return LatticeSystem::Tetragonal;
  if (sg <= 194)
    return kRhombohedralGroups.count(sg) ? LatticeSystem::Rhombohedral : LatticeSystem::Hexagonal;
  return LatticeSystem::Cubic;
}

CrystalLatticeSystem reference_cls(int sg) {
  if (sg <= 2) return CrystalLatticeSystem::Triclinic;
  if (sg <= 15) return CrystalLatticeSystem::Monoclinic;
  if (sg <= 74) return CrystalLatticeSystem::Orthorhombic;
  if (sg <= 142) return CrystalLatticeSystem::Tetragonal;
  if (sg <= 167)
    return kRhombohedralGroups.count(sg) ? CrystalLatticeSystem::TrigonalRhombohedral
                                         : CrystalLatticeSystem::TrigonalHexagonal;
  if (sg <= 194) return CrystalLatticeSystem::HexagonalHexagonal;
  return CrystalLatticeSystem::Cubic;
}

// Independent oracle for count_compatible: enumerate non-decreasing coin
// combinations recursively.
bool subset_sum_oracle(int n, const std::vector<int>& coins, std::size_t start = 0) {
  if (n == 0) return true;
  for (std::size_t i = start; i < coins.size(); ++i) {
    if (coins[i] > n) continue;
    if (subset_sum_oracle(n - coins[i], coins, i)) return true;
  }
  return false;
}

// Independent oracle for neutrality: enumerate per-element multisets of
// oxidation-state choices and cross-combine the achievable sums.
void element_sums(const std::vector<int>& states, int k, std::size_t start, int acc,
                  std::set<int>& out) {
  if (k == 0) {
    out.insert(acc);
    return;
  }
  for (std::size_t i = start; i < states.size(); ++i)
    element_sums(states, k - 1, i, acc + states[i], out);
}

bool neutrality_oracle(const std::vector<std::pair<const ElementInfo*, int>>& counts) {
  std::set<int> total = {0};
  for (const auto& [elem, k] : counts) {
    if (k == 0) continue;
    std::set<int> sums;
    element_sums(elem->oxidation_states, k, 0, 0, sums);
    std::set<int> next;
    for (int t : total)
      for (int s : sums) next.insert(t + s);
    total = std::move(next);
  }
  return total.count(0) != 0;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

} // namespace

TEST_CASE("embedded tables match the shipped data files", "[symtab]") {
  const std::string dir = CRYSTALFLOW_DATA_DIR;
  CHECK(read_file(dir + "/space_groups.tsv") == std::string(data::kSpaceGroupsTsv));
  CHECK(read_file(dir + "/elements.tsv") == std::string(data::kElementsTsv));
  CHECK(read_file(dir + "/lattice_constraints.tsv") == std::string(data::kLatticeConstraintsTsv));
  CHECK(read_file(dir + "/space_group_whitelist.txt") == std::string(data::kDefaultWhitelist));
}

TEST_CASE("space group table partitions and bounds", "[symtab]") {
  const auto& t = SymbolTable::builtin();
  REQUIRE(t.space_groups().size() == 230);

  std::map<CrystalLatticeSystem, int> per_cls;
  std::map<LatticeSystem, int> per_ls;
  int max_of_min = 0;
  for (const auto& g : t.space_groups()) {
    per_cls[g.crystal_lattice_system]++;
    per_ls[g.lattice_system]++;
    REQUIRE(g.min_multiplicity() >= 1);
    max_of_min = std::max(max_of_min, g.min_multiplicity());
    // the 8-way category determines the 7-way one
    CHECK(lattice_system_of(g.crystal_lattice_system) == g.lattice_system);
  }
  CHECK(per_cls.size() == 8);
  CHECK(per_ls.size() == 7);
  int sum = 0;
  for (auto& [_, n] : per_cls) sum += n;
  CHECK(sum == 230);
  CHECK(max_of_min == 16);
  CHECK(t.space_group(230).min_multiplicity() == 16);
}

TEST_CASE("classification agrees with the reference table", "[symtab]") {
  const auto& t = SymbolTable::builtin();
  for (int sg = 1; sg <= 230; ++sg) {
    const auto& g = t.space_group(sg);
    INFO("space group " << sg);
    CHECK(g.crystal_lattice_system == reference_cls(sg));
    CHECK(g.lattice_system == reference_lattice_system(sg));
    CHECK(g.point_symmetry == reference_point_symmetry(sg));
  }
}

TEST_CASE("space_groups_matching", "[symtab]") {
  const auto& t = SymbolTable::builtin();
  CHECK(t.space_groups_matching(std::nullopt, std::nullopt).size() == 230);
  CHECK(t.space_groups_matching(std::nullopt, PointSymmetry::NonCentrosymmetric).size() == 25);

  auto cubic = t.space_groups_matching(CrystalLatticeSystem::Cubic, std::nullopt);
  REQUIRE_FALSE(cubic.empty());
  std::vector<int> cubic_ref;
  for (int sg = 1; sg <= 230; ++sg)
    if (reference_cls(sg) == CrystalLatticeSystem::Cubic) cubic_ref.push_back(sg);
  CHECK(cubic == cubic_ref);
  for (int sg : cubic) CHECK(t.space_group(sg).lattice_system == LatticeSystem::Cubic);

  // filter consistency: conjunction equals intersection
  for (int c = 0; c < kNumCrystalLatticeSystems; ++c)
    for (int p = 0; p < kNumPointSymmetries; ++p) {
      auto cls = static_cast<CrystalLatticeSystem>(c);
      auto ps = static_cast<PointSymmetry>(p);
      auto both = t.space_groups_matching(cls, ps);
      auto a = t.space_groups_matching(cls, std::nullopt);
      auto b = t.space_groups_matching(std::nullopt, ps);
      std::vector<int> inter;
      std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(inter));
      CHECK(both == inter);
    }
}

TEST_CASE("compatible_categories", "[symtab]") {
  const auto& t = SymbolTable::builtin();

  auto [cls_all, ps_all] = t.compatible_categories(std::nullopt, std::nullopt);
  CHECK(cls_all.size() == 8);
  CHECK(ps_all.size() == 5);

  auto [cls_ncs, ps_ncs] = t.compatible_categories(PointSymmetry::NonCentrosymmetric, std::nullopt);
  CHECK(cls_ncs.size() == 3);
  CHECK(ps_ncs == std::set<PointSymmetry>{PointSymmetry::NonCentrosymmetric});

  // brute-force scan for the cubic filter
  auto [cls_cubic, ps_cubic] = t.compatible_categories(std::nullopt, CrystalLatticeSystem::Cubic);
  std::set<PointSymmetry> expect;
  for (const auto& g : t.space_groups())
    if (g.crystal_lattice_system == CrystalLatticeSystem::Cubic) expect.insert(g.point_symmetry);
  CHECK(ps_cubic == expect);
  CHECK(cls_cubic == std::set<CrystalLatticeSystem>{CrystalLatticeSystem::Cubic});
}

TEST_CASE("count_compatible", "[symtab]") {
  const auto& t = SymbolTable::builtin();
  CHECK_FALSE(t.count_compatible(230, 15));
  CHECK(t.count_compatible(230, 16));
  CHECK_THROWS_AS(t.count_compatible(0, 1), TableKeyError);
  CHECK_THROWS_AS(t.count_compatible(231, 1), TableKeyError);

  // a group offering multiplicity 1 spans every count
  const auto& g1 = t.space_group(1);
  REQUIRE(g1.min_multiplicity() == 1);
  for (int n = 1; n <= 30; ++n) CHECK(t.count_compatible(1, n));

  // coin-problem core on {4, 6}
  const std::vector<int> coins{4, 6};
  CHECK_FALSE(representable(9, coins));
  CHECK(representable(10, coins));

  // DP agrees with the recursive enumeration oracle for all groups, n <= 64
  for (const auto& g : t.space_groups())
    for (int n = 1; n <= 64; ++n) {
      bool dp = t.count_compatible(g.number, n);
      bool oracle = subset_sum_oracle(n, g.wyckoff_multiplicities);
      INFO("sg " << g.number << " n " << n);
      REQUIRE(dp == oracle);
    }

  // min representable count equals min multiplicity; max over groups is 16
  int max_min = 0;
  for (const auto& g : t.space_groups()) {
    int mn = 0;
    for (int n = 1; n <= 64; ++n)
      if (t.count_compatible(g.number, n)) {
        mn = n;
        break;
      }
    REQUIRE(mn == g.min_multiplicity());
    max_min = std::max(max_min, mn);
  }
  CHECK(max_min == 16);
}

TEST_CASE("neutrality_feasible", "[symtab]") {
  const auto& t = SymbolTable::builtin();
  CHECK(t.neutrality_feasible(std::map<std::string, int>{}));
  CHECK(t.neutrality_feasible({{"Li", 2}, {"O", 1}}));
  CHECK_FALSE(t.neutrality_feasible({{"Li", 1}, {"F", 2}}));
  CHECK(t.neutrality_feasible({{"Li", 1}, {"F", 1}}));
  CHECK_FALSE(t.neutrality_feasible({{"Li", 1}}));

  // property: agrees with exhaustive oxidation-assignment enumeration for
  // random compositions with at most 12 atoms over the full vocabulary
  auto rng = make_rng(20240811);
  const auto& elems = t.elements();
  for (int trial = 0; trial < 400; ++trial) {
    std::vector<std::pair<const ElementInfo*, int>> comp;
    int budget = 12;
    int n_elems = 1 + static_cast<int>(rng() % 4);
    for (int i = 0; i < n_elems && budget > 0; ++i) {
      const ElementInfo* e = &elems[rng() % elems.size()];
      int k = 1 + static_cast<int>(rng() % static_cast<unsigned>(budget));
      comp.emplace_back(e, k);
      budget -= k;
    }
    INFO("trial " << trial);
    REQUIRE(t.neutrality_feasible(comp) == neutrality_oracle(comp));
  }
}

TEST_CASE("lattice constraints", "[symtab]") {
  const auto& t = SymbolTable::builtin();

  const auto& cubic = t.lattice_constraint(225);
  CHECK(cubic.system == LatticeSystem::Cubic);
  CHECK(cubic.representative == std::array<int, 6>{0, 0, 0, -1, -1, -1});
  CHECK(cubic.fixed_value[3] == 90.0);
  CHECK(cubic.fixed_value[4] == 90.0);
  CHECK(cubic.fixed_value[5] == 90.0);
  CHECK(cubic.free_dims() == std::vector<int>{0});

  const auto& tri = t.lattice_constraint(1);
  CHECK(tri.free_dims().size() == 6);
  for (int d = 0; d < 6; ++d) CHECK_FALSE(tri.is_fixed(d));

  const auto& hex = t.constraint(LatticeSystem::Hexagonal);
  CHECK(hex.representative == std::array<int, 6>{0, 0, 2, -1, -1, -1});
  CHECK(hex.fixed_value[5] == 120.0);

  const auto& rho = t.constraint(LatticeSystem::Rhombohedral);
  CHECK(rho.representative == std::array<int, 6>{0, 0, 0, 3, 3, 3});
  CHECK(rho.free_dims() == std::vector<int>{0, 3});

  // free dimension count per group is in 1..6 and follows the classification
  std::map<LatticeSystem, std::size_t> expected_free = {
      {LatticeSystem::Triclinic, 6},  {LatticeSystem::Monoclinic, 4},
      {LatticeSystem::Orthorhombic, 3}, {LatticeSystem::Tetragonal, 2},
      {LatticeSystem::Rhombohedral, 2}, {LatticeSystem::Hexagonal, 2},
      {LatticeSystem::Cubic, 1},
  };
  for (int sg = 1; sg <= 230; ++sg) {
    const auto& c = t.lattice_constraint(sg);
    auto nfree = c.free_dims().size();
    REQUIRE(nfree >= 1);
    REQUIRE(nfree <= 6);
    CHECK(nfree == expected_free.at(reference_lattice_system(sg)));
  }
}

TEST_CASE("default whitelist", "[symtab]") {
  const auto& wl = SymbolTable::default_whitelist();
  CHECK(wl.size() == 113);
  std::set<int> uniq(wl.begin(), wl.end());
  CHECK(uniq.size() == wl.size());
  for (int sg : wl) {
    CHECK(sg >= 1);
    CHECK(sg <= 230);
  }
}

TEST_CASE("achievable_charges and IntSet", "[symtab]") {
  std::vector<int> hydrogen{-1, 1};
  auto a2 = achievable_charges(hydrogen, 2);
  CHECK(a2.contains(-2));
  CHECK(a2.contains(0));
  CHECK(a2.contains(2));
  CHECK_FALSE(a2.contains(1));

  auto zero = achievable_charges(hydrogen, 0);
  CHECK(zero.contains(0));
  CHECK(zero.values() == std::vector<int>{0});

  IntSet s = IntSet::singleton(3);
  IntSet u(-5, 5);
  u.union_shifted(s, -4);
  CHECK(u.contains(-1));
  CHECK(IntSet::sum_contains(s, s, 6));
  CHECK_FALSE(IntSet::sum_contains(s, s, 5));
}
