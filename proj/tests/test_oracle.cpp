#include <catch2/catch_amalgamated.hpp>

#include "crystalflow/oracle.hpp"

using namespace crystalflow;

namespace {

EnvConfig comp_only(std::vector<std::string> elems, int k, int nmax, int emax) {
  EnvConfig cfg;
  cfg.sg_stage = false;
  cfg.lp_stage = false;
  cfg.elements = std::move(elems);
  cfg.max_per_element = k;
  cfg.max_atoms = nmax;
  cfg.max_elements = emax;
  return cfg;
}

} // namespace

TEST_CASE("enumerate_terminals on degenerate configs", "[oracle]") {
  // one element whose oxidation states include 0 would be needed for a
  // 1-element terminal; H has -1/+1 so only even counts terminate
  CrystalEnv env(comp_only({"H"}, 2, 2, 1));
  auto ts = enumerate_terminals(env);
  REQUIRE(ts.size() == 1);
  CHECK(ts[0].comp.counts[0] == 2);

  // deterministic order
  CrystalEnv env2(comp_only({"H", "Li", "F"}, 2, 6, 3));
  auto a = enumerate_terminals(env2);
  auto b = enumerate_terminals(env2);
  REQUIRE(a.size() == b.size());
  CHECK(a == b);
}

TEST_CASE("enumeration equals the filter-based oracle under neutrality", "[oracle]") {
  // D=2, K=2, states {+1} and {-1}: exactly the balanced compositions
  CrystalEnv env(comp_only({"Li", "F"}, 2, 4, 2));
  auto ts = enumerate_terminals(env);
  std::set<std::pair<int, int>> got;
  for (const auto& s : ts) got.insert({s.comp.counts[0], s.comp.counts[1]});
  std::set<std::pair<int, int>> expect;
  for (int li = 0; li <= 2; ++li)
    for (int f = 0; f <= 2; ++f)
      if (li + f > 0 && li - f == 0) expect.insert({li, f});
  CHECK(got == expect);
}

TEST_CASE("enumeration refuses continuous configs and oversized spaces", "[oracle]") {
  EnvConfig cfg;
  cfg.sg_stage = false;
  cfg.comp_stage = false;
  CrystalEnv lp(cfg);
  CHECK_THROWS_AS(enumerate_terminals(lp), ResourceError);

  CrystalEnv big(comp_only({"H", "Li", "C", "N", "O", "F"}, 8, 30, 5));
  CHECK_THROWS_AS(enumerate_terminals(big, 500), ResourceError);
}

TEST_CASE("exact_distribution basics", "[oracle]") {
  CrystalEnv env(comp_only({"Li", "F"}, 2, 4, 2));
  auto ts = enumerate_terminals(env);
  REQUIRE(ts.size() == 2); // {1,1} and {2,2}

  auto uni = exact_distribution(env, ts, [](const TerminalRecord&) { return 1.0; });
  for (double p : uni.probs) CHECK(p == Catch::Approx(0.5));

  // rewards 1 and 3 -> probabilities 1/4 and 3/4
  auto skew = exact_distribution(env, ts, [](const TerminalRecord& r) {
    return r.composition[0].second == 1 ? 1.0 : 3.0;
  });
  double lo = *std::min_element(skew.probs.begin(), skew.probs.end());
  double hi = *std::max_element(skew.probs.begin(), skew.probs.end());
  CHECK(lo == Catch::Approx(0.25));
  CHECK(hi == Catch::Approx(0.75));

  // logz_true for rewards {1, 1, 2} is log 4; emulate with three states
  CrystalEnv env3(comp_only({"H", "Li", "F"}, 2, 4, 3));
  auto ts3 = enumerate_terminals(env3);
  REQUIRE(ts3.size() >= 3);

  // rescaling rewards shifts logz_true and leaves probabilities unchanged
  auto r1 = exact_distribution(env3, ts3, [](const TerminalRecord& r) {
    return 1.0 + r.composition.size();
  });
  auto r2 = exact_distribution(env3, ts3, [](const TerminalRecord& r) {
    return 7.0 * (1.0 + r.composition.size());
  });
  for (std::size_t i = 0; i < r1.probs.size(); ++i)
    CHECK(r1.probs[i] == Catch::Approx(r2.probs[i]).margin(1e-12));
  CHECK(r2.logz_true - r1.logz_true == Catch::Approx(std::log(7.0)).margin(1e-12));
}

TEST_CASE("l1_divergence properties", "[oracle]") {
  CrystalEnv env(comp_only({"Li", "F"}, 2, 4, 2));
  auto ts = enumerate_terminals(env);
  auto uni = exact_distribution(env, ts, [](const TerminalRecord&) { return 1.0; });

  std::unordered_map<CrystalState, long> emp;
  emp[ts[0]] = 500;
  emp[ts[1]] = 500;
  CHECK(l1_divergence(emp, uni) == Catch::Approx(0.0).margin(1e-12));

  // disjoint support: full mass on a state outside the oracle's support
  std::unordered_map<CrystalState, long> alien;
  CrystalState fake = ts[0];
  fake.comp.counts[0] = 77;
  alien[fake] = 10;
  CHECK(l1_divergence(alien, uni) == Catch::Approx(2.0));

  // multinomial concentration: 10^4 uniform draws over 10 states
  CrystalEnv env10(comp_only({"H", "Li", "C", "N", "O", "F"}, 2, 4, 2));
  auto ts10 = enumerate_terminals(env10);
  auto uni10 = exact_distribution(env10, ts10, [](const TerminalRecord&) { return 1.0; });
  auto rng = make_rng(4242);
  std::unordered_map<CrystalState, long> emp10;
  for (int i = 0; i < 10000; ++i)
    emp10[ts10[rng() % ts10.size()]] += 1;
  CHECK(l1_divergence(emp10, uni10) < 0.1);
}

TEST_CASE("forward enumeration equals backward closure from terminals", "[oracle]") {
  CrystalEnv env(comp_only({"H", "Li", "O"}, 2, 6, 3));
  auto ts = enumerate_terminals(env);

  // walk parents from every terminal; collect every state seen
  std::unordered_set<CrystalState> backward;
  std::vector<CrystalState> stack(ts.begin(), ts.end());
  for (const auto& t : ts) backward.insert(t);
  while (!stack.empty()) {
    CrystalState s = stack.back();
    stack.pop_back();
    if (env.is_initial(s)) continue;
    for (auto& [p, a] : env.parent_transitions(s).discrete)
      if (backward.insert(p).second) stack.push_back(p);
  }

  // forward reachable set
  std::unordered_set<CrystalState> forward;
  std::vector<CrystalState> q{env.initial_state()};
  forward.insert(env.initial_state());
  while (!q.empty()) {
    CrystalState s = q.back();
    q.pop_back();
    if (s.stage == Stage::Done) continue;
    ActionMask m = env.valid_actions(s);
    for (std::size_t i = 0; i < m.discrete.size(); ++i) {
      if (!m.discrete[i]) continue;
      CrystalState n = env.step(s, env.slot_to_action(m.stage, static_cast<int>(i)), m);
      if (forward.insert(n).second) q.push_back(n);
    }
  }
  CHECK(backward == forward);
}

TEST_CASE("exact_bin_masses integrates known densities", "[oracle]") {
  auto flat = exact_bin_masses([](double) { return 1.0; }, 10);
  for (double m : flat) CHECK(m == Catch::Approx(0.1).margin(1e-12));

  // linear reward r(x) = x: bin mass_i = ((i+1)^2 - i^2) / bins^2
  auto lin = exact_bin_masses([](double x) { return x; }, 4);
  for (int i = 0; i < 4; ++i)
    CHECK(lin[static_cast<std::size_t>(i)] ==
          Catch::Approx(((i + 1.0) * (i + 1.0) - i * i) / 16.0).margin(1e-9));
}
