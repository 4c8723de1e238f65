#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <unordered_set>

#include "crystalflow/gfn.hpp"
#include "crystalflow/policy.hpp"

using namespace crystalflow;

namespace {

EnvConfig lp_only_cubic() {
  EnvConfig cfg;
  cfg.sg_stage = false;
  cfg.comp_stage = false;
  cfg.fixed_lattice_system = LatticeSystem::Cubic;
  return cfg;
}

EnvConfig tiny_discrete() {
  EnvConfig cfg;
  cfg.lp_stage = false;
  cfg.elements = {"Li", "F"};
  cfg.max_per_element = 2;
  cfg.max_atoms = 4;
  cfg.max_elements = 2;
  cfg.sg_whitelist = {1, 2};
  return cfg;
}

} // namespace

TEST_CASE("coefficient squash stays inside [0.1, 100] and is 1 at zero", "[policy]") {
  CHECK(squash_coef(0.0) == Catch::Approx(1.0).margin(1e-12));
  for (double z : {-1e9, -50.0, -3.0, -0.1, 0.0, 0.1, 3.0, 50.0, 1e9}) {
    double a = squash_coef(z);
    CHECK(a >= kBetaCoefMin);
    CHECK(a <= kBetaCoefMax);
    CHECK(squash_coef_grad(z) >= 0.0);
  }
  // saturation approaches but never crosses the bounds
  CHECK(squash_coef(-1e9) == Catch::Approx(0.1).margin(1e-9));
  CHECK(squash_coef(1e9) == Catch::Approx(100.0).margin(1e-9));
}

TEST_CASE("digamma and the Beta derivative identity", "[policy]") {
  const double euler = 0.57721566490153286;
  CHECK(digamma(1.0) == Catch::Approx(-euler).margin(1e-12));
  CHECK(digamma(2.0) == Catch::Approx(1.0 - euler).margin(1e-12));
  CHECK(digamma(0.5) == Catch::Approx(-euler - 2.0 * std::log(2.0)).margin(1e-12));

  // d/d alpha log Beta(r; a, b) = log r - psi(a) + psi(a+b); at a=b=1, r=0.5
  // this equals psi(2) - psi(1) + log(0.5)
  double expected = digamma(2.0) - digamma(1.0) + std::log(0.5);
  CHECK(expected == Catch::Approx(1.0 + std::log(0.5)).margin(1e-12));
  auto beta_logpdf = [](double r, double a, double b) {
    return (a - 1.0) * std::log(r) + (b - 1.0) * std::log1p(-r) - log_beta_fn(a, b);
  };
  double h = 1e-6;
  double fd = (beta_logpdf(0.5, 1.0 + h, 1.0) - beta_logpdf(0.5, 1.0 - h, 1.0)) / (2 * h);
  CHECK(fd == Catch::Approx(expected).margin(1e-8));
}

TEST_CASE("mixture log pdf gradients match finite differences", "[policy]") {
  const int kb = 5;
  auto rng = make_rng(77);
  std::vector<double> raw(3 * kb);
  for (auto& v : raw) v = std::uniform_real_distribution<double>(-2.0, 2.0)(rng);
  for (double r : {0.03, 0.4, 0.97}) {
    std::vector<double> grad(3 * kb, 0.0);
    mixture_log_pdf(raw, kb, r, 1.0, grad);
    for (std::size_t i = 0; i < raw.size(); ++i) {
      double h = 1e-6, keep = raw[i];
      raw[i] = keep + h;
      double up = mixture_log_pdf(raw, kb, r);
      raw[i] = keep - h;
      double dn = mixture_log_pdf(raw, kb, r);
      raw[i] = keep;
      INFO("raw[" << i << "] at r=" << r);
      CHECK(grad[i] == Catch::Approx((up - dn) / (2 * h)).margin(1e-6).epsilon(1e-5));
    }
  }
}

TEST_CASE("uniform policy at zero init", "[policy]") {
  CrystalEnv env(tiny_discrete());
  StateEncoder enc(env);
  auto rng = make_rng(5);
  PolicyNet pf(Direction::Forward, env, enc, {16, 16}, 5, rng);

  CrystalState s0 = env.initial_state();
  ActionMask m = env.valid_actions(s0);
  std::vector<double> out;
  pf.eval(s0, out);
  std::vector<double> out2;
  pf.eval(s0, out2);
  CHECK(out == out2); // determinism

  int n_valid = m.discrete_valid_count();
  REQUIRE(n_valid > 1);
  for (std::size_t i = 0; i < m.discrete.size(); ++i) {
    if (!m.discrete[i]) continue;
    Action a = env.slot_to_action(m.stage, static_cast<int>(i));
    CHECK(pf.forward_log_prob(s0, m, a, out) ==
          Catch::Approx(-std::log(static_cast<double>(n_valid))).margin(1e-12));
  }

  // sampling frequencies agree with the uniform distribution (3 sigma)
  std::map<int, int> freq;
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) {
    Action a = pf.forward_sample(s0, m, out, rng);
    freq[env.action_to_slot(m.stage, a)]++;
  }
  double p = 1.0 / n_valid;
  double sigma = std::sqrt(draws * p * (1 - p));
  for (auto& [slot, count] : freq) CHECK(std::abs(count - draws * p) < 3.5 * sigma);

  // a masked action must throw
  CHECK_THROWS_AS(pf.forward_log_prob(s0, m, SgStop{}, out), MaskedActionError);
}

TEST_CASE("forced single action has log probability zero", "[policy]") {
  CrystalEnv env(tiny_discrete());
  StateEncoder enc(env);
  auto rng = make_rng(6);
  PolicyNet pf(Direction::Forward, env, enc, {8}, 5, rng);
  // randomize so the zero-init special case cannot mask a bug
  for (auto* t : pf.mlp().parameters())
    for (auto& v : t->value) v = std::uniform_real_distribution<double>(-1.0, 1.0)(rng);

  CrystalState s = env.step(env.initial_state(), SetSg{2});
  ActionMask m = env.valid_actions(s);
  REQUIRE(m.discrete_valid_count() == 1);
  std::vector<double> out;
  pf.eval(s, out);
  CHECK(pf.forward_log_prob(s, m, SgStop{}, out) == 0.0);
  for (int i = 0; i < 5; ++i) CHECK(pf.forward_sample(s, m, out, rng) == Action{SgStop{}});
}

TEST_CASE("lattice heads: uniform at init, bounds always hold", "[policy]") {
  CrystalEnv env(lp_only_cubic());
  StateEncoder enc(env);
  auto rng = make_rng(9);
  PolicyNet pf(Direction::Forward, env, enc, {16}, 5, rng);

  CrystalState s0 = env.initial_state();
  ActionMask m0 = env.valid_actions(s0);
  std::vector<double> out;
  pf.eval(s0, out);

  // from-source density of a Beta(1,1) mixture is 1 everywhere
  for (double x : {0.1, 0.5, 0.9}) {
    LpFromSource a{};
    a.coords[0] = x;
    CHECK(pf.forward_log_prob(s0, m0, a, out) == Catch::Approx(0.0).margin(1e-9));
  }

  // randomized parameters: sampled increments always respect the minimum
  // increment and stay inside the cube
  for (auto* t : pf.mlp().parameters())
    for (auto& v : t->value) v = std::uniform_real_distribution<double>(-1.5, 1.5)(rng);
  pf.eval(s0, out);
  CrystalState s = env.step(s0, pf.forward_sample(s0, m0, out, rng));
  ActionMask m = env.valid_actions(s);
  if (m.lp_increment) {
    pf.eval(s, out);
    double x = s.lat.coords[0];
    for (int i = 0; i < 20000; ++i) {
      Action a = pf.forward_sample(s, m, out, rng);
      if (std::holds_alternative<LpStop>(a)) continue;
      double u = std::get<LpIncrement>(a).delta[0];
      REQUIRE(u >= env.config().min_increment);
      REQUIRE(x + u <= 1.0);
    }
  }
}

TEST_CASE("increment density integrates to the continue mass", "[policy]") {
  CrystalEnv env(lp_only_cubic());
  StateEncoder enc(env);
  auto rng = make_rng(31);
  PolicyNet pf(Direction::Forward, env, enc, {16}, 5, rng);
  for (auto* t : pf.mlp().parameters())
    for (auto& v : t->value) v = std::uniform_real_distribution<double>(-1.0, 1.0)(rng);

  CrystalState s0 = env.initial_state();
  LpFromSource place{};
  place.coords[0] = 0.35;
  CrystalState s = env.step(s0, place);
  ActionMask m = env.valid_actions(s);
  REQUIRE(m.lp_increment);

  std::vector<double> out;
  pf.eval(s, out);
  double continue_mass = 1.0 - sigmoid(out[static_cast<std::size_t>(pf.stop_index())]);

  // 10,000-point midpoint quadrature over the increment range
  double x = s.lat.coords[0], delta = env.config().min_increment;
  double lo = delta, hi = 1.0 - x;
  const int n = 10000;
  double integral = 0.0, h = (hi - lo) / n;
  for (int i = 0; i < n; ++i) {
    LpIncrement a{};
    a.delta[0] = lo + (i + 0.5) * h;
    integral += std::exp(pf.forward_log_prob(s, m, a, out)) * h;
  }
  CHECK(integral == Catch::Approx(continue_mass).margin(1e-3));

  double stop_mass = std::exp(pf.forward_log_prob(s, m, LpStop{}, out));
  CHECK(stop_mass + continue_mass == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("empirical log likelihood matches categorical entropy", "[policy]") {
  CrystalEnv env(tiny_discrete());
  StateEncoder enc(env);
  auto rng = make_rng(13);
  PolicyNet pf(Direction::Forward, env, enc, {16}, 5, rng);
  for (auto* t : pf.mlp().parameters())
    for (auto& v : t->value) v = std::uniform_real_distribution<double>(-1.0, 1.0)(rng);

  CrystalState s0 = env.initial_state();
  ActionMask m = env.valid_actions(s0);
  std::vector<double> out;
  pf.eval(s0, out);

  // analytic entropy over the masked softmax
  double mx = -1e300;
  for (std::size_t i = 0; i < m.discrete.size(); ++i)
    if (m.discrete[i]) mx = std::max(mx, out[i]);
  double z = 0.0;
  for (std::size_t i = 0; i < m.discrete.size(); ++i)
    if (m.discrete[i]) z += std::exp(out[i] - mx);
  double entropy = 0.0;
  for (std::size_t i = 0; i < m.discrete.size(); ++i) {
    if (!m.discrete[i]) continue;
    double p = std::exp(out[i] - mx) / z;
    entropy -= p * std::log(p);
  }

  const int draws = 100000;
  double ll = 0.0;
  for (int i = 0; i < draws; ++i) {
    Action a = pf.forward_sample(s0, m, out, rng);
    ll -= pf.forward_log_prob(s0, m, a, out) / draws;
  }
  CHECK(ll == Catch::Approx(entropy).epsilon(0.01));
}

TEST_CASE("state encoding is injective on an exhaustive tiny configuration", "[policy]") {
  CrystalEnv env(tiny_discrete());
  StateEncoder enc(env);
  std::unordered_set<CrystalState> seen;
  std::vector<CrystalState> queue{env.initial_state()};
  seen.insert(env.initial_state());
  while (!queue.empty()) {
    CrystalState s = queue.back();
    queue.pop_back();
    if (s.stage == Stage::Done) continue;
    ActionMask m = env.valid_actions(s);
    for (std::size_t i = 0; i < m.discrete.size(); ++i) {
      if (!m.discrete[i]) continue;
      CrystalState n = env.step(s, env.slot_to_action(m.stage, static_cast<int>(i)), m);
      if (seen.insert(n).second) queue.push_back(n);
    }
  }
  REQUIRE(seen.size() > 10);
  std::set<std::vector<double>> encodings;
  for (const auto& s : seen) encodings.insert(enc.encode(s));
  CHECK(encodings.size() == seen.size());
}

TEST_CASE("policy log-prob gradients propagate through the network", "[policy]") {
  CrystalEnv env(lp_only_cubic());
  StateEncoder enc(env);
  auto rng = make_rng(21);
  PolicyNet pf(Direction::Forward, env, enc, {8}, 3, rng);
  for (auto* t : pf.mlp().parameters())
    for (auto& v : t->value) v = std::uniform_real_distribution<double>(-0.8, 0.8)(rng);

  CrystalState s0 = env.initial_state();
  LpFromSource place{};
  place.coords[0] = 0.3;
  CrystalState s = env.step(s0, place);
  ActionMask m = env.valid_actions(s);
  LpIncrement act{};
  act.delta[0] = 0.22;

  std::vector<double> out, dout;
  nn::Mlp::Cache cache;
  pf.eval(s, out, &cache);
  dout.assign(out.size(), 0.0);
  pf.forward_log_prob(s, m, act, out, 1.0, dout);
  pf.mlp().zero_grad();
  pf.mlp().backward(cache, dout);

  auto eval_lp = [&]() {
    std::vector<double> o;
    pf.eval(s, o);
    return pf.forward_log_prob(s, m, act, o);
  };
  int checked = 0;
  for (auto* t : pf.mlp().parameters()) {
    for (std::size_t i = 0; i < t->size(); i += 13) {
      double h = 1e-6, keep = t->value[i];
      t->value[i] = keep + h;
      double up = eval_lp();
      t->value[i] = keep - h;
      double dn = eval_lp();
      t->value[i] = keep;
      INFO(t->name << "[" << i << "]");
      CHECK(t->grad[i] == Catch::Approx((up - dn) / (2 * h)).margin(1e-6).epsilon(1e-4));
      ++checked;
    }
  }
  CHECK(checked > 10);
}
