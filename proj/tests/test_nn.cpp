#include <catch2/catch_amalgamated.hpp>

#include "crystalflow/nn.hpp"

using namespace crystalflow;
using namespace crystalflow::nn;

namespace {

double eval_scalar(const Mlp& net, std::span<const double> x, std::span<const double> wsel) {
  // weighted sum of outputs, a scalar objective for gradient checks
  std::vector<double> out(static_cast<std::size_t>(net.out_dim()));
  net.forward(x, out);
  double s = 0;
  for (std::size_t i = 0; i < out.size(); ++i) s += wsel[i] * out[i];
  return s;
}

} // namespace

TEST_CASE("mlp forward is deterministic and zero at init on the output layer", "[nn]") {
  auto rng = make_rng(1);
  Mlp net("t", 5, {16, 16}, 3, rng);
  std::vector<double> x{0.1, -0.2, 0.3, 0.0, 1.0};
  std::vector<double> a(3), b(3);
  net.forward(x, a);
  net.forward(x, b);
  CHECK(a == b);
  // zero-initialized final layer
  for (double v : a) CHECK(v == 0.0);
}

TEST_CASE("mlp backward matches central finite differences", "[nn]") {
  auto rng = make_rng(42);
  Mlp net("t", 4, {8, 8}, 5, rng);
  // randomize every parameter, including the final layer
  for (Tensor* p : net.parameters())
    for (auto& v : p->value) v = std::uniform_real_distribution<double>(-0.7, 0.7)(rng);

  std::vector<double> x{0.3, -0.8, 0.05, 0.9};
  std::vector<double> wsel{0.7, -1.3, 0.2, 0.9, -0.4};

  Mlp::Cache cache;
  std::vector<double> out(5);
  net.forward(x, out, &cache);
  net.zero_grad();
  net.backward(cache, wsel);

  const double h = 1e-6;
  int checked = 0;
  for (Tensor* p : net.parameters()) {
    for (std::size_t i = 0; i < p->size(); i += 7) { // sample every 7th parameter
      double keep = p->value[i];
      p->value[i] = keep + h;
      double up = eval_scalar(net, x, wsel);
      p->value[i] = keep - h;
      double dn = eval_scalar(net, x, wsel);
      p->value[i] = keep;
      double fd = (up - dn) / (2 * h);
      INFO(p->name << "[" << i << "]");
      CHECK(p->grad[i] == Catch::Approx(fd).margin(1e-7).epsilon(1e-6));
      ++checked;
    }
  }
  CHECK(checked > 20);
}

TEST_CASE("gradient of a constant output is zero", "[nn]") {
  auto rng = make_rng(3);
  Mlp net("t", 3, {8}, 2, rng); // zero final layer -> constant zero output
  std::vector<double> x{0.5, -0.5, 0.25};
  Mlp::Cache cache;
  std::vector<double> out(2);
  net.forward(x, out, &cache);
  net.zero_grad();
  // output is constant zero in the hidden parameters, so their grads vanish
  std::vector<double> dout{1.0, 0.0};
  net.backward(cache, dout);
  auto params = net.parameters();
  for (std::size_t i = 0; i + 2 < params.size(); ++i) // all but final w/b
    for (double g : params[i]->grad) CHECK(g == 0.0);
}

TEST_CASE("adam minimizes a quadratic", "[nn]") {
  Tensor t = make_tensor("q", {4});
  t.value = {4.0, -3.0, 2.0, -1.0};
  Adam opt(0.05);
  std::vector<Tensor*> params{&t};
  for (int i = 0; i < 2000; ++i) {
    for (std::size_t j = 0; j < 4; ++j) t.grad[j] = 2.0 * t.value[j];
    opt.step(params);
    t.zero_grad();
  }
  for (double v : t.value) CHECK(std::abs(v) < 1e-3);
}
