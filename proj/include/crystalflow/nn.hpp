// Minimal feed-forward network with explicit reverse-mode gradients and an
// adaptive-moment optimizer. Everything runs in double precision on the CPU
// with a fixed evaluation order, so results are bit-reproducible for a given
// seed and binary.
#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "crystalflow/common.hpp"

namespace crystalflow::nn {

struct Tensor {
  std::string name;
  std::vector<int> shape;
  std::vector<double> value;
  std::vector<double> grad;

  std::size_t size() const { return value.size(); }
  void zero_grad() { std::fill(grad.begin(), grad.end(), 0.0); }
};

inline Tensor make_tensor(std::string name, std::vector<int> shape) {
  Tensor t;
  t.name = std::move(name);
  t.shape = std::move(shape);
  std::size_t n = 1;
  for (int d : t.shape) n *= static_cast<std::size_t>(d);
  t.value.assign(n, 0.0);
  t.grad.assign(n, 0.0);
  return t;
}

// A multi-layer perceptron: hidden layers with tanh, linear output layer.
// Hidden weights use variance-scaled uniform init; the output layer starts at
// zero so downstream softmaxes begin uniform.
class Mlp {
 public:
  Mlp() = default;

  Mlp(std::string prefix, int in, std::vector<int> hidden, int out, Rng& rng)
      : in_(in), out_(out) {
    std::vector<int> dims;
    dims.push_back(in);
    for (int h : hidden) dims.push_back(h);
    dims.push_back(out);
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
      int fan_in = dims[l], fan_out = dims[l + 1];
      Tensor w = make_tensor(prefix + ".w" + std::to_string(l), {fan_out, fan_in});
      Tensor b = make_tensor(prefix + ".b" + std::to_string(l), {fan_out});
      bool last = l + 2 == dims.size();
      if (!last) {
        double bound = std::sqrt(6.0 / (fan_in + fan_out));
        std::uniform_real_distribution<double> dist(-bound, bound);
        for (auto& v : w.value) v = dist(rng);
      }
      weights_.push_back(std::move(w));
      biases_.push_back(std::move(b));
    }
  }

  int in_dim() const { return in_; }
  int out_dim() const { return out_; }

  struct Cache {
    std::vector<std::vector<double>> pre;  // pre-activation per layer
    std::vector<std::vector<double>> post; // post-activation (post[0] = input)
  };

  void forward(std::span<const double> x, std::span<double> out, Cache* cache = nullptr) const {
    std::vector<double> cur(x.begin(), x.end());
    if (cache) {
      cache->pre.clear();
      cache->post.clear();
      cache->post.push_back(cur);
    }
    for (std::size_t l = 0; l < weights_.size(); ++l) {
      const Tensor& w = weights_[l];
      const Tensor& b = biases_[l];
      int rows = w.shape[0], cols = w.shape[1];
      std::vector<double> next(static_cast<std::size_t>(rows));
      for (int r = 0; r < rows; ++r) {
        double acc = b.value[static_cast<std::size_t>(r)];
        const double* wr = w.value.data() + static_cast<std::size_t>(r) * cols;
        for (int c = 0; c < cols; ++c) acc += wr[c] * cur[static_cast<std::size_t>(c)];
        next[static_cast<std::size_t>(r)] = acc;
      }
      bool last = l + 1 == weights_.size();
      if (cache) cache->pre.push_back(next);
      if (!last)
        for (auto& v : next) v = std::tanh(v);
      if (cache && !last) cache->post.push_back(next);
      cur = std::move(next);
    }
    std::copy(cur.begin(), cur.end(), out.begin());
  }

  // Accumulates parameter gradients for d(loss)/d(output) = dout.
  void backward(const Cache& cache, std::span<const double> dout) {
    std::vector<double> delta(dout.begin(), dout.end());
    for (std::size_t l = weights_.size(); l-- > 0;) {
      Tensor& w = weights_[l];
      Tensor& b = biases_[l];
      int rows = w.shape[0], cols = w.shape[1];
      bool last = l + 1 == weights_.size();
      if (!last) {
        // delta arrives w.r.t. post-activation; fold in tanh'
        const auto& pre = cache.pre[l];
        for (int r = 0; r < rows; ++r) {
          double t = std::tanh(pre[static_cast<std::size_t>(r)]);
          delta[static_cast<std::size_t>(r)] *= 1.0 - t * t;
        }
      }
      const auto& input = cache.post[l];
      std::vector<double> dprev(static_cast<std::size_t>(cols), 0.0);
      for (int r = 0; r < rows; ++r) {
        double dr = delta[static_cast<std::size_t>(r)];
        b.grad[static_cast<std::size_t>(r)] += dr;
        double* wg = w.grad.data() + static_cast<std::size_t>(r) * cols;
        const double* wv = w.value.data() + static_cast<std::size_t>(r) * cols;
        for (int c = 0; c < cols; ++c) {
          wg[c] += dr * input[static_cast<std::size_t>(c)];
          dprev[static_cast<std::size_t>(c)] += dr * wv[c];
        }
      }
      delta = std::move(dprev);
    }
  }

  std::vector<Tensor*> parameters() {
    std::vector<Tensor*> out;
    for (std::size_t l = 0; l < weights_.size(); ++l) {
      out.push_back(&weights_[l]);
      out.push_back(&biases_[l]);
    }
    return out;
  }
  std::vector<const Tensor*> parameters() const {
    std::vector<const Tensor*> out;
    for (std::size_t l = 0; l < weights_.size(); ++l) {
      out.push_back(&weights_[l]);
      out.push_back(&biases_[l]);
    }
    return out;
  }

  void zero_grad() {
    for (auto& w : weights_) w.zero_grad();
    for (auto& b : biases_) b.zero_grad();
  }

 private:
  int in_ = 0, out_ = 0;
  std::vector<Tensor> weights_;
  std::vector<Tensor> biases_;
};

// Adaptive-moment gradient descent (decay 0.9 / 0.999, epsilon 1e-8).
class Adam {
 public:
  explicit Adam(double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

  void step(std::span<Tensor* const> params) {
    ensure_state(params);
    ++t_;
    double bc1 = 1.0 - std::pow(beta1_, t_);
    double bc2 = 1.0 - std::pow(beta2_, t_);
    std::size_t off = 0;
    for (Tensor* p : params) {
      for (std::size_t i = 0; i < p->size(); ++i, ++off) {
        double g = p->grad[i];
        m_[off] = beta1_ * m_[off] + (1.0 - beta1_) * g;
        v_[off] = beta2_ * v_[off] + (1.0 - beta2_) * g * g;
        double mhat = m_[off] / bc1;
        double vhat = v_[off] / bc2;
        p->value[i] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
      }
    }
  }

  double lr() const { return lr_; }

 private:
  void ensure_state(std::span<Tensor* const> params) {
    if (!m_.empty()) return;
    std::size_t n = 0;
    for (const Tensor* p : params) n += p->size();
    m_.assign(n, 0.0);
    v_.assign(n, 0.0);
  }

  double lr_, beta1_, beta2_, eps_;
  long t_ = 0;
  std::vector<double> m_, v_;
};

} // namespace crystalflow::nn
