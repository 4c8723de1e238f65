// Shared error types, math helpers and RNG utilities.
#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>

namespace crystalflow {

// ---------------------------------------------------------------------------
// Errors

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Lookup with an unknown key in one of the static tables.
struct TableKeyError : std::out_of_range {
  using std::out_of_range::out_of_range;
};

// An action was applied that the current mask forbids.
struct MaskedActionError : std::logic_error {
  using std::logic_error::logic_error;
};

// Operation requested on a state that does not support it (terminal state,
// source state with no parents, unset lattice parameters).
struct StateError : std::logic_error {
  using std::logic_error::logic_error;
};

// Malformed file contents (tables, checkpoints, CSV rows).
struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Input refers to an element or space group outside a model's vocabulary.
struct VocabularyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Loss or parameters became non-finite during training.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A request exceeds a configured resource bound (e.g. oracle enumeration).
struct ResourceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Math helpers

inline double logsumexp(std::span<const double> xs) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : xs) m = std::max(m, x);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

inline double sigmoid(double x) {
  if (x >= 0) {
    double e = std::exp(-x);
    return 1.0 / (1.0 + e);
  }
  double e = std::exp(x);
  return e / (1.0 + e);
}

// log(sigmoid(x)), stable for large |x|
inline double log_sigmoid(double x) {
  if (x >= 0) return -std::log1p(std::exp(-x));
  return x - std::log1p(std::exp(x));
}

// Digamma via upward recurrence into the asymptotic region.
inline double digamma(double x) {
  double result = 0.0;
  while (x < 6.0) {
    result -= 1.0 / x;
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  // asymptotic series: ln x - 1/(2x) - 1/(12x^2) + 1/(120x^4) - 1/(252x^6) + ...
  result += std::log(x) - 0.5 * inv;
  result -= inv2 * (1.0 / 12.0 - inv2 * (1.0 / 120.0 - inv2 * (1.0 / 252.0 - inv2 / 240.0)));
  return result;
}

inline double log_beta_fn(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

// ---------------------------------------------------------------------------
// RNG

using Rng = std::mt19937_64;

// Deterministic stream derivation, e.g. make_rng(seed, iteration, index).
inline Rng make_rng(std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0) {
  std::seed_seq seq{a, b, c};
  return Rng(seq);
}

inline double uniform01(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

} // namespace crystalflow
