// Energy-to-reward transform and the self-contained analytic energy backend.
#pragma once

#include <cmath>
#include <functional>

#include "crystalflow/common.hpp"
#include "crystalflow/env.hpp"
#include "crystalflow/symtab.hpp"

namespace crystalflow {

using EnergyFn = std::function<double(const TerminalRecord&)>;

// Boltzmann transform: R = exp(-E / T). Strictly positive, strictly
// decreasing in the energy.
inline double reward_from_energy(double energy, double temperature) {
  if (temperature <= 0.0) throw ConfigError("reward temperature must be positive");
  if (!std::isfinite(energy)) throw NumericalError("non-finite energy");
  return std::exp(-energy / temperature);
}

// Analytic surrogate for a formation-energy predictor. A fixed smooth
// function of the composition, space group and lattice parameters:
//
//   phi = sum_d k_d * frac(0.6180339887498949 * Z_d)
//   psi = sum_d k_d * frac(0.7548776662466927 * Z_d)
//   hs  = frac(0.5545497 * sg)                  (0 when no space group)
//   lb  = mean(a, b, c) / 100                   (lattice terms only when present)
//   tb  = mean(alpha, beta, gamma minus 50) / 100
//   E   = -2 + 1.2 cos(2 pi phi) + 0.8 sin(2 pi psi + 1)
//          + 0.4 cos(2 pi (hs + 0.25 phi))
//          + 0.35 sin(2 pi 1.7 lb + 0.3) + 0.25 cos(2 pi tb + 0.9)
//
// Bounded in [-5, +1] eV/atom, multimodal in the composition, and frozen:
// changing it invalidates the golden test vector.
class SurrogateEnergy {
 public:
  explicit SurrogateEnergy(const SymbolTable& table = SymbolTable::builtin()) : table_(&table) {}

  double operator()(const TerminalRecord& rec) const {
    constexpr double tau = 6.283185307179586476925286766559;
    auto frac = [](double x) { return x - std::floor(x); };
    double phi = 0.0, psi = 0.0;
    for (const auto& [symbol, count] : rec.composition) {
      double z = static_cast<double>(table_->element(symbol).z);
      phi += count * frac(0.6180339887498949 * z);
      psi += count * frac(0.7548776662466927 * z);
    }
    double hs = rec.space_group ? frac(0.5545497 * static_cast<double>(*rec.space_group)) : 0.0;
    double e = -2.0 + 1.2 * std::cos(tau * phi) + 0.8 * std::sin(tau * psi + 1.0) +
               0.4 * std::cos(tau * (hs + 0.25 * phi));
    if (rec.lattice) {
      const auto& lp = *rec.lattice;
      double lb = (lp[0] + lp[1] + lp[2]) / 3.0 / 100.0;
      double tb = (lp[3] + lp[4] + lp[5] - 150.0) / 3.0 / 100.0;
      e += 0.35 * std::sin(tau * 1.7 * lb + 0.3) + 0.25 * std::cos(tau * tb + 0.9);
    }
    return e;
  }

 private:
  const SymbolTable* table_;
};

} // namespace crystalflow
