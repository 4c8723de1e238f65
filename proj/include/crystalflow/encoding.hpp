// Fixed-length state encoding fed to the policy networks.
#pragma once

#include <vector>

#include "crystalflow/env.hpp"

namespace crystalflow {

// Layout (blocks present only for enabled stages):
//   one-hot crystal-lattice system (8 + 1 unset)
//   one-hot point symmetry (5 + 1)
//   one-hot space group (230 + 1)
//   counts / K (D values)
//   lattice cube coords (6, zero at source) + source flag
//   stage one-hot (4)
class StateEncoder {
 public:
  explicit StateEncoder(const CrystalEnv& env) : env_(&env) {
    const auto& cfg = env.config();
    dim_ = 4; // stage one-hot
    if (cfg.sg_stage) dim_ += (kNumCrystalLatticeSystems + 1) + (kNumPointSymmetries + 1) +
                              (kNumSpaceGroups + 1);
    if (cfg.comp_stage) dim_ += env.num_elements();
    if (cfg.lp_stage) dim_ += 7;
  }

  int dim() const { return dim_; }

  void encode(const CrystalState& s, std::span<double> out) const {
    const auto& cfg = env_->config();
    std::fill(out.begin(), out.end(), 0.0);
    std::size_t off = 0;
    if (cfg.sg_stage) {
      out[off + (s.sg.cls ? static_cast<std::size_t>(*s.sg.cls) : kNumCrystalLatticeSystems)] = 1.0;
      off += kNumCrystalLatticeSystems + 1;
      out[off + (s.sg.ps ? static_cast<std::size_t>(*s.sg.ps) : kNumPointSymmetries)] = 1.0;
      off += kNumPointSymmetries + 1;
      out[off + (s.sg.sg ? static_cast<std::size_t>(*s.sg.sg - 1) : kNumSpaceGroups)] = 1.0;
      off += kNumSpaceGroups + 1;
    }
    if (cfg.comp_stage) {
      for (int d = 0; d < env_->num_elements(); ++d)
        out[off + static_cast<std::size_t>(d)] =
            static_cast<double>(s.comp.counts[static_cast<std::size_t>(d)]) /
            static_cast<double>(cfg.max_per_element);
      off += static_cast<std::size_t>(env_->num_elements());
    }
    if (cfg.lp_stage) {
      if (!s.lat.at_source)
        for (int d = 0; d < 6; ++d)
          out[off + static_cast<std::size_t>(d)] = s.lat.coords[static_cast<std::size_t>(d)];
      out[off + 6] = s.lat.at_source ? 1.0 : 0.0;
      off += 7;
    }
    out[off + static_cast<std::size_t>(s.stage)] = 1.0;
  }

  std::vector<double> encode(const CrystalState& s) const {
    std::vector<double> v(static_cast<std::size_t>(dim_));
    encode(s, v);
    return v;
  }

 private:
  const CrystalEnv* env_;
  int dim_ = 0;
};

} // namespace crystalflow
