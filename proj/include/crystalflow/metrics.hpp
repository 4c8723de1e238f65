// Post-hoc analysis of sample sets: energy distribution statistics and
// diversity measures. Pure functions of the sample multiset.
#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "crystalflow/env.hpp"
#include "crystalflow/serialize.hpp"

namespace crystalflow {

struct Sample {
  TerminalRecord record;
  double energy = 0.0;
};
using SampleSet = std::vector<Sample>;

// ---------------------------------------------------------------------------
// Energy distribution

struct EnergyReport {
  double median = 0.0;
  double mean = 0.0;
  std::vector<std::pair<double, double>> fraction_below; // threshold, strict fraction
  std::vector<double> bin_edges;
  std::vector<long> histogram; // counts in [edge_i, edge_{i+1})
};

inline EnergyReport energy_report(const SampleSet& samples, std::span<const double> thresholds = {},
                                  std::span<const double> bin_edges = {}) {
  if (samples.empty()) throw ConfigError("energy report over an empty sample set");
  std::vector<double> e;
  e.reserve(samples.size());
  for (const auto& s : samples) e.push_back(s.energy);
  std::sort(e.begin(), e.end());

  EnergyReport r;
  std::size_t n = e.size();
  r.median = n % 2 ? e[n / 2] : 0.5 * (e[n / 2 - 1] + e[n / 2]);
  double sum = 0.0;
  for (double v : e) sum += v;
  r.mean = sum / static_cast<double>(n);

  for (double t : thresholds) {
    auto below = std::lower_bound(e.begin(), e.end(), t) - e.begin();
    r.fraction_below.emplace_back(t, static_cast<double>(below) / static_cast<double>(n));
  }
  if (bin_edges.size() >= 2) {
    r.bin_edges.assign(bin_edges.begin(), bin_edges.end());
    r.histogram.assign(bin_edges.size() - 1, 0);
    for (double v : e) {
      auto it = std::upper_bound(r.bin_edges.begin(), r.bin_edges.end(), v);
      long idx = it - r.bin_edges.begin() - 1;
      if (idx >= 0 && idx < static_cast<long>(r.histogram.size()) && v < r.bin_edges.back())
        r.histogram[static_cast<std::size_t>(idx)] += 1;
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Diversity

struct DiversityReport {
  std::map<std::string, long> stoichiometric_prevalence;
  std::map<std::string, long> binary_prevalence;
  std::map<std::string, long> cooccurrence; // "A|B" with A < B, both present
  std::map<int, long> space_group_histogram;
  int configured_space_groups = 0;
  double space_group_coverage = 0.0; // distinct observed / configured
  std::set<std::string> crystal_lattice_systems;
  std::set<std::string> point_symmetries;
  // per lattice parameter: min, max, mean, stddev
  std::array<std::array<double, 4>, 6> lattice_stats{};
  bool has_lattice = false;
};

inline DiversityReport diversity_report(const SampleSet& samples, int configured_space_groups) {
  if (samples.empty()) throw ConfigError("diversity report over an empty sample set");
  DiversityReport r;
  r.configured_space_groups = configured_space_groups;

  std::array<double, 6> mn{}, mx{}, sum{}, sum2{};
  mn.fill(std::numeric_limits<double>::infinity());
  mx.fill(-std::numeric_limits<double>::infinity());
  long lat_n = 0;

  for (const auto& s : samples) {
    const auto& rec = s.record;
    for (std::size_t i = 0; i < rec.composition.size(); ++i) {
      const auto& [sym, count] = rec.composition[i];
      r.stoichiometric_prevalence[sym] += count;
      r.binary_prevalence[sym] += 1;
      for (std::size_t j = i + 1; j < rec.composition.size(); ++j)
        r.cooccurrence[sym + "|" + rec.composition[j].first] += 1;
    }
    if (rec.space_group) r.space_group_histogram[*rec.space_group] += 1;
    if (rec.crystal_lattice_system)
      r.crystal_lattice_systems.insert(std::string(to_string(*rec.crystal_lattice_system)));
    if (rec.point_symmetry)
      r.point_symmetries.insert(std::string(to_string(*rec.point_symmetry)));
    if (rec.lattice) {
      ++lat_n;
      for (int d = 0; d < 6; ++d) {
        double v = (*rec.lattice)[static_cast<std::size_t>(d)];
        auto di = static_cast<std::size_t>(d);
        mn[di] = std::min(mn[di], v);
        mx[di] = std::max(mx[di], v);
        sum[di] += v;
        sum2[di] += v * v;
      }
    }
  }
  if (configured_space_groups > 0)
    r.space_group_coverage = static_cast<double>(r.space_group_histogram.size()) /
                             static_cast<double>(configured_space_groups);
  if (lat_n > 0) {
    r.has_lattice = true;
    for (std::size_t d = 0; d < 6; ++d) {
      double mean = sum[d] / static_cast<double>(lat_n);
      double var = std::max(0.0, sum2[d] / static_cast<double>(lat_n) - mean * mean);
      r.lattice_stats[d] = {mn[d], mx[d], mean, std::sqrt(var)};
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Top-k by ascending energy, ties broken by the canonical record ordering
// (space group, composition, lattice tuple)

inline bool record_less(const TerminalRecord& a, const TerminalRecord& b) {
  int sga = a.space_group.value_or(0), sgb = b.space_group.value_or(0);
  if (sga != sgb) return sga < sgb;
  if (a.composition != b.composition) return a.composition < b.composition;
  const std::array<double, 6> za{}, zb{};
  return a.lattice.value_or(za) < b.lattice.value_or(zb);
}

inline SampleSet topk(const SampleSet& samples, std::size_t k) {
  if (k > samples.size()) throw ConfigError("k exceeds the sample count");
  SampleSet sorted = samples;
  std::stable_sort(sorted.begin(), sorted.end(), [](const Sample& a, const Sample& b) {
    if (a.energy != b.energy) return a.energy < b.energy;
    return record_less(a.record, b.record);
  });
  sorted.resize(k);
  return sorted;
}

// ---------------------------------------------------------------------------
// JSON emitters

inline nlohmann::json to_json(const EnergyReport& r) {
  nlohmann::json j;
  j["median"] = r.median;
  j["mean"] = r.mean;
  auto& fb = j["fraction_below"] = nlohmann::json::object();
  for (const auto& [t, f] : r.fraction_below) fb[format_double(t)] = f;
  if (!r.bin_edges.empty()) {
    j["histogram"] = {{"bin_edges", r.bin_edges}, {"counts", r.histogram}};
  }
  return j;
}

inline nlohmann::json to_json(const DiversityReport& r) {
  nlohmann::json j;
  j["element_prevalence"] = {{"stoichiometric", r.stoichiometric_prevalence},
                             {"binary", r.binary_prevalence}};
  j["cooccurrence"] = r.cooccurrence;
  auto& sg = j["space_groups"] = nlohmann::json::object();
  for (const auto& [n, c] : r.space_group_histogram) sg[std::to_string(n)] = c;
  j["space_group_coverage"] = {{"observed", r.space_group_histogram.size()},
                               {"configured", r.configured_space_groups},
                               {"fraction", r.space_group_coverage}};
  j["crystal_lattice_systems"] = r.crystal_lattice_systems;
  j["point_symmetries"] = r.point_symmetries;
  if (r.has_lattice) {
    static const char* names[6] = {"a", "b", "c", "alpha", "beta", "gamma"};
    auto& lat = j["lattice"] = nlohmann::json::object();
    for (int d = 0; d < 6; ++d) {
      const auto& s = r.lattice_stats[static_cast<std::size_t>(d)];
      lat[names[d]] = {{"min", s[0]}, {"max", s[1]}, {"mean", s[2]}, {"stddev", s[3]}};
    }
  }
  return j;
}

} // namespace crystalflow
