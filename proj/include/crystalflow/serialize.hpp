// Canonical serialization of terminal records: the JSON interchange form and
// the samples CSV (one record plus predicted energy per row).
#pragma once

#include <charconv>
#include <cstdio>
#include <sstream>
#include <string>

#include <json.hpp>

#include "crystalflow/env.hpp"

namespace crystalflow {

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline nlohmann::json to_json(const TerminalRecord& r) {
  nlohmann::json j = nlohmann::json::object();
  if (r.space_group) j["space_group"] = *r.space_group;
  if (r.crystal_lattice_system)
    j["crystal_lattice_system"] = std::string(to_string(*r.crystal_lattice_system));
  if (r.point_symmetry) j["point_symmetry"] = std::string(to_string(*r.point_symmetry));
  if (!r.composition.empty()) {
    auto& c = j["composition"] = nlohmann::json::object();
    for (const auto& [sym, count] : r.composition) c[sym] = count;
  }
  if (r.lattice) {
    const auto& lp = *r.lattice;
    j["lattice"] = {{"a", lp[0]},     {"b", lp[1]},    {"c", lp[2]},
                    {"alpha", lp[3]}, {"beta", lp[4]}, {"gamma", lp[5]}};
  }
  return j;
}

inline TerminalRecord record_from_json(const nlohmann::json& j) {
  TerminalRecord r;
  if (j.contains("space_group")) r.space_group = j.at("space_group").get<int>();
  if (j.contains("crystal_lattice_system"))
    r.crystal_lattice_system =
        parse_crystal_lattice_system(j.at("crystal_lattice_system").get<std::string>());
  if (j.contains("point_symmetry"))
    r.point_symmetry = parse_point_symmetry(j.at("point_symmetry").get<std::string>());
  if (j.contains("composition"))
    for (auto it = j.at("composition").begin(); it != j.at("composition").end(); ++it)
      r.composition.emplace_back(it.key(), it.value().get<int>());
  std::sort(r.composition.begin(), r.composition.end());
  if (j.contains("lattice")) {
    const auto& l = j.at("lattice");
    r.lattice = {{l.at("a").get<double>(), l.at("b").get<double>(), l.at("c").get<double>(),
                  l.at("alpha").get<double>(), l.at("beta").get<double>(),
                  l.at("gamma").get<double>()}};
  }
  return r;
}

// ---------------------------------------------------------------------------
// Samples CSV

inline const char* kSampleCsvHeader =
    "space_group,crystal_lattice_system,point_symmetry,composition,"
    "a,b,c,alpha,beta,gamma,energy_ev_per_atom";

// composition encodes as "H:2;O:1" with symbols in canonical (sorted) order
inline std::string encode_composition(const std::vector<std::pair<std::string, int>>& comp) {
  std::string out;
  for (const auto& [sym, count] : comp) {
    if (!out.empty()) out += ';';
    out += sym + ':' + std::to_string(count);
  }
  return out;
}

inline std::vector<std::pair<std::string, int>> decode_composition(const std::string& text) {
  std::vector<std::pair<std::string, int>> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find(';', pos);
    if (end == std::string::npos) end = text.size();
    std::string part = text.substr(pos, end - pos);
    std::size_t colon = part.find(':');
    if (colon == std::string::npos) throw FormatError("bad composition field: " + text);
    int count = 0;
    auto [p, ec] = std::from_chars(part.data() + colon + 1, part.data() + part.size(), count);
    if (ec != std::errc{} || p != part.data() + part.size() || count <= 0)
      throw FormatError("bad composition count: " + part);
    out.emplace_back(part.substr(0, colon), count);
    pos = end + 1;
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline std::string to_csv_row(const TerminalRecord& r, double energy) {
  std::string out;
  out += r.space_group ? std::to_string(*r.space_group) : "";
  out += ',';
  out += r.crystal_lattice_system ? std::string(to_string(*r.crystal_lattice_system)) : "";
  out += ',';
  out += r.point_symmetry ? std::string(to_string(*r.point_symmetry)) : "";
  out += ',';
  out += encode_composition(r.composition);
  for (int i = 0; i < 6; ++i) {
    out += ',';
    if (r.lattice) out += format_double((*r.lattice)[static_cast<std::size_t>(i)]);
  }
  out += ',';
  out += format_double(energy);
  return out;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t pos = 0;
  while (true) {
    std::size_t end = line.find(',', pos);
    if (end == std::string::npos) {
      fields.push_back(line.substr(pos));
      break;
    }
    fields.push_back(line.substr(pos, end - pos));
    pos = end + 1;
  }
  return fields;
}

inline std::pair<TerminalRecord, double> parse_csv_row(const std::string& line) {
  auto f = split_csv_line(line);
  if (f.size() != 11) throw FormatError("expected 11 CSV fields, got " + std::to_string(f.size()));
  TerminalRecord r;
  auto parse_d = [](const std::string& s) {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw FormatError("bad numeric field: " + s);
    return v;
  };
  try {
    if (!f[0].empty()) r.space_group = std::stoi(f[0]);
    if (!f[1].empty()) r.crystal_lattice_system = parse_crystal_lattice_system(f[1]);
    if (!f[2].empty()) r.point_symmetry = parse_point_symmetry(f[2]);
    r.composition = decode_composition(f[3]);
    int lat_fields = 0;
    for (int i = 4; i < 10; ++i) lat_fields += !f[static_cast<std::size_t>(i)].empty();
    if (lat_fields != 0 && lat_fields != 6) throw FormatError("partial lattice fields");
    if (lat_fields == 6)
      r.lattice = {{parse_d(f[4]), parse_d(f[5]), parse_d(f[6]), parse_d(f[7]), parse_d(f[8]),
                    parse_d(f[9])}};
    return {std::move(r), parse_d(f[10])};
  } catch (const std::invalid_argument&) {
    throw FormatError("malformed CSV row: " + line);
  } catch (const std::out_of_range&) {
    throw FormatError("numeric field out of range: " + line);
  }
}

} // namespace crystalflow
