// Flat binary tensor container: an 8-byte little-endian header length, a JSON
// header describing tensor names, shapes and byte offsets plus free-form
// metadata, then a payload of little-endian IEEE-754 doubles. Used for policy
// checkpoints and proxy weight files.
#pragma once

#include <bit>
#include <cstdint>
#include <fstream>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "crystalflow/common.hpp"

namespace crystalflow {

static_assert(std::endian::native == std::endian::little,
              "the tensor container assumes a little-endian host");

struct NamedTensor {
  std::string name;
  std::vector<int> shape;
  std::vector<double> data;

  std::size_t element_count() const {
    std::size_t n = 1;
    for (int d : shape) n *= static_cast<std::size_t>(d);
    return n;
  }
};

inline void write_tensor_container(const std::string& path, std::span<const NamedTensor> tensors,
                                   const nlohmann::json& meta = nlohmann::json::object()) {
  nlohmann::json header;
  header["format"] = "crystalflow-tensors";
  header["version"] = 1;
  header["dtype"] = "f64-le";
  header["meta"] = meta;
  auto& list = header["tensors"] = nlohmann::json::array();
  std::uint64_t offset = 0;
  for (const auto& t : tensors) {
    if (t.data.size() != t.element_count())
      throw FormatError("tensor " + t.name + " size does not match its shape");
    list.push_back({{"name", t.name}, {"shape", t.shape}, {"offset", offset}});
    offset += t.data.size() * sizeof(double);
  }
  std::string head = header.dump();

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot open for writing: " + path);
  std::uint64_t head_len = head.size();
  out.write(reinterpret_cast<const char*>(&head_len), sizeof(head_len));
  out.write(head.data(), static_cast<std::streamsize>(head.size()));
  for (const auto& t : tensors)
    out.write(reinterpret_cast<const char*>(t.data.data()),
              static_cast<std::streamsize>(t.data.size() * sizeof(double)));
  if (!out) throw FormatError("short write: " + path);
}

struct TensorContainer {
  std::map<std::string, NamedTensor> tensors;
  nlohmann::json meta;

  const NamedTensor& require(const std::string& name) const {
    auto it = tensors.find(name);
    if (it == tensors.end()) throw FormatError("missing tensor: " + name);
    return it->second;
  }
};

inline TensorContainer read_tensor_container(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open: " + path);
  std::uint64_t head_len = 0;
  in.read(reinterpret_cast<char*>(&head_len), sizeof(head_len));
  if (!in || head_len > (1u << 24)) throw FormatError("bad container header length");
  std::string head(head_len, '\0');
  in.read(head.data(), static_cast<std::streamsize>(head_len));
  if (!in) throw FormatError("truncated container header");

  nlohmann::json header = nlohmann::json::parse(head, nullptr, /*allow_exceptions=*/false);
  if (header.is_discarded() || header.value("format", "") != "crystalflow-tensors")
    throw FormatError("not a tensor container: " + path);

  std::vector<char> payload(std::istreambuf_iterator<char>(in), {});
  TensorContainer c;
  c.meta = header.value("meta", nlohmann::json::object());
  for (const auto& entry : header.at("tensors")) {
    NamedTensor t;
    t.name = entry.at("name").get<std::string>();
    t.shape = entry.at("shape").get<std::vector<int>>();
    std::uint64_t offset = entry.at("offset").get<std::uint64_t>();
    std::size_t bytes = t.element_count() * sizeof(double);
    if (offset + bytes > payload.size())
      throw FormatError("tensor " + t.name + " extends past the payload");
    t.data.resize(t.element_count());
    std::memcpy(t.data.data(), payload.data() + offset, bytes);
    c.tensors[t.name] = std::move(t);
  }
  return c;
}

} // namespace crystalflow
