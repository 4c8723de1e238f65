// Inference-only formation-energy predictor over (composition, space group,
// lattice parameters).
//
// Architecture:
//   per element e:  u_e = [ W_p * p_e  |  E_Z[e]  |  E_P[period]  |  E_G[group] ]
//                   h_e = tanh(Linear(u_e))                    (composition MLP)
//   h_C  = sum_e (k_e / n) * h_e          (stoichiometry-fraction weighted sum)
//   h_SG = space-group embedding row
//   h_LP = tanh(Linear((lp - mu) / sigma))
//   y    = final MLP over [h_C | h_SG | h_LP]: `num_layers` tanh layers of
//          `hidden_channels`, then a scalar linear head
//
// The property projection W_p carries no bias (h = W p). Weight files carry
// their own hyperparameters, vocabularies and standardization statistics; the
// loader validates every shape against them.
#pragma once

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "crystalflow/common.hpp"
#include "crystalflow/env.hpp"
#include "crystalflow/nn.hpp"
#include "crystalflow/serialize.hpp"
#include "crystalflow/symtab.hpp"
#include "crystalflow/tensor_io.hpp"

namespace crystalflow {

struct ProxyConfig {
  int properties_proj_size = 64;
  int z_emb_size = 128;
  int period_emb_size = 256;
  int group_emb_size = 16;
  int sg_emb_size = 128;
  int lat_hidden_channels = 284;
  int lat_num_layers = 1;
  int num_layers = 5;
  int hidden_channels = 576;
};

inline constexpr int kMaxPeriod = 7;
inline constexpr int kMaxGroup = 18;

class ProxyModel {
 public:
  ProxyModel(ProxyConfig cfg, std::vector<std::string> element_vocab, std::vector<int> sg_vocab,
             std::array<double, 6> mu, std::array<double, 6> sigma,
             const SymbolTable& table = SymbolTable::builtin())
      : cfg_(cfg), table_(&table), mu_(mu), sigma_(sigma) {
    for (double s : sigma_)
      if (!(s > 0.0)) throw FormatError("sigma_train must be strictly positive");
    for (std::size_t i = 0; i < element_vocab.size(); ++i) {
      table_->element(element_vocab[i]); // validates
      element_index_[element_vocab[i]] = static_cast<int>(i);
    }
    elements_ = std::move(element_vocab);
    for (std::size_t i = 0; i < sg_vocab.size(); ++i) {
      table_->space_group(sg_vocab[i]);
      sg_index_[sg_vocab[i]] = static_cast<int>(i);
    }
    sgs_ = std::move(sg_vocab);

    prop_proj_ = nn::make_tensor("proxy.prop_proj",
                                 {cfg_.properties_proj_size, kNumElementProperties});
    z_emb_ = nn::make_tensor("proxy.z_emb", {static_cast<int>(elements_.size()), cfg_.z_emb_size});
    period_emb_ = nn::make_tensor("proxy.period_emb", {kMaxPeriod, cfg_.period_emb_size});
    group_emb_ = nn::make_tensor("proxy.group_emb", {kMaxGroup, cfg_.group_emb_size});
    sg_emb_ = nn::make_tensor("proxy.sg_emb", {static_cast<int>(sgs_.size()), cfg_.sg_emb_size});

    Rng dummy = make_rng(0);
    comp_mlp_ = nn::Mlp("proxy.comp", element_dim(), {}, cfg_.hidden_channels, dummy);
    lat_mlp_ = nn::Mlp("proxy.lat", 6, make_hidden(cfg_.lat_num_layers - 1, cfg_.lat_hidden_channels),
                       cfg_.lat_hidden_channels, dummy);
    int final_in = cfg_.hidden_channels + cfg_.sg_emb_size + cfg_.lat_hidden_channels;
    final_mlp_ = nn::Mlp("proxy.final", final_in, make_hidden(cfg_.num_layers, cfg_.hidden_channels),
                         1, dummy);
  }

  static ProxyModel with_random_weights(ProxyConfig cfg, std::vector<std::string> element_vocab,
                                        std::vector<int> sg_vocab, std::uint64_t seed,
                                        const SymbolTable& table = SymbolTable::builtin()) {
    std::array<double, 6> mu{10.0, 10.0, 10.0, 90.0, 90.0, 90.0};
    std::array<double, 6> sigma{5.0, 5.0, 5.0, 20.0, 20.0, 20.0};
    ProxyModel m(cfg, std::move(element_vocab), std::move(sg_vocab), mu, sigma, table);
    Rng rng = make_rng(seed, 0x7077);
    std::normal_distribution<double> dist(0.0, 0.05);
    for (auto* t : m.tensors())
      for (auto& v : t->value) v = dist(rng);
    return m;
  }

  const ProxyConfig& config() const { return cfg_; }
  const std::array<double, 6>& mu_train() const { return mu_; }
  const std::array<double, 6>& sigma_train() const { return sigma_; }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (const auto* t : tensors()) n += t->size();
    return n;
  }

  std::array<double, 6> standardize(const std::array<double, 6>& lp) const {
    std::array<double, 6> out{};
    for (int i = 0; i < 6; ++i)
      out[static_cast<std::size_t>(i)] =
          (lp[static_cast<std::size_t>(i)] - mu_[static_cast<std::size_t>(i)]) /
          sigma_[static_cast<std::size_t>(i)];
    return out;
  }

  // Predicted formation energy in eV/atom.
  double energy(const TerminalRecord& rec) const {
    if (!rec.space_group || !rec.lattice || rec.composition.empty())
      throw FormatError("the proxy needs a complete record (space group, composition, lattice)");

    // composition representation
    std::vector<double> hc(static_cast<std::size_t>(cfg_.hidden_channels), 0.0);
    double total = 0.0;
    for (const auto& [_, k] : rec.composition) total += k;
    std::vector<double> u(static_cast<std::size_t>(element_dim()));
    std::vector<double> he(static_cast<std::size_t>(cfg_.hidden_channels));
    for (const auto& [symbol, count] : rec.composition) {
      auto it = element_index_.find(symbol);
      if (it == element_index_.end())
        throw VocabularyError("element outside the proxy vocabulary: " + symbol);
      embed_element(it->second, u);
      comp_mlp_.forward(u, he);
      for (auto& v : he) v = std::tanh(v);
      double w = count / total;
      for (std::size_t i = 0; i < hc.size(); ++i) hc[i] += w * he[i];
    }

    // space-group embedding
    auto sit = sg_index_.find(*rec.space_group);
    if (sit == sg_index_.end())
      throw VocabularyError("space group outside the proxy vocabulary: " +
                            std::to_string(*rec.space_group));

    // lattice representation
    std::array<double, 6> std_lp = standardize(*rec.lattice);
    std::vector<double> hl(static_cast<std::size_t>(cfg_.lat_hidden_channels));
    lat_mlp_.forward(std::span<const double>(std_lp.data(), 6), hl);
    for (auto& v : hl) v = std::tanh(v);

    // concatenate and run the head
    std::vector<double> cat;
    cat.reserve(hc.size() + static_cast<std::size_t>(cfg_.sg_emb_size) + hl.size());
    cat.insert(cat.end(), hc.begin(), hc.end());
    const double* sg_row =
        sg_emb_.value.data() + static_cast<std::size_t>(sit->second) * cfg_.sg_emb_size;
    cat.insert(cat.end(), sg_row, sg_row + cfg_.sg_emb_size);
    cat.insert(cat.end(), hl.begin(), hl.end());
    double out = 0.0;
    final_mlp_.forward(cat, std::span<double>(&out, 1));
    return out;
  }

  // Mean absolute error against a labeled samples CSV.
  double mae(std::istream& in) const {
    std::string line;
    long lineno = 0;
    double acc = 0.0;
    long n = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      if (lineno == 1 && line.rfind("space_group", 0) == 0) continue;
      try {
        auto [rec, label] = parse_csv_row(line);
        acc += std::abs(energy(rec) - label);
        ++n;
      } catch (const FormatError& e) {
        throw FormatError("line " + std::to_string(lineno) + ": " + e.what());
      }
    }
    if (n == 0) throw FormatError("no labeled rows");
    return acc / static_cast<double>(n);
  }

  double mae_file(const std::string& path) const {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open: " + path);
    return mae(in);
  }

  void save(const std::string& path) const {
    std::vector<NamedTensor> tensors_out;
    for (const auto* t : tensors())
      tensors_out.push_back(NamedTensor{t->name, t->shape, t->value});
    nlohmann::json meta;
    meta["kind"] = "proxy";
    meta["config"] = {{"properties_proj_size", cfg_.properties_proj_size},
                      {"z_emb_size", cfg_.z_emb_size},
                      {"period_emb_size", cfg_.period_emb_size},
                      {"group_emb_size", cfg_.group_emb_size},
                      {"sg_emb_size", cfg_.sg_emb_size},
                      {"lat_hidden_channels", cfg_.lat_hidden_channels},
                      {"lat_num_layers", cfg_.lat_num_layers},
                      {"num_layers", cfg_.num_layers},
                      {"hidden_channels", cfg_.hidden_channels}};
    meta["elements"] = elements_;
    meta["space_groups"] = sgs_;
    meta["mu_train"] = mu_;
    meta["sigma_train"] = sigma_;
    write_tensor_container(path, tensors_out, meta);
  }

  static ProxyModel load(const std::string& path, const SymbolTable& table = SymbolTable::builtin()) {
    TensorContainer c = read_tensor_container(path);
    if (c.meta.value("kind", "") != "proxy") throw FormatError("not a proxy weight file");
    const auto& jc = c.meta.at("config");
    ProxyConfig cfg;
    cfg.properties_proj_size = jc.at("properties_proj_size").get<int>();
    cfg.z_emb_size = jc.at("z_emb_size").get<int>();
    cfg.period_emb_size = jc.at("period_emb_size").get<int>();
    cfg.group_emb_size = jc.at("group_emb_size").get<int>();
    cfg.sg_emb_size = jc.at("sg_emb_size").get<int>();
    cfg.lat_hidden_channels = jc.at("lat_hidden_channels").get<int>();
    cfg.lat_num_layers = jc.at("lat_num_layers").get<int>();
    cfg.num_layers = jc.at("num_layers").get<int>();
    cfg.hidden_channels = jc.at("hidden_channels").get<int>();
    auto mu_v = c.meta.at("mu_train").get<std::vector<double>>();
    auto sg_v = c.meta.at("sigma_train").get<std::vector<double>>();
    if (mu_v.size() != 6 || sg_v.size() != 6) throw FormatError("standardization stats need 6 values");
    std::array<double, 6> mu{}, sigma{};
    std::copy(mu_v.begin(), mu_v.end(), mu.begin());
    std::copy(sg_v.begin(), sg_v.end(), sigma.begin());
    ProxyModel m(cfg, c.meta.at("elements").get<std::vector<std::string>>(),
                 c.meta.at("space_groups").get<std::vector<int>>(), mu, sigma, table);
    for (auto* t : m.tensors()) {
      const NamedTensor& src = c.require(t->name);
      if (src.shape != t->shape)
        throw FormatError("shape mismatch for " + t->name + " in " + path);
      t->value = src.data;
    }
    return m;
  }

  std::vector<nn::Tensor*> tensors() {
    std::vector<nn::Tensor*> out{&prop_proj_, &z_emb_, &period_emb_, &group_emb_, &sg_emb_};
    for (auto* t : comp_mlp_.parameters()) out.push_back(t);
    for (auto* t : lat_mlp_.parameters()) out.push_back(t);
    for (auto* t : final_mlp_.parameters()) out.push_back(t);
    return out;
  }
  std::vector<const nn::Tensor*> tensors() const {
    std::vector<const nn::Tensor*> out{&prop_proj_, &z_emb_, &period_emb_, &group_emb_, &sg_emb_};
    for (const auto* t : comp_mlp_.parameters()) out.push_back(t);
    for (const auto* t : lat_mlp_.parameters()) out.push_back(t);
    for (const auto* t : final_mlp_.parameters()) out.push_back(t);
    return out;
  }

 private:
  int element_dim() const {
    return cfg_.properties_proj_size + cfg_.z_emb_size + cfg_.period_emb_size + cfg_.group_emb_size;
  }

  static std::vector<int> make_hidden(int layers, int width) {
    return std::vector<int>(static_cast<std::size_t>(std::max(layers, 0)), width);
  }

  void embed_element(int idx, std::vector<double>& u) const {
    const ElementInfo& e = table_->element(elements_[static_cast<std::size_t>(idx)]);
    if (e.period < 1 || e.period > kMaxPeriod) throw VocabularyError("period out of range");
    if (e.group < 1 || e.group > kMaxGroup) throw VocabularyError("group out of range");
    std::size_t off = 0;
    // W_p * p (no bias)
    for (int r = 0; r < cfg_.properties_proj_size; ++r) {
      const double* row =
          prop_proj_.value.data() + static_cast<std::size_t>(r) * kNumElementProperties;
      double acc = 0.0;
      for (int c = 0; c < kNumElementProperties; ++c)
        acc += row[c] * e.properties[static_cast<std::size_t>(c)];
      u[off++] = acc;
    }
    auto copy_row = [&](const nn::Tensor& t, int row, int width) {
      const double* p = t.value.data() + static_cast<std::size_t>(row) * width;
      for (int i = 0; i < width; ++i) u[off++] = p[i];
    };
    copy_row(z_emb_, idx, cfg_.z_emb_size);
    copy_row(period_emb_, e.period - 1, cfg_.period_emb_size);
    copy_row(group_emb_, e.group - 1, cfg_.group_emb_size);
  }

  ProxyConfig cfg_;
  const SymbolTable* table_;
  std::array<double, 6> mu_{}, sigma_{};
  std::vector<std::string> elements_;
  std::vector<int> sgs_;
  std::map<std::string, int> element_index_;
  std::map<int, int> sg_index_;

  nn::Tensor prop_proj_, z_emb_, period_emb_, group_emb_, sg_emb_;
  nn::Mlp comp_mlp_, lat_mlp_, final_mlp_;
};

} // namespace crystalflow
