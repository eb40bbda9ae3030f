#include "mlnet/tensor.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <string>

#include "mlnet/error.hpp"

namespace mlnet {

namespace {

constexpr std::array<std::string_view, kCanonicalLayerCount> kCanonicalNames = {
    "UNSECURED_LENDING", "SECURED_LENDING", "MARKETABLE_SECURITIES",
    "CDS_NET_SOLD",      "SECURITIES_FINANCING", "DERIV_IR",
    "DERIV_FX",          "DERIV_CREDIT",    "DERIV_EQUITY",
    "DERIV_COMMODITY",
};

std::string upper(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

bool interlayer_less(const InterlayerEdge& a, const InterlayerEdge& b) {
  if (a.layer_from != b.layer_from) return a.layer_from < b.layer_from;
  if (a.node_from != b.node_from) return a.node_from < b.node_from;
  if (a.layer_to != b.layer_to) return a.layer_to < b.layer_to;
  return a.node_to < b.node_to;
}

bool same_slot(const InterlayerEdge& a, const InterlayerEdge& b) {
  return a.node_from == b.node_from && a.layer_from == b.layer_from &&
         a.node_to == b.node_to && a.layer_to == b.layer_to;
}

std::vector<InterlayerEdge> canonicalize(std::vector<InterlayerEdge> edges) {
  std::stable_sort(edges.begin(), edges.end(), interlayer_less);
  std::vector<InterlayerEdge> out;
  for (const auto& e : edges) {
    if (!out.empty() && same_slot(out.back(), e)) {
      out.back().weight += e.weight;
    } else {
      out.push_back(e);
    }
  }
  std::erase_if(out, [](const InterlayerEdge& e) { return e.weight == 0.0; });
  return out;
}

}  // namespace

std::string_view canonical_layer_name(CanonicalLayer layer) {
  return kCanonicalNames.at(static_cast<std::size_t>(layer));
}

// ---------------------------------------------------------------------------
// LayerRegistry

LayerRegistry LayerRegistry::canonical() {
  LayerRegistry r;
  for (auto name : kCanonicalNames) r.names_.emplace_back(name);
  return r;
}

LayerRegistry LayerRegistry::from_names(std::vector<std::string> names) {
  LayerRegistry r;
  for (const auto& n : names) {
    if (n.empty()) throw Error(ErrorCode::InvalidArgument, "empty layer name");
    if (r.find(n)) throw Error(ErrorCode::InvalidArgument, "duplicate layer name " + n);
    r.names_.push_back(upper(n));
  }
  return r;
}

LayerId LayerRegistry::add(std::string_view name) {
  if (name.empty()) throw Error(ErrorCode::InvalidArgument, "empty layer name");
  if (auto id = find(name)) return *id;
  names_.push_back(upper(name));
  return {names_.back(), names_.size() - 1};
}

std::optional<LayerId> LayerRegistry::find(std::string_view name) const {
  const std::string key = upper(name);
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == key) return LayerId{names_[i], i};
  }
  return std::nullopt;
}

LayerId LayerRegistry::at(std::string_view name) const {
  if (auto id = find(name)) return *id;
  throw Error(ErrorCode::UnknownLayer, "unknown layer '" + std::string(name) + "'");
}

LayerId LayerRegistry::at(std::size_t index) const {
  if (index >= names_.size()) {
    throw Error(ErrorCode::UnknownLayer, "layer index " + std::to_string(index) +
                                             " out of range");
  }
  return {names_[index], index};
}

// ---------------------------------------------------------------------------
// NodeRegistry

NodeRegistry::NodeRegistry(std::vector<std::string> ids) : ids_(std::move(ids)) {
  std::sort(ids_.begin(), ids_.end());
  ids_.erase(std::unique(ids_.begin(), ids_.end()), ids_.end());
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (ids_[i].empty()) throw Error(ErrorCode::InvalidArgument, "empty bank id");
    index_.emplace(ids_[i], i);
  }
}

std::optional<std::size_t> NodeRegistry::find(std::string_view id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t NodeRegistry::index(std::string_view id) const {
  if (auto i = find(id)) return *i;
  throw Error(ErrorCode::UnknownNode, "unknown bank '" + std::string(id) + "'");
}

// ---------------------------------------------------------------------------
// MultilayerNetwork

MultilayerNetwork::MultilayerNetwork(NodeRegistry nodes, std::vector<LayerMatrix> layers,
                                     std::vector<InterlayerEdge> interlayer,
                                     bool dimensionless)
    : nodes_(std::move(nodes)),
      layers_(std::move(layers)),
      dimensionless_(dimensionless) {
  const std::size_t n = nodes_.size();
  const std::size_t l = layers_.size();
  for (std::size_t k = 0; k < l; ++k) {
    const auto& m = layers_[k];
    if (m.weights.rows() != n || m.weights.cols() != n) {
      throw Error(ErrorCode::MismatchedNodes,
                  "layer " + m.layer.name + " has " + std::to_string(m.weights.rows()) +
                      " nodes, registry has " + std::to_string(n));
    }
    if (m.layer.index != k) {
      throw Error(ErrorCode::InvalidArgument,
                  "layer " + m.layer.name + " stored at position " + std::to_string(k) +
                      " but carries index " + std::to_string(m.layer.index));
    }
    for (std::size_t j = 0; j < k; ++j) {
      if (layers_[j].layer.name == m.layer.name) {
        throw Error(ErrorCode::InvalidArgument, "duplicate layer " + m.layer.name);
      }
    }
    m.weights.for_each([&](std::size_t i, std::size_t j, double w) {
      if (i == j) {
        throw Error(ErrorCode::SelfExposure, "self-loop at node " + nodes_.id(i) +
                                                 " in layer " + m.layer.name);
      }
      if (!std::isfinite(w) || w <= 0.0) {
        throw Error(ErrorCode::NegativeAmount,
                    "non-positive weight stored in layer " + m.layer.name);
      }
    });
  }
  for (const auto& e : interlayer) {
    if (e.node_from >= n || e.node_to >= n || e.layer_from >= l || e.layer_to >= l) {
      throw Error(ErrorCode::InvalidArgument, "interlayer coupling index out of range");
    }
    if (e.layer_from == e.layer_to) {
      throw Error(ErrorCode::InvalidArgument,
                  "interlayer coupling must join two different layers");
    }
    if (!std::isfinite(e.weight)) {
      throw Error(ErrorCode::NonFinite, "non-finite interlayer coupling");
    }
    if (e.weight < 0.0) {
      throw Error(ErrorCode::InvalidArgument, "negative interlayer coupling");
    }
  }
  interlayer_ = canonicalize(std::move(interlayer));
  multiplex_ = std::all_of(interlayer_.begin(), interlayer_.end(),
                           [](const InterlayerEdge& e) { return e.node_from == e.node_to; });
}

LayerRegistry MultilayerNetwork::layer_registry() const {
  std::vector<std::string> names;
  for (const auto& m : layers_) names.push_back(m.layer.name);
  return LayerRegistry::from_names(std::move(names));
}

// ---------------------------------------------------------------------------
// Construction and contractions

LayerMatrix build_layer_matrix(std::span<const DirectedAmount> records,
                               const LayerId& layer, const NodeRegistry& registry) {
  std::vector<Triplet> t;
  t.reserve(records.size());
  for (const auto& r : records) {
    const std::size_t i = registry.index(r.from);
    const std::size_t j = registry.index(r.to);
    if (!std::isfinite(r.amount)) {
      throw Error(ErrorCode::NonFinite,
                  "non-finite amount " + r.from + "->" + r.to + " in " + layer.name);
    }
    if (i == j) {
      throw Error(ErrorCode::SelfExposure,
                  "self-exposure of " + r.from + " in " + layer.name);
    }
    t.push_back({i, j, r.amount});
  }
  CsrMatrix summed(registry.size(), registry.size(), std::move(t));
  // Drop entries that are non-positive after aggregation.
  auto kept = summed.triplets();
  std::erase_if(kept, [](const Triplet& x) { return x.value <= 0.0; });
  return {layer, CsrMatrix(registry.size(), registry.size(), std::move(kept))};
}

MultilayerNetwork assemble_multilayer(NodeRegistry registry, std::vector<LayerMatrix> layers,
                                      const InterlayerSpec& interlayer) {
  const std::size_t n = registry.size();
  const std::size_t l = layers.size();
  std::vector<InterlayerEdge> edges;
  if (const auto* mux = std::get_if<MultiplexCoupling>(&interlayer)) {
    if (!std::isfinite(mux->omega) || mux->omega < 0.0) {
      throw Error(ErrorCode::InvalidArgument, "multiplex coupling must be finite and >= 0");
    }
    if (mux->omega > 0.0) {
      for (std::size_t h = 0; h < l; ++h) {
        for (std::size_t i = 0; i < n; ++i) {
          for (std::size_t k = 0; k < l; ++k) {
            if (k != h) edges.push_back({i, h, i, k, mux->omega});
          }
        }
      }
    }
  } else {
    edges = std::get<ExplicitCoupling>(interlayer).edges;
  }
  return MultilayerNetwork(std::move(registry), std::move(layers), std::move(edges));
}

SupraMatrix supra_flatten(const MultilayerNetwork& net) {
  SupraMatrix s;
  s.nodes = net.node_count();
  s.layers = net.layer_count();
  std::vector<Triplet> t;
  for (std::size_t k = 0; k < s.layers; ++k) {
    net.layer(k).weights.for_each([&](std::size_t i, std::size_t j, double w) {
      t.push_back({s.index(i, k), s.index(j, k), w});
    });
  }
  for (const auto& e : net.interlayer()) {
    t.push_back({s.index(e.node_from, e.layer_from), s.index(e.node_to, e.layer_to), e.weight});
  }
  s.matrix = CsrMatrix(s.dim(), s.dim(), std::move(t));
  return s;
}

MultilayerNetwork from_supra(const SupraMatrix& supra, NodeRegistry registry,
                             const LayerRegistry& layer_names) {
  const std::size_t n = supra.nodes;
  const std::size_t l = supra.layers;
  if (registry.size() != n || layer_names.size() != l) {
    throw Error(ErrorCode::MismatchedNodes, "registry does not match supra dimensions");
  }
  std::vector<std::vector<Triplet>> blocks(l);
  std::vector<InterlayerEdge> inter;
  supra.matrix.for_each([&](std::size_t r, std::size_t c, double w) {
    const std::size_t h = r / n, i = r % n, k = c / n, j = c % n;
    if (h == k) {
      blocks[h].push_back({i, j, w});
    } else {
      inter.push_back({i, h, j, k, w});
    }
  });
  std::vector<LayerMatrix> layers;
  for (std::size_t k = 0; k < l; ++k) {
    layers.push_back({layer_names.at(k), CsrMatrix(n, n, std::move(blocks[k]))});
  }
  return MultilayerNetwork(std::move(registry), std::move(layers), std::move(inter));
}

ProjectedNetwork project_monoplex(const MultilayerNetwork& net) {
  const std::size_t n = net.node_count();
  std::vector<Triplet> t;
  for (const auto& m : net.layers()) {
    m.weights.for_each([&](std::size_t i, std::size_t j, double w) { t.push_back({i, j, w}); });
  }
  for (const auto& e : net.interlayer()) t.push_back({e.node_from, e.node_to, e.weight});
  return {CsrMatrix(n, n, std::move(t))};
}

LayerAggregate layer_aggregate(const MultilayerNetwork& net) {
  const auto l = static_cast<Eigen::Index>(net.layer_count());
  LayerAggregate a{Eigen::MatrixXd::Zero(l, l)};
  for (std::size_t k = 0; k < net.layer_count(); ++k) {
    const auto kk = static_cast<Eigen::Index>(k);
    a.q(kk, kk) = net.layer(k).weights.total();
  }
  for (const auto& e : net.interlayer()) {
    a.q(static_cast<Eigen::Index>(e.layer_from), static_cast<Eigen::Index>(e.layer_to)) +=
        e.weight;
  }
  return a;
}

MultilayerNetwork normalize_by_capital(const MultilayerNetwork& net,
                                       std::span<const double> capitals) {
  const std::size_t n = net.node_count();
  if (capitals.size() != n) {
    throw Error(ErrorCode::CapitalsIncomplete,
                "expected " + std::to_string(n) + " capitals, got " +
                    std::to_string(capitals.size()));
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(capitals[i]) || capitals[i] <= 0.0) {
      throw Error(ErrorCode::CapitalsIncomplete,
                  "capital of bank " + net.nodes().id(i) + " is missing or not positive");
    }
  }
  std::vector<LayerMatrix> layers;
  layers.reserve(net.layer_count());
  for (const auto& m : net.layers()) {
    std::vector<Triplet> t;
    t.reserve(m.weights.nnz());
    m.weights.for_each([&](std::size_t i, std::size_t j, double w) {
      t.push_back({i, j, w / capitals[i]});
    });
    layers.push_back({m.layer, CsrMatrix(n, n, std::move(t))});
  }
  return MultilayerNetwork(net.nodes(), std::move(layers), net.interlayer(), true);
}

double total_weight(const MultilayerNetwork& net) {
  double s = 0.0;
  for (const auto& m : net.layers()) {
    for (double w : m.weights.values()) s += w;
  }
  for (const auto& e : net.interlayer()) s += e.weight;
  return s;
}

MultilayerNetwork sum_networks(std::span<const MultilayerNetwork> nets) {
  if (nets.empty()) throw Error(ErrorCode::InvalidArgument, "no networks to sum");
  const auto& first = nets.front();
  const std::size_t n = first.node_count();
  const std::size_t l = first.layer_count();
  std::vector<std::vector<Triplet>> blocks(l);
  std::vector<InterlayerEdge> inter;
  bool dimensionless = first.dimensionless();
  for (const auto& net : nets) {
    if (!(net.nodes() == first.nodes())) {
      throw Error(ErrorCode::MismatchedBanks, "networks have different bank registries");
    }
    if (net.layer_count() != l) {
      throw Error(ErrorCode::MismatchedNodes, "networks have different layer counts");
    }
    for (std::size_t k = 0; k < l; ++k) {
      if (net.layer(k).layer != first.layer(k).layer) {
        throw Error(ErrorCode::MismatchedNodes, "networks have different layer sets");
      }
      auto t = net.layer(k).weights.triplets();
      blocks[k].insert(blocks[k].end(), t.begin(), t.end());
    }
    inter.insert(inter.end(), net.interlayer().begin(), net.interlayer().end());
    dimensionless = dimensionless && net.dimensionless();
  }
  std::vector<LayerMatrix> layers;
  for (std::size_t k = 0; k < l; ++k) {
    layers.push_back({first.layer(k).layer, CsrMatrix(n, n, std::move(blocks[k]))});
  }
  return MultilayerNetwork(first.nodes(), std::move(layers), std::move(inter), dimensionless);
}

MultilayerNetwork scale_network(const MultilayerNetwork& net, double s) {
  if (!(s > 0.0) || !std::isfinite(s)) {
    throw Error(ErrorCode::InvalidArgument, "scale factor must be positive and finite");
  }
  std::vector<LayerMatrix> layers;
  for (const auto& m : net.layers()) layers.push_back({m.layer, m.weights.scaled(s)});
  auto inter = net.interlayer();
  for (auto& e : inter) e.weight *= s;
  return MultilayerNetwork(net.nodes(), std::move(layers), std::move(inter),
                           net.dimensionless());
}

}  // namespace mlnet
