#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "mlnet/sparse.hpp"

namespace mlnet {

/// The ten exposure types of a national interbank system, in canonical order.
enum class CanonicalLayer : std::size_t {
  UnsecuredLending,
  SecuredLending,
  MarketableSecurities,
  CdsNetSold,
  SecuritiesFinancing,
  DerivIr,
  DerivFx,
  DerivCredit,
  DerivEquity,
  DerivCommodity,
};

inline constexpr std::size_t kCanonicalLayerCount = 10;

std::string_view canonical_layer_name(CanonicalLayer layer);

struct LayerId {
  std::string name;
  std::size_t index = 0;

  friend bool operator==(const LayerId&, const LayerId&) = default;
};

/// Ordered set of layer names. The canonical ten occupy indices 0..9;
/// user-defined extension layers append after them. Lookup is
/// case-insensitive, stored names are upper case.
class LayerRegistry {
 public:
  static LayerRegistry canonical();
  static LayerRegistry from_names(std::vector<std::string> names);

  /// Registers an extension layer (no-op if already present).
  LayerId add(std::string_view name);

  std::optional<LayerId> find(std::string_view name) const;
  /// Throws UnknownLayer.
  LayerId at(std::string_view name) const;
  LayerId at(std::size_t index) const;

  std::size_t size() const noexcept { return names_.size(); }
  const std::vector<std::string>& names() const noexcept { return names_; }

  friend bool operator==(const LayerRegistry&, const LayerRegistry&) = default;

 private:
  std::vector<std::string> names_;
};

/// Bank identifier <-> dense index, ordered lexicographically by identifier.
class NodeRegistry {
 public:
  NodeRegistry() = default;
  explicit NodeRegistry(std::vector<std::string> ids);

  std::size_t size() const noexcept { return ids_.size(); }
  /// Throws UnknownNode.
  std::size_t index(std::string_view id) const;
  std::optional<std::size_t> find(std::string_view id) const;
  const std::string& id(std::size_t index) const { return ids_.at(index); }
  const std::vector<std::string>& ids() const noexcept { return ids_; }

  friend bool operator==(const NodeRegistry& a, const NodeRegistry& b) {
    return a.ids_ == b.ids_;
  }

 private:
  std::vector<std::string> ids_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

/// Intra-layer weights of one exposure type: directed, no self-loops, strictly
/// positive stored entries.
struct LayerMatrix {
  LayerId layer;
  CsrMatrix weights;

  std::size_t node_count() const noexcept { return weights.rows(); }
  friend bool operator==(const LayerMatrix&, const LayerMatrix&) = default;
};

struct DirectedAmount {
  std::string from;
  std::string to;
  double amount = 0.0;
};

/// One coupling between replica (node_from, layer_from) and (node_to, layer_to),
/// with layer_from != layer_to.
struct InterlayerEdge {
  std::size_t node_from = 0;
  std::size_t layer_from = 0;
  std::size_t node_to = 0;
  std::size_t layer_to = 0;
  double weight = 0.0;

  friend bool operator==(const InterlayerEdge&, const InterlayerEdge&) = default;
};

struct MultiplexCoupling {
  double omega = 0.0;
};

struct ExplicitCoupling {
  std::vector<InterlayerEdge> edges;
};

using InterlayerSpec = std::variant<MultiplexCoupling, ExplicitCoupling>;

/// N banks by L layers. Intra-layer blocks are sparse; interlayer couplings are
/// kept as a sorted coordinate list with duplicates summed.
class MultilayerNetwork {
 public:
  MultilayerNetwork() = default;
  MultilayerNetwork(NodeRegistry nodes, std::vector<LayerMatrix> layers,
                    std::vector<InterlayerEdge> interlayer, bool dimensionless = false);

  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::size_t layer_count() const noexcept { return layers_.size(); }
  const NodeRegistry& nodes() const noexcept { return nodes_; }
  const std::vector<LayerMatrix>& layers() const noexcept { return layers_; }
  const LayerMatrix& layer(std::size_t k) const { return layers_.at(k); }
  const std::vector<InterlayerEdge>& interlayer() const noexcept { return interlayer_; }
  bool multiplex() const noexcept { return multiplex_; }
  bool dimensionless() const noexcept { return dimensionless_; }
  LayerRegistry layer_registry() const;

  friend bool operator==(const MultilayerNetwork&, const MultilayerNetwork&) = default;

 private:
  NodeRegistry nodes_;
  std::vector<LayerMatrix> layers_;
  std::vector<InterlayerEdge> interlayer_;
  bool multiplex_ = true;
  bool dimensionless_ = false;
};

/// Layer-major flattening: supra index of (node i, layer k) is k * N + i.
struct SupraMatrix {
  std::size_t nodes = 0;
  std::size_t layers = 0;
  CsrMatrix matrix;

  std::size_t dim() const noexcept { return nodes * layers; }
  std::size_t index(std::size_t node, std::size_t layer) const noexcept {
    return layer * nodes + node;
  }
};

struct ProjectedNetwork {
  CsrMatrix weights;
};

struct LayerAggregate {
  Eigen::MatrixXd q;
};

LayerMatrix build_layer_matrix(std::span<const DirectedAmount> records,
                               const LayerId& layer, const NodeRegistry& registry);

MultilayerNetwork assemble_multilayer(NodeRegistry registry,
                                      std::vector<LayerMatrix> layers,
                                      const InterlayerSpec& interlayer);

SupraMatrix supra_flatten(const MultilayerNetwork& net);

/// Inverse of supra_flatten: diagonal blocks become layers, the rest becomes
/// interlayer couplings.
MultilayerNetwork from_supra(const SupraMatrix& supra, NodeRegistry registry,
                             const LayerRegistry& layers);

ProjectedNetwork project_monoplex(const MultilayerNetwork& net);

LayerAggregate layer_aggregate(const MultilayerNetwork& net);

/// Divides every intra-layer weight w_ij by the capital of the holder i.
/// Interlayer couplings are left untouched.
MultilayerNetwork normalize_by_capital(const MultilayerNetwork& net,
                                       std::span<const double> capitals);

/// Sum of every stored weight, intra and interlayer, by direct iteration.
double total_weight(const MultilayerNetwork& net);

/// Elementwise sum of networks over an identical node and layer registry.
MultilayerNetwork sum_networks(std::span<const MultilayerNetwork> nets);

/// Same topology with every weight (intra and interlayer) multiplied by s.
MultilayerNetwork scale_network(const MultilayerNetwork& net, double s);

}  // namespace mlnet
