#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mlnet/tensor.hpp"

namespace mlnet {

struct ExposureRecord {
  std::string period;
  std::string from_bank;
  std::string to_bank;
  LayerId layer;
  double amount = 0.0;

  friend bool operator==(const ExposureRecord&, const ExposureRecord&) = default;
};

struct CapitalRecord {
  std::string period;
  std::string bank;
  double total_capital = 0.0;
};

struct FactorRecord {
  std::string period;
  std::string factor_name;
  double value = 0.0;
};

enum class SignRule {
  NonnegativeOnly,  // negatives are an error
  LongOnly,         // max(v, 0)
  ShortOnly,        // max(-v, 0)
  Absolute,         // |v|
};

std::string_view sign_rule_name(SignRule rule);

/// Per-layer sign handling. Marketable securities are reported long or short
/// and only the long side is an exposure; net CDS carries the short side.
class SignPolicy {
 public:
  static SignPolicy canonical();
  /// Every layer NonnegativeOnly. For re-ingesting exported, already
  /// sign-normalized exposures.
  static SignPolicy pass_through();

  SignRule rule_for(std::string_view layer_name) const;
  void set(std::string_view layer_name, SignRule rule);

 private:
  std::map<std::string, SignRule, std::less<>> rules_;
};

struct NetworkBundle {
  std::string period;
  MultilayerNetwork network;
  std::vector<std::optional<double>> capitals;  // aligned with network.nodes()
  std::vector<std::string> provenance;

  bool capitals_complete() const;
  /// Throws CapitalsIncomplete if any bank lacks a positive capital.
  std::vector<double> require_capitals() const;

  friend bool operator==(const NetworkBundle&, const NetworkBundle&) = default;
};

enum class ExportFormat { Json, GraphMl, Dot, Csv };

ExportFormat parse_export_format(std::string_view name);

/// Validates an ISO-8601 calendar date (YYYY-MM-DD).
bool is_iso_date(std::string_view text);

std::vector<ExposureRecord> parse_exposures(std::istream& in,
                                            const LayerRegistry& layers = LayerRegistry::canonical());
std::vector<CapitalRecord> parse_capitals(std::istream& in);
std::vector<FactorRecord> parse_factors(std::istream& in);

std::vector<ExposureRecord> apply_sign_policy(std::span<const ExposureRecord> records,
                                              const SignPolicy& policy = SignPolicy::canonical());

/// Builds the network for one period. Records and capitals of other periods are
/// ignored. The sign policy is applied before aggregation. Every layer of the
/// registry is materialized, empty or not.
NetworkBundle build_bundle(std::span<const ExposureRecord> records,
                           std::span<const CapitalRecord> capitals, const std::string& period,
                           const InterlayerSpec& interlayer,
                           const LayerRegistry& layers = LayerRegistry::canonical(),
                           const SignPolicy& policy = SignPolicy::canonical());

/// Distinct periods present in the records, sorted.
std::vector<std::string> periods_of(std::span<const ExposureRecord> records);

std::string export_network(const NetworkBundle& bundle, ExportFormat format);
NetworkBundle import_json(std::string_view text);

/// Lowercase hex SHA-256 of the given bytes.
std::string sha256_hex(std::string_view bytes);

/// Shortest decimal text that round-trips to the same double.
std::string format_double(double value);

}  // namespace mlnet
