#pragma once

#include <string>

#include <json.hpp>

#include "mlnet/centrality.hpp"
#include "mlnet/dynamics.hpp"
#include "mlnet/factors.hpp"
#include "mlnet/surcharge.hpp"

namespace mlnet {

// CSV writers emit a header row and use shortest round-trip number text.

/// bank,score,rank (rows in registry order; rank 1 is the highest score).
std::string centrality_csv(const CentralityResult& result);
/// bank,<layer>,... replica scores of a multilayer spectral result.
std::string layer_scores_csv(const CentralityResult& result);
nlohmann::json centrality_json(const CentralityResult& result);

/// bank,surcharge,centrality_weight
std::string surcharge_csv(const SurchargeReport& report, const NodeRegistry& banks);
nlohmann::json surcharge_json(const SurchargeReport& report, const NodeRegistry& banks);

/// factor,PC1,...,PCm
std::string loadings_csv(const PcaResult& pca);
nlohmann::json pca_json(const PcaResult& pca);
nlohmann::json regression_json(const FactorRegression& reg);

nlohmann::json timescale_json(const TimescaleReport& report);

/// t,<bank@layer>,... one row per sample.
std::string trajectory_csv(const Trajectory& trajectory, const MultilayerNetwork& net);

}  // namespace mlnet
