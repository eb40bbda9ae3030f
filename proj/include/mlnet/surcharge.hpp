#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "mlnet/centrality.hpp"
#include "mlnet/ingest.hpp"
#include "mlnet/tensor.hpp"

namespace mlnet {

enum class TargetingKind { Eigencentrality, Katz };

std::string_view targeting_name(TargetingKind kind);

struct SurchargeConfig {
  double threshold = 1.0;  // lambda*
  TargetingKind vector_kind = TargetingKind::Eigencentrality;
  double katz_attenuation = 0.1;
  Scope scope = Scope::projected();
  double tol_lambda = 1e-8;
  double tol_c = 1e-6;  // relative bracket width
  /// First upper bracket for the budget; 0 means the total system capital.
  double c_max_initial = 0.0;
  bool recompute_vector = false;
  EigenOptions eigen;
};

struct SurchargeProbe {
  double c = 0.0;
  double lambda = 0.0;
};

struct SurchargeReport {
  double threshold = 1.0;
  double c_star = 0.0;
  std::vector<double> surcharges;  // c_star * weights
  std::vector<double> weights;     // l1-normalized targeting vector
  double lambda_before = 0.0;
  double lambda_after = 0.0;
  std::size_t iterations = 0;        // lambda(c) evaluations in the final pass
  std::size_t outer_iterations = 1;  // fixed-point passes over the vector
  std::vector<SurchargeProbe> trace;
};

/// lambda_1 of the capital-relative network at the given scope.
double stability_index(const MultilayerNetwork& net, std::span<const double> capitals,
                       const Scope& scope = Scope::projected(), const EigenOptions& eigen = {});
double stability_index(const NetworkBundle& bundle, const Scope& scope = Scope::projected(),
                       const EigenOptions& eigen = {});

/// Smallest total budget c such that raising each capital by c * v_i brings
/// lambda_1 of the capital-relative network to the threshold or below.
SurchargeReport calibrate_surcharge(const MultilayerNetwork& net,
                                    std::span<const double> capitals,
                                    const SurchargeConfig& config = {});

std::vector<double> apply_surcharge(std::span<const double> capitals,
                                    std::span<const double> surcharges);

}  // namespace mlnet
