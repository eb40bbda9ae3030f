#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mlnet/ingest.hpp"

namespace mlnet {

/// T periods by F factors, no gaps.
struct FactorPanel {
  std::vector<std::string> periods;
  std::vector<std::string> factor_names;
  Eigen::MatrixXd values;  // T x F
};

struct StandardizedPanel {
  FactorPanel panel;
  Eigen::VectorXd mean;
  Eigen::VectorXd stddev;  // sample convention, 1 / (T - 1)
};

/// Correlation-matrix PCA. Loadings columns are orthonormal and each column's
/// largest-magnitude entry is positive.
struct PcaResult {
  std::vector<std::string> factor_names;
  std::vector<std::string> periods;
  Eigen::MatrixXd loadings;             // F x m
  Eigen::VectorXd explained_variance;   // m, descending
  Eigen::VectorXd explained_ratio;      // m
  Eigen::VectorXd all_eigenvalues;      // F, descending
  Eigen::MatrixXd scores;               // T x m
  Eigen::MatrixXd standardized;         // T x F
  Eigen::VectorXd mean;
  Eigen::VectorXd stddev;
  double variance_threshold = 0.9;

  std::size_t components() const { return static_cast<std::size_t>(loadings.cols()); }
};

struct FactorRegression {
  std::string layer;
  double intercept = 0.0;
  std::vector<double> coefficients;  // one per retained component
  double r_squared = 0.0;
  std::vector<double> residuals;
};

/// Pivots long-form records into a panel. Periods and factors are sorted;
/// any missing (period, factor) cell or duplicate is an error.
FactorPanel panel_from_records(std::span<const FactorRecord> records);

StandardizedPanel standardize_panel(const FactorPanel& panel);

/// Standardizes internally (a no-op on an already standardized panel).
PcaResult pca(const FactorPanel& panel, double variance_threshold = 0.9);

/// OLS of the series on the retained component scores plus an intercept.
FactorRegression regress_layer_on_components(std::span<const double> layer_series,
                                             const PcaResult& pca, const std::string& layer);

/// Total post-policy weight of each layer per period, aligned with `periods`
/// (rows) and the registry layers (columns).
Eigen::MatrixXd layer_totals_by_period(std::span<const ExposureRecord> records,
                                       std::span<const std::string> periods,
                                       const LayerRegistry& layers,
                                       const SignPolicy& policy = SignPolicy::canonical());

}  // namespace mlnet
