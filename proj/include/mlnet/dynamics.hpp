#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mlnet/centrality.hpp"
#include "mlnet/ingest.hpp"
#include "mlnet/sparse.hpp"
#include "mlnet/tensor.hpp"

namespace mlnet {

/// L = D - A_sym on the supra graph, where A_sym = (S + S^T) / 2 and the
/// interlayer blocks of S are scaled by the coupling strength.
struct SupraLaplacian {
  std::size_t nodes = 0;
  std::size_t layers = 0;
  double coupling = 0.0;
  CsrMatrix matrix;

  std::size_t dim() const noexcept { return nodes * layers; }
  double max_diagonal() const;
};

SupraLaplacian supra_laplacian(const MultilayerNetwork& net, double coupling);

struct Trajectory {
  std::vector<double> times;
  std::vector<std::vector<double>> states;
};

/// Integrates dx/dt = -L x with classical RK4 at fixed step dt, recording every
/// `sample_every` steps plus the initial and final states. The last step is
/// shortened to land on t_end.
Trajectory diffuse(const SupraLaplacian& lap, std::span<const double> x0, double t_end,
                   double dt, std::size_t sample_every = 1);

struct Connectivity {
  double lambda2 = 0.0;
  bool connected = false;
};

/// Second-smallest eigenvalue of the supra-Laplacian; 0 with connected = false
/// when the supra graph is disconnected.
Connectivity algebraic_connectivity(const SupraLaplacian& lap);

/// Kendall tau-b with average-rank ties. When either side is fully tied the
/// value is 1 for identical vectors and 0 otherwise.
double kendall_tau_b(std::span<const double> a, std::span<const double> b);

struct WindowResult {
  std::size_t tau = 1;
  std::vector<std::string> block_start;  // first period of each block
  std::vector<std::vector<double>> block_scores;
  std::vector<std::vector<std::size_t>> block_rankings;  // bank indices, best first
  std::vector<double> consecutive_taus;
  std::optional<double> stability;  // mean of consecutive_taus; absent with one block
};

struct TimescaleReport {
  std::string measure;
  std::string scope;
  std::string aggregation = "sum";
  std::vector<std::string> banks;
  std::size_t k = 5;
  std::vector<WindowResult> windows;
  std::optional<double> topk_overlap;  // absent with a single window size
};

/// Block-sums consecutive snapshots for each window size, ranks banks per
/// block, and measures ranking stability within and across time scales.
/// A trailing partial block is dropped.
TimescaleReport timescale_centrality_stability(std::span<const NetworkBundle> snapshots,
                                               const MeasureSpec& measure,
                                               std::span<const std::size_t> windows,
                                               std::size_t k = 5);

}  // namespace mlnet
