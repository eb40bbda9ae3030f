#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "mlnet/sparse.hpp"
#include "mlnet/tensor.hpp"

namespace mlnet {

struct Scope {
  enum class Kind { Layer, Projected, Multilayer };
  Kind kind = Kind::Projected;
  std::size_t layer = 0;

  static Scope of_layer(std::size_t k) { return {Kind::Layer, k}; }
  static Scope projected() { return {Kind::Projected, 0}; }
  static Scope multilayer() { return {Kind::Multilayer, 0}; }

  friend bool operator==(const Scope&, const Scope&) = default;
};

/// "projected", "multilayer" or "layer:<NAME>".
std::string scope_name(const Scope& scope, const MultilayerNetwork& net);
Scope parse_scope(std::string_view text, const MultilayerNetwork& net);

/// Out: exposures held (row direction). In: exposures attracted (column
/// direction). Total: both.
enum class Orientation { Out, In, Total };

std::string_view orientation_name(Orientation o);
Orientation parse_orientation(std::string_view text);

enum class Normalization { None, L1, Max };

std::string_view normalization_name(Normalization n);

struct CentralityResult {
  std::string measure;
  Scope scope;
  Orientation orientation = Orientation::Out;
  std::vector<std::string> banks;
  std::vector<double> scores;
  /// N x L replica scores, only for multilayer spectral measures.
  std::optional<Eigen::MatrixXd> layer_scores;
  std::vector<std::string> layer_names;
  Normalization normalization = Normalization::None;
  std::map<std::string, std::string> metadata;
};

struct EigenOptions {
  /// Uniform teleport weight in [0, 1). The operator becomes
  /// (1 - eps) A + eps * (total(A) / n^2) * ones, which keeps the scale of A.
  double teleport = 0.0;
  double tol = 1e-10;
  std::size_t max_iter = 10000;
};

struct EigenPair {
  double lambda = 0.0;
  std::vector<double> vector;  // max-normalized, non-negative
  /// Collatz-Wielandt bound max_i (A v)_i / v_i; never below the true
  /// spectral radius when v is positive.
  double upper_bound = 0.0;
  std::size_t iterations = 0;
};

/// Dominant eigenpair of a non-negative square matrix by shifted power
/// iteration. Throws ZeroMatrix when the spectral radius is zero and
/// NonConvergence when max_iter is exhausted.
EigenPair dominant_eigenpair(const CsrMatrix& a, const EigenOptions& options = {});

/// Largest eigenvalue of a non-negative square matrix; zero for acyclic
/// (nilpotent) matrices.
double spectral_radius(const CsrMatrix& a, const EigenOptions& options = {});

/// Solves (I - a A) v = 1. Throws DivergentAttenuation when a * lambda_1 >= 1 - 1e-12.
std::vector<double> katz_scores(const CsrMatrix& a, double attenuation, double tol = 1e-10);

/// Stationary distribution of the damped random walk following edge direction.
/// Dangling rows redistribute uniformly. Sums to one.
std::vector<double> pagerank_scores(const CsrMatrix& a, double damping = 0.85,
                                    double tol = 1e-10, std::size_t max_iter = 10000);

/// Directed shortest-path betweenness with edge length 1 / w.
std::vector<double> betweenness_scores(const CsrMatrix& a);

/// reachable / sum of distances to reachable nodes; 0 for nodes reaching nobody.
std::vector<double> closeness_scores(const CsrMatrix& a);

/// Layer block, projected monoplex, or supra matrix for the scope.
CsrMatrix scope_matrix(const MultilayerNetwork& net, const Scope& scope);
CsrMatrix oriented(const CsrMatrix& a, Orientation orientation);

enum class Measure { Degree, Strength, Eigencentrality, Katz, PageRank, Betweenness, Closeness };

std::string_view measure_name(Measure m);
Measure parse_measure(std::string_view text);

struct MeasureSpec {
  Measure measure = Measure::Eigencentrality;
  Scope scope = Scope::projected();
  Orientation orientation = Orientation::Out;
  double katz_attenuation = 0.1;
  double damping = 0.85;
  EigenOptions eigen;
};

CentralityResult degree_strength(const MultilayerNetwork& net, const Scope& scope,
                                 Orientation orientation, bool weighted);
CentralityResult eigencentrality(const MultilayerNetwork& net, const Scope& scope,
                                 Orientation orientation, const EigenOptions& options = {});
CentralityResult katz_centrality(const MultilayerNetwork& net, const Scope& scope,
                                 Orientation orientation, double attenuation,
                                 double tol = 1e-10);
CentralityResult pagerank(const MultilayerNetwork& net, const Scope& scope,
                          Orientation orientation, double damping = 0.85, double tol = 1e-10);
CentralityResult path_centrality(const MultilayerNetwork& net, const Scope& scope,
                                 Orientation orientation, Measure kind);

CentralityResult compute_measure(const MultilayerNetwork& net, const MeasureSpec& spec);

/// Borda aggregation: average descending ranks per measure, mean over measures,
/// mapped to [0, 1] with 1 for the best possible mean rank.
CentralityResult composite_centrality(std::span<const CentralityResult> results);

/// Descending average ranks (1 = highest score; ties share the mean rank).
std::vector<double> average_ranks(std::span<const double> scores);

/// Bank indices ordered by descending score, ties by ascending index.
std::vector<std::size_t> rank_order(std::span<const double> scores);

}  // namespace mlnet
