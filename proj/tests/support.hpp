#pragma once

// Fixtures shared by the unit and acceptance tests. Random instances come from
// std::mt19937_64 so they do not depend on the library's own generator.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mlnet/sparse.hpp"
#include "mlnet/tensor.hpp"

namespace testing {

inline std::vector<std::string> bank_ids(std::size_t n) {
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) ids.push_back("B" + std::to_string(100 + i));
  return ids;
}

inline mlnet::LayerMatrix layer_from_dense(const Eigen::MatrixXd& w, std::size_t k) {
  return {mlnet::LayerRegistry::canonical().at(k), mlnet::CsrMatrix::from_dense(w)};
}

/// Random non-negative matrix without diagonal; each off-diagonal entry is
/// present with probability density and drawn from (0.1, 5).
inline Eigen::MatrixXd random_weights(std::mt19937_64& rng, std::size_t n, double density,
                                      bool allow_diagonal = false) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_real_distribution<double> w(0.1, 5.0);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                            static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j && !allow_diagonal) continue;
      if (u(rng) < density) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = w(rng);
    }
  }
  return m;
}

/// Random multilayer network. With general == true the interlayer couplings
/// are an explicit random list that may join different banks.
inline mlnet::MultilayerNetwork random_network(std::mt19937_64& rng, std::size_t n,
                                               std::size_t l, double density, bool general,
                                               double omega = 0.7) {
  std::vector<mlnet::LayerMatrix> layers;
  for (std::size_t k = 0; k < l; ++k) layers.push_back(layer_from_dense(random_weights(rng, n, density), k));
  mlnet::NodeRegistry nodes(bank_ids(n));
  if (!general) return mlnet::assemble_multilayer(nodes, std::move(layers), mlnet::MultiplexCoupling{omega});
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_real_distribution<double> w(0.1, 3.0);
  mlnet::ExplicitCoupling c;
  for (std::size_t h = 0; h < l; ++h) {
    for (std::size_t k = 0; k < l; ++k) {
      if (h == k) continue;
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          if (u(rng) < density * 0.5) c.edges.push_back({i, h, j, k, w(rng)});
        }
      }
    }
  }
  return mlnet::assemble_multilayer(nodes, std::move(layers), c);
}

inline double rel_diff(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) / scale;
}

inline double cosine_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return 1.0 - std::abs(a.dot(b)) / (a.norm() * b.norm());
}

inline Eigen::VectorXd to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

/// Perron root and vector of a dense non-negative matrix through a general
/// eigendecomposition: the eigenvalue of largest real part, with its vector
/// made non-negative.
struct DenseEigen {
  double lambda = 0.0;
  Eigen::VectorXd vector;
};

inline DenseEigen dense_perron(const Eigen::MatrixXd& a) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(a);
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < es.eigenvalues().size(); ++i) {
    if (es.eigenvalues()(i).real() > es.eigenvalues()(best).real()) best = i;
  }
  Eigen::VectorXd v = es.eigenvectors().col(best).real();
  if (v.sum() < 0) v = -v;
  return {es.eigenvalues()(best).real(), v};
}

}  // namespace testing
