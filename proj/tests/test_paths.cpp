#include <doctest.h>

#include <random>

#include "mlnet/centrality.hpp"
#include "path_oracle.hpp"
#include "support.hpp"

using namespace mlnet;

TEST_CASE("directed path") {
  const Eigen::MatrixXd w = (Eigen::MatrixXd(3, 3) << 0, 1, 0, 0, 0, 1, 0, 0, 0).finished();
  const auto a = CsrMatrix::from_dense(w);
  CHECK(betweenness_scores(a) == std::vector<double>{0, 1, 0});
  const auto c = closeness_scores(a);
  CHECK(c[0] == doctest::Approx(2.0 / 3.0));
  CHECK(c[1] == doctest::Approx(1.0));
  CHECK(c[2] == 0.0);
}

TEST_CASE("complete symmetric graph has no brokers") {
  Eigen::MatrixXd w = Eigen::MatrixXd::Constant(5, 5, 2.0);
  w.diagonal().setZero();
  for (double b : betweenness_scores(CsrMatrix::from_dense(w))) CHECK(b == 0.0);
}

TEST_CASE("stronger exposures are shorter") {
  // 0 -> 2 directly with weight 1 (length 1) or via 1 with weights 4, 4 (length 0.5).
  const Eigen::MatrixXd w = (Eigen::MatrixXd(3, 3) << 0, 4, 1, 0, 0, 4, 0, 0, 0).finished();
  CHECK(betweenness_scores(CsrMatrix::from_dense(w))[1] == 1.0);
}

TEST_CASE("equal-length alternatives split the dependency") {
  // Two routes 0 -> 1 -> 3 and 0 -> 2 -> 3 of equal length.
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(4, 4);
  w(0, 1) = w(1, 3) = w(0, 2) = w(2, 3) = 1.0;
  const auto b = betweenness_scores(CsrMatrix::from_dense(w));
  CHECK(b[1] == 0.5);
  CHECK(b[2] == 0.5);
}

TEST_CASE("random graphs against path enumeration") {
  std::mt19937_64 rng(71);
  std::uniform_int_distribution<int> dyadic(0, 2);
  for (int rep = 0; rep < 40; ++rep) {
    const std::size_t n = 2 + static_cast<std::size_t>(rep % 6);
    Eigen::MatrixXd w = testing::random_weights(rng, n, 0.45);
    if (rep % 2 == 0) {
      // Weights in {1, 2, 4} give exactly representable lengths and real ties.
      for (Eigen::Index i = 0; i < w.rows(); ++i)
        for (Eigen::Index j = 0; j < w.cols(); ++j)
          if (w(i, j) > 0) w(i, j) = static_cast<double>(1 << dyadic(rng));
    }
    const auto oracle = testing::enumerate_paths(w);
    const auto a = CsrMatrix::from_dense(w);
    const auto b = betweenness_scores(a);
    const auto c = closeness_scores(a);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(b[i] == doctest::Approx(oracle.betweenness[i]).epsilon(1e-12));
      CHECK(c[i] == doctest::Approx(oracle.closeness[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("multilayer path centrality sums replicas") {
  const Eigen::MatrixXd w = (Eigen::MatrixXd(3, 3) << 0, 1, 0, 0, 0, 1, 0, 0, 0).finished();
  const auto net = assemble_multilayer(NodeRegistry(testing::bank_ids(3)),
                                       {testing::layer_from_dense(w, 0), testing::layer_from_dense(w, 1)},
                                       MultiplexCoupling{});
  const auto r = path_centrality(net, Scope::multilayer(), Orientation::Out, Measure::Betweenness);
  CHECK(r.scores == std::vector<double>{0, 2, 0});
}
