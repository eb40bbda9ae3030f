#include <doctest.h>

#include <random>
#include <sstream>

#include "mlnet/error.hpp"
#include "mlnet/factors.hpp"
#include "support.hpp"

using namespace mlnet;

namespace {

FactorPanel panel_of(const Eigen::MatrixXd& values) {
  FactorPanel p;
  for (Eigen::Index t = 0; t < values.rows(); ++t) p.periods.push_back("2010-01-" + std::to_string(10 + t));
  for (Eigen::Index f = 0; f < values.cols(); ++f) p.factor_names.push_back("F" + std::to_string(f));
  p.values = values;
  return p;
}

FactorPanel random_panel(std::mt19937_64& rng, Eigen::Index t, Eigen::Index f) {
  std::normal_distribution<double> z(0.0, 1.0);
  Eigen::MatrixXd v(t, f);
  for (Eigen::Index i = 0; i < t; ++i)
    for (Eigen::Index j = 0; j < f; ++j) v(i, j) = z(rng) + (j > 0 ? 0.6 * v(i, j - 1) : 0.0);
  return panel_of(v);
}

// Textbook OLS through the normal equations (X^T X) b = X^T y.
Eigen::VectorXd normal_equations(const Eigen::MatrixXd& scores, const Eigen::VectorXd& y) {
  Eigen::MatrixXd x(scores.rows(), scores.cols() + 1);
  x.col(0).setOnes();
  x.rightCols(scores.cols()) = scores;
  return (x.transpose() * x).ldlt().solve(x.transpose() * y);
}

}  // namespace

TEST_CASE("standardize") {
  const auto s = standardize_panel(panel_of((Eigen::MatrixXd(3, 1) << 1, 2, 3).finished()));
  CHECK(s.mean(0) == 2.0);
  CHECK(s.stddev(0) == 1.0);
  CHECK(s.panel.values(0, 0) == -1.0);
  CHECK(s.panel.values(1, 0) == 0.0);
  CHECK(s.panel.values(2, 0) == 1.0);

  std::mt19937_64 rng(91);
  const auto once = standardize_panel(random_panel(rng, 12, 3));
  const auto twice = standardize_panel(once.panel);
  CHECK((once.panel.values - twice.panel.values).cwiseAbs().maxCoeff() <= 1e-12);

  try {
    (void)standardize_panel(panel_of((Eigen::MatrixXd(3, 2) << 1, 5, 2, 5, 3, 5).finished()));
    FAIL("expected ConstantFactor");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ConstantFactor);
  }
}

TEST_CASE("pca") {
  SUBCASE("perfectly correlated pair") {
    const auto r = pca(panel_of((Eigen::MatrixXd(4, 2) << 1, 2, 2, 4, 3, 6, 5, 10).finished()));
    CHECK(r.components() == 1);
    CHECK(r.explained_ratio(0) == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("independent noise spreads variance evenly") {
    std::mt19937_64 rng(92);
    std::normal_distribution<double> z(0.0, 1.0);
    Eigen::MatrixXd v(4000, 4);
    for (Eigen::Index i = 0; i < v.rows(); ++i)
      for (Eigen::Index j = 0; j < 4; ++j) v(i, j) = z(rng);
    const auto r = pca(panel_of(v), 1.0);
    for (Eigen::Index j = 0; j < 4; ++j) CHECK(std::abs(r.all_eigenvalues(j) / 4.0 - 0.25) <= 0.15);
  }
  SUBCASE("structural identities") {
    std::mt19937_64 rng(93);
    for (int rep = 0; rep < 10; ++rep) {
      const auto panel = random_panel(rng, 20, 5);
      const auto full = pca(panel, 1.0);
      REQUIRE(full.components() == 5);
      const Eigen::MatrixXd& l = full.loadings;
      CHECK((l.transpose() * l - Eigen::MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff() <= 1e-10);
      CHECK((full.scores * l.transpose() - full.standardized).cwiseAbs().maxCoeff() <= 1e-9);
      CHECK((full.standardized * l - full.scores).cwiseAbs().maxCoeff() <= 1e-10);
      const Eigen::MatrixXd cov = full.scores.transpose() * full.scores / 19.0;
      CHECK((cov - Eigen::MatrixXd(full.explained_variance.asDiagonal())).cwiseAbs().maxCoeff() <= 1e-9);
      for (Eigen::Index j = 0; j < l.cols(); ++j) {
        Eigen::Index arg = 0;
        l.col(j).cwiseAbs().maxCoeff(&arg);
        CHECK(l(arg, j) > 0.0);
      }
      const auto part = pca(panel, 0.8);
      CHECK(part.explained_ratio.sum() >= 0.8 - 1e-12);
      if (part.components() > 1) {
        CHECK(part.explained_ratio.head(part.components() - 1).sum() < 0.8);
      }
    }
  }
}

TEST_CASE("regression") {
  std::mt19937_64 rng(94);
  const auto r = pca(random_panel(rng, 15, 4), 0.95);
  const std::size_t m = r.components();
  SUBCASE("exact multiple of the first component") {
    std::vector<double> y(15);
    for (std::size_t t = 0; t < 15; ++t) y[t] = 3.0 * r.scores(static_cast<Eigen::Index>(t), 0);
    const auto reg = regress_layer_on_components(y, r, "DERIV_FX");
    CHECK(reg.coefficients[0] == doctest::Approx(3.0).epsilon(1e-12));
    for (std::size_t j = 1; j < m; ++j) CHECK(std::abs(reg.coefficients[j]) <= 1e-12);
    CHECK(std::abs(reg.intercept) <= 1e-12);
    CHECK(reg.r_squared == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("constant series") {
    const std::vector<double> y(15, 4.0);
    const auto reg = regress_layer_on_components(y, r, "X");
    CHECK(reg.intercept == doctest::Approx(4.0));
    for (double c : reg.coefficients) CHECK(std::abs(c) <= 1e-12);
    CHECK(reg.r_squared == 0.0);
  }
  SUBCASE("random series against the normal equations") {
    std::normal_distribution<double> z(10.0, 3.0);
    for (int rep = 0; rep < 10; ++rep) {
      std::vector<double> y(15);
      for (auto& v : y) v = z(rng);
      const auto reg = regress_layer_on_components(y, r, "X");
      const Eigen::VectorXd b = normal_equations(r.scores, testing::to_eigen(y));
      CHECK(std::abs(reg.intercept - b(0)) <= 1e-9);
      for (std::size_t j = 0; j < m; ++j) CHECK(std::abs(reg.coefficients[j] - b(static_cast<Eigen::Index>(j) + 1)) <= 1e-9);
      const Eigen::VectorXd res = testing::to_eigen(reg.residuals);
      for (Eigen::Index j = 0; j < r.scores.cols(); ++j) {
        CHECK(std::abs(res.dot(r.scores.col(j))) <= 1e-8 * res.norm() * r.scores.col(j).norm() + 1e-12);
      }
    }
  }
  SUBCASE("underdetermined") {
    const auto tiny = pca(panel_of((Eigen::MatrixXd(3, 2) << 1, 0, 2, 3, 4, 1).finished()), 1.0);
    const std::vector<double> y{1, 2, 3};
    try {
      (void)regress_layer_on_components(y, tiny, "X");
      FAIL("expected Underdetermined");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::Underdetermined);
    }
  }
}

TEST_CASE("panel from records") {
  std::istringstream csv(
      "period,factor_name,value\n"
      "2020-02-29,DJI,2\n2020-01-31,DJI,1\n2020-03-31,DJI,3\n"
      "2020-01-31,LIBOR_3M,0.5\n2020-02-29,LIBOR_3M,0.4\n2020-03-31,LIBOR_3M,0.7\n");
  const auto p = panel_from_records(parse_factors(csv));
  CHECK(p.periods == std::vector<std::string>{"2020-01-31", "2020-02-29", "2020-03-31"});
  CHECK(p.factor_names == std::vector<std::string>{"DJI", "LIBOR_3M"});
  CHECK(p.values(1, 0) == 2.0);
  CHECK(p.values(2, 1) == 0.7);

  std::istringstream gap("period,factor_name,value\n2020-01-31,DJI,1\n2020-02-29,DJI,2\n2020-01-31,FX,3\n");
  CHECK_THROWS_AS(panel_from_records(parse_factors(gap)), Error);
}
