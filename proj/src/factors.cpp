#include "mlnet/factors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include <Eigen/Eigenvalues>

#include "mlnet/error.hpp"

namespace mlnet {

FactorPanel panel_from_records(std::span<const FactorRecord> records) {
  std::set<std::string> periods, factors;
  for (const auto& r : records) {
    periods.insert(r.period);
    factors.insert(r.factor_name);
  }
  FactorPanel p;
  p.periods.assign(periods.begin(), periods.end());
  p.factor_names.assign(factors.begin(), factors.end());
  const auto t = static_cast<Eigen::Index>(p.periods.size());
  const auto f = static_cast<Eigen::Index>(p.factor_names.size());
  p.values = Eigen::MatrixXd::Constant(t, f, std::nan(""));
  std::map<std::string, Eigen::Index> row, col;
  for (Eigen::Index i = 0; i < t; ++i) row[p.periods[static_cast<std::size_t>(i)]] = i;
  for (Eigen::Index j = 0; j < f; ++j) col[p.factor_names[static_cast<std::size_t>(j)]] = j;
  for (const auto& r : records) {
    double& cell = p.values(row[r.period], col[r.factor_name]);
    if (!std::isnan(cell)) {
      throw Error(ErrorCode::ParseError,
                  "duplicate factor value " + r.factor_name + " in " + r.period);
    }
    cell = r.value;
  }
  for (Eigen::Index i = 0; i < t; ++i) {
    for (Eigen::Index j = 0; j < f; ++j) {
      if (std::isnan(p.values(i, j))) {
        throw Error(ErrorCode::ParseError,
                    "missing factor " + p.factor_names[static_cast<std::size_t>(j)] +
                        " in period " + p.periods[static_cast<std::size_t>(i)]);
      }
    }
  }
  return p;
}

StandardizedPanel standardize_panel(const FactorPanel& panel) {
  const Eigen::Index t = panel.values.rows();
  const Eigen::Index f = panel.values.cols();
  if (t < 3 || f < 1) {
    throw Error(ErrorCode::InvalidArgument, "factor panel needs T >= 3 periods and F >= 1 factors");
  }
  StandardizedPanel out{panel, panel.values.colwise().mean().transpose(), Eigen::VectorXd(f)};
  for (Eigen::Index j = 0; j < f; ++j) {
    const Eigen::VectorXd centered = panel.values.col(j).array() - out.mean(j);
    const double sd = std::sqrt(centered.squaredNorm() / static_cast<double>(t - 1));
    if (!(sd > 0.0)) {
      throw Error(ErrorCode::ConstantFactor,
                  "factor " + panel.factor_names[static_cast<std::size_t>(j)] + " is constant");
    }
    out.stddev(j) = sd;
    out.panel.values.col(j) = centered / sd;
  }
  return out;
}

PcaResult pca(const FactorPanel& panel, double variance_threshold) {
  if (!(variance_threshold > 0.0 && variance_threshold <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "variance threshold must lie in (0, 1]");
  }
  const auto z = standardize_panel(panel);
  const Eigen::MatrixXd& x = z.panel.values;
  const Eigen::Index t = x.rows();
  const Eigen::Index f = x.cols();
  const Eigen::MatrixXd corr = (x.transpose() * x) / static_cast<double>(t - 1);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(corr);
  if (es.info() != Eigen::Success) {
    throw Error(ErrorCode::SolverFailure, "correlation eigendecomposition failed");
  }
  // Eigen returns ascending order.
  Eigen::VectorXd evals = es.eigenvalues().reverse();
  Eigen::MatrixXd evecs = es.eigenvectors().rowwise().reverse();
  for (Eigen::Index k = 0; k < f; ++k) {
    evals(k) = std::max(evals(k), 0.0);
    Eigen::Index arg = 0;
    evecs.col(k).cwiseAbs().maxCoeff(&arg);
    if (evecs(arg, k) < 0.0) evecs.col(k) *= -1.0;
  }
  const double total = evals.sum();
  Eigen::Index m = f;
  double cum = 0.0;
  for (Eigen::Index k = 0; k < f; ++k) {
    cum += evals(k);
    if (cum / total >= variance_threshold - 1e-12) {
      m = k + 1;
      break;
    }
  }

  PcaResult r;
  r.factor_names = panel.factor_names;
  r.periods = panel.periods;
  r.variance_threshold = variance_threshold;
  r.all_eigenvalues = evals;
  r.loadings = evecs.leftCols(m);
  r.explained_variance = evals.head(m);
  r.explained_ratio = r.explained_variance / total;
  r.standardized = x;
  r.scores = x * r.loadings;
  r.mean = z.mean;
  r.stddev = z.stddev;
  return r;
}

FactorRegression regress_layer_on_components(std::span<const double> layer_series,
                                             const PcaResult& pca, const std::string& layer) {
  const auto t = static_cast<std::size_t>(pca.scores.rows());
  const std::size_t m = pca.components();
  if (layer_series.size() != t) {
    throw Error(ErrorCode::InvalidArgument, "layer series length differs from panel length");
  }
  if (m < 1) throw Error(ErrorCode::InvalidArgument, "no retained components");
  if (t <= m + 1) {
    throw Error(ErrorCode::Underdetermined, "regression needs more periods than components + 1");
  }
  const Eigen::Map<const Eigen::VectorXd> y(layer_series.data(), static_cast<Eigen::Index>(t));
  FactorRegression out;
  out.layer = layer;
  out.intercept = y.mean();
  const Eigen::VectorXd yc = y.array() - out.intercept;
  // Scores have zero mean and mutually orthogonal columns, so each coefficient
  // is an independent projection.
  Eigen::VectorXd fitted = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(t), out.intercept);
  for (std::size_t k = 0; k < m; ++k) {
    const auto s = pca.scores.col(static_cast<Eigen::Index>(k));
    const double ss = s.squaredNorm();
    const double beta = ss > 0.0 ? s.dot(yc) / ss : 0.0;
    out.coefficients.push_back(beta);
    fitted += beta * s;
  }
  const Eigen::VectorXd resid = y - fitted;
  out.residuals.assign(resid.data(), resid.data() + resid.size());
  const double sst = yc.squaredNorm();
  out.r_squared = sst > 0.0 ? std::clamp(1.0 - resid.squaredNorm() / sst, 0.0, 1.0) : 0.0;
  return out;
}

Eigen::MatrixXd layer_totals_by_period(std::span<const ExposureRecord> records,
                                       std::span<const std::string> periods,
                                       const LayerRegistry& layers, const SignPolicy& policy) {
  std::map<std::string, Eigen::Index> row;
  for (std::size_t i = 0; i < periods.size(); ++i) row[periods[i]] = static_cast<Eigen::Index>(i);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(periods.size()),
                                              static_cast<Eigen::Index>(layers.size()));
  for (const auto& r : apply_sign_policy(records, policy)) {
    auto it = row.find(r.period);
    if (it == row.end()) continue;
    out(it->second, static_cast<Eigen::Index>(layers.at(r.layer.name).index)) += r.amount;
  }
  return out;
}

}  // namespace mlnet
