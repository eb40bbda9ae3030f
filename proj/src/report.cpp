#include "mlnet/report.hpp"

#include <sstream>

#include "mlnet/ingest.hpp"

namespace mlnet {

using nlohmann::json;

namespace {

json optional_number(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

json eigen_vector(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

}  // namespace

std::string centrality_csv(const CentralityResult& r) {
  std::vector<std::size_t> rank(r.scores.size());
  const auto order = rank_order(r.scores);
  for (std::size_t pos = 0; pos < order.size(); ++pos) rank[order[pos]] = pos + 1;
  std::ostringstream out;
  out << "bank,score,rank\n";
  for (std::size_t i = 0; i < r.scores.size(); ++i) {
    out << r.banks[i] << ',' << format_double(r.scores[i]) << ',' << rank[i] << '\n';
  }
  return out.str();
}

std::string layer_scores_csv(const CentralityResult& r) {
  std::ostringstream out;
  out << "bank";
  for (const auto& name : r.layer_names) out << ',' << name;
  out << '\n';
  if (!r.layer_scores) return out.str();
  const auto& m = *r.layer_scores;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    out << r.banks[static_cast<std::size_t>(i)];
    for (Eigen::Index k = 0; k < m.cols(); ++k) out << ',' << format_double(m(i, k));
    out << '\n';
  }
  return out.str();
}

json centrality_json(const CentralityResult& r) {
  json j;
  j["measure"] = r.measure;
  j["orientation"] = std::string(orientation_name(r.orientation));
  j["normalization"] = std::string(normalization_name(r.normalization));
  j["banks"] = r.banks;
  j["scores"] = r.scores;
  std::vector<std::size_t> rank(r.scores.size());
  const auto order = rank_order(r.scores);
  for (std::size_t pos = 0; pos < order.size(); ++pos) rank[order[pos]] = pos + 1;
  j["ranks"] = rank;
  j["metadata"] = r.metadata;
  if (r.layer_scores) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < r.layer_scores->rows(); ++i) {
      std::vector<double> row;
      for (Eigen::Index k = 0; k < r.layer_scores->cols(); ++k) row.push_back((*r.layer_scores)(i, k));
      rows.push_back(row);
    }
    j["layer_scores"] = {{"layers", r.layer_names}, {"values", rows}};
  }
  return j;
}

std::string surcharge_csv(const SurchargeReport& rep, const NodeRegistry& banks) {
  std::ostringstream out;
  out << "bank,surcharge,centrality_weight\n";
  for (std::size_t i = 0; i < banks.size(); ++i) {
    out << banks.id(i) << ',' << format_double(rep.surcharges.at(i)) << ','
        << format_double(rep.weights.at(i)) << '\n';
  }
  return out.str();
}

json surcharge_json(const SurchargeReport& rep, const NodeRegistry& banks) {
  json j;
  j["threshold"] = rep.threshold;
  j["c_star"] = rep.c_star;
  j["banks"] = banks.ids();
  j["surcharges"] = rep.surcharges;
  j["weights"] = rep.weights;
  j["lambda_before"] = rep.lambda_before;
  j["lambda_after"] = rep.lambda_after;
  j["iterations"] = rep.iterations;
  j["outer_iterations"] = rep.outer_iterations;
  json trace = json::array();
  for (const auto& p : rep.trace) trace.push_back(json::array({p.c, p.lambda}));
  j["trace"] = trace;
  return j;
}

std::string loadings_csv(const PcaResult& p) {
  std::ostringstream out;
  out << "factor";
  for (std::size_t k = 0; k < p.components(); ++k) out << ",PC" << (k + 1);
  out << '\n';
  for (Eigen::Index f = 0; f < p.loadings.rows(); ++f) {
    out << p.factor_names[static_cast<std::size_t>(f)];
    for (Eigen::Index k = 0; k < p.loadings.cols(); ++k) out << ',' << format_double(p.loadings(f, k));
    out << '\n';
  }
  return out.str();
}

json pca_json(const PcaResult& p) {
  json j;
  j["factors"] = p.factor_names;
  j["periods"] = p.periods;
  j["components"] = p.components();
  j["variance_threshold"] = p.variance_threshold;
  j["explained_variance"] = eigen_vector(p.explained_variance);
  j["explained_ratio"] = eigen_vector(p.explained_ratio);
  j["eigenvalues"] = eigen_vector(p.all_eigenvalues);
  j["mean"] = eigen_vector(p.mean);
  j["stddev"] = eigen_vector(p.stddev);
  json loadings = json::array();
  for (Eigen::Index f = 0; f < p.loadings.rows(); ++f) {
    loadings.push_back(eigen_vector(p.loadings.row(f).transpose()));
  }
  j["loadings"] = loadings;
  return j;
}

json regression_json(const FactorRegression& r) {
  return {{"layer", r.layer},           {"intercept", r.intercept},
          {"coefficients", r.coefficients}, {"r_squared", r.r_squared},
          {"residuals", r.residuals}};
}

json timescale_json(const TimescaleReport& rep) {
  json j;
  j["measure"] = rep.measure;
  j["scope"] = rep.scope;
  j["aggregation"] = rep.aggregation;
  j["banks"] = rep.banks;
  j["k"] = rep.k;
  j["topk_overlap"] = optional_number(rep.topk_overlap);
  json windows = json::array();
  for (const auto& w : rep.windows) {
    json wj;
    wj["tau"] = w.tau;
    wj["block_start"] = w.block_start;
    wj["block_scores"] = w.block_scores;
    wj["block_rankings"] = w.block_rankings;
    wj["consecutive_taus"] = w.consecutive_taus;
    wj["stability"] = optional_number(w.stability);
    windows.push_back(wj);
  }
  j["windows"] = windows;
  return j;
}

std::string trajectory_csv(const Trajectory& tr, const MultilayerNetwork& net) {
  std::ostringstream out;
  out << 't';
  for (std::size_t k = 0; k < net.layer_count(); ++k) {
    for (std::size_t i = 0; i < net.node_count(); ++i) {
      out << ',' << net.nodes().id(i) << '@' << net.layer(k).layer.name;
    }
  }
  out << '\n';
  for (std::size_t s = 0; s < tr.times.size(); ++s) {
    out << format_double(tr.times[s]);
    for (double v : tr.states[s]) out << ',' << format_double(v);
    out << '\n';
  }
  return out.str();
}

}  // namespace mlnet
