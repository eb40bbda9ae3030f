#include "mlnet/surcharge.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mlnet/error.hpp"

namespace mlnet {

namespace {

constexpr int kGrowthDoublings = 60;
constexpr std::size_t kMaxBisections = 62;
constexpr std::size_t kMaxOuter = 50;
constexpr double kFixedPointTol = 1e-8;

std::vector<double> shifted_capitals(std::span<const double> capitals,
                                     std::span<const double> weights, double c) {
  std::vector<double> out(capitals.begin(), capitals.end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += c * weights[i];
  return out;
}

std::vector<double> targeting_vector(const MultilayerNetwork& net,
                                     std::span<const double> capitals,
                                     const SurchargeConfig& cfg) {
  const auto rel = normalize_by_capital(net, capitals);
  std::vector<double> v;
  if (cfg.vector_kind == TargetingKind::Eigencentrality) {
    v = eigencentrality(rel, cfg.scope, Orientation::Out, cfg.eigen).scores;
  } else {
    v = katz_centrality(rel, cfg.scope, Orientation::Out, cfg.katz_attenuation, cfg.eigen.tol)
            .scores;
  }
  const double s = std::accumulate(v.begin(), v.end(), 0.0);
  if (!(s > 0.0)) throw Error(ErrorCode::ZeroMatrix, "targeting vector is zero");
  for (auto& x : v) x /= s;
  return v;
}

struct Pass {
  double c_star = 0.0;
  double lambda_after = 0.0;
  std::vector<SurchargeProbe> trace;
};

Pass bracket_and_bisect(const MultilayerNetwork& net, std::span<const double> capitals,
                        std::span<const double> weights, const SurchargeConfig& cfg,
                        double lambda0) {
  auto lambda_at = [&](double c) {
    return stability_index(net, shifted_capitals(capitals, weights, c), cfg.scope, cfg.eigen);
  };
  Pass pass;
  pass.trace.push_back({0.0, lambda0});
  if (lambda0 <= cfg.threshold) {
    pass.lambda_after = lambda0;
    return pass;
  }
  const double initial = cfg.c_max_initial > 0.0
                             ? cfg.c_max_initial
                             : std::accumulate(capitals.begin(), capitals.end(), 0.0);
  double lo = 0.0;
  double hi = initial;
  double lambda_hi = lambda_at(hi);
  pass.trace.push_back({hi, lambda_hi});
  int doublings = 0;
  while (lambda_hi > cfg.threshold) {
    if (++doublings > kGrowthDoublings) {
      throw Error(ErrorCode::Unstabilizable,
                  "lambda_1 stays at " + format_double(lambda_hi) + " above threshold " +
                      format_double(cfg.threshold) + " for budgets up to " + format_double(hi));
    }
    lo = hi;
    hi *= 2.0;
    lambda_hi = lambda_at(hi);
    pass.trace.push_back({hi, lambda_hi});
  }
  for (std::size_t k = 0; k < kMaxBisections && hi - lo > cfg.tol_c * hi; ++k) {
    const double mid = 0.5 * (lo + hi);
    const double lm = lambda_at(mid);
    pass.trace.push_back({mid, lm});
    if (lm <= cfg.threshold) {
      hi = mid;
      lambda_hi = lm;
    } else {
      lo = mid;
    }
  }
  pass.c_star = hi;
  pass.lambda_after = lambda_hi;
  return pass;
}

}  // namespace

std::string_view targeting_name(TargetingKind kind) {
  return kind == TargetingKind::Eigencentrality ? "eigencentrality" : "katz";
}

double stability_index(const MultilayerNetwork& net, std::span<const double> capitals,
                       const Scope& scope, const EigenOptions& eigen) {
  const auto rel = normalize_by_capital(net, capitals);
  return spectral_radius(scope_matrix(rel, scope), eigen);
}

double stability_index(const NetworkBundle& bundle, const Scope& scope,
                       const EigenOptions& eigen) {
  return stability_index(bundle.network, bundle.require_capitals(), scope, eigen);
}

SurchargeReport calibrate_surcharge(const MultilayerNetwork& net,
                                    std::span<const double> capitals,
                                    const SurchargeConfig& cfg) {
  if (!(cfg.threshold > 0.0) || !(cfg.tol_lambda > 0.0) || !(cfg.tol_c > 0.0) ||
      cfg.c_max_initial < 0.0) {
    throw Error(ErrorCode::InvalidArgument,
                "threshold and tolerances must be positive, c_max_initial non-negative");
  }
  SurchargeReport report;
  report.threshold = cfg.threshold;
  report.lambda_before = stability_index(net, capitals, cfg.scope, cfg.eigen);
  const std::size_t n = net.node_count();

  if (report.lambda_before <= cfg.threshold) {
    report.lambda_after = report.lambda_before;
    report.surcharges.assign(n, 0.0);
    try {
      report.weights = targeting_vector(net, capitals, cfg);
    } catch (const Error&) {
      report.weights.assign(n, 0.0);
    }
    report.trace.push_back({0.0, report.lambda_before});
    report.iterations = 1;
    return report;
  }

  auto weights = targeting_vector(net, capitals, cfg);
  Pass pass = bracket_and_bisect(net, capitals, weights, cfg, report.lambda_before);
  std::size_t outer = 1;
  if (cfg.recompute_vector) {
    while (true) {
      const auto next =
          targeting_vector(net, shifted_capitals(capitals, weights, pass.c_star), cfg);
      double change = 0.0;
      for (std::size_t i = 0; i < n; ++i) change = std::max(change, std::abs(next[i] - weights[i]));
      if (change <= kFixedPointTol) break;
      if (++outer > kMaxOuter) {
        throw Error(ErrorCode::FixedPointDivergence,
                    "targeting vector still moves by " + format_double(change) + " after " +
                        std::to_string(kMaxOuter) + " passes");
      }
      // Half-step damping; the undamped map tends to overshoot and oscillate.
      double total = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        weights[i] = 0.5 * (next[i] + weights[i]);
        total += weights[i];
      }
      for (auto& w : weights) w /= total;
      pass = bracket_and_bisect(net, capitals, weights, cfg, report.lambda_before);
    }
  }

  report.c_star = pass.c_star;
  report.weights = weights;
  report.surcharges.resize(n);
  for (std::size_t i = 0; i < n; ++i) report.surcharges[i] = pass.c_star * weights[i];
  report.lambda_after = pass.lambda_after;
  report.iterations = pass.trace.size();
  report.outer_iterations = outer;
  report.trace = std::move(pass.trace);
  return report;
}

std::vector<double> apply_surcharge(std::span<const double> capitals,
                                    std::span<const double> surcharges) {
  if (capitals.size() != surcharges.size()) {
    throw Error(ErrorCode::MismatchedBanks, "capitals and surcharges cover different banks");
  }
  std::vector<double> out(capitals.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = capitals[i] + surcharges[i];
  return out;
}

}  // namespace mlnet
