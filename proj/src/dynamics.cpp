#include "mlnet/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include <Eigen/Eigenvalues>

#include "mlnet/error.hpp"

namespace mlnet {

namespace {

constexpr std::size_t kDenseEigenLimit = 512;

bool is_connected(const CsrMatrix& lap) {
  const std::size_t n = lap.rows();
  if (n <= 1) return true;
  std::vector<char> seen(n, 0);
  std::vector<std::size_t> stack{0};
  seen[0] = 1;
  std::size_t count = 1;
  while (!stack.empty()) {
    const std::size_t u = stack.back();
    stack.pop_back();
    for (std::size_t p = lap.row_ptr()[u]; p < lap.row_ptr()[u + 1]; ++p) {
      const std::size_t v = lap.col_idx()[p];
      if (v != u && lap.values()[p] != 0.0 && !seen[v]) {
        seen[v] = 1;
        ++count;
        stack.push_back(v);
      }
    }
  }
  return count == n;
}

// Largest eigenvalue of cI - L on the complement of the constant vector.
double deflated_lambda2(const CsrMatrix& lap, double c) {
  const std::size_t n = lap.rows();
  std::vector<double> x(n), lx(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = std::sin(static_cast<double>(i) + 1.0);
  auto project_and_normalize = [&](std::vector<double>& v) {
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(n);
    double norm = 0.0;
    for (auto& e : v) {
      e -= mean;
      norm += e * e;
    }
    norm = std::sqrt(norm);
    for (auto& e : v) e /= norm;
  };
  project_and_normalize(x);
  for (std::size_t it = 0; it < 200000; ++it) {
    lap.multiply(x, lx);
    double mu = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      lx[i] = c * x[i] - lx[i];
      mu += x[i] * lx[i];
    }
    double res = 0.0;
    for (std::size_t i = 0; i < n; ++i) res += (lx[i] - mu * x[i]) * (lx[i] - mu * x[i]);
    if (std::sqrt(res) <= 1e-10 * c) return c - mu;
    x = lx;
    project_and_normalize(x);
  }
  throw Error(ErrorCode::SolverFailure, "algebraic connectivity iteration did not converge");
}

std::vector<double> rk4_step(const CsrMatrix& lap, const std::vector<double>& x, double h) {
  const std::size_t n = x.size();
  std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
  lap.multiply(x, k1);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] - 0.5 * h * k1[i];
  lap.multiply(tmp, k2);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] - 0.5 * h * k2[i];
  lap.multiply(tmp, k3);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] - h * k3[i];
  lap.multiply(tmp, k4);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = x[i] - h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  return out;
}

std::vector<double> average_rank_vector(std::span<const double> v) {
  // Ascending average ranks; the direction does not matter for tau.
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = 0.5 * static_cast<double>(i + j);
    i = j + 1;
  }
  return r;
}

}  // namespace

double SupraLaplacian::max_diagonal() const {
  double m = 0.0;
  for (std::size_t i = 0; i < matrix.rows(); ++i) m = std::max(m, matrix.at(i, i));
  return m;
}

SupraLaplacian supra_laplacian(const MultilayerNetwork& net, double coupling) {
  if (!std::isfinite(coupling) || coupling < 0.0) {
    throw Error(ErrorCode::InvalidArgument, "coupling strength must be finite and >= 0");
  }
  SupraLaplacian lap;
  lap.nodes = net.node_count();
  lap.layers = net.layer_count();
  lap.coupling = coupling;
  const auto supra = supra_flatten(net);
  const std::size_t n = supra.nodes;
  std::vector<Triplet> t;
  std::vector<double> degree(supra.dim(), 0.0);
  supra.matrix.for_each([&](std::size_t r, std::size_t c, double w) {
    const double half = 0.5 * w * (r / n == c / n ? 1.0 : coupling);
    if (half == 0.0 || r == c) return;
    t.push_back({r, c, -half});
    t.push_back({c, r, -half});
    degree[r] += half;
    degree[c] += half;
  });
  for (std::size_t i = 0; i < degree.size(); ++i) t.push_back({i, i, degree[i]});
  lap.matrix = CsrMatrix(supra.dim(), supra.dim(), std::move(t));
  return lap;
}

Trajectory diffuse(const SupraLaplacian& lap, std::span<const double> x0, double t_end,
                   double dt, std::size_t sample_every) {
  if (x0.size() != lap.dim()) {
    throw Error(ErrorCode::InvalidArgument, "initial state length must equal N * L");
  }
  if (!(t_end > 0.0) || !(dt > 0.0) || sample_every == 0) {
    throw Error(ErrorCode::InvalidArgument, "t_end, dt and sample_every must be positive");
  }
  const double maxd = lap.max_diagonal();
  if (maxd > 0.0 && dt > 0.5 / maxd) {
    throw Error(ErrorCode::UnstableStep, "dt " + format_double(dt) + " exceeds stability limit " +
                                             format_double(0.5 / maxd));
  }
  dt = std::min(dt, t_end);
  Trajectory tr;
  std::vector<double> x(x0.begin(), x0.end());
  tr.times.push_back(0.0);
  tr.states.push_back(x);
  const auto steps =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9)));
  for (std::size_t s = 1; s <= steps; ++s) {
    const double t_prev = static_cast<double>(s - 1) * dt;
    const double h = s == steps ? t_end - t_prev : dt;
    x = rk4_step(lap.matrix, x, h);
    if (s % sample_every == 0 || s == steps) {
      tr.times.push_back(s == steps ? t_end : static_cast<double>(s) * dt);
      tr.states.push_back(x);
    }
  }
  return tr;
}

Connectivity algebraic_connectivity(const SupraLaplacian& lap) {
  const std::size_t n = lap.dim();
  if (n <= 1) return {0.0, true};
  if (!is_connected(lap.matrix)) return {0.0, false};
  if (n <= kDenseEigenLimit) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(lap.matrix.to_dense(),
                                                      Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) {
      throw Error(ErrorCode::SolverFailure, "Laplacian eigendecomposition failed");
    }
    return {std::max(es.eigenvalues()(1), 0.0), true};
  }
  return {std::max(deflated_lambda2(lap.matrix, 2.0 * lap.max_diagonal()), 0.0), true};
}

double kendall_tau_b(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(ErrorCode::InvalidArgument, "tau inputs differ in length");
  const auto ra = average_rank_vector(a);
  const auto rb = average_rank_vector(b);
  const std::size_t n = a.size();
  double concordant = 0.0, discordant = 0.0, ties_a = 0.0, ties_b = 0.0, pairs = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      pairs += 1.0;
      const double da = ra[i] - ra[j];
      const double db = rb[i] - rb[j];
      if (da == 0.0) ties_a += 1.0;
      if (db == 0.0) ties_b += 1.0;
      if (da == 0.0 || db == 0.0) continue;
      if ((da > 0.0) == (db > 0.0)) {
        concordant += 1.0;
      } else {
        discordant += 1.0;
      }
    }
  }
  const double denom = std::sqrt((pairs - ties_a) * (pairs - ties_b));
  if (denom == 0.0) return ra == rb ? 1.0 : 0.0;
  return (concordant - discordant) / denom;
}

TimescaleReport timescale_centrality_stability(std::span<const NetworkBundle> snapshots,
                                               const MeasureSpec& measure,
                                               std::span<const std::size_t> windows,
                                               std::size_t k) {
  if (snapshots.size() < 2) {
    throw Error(ErrorCode::InvalidArgument, "timescale analysis needs at least 2 snapshots");
  }
  if (windows.empty()) throw Error(ErrorCode::InvalidArgument, "no window sizes given");
  const auto& first = snapshots.front().network;
  for (const auto& s : snapshots) {
    if (!(s.network.nodes() == first.nodes())) {
      throw Error(ErrorCode::MismatchedBanks, "snapshot " + s.period + " has a different bank set");
    }
  }
  for (auto tau : windows) {
    if (tau == 0 || tau > snapshots.size()) {
      throw Error(ErrorCode::InvalidArgument,
                  "window " + std::to_string(tau) + " outside 1.." +
                      std::to_string(snapshots.size()));
    }
  }
  const std::size_t n = first.node_count();
  TimescaleReport rep;
  rep.measure = std::string(measure_name(measure.measure));
  rep.scope = scope_name(measure.scope, first);
  rep.banks = first.nodes().ids();
  rep.k = std::min(k, n);

  for (auto tau : windows) {
    WindowResult w;
    w.tau = tau;
    for (std::size_t start = 0; start + tau <= snapshots.size(); start += tau) {
      std::vector<MultilayerNetwork> block;
      for (std::size_t s = start; s < start + tau; ++s) block.push_back(snapshots[s].network);
      const auto summed = sum_networks(block);
      auto scores = compute_measure(summed, measure).scores;
      w.block_rankings.push_back(rank_order(scores));
      w.block_scores.push_back(std::move(scores));
      w.block_start.push_back(snapshots[start].period);
    }
    for (std::size_t b = 1; b < w.block_scores.size(); ++b) {
      w.consecutive_taus.push_back(kendall_tau_b(w.block_scores[b - 1], w.block_scores[b]));
    }
    if (!w.consecutive_taus.empty()) {
      w.stability = std::accumulate(w.consecutive_taus.begin(), w.consecutive_taus.end(), 0.0) /
                    static_cast<double>(w.consecutive_taus.size());
    }
    rep.windows.push_back(std::move(w));
  }

  // Cross-scale agreement: for every pair of window sizes and every snapshot
  // covered at both scales, overlap of the top-k sets of the enclosing blocks.
  if (rep.windows.size() > 1 && rep.k > 0) {
    double sum = 0.0;
    std::size_t pairs = 0;
    for (std::size_t a = 0; a < rep.windows.size(); ++a) {
      for (std::size_t b = a + 1; b < rep.windows.size(); ++b) {
        const auto& wa = rep.windows[a];
        const auto& wb = rep.windows[b];
        const std::size_t covered = std::min(wa.block_rankings.size() * wa.tau,
                                             wb.block_rankings.size() * wb.tau);
        double pair_sum = 0.0;
        for (std::size_t t = 0; t < covered; ++t) {
          const auto& ra = wa.block_rankings[t / wa.tau];
          const auto& rb = wb.block_rankings[t / wb.tau];
          std::set<std::size_t> top(ra.begin(), ra.begin() + static_cast<std::ptrdiff_t>(rep.k));
          std::size_t common = 0;
          for (std::size_t i = 0; i < rep.k; ++i) common += top.count(rb[i]);
          pair_sum += static_cast<double>(common) / static_cast<double>(rep.k);
        }
        if (covered > 0) {
          sum += pair_sum / static_cast<double>(covered);
          ++pairs;
        }
      }
    }
    if (pairs > 0) rep.topk_overlap = sum / static_cast<double>(pairs);
  }
  return rep;
}

}  // namespace mlnet
