#include "mlnet/centrality.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mlnet/error.hpp"
#include "mlnet/ingest.hpp"

namespace mlnet {

namespace {

constexpr double kKatzMargin = 1e-12;
constexpr std::size_t kDenseSolveLimit = 2048;

void require_square_nonnegative(const CsrMatrix& a, std::string_view what) {
  if (!a.is_square()) {
    throw Error(ErrorCode::InvalidArgument, std::string(what) + " needs a square matrix");
  }
  for (double v : a.values()) {
    if (!std::isfinite(v) || v < 0.0) {
      throw Error(ErrorCode::InvalidArgument,
                  std::string(what) + " needs finite non-negative entries");
    }
  }
}

// A non-negative matrix has spectral radius zero exactly when its graph has no
// cycle (self-loops count as cycles).
bool is_acyclic(const CsrMatrix& a) {
  const std::size_t n = a.rows();
  std::vector<std::size_t> indeg(n, 0);
  a.for_each([&](std::size_t, std::size_t j, double) { ++indeg[j]; });
  std::vector<std::size_t> ready;
  for (std::size_t i = 0; i < n; ++i) {
    if (indeg[i] == 0) ready.push_back(i);
  }
  std::size_t removed = 0;
  const auto rp = a.row_ptr();
  const auto ci = a.col_idx();
  while (!ready.empty()) {
    const std::size_t i = ready.back();
    ready.pop_back();
    ++removed;
    for (std::size_t p = rp[i]; p < rp[i + 1]; ++p) {
      if (--indeg[ci[p]] == 0) ready.push_back(ci[p]);
    }
  }
  return removed == n;
}

// Tarjan strongly connected components; returns component id per node.
std::vector<std::size_t> strong_components(const CsrMatrix& a, std::size_t& count) {
  const std::size_t n = a.rows();
  constexpr std::size_t kUnset = static_cast<std::size_t>(-1);
  std::vector<std::size_t> index(n, kUnset), low(n, 0), comp(n, kUnset), stack;
  std::vector<char> on_stack(n, 0);
  std::size_t next = 0;
  count = 0;
  const auto rp = a.row_ptr();
  const auto ci = a.col_idx();
  struct Frame {
    std::size_t node;
    std::size_t edge;
  };
  std::vector<Frame> call;
  for (std::size_t root = 0; root < n; ++root) {
    if (index[root] != kUnset) continue;
    call.push_back({root, rp[root]});
    index[root] = low[root] = next++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!call.empty()) {
      auto& f = call.back();
      if (f.edge < rp[f.node + 1]) {
        const std::size_t w = ci[f.edge++];
        if (index[w] == kUnset) {
          index[w] = low[w] = next++;
          stack.push_back(w);
          on_stack[w] = 1;
          call.push_back({w, rp[w]});
        } else if (on_stack[w]) {
          low[f.node] = std::min(low[f.node], index[w]);
        }
        continue;
      }
      const std::size_t v = f.node;
      call.pop_back();
      if (!call.empty()) low[call.back().node] = std::min(low[call.back().node], low[v]);
      if (low[v] == index[v]) {
        std::size_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          comp[w] = count;
        } while (w != v);
        ++count;
      }
    }
  }
  return comp;
}

struct PowerState {
  double lambda = 0.0;
  double upper = 0.0;
  std::vector<double> x;
  std::size_t iterations = 0;
  bool converged = false;
};

// Iterates on A - sI, where s is the smallest diagonal entry, and adds s
// back. The residual of the eigen equation is unchanged by the shift, but a
// heavy common diagonal (interlayer coupling in a projection) no longer slows
// convergence.
PowerState power_iterate_core(const CsrMatrix& a, double total, double shift,
                              const EigenOptions& opt, const std::vector<double>* start) {
  const std::size_t n = a.rows();
  const double eps = opt.teleport;
  const double uniform = eps * total / (static_cast<double>(n) * static_cast<double>(n));
  auto apply = [&](const std::vector<double>& x, std::vector<double>& y) {
    a.multiply(x, y);
    if (eps > 0.0) {
      const double s = std::accumulate(x.begin(), x.end(), 0.0);
      for (auto& v : y) v = (1.0 - eps) * v + uniform * s;
    }
  };
  auto max_of = [](const std::vector<double>& v) {
    return *std::max_element(v.begin(), v.end());
  };

  // Growth-rate estimate for the shift. Iterating A + sigma I with sigma on
  // the order of lambda_1 damps the rotating modes of periodic matrices.
  std::vector<double> x(n, 1.0), y(n, 0.0);
  double log_growth = 0.0;
  constexpr int kWarmup = 30;
  for (int t = 0; t < kWarmup; ++t) {
    apply(x, y);
    const double m = max_of(y);
    if (!(m > 0.0)) {
      if (shift > 0.0) {
        PowerState diag;
        diag.lambda = diag.upper = shift;
        diag.x.assign(n, 1.0);
        diag.converged = true;
        return diag;
      }
      throw Error(ErrorCode::ZeroMatrix, "matrix has spectral radius zero");
    }
    log_growth += std::log(m);
    for (std::size_t i = 0; i < n; ++i) x[i] = y[i] / m;
  }
  const double sigma = std::exp(log_growth / kWarmup);

  PowerState st;
  if (start) {
    x = *start;
  } else {
    std::fill(x.begin(), x.end(), 1.0);
  }
  for (std::size_t it = 1; it <= opt.max_iter; ++it) {
    apply(x, y);
    const double lambda = max_of(y);
    double residual = 0.0;
    for (std::size_t i = 0; i < n; ++i) residual = std::max(residual, std::abs(y[i] - lambda * x[i]));
    st.lambda = lambda;
    st.iterations = it;
    if (residual <= opt.tol * (lambda + shift)) {
      st.converged = true;
      break;
    }
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = y[i] + sigma * x[i];
      m = std::max(m, x[i]);
    }
    for (auto& v : x) v /= m;
  }
  double upper = st.lambda;
  for (std::size_t i = 0; i < n; ++i) {
    if (x[i] > 0.0) upper = std::max(upper, y[i] / x[i]);
  }
  st.lambda += shift;
  st.upper = upper + shift;
  st.x = std::move(x);
  return st;
}

PowerState power_iterate(const CsrMatrix& a, const EigenOptions& opt,
                         const std::vector<double>* start = nullptr) {
  const std::size_t n = a.rows();
  std::vector<double> diag(n, 0.0);
  a.for_each([&](std::size_t i, std::size_t j, double w) {
    if (i == j) diag[i] = w;
  });
  const double s = n == 0 ? 0.0 : *std::min_element(diag.begin(), diag.end());
  if (!(s > 0.0)) return power_iterate_core(a, a.total(), 0.0, opt, start);
  std::vector<Triplet> t = a.triplets();
  for (std::size_t i = 0; i < n; ++i) t.push_back({i, i, -s});
  const CsrMatrix reduced(n, n, std::move(t));
  return power_iterate_core(reduced, a.total(), (1.0 - opt.teleport) * s, opt, start);
}

// For a reducible matrix the Perron vector vanishes on nodes with no path to
// a class whose own spectral radius equals lambda_1. Power iteration only
// drives those entries towards zero; this sets them to exactly zero and
// reports whether anything changed.
bool clear_inaccessible(const CsrMatrix& a, double lambda, std::vector<double>& x) {
  const std::size_t n = a.rows();
  std::size_t count = 0;
  const auto comp = strong_components(a, count);
  if (count <= 1) return false;
  std::vector<std::vector<std::size_t>> members(count);
  for (std::size_t i = 0; i < n; ++i) members[comp[i]].push_back(i);
  std::vector<char> basic(count, 0);
  for (std::size_t c = 0; c < count; ++c) {
    const auto& m = members[c];
    std::vector<std::size_t> local(n, 0);
    for (std::size_t k = 0; k < m.size(); ++k) local[m[k]] = k;
    std::vector<Triplet> t;
    for (std::size_t i : m) {
      for (std::size_t p = a.row_ptr()[i]; p < a.row_ptr()[i + 1]; ++p) {
        const std::size_t j = a.col_idx()[p];
        if (comp[j] == c) t.push_back({local[i], local[j], a.values()[p]});
      }
    }
    if (t.empty()) continue;
    const CsrMatrix sub(m.size(), m.size(), std::move(t));
    EigenOptions o;
    const auto st = power_iterate(sub, o);
    if (st.upper >= lambda * (1.0 - 1e-8)) basic[c] = 1;
  }
  // Nodes that reach a basic class keep their entries.
  const auto at = a.transpose();
  std::vector<char> keep(n, 0);
  std::vector<std::size_t> queue;
  for (std::size_t i = 0; i < n; ++i) {
    if (basic[comp[i]]) {
      keep[i] = 1;
      queue.push_back(i);
    }
  }
  while (!queue.empty()) {
    const std::size_t j = queue.back();
    queue.pop_back();
    for (std::size_t p = at.row_ptr()[j]; p < at.row_ptr()[j + 1]; ++p) {
      const std::size_t i = at.col_idx()[p];
      if (!keep[i]) {
        keep[i] = 1;
        queue.push_back(i);
      }
    }
  }
  if (std::all_of(keep.begin(), keep.end(), [](char k) { return k != 0; })) return false;
  for (std::size_t i = 0; i < n; ++i) {
    if (!keep[i]) x[i] = 0.0;
  }
  const double m = *std::max_element(x.begin(), x.end());
  if (m > 0.0) {
    for (auto& v : x) v /= m;
  }
  return true;
}

// Dense Gaussian elimination with partial pivoting and one refinement step.
std::vector<double> dense_katz_solve(const CsrMatrix& a, double att) {
  const std::size_t n = a.rows();
  std::vector<double> m(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) m[i * n + i] = 1.0;
  a.for_each([&](std::size_t i, std::size_t j, double w) { m[i * n + j] -= att * w; });
  const std::vector<double> orig = m;
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t r = k + 1; r < n; ++r) {
      if (std::abs(m[r * n + k]) > std::abs(m[piv * n + k])) piv = r;
    }
    if (m[piv * n + k] == 0.0) {
      throw Error(ErrorCode::DivergentAttenuation, "I - aA is singular");
    }
    if (piv != k) {
      for (std::size_t c = 0; c < n; ++c) std::swap(m[k * n + c], m[piv * n + c]);
      std::swap(perm[k], perm[piv]);
    }
    for (std::size_t r = k + 1; r < n; ++r) {
      const double f = m[r * n + k] / m[k * n + k];
      m[r * n + k] = f;
      if (f == 0.0) continue;
      for (std::size_t c = k + 1; c < n; ++c) m[r * n + c] -= f * m[k * n + c];
    }
  }
  auto lu_solve = [&](const std::vector<double>& rhs) {
    std::vector<double> z(n);
    for (std::size_t i = 0; i < n; ++i) {
      double s = rhs[perm[i]];
      for (std::size_t c = 0; c < i; ++c) s -= m[i * n + c] * z[c];
      z[i] = s;
    }
    for (std::size_t ii = n; ii-- > 0;) {
      double s = z[ii];
      for (std::size_t c = ii + 1; c < n; ++c) s -= m[ii * n + c] * z[c];
      z[ii] = s / m[ii * n + ii];
    }
    return z;
  };
  auto v = lu_solve(std::vector<double>(n, 1.0));
  std::vector<double> r(n, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < n; ++c) r[i] -= orig[i * n + c] * v[c];
  }
  const auto dv = lu_solve(r);
  for (std::size_t i = 0; i < n; ++i) v[i] += dv[i];
  return v;
}

std::vector<double> neumann_katz_solve(const CsrMatrix& a, double att, double tol) {
  const std::size_t n = a.rows();
  std::vector<double> v(n, 1.0), av(n);
  for (std::size_t it = 0; it < 1000000; ++it) {
    a.multiply(v, av);
    double change = 0.0, norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double next = 1.0 + att * av[i];
      change = std::max(change, std::abs(next - v[i]));
      norm = std::max(norm, std::abs(next));
      v[i] = next;
    }
    if (change <= tol * norm) return v;
  }
  throw Error(ErrorCode::NonConvergence, "Katz iteration did not converge");
}

struct Collapsed {
  std::vector<double> per_bank;
  Eigen::MatrixXd replica;
};

Collapsed collapse_replicas(std::span<const double> supra, std::size_t n, std::size_t l) {
  Collapsed c{std::vector<double>(n, 0.0),
              Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(l))};
  for (std::size_t k = 0; k < l; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      const double v = supra[k * n + i];
      c.replica(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = v;
      c.per_bank[i] += v;
    }
  }
  return c;
}

CentralityResult make_result(const MultilayerNetwork& net, std::string measure,
                             const Scope& scope, Orientation orientation) {
  CentralityResult r;
  r.measure = std::move(measure);
  r.scope = scope;
  r.orientation = orientation;
  r.banks = net.nodes().ids();
  r.metadata["scope"] = scope_name(scope, net);
  r.metadata["orientation"] = std::string(orientation_name(orientation));
  return r;
}

// Collapses supra-level scores to banks for the multilayer scope.
std::vector<double> bank_scores(const MultilayerNetwork& net, const Scope& scope,
                                std::vector<double> raw) {
  if (scope.kind != Scope::Kind::Multilayer) return raw;
  return collapse_replicas(raw, net.node_count(), net.layer_count()).per_bank;
}

}  // namespace

// ---------------------------------------------------------------------------
// Names

std::string scope_name(const Scope& scope, const MultilayerNetwork& net) {
  switch (scope.kind) {
    case Scope::Kind::Projected: return "projected";
    case Scope::Kind::Multilayer: return "multilayer";
    case Scope::Kind::Layer: return "layer:" + net.layer(scope.layer).layer.name;
  }
  return "?";
}

Scope parse_scope(std::string_view text, const MultilayerNetwork& net) {
  if (text == "projected") return Scope::projected();
  if (text == "multilayer") return Scope::multilayer();
  if (text.starts_with("layer:")) {
    return Scope::of_layer(net.layer_registry().at(text.substr(6)).index);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown scope '" + std::string(text) + "'");
}

std::string_view orientation_name(Orientation o) {
  switch (o) {
    case Orientation::Out: return "out";
    case Orientation::In: return "in";
    case Orientation::Total: return "total";
  }
  return "?";
}

Orientation parse_orientation(std::string_view text) {
  if (text == "out") return Orientation::Out;
  if (text == "in") return Orientation::In;
  if (text == "total") return Orientation::Total;
  throw Error(ErrorCode::InvalidArgument, "unknown orientation '" + std::string(text) + "'");
}

std::string_view normalization_name(Normalization n) {
  switch (n) {
    case Normalization::None: return "none";
    case Normalization::L1: return "l1";
    case Normalization::Max: return "max";
  }
  return "?";
}

std::string_view measure_name(Measure m) {
  switch (m) {
    case Measure::Degree: return "degree";
    case Measure::Strength: return "strength";
    case Measure::Eigencentrality: return "eigencentrality";
    case Measure::Katz: return "katz";
    case Measure::PageRank: return "pagerank";
    case Measure::Betweenness: return "betweenness";
    case Measure::Closeness: return "closeness";
  }
  return "?";
}

Measure parse_measure(std::string_view text) {
  for (auto m : {Measure::Degree, Measure::Strength, Measure::Eigencentrality, Measure::Katz,
                 Measure::PageRank, Measure::Betweenness, Measure::Closeness}) {
    if (measure_name(m) == text) return m;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown measure '" + std::string(text) + "'");
}

// ---------------------------------------------------------------------------
// Matrix-level kernels

EigenPair dominant_eigenpair(const CsrMatrix& a, const EigenOptions& options) {
  require_square_nonnegative(a, "eigencentrality");
  if (!(options.tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tol must be positive");
  if (options.teleport < 0.0 || options.teleport >= 1.0) {
    throw Error(ErrorCode::InvalidArgument, "teleport must lie in [0, 1)");
  }
  if (a.rows() == 0 || a.nnz() == 0 || (options.teleport == 0.0 && is_acyclic(a))) {
    throw Error(ErrorCode::ZeroMatrix, "matrix has spectral radius zero");
  }
  auto st = power_iterate(a, options);
  if (!st.converged) {
    throw Error(ErrorCode::NonConvergence, "power iteration did not converge in " +
                                               std::to_string(options.max_iter) + " iterations");
  }
  // The zero pattern is invariant under A, so iterating again from the
  // cleared vector restores the residual bound without refilling it.
  if (options.teleport == 0.0 && clear_inaccessible(a, st.lambda, st.x)) {
    const std::size_t before = st.iterations;
    auto again = power_iterate(a, options, &st.x);
    if (!again.converged) {
      throw Error(ErrorCode::NonConvergence, "power iteration did not converge in " +
                                                 std::to_string(options.max_iter) + " iterations");
    }
    again.iterations += before;
    st = std::move(again);
  }
  return {st.lambda, std::move(st.x), st.upper, st.iterations};
}

double spectral_radius(const CsrMatrix& a, const EigenOptions& options) {
  require_square_nonnegative(a, "spectral_radius");
  if (a.rows() == 0 || a.nnz() == 0) return 0.0;
  if (options.teleport == 0.0 && is_acyclic(a)) return 0.0;
  return dominant_eigenpair(a, options).lambda;
}

std::vector<double> katz_scores(const CsrMatrix& a, double attenuation, double tol) {
  require_square_nonnegative(a, "katz");
  if (!std::isfinite(attenuation) || attenuation < 0.0) {
    throw Error(ErrorCode::InvalidArgument, "attenuation must be finite and >= 0");
  }
  const std::size_t n = a.rows();
  if (attenuation == 0.0 || a.nnz() == 0) return std::vector<double>(n, 1.0);
  auto solve = [&] {
    return n <= kDenseSolveLimit ? dense_katz_solve(a, attenuation)
                                 : neumann_katz_solve(a, attenuation, tol);
  };
  if (is_acyclic(a)) return solve();

  EigenOptions opt;
  opt.tol = 1e-13;
  const auto st = power_iterate(a, opt);
  if (attenuation * st.upper < 1.0 - kKatzMargin) return solve();
  if (!st.converged) {
    // The bound may be loose; a positive solution certifies a * lambda_1 < 1.
    try {
      auto v = solve();
      if (std::all_of(v.begin(), v.end(), [](double x) { return x >= 1.0; })) return v;
    } catch (const Error&) {
    }
  }
  throw Error(ErrorCode::DivergentAttenuation,
              "attenuation " + format_double(attenuation) + " times lambda_1 " +
                  format_double(st.upper) + " is not below 1");
}

std::vector<double> pagerank_scores(const CsrMatrix& a, double damping, double tol,
                                    std::size_t max_iter) {
  require_square_nonnegative(a, "pagerank");
  if (!(damping >= 0.0 && damping < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "damping must lie in [0, 1)");
  }
  const std::size_t n = a.rows();
  if (n == 0) return {};
  const double inv_n = 1.0 / static_cast<double>(n);
  const auto out = a.row_sums();
  std::vector<double> x(n, inv_n), next(n);
  const auto rp = a.row_ptr();
  const auto ci = a.col_idx();
  const auto val = a.values();
  for (std::size_t it = 0; it < max_iter; ++it) {
    double dangling = 0.0;
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      if (out[i] > 0.0) {
        const double share = x[i] / out[i];
        for (std::size_t p = rp[i]; p < rp[i + 1]; ++p) next[ci[p]] += share * val[p];
      } else {
        dangling += x[i];
      }
    }
    const double base = (1.0 - damping) * inv_n + damping * dangling * inv_n;
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      next[i] = damping * next[i] + base;
      change += std::abs(next[i] - x[i]);
    }
    x.swap(next);
    if (change <= tol * (1.0 - damping)) {
      const double s = std::accumulate(x.begin(), x.end(), 0.0);
      for (auto& v : x) v /= s;
      return x;
    }
  }
  throw Error(ErrorCode::NonConvergence, "pagerank did not converge in " +
                                             std::to_string(max_iter) + " iterations");
}

CsrMatrix scope_matrix(const MultilayerNetwork& net, const Scope& scope) {
  switch (scope.kind) {
    case Scope::Kind::Layer:
      if (scope.layer >= net.layer_count()) {
        throw Error(ErrorCode::UnknownLayer, "layer index out of range");
      }
      return net.layer(scope.layer).weights;
    case Scope::Kind::Projected: return project_monoplex(net).weights;
    case Scope::Kind::Multilayer: return supra_flatten(net).matrix;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown scope");
}

CsrMatrix oriented(const CsrMatrix& a, Orientation orientation) {
  switch (orientation) {
    case Orientation::Out: return a;
    case Orientation::In: return a.transpose();
    case Orientation::Total: return a.plus(a.transpose());
  }
  return a;
}

// ---------------------------------------------------------------------------
// Network-level measures

CentralityResult degree_strength(const MultilayerNetwork& net, const Scope& scope,
                                 Orientation orientation, bool weighted) {
  auto r = make_result(net, weighted ? "strength" : "degree", scope, orientation);
  const auto a = scope_matrix(net, scope);
  std::vector<double> out = weighted ? a.row_sums() : a.row_counts();
  std::vector<double> in = weighted ? a.col_sums() : a.col_counts();
  std::vector<double> raw;
  switch (orientation) {
    case Orientation::Out: raw = std::move(out); break;
    case Orientation::In: raw = std::move(in); break;
    case Orientation::Total:
      raw = out;
      for (std::size_t i = 0; i < raw.size(); ++i) raw[i] += in[i];
      break;
  }
  r.scores = bank_scores(net, scope, std::move(raw));
  return r;
}

CentralityResult eigencentrality(const MultilayerNetwork& net, const Scope& scope,
                                 Orientation orientation, const EigenOptions& options) {
  auto r = make_result(net, "eigencentrality", scope, orientation);
  const auto a = oriented(scope_matrix(net, scope), orientation);
  const auto pair = dominant_eigenpair(a, options);
  r.metadata["lambda_1"] = format_double(pair.lambda);
  r.metadata["iterations"] = std::to_string(pair.iterations);
  r.metadata["teleport"] = format_double(options.teleport);
  if (scope.kind == Scope::Kind::Multilayer) {
    auto c = collapse_replicas(pair.vector, net.node_count(), net.layer_count());
    r.scores = std::move(c.per_bank);
    r.layer_scores = std::move(c.replica);
    for (const auto& m : net.layers()) r.layer_names.push_back(m.layer.name);
    r.metadata["collapse"] = "row_sum";
    r.normalization = Normalization::None;
  } else {
    r.scores = pair.vector;
    r.normalization = Normalization::Max;
  }
  return r;
}

CentralityResult katz_centrality(const MultilayerNetwork& net, const Scope& scope,
                                 Orientation orientation, double attenuation, double tol) {
  auto r = make_result(net, "katz", scope, orientation);
  const auto a = oriented(scope_matrix(net, scope), orientation);
  r.scores = bank_scores(net, scope, katz_scores(a, attenuation, tol));
  r.metadata["attenuation"] = format_double(attenuation);
  return r;
}

CentralityResult pagerank(const MultilayerNetwork& net, const Scope& scope,
                          Orientation orientation, double damping, double tol) {
  auto r = make_result(net, "pagerank", scope, orientation);
  const auto a = oriented(scope_matrix(net, scope), orientation);
  r.scores = bank_scores(net, scope, pagerank_scores(a, damping, tol));
  r.normalization = Normalization::L1;
  r.metadata["damping"] = format_double(damping);
  return r;
}

CentralityResult path_centrality(const MultilayerNetwork& net, const Scope& scope,
                                 Orientation orientation, Measure kind) {
  if (kind != Measure::Betweenness && kind != Measure::Closeness) {
    throw Error(ErrorCode::InvalidArgument, "path centrality is betweenness or closeness");
  }
  auto r = make_result(net, std::string(measure_name(kind)), scope, orientation);
  const auto a = oriented(scope_matrix(net, scope), orientation);
  auto raw = kind == Measure::Betweenness ? betweenness_scores(a) : closeness_scores(a);
  r.scores = bank_scores(net, scope, std::move(raw));
  r.metadata["edge_length"] = "1/w";
  return r;
}

CentralityResult compute_measure(const MultilayerNetwork& net, const MeasureSpec& spec) {
  switch (spec.measure) {
    case Measure::Degree: return degree_strength(net, spec.scope, spec.orientation, false);
    case Measure::Strength: return degree_strength(net, spec.scope, spec.orientation, true);
    case Measure::Eigencentrality:
      return eigencentrality(net, spec.scope, spec.orientation, spec.eigen);
    case Measure::Katz:
      return katz_centrality(net, spec.scope, spec.orientation, spec.katz_attenuation,
                             spec.eigen.tol);
    case Measure::PageRank:
      return pagerank(net, spec.scope, spec.orientation, spec.damping, spec.eigen.tol);
    case Measure::Betweenness:
    case Measure::Closeness: return path_centrality(net, spec.scope, spec.orientation, spec.measure);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown measure");
}

// ---------------------------------------------------------------------------
// Ranking and composite

std::vector<std::size_t> rank_order(std::span<const double> scores) {
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return idx;
}

std::vector<double> average_ranks(std::span<const double> scores) {
  const auto order = rank_order(scores);
  std::vector<double> ranks(scores.size(), 0.0);
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double mean = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = mean;
    i = j + 1;
  }
  return ranks;
}

CentralityResult composite_centrality(std::span<const CentralityResult> results) {
  if (results.empty()) {
    throw Error(ErrorCode::InvalidArgument, "composite needs at least one measure");
  }
  const auto& banks = results.front().banks;
  const std::size_t n = banks.size();
  std::vector<double> mean_rank(n, 0.0);
  std::string inputs;
  for (const auto& r : results) {
    if (r.banks != banks || r.scores.size() != n) {
      throw Error(ErrorCode::MismatchedBanks, "composite inputs cover different banks");
    }
    const auto ranks = average_ranks(r.scores);
    for (std::size_t i = 0; i < n; ++i) mean_rank[i] += ranks[i];
    if (!inputs.empty()) inputs += ",";
    inputs += r.measure;
  }
  CentralityResult out;
  out.measure = "composite";
  out.scope = results.front().scope;
  out.orientation = results.front().orientation;
  out.banks = banks;
  out.scores.resize(n);
  const double m = static_cast<double>(results.size());
  for (std::size_t i = 0; i < n; ++i) {
    const double r = mean_rank[i] / m;
    out.scores[i] = n > 1 ? (static_cast<double>(n) - r) / static_cast<double>(n - 1) : 1.0;
  }
  out.metadata["aggregation"] = "borda_mean_rank";
  out.metadata["inputs"] = inputs;
  return out;
}

}  // namespace mlnet
