// Shortest-path measures on weighted digraphs. Edge length is 1 / w, so a
// larger exposure puts two banks closer together.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <vector>

#include "mlnet/centrality.hpp"
#include "mlnet/error.hpp"

namespace mlnet {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Relative tolerance under which two path lengths count as equal.
constexpr double kTieTol = 1e-12;

bool same_length(double a, double b) {
  return std::abs(a - b) <= kTieTol * std::max(std::abs(a), std::abs(b));
}

struct SingleSource {
  std::vector<double> dist;
  std::vector<double> sigma;
  std::vector<std::vector<std::size_t>> preds;
  std::vector<std::size_t> settled;  // non-decreasing distance
};

void validate(const CsrMatrix& a) {
  if (!a.is_square()) throw Error(ErrorCode::InvalidArgument, "path measures need a square matrix");
  for (double v : a.values()) {
    if (!std::isfinite(v) || v < 0.0) {
      throw Error(ErrorCode::InvalidArgument, "path measures need non-negative weights");
    }
  }
}

void dijkstra(const CsrMatrix& a, std::size_t s, SingleSource& st) {
  const std::size_t n = a.rows();
  st.dist.assign(n, kInf);
  st.sigma.assign(n, 0.0);
  st.preds.assign(n, {});
  st.settled.clear();
  std::vector<char> done(n, 0);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  st.dist[s] = 0.0;
  st.sigma[s] = 1.0;
  heap.emplace(0.0, s);
  const auto rp = a.row_ptr();
  const auto ci = a.col_idx();
  const auto val = a.values();
  while (!heap.empty()) {
    const auto [d, u] = heap.top();
    heap.pop();
    if (done[u] || d > st.dist[u]) continue;
    done[u] = 1;
    st.settled.push_back(u);
    for (std::size_t p = rp[u]; p < rp[u + 1]; ++p) {
      const std::size_t v = ci[p];
      if (v == u || done[v]) continue;
      const double alt = st.dist[u] + 1.0 / val[p];
      if (st.dist[v] == kInf || (alt < st.dist[v] && !same_length(alt, st.dist[v]))) {
        st.dist[v] = alt;
        st.sigma[v] = st.sigma[u];
        st.preds[v].assign(1, u);
        heap.emplace(alt, v);
      } else if (same_length(alt, st.dist[v])) {
        st.sigma[v] += st.sigma[u];
        st.preds[v].push_back(u);
      }
    }
  }
}

}  // namespace

std::vector<double> betweenness_scores(const CsrMatrix& a) {
  validate(a);
  const std::size_t n = a.rows();
  std::vector<double> bc(n, 0.0), delta(n);
  SingleSource st;
  for (std::size_t s = 0; s < n; ++s) {
    dijkstra(a, s, st);
    std::fill(delta.begin(), delta.end(), 0.0);
    for (auto it = st.settled.rbegin(); it != st.settled.rend(); ++it) {
      const std::size_t w = *it;
      for (std::size_t v : st.preds[w]) {
        delta[v] += st.sigma[v] / st.sigma[w] * (1.0 + delta[w]);
      }
      if (w != s) bc[w] += delta[w];
    }
  }
  return bc;
}

std::vector<double> closeness_scores(const CsrMatrix& a) {
  validate(a);
  const std::size_t n = a.rows();
  std::vector<double> out(n, 0.0);
  SingleSource st;
  for (std::size_t s = 0; s < n; ++s) {
    dijkstra(a, s, st);
    double total = 0.0;
    std::size_t reached = 0;
    for (std::size_t v : st.settled) {
      if (v == s) continue;
      total += st.dist[v];
      ++reached;
    }
    out[s] = reached > 0 ? static_cast<double>(reached) / total : 0.0;
  }
  return out;
}

}  // namespace mlnet
