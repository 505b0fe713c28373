#pragma once

/**
 * @file apsp.hpp
 * Exact and approximate all-pairs shortest paths.
 *
 * The directed variant squares the adjacency matrix with the covering-based
 * approximate product.  The undirected variant scales over powers of two,
 * contracting edges that round to zero, and solves each remaining component
 * with the scaling product.
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <vector>

#include "minplus/graph.hpp"
#include "minplus/matrix.hpp"
#include "minplus/numeric.hpp"
#include "minplus/product.hpp"

namespace minplus {

using DistanceMatrix = WeightMatrix;

// Dijkstra from every source.
inline DistanceMatrix exact_apsp(const Graph& g) {
  const std::size_t n = g.n();
  const auto adj = g.adjacency_list();
  DistanceMatrix d(n, n, ExpFloat::infinity());
  using Item = std::pair<ExpFloat, std::size_t>;
  const auto later = [](const Item& a, const Item& b) { return b.first < a.first; };
  for (std::size_t s = 0; s < n; ++s) {
    ExpFloat* dist = d.row(s);
    dist[s] = ExpFloat::zero();
    std::priority_queue<Item, std::vector<Item>, decltype(later)> pq(later);
    pq.emplace(ExpFloat::zero(), s);
    while (!pq.empty()) {
      const auto [du, u] = pq.top();
      pq.pop();
      if (dist[u] < du) continue;
      for (const auto& [v, w] : adj[u]) {
        const ExpFloat nd = ef_add(du, w);
        if (nd < dist[v]) {
          dist[v] = nd;
          pq.emplace(nd, v);
        }
      }
    }
  }
  return d;
}

// Number of squaring rounds that covers every simple path: ceil(log2 n).
inline int squaring_rounds(std::size_t n) { return n <= 1 ? 0 : log2_ceil(n); }

// Per-round accuracy so that (1 + eps')^rounds <= 1 + eps.
inline double per_round_eps(double eps, int rounds) { return rounds == 0 ? eps : std::log1p(eps) / rounds; }

// d <= D~ <= (1+eps) d.  Each round computes min(D, D_off * D_off) where D_off
// has +inf on the diagonal; the minimum with D stands in for the zero
// diagonal, which the covering cannot represent.
inline DistanceMatrix approx_apsp_directed(const Graph& g, double eps, const ProductOptions& opts = {}) {
  validate_eps(eps, "approx_apsp_directed");
  const std::size_t n = g.n();
  DistanceMatrix d = g.adjacency_matrix();
  const int rounds = squaring_rounds(n);
  const double step = per_round_eps(eps, rounds);
  for (int r = 0; r < rounds; ++r) {
    DistanceMatrix off = d;
    for (std::size_t i = 0; i < n; ++i) off(i, i) = ExpFloat::infinity();
    const DistanceMatrix sq = approx_minplus_product(off, off, step, opts);
    for (std::size_t idx = 0; idx < d.size(); ++idx) {
      if (sq.data()[idx] < d.data()[idx]) d.data()[idx] = sq.data()[idx];
    }
    for (std::size_t i = 0; i < n; ++i) d(i, i) = ExpFloat::zero();
  }
  return d;
}

// Repeated squaring with the scaling product.  Finite off-diagonal entries of
// `adj` must be at least 1 (the scaling product's error is additive below 1);
// the diagonal must be zero.  d <= D~ <= (1+eps) d.
inline DistanceMatrix zwick_apsp(const WeightMatrix& adj, double eps,
                                 BoundedBackend backend = BoundedBackend::naive) {
  validate_eps(eps, "zwick_apsp");
  if (!adj.is_square()) throw std::invalid_argument("zwick_apsp: matrix must be square");
  const int rounds = squaring_rounds(adj.rows());
  const double step = per_round_eps(eps, rounds) / 4;
  DistanceMatrix d = adj;
  for (int r = 0; r < rounds; ++r) {
    const DistanceMatrix sq = zwick_minplus_product(d, d, step, backend);
    for (std::size_t idx = 0; idx < d.size(); ++idx) {
      if (sq.data()[idx] < d.data()[idx]) d.data()[idx] = sq.data()[idx];
    }
  }
  return d;
}

// Union-find over the original vertices with explicit member lists.
class ContractionMap {
 public:
  explicit ContractionMap(std::size_t n) : parent_(n), members_(n) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
    for (std::size_t v = 0; v < n; ++v) members_[v] = {v};
  }

  std::size_t size() const { return parent_.size(); }

  std::size_t find(std::size_t v) {
    while (parent_[v] != v) {
      parent_[v] = parent_[parent_[v]];
      v = parent_[v];
    }
    return v;
  }

  // Merges the smaller member list into the larger; false if already joined.
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (members_[a].size() < members_[b].size()) std::swap(a, b);
    parent_[b] = a;
    members_[a].insert(members_[a].end(), members_[b].begin(), members_[b].end());
    members_[b].clear();
    members_[b].shrink_to_fit();
    return true;
  }

  const std::vector<std::size_t>& members(std::size_t rep) const { return members_[rep]; }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::vector<std::size_t>> members_;
};

// Working graph of one scaling iteration.  Vertices are contraction
// representatives; weights are integers in units of q eps / n.
struct ScaledGraph {
  std::vector<std::size_t> reps;  // vertex -> representative in the original graph
  Graph graph;
  ExpFloat unit;
};

// Rounds `edges` (all lighter than 2q) down to multiples of unit = 2^e eps / n,
// contracts those that round to zero and returns the remaining graph.
// Edges that end up inside one representative are removed from `edges`.
inline ScaledGraph round_and_contract(std::vector<Edge>& edges, std::int64_t e, double eps, std::size_t n,
                                      ContractionMap& cm) {
  ScaledGraph h;
  h.unit = ef_div(ef_mul(ExpFloat::pow2(e), ExpFloat::from_double(eps)), ExpFloat::from_uint(n));
  std::vector<std::uint64_t> units(edges.size());
  for (std::size_t idx = 0; idx < edges.size(); ++idx) {
    units[idx] = floor_to_uint(ef_div(edges[idx].w, h.unit));
    if (units[idx] == 0) cm.unite(edges[idx].u, edges[idx].v);
  }
  std::vector<std::size_t> local(n, n);
  std::size_t kept = 0;
  std::vector<std::pair<std::size_t, std::size_t>> ends;
  std::vector<std::uint64_t> kept_units;
  for (std::size_t idx = 0; idx < edges.size(); ++idx) {
    const std::size_t a = cm.find(edges[idx].u), b = cm.find(edges[idx].v);
    if (a == b) continue;
    for (std::size_t r : {a, b}) {
      if (local[r] == n) {
        local[r] = h.reps.size();
        h.reps.push_back(r);
      }
    }
    ends.emplace_back(local[a], local[b]);
    kept_units.push_back(units[idx]);
    edges[kept++] = edges[idx];
  }
  edges.resize(kept);
  h.graph = Graph(h.reps.size(), false);
  for (std::size_t idx = 0; idx < ends.size(); ++idx) {
    h.graph.add_edge(ends[idx].first, ends[idx].second, ExpFloat::from_uint(kept_units[idx]));
  }
  return h;
}

struct UndirectedApspStats {
  std::size_t iterations = 0;       // scaling iterations that ran the inner APSP
  std::size_t skipped = 0;          // void iterations jumped over
  std::size_t largest_component = 0;
};

// d <= D' <= (1+eps) d for undirected graphs.  The inner accuracy is eps/4,
// which covers the inner APSP error, the rounding loss and the final
// division by (1 - eps/4).
inline DistanceMatrix approx_apsp_undirected(const Graph& g, double eps, UndirectedApspStats* stats = nullptr,
                                             BoundedBackend backend = BoundedBackend::naive) {
  validate_eps(eps, "approx_apsp_undirected");
  if (g.directed()) throw std::invalid_argument("approx_apsp_undirected: graph must be undirected");
  const std::size_t n = g.n();
  const double eps_int = eps / 4;
  DistanceMatrix d(n, n, ExpFloat::infinity());
  for (std::size_t i = 0; i < n; ++i) d(i, i) = ExpFloat::zero();
  UndirectedApspStats local_stats;
  UndirectedApspStats& st = stats ? *stats : local_stats;
  st = {};
  if (g.edge_count() == 0) return d;

  std::vector<Edge> pending = g.edges();
  std::sort(pending.begin(), pending.end(),
            [](const Edge& a, const Edge& b) { return ExpFloat::raw_compare(a.w, b.w) < 0; });
  // Every distance is at most (n-1) W, so no window lies above this exponent.
  const std::int64_t e_last = ceil_log2(ef_mul(pending.back().w, ExpFloat::from_uint(n)));

  ContractionMap cm(n);
  std::vector<Edge> active;
  std::size_t next = 0;
  const ExpFloat lo_factor = ExpFloat::from_double(1 - eps_int);
  const ExpFloat hi_factor = ExpFloat::from_double(2 * (1 + eps_int));
  std::int64_t e = floor_log2(pending.front().w);
  while (e <= e_last) {
    const ExpFloat two_q = ExpFloat::pow2(e + 1);
    while (next < pending.size() && pending[next].w < two_q) active.push_back(pending[next++]);
    ScaledGraph h = round_and_contract(active, e, eps_int, n, cm);
    if (h.graph.edge_count() == 0) {
      if (next == pending.size()) break;
      const std::int64_t jump = floor_log2(pending[next].w);
      if (jump > e + 1) st.skipped += static_cast<std::size_t>(jump - e - 1);
      e = std::max(e + 1, jump);
      continue;
    }
    ++st.iterations;

    // Connected components of the working graph.
    const std::size_t hn = h.graph.n();
    ContractionMap comp(hn);
    for (const Edge& ed : h.graph.edges()) comp.unite(ed.u, ed.v);
    const WeightMatrix hadj = h.graph.adjacency_matrix();
    const ExpFloat lo = ef_mul(lo_factor, ExpFloat::pow2(e));
    const ExpFloat hi = ef_mul(hi_factor, ExpFloat::pow2(e));
    for (std::size_t root = 0; root < hn; ++root) {
      if (comp.find(root) != root || comp.members(root).size() < 2) continue;
      const std::vector<std::size_t>& verts = comp.members(root);
      const std::size_t c = verts.size();
      st.largest_component = std::max(st.largest_component, c);
      WeightMatrix sub(c, c);
      for (std::size_t a = 0; a < c; ++a) {
        for (std::size_t b = 0; b < c; ++b) sub(a, b) = hadj(verts[a], verts[b]);
      }
      const DistanceMatrix dh = zwick_apsp(sub, eps_int, backend);
      for (std::size_t a = 0; a < c; ++a) {
        for (std::size_t b = a + 1; b < c; ++b) {
          if (dh(a, b).is_infinite()) continue;
          const ExpFloat val = ef_mul(dh(a, b), h.unit);
          if (val < lo || !(val < hi)) continue;
          for (std::size_t i : cm.members(h.reps[verts[a]])) {
            for (std::size_t j : cm.members(h.reps[verts[b]])) {
              if (val < d(i, j)) {
                d(i, j) = val;
                d(j, i) = val;
              }
            }
          }
        }
      }
    }
    ++e;
  }

  const ExpFloat divisor = ExpFloat::from_double(1 - eps_int);
  for (ExpFloat& x : d.data()) {
    if (x.is_positive_finite()) x = ef_div(x, divisor);
  }
  return d;
}

}  // namespace minplus
