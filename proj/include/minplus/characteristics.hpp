#pragma once

/**
 * @file characteristics.hpp
 * Diameter, radius, median, minimum-weight triangle and minimum-weight cycle,
 * each approximated through a weight-range reduction: find the critical edge
 * weight w*, drop edges above w* n^2, round the rest up to multiples of
 * w* eps / n^2, and run a scaling-based scheme on the polynomially bounded
 * result.
 */

#include <algorithm>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

#include "minplus/apsp.hpp"
#include "minplus/graph.hpp"
#include "minplus/numeric.hpp"
#include "minplus/product.hpp"

namespace minplus {

enum class CharacteristicKind { diameter, radius, median, min_triangle, min_cycle };

inline const char* to_string(CharacteristicKind k) {
  switch (k) {
    case CharacteristicKind::diameter: return "diameter";
    case CharacteristicKind::radius: return "radius";
    case CharacteristicKind::median: return "median";
    case CharacteristicKind::min_triangle: return "min_triangle";
    case CharacteristicKind::min_cycle: return "min_cycle";
  }
  return "unknown";
}

inline std::optional<CharacteristicKind> characteristic_from_string(const std::string& s) {
  for (auto k : {CharacteristicKind::diameter, CharacteristicKind::radius, CharacteristicKind::median,
                 CharacteristicKind::min_triangle, CharacteristicKind::min_cycle}) {
    if (s == to_string(k)) return k;
  }
  return std::nullopt;
}

namespace detail {

using Adjacency = std::vector<std::vector<std::size_t>>;

inline Adjacency light_adjacency(const Graph& g, ExpFloat limit, bool reverse = false) {
  Adjacency adj(g.n());
  for (const Edge& e : g.edges()) {
    if (limit < e.w) continue;
    if (!g.directed()) {
      adj[e.u].push_back(e.v);
      adj[e.v].push_back(e.u);
    } else if (reverse) {
      adj[e.v].push_back(e.u);
    } else {
      adj[e.u].push_back(e.v);
    }
  }
  return adj;
}

inline std::size_t reach_count(const Adjacency& adj, std::size_t s) {
  std::vector<char> seen(adj.size(), 0);
  std::vector<std::size_t> stack{s};
  seen[s] = 1;
  std::size_t count = 1;
  while (!stack.empty()) {
    const std::size_t u = stack.back();
    stack.pop_back();
    for (std::size_t v : adj[u]) {
      if (!seen[v]) {
        seen[v] = 1;
        ++count;
        stack.push_back(v);
      }
    }
  }
  return count;
}

// If any vertex reaches every other one, the vertex finishing last in a full
// depth-first search does.
inline bool some_vertex_reaches_all(const Adjacency& adj) {
  const std::size_t n = adj.size();
  std::vector<char> seen(n, 0);
  std::size_t last = 0;
  for (std::size_t s = 0; s < n; ++s) {
    if (seen[s]) continue;
    std::vector<std::pair<std::size_t, std::size_t>> stack{{s, 0}};
    seen[s] = 1;
    while (!stack.empty()) {
      auto& [u, pos] = stack.back();
      if (pos < adj[u].size()) {
        const std::size_t v = adj[u][pos++];
        if (!seen[v]) {
          seen[v] = 1;
          stack.emplace_back(v, 0);
        }
      } else {
        last = u;
        stack.pop_back();
      }
    }
  }
  return reach_count(adj, last) == n;
}

inline bool all_pairs_reachable(const Graph& g, ExpFloat limit) {
  if (g.n() <= 1) return true;
  if (reach_count(light_adjacency(g, limit), 0) != g.n()) return false;
  return !g.directed() || reach_count(light_adjacency(g, limit, true), 0) == g.n();
}

inline bool has_triangle(const Graph& g, ExpFloat limit) {
  const std::size_t n = g.n();
  std::vector<char> m(n * n, 0);
  for (const Edge& e : g.edges()) {
    if (limit < e.w) continue;
    m[e.u * n + e.v] = 1;
    if (!g.directed()) m[e.v * n + e.u] = 1;
  }
  for (const Edge& e : g.edges()) {
    if (limit < e.w) continue;
    // u -> v -> j -> u closes a triangle (both orientations for undirected).
    for (std::size_t j = 0; j < n; ++j) {
      if (j != e.u && j != e.v && m[e.v * n + j] && m[j * n + e.u]) return true;
    }
  }
  return false;
}

inline bool has_cycle(const Graph& g, ExpFloat limit) {
  const std::size_t n = g.n();
  if (!g.directed()) {
    ContractionMap cm(n);
    for (const Edge& e : g.edges()) {
      if (!(limit < e.w) && !cm.unite(e.u, e.v)) return true;
    }
    return false;
  }
  const Adjacency adj = light_adjacency(g, limit);
  std::vector<std::size_t> indeg(n, 0);
  for (const auto& out : adj) {
    for (std::size_t v : out) ++indeg[v];
  }
  std::vector<std::size_t> queue;
  for (std::size_t v = 0; v < n; ++v) {
    if (indeg[v] == 0) queue.push_back(v);
  }
  for (std::size_t pos = 0; pos < queue.size(); ++pos) {
    for (std::size_t v : adj[queue[pos]]) {
      if (--indeg[v] == 0) queue.push_back(v);
    }
  }
  return queue.size() != n;
}

}  // namespace detail

// Whether the characteristic is finite on the subgraph of edges with weight <= limit.
inline bool characteristic_finite(const Graph& g, CharacteristicKind kind, ExpFloat limit) {
  switch (kind) {
    case CharacteristicKind::diameter: return detail::all_pairs_reachable(g, limit);
    case CharacteristicKind::radius:
    case CharacteristicKind::median: return detail::some_vertex_reaches_all(detail::light_adjacency(g, limit));
    case CharacteristicKind::min_triangle: return detail::has_triangle(g, limit);
    case CharacteristicKind::min_cycle: return detail::has_cycle(g, limit);
  }
  return false;
}

// Smallest edge weight w such that the characteristic is finite on G_w, or
// nullopt if it is infinite on G itself.
inline std::optional<ExpFloat> threshold_search(const Graph& g, CharacteristicKind kind) {
  if (g.edge_count() == 0) throw std::invalid_argument("threshold_search: graph has no edges");
  std::vector<ExpFloat> ws;
  for (const Edge& e : g.edges()) ws.push_back(e.w);
  std::sort(ws.begin(), ws.end(), [](ExpFloat a, ExpFloat b) { return ExpFloat::raw_compare(a, b) < 0; });
  ws.erase(std::unique(ws.begin(), ws.end()), ws.end());
  if (!characteristic_finite(g, kind, ws.back())) return std::nullopt;
  std::size_t lo = 0, hi = ws.size() - 1;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (characteristic_finite(g, kind, ws[mid])) hi = mid;
    else lo = mid + 1;
  }
  return ws[lo];
}

struct RangeReduction {
  ExpFloat w_star;
  ExpFloat granularity;  // w_star eps / n^2
  Graph rounded_graph;   // weights are multiples of granularity
  Graph unit_graph;      // the same graph with weights divided by granularity
};

// Drops edges heavier than w* n^2 and rounds the rest up to multiples of
// w* eps / n^2.  The kept weight ratio is at most n^4 / eps.
inline RangeReduction round_weights(const Graph& g, ExpFloat w_star, double eps) {
  validate_eps(eps, "round_weights");
  if (!w_star.is_positive_finite()) throw std::invalid_argument("round_weights: w_star must be finite and positive");
  const std::size_t n = std::max<std::size_t>(g.n(), 1);
  const ExpFloat n2 = ExpFloat::from_uint(static_cast<std::uint64_t>(n) * n);
  RangeReduction r;
  r.w_star = w_star;
  r.granularity = ef_div(ef_mul(w_star, ExpFloat::from_double(eps)), n2);
  r.rounded_graph = Graph(g.n(), g.directed());
  r.unit_graph = Graph(g.n(), g.directed());
  const ExpFloat cutoff = ef_mul(w_star, n2);
  for (const Edge& e : g.edges()) {
    if (cutoff < e.w) continue;
    auto k = ceil_to_uint(ef_div(e.w, r.granularity));
    if (ef_mul(ExpFloat::from_uint(k), r.granularity) < e.w) ++k;
    r.rounded_graph.add_edge(e.u, e.v, ef_mul(ExpFloat::from_uint(k), r.granularity));
    r.unit_graph.add_edge(e.u, e.v, ExpFloat::from_uint(k));
  }
  return r;
}

namespace detail {

inline ExpFloat undirected_min_cycle(const Graph& g) {
  const auto adj = g.adjacency_list();
  ExpFloat best = ExpFloat::infinity();
  using Item = std::pair<ExpFloat, std::size_t>;
  const auto later = [](const Item& a, const Item& b) { return b.first < a.first; };
  std::vector<ExpFloat> dist(g.n());
  for (const Edge& e : g.edges()) {
    // Shortest u-v path avoiding the edge itself, pruned at the best cycle so far.
    std::fill(dist.begin(), dist.end(), ExpFloat::infinity());
    dist[e.u] = ExpFloat::zero();
    std::priority_queue<Item, std::vector<Item>, decltype(later)> pq(later);
    pq.emplace(ExpFloat::zero(), e.u);
    while (!pq.empty()) {
      const auto [du, u] = pq.top();
      pq.pop();
      if (dist[u] < du) continue;
      if (u == e.v) break;
      for (const auto& [v, w] : adj[u]) {
        if ((u == e.u && v == e.v) || (u == e.v && v == e.u)) continue;
        const ExpFloat nd = ef_add(du, w);
        if (nd < dist[v]) {
          dist[v] = nd;
          pq.emplace(nd, v);
        }
      }
    }
    const ExpFloat c = ef_add(dist[e.v], e.w);
    if (c < best) best = c;
  }
  return best;
}

}  // namespace detail

// Exact value from Dijkstra distances; +inf when the characteristic is infinite.
inline ExpFloat exact_characteristic(const Graph& g, CharacteristicKind kind) {
  const std::size_t n = g.n();
  ExpFloat best = ExpFloat::infinity();
  switch (kind) {
    case CharacteristicKind::diameter:
    case CharacteristicKind::radius:
    case CharacteristicKind::median: {
      if (n == 0) return best;
      const DistanceMatrix d = exact_apsp(g);
      for (std::size_t v = 0; v < n; ++v) {
        ExpFloat agg = ExpFloat::zero();
        for (std::size_t u = 0; u < n; ++u) {
          agg = kind == CharacteristicKind::median ? ef_add(agg, d(v, u)) : ef_max(agg, d(v, u));
        }
        if (kind == CharacteristicKind::diameter) best = v == 0 ? agg : ef_max(best, agg);
        else best = ef_min(best, agg);
      }
      return best;
    }
    case CharacteristicKind::min_triangle: {
      const WeightMatrix a = g.adjacency_matrix();
      for (const Edge& e : g.edges()) {
        for (std::size_t k = 0; k < n; ++k) {
          if (k == e.u || k == e.v) continue;
          best = ef_min(best, ef_add(e.w, ef_add(a(e.v, k), a(k, e.u))));
          if (!g.directed()) best = ef_min(best, ef_add(e.w, ef_add(a(e.u, k), a(k, e.v))));
        }
      }
      return best;
    }
    case CharacteristicKind::min_cycle: {
      if (!g.directed()) return detail::undirected_min_cycle(g);
      const DistanceMatrix d = exact_apsp(g);
      for (const Edge& e : g.edges()) best = ef_min(best, ef_add(e.w, d(e.v, e.u)));
      return best;
    }
  }
  return best;
}

// T <= T~ <= (1+eps) T, or +inf when the characteristic is infinite.  The
// rounding and the inner scheme each get eps/3.
inline ExpFloat approx_characteristic(const Graph& g, CharacteristicKind kind, double eps) {
  validate_eps(eps, "approx_characteristic");
  const auto w_star = threshold_search(g, kind);
  if (!w_star) return ExpFloat::infinity();
  const double part = eps / 3;
  const RangeReduction red = round_weights(g, *w_star, part);
  const Graph& h = red.unit_graph;
  const std::size_t n = h.n();
  ExpFloat units = ExpFloat::infinity();

  switch (kind) {
    case CharacteristicKind::diameter:
    case CharacteristicKind::radius:
    case CharacteristicKind::median: {
      const DistanceMatrix d = zwick_apsp(h.adjacency_matrix(), part);
      for (std::size_t v = 0; v < n; ++v) {
        ExpFloat agg = ExpFloat::zero();
        for (std::size_t u = 0; u < n; ++u) {
          if (kind == CharacteristicKind::median) agg = ef_add(agg, d(v, u));
          else agg = ef_max(agg, d(v, u));
        }
        if (kind == CharacteristicKind::diameter) units = v == 0 ? agg : ef_max(units, agg);
        else units = ef_min(units, agg);
      }
      break;
    }
    case CharacteristicKind::min_triangle: {
      WeightMatrix a = h.adjacency_matrix();
      for (std::size_t i = 0; i < n; ++i) a(i, i) = ExpFloat::infinity();
      const WeightMatrix c = approx_minplus_product(a, a, part);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          if (i != j) units = ef_min(units, ef_add(c(i, j), a(j, i)));
        }
      }
      break;
    }
    case CharacteristicKind::min_cycle: {
      if (!h.directed()) {
        units = detail::undirected_min_cycle(h);
        break;
      }
      const DistanceMatrix d = zwick_apsp(h.adjacency_matrix(), part);
      for (const Edge& e : h.edges()) units = ef_min(units, ef_add(e.w, d(e.v, e.u)));
      break;
    }
  }
  return units.is_infinite() ? units : ef_mul(units, red.granularity);
}

}  // namespace minplus
