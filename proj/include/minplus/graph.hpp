#pragma once

/**
 * @file graph.hpp
 * Edge-weighted directed or undirected graph.
 */

#include <cstdint>
#include <stdexcept>
#include <unordered_map>
#include <utility>
#include <vector>

#include "minplus/matrix.hpp"
#include "minplus/numeric.hpp"

namespace minplus {

struct Edge {
  std::size_t u = 0;
  std::size_t v = 0;
  ExpFloat w;
};

// Self-loops are dropped and parallel edges keep the smaller weight.  For
// undirected graphs every edge is stored once with u < v.
class Graph {
 public:
  Graph() = default;
  Graph(std::size_t n, bool directed) : n_(n), directed_(directed) {}

  std::size_t n() const { return n_; }
  bool directed() const { return directed_; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::size_t edge_count() const { return edges_.size(); }

  // Returns false when the edge was a self-loop and got dropped.
  bool add_edge(std::size_t u, std::size_t v, ExpFloat w) {
    if (u >= n_ || v >= n_) throw std::out_of_range("Graph::add_edge: vertex out of range");
    if (!w.is_positive_finite()) throw std::invalid_argument("Graph::add_edge: weight must be finite and positive");
    if (u == v) return false;
    if (!directed_ && u > v) std::swap(u, v);
    const std::uint64_t key = static_cast<std::uint64_t>(u) * n_ + v;
    auto it = index_.find(key);
    if (it == index_.end()) {
      index_.emplace(key, edges_.size());
      edges_.push_back({u, v, w});
    } else if (ExpFloat::raw_compare(w, edges_[it->second].w) < 0) {
      edges_[it->second].w = w;
    }
    return true;
  }

  // Out-neighbours (both directions for undirected graphs).
  std::vector<std::vector<std::pair<std::size_t, ExpFloat>>> adjacency_list() const {
    std::vector<std::vector<std::pair<std::size_t, ExpFloat>>> adj(n_);
    for (const Edge& e : edges_) {
      adj[e.u].emplace_back(e.v, e.w);
      if (!directed_) adj[e.v].emplace_back(e.u, e.w);
    }
    return adj;
  }

  // Weights off the diagonal, +inf for non-edges, zero on the diagonal.
  WeightMatrix adjacency_matrix() const {
    WeightMatrix m(n_, n_, ExpFloat::infinity());
    for (std::size_t i = 0; i < n_; ++i) m(i, i) = ExpFloat::zero();
    for (const Edge& e : edges_) {
      m(e.u, e.v) = e.w;
      if (!directed_) m(e.v, e.u) = e.w;
    }
    return m;
  }

 private:
  std::size_t n_ = 0;
  bool directed_ = false;
  std::vector<Edge> edges_;
  std::unordered_map<std::uint64_t, std::size_t> index_;
};

}  // namespace minplus
