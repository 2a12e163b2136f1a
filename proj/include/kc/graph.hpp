#pragma once

#include <algorithm>
#include <cstddef>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "kc/bitset.hpp"
#include "kc/errors.hpp"

namespace kc {

/// Simple undirected graph on vertices 1..n. Adjacency is kept both as
/// sorted neighbor lists (iteration) and bitset rows (O(1) membership and
/// set kernels). Immutable once built by convention: all algorithms take
/// `const Graph&`.
class Graph {
public:
  Graph() = default;
  explicit Graph(int n) : n_(n) {
    if (n < 0) throw parameter_error("vertex count must be non-negative");
    adj_.resize(static_cast<std::size_t>(n) + 1);
    rows_.resize(static_cast<std::size_t>(n) + 1, Bitset(static_cast<std::size_t>(n) + 1));
  }

  int num_vertices() const { return n_; }
  std::size_t num_edges() const { return m_; }

  bool valid_vertex(int v) const { return v >= 1 && v <= n_; }

  void check_vertex(int v) const {
    if (!valid_vertex(v))
      throw parameter_error("vertex " + std::to_string(v) + " out of range [1," +
                            std::to_string(n_) + "]");
  }

  bool has_edge(int u, int v) const {
    check_vertex(u);
    check_vertex(v);
    return rows_[static_cast<std::size_t>(u)].test(static_cast<std::size_t>(v));
  }

  void add_edge(int u, int v) {
    check_vertex(u);
    check_vertex(v);
    if (u == v) throw parameter_error("self-loop at vertex " + std::to_string(u));
    if (rows_[static_cast<std::size_t>(u)].test(static_cast<std::size_t>(v)))
      throw parameter_error("duplicate edge {" + std::to_string(u) + "," +
                            std::to_string(v) + "}");
    insert_sorted(adj_[static_cast<std::size_t>(u)], v);
    insert_sorted(adj_[static_cast<std::size_t>(v)], u);
    rows_[static_cast<std::size_t>(u)].set(static_cast<std::size_t>(v));
    rows_[static_cast<std::size_t>(v)].set(static_cast<std::size_t>(u));
    ++m_;
  }

  /// Sorted ascending.
  const std::vector<int>& neighbors(int v) const {
    check_vertex(v);
    return adj_[static_cast<std::size_t>(v)];
  }

  /// Bit i set iff {v,i} is an edge.
  const Bitset& row(int v) const {
    check_vertex(v);
    return rows_[static_cast<std::size_t>(v)];
  }

  int degree(int v) const {
    check_vertex(v);
    return static_cast<int>(adj_[static_cast<std::size_t>(v)].size());
  }

  int max_degree() const {
    int d = 0;
    for (int v = 1; v <= n_; ++v) d = std::max(d, degree(v));
    return d;
  }

  /// All edges as (u,v) with u < v, lexicographically sorted.
  std::vector<std::pair<int, int>> edges() const {
    std::vector<std::pair<int, int>> es;
    es.reserve(m_);
    for (int u = 1; u <= n_; ++u)
      for (int v : adj_[static_cast<std::size_t>(u)])
        if (u < v) es.emplace_back(u, v);
    return es;
  }

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.n_ == b.n_ && a.m_ == b.m_ && a.adj_ == b.adj_;
  }

private:
  static void insert_sorted(std::vector<int>& v, int x) {
    v.insert(std::lower_bound(v.begin(), v.end(), x), x);
  }

  int n_ = 0;
  std::size_t m_ = 0;
  std::vector<std::vector<int>> adj_;
  std::vector<Bitset> rows_;
};

/// Connected component of `start` as a sorted vertex list.
inline std::vector<int> component_of(const Graph& g, int start) {
  g.check_vertex(start);
  std::vector<char> seen(static_cast<std::size_t>(g.num_vertices()) + 1, 0);
  std::vector<int> out;
  std::queue<int> q;
  q.push(start);
  seen[static_cast<std::size_t>(start)] = 1;
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    out.push_back(u);
    for (int w : g.neighbors(u))
      if (!seen[static_cast<std::size_t>(w)]) {
        seen[static_cast<std::size_t>(w)] = 1;
        q.push(w);
      }
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline bool is_connected(const Graph& g) {
  if (g.num_vertices() <= 1) return true;
  return static_cast<int>(component_of(g, 1).size()) == g.num_vertices();
}

/// Induced subgraph on `vs` (1-based host labels), relabeled 1..|vs| by the
/// sorted order of vs. Returns the subgraph and the host label per new id.
inline std::pair<Graph, std::vector<int>> induced_subgraph(const Graph& g,
                                                           std::vector<int> vs) {
  std::sort(vs.begin(), vs.end());
  vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
  std::vector<int> local(static_cast<std::size_t>(g.num_vertices()) + 1, 0);
  for (std::size_t i = 0; i < vs.size(); ++i) {
    g.check_vertex(vs[i]);
    local[static_cast<std::size_t>(vs[i])] = static_cast<int>(i) + 1;
  }
  Graph h(static_cast<int>(vs.size()));
  for (std::size_t i = 0; i < vs.size(); ++i)
    for (int w : g.neighbors(vs[i])) {
      int lw = local[static_cast<std::size_t>(w)];
      if (lw > static_cast<int>(i) + 1) h.add_edge(static_cast<int>(i) + 1, lw);
    }
  return {std::move(h), std::move(vs)};
}

} // namespace kc
