#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "kc/bitset.hpp"
#include "kc/errors.hpp"
#include "kc/graph.hpp"

namespace kc {

/// Partition of the vertex set by degree: D_i = vertices of degree i,
/// plus Small = D_{<= threshold}.
struct DegreeClasses {
  std::vector<std::vector<int>> by_degree; // index d -> sorted vertices
  std::vector<int> small;                  // D_{<= threshold}, sorted
  int small_threshold = 0;

  const std::vector<int>& of_degree(int d) const {
    static const std::vector<int> empty;
    if (d < 0 || d >= static_cast<int>(by_degree.size())) return empty;
    return by_degree[static_cast<std::size_t>(d)];
  }

  /// D_{<= d}, sorted.
  std::vector<int> up_to(int d) const {
    std::vector<int> out;
    for (int i = 0; i <= d && i < static_cast<int>(by_degree.size()); ++i)
      out.insert(out.end(), by_degree[static_cast<std::size_t>(i)].begin(),
                 by_degree[static_cast<std::size_t>(i)].end());
    std::sort(out.begin(), out.end());
    return out;
  }
};

/// Paper default threshold for Small: floor(ln n / 10).
inline int default_small_threshold(int n) {
  if (n < 1) return 0;
  return static_cast<int>(std::floor(std::log(static_cast<double>(n)) / 10.0));
}

inline DegreeClasses degree_classes(const Graph& g, int small_threshold) {
  DegreeClasses dc;
  dc.small_threshold = small_threshold;
  dc.by_degree.resize(static_cast<std::size_t>(g.max_degree()) + 1);
  for (int v = 1; v <= g.num_vertices(); ++v) {
    int d = g.degree(v);
    dc.by_degree[static_cast<std::size_t>(d)].push_back(v);
    if (d <= small_threshold) dc.small.push_back(v);
  }
  return dc;
}

namespace detail {
inline Bitset to_bitset(const Graph& g, const std::vector<int>& vs) {
  Bitset b(static_cast<std::size_t>(g.num_vertices()) + 1);
  for (int v : vs) {
    g.check_vertex(v);
    b.set(static_cast<std::size_t>(v));
  }
  return b;
}

inline std::vector<int> to_vector(const Bitset& b) {
  std::vector<int> out;
  b.for_each([&](std::size_t i) { out.push_back(static_cast<int>(i)); });
  return out;
}
} // namespace detail

/// e(U): number of edges spanned by U.
inline std::size_t edges_within(const Graph& g, const std::vector<int>& u) {
  Bitset ub = detail::to_bitset(g, u);
  std::size_t twice = 0;
  ub.for_each([&](std::size_t v) {
    twice += g.row(static_cast<int>(v)).count_and(ub);
  });
  return twice / 2;
}

/// e(U,W) for disjoint U, W.
inline std::size_t edges_between(const Graph& g, const std::vector<int>& u,
                                 const std::vector<int>& w) {
  Bitset ub = detail::to_bitset(g, u);
  Bitset wb = detail::to_bitset(g, w);
  if (ub.intersects(wb))
    throw overlap_error("edges_between requires disjoint sets");
  std::size_t c = 0;
  ub.for_each([&](std::size_t v) {
    c += g.row(static_cast<int>(v)).count_and(wb);
  });
  return c;
}

/// External neighborhood N(U) = vertices outside U adjacent to U (sorted).
inline std::vector<int> neighborhood(const Graph& g, const std::vector<int>& u) {
  Bitset ub = detail::to_bitset(g, u);
  Bitset nb(static_cast<std::size_t>(g.num_vertices()) + 1);
  ub.for_each([&](std::size_t v) { nb |= g.row(static_cast<int>(v)); });
  nb.and_not(ub);
  return detail::to_vector(nb);
}

/// The 2.1-notation bundle for two disjoint sets.
struct SetStats {
  std::size_t e_u = 0;           // e(U)
  std::size_t e_uw = 0;          // e(U,W)
  std::vector<int> n_u;          // N(U)
  std::vector<int> n_u_and_n_w;  // N(U) ∩ N(W)
};

inline SetStats set_stats(const Graph& g, const std::vector<int>& u,
                          const std::vector<int>& w) {
  Bitset ub = detail::to_bitset(g, u);
  Bitset wb = detail::to_bitset(g, w);
  if (ub.intersects(wb)) throw overlap_error("set_stats requires disjoint U, W");

  SetStats s;
  s.e_u = edges_within(g, u);
  s.e_uw = edges_between(g, u, w);

  Bitset nu(static_cast<std::size_t>(g.num_vertices()) + 1);
  ub.for_each([&](std::size_t v) { nu |= g.row(static_cast<int>(v)); });
  nu.and_not(ub);
  s.n_u = detail::to_vector(nu);

  Bitset nw(static_cast<std::size_t>(g.num_vertices()) + 1);
  wb.for_each([&](std::size_t v) { nw |= g.row(static_cast<int>(v)); });
  nw.and_not(wb);
  nu &= nw;
  s.n_u_and_n_w = detail::to_vector(nu);
  return s;
}

/// d(v, S): number of neighbors of v inside S.
inline int degree_into(const Graph& g, int v, const Bitset& s) {
  return static_cast<int>(g.row(v).count_and(s));
}

} // namespace kc
