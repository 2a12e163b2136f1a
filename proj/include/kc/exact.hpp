#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "kc/errors.hpp"
#include "kc/graph.hpp"

namespace kc::exact {

/// Hard cap for the subset-DP kernels.
inline constexpr int kMaxDpVertices = 18;

namespace detail {

inline void check_capacity(int n, const char* what) {
  if (n > kMaxDpVertices)
    throw capacity_error(std::string(what) + ": exact mode limited to " +
                         std::to_string(kMaxDpVertices) + " vertices");
}

/// 0-based adjacency masks: bit j of mask[i] set iff {i+1, j+1} is an edge.
inline std::vector<std::uint32_t> adjacency_masks(const Graph& g) {
  const int n = g.num_vertices();
  std::vector<std::uint32_t> adj(static_cast<std::size_t>(n), 0);
  for (int u = 1; u <= n; ++u)
    for (int v : g.neighbors(u))
      adj[static_cast<std::size_t>(u - 1)] |= (std::uint32_t{1} << (v - 1));
  return adj;
}

/// dp[mask] = bitmask of endpoints e such that some simple path covers
/// exactly `mask` and ends at e; any start vertex.
inline std::vector<std::uint32_t> free_start_dp(const std::vector<std::uint32_t>& adj) {
  const int n = static_cast<int>(adj.size());
  std::vector<std::uint32_t> dp(std::size_t{1} << n, 0);
  for (int i = 0; i < n; ++i) dp[std::size_t{1} << i] = std::uint32_t{1} << i;
  const std::uint32_t full = (n == 32) ? ~0u : ((std::uint32_t{1} << n) - 1);
  for (std::uint32_t mask = 1; mask <= full; ++mask) {
    std::uint32_t ends = dp[mask];
    while (ends) {
      int e = std::countr_zero(ends);
      ends &= ends - 1;
      std::uint32_t ext = adj[static_cast<std::size_t>(e)] & ~mask;
      while (ext) {
        int w = std::countr_zero(ext);
        ext &= ext - 1;
        dp[mask | (std::uint32_t{1} << w)] |= (std::uint32_t{1} << w);
      }
    }
  }
  return dp;
}

/// dp[mask] (mask must contain `start`) = endpoints of simple paths that
/// start at `start` and cover exactly `mask`.
inline std::vector<std::uint32_t> fixed_start_dp(const std::vector<std::uint32_t>& adj,
                                                 int start) {
  const int n = static_cast<int>(adj.size());
  std::vector<std::uint32_t> dp(std::size_t{1} << n, 0);
  dp[std::size_t{1} << start] = std::uint32_t{1} << start;
  const std::uint32_t full = (std::uint32_t{1} << n) - 1;
  const std::uint32_t sbit = std::uint32_t{1} << start;
  for (std::uint32_t mask = sbit; mask <= full; ++mask) {
    if (!(mask & sbit)) continue;
    std::uint32_t ends = dp[mask];
    while (ends) {
      int e = std::countr_zero(ends);
      ends &= ends - 1;
      std::uint32_t ext = adj[static_cast<std::size_t>(e)] & ~mask;
      while (ext) {
        int w = std::countr_zero(ext);
        ext &= ext - 1;
        dp[mask | (std::uint32_t{1} << w)] |= (std::uint32_t{1} << w);
      }
    }
  }
  return dp;
}

/// Reconstructs a path ending at `e` covering `mask` by walking the dp
/// backwards. Returns 0-based vertex ids, path end first.
inline std::vector<int> walk_back(const std::vector<std::uint32_t>& dp,
                                  const std::vector<std::uint32_t>& adj,
                                  std::uint32_t mask, int e) {
  std::vector<int> rev;
  while (true) {
    rev.push_back(e);
    std::uint32_t rest = mask ^ (std::uint32_t{1} << e);
    if (!rest) break;
    std::uint32_t preds = dp[rest] & adj[static_cast<std::size_t>(e)];
    e = std::countr_zero(preds); // smallest-index predecessor; dp guarantees one
    mask = rest;
  }
  return rev;
}

} // namespace detail

/// Length (edge count) of a longest simple path. n <= 18.
inline int longest_path_length(const Graph& g) {
  const int n = g.num_vertices();
  detail::check_capacity(n, "longest_path_length");
  if (n == 0) return 0;
  auto adj = detail::adjacency_masks(g);
  auto dp = detail::free_start_dp(adj);
  int best = 0;
  for (std::uint32_t mask = 1; mask < dp.size(); ++mask)
    if (dp[mask]) best = std::max(best, std::popcount(mask) - 1);
  return best;
}

/// A longest simple path as 1-based vertex labels. Deterministic:
/// smallest (mask, endpoint) witness.
inline std::vector<int> longest_path(const Graph& g) {
  const int n = g.num_vertices();
  detail::check_capacity(n, "longest_path");
  if (n == 0) return {};
  auto adj = detail::adjacency_masks(g);
  auto dp = detail::free_start_dp(adj);
  int best = -1;
  std::uint32_t best_mask = 0;
  int best_end = 0;
  for (std::uint32_t mask = 1; mask < dp.size(); ++mask) {
    if (!dp[mask]) continue;
    int len = std::popcount(mask) - 1;
    if (len > best) {
      best = len;
      best_mask = mask;
      best_end = std::countr_zero(dp[mask]);
    }
  }
  auto rev = detail::walk_back(dp, adj, best_mask, best_end);
  std::vector<int> out;
  out.reserve(rev.size());
  for (auto it = rev.rbegin(); it != rev.rend(); ++it) out.push_back(*it + 1);
  return out;
}

inline bool hamilton_cycle_exists(const Graph& g) {
  const int n = g.num_vertices();
  detail::check_capacity(n, "hamilton_cycle_exists");
  if (n < 3) return false;
  auto adj = detail::adjacency_masks(g);
  auto dp = detail::fixed_start_dp(adj, 0);
  const std::uint32_t full = (std::uint32_t{1} << n) - 1;
  return (dp[full] & adj[0]) != 0;
}

/// A Hamilton cycle as 1-based labels (n vertices, implicit closing edge),
/// or nullopt.
inline std::optional<std::vector<int>> hamilton_cycle(const Graph& g) {
  const int n = g.num_vertices();
  detail::check_capacity(n, "hamilton_cycle");
  if (n < 3) return std::nullopt;
  auto adj = detail::adjacency_masks(g);
  auto dp = detail::fixed_start_dp(adj, 0);
  const std::uint32_t full = (std::uint32_t{1} << n) - 1;
  std::uint32_t closers = dp[full] & adj[0];
  if (!closers) return std::nullopt;
  int e = std::countr_zero(closers);
  auto rev = detail::walk_back(dp, adj, full, e); // e ... 0
  std::vector<int> out;
  out.reserve(rev.size());
  for (auto it = rev.rbegin(); it != rev.rend(); ++it) out.push_back(*it + 1);
  return out;
}

/// The exact endpoint set of Lemma-style rotations: all y != v0 such that
/// some simple path spans exactly `vertex_set` with endpoints v0 and y.
/// |vertex_set| <= 18.
inline std::vector<int> endpoint_set(const Graph& g,
                                     const std::vector<int>& vertex_set, int v0) {
  std::vector<int> vs = vertex_set;
  std::sort(vs.begin(), vs.end());
  vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
  const int k = static_cast<int>(vs.size());
  detail::check_capacity(k, "endpoint_set");
  int s = -1;
  for (int i = 0; i < k; ++i)
    if (vs[static_cast<std::size_t>(i)] == v0) s = i;
  if (s < 0) throw parameter_error("endpoint_set: v0 must belong to the vertex set");

  // induced adjacency over vs
  std::vector<std::uint32_t> adj(static_cast<std::size_t>(k), 0);
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j)
      if (g.has_edge(vs[static_cast<std::size_t>(i)], vs[static_cast<std::size_t>(j)])) {
        adj[static_cast<std::size_t>(i)] |= std::uint32_t{1} << j;
        adj[static_cast<std::size_t>(j)] |= std::uint32_t{1} << i;
      }
  auto dp = detail::fixed_start_dp(adj, s);
  const std::uint32_t full = (std::uint32_t{1} << k) - 1;
  std::uint32_t ends = dp[full] & ~(std::uint32_t{1} << s);
  std::vector<int> out;
  while (ends) {
    int e = std::countr_zero(ends);
    ends &= ends - 1;
    out.push_back(vs[static_cast<std::size_t>(e)]);
  }
  return out;
}

/// All boosters of H by the literal definition: non-edges whose addition
/// creates a Hamiltonian graph or strictly lengthens the longest path.
/// Returns {} for Hamiltonian input. n <= 18.
inline std::vector<std::pair<int, int>> boosters(const Graph& h) {
  const int n = h.num_vertices();
  detail::check_capacity(n, "boosters");
  std::vector<std::pair<int, int>> out;
  if (n < 2) return out;
  if (n >= 3 && hamilton_cycle_exists(h)) return out;

  auto adj = detail::adjacency_masks(h);
  const std::size_t nmasks = std::size_t{1} << n;
  const std::uint32_t full = static_cast<std::uint32_t>(nmasks - 1);

  int lp0 = longest_path_length(h);

  // Per-vertex fixed-start tables: reach_u[mask] = some path with endpoint u
  // covers mask; best_u[S] = max |A|, A subset of S containing u, reachable.
  std::vector<std::vector<std::uint64_t>> reach(static_cast<std::size_t>(n));
  std::vector<std::vector<std::int8_t>> best(static_cast<std::size_t>(n));
  std::vector<std::uint32_t> ham_ends(static_cast<std::size_t>(n), 0);

  for (int u = 0; u < n; ++u) {
    auto dp = detail::fixed_start_dp(adj, u);
    ham_ends[static_cast<std::size_t>(u)] = dp[full];
    auto& ru = reach[static_cast<std::size_t>(u)];
    ru.assign((nmasks + 63) / 64, 0);
    auto& bu = best[static_cast<std::size_t>(u)];
    bu.assign(nmasks, 0);
    for (std::size_t mask = 0; mask < nmasks; ++mask)
      if (dp[mask]) {
        ru[mask >> 6] |= std::uint64_t{1} << (mask & 63);
        bu[mask] = static_cast<std::int8_t>(std::popcount(static_cast<std::uint32_t>(mask)));
      }
    // superset-propagate max over subsets
    for (int b = 0; b < n; ++b) {
      const std::uint32_t bit = std::uint32_t{1} << b;
      for (std::uint32_t mask = 0; mask < nmasks; ++mask)
        if (mask & bit) bu[mask] = std::max(bu[mask], bu[mask ^ bit]);
    }
  }

  auto reach_test = [&](int v, std::uint32_t mask) {
    return (reach[static_cast<std::size_t>(v)][mask >> 6] >> (mask & 63)) & 1u;
  };

  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      if (adj[static_cast<std::size_t>(u)] & (std::uint32_t{1} << v)) continue;
      bool is_booster = false;
      // Hamilton cycle through the new edge = Hamilton path u..v in H.
      if (n >= 3 && (ham_ends[static_cast<std::size_t>(u)] & (std::uint32_t{1} << v)))
        is_booster = true;
      if (!is_booster) {
        // Longest path through the new edge: path ending v covering B,
        // plus disjoint path ending u inside the complement.
        int best_through = 0;
        const std::uint32_t vbit = std::uint32_t{1} << v;
        for (std::uint32_t mask = vbit; mask <= full; ++mask) {
          if (!(mask & vbit)) continue;
          if (!reach_test(v, mask)) continue;
          int other = best[static_cast<std::size_t>(u)][full & ~mask];
          if (other == 0) continue;
          best_through = std::max(best_through,
                                  std::popcount(mask) + other);
        }
        if (best_through - 1 > lp0) is_booster = true;
      }
      if (is_booster) out.emplace_back(u + 1, v + 1);
    }
  }
  return out;
}

} // namespace kc::exact
