#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "kc/errors.hpp"
#include "kc/gnp.hpp"
#include "kc/graph.hpp"
#include "kc/rng.hpp"

namespace kc {

/// Maximum common edge subgraph under a vertex bijection: the witness maps
/// vertex v of G1 to perm[v-1] of G2, and value counts the edges {u,v} of
/// G1 whose images are edges of G2.
struct McsResult {
  int value = 0;
  std::vector<int> perm; // perm[v-1] in [1..n]
  enum class Mode { exact, heuristic } mode = Mode::exact;
};

/// Common edge count of a bijection; the recompute used by both searches.
inline int common_edges(const Graph& g1, const Graph& g2, const std::vector<int>& perm) {
  if (static_cast<int>(perm.size()) != g1.num_vertices())
    throw parameter_error("common_edges: permutation size mismatch");
  int c = 0;
  for (auto [u, v] : g1.edges())
    if (g2.has_edge(perm[static_cast<std::size_t>(u - 1)], perm[static_cast<std::size_t>(v - 1)]))
      ++c;
  return c;
}

inline constexpr int kMcesExactLimit = 8;

/// Exhaustive maximization over all n! bijections. n <= 8.
inline McsResult mces_exact(const Graph& g1, const Graph& g2) {
  const int n = g1.num_vertices();
  if (n != g2.num_vertices())
    throw parameter_error("mces_exact: graphs must share the vertex count");
  if (n > kMcesExactLimit)
    throw capacity_error("mces_exact: limited to " + std::to_string(kMcesExactLimit) +
                         " vertices");
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 1);
  McsResult best;
  best.mode = McsResult::Mode::exact;
  best.value = -1;
  do {
    int c = common_edges(g1, g2, perm);
    if (c > best.value) {
      best.value = c;
      best.perm = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

/// Greedy degree-sequence alignment plus pairwise-swap local search with
/// seeded restarts. The result is a lower bound on the exact value and is
/// deterministic per seed.
inline McsResult mces_heuristic(const Graph& g1, const Graph& g2, std::uint64_t seed,
                                int restarts = 4) {
  const int n = g1.num_vertices();
  if (n != g2.num_vertices())
    throw parameter_error("mces_heuristic: graphs must share the vertex count");
  McsResult best;
  best.mode = McsResult::Mode::heuristic;
  best.value = -1;
  if (n == 0) {
    best.value = 0;
    return best;
  }

  auto local_search = [&](std::vector<int> perm) {
    int cur = common_edges(g1, g2, perm);
    bool improved = true;
    while (improved) {
      improved = false;
      for (int i = 0; i < n && !improved; ++i)
        for (int j = i + 1; j < n && !improved; ++j) {
          std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
          int c = common_edges(g1, g2, perm);
          if (c > cur) {
            cur = c;
            improved = true;
          } else {
            std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
          }
        }
    }
    if (cur > best.value) {
      best.value = cur;
      best.perm = perm;
    }
  };

  // degree-aligned start: sort both sides by (degree desc, index asc)
  std::vector<int> v1(static_cast<std::size_t>(n)), v2(static_cast<std::size_t>(n));
  std::iota(v1.begin(), v1.end(), 1);
  std::iota(v2.begin(), v2.end(), 1);
  auto by_degree = [](const Graph& g) {
    return [&g](int a, int b) {
      return std::make_pair(-g.degree(a), a) < std::make_pair(-g.degree(b), b);
    };
  };
  std::sort(v1.begin(), v1.end(), by_degree(g1));
  std::sort(v2.begin(), v2.end(), by_degree(g2));
  std::vector<int> perm(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    perm[static_cast<std::size_t>(v1[static_cast<std::size_t>(i)] - 1)] =
        v2[static_cast<std::size_t>(i)];
  local_search(perm);

  Rng rng(seed);
  for (int r = 0; r < restarts; ++r) {
    std::vector<int> p(static_cast<std::size_t>(n));
    std::iota(p.begin(), p.end(), 1);
    rng.shuffle(p);
    local_search(std::move(p));
  }
  return best;
}

// ---------------------------------------------------------------------------
// Union bound of the MCES upper-bound proof
// ---------------------------------------------------------------------------

struct UnionBoundResult {
  double log_exact = 0.0;      // ln [ C(C(n,2), m) n! p^{2m} ]
  double log_simplified = 0.0; // ln [ (2 n^{(-1+2d)(1+e)+1})^n ]
  long long m = 0;             // (1+eps) n, rounded up
  bool certifies = false;      // log_exact < 0
};

/// log-gamma evaluation of C(C(n,2), m) * n! * p^{2m} with m = ceil((1+eps)n),
/// plus the closed simplified form for cross-checking.
inline UnionBoundResult union_bound_eval(double n, double eps, double delta, double p) {
  if (!(n >= 2)) throw parameter_error("union_bound_eval: n >= 2 required");
  if (!(eps > 0)) throw parameter_error("union_bound_eval: eps > 0 required");
  if (!(p > 0 && p <= 1)) throw parameter_error("union_bound_eval: p in (0,1] required");

  UnionBoundResult r;
  const double pairs = n * (n - 1) / 2.0;
  const double m = std::ceil((1.0 + eps) * n);
  r.m = static_cast<long long>(m);
  if (m > pairs) {
    // no m-edge subgraph exists at all; the event probability is 0
    r.log_exact = -std::numeric_limits<double>::infinity();
  } else {
    auto log_choose = [](double a, double b) {
      return std::lgamma(a + 1) - std::lgamma(b + 1) - std::lgamma(a - b + 1);
    };
    r.log_exact = log_choose(pairs, m) + std::lgamma(n + 1) + 2.0 * m * std::log(p);
  }
  const double expo = (-1.0 + 2.0 * delta) * (1.0 + eps) + 1.0;
  r.log_simplified = n * (std::log(2.0) + expo * std::log(n));
  r.certifies = r.log_exact < 0.0;
  return r;
}

// ---------------------------------------------------------------------------
// Experiment harness
// ---------------------------------------------------------------------------

struct McsTrialRow {
  int trial = 0;
  int value = 0;
  std::string mode;
  std::uint64_t seed = 0;
};

struct McsExperimentResult {
  std::vector<McsTrialRow> rows;
  int max_value = 0;
  double mean_value = 0.0;
  double eps = 0.0;
  double threshold = 0.0; // (1+eps) n
  int exceed_count = 0;   // trials with M > (1+eps) n
};

/// Samples independent pairs G1, G2 ~ G(n,p) and records M per trial.
/// Exact mode requires n <= 8; heuristic mode works for any n.
inline McsExperimentResult mcs_experiment(int n, double p, int trials,
                                          std::uint64_t seed, bool exact,
                                          double eps = 0.5) {
  if (exact && n > kMcesExactLimit)
    throw capacity_error("mcs_experiment: exact mode limited to 8 vertices");
  McsExperimentResult out;
  out.eps = eps;
  out.threshold = (1.0 + eps) * n;
  double sum = 0;
  for (int t = 0; t < trials; ++t) {
    auto s1 = derive_seed(seed, "mcs-g1", static_cast<std::uint64_t>(t));
    auto s2 = derive_seed(seed, "mcs-g2", static_cast<std::uint64_t>(t));
    Graph g1 = sample_gnp(n, p, s1);
    Graph g2 = sample_gnp(n, p, s2);
    McsResult m = exact ? mces_exact(g1, g2)
                        : mces_heuristic(g1, g2, derive_seed(seed, "mcs-h", static_cast<std::uint64_t>(t)));
    // the reported value must recompute from its witness
    if (common_edges(g1, g2, m.perm) != m.value)
      throw error("mcs_experiment: witness recomputation failed");
    McsTrialRow row;
    row.trial = t;
    row.value = m.value;
    row.mode = exact ? "exact" : "heuristic";
    row.seed = s1;
    out.rows.push_back(row);
    out.max_value = std::max(out.max_value, m.value);
    sum += m.value;
    if (static_cast<double>(m.value) > out.threshold) ++out.exceed_count;
  }
  out.mean_value = trials > 0 ? sum / trials : 0.0;
  return out;
}

} // namespace kc
