#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kc/errors.hpp"
#include "kc/graph.hpp"
#include "kc/rng.hpp"
#include "kc/stats.hpp"

namespace kc {

enum class PropId { P1, P2, P3, P4, P5, P6, P7, P8 };

inline const char* prop_name(PropId p) {
  switch (p) {
    case PropId::P1: return "P1";
    case PropId::P2: return "P2";
    case PropId::P3: return "P3";
    case PropId::P4: return "P4";
    case PropId::P5: return "P5";
    case PropId::P6: return "P6";
    case PropId::P7: return "P7";
    case PropId::P8: return "P8";
  }
  return "?";
}

enum class Verdict { holds, violated, unknown };

inline const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::holds: return "holds";
    case Verdict::violated: return "violated";
    case Verdict::unknown: return "unknown";
  }
  return "?";
}

/// Violation evidence; which fields are filled depends on the property.
struct PropWitness {
  std::vector<int> u;
  std::vector<int> w;
  std::vector<int> path; // P3: the short path between Small vertices
  int vertex = 0;        // P1: a max-degree offender
};

struct CheckMode {
  enum class Kind { exact, sampled };
  Kind kind = Kind::exact;
  int trials = 0;
  std::uint64_t seed = 0;

  static CheckMode exact() { return {Kind::exact, 0, 0}; }
  static CheckMode sampled(int trials, std::uint64_t seed) {
    return {Kind::sampled, trials, seed};
  }
};

struct PropertyReport {
  PropId property;
  Verdict verdict = Verdict::unknown;
  std::optional<PropWitness> witness;
  CheckMode mode;
  std::string detail; // thresholds actually used
};

/// All numeric constants of the property suite in one table. The paper
/// values are asymptotic; the desk profile swaps in values that are
/// meaningful at small n (gamma and the Small threshold in particular).
struct PropertyConstants {
  double gamma = 1e-4;        // §3 gamma
  double p1_factor = 10.0;    // P1: max degree <= p1_factor * ln n
  double p5_size_num = 10.0;  // P5: |U| <= p5_size_num * n / ln n
  double p5_cut_div = 11.0;   // P5: e(U, V\U) >= |U| ln n / p5_cut_div
  double p5_nbr_div = 18.0;   // P5: |N(U)| <= |U| ln n / p5_nbr_div
  double p6_size_div = 5000.0;   // P6: |U| <= gamma n / p6_size_div
  double p6_edge_div = 1000.0;   // P6: e(U) <= gamma ln n |U| / p6_edge_div
  double p7_lo_num = 10.0;    // P7: |U|,|W| >= p7_lo_num * n / ln n
  double p7_frac = 9.0;       // P7: |U|,|W| <= n / p7_frac; |N∩N| >= n / p7_frac
  double p8_size_div = 25000.0;  // P8: |U|,|W| >= gamma n / p8_size_div
  double p8_coef = 0.5;       // P8: e(U,W) >= p8_coef |U||W| ln n / n
  int small_threshold = 0;    // Small = D_{<= threshold}
  int exact_limit = 20;       // exact set enumeration cap

  static PropertyConstants paper(int n) {
    PropertyConstants c;
    c.small_threshold = default_small_threshold(n);
    return c;
  }
  static PropertyConstants desk(int n) {
    PropertyConstants c;
    c.gamma = 0.01;
    c.small_threshold = default_small_threshold(n);
    return c;
  }
};

// ---------------------------------------------------------------------------
// P1 / P2: degree properties (always exact)
// ---------------------------------------------------------------------------

inline PropertyReport check_p1(const Graph& g, const PropertyConstants& c) {
  PropertyReport r;
  r.property = PropId::P1;
  r.mode = CheckMode::exact();
  const double bound = c.p1_factor * std::log(std::max(2, g.num_vertices()));
  r.detail = "max degree <= " + std::to_string(bound);
  r.verdict = Verdict::holds;
  for (int v = 1; v <= g.num_vertices(); ++v)
    if (static_cast<double>(g.degree(v)) > bound) {
      r.verdict = Verdict::violated;
      PropWitness wit;
      wit.vertex = v;
      r.witness = wit;
      break;
    }
  return r;
}

inline PropertyReport check_p2(const Graph& g, const PropertyConstants&) {
  PropertyReport r;
  r.property = PropId::P2;
  r.mode = CheckMode::exact();
  const double ln_n = std::log(std::max(2, g.num_vertices()));
  auto dc = degree_classes(g, 0);
  const auto n1 = static_cast<double>(dc.of_degree(1).size());
  const auto n2 = static_cast<double>(dc.of_degree(2).size());
  r.detail = "|D1| <= ln n <= |D2| with ln n = " + std::to_string(ln_n);
  if (n1 <= ln_n && ln_n <= n2) {
    r.verdict = Verdict::holds;
  } else {
    r.verdict = Verdict::violated;
    PropWitness wit;
    wit.u = dc.of_degree(1);
    wit.w = dc.of_degree(2);
    r.witness = wit;
  }
  return r;
}

inline std::pair<PropertyReport, PropertyReport> check_degree_properties(
    const Graph& g, const PropertyConstants& c) {
  return {check_p1(g, c), check_p2(g, c)};
}

// ---------------------------------------------------------------------------
// P3 / P4: Small-vertex structure (always exact)
// ---------------------------------------------------------------------------

/// P3: no path of length at most L = 0.2 ln n / ln ln n (possibly a cycle)
/// whose endpoints lie in Small. L is clamped to >= 1; n < 3 is Unknown.
inline PropertyReport check_p3(const Graph& g, const PropertyConstants& c) {
  PropertyReport r;
  r.property = PropId::P3;
  r.mode = CheckMode::exact();
  const int n = g.num_vertices();
  if (n < 3) {
    r.verdict = Verdict::unknown;
    r.detail = "n < 3: ln ln n undefined";
    return r;
  }
  const double ln_n = std::log(static_cast<double>(n));
  int max_len = static_cast<int>(std::floor(0.2 * ln_n / std::log(ln_n)));
  if (max_len < 1) max_len = 1;
  r.detail = "no Small-to-Small path of length <= " + std::to_string(max_len) +
             ", Small threshold " + std::to_string(c.small_threshold);

  auto dc = degree_classes(g, c.small_threshold);
  std::vector<char> small(static_cast<std::size_t>(n) + 1, 0);
  for (int v : dc.small) small[static_cast<std::size_t>(v)] = 1;

  std::vector<int> dist(static_cast<std::size_t>(n) + 1);
  std::vector<int> parent(static_cast<std::size_t>(n) + 1);

  // distinct endpoints: BFS from each Small vertex, truncated at max_len
  for (int s : dc.small) {
    std::fill(dist.begin(), dist.end(), -1);
    dist[static_cast<std::size_t>(s)] = 0;
    parent[static_cast<std::size_t>(s)] = 0;
    std::vector<int> q{s};
    for (std::size_t qi = 0; qi < q.size(); ++qi) {
      int u = q[qi];
      if (dist[static_cast<std::size_t>(u)] >= max_len) continue;
      for (int x : g.neighbors(u)) {
        if (dist[static_cast<std::size_t>(x)] >= 0) continue;
        dist[static_cast<std::size_t>(x)] = dist[static_cast<std::size_t>(u)] + 1;
        parent[static_cast<std::size_t>(x)] = u;
        if (small[static_cast<std::size_t>(x)] && x != s) {
          r.verdict = Verdict::violated;
          PropWitness wit;
          std::vector<int> path;
          for (int cur = x; cur != 0; cur = parent[static_cast<std::size_t>(cur)])
            path.push_back(cur);
          std::reverse(path.begin(), path.end());
          wit.path = path;
          r.witness = wit;
          return r;
        }
        q.push_back(x);
      }
    }
  }

  // identical endpoints: a cycle of length <= max_len through s exists iff
  // two distinct neighbors a, a' of s are within max_len - 2 in G - s
  for (int s : dc.small) {
    const auto& nbrs = g.neighbors(s);
    for (std::size_t ai = 0; ai < nbrs.size(); ++ai) {
      const int a = nbrs[static_cast<std::size_t>(ai)];
      std::fill(dist.begin(), dist.end(), -1);
      dist[static_cast<std::size_t>(a)] = 0;
      parent[static_cast<std::size_t>(a)] = 0;
      dist[static_cast<std::size_t>(s)] = -2; // blocked
      std::vector<int> q{a};
      for (std::size_t qi = 0; qi < q.size(); ++qi) {
        int u = q[qi];
        if (dist[static_cast<std::size_t>(u)] >= max_len - 2) continue;
        for (int x : g.neighbors(u)) {
          if (dist[static_cast<std::size_t>(x)] != -1) continue;
          dist[static_cast<std::size_t>(x)] = dist[static_cast<std::size_t>(u)] + 1;
          parent[static_cast<std::size_t>(x)] = u;
          q.push_back(x);
        }
      }
      for (std::size_t bi = ai + 1; bi < nbrs.size(); ++bi) {
        const int b = nbrs[static_cast<std::size_t>(bi)];
        if (dist[static_cast<std::size_t>(b)] < 0) continue; // unreached in G - s
        r.verdict = Verdict::violated;
        PropWitness wit;
        std::vector<int> path{s};
        std::vector<int> seg;
        for (int cur = b; cur != 0; cur = parent[static_cast<std::size_t>(cur)])
          seg.push_back(cur);
        std::reverse(seg.begin(), seg.end()); // a .. b
        path.insert(path.end(), seg.begin(), seg.end());
        path.push_back(s); // cycle s, a, ..., b, s
        wit.path = path;
        r.witness = wit;
        return r;
      }
    }
  }
  r.verdict = Verdict::holds;
  return r;
}

/// P4: |Small ∪ N(Small)| <= n^0.6.
inline PropertyReport check_p4(const Graph& g, const PropertyConstants& c) {
  PropertyReport r;
  r.property = PropId::P4;
  r.mode = CheckMode::exact();
  const int n = g.num_vertices();
  auto dc = degree_classes(g, c.small_threshold);
  auto nbh = neighborhood(g, dc.small);
  std::vector<int> closed = dc.small;
  closed.insert(closed.end(), nbh.begin(), nbh.end());
  std::sort(closed.begin(), closed.end());
  closed.erase(std::unique(closed.begin(), closed.end()), closed.end());
  const double bound = std::pow(static_cast<double>(std::max(1, n)), 0.6);
  r.detail = "|Small ∪ N(Small)| = " + std::to_string(closed.size()) +
             " vs n^0.6 = " + std::to_string(bound);
  if (static_cast<double>(closed.size()) <= bound) {
    r.verdict = Verdict::holds;
  } else {
    r.verdict = Verdict::violated;
    PropWitness wit;
    wit.u = closed;
    r.witness = wit;
  }
  return r;
}

inline std::pair<PropertyReport, PropertyReport> check_small_structure(
    const Graph& g, const PropertyConstants& c) {
  return {check_p3(g, c), check_p4(g, c)};
}

// ---------------------------------------------------------------------------
// P5-P8: set expansion / pseudorandomness (exact or sampled)
// ---------------------------------------------------------------------------

namespace detail {

struct SetThresholds {
  // P5
  double p5_max_size, p5_cut_lo, p5_nbr_hi; // cut_lo/nbr_hi are per-|U| factors
  // P6
  double p6_max_size, p6_edges_per_vertex;
  // P7
  double p7_lo, p7_hi, p7_need;
  // P8
  double p8_lo, p8_coef_ln_over_n;

  static SetThresholds of(const Graph& g, const PropertyConstants& c) {
    const double n = std::max(2, g.num_vertices());
    const double ln_n = std::log(n);
    SetThresholds t;
    t.p5_max_size = c.p5_size_num * n / ln_n;
    t.p5_cut_lo = ln_n / c.p5_cut_div;
    t.p5_nbr_hi = ln_n / c.p5_nbr_div;
    t.p6_max_size = c.gamma * n / c.p6_size_div;
    t.p6_edges_per_vertex = c.gamma * ln_n / c.p6_edge_div;
    t.p7_lo = c.p7_lo_num * n / ln_n;
    t.p7_hi = n / c.p7_frac;
    t.p7_need = n / c.p7_frac;
    t.p8_lo = c.gamma * n / c.p8_size_div;
    t.p8_coef_ln_over_n = c.p8_coef * ln_n / n;
    return t;
  }
};

/// Raw-definition audit of a candidate violation (single set).
inline bool violates_p5(const Graph& g, const std::vector<int>& u, const SetThresholds& t) {
  if (u.empty() || static_cast<double>(u.size()) > t.p5_max_size) return false;
  double su = static_cast<double>(u.size());
  double cut = 0;
  {
    std::size_t deg_sum = 0;
    for (int v : u) deg_sum += static_cast<std::size_t>(g.degree(v));
    cut = static_cast<double>(deg_sum) - 2.0 * static_cast<double>(edges_within(g, u));
  }
  if (cut < su * t.p5_cut_lo) return false;
  return static_cast<double>(neighborhood(g, u).size()) <= su * t.p5_nbr_hi;
}

inline bool violates_p6(const Graph& g, const std::vector<int>& u, const SetThresholds& t) {
  if (u.empty() || static_cast<double>(u.size()) > t.p6_max_size) return false;
  return static_cast<double>(edges_within(g, u)) >
         t.p6_edges_per_vertex * static_cast<double>(u.size());
}

inline bool violates_p7(const Graph& g, const std::vector<int>& u,
                        const std::vector<int>& w, const SetThresholds& t) {
  double su = static_cast<double>(u.size()), sw = static_cast<double>(w.size());
  if (su < t.p7_lo || sw < t.p7_lo || su > t.p7_hi || sw > t.p7_hi) return false;
  auto st = set_stats(g, u, w);
  return static_cast<double>(st.n_u_and_n_w.size()) < t.p7_need;
}

inline bool violates_p8(const Graph& g, const std::vector<int>& u,
                        const std::vector<int>& w, const SetThresholds& t) {
  double su = static_cast<double>(u.size()), sw = static_cast<double>(w.size());
  if (su < t.p8_lo || sw < t.p8_lo) return false;
  return static_cast<double>(edges_between(g, u, w)) < su * sw * t.p8_coef_ln_over_n;
}

inline std::vector<int> mask_to_set(std::uint32_t mask, int n) {
  std::vector<int> out;
  for (int i = 0; i < n; ++i)
    if (mask & (std::uint32_t{1} << i)) out.push_back(i + 1);
  return out;
}

} // namespace detail

/// Exact or sampled checker for P5-P8. Exact mode enumerates all qualifying
/// sets (pairs for P7/P8) for n <= exact_limit; sampled mode draws random
/// and greedy-adversarial candidates and answers Violated or Unknown.
/// Every Violated verdict's witness is re-validated against the raw
/// definition before being returned.
inline PropertyReport check_set_expansion(const Graph& g, PropId which,
                                          const PropertyConstants& c,
                                          CheckMode mode) {
  if (which != PropId::P5 && which != PropId::P6 && which != PropId::P7 &&
      which != PropId::P8)
    throw parameter_error("check_set_expansion handles P5..P8 only");

  PropertyReport r;
  r.property = which;
  r.mode = mode;
  const int n = g.num_vertices();
  const auto t = detail::SetThresholds::of(g, c);

  auto found = [&](std::vector<int> u, std::vector<int> w = {}) {
    PropWitness wit;
    wit.u = std::move(u);
    wit.w = std::move(w);
    r.witness = wit;
    r.verdict = Verdict::violated;
  };

  if (mode.kind == CheckMode::Kind::exact) {
    if (n > c.exact_limit)
      throw capacity_error("check_set_expansion: exact mode limited to " +
                           std::to_string(c.exact_limit) + " vertices");
    const std::uint32_t nmasks = static_cast<std::uint32_t>(1u << n);

    if (which == PropId::P5 || which == PropId::P6) {
      for (std::uint32_t mask = 1; mask < nmasks; ++mask) {
        auto u = detail::mask_to_set(mask, n);
        bool bad = (which == PropId::P5) ? detail::violates_p5(g, u, t)
                                         : detail::violates_p6(g, u, t);
        if (bad) {
          found(std::move(u));
          return r;
        }
      }
      r.verdict = Verdict::holds;
      return r;
    }

    // P7/P8: pairs of disjoint sets
    for (std::uint32_t um = 1; um < nmasks; ++um) {
      auto u = detail::mask_to_set(um, n);
      if (which == PropId::P7) {
        double su = static_cast<double>(u.size());
        if (su < t.p7_lo || su > t.p7_hi) continue;
      } else {
        if (static_cast<double>(u.size()) < t.p8_lo) continue;
      }
      const std::uint32_t comp = (nmasks - 1) & ~um;
      // iterate nonempty submasks of the complement
      for (std::uint32_t wm = comp; wm != 0; wm = (wm - 1) & comp) {
        auto w = detail::mask_to_set(wm, n);
        bool bad = (which == PropId::P7) ? detail::violates_p7(g, u, w, t)
                                         : detail::violates_p8(g, u, w, t);
        if (bad) {
          found(std::move(u), std::move(w));
          return r;
        }
      }
    }
    r.verdict = Verdict::holds;
    return r;
  }

  // --- sampled mode ---
  if (mode.trials <= 0)
    throw parameter_error("check_set_expansion: sampled mode requires trials >= 1");
  Rng rng(mode.seed);

  auto random_set = [&](int lo, int hi) {
    if (hi < lo) return std::vector<int>{};
    int size = lo + static_cast<int>(rng.below(static_cast<std::uint64_t>(hi - lo + 1)));
    std::vector<int> out;
    for (auto i : rng.sample_indices(static_cast<std::size_t>(n), static_cast<std::size_t>(size)))
      out.push_back(static_cast<int>(i) + 1);
    std::sort(out.begin(), out.end());
    return out;
  };

  if (which == PropId::P5 || which == PropId::P6) {
    const double max_size_d = (which == PropId::P5) ? t.p5_max_size : t.p6_max_size;
    const int max_size = static_cast<int>(std::min<double>(n, std::floor(max_size_d)));
    if (max_size < 1) {
      r.verdict = Verdict::unknown;
      r.detail = "no qualifying set sizes at these thresholds";
      return r;
    }
    // greedy adversarial growth from each of a few seeds: prefer vertices
    // adding few external neighbors (P5) / many internal edges (P6)
    for (int s = 1; s <= std::min(n, 8); ++s) {
      std::vector<int> u{s};
      while (static_cast<int>(u.size()) <= max_size) {
        bool bad = (which == PropId::P5) ? detail::violates_p5(g, u, t)
                                         : detail::violates_p6(g, u, t);
        if (bad) {
          found(std::move(u));
          return r;
        }
        auto cand = neighborhood(g, u);
        if (cand.empty()) break;
        int best = -1;
        double best_score = 0;
        for (int x : cand) {
          u.push_back(x);
          double score = (which == PropId::P5)
                             ? -static_cast<double>(neighborhood(g, u).size())
                             : static_cast<double>(edges_within(g, u));
          u.pop_back();
          if (best < 0 || score > best_score) {
            best = x;
            best_score = score;
          }
        }
        u.push_back(best);
        std::sort(u.begin(), u.end());
      }
    }
    for (int trial = 0; trial < mode.trials; ++trial) {
      auto u = random_set(1, max_size);
      bool bad = (which == PropId::P5) ? detail::violates_p5(g, u, t)
                                       : detail::violates_p6(g, u, t);
      if (bad) {
        found(std::move(u));
        return r;
      }
    }
    r.verdict = Verdict::unknown;
    return r;
  }

  // P7/P8 sampled
  int lo = (which == PropId::P7) ? static_cast<int>(std::ceil(t.p7_lo))
                                 : std::max(1, static_cast<int>(std::ceil(t.p8_lo)));
  int hi = (which == PropId::P7) ? static_cast<int>(std::floor(t.p7_hi)) : n / 2;
  if (lo < 1) lo = 1;
  if (hi * 2 > n) hi = n / 2;
  if (lo > hi) {
    r.verdict = Verdict::unknown;
    r.detail = "no qualifying set sizes at these thresholds";
    return r;
  }
  for (int trial = 0; trial < mode.trials; ++trial) {
    // draw 2k distinct vertices, split into U, W
    int size = lo + static_cast<int>(rng.below(static_cast<std::uint64_t>(hi - lo + 1)));
    auto both = rng.sample_indices(static_cast<std::size_t>(n), 2 * static_cast<std::size_t>(size));
    std::vector<int> u, w;
    for (std::size_t i = 0; i < both.size(); ++i)
      (i < both.size() / 2 ? u : w).push_back(static_cast<int>(both[i]) + 1);
    std::sort(u.begin(), u.end());
    std::sort(w.begin(), w.end());
    bool bad = (which == PropId::P7) ? detail::violates_p7(g, u, w, t)
                                     : detail::violates_p8(g, u, w, t);
    if (bad) {
      found(std::move(u), std::move(w));
      return r;
    }
  }
  // adversarial for P8: greedily grow two sets avoiding cross edges
  if (which == PropId::P8) {
    std::vector<int> vs(static_cast<std::size_t>(n));
    for (int v = 1; v <= n; ++v) vs[static_cast<std::size_t>(v - 1)] = v;
    std::sort(vs.begin(), vs.end(), [&](int a, int b) {
      return std::make_pair(g.degree(a), a) < std::make_pair(g.degree(b), b);
    });
    std::vector<int> u{vs[0]};
    Bitset blocked(static_cast<std::size_t>(n) + 1);
    blocked |= g.row(vs[0]);
    blocked.set(static_cast<std::size_t>(vs[0]));
    std::vector<int> w;
    for (int v : vs)
      if (!blocked.test(static_cast<std::size_t>(v))) {
        w.push_back(v);
        if (static_cast<int>(w.size()) >= hi) break;
      }
    std::sort(w.begin(), w.end());
    if (!w.empty() && detail::violates_p8(g, u, w, t)) {
      found(std::move(u), std::move(w));
      return r;
    }
  }
  r.verdict = Verdict::unknown;
  return r;
}

} // namespace kc
