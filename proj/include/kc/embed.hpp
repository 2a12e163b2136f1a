#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kc/bitset.hpp"
#include "kc/errors.hpp"
#include "kc/graph.hpp"
#include "kc/params.hpp"
#include "kc/posa.hpp"
#include "kc/rng.hpp"
#include "kc/stats.hpp"

namespace kc {

// ---------------------------------------------------------------------------
// Key selection
// ---------------------------------------------------------------------------

enum class KeyStrategy { paper, lowest_degree };

/// Chooses the t keys. Both strategies require |D_1| <= t (every host
/// degree-1 vertex must be a pendant of the embedded KeyChain), and the
/// chosen keys must be pairwise non-adjacent with disjoint neighborhoods.
/// Degree-1 keys are mandatory; optional candidates that conflict with
/// already-chosen keys are skipped in favor of the next candidate. The
/// structured error names the obstruction when no valid selection exists.
inline std::vector<int> select_keys(const Graph& g, int t, KeyStrategy strategy) {
  if (t < 1) throw parameter_error("select_keys: t >= 1 required");
  auto dc = degree_classes(g, 0);
  const auto& d1 = dc.of_degree(1);
  if (static_cast<int>(d1.size()) > t)
    throw infeasible_error("select_keys: " + std::to_string(d1.size()) +
                           " degree-1 vertices exceed t = " + std::to_string(t) +
                           "; a KeyChain has only t pendants");

  Bitset nbrs(static_cast<std::size_t>(g.num_vertices()) + 1);
  Bitset keyset(static_cast<std::size_t>(g.num_vertices()) + 1);
  std::vector<int> keys;
  auto conflicts = [&](int v) {
    return keyset.test(static_cast<std::size_t>(v)) || g.row(v).intersects(keyset) ||
           g.row(v).intersects(nbrs);
  };
  auto take = [&](int v) {
    keys.push_back(v);
    keyset.set(static_cast<std::size_t>(v));
    nbrs |= g.row(v);
  };

  // degree-1 vertices are forced; conflicts among them are fatal
  for (int v : d1) {
    if (conflicts(v))
      throw infeasible_error("select_keys: degree-1 vertex " + std::to_string(v) +
                             " is adjacent to, or shares a neighbor with, another "
                             "mandatory key");
    take(v);
  }

  std::vector<int> candidates;
  if (strategy == KeyStrategy::paper) {
    candidates = dc.of_degree(2);
  } else {
    for (int v = 1; v <= g.num_vertices(); ++v)
      if (g.degree(v) >= 2) candidates.push_back(v);
    std::sort(candidates.begin(), candidates.end(), [&](int a, int b) {
      return std::make_pair(g.degree(a), a) < std::make_pair(g.degree(b), b);
    });
  }
  for (int v : candidates) {
    if (static_cast<int>(keys.size()) >= t) break;
    if (!conflicts(v)) take(v);
  }
  if (static_cast<int>(keys.size()) < t)
    throw infeasible_error(
        "select_keys: only " + std::to_string(keys.size()) + " of " + std::to_string(t) +
        " keys selectable without adjacency or shared-neighbor conflicts" +
        (strategy == KeyStrategy::paper ? " within D_{<=2}" : ""));
  std::sort(keys.begin(), keys.end());
  return keys;
}

// ---------------------------------------------------------------------------
// Vertex partition (reservoirs U1, U2)
// ---------------------------------------------------------------------------

/// Bounds for the partition's degree conditions (condition (c)). The paper
/// values are vacuous or unsatisfiable at desk n, so the desk profile
/// supplies lenient ones.
struct PartitionBounds {
  double u_lo = 0.0;     // min d(v, U_i), v outside Small ∪ K
  double u_hi = 1e300;   // max d(v, U_i)
  double vprime_lo = 0;  // min d(v, V')

  static PartitionBounds paper_bounds(int n, double gamma) {
    PartitionBounds b;
    double ln_n = std::log(std::max(2, n));
    b.u_lo = gamma * ln_n / 100.0;
    b.u_hi = 100.0 * gamma * ln_n;
    b.vprime_lo = ln_n / 20.0;
    return b;
  }
  static PartitionBounds desk_bounds(int n, double gamma) {
    PartitionBounds b;
    double ln_n = std::log(std::max(2, n));
    b.u_lo = 0.0;
    b.u_hi = std::max(100.0 * gamma * ln_n, 3.0 * ln_n);
    b.vprime_lo = 0.0;
    return b;
  }
};

struct Partition {
  std::vector<int> keys;    // sorted
  std::vector<int> u1, u2;  // sorted, disjoint, disjoint from keys
  std::vector<int> vprime;  // V \ (U1 ∪ U2), contains keys
  std::vector<int> blob_of; // per vertex: blob index, -1 for remainder Z
  int resamples = 0;
  int small_threshold = 0;
  double gamma = 0.0;
};

struct StageFailure {
  std::string stage;
  std::string reason;
};

struct PartitionResult {
  std::optional<Partition> partition;
  StageFailure failure;
  bool ok() const { return partition.has_value(); }
};

/// Algorithmic form of the Local Lemma partition: blobs of size s = ceil(1/γ),
/// one uniform pair per blob seeding U1'/U2', the deterministic corrections
/// (Small and key neighborhoods), then Moser-Tardos style resampling of the
/// blobs around any vertex whose degree conditions fail.
///
/// Deviation from the verbatim construction: K ∪ N(K) is removed from U2 as
/// well as U1. At paper scale K ⊆ Small makes this a no-op; at desk scale
/// keys need not lie in Small and their neighborhoods must stay in V'.
/// Small vertices whose closed neighborhood meets K ∪ N(K) keep only the
/// part of their protection that does not conflict with the keys.
inline PartitionResult partition_vertices(const Graph& g, const std::vector<int>& keys,
                                          double gamma, std::uint64_t seed,
                                          int max_resamples, int small_threshold,
                                          const PartitionBounds& bounds) {
  PartitionResult out;
  const int n = g.num_vertices();
  if (!(gamma > 0.0 && gamma < 0.5))
    throw parameter_error("partition_vertices: gamma in (0, 1/2) required");
  const int s = static_cast<int>(std::ceil(1.0 / gamma));
  if (s > n) throw parameter_error("partition_vertices: blob size 1/gamma exceeds n");

  const int r = n / s;
  std::vector<int> order(static_cast<std::size_t>(n));
  for (int v = 1; v <= n; ++v) order[static_cast<std::size_t>(v - 1)] = v;
  Rng shuffler(derive_seed(seed, "blobs"));
  shuffler.shuffle(order);

  std::vector<int> blob_of(static_cast<std::size_t>(n) + 1, -1);
  std::vector<std::vector<int>> blobs(static_cast<std::size_t>(r));
  for (int j = 0; j < r; ++j) {
    auto& bl = blobs[static_cast<std::size_t>(j)];
    bl.assign(order.begin() + static_cast<std::ptrdiff_t>(j) * s,
              order.begin() + static_cast<std::ptrdiff_t>(j + 1) * s);
    std::sort(bl.begin(), bl.end());
    for (int v : bl) blob_of[static_cast<std::size_t>(v)] = j;
  }

  // per-blob pair draws, redrawable individually
  std::vector<int> draw_count(static_cast<std::size_t>(r), 0);
  std::vector<std::pair<int, int>> pair_of(static_cast<std::size_t>(r));
  auto redraw = [&](int j) {
    Rng rng(derive_seed(seed, "blob-pair",
                        static_cast<std::uint64_t>(j) * 1000003ULL +
                            static_cast<std::uint64_t>(draw_count[static_cast<std::size_t>(j)])));
    ++draw_count[static_cast<std::size_t>(j)];
    const auto& bl = blobs[static_cast<std::size_t>(j)];
    int a = static_cast<int>(rng.below(static_cast<std::uint64_t>(s)));
    int b = static_cast<int>(rng.below(static_cast<std::uint64_t>(s - 1)));
    if (b >= a) ++b;
    pair_of[static_cast<std::size_t>(j)] = {bl[static_cast<std::size_t>(a)],
                                            bl[static_cast<std::size_t>(b)]};
  };
  for (int j = 0; j < r; ++j) redraw(j);

  // fixed correction sets
  auto dc = degree_classes(g, small_threshold);
  Bitset small_b(static_cast<std::size_t>(n) + 1);
  for (int v : dc.small) small_b.set(static_cast<std::size_t>(v));
  Bitset splus(static_cast<std::size_t>(n) + 1);
  for (int v : dc.small) {
    splus.set(static_cast<std::size_t>(v));
    splus |= g.row(v);
  }
  Bitset kplus(static_cast<std::size_t>(n) + 1);
  Bitset keyset(static_cast<std::size_t>(n) + 1);
  for (int k : keys) {
    kplus.set(static_cast<std::size_t>(k));
    keyset.set(static_cast<std::size_t>(k));
    kplus |= g.row(k);
  }

  Bitset u1(static_cast<std::size_t>(n) + 1), u2(static_cast<std::size_t>(n) + 1);
  auto rebuild = [&]() {
    u1.clear();
    u2.clear();
    for (int j = 0; j < r; ++j) {
      u1.set(static_cast<std::size_t>(pair_of[static_cast<std::size_t>(j)].first));
      u2.set(static_cast<std::size_t>(pair_of[static_cast<std::size_t>(j)].second));
    }
    u1 |= splus;
    u1.and_not(kplus);
    u2.and_not(splus);
    u2.and_not(kplus);
    u2.and_not(u1);
  };
  rebuild();

  // resampling loop over condition (c)
  int resamples = 0;
  std::vector<std::string> violated;
  for (;;) {
    violated.clear();
    std::vector<int> bad;
    for (int v = 1; v <= n; ++v) {
      if (small_b.test(static_cast<std::size_t>(v)) || keyset.test(static_cast<std::size_t>(v)))
        continue;
      const double du1 = degree_into(g, v, u1);
      const double du2 = degree_into(g, v, u2);
      const double dvp = static_cast<double>(g.degree(v)) - du1 - du2;
      if (du1 < bounds.u_lo || du2 < bounds.u_lo) {
        bad.push_back(v);
        violated.push_back("d(v,U_i) lower bound at v=" + std::to_string(v));
      } else if (du1 > bounds.u_hi || du2 > bounds.u_hi) {
        bad.push_back(v);
        violated.push_back("d(v,U_i) upper bound at v=" + std::to_string(v));
      } else if (dvp < bounds.vprime_lo) {
        bad.push_back(v);
        violated.push_back("d(v,V') lower bound at v=" + std::to_string(v));
      }
    }
    if (bad.empty()) break;
    if (resamples >= max_resamples) {
      out.failure.stage = "partition";
      std::string reason = "resample budget exhausted; violations:";
      for (std::size_t i = 0; i < violated.size() && i < 4; ++i)
        reason += " " + violated[i] + ";";
      out.failure.reason = reason;
      return out;
    }
    ++resamples;
    // resample the blobs containing the violating vertices' neighborhoods
    std::vector<char> redrawn(static_cast<std::size_t>(r), 0);
    for (int v : bad)
      for (int x : g.neighbors(v)) {
        int j = blob_of[static_cast<std::size_t>(x)];
        if (j >= 0 && !redrawn[static_cast<std::size_t>(j)]) {
          redrawn[static_cast<std::size_t>(j)] = 1;
          redraw(j);
        }
      }
    rebuild();
  }

  Partition part;
  part.keys = keys;
  std::sort(part.keys.begin(), part.keys.end());
  part.blob_of = std::move(blob_of);
  part.resamples = resamples;
  part.small_threshold = small_threshold;
  part.gamma = gamma;
  u1.for_each([&](std::size_t v) { part.u1.push_back(static_cast<int>(v)); });
  u2.for_each([&](std::size_t v) { part.u2.push_back(static_cast<int>(v)); });
  for (int v = 1; v <= n; ++v)
    if (!u1.test(static_cast<std::size_t>(v)) && !u2.test(static_cast<std::size_t>(v)))
      part.vprime.push_back(v);
  out.partition = std::move(part);
  return out;
}

/// Re-checks the structural partition invariants; returns human-readable
/// violations (empty = all hold). Condition (c) is checked against the
/// given bounds; condition (d) against the protected part of Small.
inline std::vector<std::string> partition_violations(const Graph& g, const Partition& p,
                                                     const PartitionBounds& bounds) {
  std::vector<std::string> out;
  const int n = g.num_vertices();
  Bitset u1(static_cast<std::size_t>(n) + 1), u2(static_cast<std::size_t>(n) + 1),
      keyset(static_cast<std::size_t>(n) + 1);
  for (int v : p.u1) u1.set(static_cast<std::size_t>(v));
  for (int v : p.u2) u2.set(static_cast<std::size_t>(v));
  for (int v : p.keys) keyset.set(static_cast<std::size_t>(v));
  if (u1.intersects(u2)) out.push_back("U1 and U2 intersect");
  for (int k : p.keys) {
    if (u1.test(static_cast<std::size_t>(k)) || u2.test(static_cast<std::size_t>(k)))
      out.push_back("key " + std::to_string(k) + " inside a reservoir");
    for (int x : g.neighbors(k)) {
      if (u1.test(static_cast<std::size_t>(x)) || u2.test(static_cast<std::size_t>(x)))
        out.push_back("key neighbor " + std::to_string(x) + " inside a reservoir");
      if (keyset.test(static_cast<std::size_t>(x)))
        out.push_back("adjacent keys " + std::to_string(k) + "," + std::to_string(x));
    }
  }
  auto dc = degree_classes(g, p.small_threshold);
  Bitset kplus(static_cast<std::size_t>(n) + 1);
  for (int k : p.keys) {
    kplus.set(static_cast<std::size_t>(k));
    kplus |= g.row(k);
  }
  Bitset small_b(static_cast<std::size_t>(n) + 1);
  for (int v : dc.small) small_b.set(static_cast<std::size_t>(v));
  for (int v : dc.small) {
    if (keyset.test(static_cast<std::size_t>(v))) continue;
    // protected unless the closed neighborhood meets K ∪ N(K)
    bool conflicted = kplus.test(static_cast<std::size_t>(v)) ||
                      g.row(v).intersects(kplus);
    if (conflicted) continue;
    if (!u1.test(static_cast<std::size_t>(v)))
      out.push_back("Small vertex " + std::to_string(v) + " outside U1");
    for (int x : g.neighbors(v))
      if (!u1.test(static_cast<std::size_t>(x)))
        out.push_back("Small neighbor " + std::to_string(x) + " outside U1");
  }
  for (int v = 1; v <= n; ++v) {
    if (small_b.test(static_cast<std::size_t>(v)) || keyset.test(static_cast<std::size_t>(v)))
      continue;
    double du1 = degree_into(g, v, u1), du2 = degree_into(g, v, u2);
    double dvp = static_cast<double>(g.degree(v)) - du1 - du2;
    if (du1 < bounds.u_lo || du2 < bounds.u_lo || du1 > bounds.u_hi || du2 > bounds.u_hi ||
        dvp < bounds.vprime_lo)
      out.push_back("degree bounds fail at v=" + std::to_string(v));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Comb construction
// ---------------------------------------------------------------------------

struct Comb {
  std::vector<int> keys;                // x_1..x_t, the order used
  std::vector<int> attach;              // w_1..w_t
  std::vector<std::vector<int>> paths;  // P_i from attach[i] to attach[i+1]
  std::vector<int> vertices;            // X, sorted
};

struct CombOptions {
  long ell = 0;
  std::vector<Bigint> a_targets;  // a_1..a_{ell/2}
  int layer_cap = 0;              // >0: layer target = min(a_j, cap)
  bool strict_layers = false;     // paper semantics: undersized layer = failure
  int local_retries = 6;          // per-path seed-set redraws (desk)
};

struct CombResult {
  std::optional<Comb> comb;
  StageFailure failure;
  int fail_path = 0;   // i of the failing P_i
  int fail_layer = 0;  // j of the starved layer (0: seeds / meeting)
  std::size_t available = 0;
  bool ok() const { return comb.has_value(); }
};

/// Grows the equal-length paths P_1..P_{t-1} between consecutive key
/// attachments by layered expansion inside V': S-layers from w_i, T-layers
/// from w_{i+1}, meeting at depth ell/2 on both sides, then traced back
/// through predecessor links. Layer membership and all tie-breaks are by
/// smallest vertex index; the seed only enters through the choice of the
/// reserved seed sets Y_i, Z_i.
inline CombResult build_comb(const Graph& g, const Partition& part,
                             const CombOptions& opt, std::uint64_t seed) {
  CombResult out;
  const int n = g.num_vertices();
  const long ell = opt.ell;
  if (ell < 4 || ell % 2 != 0)
    throw parameter_error("build_comb: even ell >= 4 required");
  const int t = static_cast<int>(part.keys.size());
  if (t < 1) throw parameter_error("build_comb: at least one key required");

  Bitset in_vprime(static_cast<std::size_t>(n) + 1);
  for (int v : part.vprime) in_vprime.set(static_cast<std::size_t>(v));
  Bitset keyset(static_cast<std::size_t>(n) + 1);
  for (int k : part.keys) keyset.set(static_cast<std::size_t>(k));

  // attachments: smallest V'-neighbor of each key, distinct
  std::vector<int> attach;
  Bitset attach_b(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i < t; ++i) {
    int x = part.keys[static_cast<std::size_t>(i)];
    int w = 0;
    for (int c : g.neighbors(x))
      if (in_vprime.test(static_cast<std::size_t>(c)) &&
          !keyset.test(static_cast<std::size_t>(c)) &&
          !attach_b.test(static_cast<std::size_t>(c))) {
        w = c;
        break;
      }
    if (w == 0) {
      out.failure = {"comb", "no attachment vertex available for key " + std::to_string(x)};
      out.fail_path = i + 1;
      return out;
    }
    attach.push_back(w);
    attach_b.set(static_cast<std::size_t>(w));
  }

  // reserved pools: N'(w_i) minus keys and attachments, assigned disjointly
  std::vector<std::vector<int>> pool(static_cast<std::size_t>(t));
  Bitset reserved(static_cast<std::size_t>(n) + 1); // K ∪ Q ∪ all pools
  reserved |= keyset;
  reserved |= attach_b;
  for (int i = 0; i < t; ++i) {
    for (int c : g.neighbors(attach[static_cast<std::size_t>(i)]))
      if (in_vprime.test(static_cast<std::size_t>(c)) &&
          !reserved.test(static_cast<std::size_t>(c))) {
        pool[static_cast<std::size_t>(i)].push_back(c);
        reserved.set(static_cast<std::size_t>(c));
      }
  }

  const long half = ell / 2;
  auto target_of = [&](long j) -> std::size_t {
    // a_targets is 1-based conceptually: a_targets[j-1] = a_j
    Bigint a = (j - 1 < static_cast<long>(opt.a_targets.size()))
                   ? opt.a_targets[static_cast<std::size_t>(j - 1)]
                   : Bigint(n);
    if (a > n) a = n;
    std::size_t tgt = static_cast<std::size_t>(a.convert_to<long>());
    if (opt.layer_cap > 0) tgt = std::min(tgt, static_cast<std::size_t>(opt.layer_cap));
    if (tgt < 1) tgt = 1;
    return tgt;
  };

  Bitset used(static_cast<std::size_t>(n) + 1); // vertices of committed paths
  std::vector<std::vector<int>> paths;

  std::vector<int> parent(static_cast<std::size_t>(n) + 1, 0);
  std::vector<int> parent_t(static_cast<std::size_t>(n) + 1, 0);

  // consumed pool members (path endpoints' first steps)
  Bitset pool_used(static_cast<std::size_t>(n) + 1);

  for (int i = 0; i + 1 < t; ++i) {
    const int wi = attach[static_cast<std::size_t>(i)];
    const int wn = attach[static_cast<std::size_t>(i + 1)];
    bool built = false;

    for (int attempt = 0; attempt <= opt.local_retries && !built; ++attempt) {
      // draw Y_i from pool[i], Z_{i+1} from pool[i+1]
      const std::size_t a2 = (half >= 2) ? target_of(2) : 1;
      auto draw = [&](int pi, bool front_half) {
        std::vector<int> avail;
        for (int v : pool[static_cast<std::size_t>(pi)])
          if (!pool_used.test(static_cast<std::size_t>(v)) &&
              !used.test(static_cast<std::size_t>(v)))
            avail.push_back(v);
        Rng rng(derive_seed(seed, front_half ? "Y" : "Z",
                            (static_cast<std::uint64_t>(i) << 20) ^
                                (static_cast<std::uint64_t>(pi) << 4) ^
                                static_cast<std::uint64_t>(attempt)));
        rng.shuffle(avail);
        // leave room for the other half of this pool
        std::size_t take = std::min<std::size_t>(a2, (avail.size() + 1) / 2);
        if (opt.strict_layers) take = a2;
        if (take > avail.size()) take = avail.size();
        avail.resize(take);
        std::sort(avail.begin(), avail.end());
        return avail;
      };
      std::vector<int> ys = draw(i, true);
      std::vector<int> zs = draw(i + 1, false);
      // the two pools can intersect at desk scale; keep them disjoint
      {
        Bitset yb(static_cast<std::size_t>(n) + 1);
        for (int v : ys) yb.set(static_cast<std::size_t>(v));
        std::vector<int> zs2;
        for (int v : zs)
          if (!yb.test(static_cast<std::size_t>(v))) zs2.push_back(v);
        zs = std::move(zs2);
      }
      if (ys.empty() || zs.empty()) {
        out.fail_path = i + 1;
        out.fail_layer = 0;
        out.available = ys.size() + zs.size();
        continue; // retry with a fresh draw
      }
      if (opt.strict_layers && (ys.size() < a2 || zs.size() < a2)) {
        out.fail_path = i + 1;
        out.fail_layer = 2;
        out.available = std::min(ys.size(), zs.size());
        break;
      }

      // layered growth
      Bitset cur(static_cast<std::size_t>(n) + 1); // S/T members of this path
      std::vector<int> s_layer = ys, t_layer = zs;
      for (int v : ys) {
        parent[static_cast<std::size_t>(v)] = wi;
        cur.set(static_cast<std::size_t>(v));
      }
      for (int v : zs) {
        parent_t[static_cast<std::size_t>(v)] = wn;
        cur.set(static_cast<std::size_t>(v));
      }

      auto eligible = [&](int v) {
        return in_vprime.test(static_cast<std::size_t>(v)) &&
               !reserved.test(static_cast<std::size_t>(v)) &&
               !used.test(static_cast<std::size_t>(v)) &&
               !cur.test(static_cast<std::size_t>(v));
      };

      bool starved = false;
      for (long j = 3; j <= half && !starved; ++j) {
        const std::size_t tgt = target_of(j);
        auto grow = [&](const std::vector<int>& prev, std::vector<int>& parents_arr,
                        bool is_s) -> std::vector<int> {
          std::vector<int> next;
          for (int u : prev)
            for (int x : g.neighbors(u))
              if (eligible(x)) {
                next.push_back(x);
                parents_arr[static_cast<std::size_t>(x)] = u;
                cur.set(static_cast<std::size_t>(x)); // also dedups collection
              }
          std::sort(next.begin(), next.end());
          if (next.size() > tgt) {
            for (std::size_t idx = tgt; idx < next.size(); ++idx)
              cur.reset(static_cast<std::size_t>(next[idx]));
            next.resize(tgt);
          }
          (void)is_s;
          return next;
        };
        s_layer = grow(s_layer, parent, true);
        if (s_layer.empty() || (opt.strict_layers && s_layer.size() < tgt)) {
          out.fail_path = i + 1;
          out.fail_layer = static_cast<int>(j);
          out.available = s_layer.size();
          starved = true;
          break;
        }
        t_layer = grow(t_layer, parent_t, false);
        if (t_layer.empty() || (opt.strict_layers && t_layer.size() < tgt)) {
          out.fail_path = i + 1;
          out.fail_layer = static_cast<int>(j);
          out.available = t_layer.size();
          starved = true;
          break;
        }
      }
      if (starved) {
        if (opt.strict_layers) break;
        continue; // local retry
      }

      // meeting vertex: adjacent to both top layers, not itself used
      Bitset s_top(static_cast<std::size_t>(n) + 1), t_top(static_cast<std::size_t>(n) + 1);
      for (int v : s_layer) s_top.set(static_cast<std::size_t>(v));
      for (int v : t_layer) t_top.set(static_cast<std::size_t>(v));
      int meet = 0, ms = 0, mt = 0;
      for (int v = 1; v <= n && meet == 0; ++v) {
        if (!eligible(v)) continue;
        if (!g.row(v).intersects(s_top) || !g.row(v).intersects(t_top)) continue;
        for (int c : g.neighbors(v)) {
          if (ms == 0 && s_top.test(static_cast<std::size_t>(c))) ms = c;
          if (mt == 0 && c != ms && t_top.test(static_cast<std::size_t>(c))) mt = c;
        }
        if (ms != 0 && mt != 0) meet = v;
        else { ms = mt = 0; }
      }
      if (meet == 0) {
        out.fail_path = i + 1;
        out.fail_layer = static_cast<int>(half) + 1;
        out.available = 0;
        if (opt.strict_layers) break;
        continue; // local retry
      }

      // trace: wi <- ... <- ms, meet, mt -> ... -> wn
      std::vector<int> left;
      for (int c = ms; c != wi; c = parent[static_cast<std::size_t>(c)]) left.push_back(c);
      left.push_back(wi);
      std::reverse(left.begin(), left.end()); // wi .. ms
      std::vector<int> right;
      for (int c = mt; c != wn; c = parent_t[static_cast<std::size_t>(c)]) right.push_back(c);
      right.push_back(wn); // mt .. wn
      std::vector<int> path = left;
      path.push_back(meet);
      path.insert(path.end(), right.begin(), right.end());
      if (static_cast<long>(path.size()) != ell + 1) {
        out.failure = {"comb", "internal: traced path has wrong length"};
        out.fail_path = i + 1;
        return out;
      }
      for (std::size_t pi = 1; pi + 1 < path.size(); ++pi)
        used.set(static_cast<std::size_t>(path[pi]));
      pool_used.set(static_cast<std::size_t>(path[1]));
      pool_used.set(static_cast<std::size_t>(path[path.size() - 2]));
      paths.push_back(std::move(path));
      built = true;
    }
    if (!built) {
      if (out.failure.stage.empty())
        out.failure = {"comb", "path " + std::to_string(out.fail_path) + " starved at layer " +
                                   std::to_string(out.fail_layer) + " (available " +
                                   std::to_string(out.available) + ")"};
      return out;
    }
  }

  Comb comb;
  comb.keys = part.keys;
  comb.attach = attach;
  comb.paths = std::move(paths);
  comb.vertices = comb.keys;
  comb.vertices.insert(comb.vertices.end(), attach.begin(), attach.end());
  for (const auto& p : comb.paths)
    for (std::size_t pi = 1; pi + 1 < p.size(); ++pi) comb.vertices.push_back(p[pi]);
  std::sort(comb.vertices.begin(), comb.vertices.end());
  comb.vertices.erase(std::unique(comb.vertices.begin(), comb.vertices.end()),
                      comb.vertices.end());
  out.comb = std::move(comb);
  return out;
}

/// Structural audit of a Comb value against its partition: path lengths,
/// endpoints, edges present, V' containment, and the pairwise intersection
/// rules. Returns violations (empty = valid).
inline std::vector<std::string> comb_violations(const Graph& g, const Partition& part,
                                                const Comb& comb, long ell) {
  std::vector<std::string> out;
  const int t = static_cast<int>(comb.keys.size());
  Bitset in_vprime(static_cast<std::size_t>(g.num_vertices()) + 1);
  for (int v : part.vprime) in_vprime.set(static_cast<std::size_t>(v));
  if (static_cast<int>(comb.attach.size()) != t) out.push_back("attachment count");
  for (int i = 0; i < t; ++i) {
    if (!g.has_edge(comb.keys[static_cast<std::size_t>(i)], comb.attach[static_cast<std::size_t>(i)]))
      out.push_back("key-attachment edge missing at i=" + std::to_string(i + 1));
    if (!in_vprime.test(static_cast<std::size_t>(comb.attach[static_cast<std::size_t>(i)])))
      out.push_back("attachment outside V'");
  }
  if (static_cast<int>(comb.paths.size()) != std::max(0, t - 1)) out.push_back("path count");
  for (std::size_t i = 0; i < comb.paths.size(); ++i) {
    const auto& p = comb.paths[i];
    if (static_cast<long>(p.size()) != ell + 1)
      out.push_back("path " + std::to_string(i + 1) + " length");
    if (p.front() != comb.attach[i] || p.back() != comb.attach[i + 1])
      out.push_back("path " + std::to_string(i + 1) + " endpoints");
    for (std::size_t j = 0; j + 1 < p.size(); ++j)
      if (!g.has_edge(p[j], p[j + 1]))
        out.push_back("path " + std::to_string(i + 1) + " edge missing");
    for (int v : p)
      if (!in_vprime.test(static_cast<std::size_t>(v)))
        out.push_back("path " + std::to_string(i + 1) + " leaves V'");
  }
  for (std::size_t i = 0; i < comb.paths.size(); ++i)
    for (std::size_t j = i + 1; j < comb.paths.size(); ++j) {
      std::vector<int> a = comb.paths[i], b = comb.paths[j], inter;
      std::sort(a.begin(), a.end());
      std::sort(b.begin(), b.end());
      std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                            std::back_inserter(inter));
      if (j == i + 1) {
        if (inter.size() != 1 || inter[0] != comb.attach[i + 1])
          out.push_back("paths " + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                        " must share exactly the common attachment");
      } else if (!inter.empty()) {
        out.push_back("paths " + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                      " intersect");
      }
    }
  return out;
}

// ---------------------------------------------------------------------------
// Chain closure and the embedding certificate
// ---------------------------------------------------------------------------

struct Embedding {
  KeyChainParams params;
  std::vector<int> phi; // phi[i-1] = host vertex for template vertex i
};

struct CloseOptions {
  int d0 = -1;
  int degree_floor = 3;  // repair target; hard failures only at floor 0
  int repair_passes = 60;
};

struct CloseResult {
  std::optional<Embedding> embedding;
  StageFailure failure;
  bool ok() const { return embedding.has_value(); }
};

/// Closes the comb into a full KeyChain: splits the remaining V' vertices
/// into two halves seeded by a BFS from the first attachment's outside
/// neighbor, repairs the split so every vertex keeps internal degree,
/// finds Hamilton paths with many endpoints on both W_i, bridges them, and
/// assembles the explicit vertex map.
inline CloseResult close_chain(const Graph& g, const Partition& part, const Comb& comb,
                               const KeyChainParams& params, std::uint64_t seed,
                               const CloseOptions& opt = {}) {
  CloseResult out;
  const int n = g.num_vertices();
  const int t = static_cast<int>(comb.keys.size());

  Bitset in_x(static_cast<std::size_t>(n) + 1);
  for (int v : comb.vertices) in_x.set(static_cast<std::size_t>(v));
  if (comb.vertices.size() * 2 > static_cast<std::size_t>(n)) {
    out.failure = {"closure", "comb covers more than n/2 vertices"};
    return out;
  }

  Bitset in_u1(static_cast<std::size_t>(n) + 1), in_u2(static_cast<std::size_t>(n) + 1);
  for (int v : part.u1) in_u1.set(static_cast<std::size_t>(v));
  for (int v : part.u2) in_u2.set(static_cast<std::size_t>(v));

  std::vector<int> vpp; // V' \ X
  Bitset in_vpp(static_cast<std::size_t>(n) + 1);
  for (int v : part.vprime)
    if (!in_x.test(static_cast<std::size_t>(v))) {
      vpp.push_back(v);
      in_vpp.set(static_cast<std::size_t>(v));
    }

  const int w1 = comb.attach.front();
  const int wt = comb.attach.back();

  // z1: an outside neighbor of w1, not in U2 (it must live in W1)
  auto seeded_order = [&](const std::vector<int>& cand, const char* tag) {
    std::vector<int> v = cand;
    std::uint64_t h = derive_seed(seed, tag);
    std::sort(v.begin(), v.end(), [&](int a, int b) {
      return std::make_pair(mix64(h ^ static_cast<std::uint64_t>(a)), a) <
             std::make_pair(mix64(h ^ static_cast<std::uint64_t>(b)), b);
    });
    return v;
  };
  std::vector<int> z1cand;
  for (int c : g.neighbors(w1))
    if (!in_x.test(static_cast<std::size_t>(c)) && !in_u2.test(static_cast<std::size_t>(c)))
      z1cand.push_back(c);
  z1cand = seeded_order(z1cand, "z1");
  if (z1cand.empty()) {
    out.failure = {"closure", "no available neighbor z1 of the first attachment"};
    return out;
  }
  const int z1 = z1cand.front();

  // Split V'' by cutting a long rotation-extension path through G - X at
  // its half point (counting V'' members). Both halves inherit a path
  // backbone, which keeps them Hamilton-pathable on sparse hosts; vertices
  // off the backbone are attached to the side holding more of their
  // neighbors. Reservoir vertices traverse the backbone but their side is
  // fixed by their reservoir.
  std::vector<int> side(static_cast<std::size_t>(n) + 1, 0); // 1 or 2 for vpp members
  {
    // Greedy path cover of G - X, starting at z1: the concatenated segments
    // form the spine, so each half receives as few path fragments as
    // possible.
    std::vector<int> spine;
    {
      Bitset left(static_cast<std::size_t>(n) + 1);
      std::size_t left_count = 0;
      for (int v = 1; v <= n; ++v)
        if (!in_x.test(static_cast<std::size_t>(v))) {
          left.set(static_cast<std::size_t>(v));
          ++left_count;
        }
      int start = z1;
      while (left_count > 0) {
        std::vector<int> rem;
        rem.reserve(left_count);
        left.for_each([&](std::size_t v) { rem.push_back(static_cast<int>(v)); });
        std::vector<int> seg = posa_long_path(g, rem, start);
        for (int v : seg) {
          left.reset(static_cast<std::size_t>(v));
          --left_count;
        }
        spine.insert(spine.end(), seg.begin(), seg.end());
        if (left_count == 0) break;
        // next segment starts at the smallest remaining vertex
        start = 0;
        left.for_each([&](std::size_t v) {
          if (start == 0) start = static_cast<int>(v);
        });
      }
    }

    const std::size_t target1 = (vpp.size() + 1) / 2;
    // prefix counts of V'' members along the spine
    std::size_t vpp_on_spine = 0;
    std::size_t z1_rank = 0; // V'' members seen up to and including z1
    bool z1_seen = false;
    for (int v : spine) {
      if (in_vpp.test(static_cast<std::size_t>(v))) ++vpp_on_spine;
      if (v == z1) {
        z1_rank = vpp_on_spine;
        z1_seen = true;
      }
    }
    // orient the spine so that z1 falls in the first half
    if (z1_seen && z1_rank > target1 && vpp_on_spine >= target1)
      std::reverse(spine.begin(), spine.end());

    std::size_t assigned1 = 0;
    for (int v : spine) {
      if (!in_vpp.test(static_cast<std::size_t>(v))) continue;
      if (assigned1 < target1) {
        side[static_cast<std::size_t>(v)] = 1;
        ++assigned1;
      } else {
        side[static_cast<std::size_t>(v)] = 2;
      }
    }
    // off-spine vertices: side holding more neighbors, deficit side on ties
    Bitset s1(static_cast<std::size_t>(n) + 1), s2(static_cast<std::size_t>(n) + 1);
    for (int v : vpp) {
      if (side[static_cast<std::size_t>(v)] == 1) s1.set(static_cast<std::size_t>(v));
      if (side[static_cast<std::size_t>(v)] == 2) s2.set(static_cast<std::size_t>(v));
    }
    for (int v : part.u1) s1.set(static_cast<std::size_t>(v));
    for (int v : part.u2) s2.set(static_cast<std::size_t>(v));
    std::size_t assigned2 = vpp_on_spine - std::min(vpp_on_spine, target1);
    for (int v : vpp) {
      if (side[static_cast<std::size_t>(v)] != 0) continue;
      int d1 = degree_into(g, v, s1);
      int d2 = degree_into(g, v, s2);
      int pick;
      if (d1 != d2) pick = (d1 > d2) ? 1 : 2;
      else pick = (assigned1 <= assigned2) ? 1 : 2;
      side[static_cast<std::size_t>(v)] = pick;
      (pick == 1 ? s1 : s2).set(static_cast<std::size_t>(v));
      (pick == 1 ? assigned1 : assigned2) += 1;
    }
  }

  Bitset in_w1(static_cast<std::size_t>(n) + 1), in_w2(static_cast<std::size_t>(n) + 1);
  auto rebuild_sides = [&]() {
    in_w1.clear();
    in_w2.clear();
    for (int v : vpp)
      (side[static_cast<std::size_t>(v)] == 1 ? in_w1 : in_w2)
          .set(static_cast<std::size_t>(v));
    for (int v : part.u1) in_w1.set(static_cast<std::size_t>(v));
    for (int v : part.u2) in_w2.set(static_cast<std::size_t>(v));
  };
  rebuild_sides();

  // repair: every W-member should keep at least `floor` neighbors on its own
  // side; movable vertices are the V'' ones (z1 stays on side 1)
  {
    const int floor_tgt = std::max(1, opt.degree_floor);
    const std::ptrdiff_t slack = std::max<std::ptrdiff_t>(
        2, static_cast<std::ptrdiff_t>(vpp.size() / 12));
    std::ptrdiff_t drift = 0; // (side1 size) - target1, relative to initial
    for (int pass = 0; pass < opt.repair_passes; ++pass) {
      bool moved = false;
      for (int v : vpp) {
        if (v == z1) continue;
        int own_side = side[static_cast<std::size_t>(v)];
        const Bitset& own = (own_side == 1) ? in_w1 : in_w2;
        const Bitset& oth = (own_side == 1) ? in_w2 : in_w1;
        int d_own = degree_into(g, v, own);
        if (d_own >= floor_tgt) continue;
        int d_oth = degree_into(g, v, oth);
        if (d_oth <= d_own) continue;
        std::ptrdiff_t new_drift = drift + ((own_side == 1) ? -1 : +1);
        if (new_drift > slack || new_drift < -slack) continue;
        side[static_cast<std::size_t>(v)] = 3 - own_side;
        drift = new_drift;
        rebuild_sides();
        moved = true;
      }
      if (!moved) break;
    }
  }

  // hard feasibility: nobody may be isolated inside its side
  for (int v = 1; v <= n; ++v) {
    if (in_x.test(static_cast<std::size_t>(v))) continue;
    const Bitset& own = in_w1.test(static_cast<std::size_t>(v)) ? in_w1 : in_w2;
    if (degree_into(g, v, own) == 0) {
      out.failure = {"closure",
                     "vertex " + std::to_string(v) + " isolated inside its half"};
      return out;
    }
  }

  std::vector<int> w1_set, w2_set;
  in_w1.for_each([&](std::size_t v) { w1_set.push_back(static_cast<int>(v)); });
  in_w2.for_each([&](std::size_t v) { w2_set.push_back(static_cast<int>(v)); });
  if (w1_set.size() < 3 || w2_set.size() < 3) {
    out.failure = {"closure", "degenerate half sizes"};
    return out;
  }

  // z2: neighbor of w_t inside W2
  std::vector<int> z2cand;
  for (int c : g.neighbors(wt))
    if (in_w2.test(static_cast<std::size_t>(c))) z2cand.push_back(c);
  z2cand = seeded_order(z2cand, "z2");
  if (z2cand.empty()) {
    out.failure = {"closure", "no available neighbor z2 of the last attachment"};
    return out;
  }
  const int z2 = z2cand.front();

  auto r1 = hamilton_path_endpoints(g, w1_set, z1, derive_seed(seed, "ham-w1"), opt.d0);
  if (!r1.success) {
    out.failure = {"closure", "no Hamilton path on W1 (" + r1.failure.stage + ", longest " +
                                  std::to_string(r1.failure.longest_path_len) + ")"};
    return out;
  }
  auto r2 = hamilton_path_endpoints(g, w2_set, z2, derive_seed(seed, "ham-w2"), opt.d0);
  if (!r2.success) {
    out.failure = {"closure", "no Hamilton path on W2 (" + r2.failure.stage + ", longest " +
                                  std::to_string(r2.failure.longest_path_len) + ")"};
    return out;
  }

  // bridge between the endpoint sets
  Bitset r2b(static_cast<std::size_t>(n) + 1);
  for (int y : r2.endpoints) r2b.set(static_cast<std::size_t>(y));
  int y1 = 0, y2 = 0;
  for (int cand : r1.endpoints) {
    if (g.row(cand).intersects(r2b)) {
      y1 = cand;
      for (int c : g.neighbors(cand))
        if (r2b.test(static_cast<std::size_t>(c))) {
          y2 = c;
          break;
        }
      break;
    }
  }
  if (y1 == 0) {
    out.failure = {"closure", "no edge between the endpoint sets R1, R2"};
    return out;
  }

  const std::vector<int>* q1 = r1.path_of(y1);
  const std::vector<int>* q2 = r2.path_of(y2);
  if (q1 == nullptr || q2 == nullptr) {
    out.failure = {"closure", "internal: endpoint witness missing"};
    return out;
  }

  // host cycle: w1, P_1 internals, w2, ..., wt, z2..y2, y1..z1(, w1)
  std::vector<int> cycle;
  cycle.push_back(w1);
  for (int i = 0; i + 1 < t; ++i) {
    const auto& p = comb.paths[static_cast<std::size_t>(i)];
    for (std::size_t j = 1; j < p.size(); ++j) cycle.push_back(p[j]);
  }
  for (int v : *q2) cycle.push_back(v);                      // z2 .. y2
  for (auto it = q1->rbegin(); it != q1->rend(); ++it) cycle.push_back(*it); // y1 .. z1

  const int m_cycle = params.n_int() - static_cast<int>(params.t);
  if (static_cast<int>(cycle.size()) != m_cycle) {
    out.failure = {"closure", "internal: assembled cycle has wrong length"};
    return out;
  }

  // vertex map: w1 sits at template cycle position ell
  Embedding emb;
  emb.params = params;
  emb.phi.assign(static_cast<std::size_t>(params.n_int()), 0);
  const long ell = params.ell;
  for (int kpos = 0; kpos < m_cycle; ++kpos) {
    long tpos = ((ell - 1 + kpos) % m_cycle) + 1;
    emb.phi[static_cast<std::size_t>(tpos - 1)] = cycle[static_cast<std::size_t>(kpos)];
  }
  for (int i = 1; i <= t; ++i)
    emb.phi[static_cast<std::size_t>(m_cycle + i - 1)] =
        comb.keys[static_cast<std::size_t>(i - 1)];
  out.embedding = std::move(emb);
  return out;
}

// ---------------------------------------------------------------------------
// Verification (authoritative certificate check)
// ---------------------------------------------------------------------------

struct VerifyResult {
  bool ok = false;
  std::string diagnosis;
};

/// Independently re-derives the template edge set from the parameters and
/// checks that phi is a spanning injection carrying every template edge to
/// a host edge. Shares no code with the builders.
inline VerifyResult verify_embedding(const Graph& g, const Embedding& e) {
  VerifyResult r;
  long long n = 0, t = e.params.t, ell = e.params.ell;
  try {
    e.params.validate();
  } catch (const error& err) {
    r.diagnosis = err.what();
    return r;
  }
  if (e.params.n > std::numeric_limits<int>::max()) {
    r.diagnosis = "parameters too large for a concrete host";
    return r;
  }
  n = e.params.n.convert_to<long long>();
  if (g.num_vertices() != static_cast<int>(n)) {
    r.diagnosis = "host order differs from template order";
    return r;
  }
  if (static_cast<long long>(e.phi.size()) != n) {
    r.diagnosis = "phi size mismatch";
    return r;
  }
  std::vector<char> hit(static_cast<std::size_t>(n) + 1, 0);
  for (int hv : e.phi) {
    if (hv < 1 || hv > n) {
      r.diagnosis = "phi maps outside the host vertex set";
      return r;
    }
    if (hit[static_cast<std::size_t>(hv)]) {
      r.diagnosis = "phi not injective at host vertex " + std::to_string(hv);
      return r;
    }
    hit[static_cast<std::size_t>(hv)] = 1;
  }
  auto image_edge = [&](long long a, long long b) -> bool {
    return g.has_edge(e.phi[static_cast<std::size_t>(a - 1)],
                      e.phi[static_cast<std::size_t>(b - 1)]);
  };
  const long long cyc = n - t;
  for (long long i = 1; i <= cyc - 1; ++i)
    if (!image_edge(i, i + 1)) {
      r.diagnosis = "missing host edge for template cycle edge {" + std::to_string(i) +
                    "," + std::to_string(i + 1) + "}";
      return r;
    }
  if (!image_edge(cyc, 1)) {
    r.diagnosis = "missing host edge for template cycle edge {" + std::to_string(cyc) + ",1}";
    return r;
  }
  for (long long i = 1; i <= t; ++i)
    if (!image_edge(i * ell, cyc + i)) {
      r.diagnosis = "missing host edge for template key edge {" +
                    std::to_string(i * ell) + "," + std::to_string(cyc + i) + "}";
      return r;
    }
  r.ok = true;
  return r;
}

// ---------------------------------------------------------------------------
// Pipeline orchestration
// ---------------------------------------------------------------------------

struct EmbedConfig {
  Profile profile = Profile::desk;
  double gamma = 0.01;
  double growth = 2.0; // desk growth factor
  KeyStrategy strategy = KeyStrategy::lowest_degree;
  std::uint64_t seed = 0;

  std::optional<long> t_override;
  std::optional<long> ell_override;
  int small_threshold = -2; // -2: auto; -1: paper default; >=0: explicit

  int partition_attempts = 6;
  int comb_attempts = 6;
  int closure_attempts = 8;
  int max_resamples = 100;
  int comb_local_retries = 6;
  int layer_cap = 0; // 0: auto (desk); -1: uncapped
  int d0 = -1;
  int degree_floor = 3;
  int repair_passes = 60;
};

struct StageTrace {
  std::string stage;
  int attempt = 0;
  bool ok = false;
  std::string failure;
  double ms = 0.0;
};

struct PipelineTrace {
  bool success = false;
  std::string outcome; // terse summary of the run
  int attempts = 0;
  std::vector<StageTrace> stages;
};

struct EmbedResult {
  std::optional<Embedding> embedding;
  PipelineTrace trace;
  bool ok() const { return embedding.has_value(); }
};

namespace detail {

/// Auto Small threshold: the largest tau in {0..3} whose protected set
/// Small ∪ N(Small) stays below n/3 (protection must not swallow V').
inline int auto_small_threshold(const Graph& g) {
  const int n = g.num_vertices();
  int best = 0;
  for (int tau = 0; tau <= 3; ++tau) {
    auto dc = degree_classes(g, tau);
    auto nb = neighborhood(g, dc.small);
    std::size_t closed = dc.small.size() + nb.size();
    if (closed <= static_cast<std::size_t>(n) / 3) best = tau;
  }
  return best;
}

} // namespace detail

/// The end-to-end pipeline: keys -> partition -> comb -> closure, with
/// per-stage retries on derived seeds. Success output always passes
/// verify_embedding; failures carry the full stage trace.
inline EmbedResult embed_keychain(const Graph& g, const EmbedConfig& cfg) {
  using clock = std::chrono::steady_clock;
  EmbedResult out;
  auto& trace = out.trace;
  const int n = g.num_vertices();

  auto stamp = [](clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(clock::now() - t0).count();
  };
  auto push_stage = [&](const std::string& st, int attempt, bool ok,
                        const std::string& why, double ms) {
    trace.stages.push_back({st, attempt, ok, why, ms});
  };

  // parameters
  KeyChainParams params;
  std::vector<Bigint> a_targets;
  try {
    if (cfg.t_override && cfg.ell_override) {
      params.n = n;
      params.t = *cfg.t_override;
      params.ell = *cfg.ell_override;
      params.validate();
      if (params.ell % 2 != 0)
        throw parameter_error("embed_keychain: pipeline requires even ell");
      double gr = (cfg.profile == Profile::paper)
                      ? std::log(static_cast<double>(n)) / 100.0
                      : (cfg.growth > 0 ? cfg.growth
                                        : std::max(std::log(static_cast<double>(n)) / 100.0, 2.0));
      a_targets = growth_targets(gr, params.ell / 2);
    } else {
      ParamOptions popt;
      popt.profile = cfg.profile;
      popt.growth = cfg.growth;
      params = compute_parameters(Bigint(n), popt);
      a_targets = params.a_seq;
    }
    if (params.t < 1)
      throw parameter_error("embed_keychain: pipeline requires t >= 1");
  } catch (const error& e) {
    trace.outcome = std::string("parameters: ") + e.what();
    push_stage("parameters", 0, false, e.what(), 0.0);
    return out;
  }

  // keys
  std::vector<int> keys;
  {
    auto t0 = clock::now();
    try {
      keys = select_keys(g, static_cast<int>(params.t), cfg.strategy);
      push_stage("keys", 0, true, "", stamp(t0));
    } catch (const error& e) {
      push_stage("keys", 0, false, e.what(), stamp(t0));
      trace.outcome = std::string("keys: ") + e.what();
      return out;
    }
  }

  int small_threshold = cfg.small_threshold;
  if (small_threshold == -2) small_threshold = detail::auto_small_threshold(g);
  else if (small_threshold == -1) small_threshold = default_small_threshold(n);

  PartitionBounds bounds = (cfg.profile == Profile::paper)
                               ? PartitionBounds::paper_bounds(n, cfg.gamma)
                               : PartitionBounds::desk_bounds(n, cfg.gamma);
  CombOptions copt;
  copt.ell = params.ell;
  copt.a_targets = a_targets;
  copt.strict_layers = (cfg.profile == Profile::paper);
  copt.local_retries = cfg.comb_local_retries;
  if (cfg.layer_cap > 0) copt.layer_cap = cfg.layer_cap;
  else if (cfg.layer_cap == 0 && cfg.profile == Profile::desk)
    copt.layer_cap = std::max<int>(2, n / static_cast<int>(4 * params.ell));

  CloseOptions zopt;
  zopt.d0 = cfg.d0;
  zopt.degree_floor = cfg.degree_floor;
  zopt.repair_passes = cfg.repair_passes;

  std::string last_failure = "no attempts made";
  for (int pa = 0; pa < cfg.partition_attempts; ++pa) {
    auto t0 = clock::now();
    PartitionResult pr;
    try {
      pr = partition_vertices(g, keys, cfg.gamma,
                              derive_seed(cfg.seed, "partition", static_cast<std::uint64_t>(pa)),
                              cfg.max_resamples, small_threshold, bounds);
    } catch (const error& e) {
      push_stage("partition", pa, false, e.what(), stamp(t0));
      trace.outcome = std::string("partition: ") + e.what();
      return out; // parameter-level problem; retrying cannot help
    }
    ++trace.attempts;
    push_stage("partition", pa, pr.ok(), pr.ok() ? "" : pr.failure.reason, stamp(t0));
    if (!pr.ok()) {
      last_failure = "partition: " + pr.failure.reason;
      continue;
    }
    const Partition& part = *pr.partition;

    for (int ca = 0; ca < cfg.comb_attempts; ++ca) {
      auto t1 = clock::now();
      CombResult cr = build_comb(
          g, part, copt,
          derive_seed(cfg.seed, "comb",
                      static_cast<std::uint64_t>(pa) * 1000 + static_cast<std::uint64_t>(ca)));
      push_stage("comb", ca, cr.ok(), cr.ok() ? "" : cr.failure.reason, stamp(t1));
      if (!cr.ok()) {
        last_failure = "comb: " + cr.failure.reason;
        continue;
      }
      const Comb& comb = *cr.comb;

      for (int za = 0; za < cfg.closure_attempts; ++za) {
        auto t2 = clock::now();
        CloseResult zr =
            close_chain(g, part, comb, params,
                        derive_seed(cfg.seed, "closure",
                                    (static_cast<std::uint64_t>(pa) * 1000 +
                                     static_cast<std::uint64_t>(ca)) *
                                            1000 +
                                        static_cast<std::uint64_t>(za)),
                        zopt);
        bool verified = false;
        std::string why = zr.ok() ? "" : zr.failure.reason;
        if (zr.ok()) {
          auto vr = verify_embedding(g, *zr.embedding);
          verified = vr.ok;
          if (!vr.ok) why = "verification failed: " + vr.diagnosis;
        }
        push_stage("closure", za, verified, why, stamp(t2));
        if (verified) {
          trace.success = true;
          trace.outcome = "embedded";
          out.embedding = std::move(zr.embedding);
          return out;
        }
        last_failure = "closure: " + why;
      }
    }
  }
  trace.outcome = last_failure;
  return out;
}

} // namespace kc
