#pragma once

#include <cmath>
#include <cstdint>

#include "kc/errors.hpp"
#include "kc/graph.hpp"
#include "kc/rng.hpp"

namespace kc {

/// G(n,p): every one of the C(n,2) pairs is an edge independently with
/// probability p. Deterministic for fixed (n, p, seed); pairs are drawn in
/// lexicographic order so the edge set is a pure function of the seed.
inline Graph sample_gnp(int n, double p, std::uint64_t seed) {
  if (n < 1) throw parameter_error("sample_gnp: n must be >= 1");
  if (!(p >= 0.0 && p <= 1.0))
    throw parameter_error("sample_gnp: probability must lie in [0,1]");
  Graph g(n);
  Rng rng(seed);
  for (int u = 1; u <= n; ++u)
    for (int v = u + 1; v <= n; ++v)
      if (rng.bernoulli(p)) g.add_edge(u, v);
  return g;
}

/// The paper-natural parametrization p = (ln n + c)/n, clamped to [0,1].
inline double p_from_offset(int n, double c) {
  if (n < 1) throw parameter_error("p_from_offset: n must be >= 1");
  double p = (std::log(static_cast<double>(n)) + c) / static_cast<double>(n);
  if (p < 0.0) p = 0.0;
  if (p > 1.0) p = 1.0;
  return p;
}

} // namespace kc
