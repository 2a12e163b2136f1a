#pragma once

#include "kc/errors.hpp"
#include "kc/graph.hpp"
#include "kc/params.hpp"

namespace kc {

/// The KeyChain KC(n,t,ell): a cycle on vertices 1..n-t plus t pendant
/// "keys" n-t+1..n, key i attached at cycle vertex i*ell. Edge set:
///   {i,i+1} for i in [n-t-1],  {n-t,1},  {i*ell, n-t+i} for i in [t].
inline Graph keychain_template(const KeyChainParams& p) {
  p.validate();
  const int n = p.n_int();
  const int t = static_cast<int>(p.t);
  const int ell = static_cast<int>(p.ell);
  const int cycle_len = n - t;

  Graph g(n);
  for (int i = 1; i <= cycle_len - 1; ++i) g.add_edge(i, i + 1);
  g.add_edge(1, cycle_len); // {n-t, 1}
  for (int i = 1; i <= t; ++i) g.add_edge(i * ell, cycle_len + i);
  return g;
}

inline Graph keychain_template(int n, int t, int ell) {
  KeyChainParams p;
  p.n = n;
  p.t = t;
  p.ell = ell;
  return keychain_template(p);
}

} // namespace kc
