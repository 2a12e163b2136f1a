#pragma once

#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "kc/errors.hpp"
#include "kc/graph.hpp"

namespace kc {

/// Edge-list text format: first line "n m", then m lines "u v" with
/// 1 <= u < v <= n, whitespace-separated, LF-terminated.
inline void serialize_graph(const Graph& g, std::ostream& os) {
  os << g.num_vertices() << ' ' << g.num_edges() << '\n';
  for (auto [u, v] : g.edges()) os << u << ' ' << v << '\n';
}

inline std::string serialize_graph(const Graph& g) {
  std::ostringstream os;
  serialize_graph(g, os);
  return os.str();
}

inline Graph parse_graph(std::istream& is) {
  std::string line;
  int lineno = 0;

  auto next_line = [&]() -> bool {
    while (std::getline(is, line)) {
      ++lineno;
      // skip blank lines
      if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    ++lineno;
    return false;
  };

  if (!next_line()) throw parse_error("missing header", lineno);

  long long n = 0, m = 0;
  {
    std::istringstream ls(line);
    std::string extra;
    if (!(ls >> n >> m) || (ls >> extra))
      throw parse_error("expected header \"n m\"", lineno);
  }
  if (n < 0 || m < 0) throw parse_error("negative header values", lineno);
  if (n > (1 << 26)) throw parse_error("vertex count too large", lineno);

  Graph g(static_cast<int>(n));
  for (long long i = 0; i < m; ++i) {
    if (!next_line()) throw parse_error("unexpected end of file", lineno);
    long long u = 0, v = 0;
    std::istringstream ls(line);
    std::string extra;
    if (!(ls >> u >> v) || (ls >> extra))
      throw parse_error("expected edge \"u v\"", lineno);
    if (u < 1 || v < 1 || u > n || v > n)
      throw parse_error("vertex out of range (vertices are 1-indexed)", lineno);
    if (u >= v) throw parse_error("edges must satisfy u < v", lineno);
    if (g.has_edge(static_cast<int>(u), static_cast<int>(v)))
      throw parse_error("duplicate edge", lineno);
    g.add_edge(static_cast<int>(u), static_cast<int>(v));
  }
  if (next_line()) throw parse_error("trailing content after edge list", lineno);
  return g;
}

inline Graph parse_graph(const std::string& text) {
  std::istringstream is(text);
  return parse_graph(is);
}

} // namespace kc
