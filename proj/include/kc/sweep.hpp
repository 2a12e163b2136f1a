#pragma once

#include <cstdint>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "kc/embed.hpp"
#include "kc/errors.hpp"
#include "kc/gnp.hpp"
#include "kc/graph.hpp"
#include "kc/posa.hpp"
#include "kc/rng.hpp"

namespace kc {

/// One grid point of a sweep: n plus either a raw probability or the
/// offset c with p = (ln n + c)/n.
struct SweepPoint {
  int n = 0;
  bool use_offset = false;
  double p = 0.0;
  double c = 0.0;

  double probability() const { return use_offset ? p_from_offset(n, c) : p; }
  std::string label() const {
    std::ostringstream os;
    os << n << (use_offset ? ",c=" : ",p=") << (use_offset ? c : p);
    return os.str();
  }
};

enum class SweepMetric { connected, embed, hamiltonize };

struct SweepTrialRow {
  std::string point;
  int n = 0;
  double p = 0.0;
  int trial = 0;
  std::uint64_t seed = 0;
  bool success = false;
  std::string detail;
};

struct SweepPointSummary {
  std::string point;
  int n = 0;
  double p = 0.0;
  int trials = 0;
  int successes = 0;
  double rate = 0.0;
};

struct SweepResult {
  std::vector<SweepTrialRow> rows;
  std::vector<SweepPointSummary> summary;
};

struct SweepConfig {
  std::vector<SweepPoint> grid;
  int trials = 10;
  std::uint64_t seed = 0;
  SweepMetric metric = SweepMetric::connected;
  EmbedConfig embed;   // used by the embed metric (seed overridden per trial)
  int d0 = -1;         // hamiltonize metric
  int threads = 1;
};

/// Runs the grid. Per-trial seeds are derived from (master, point index,
/// trial index), so results are a pure function of the master seed and the
/// schedule: trials may run concurrently with identical output.
inline SweepResult sweep_experiment(const SweepConfig& cfg) {
  SweepResult out;
  if (cfg.trials < 0) throw parameter_error("sweep: trials must be >= 0");
  const std::size_t total = cfg.grid.size() * static_cast<std::size_t>(cfg.trials);
  out.rows.resize(total);

  auto run_one = [&](std::size_t gi, int trial) {
    const SweepPoint& pt = cfg.grid[gi];
    const double p = pt.probability();
    std::uint64_t gseed =
        derive_seed(cfg.seed, "sweep-graph", (static_cast<std::uint64_t>(gi) << 32) |
                                                 static_cast<std::uint64_t>(trial));
    SweepTrialRow row;
    row.point = pt.label();
    row.n = pt.n;
    row.p = p;
    row.trial = trial;
    row.seed = gseed;
    Graph g = sample_gnp(pt.n, p, gseed);
    switch (cfg.metric) {
      case SweepMetric::connected:
        row.success = is_connected(g);
        break;
      case SweepMetric::embed: {
        EmbedConfig ec = cfg.embed;
        ec.seed = derive_seed(cfg.seed, "sweep-embed",
                              (static_cast<std::uint64_t>(gi) << 32) |
                                  static_cast<std::uint64_t>(trial));
        auto res = embed_keychain(g, ec);
        row.success = res.ok();
        row.detail = res.trace.outcome;
        break;
      }
      case SweepMetric::hamiltonize: {
        std::vector<int> w(static_cast<std::size_t>(pt.n));
        for (int v = 1; v <= pt.n; ++v) w[static_cast<std::size_t>(v - 1)] = v;
        auto res = hamiltonize(g, w, cfg.d0,
                               derive_seed(cfg.seed, "sweep-ham",
                                           (static_cast<std::uint64_t>(gi) << 32) |
                                               static_cast<std::uint64_t>(trial)));
        row.success = res.success;
        row.detail = res.success ? "" : res.stage;
        break;
      }
    }
    out.rows[gi * static_cast<std::size_t>(cfg.trials) + static_cast<std::size_t>(trial)] =
        std::move(row);
  };

  const int threads = std::max(1, cfg.threads);
  if (threads == 1 || total <= 1) {
    for (std::size_t gi = 0; gi < cfg.grid.size(); ++gi)
      for (int trial = 0; trial < cfg.trials; ++trial) run_one(gi, trial);
  } else {
    std::vector<std::thread> pool;
    std::size_t per = (total + static_cast<std::size_t>(threads) - 1) /
                      static_cast<std::size_t>(threads);
    for (int th = 0; th < threads; ++th) {
      std::size_t lo = static_cast<std::size_t>(th) * per;
      std::size_t hi = std::min(total, lo + per);
      if (lo >= hi) break;
      pool.emplace_back([&, lo, hi]() {
        for (std::size_t i = lo; i < hi; ++i)
          run_one(i / static_cast<std::size_t>(cfg.trials),
                  static_cast<int>(i % static_cast<std::size_t>(cfg.trials)));
      });
    }
    for (auto& t : pool) t.join();
  }

  for (std::size_t gi = 0; gi < cfg.grid.size(); ++gi) {
    SweepPointSummary s;
    s.point = cfg.grid[gi].label();
    s.n = cfg.grid[gi].n;
    s.p = cfg.grid[gi].probability();
    s.trials = cfg.trials;
    for (int trial = 0; trial < cfg.trials; ++trial)
      if (out.rows[gi * static_cast<std::size_t>(cfg.trials) + static_cast<std::size_t>(trial)]
              .success)
        ++s.successes;
    s.rate = (cfg.trials > 0) ? static_cast<double>(s.successes) / cfg.trials : 0.0;
    out.summary.push_back(std::move(s));
  }
  return out;
}

inline std::string sweep_rows_csv(const SweepResult& r) {
  std::ostringstream os;
  os << "point,n,p,trial,seed,success,detail\n";
  for (const auto& row : r.rows) {
    std::string detail = row.detail;
    for (auto& ch : detail)
      if (ch == ',' || ch == '\n') ch = ';';
    os << row.point << ',' << row.n << ',' << row.p << ',' << row.trial << ','
       << row.seed << ',' << (row.success ? 1 : 0) << ',' << detail << '\n';
  }
  return os.str();
}

inline std::string sweep_summary_csv(const SweepResult& r) {
  std::ostringstream os;
  os << "point,n,p,trials,successes,rate\n";
  for (const auto& s : r.summary)
    os << s.point << ',' << s.n << ',' << s.p << ',' << s.trials << ','
       << s.successes << ',' << s.rate << '\n';
  return os.str();
}

} // namespace kc
