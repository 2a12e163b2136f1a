#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "kc/embed.hpp"
#include "kc/errors.hpp"
#include "kc/mcs.hpp"
#include "kc/params.hpp"
#include "kc/posa.hpp"
#include "kc/properties.hpp"

namespace kc {

using Json = nlohmann::ordered_json;

/// Big integers are emitted as JSON numbers when they fit in uint64, and as
/// decimal strings beyond that (the paper profile reaches 2^512).
inline Json bigint_to_json(const Bigint& x) {
  if (x >= 0 && x <= std::numeric_limits<std::uint64_t>::max())
    return Json(x.convert_to<std::uint64_t>());
  return Json(x.str());
}

inline Json params_to_json(const KeyChainParams& p) {
  Json j;
  j["n"] = bigint_to_json(p.n);
  j["t"] = p.t;
  j["ell"] = p.ell;
  j["j0"] = p.j0;
  Json seq = Json::array();
  for (const auto& a : p.a_seq) seq.push_back(bigint_to_json(a));
  j["a_seq"] = std::move(seq);
  return j;
}

inline Json report_to_json(const PropertyReport& r) {
  Json j;
  j["property"] = prop_name(r.property);
  j["verdict"] = verdict_name(r.verdict);
  if (r.witness) {
    Json w;
    if (!r.witness->u.empty()) w["U"] = r.witness->u;
    if (!r.witness->w.empty()) w["W"] = r.witness->w;
    if (!r.witness->path.empty()) w["path"] = r.witness->path;
    if (r.witness->vertex != 0) w["vertex"] = r.witness->vertex;
    j["witness"] = std::move(w);
  }
  Json m;
  m["kind"] = (r.mode.kind == CheckMode::Kind::exact) ? "exact" : "sampled";
  if (r.mode.kind == CheckMode::Kind::sampled) {
    m["trials"] = r.mode.trials;
    m["seed"] = r.mode.seed;
  }
  j["mode"] = std::move(m);
  if (!r.detail.empty()) j["detail"] = r.detail;
  return j;
}

inline Json hamiltonize_to_json(const HamiltonizeResult& r) {
  Json j;
  if (r.success) {
    j["success"] = true;
    j["cycle"] = r.cycle;
    j["rounds"] = r.rounds;
    j["expander_certified"] = r.expander_certified;
  } else {
    j["success"] = false;
    j["stage"] = r.stage;
    j["longest_path_len"] = r.longest_path_len;
    j["rounds"] = r.rounds;
  }
  return j;
}

inline Json embedding_to_json(const Embedding& e) {
  Json j;
  j["params"] = params_to_json(e.params);
  j["phi"] = e.phi;
  return j;
}

inline Embedding embedding_from_json(const Json& j) {
  Embedding e;
  auto big_from = [](const Json& v) -> Bigint {
    if (v.is_string()) return Bigint(v.get<std::string>());
    return Bigint(v.get<std::uint64_t>());
  };
  const auto& p = j.at("params");
  e.params.n = big_from(p.at("n"));
  e.params.t = p.at("t").get<long>();
  e.params.ell = p.at("ell").get<long>();
  if (p.contains("j0")) e.params.j0 = p.at("j0").get<long>();
  if (p.contains("a_seq"))
    for (const auto& a : p.at("a_seq")) e.params.a_seq.push_back(big_from(a));
  e.phi = j.at("phi").get<std::vector<int>>();
  return e;
}

inline Json trace_to_json(const PipelineTrace& t, bool with_timings = false) {
  Json j;
  j["success"] = t.success;
  j["outcome"] = t.outcome;
  j["attempts"] = t.attempts;
  Json stages = Json::array();
  for (const auto& s : t.stages) {
    Json e;
    e["stage"] = s.stage;
    e["attempt"] = s.attempt;
    e["ok"] = s.ok;
    if (!s.failure.empty()) e["failure"] = s.failure;
    if (with_timings) e["ms"] = s.ms;
    stages.push_back(std::move(e));
  }
  j["stages"] = std::move(stages);
  return j;
}

/// Atomic file write: temp file in the target directory, then rename.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& data) {
  namespace fs = std::filesystem;
  fs::path dir = path.parent_path();
  if (!dir.empty()) fs::create_directories(dir);
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw error("cannot open " + tmp.string() + " for writing");
    os << data;
    if (!os) throw error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

} // namespace kc
