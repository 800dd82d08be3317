#pragma once

#include <cmath>
#include <cstdint>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "ccm/diagnostics.hpp"
#include "ccm/graph.hpp"
#include "ccm/oracle.hpp"
#include "ccm/polarization.hpp"
#include "ccm/sampler.hpp"

namespace ccm {

using Json = nlohmann::ordered_json;

inline constexpr const char* kVersion = "0.1.0";

inline Json number_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

inline Json to_json(const OutcomeTally& t) {
  return Json{{"out_of_space", t.out_of_space}, {"non_changing", t.non_changing}, {"accepted", t.accepted},
              {"rejected", t.rejected},         {"lazy_hold", t.lazy_hold},       {"total", t.total()}};
}

inline Json to_json(const ChainConfig& c) {
  Json j{{"algorithm", to_string(c.algorithm)},
         {"iterations", c.iterations ? Json(*c.iterations) : Json(nullptr)},
         {"laziness", c.laziness == Laziness::Half ? "half" : "none"},
         {"seed", c.seed},
         {"strict", c.strict},
         {"count_valid_only", c.count_valid_only}};
  j["trace_stride"] = c.trace_stride ? Json(*c.trace_stride) : Json(nullptr);
  return j;
}

inline ChainConfig chain_config_from_json(const Json& j) {
  ChainConfig c;
  c.algorithm = parse_algorithm(j.at("algorithm").get<std::string>());
  if (!j.at("iterations").is_null()) c.iterations = j.at("iterations").get<std::uint64_t>();
  c.laziness = j.at("laziness").get<std::string>() == "half" ? Laziness::Half : Laziness::None;
  c.seed = j.at("seed").get<std::uint64_t>();
  c.strict = j.value("strict", false);
  c.count_valid_only = j.value("count_valid_only", false);
  if (j.contains("trace_stride") && !j.at("trace_stride").is_null())
    c.trace_stride = j.at("trace_stride").get<std::uint64_t>();
  return c;
}

inline Json to_json(const VerificationReport& r) {
  auto opt = [](const std::optional<double>& x) { return x ? number_or_null(*x) : Json(nullptr); };
  return Json{{"states", r.states},
              {"exact_arithmetic", r.exact},
              {"irreducible", r.irreducible},
              {"aperiodicity_condition", r.aperiodicity_condition},
              {"period", r.period},
              {"aperiodic", r.aperiodic()},
              {"theta", r.theta},
              {"row_sum_deviation", r.row_sum_deviation},
              {"detailed_balance_sirius", r.detailed_balance_sirius},
              {"detailed_balance_sirius_b", r.detailed_balance_sirius_b},
              {"scalar_peskun_deviation", r.scalar_peskun_deviation},
              {"class_peskun_deviation", r.class_peskun_deviation},
              {"stationary_deviation_sirius", opt(r.stationary_deviation_sirius)},
              {"stationary_deviation_sirius_b", opt(r.stationary_deviation_sirius_b)},
              {"slem_lazy_sirius", opt(r.slem_lazy_sirius)},
              {"slem_lazy_sirius_b", opt(r.slem_lazy_sirius_b)},
              {"peskun_ordered", r.peskun_ordered()},
              {"passed", r.passed()}};
}

inline Json to_json(const SignificanceResult& r) {
  Json nulls = Json::array();
  for (double x : r.nulls) nulls.push_back(number_or_null(x));
  return Json{{"score_name", r.score_name},         {"observed", number_or_null(r.observed)},
              {"nulls", nulls},                     {"p_one_sided_ge", r.p_one_sided_ge},
              {"p_one_sided_le", r.p_one_sided_le}, {"p_two_sided", r.p_two_sided}};
}

inline Json to_json(const RwcConfig& c) {
  return Json{{"restart", c.restart}, {"influencers", c.influencers}};
}

/// FNV-1a over the CDM entries in vertex-major order, as 16 hex digits.
inline std::string cdm_digest(const ColoredMultigraph& g) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&](std::uint32_t x) {
    for (int i = 0; i < 4; ++i) {
      h ^= (x >> (8 * i)) & 0xFFu;
      h *= 0x100000001b3ULL;
    }
  };
  mix(static_cast<std::uint32_t>(g.num_vertices()));
  mix(static_cast<std::uint32_t>(g.num_colors()));
  const ColoredDegreeMatrix c = g.cdm();
  for (VertexId v = 0; v < g.num_vertices(); ++v)
    for (ColorId l = 0; l < g.num_colors(); ++l) mix(c.at(l, v));
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

/// Summary statistics of a labeled graph: theta, M, top-k M_v, JCM, CDM digest.
inline Json graph_stats(const ColoredMultigraph& g, const std::vector<std::string>& vertex_names,
                        const std::vector<std::string>& color_names, std::size_t top_k = 10) {
  Json j;
  j["n"] = g.num_vertices();
  j["m"] = g.num_edges();
  j["colors"] = color_names;
  j["theta"] = g.num_edges() >= 2 ? Json(theta(g)) : Json(nullptr);
  j["M"] = number_or_null(m_statistics(g).m);
  Json top = Json::array();
  for (const auto& s : top_degree_mv(g, top_k))
    top.push_back({{"vertex", vertex_names[s.vertex]},
                   {"degree", g.degree(s.vertex)},
                   {"M_v", s.value ? Json(*s.value) : Json(nullptr)}});
  j["top_degree_M_v"] = top;
  const JointColorMatrix J = jcm(g);
  Json rows = Json::array();
  for (ColorId l = 0; l < g.num_colors(); ++l) {
    Json row = Json::array();
    for (ColorId r = 0; r < g.num_colors(); ++r) row.push_back(J.at(l, r));
    rows.push_back(row);
  }
  j["jcm"] = rows;
  j["cdm_digest"] = cdm_digest(g);
  return j;
}

}  // namespace ccm
