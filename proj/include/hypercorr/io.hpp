#pragma once

#include <fstream>
#include <iostream>

#include <json.hpp>

#include "hypercorr/flow.hpp"
#include "hypercorr/search.hpp"
#include "hypercorr/version.hpp"

namespace hypercorr::io {

using nlohmann::json;

/// Exact rationals serialize as {"num", "den_pow2"} (dyadic) or
/// {"num", "den"} plus a float rendering; the float is never a verdict input.
inline json rational_json(const Rational& q) {
  json j;
  j["num"] = q.num_string();
  if (q.is_dyadic())
    j["den_pow2"] = q.den_pow2();
  else
    j["den"] = q.den_string();
  j["float"] = q.to_double();
  return j;
}

inline json dyadic_json(const Dyadic& d) { return rational_json(Rational(d)); }

inline Rational rational_from_json(const json& j) {
  mpz_class num(j.at("num").get<std::string>());
  if (j.contains("den_pow2")) {
    mpz_class den = 1;
    den <<= j.at("den_pow2").get<unsigned>();
    return Rational(num, den);
  }
  return Rational(num, mpz_class(j.at("den").get<std::string>()));
}

inline json family_to_json(const SetFamily& f) {
  json j;
  j["n"] = f.n();
  j["tt"] = tt_hex(f);
  return j;
}

/// FamilyFile: {"n": k} plus exactly one of
///   "family": [[elements...]...]  explicit members, 1-based elements
///   "generators": [...], "closure": "up"|"down"
///   "tt": hex membership bitset, little-endian nibbles (mask 0 first)
inline SetFamily family_from_json(const json& j) {
  if (!j.is_object() || !j.contains("n")) throw_input("family file: missing n");
  int n = j.at("n").get<int>();
  if (n < 0 || n > kMaxDimension) throw_input("family file: n out of [0, 24]");
  int forms = (int)j.contains("family") + (int)j.contains("generators") + (int)j.contains("tt");
  if (forms != 1) throw_input("family file: need exactly one of family/generators/tt");

  if (j.contains("tt")) return family_from_tt(n, j.at("tt").get<std::string>());

  auto subsets_to_family = [&](const json& subsets) {
    SetFamily f(n);
    if (!subsets.is_array()) throw_input("family file: subsets must be an array");
    for (const json& subset : subsets) {
      uint32_t mask = 0;
      for (const json& e : subset) {
        long v = e.get<long>();
        if (v < 1 || v > n) throw_input("family file: element out of [1, n]");
        mask |= 1u << (v - 1);
      }
      f.insert(mask);
    }
    return f;
  };

  if (j.contains("family")) return subsets_to_family(j.at("family"));

  SetFamily gens = subsets_to_family(j.at("generators"));
  std::string closure = j.value("closure", "");
  if (closure == "up") return up_closure(gens);
  if (closure == "down") return down_closure(gens);
  throw_input("family file: closure must be \"up\" or \"down\"");
}

inline std::vector<SetFamily> ensemble_from_json(const json& j) {
  const json& arr = j.is_array() ? j : j.at("families");
  std::vector<SetFamily> out;
  for (const json& f : arr) out.push_back(family_from_json(f));
  if (out.empty()) throw_input("ensemble file: no families");
  return out;
}

inline json influence_json(const InfluenceVector& v) {
  json j;
  json entries = json::array();
  for (const Dyadic& e : v.entries) entries.push_back(dyadic_json(e));
  j["entries"] = entries;
  j["total"] = dyadic_json(v.total);
  j["min"] = dyadic_json(v.minimum);
  return j;
}

inline json predicates_json(const FamilyPredicates& p) {
  return json{{"increasing", p.increasing},   {"decreasing", p.decreasing},
              {"intersecting", p.intersecting}, {"antipodal", p.antipodal},
              {"regular", p.regular},         {"balanced", p.balanced}};
}

inline json inequality_report_json(const ineq::InequalityReport& r) {
  json j;
  j["checker"] = r.checker;
  j["holds"] = ineq::verdict_name(r.verdict);
  j["lhs_float"] = r.lhs;
  j["rhs_float"] = r.rhs;
  j["margin_float"] = r.margin;
  if (r.lhs_exact) j["lhs"] = rational_json(*r.lhs_exact);
  if (r.rhs_exact) j["rhs"] = rational_json(*r.rhs_exact);
  if (r.margin_exact) j["margin"] = rational_json(*r.margin_exact);
  if (r.ratio) j["ratio"] = *r.ratio;
  if (!r.metadata.empty()) j["metadata"] = r.metadata;
  return j;
}

inline json ensemble_report_json(const ineq::EnsembleReport& r) {
  json j;
  j["checker"] = r.checker;
  j["families"] = r.families;
  j["holds"] = ineq::verdict_name(r.verdict);
  j["e_cor"] = rational_json(r.e_cor);
  j["e_core"] = rational_json(r.e_core);
  if (r.rhs_exact) j["rhs"] = rational_json(*r.rhs_exact);
  if (r.margin_exact) j["margin"] = rational_json(*r.margin_exact);
  if (r.t) j["t"] = rational_json(*r.t);
  j["rhs_float"] = r.rhs;
  j["margin_float"] = r.margin;
  return j;
}

inline json flow_result_json(const flow::FlowResult& r) {
  json j;
  j["feasible"] = r.feasible;
  j["sum_mismatch"] = r.sum_mismatch;
  if (r.feasible) {
    json edges = json::array();
    for (const flow::FlowEdge& e : r.transport)
      edges.push_back(json{{"from", e.from_mask}, {"to", e.to_mask},
                           {"amount", rational_json(e.amount)}});
    j["flow"] = edges;
  }
  if (r.certificate) j["certificate"] = family_to_json(*r.certificate);
  return j;
}

inline json lambda_json(const std::vector<Rational>& lambda) {
  json arr = json::array();
  for (const Rational& l : lambda) arr.push_back(rational_json(l));
  return arr;
}

inline json tribes_json(const families::TribesStats& s) {
  json j;
  j["r"] = s.r;
  j["m"] = s.m;
  j["exact"] = s.exact;
  j["mu_a"] = s.mu_a;
  j["mu_b"] = s.mu_b;
  j["cor"] = s.cor;
  j["influence"] = s.influence;
  j["ratio_chvatal"] = s.ratio_chvatal;
  j["ratio_balanced"] = s.ratio_balanced;
  if (s.exact) {
    j["mu_a_exact"] = dyadic_json(*s.mu_a_x);
    j["mu_b_exact"] = dyadic_json(*s.mu_b_x);
    j["cor_exact"] = dyadic_json(*s.cor_x);
    j["influence_exact"] = dyadic_json(*s.influence_x);
    j["ratio_chvatal_exact"] = rational_json(*s.ratio_chvatal_x);
    j["ratio_balanced_exact"] = rational_json(*s.ratio_balanced_x);
  }
  return j;
}

inline std::string tribes_csv(const std::vector<families::TribesStats>& rows) {
  std::string out = "r,m,exact,mu_a,mu_b,cor,influence,ratio_chvatal,ratio_balanced\n";
  char buf[256];
  for (const auto& s : rows) {
    std::snprintf(buf, sizeof buf, "%d,%d,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", s.r, s.m,
                  (int)s.exact, s.mu_a, s.mu_b, s.cor, s.influence, s.ratio_chvatal,
                  s.ratio_balanced);
    out += buf;
  }
  return out;
}

inline json extremal_json(const search::ExtremalRecord& r) {
  json j;
  j["found"] = r.found;
  j["examined"] = r.examined;
  j["vacuous"] = r.vacuous;
  j["class_skipped"] = r.class_skipped;
  if (r.found) {
    j["best"] = r.best;
    if (r.best_exact) j["best_exact"] = rational_json(*r.best_exact);
    j["witness_a"] = json{{"n", r.n}, {"tt", r.witness_a}};
    j["witness_b"] = json{{"n", r.n}, {"tt", r.witness_b}};
  }
  j["ratio_count"] = r.ratio_count;
  if (r.ratio_count) {
    j["ratio_min"] = r.ratio_min;
    j["ratio_median"] = r.ratio_median;
  }
  if (!r.trace.empty()) j["trace"] = r.trace;
  return j;
}

inline json equivalence_json(const ineq::EquivalenceRecord& r) {
  return json{{"max_intersecting_subfamily", r.max_intersecting_subfamily},
              {"best_principal", r.best_principal},
              {"cor_form_margin", dyadic_json(r.cor_form_margin)},
              {"consistent", r.consistent}};
}

inline json envelope(const std::string& command, std::optional<uint64_t> seed, json report,
                     double ms) {
  json j;
  j["version"] = kVersion;
  j["command"] = command;
  if (seed) j["seed"] = *seed;
  j["timing_ms"] = ms;
  j["report"] = std::move(report);
  return j;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw_input("cannot open file: " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw_input("malformed JSON in " + path + ": " + e.what());
  }
  return j;
}

inline SetFamily load_family(const std::string& path) {
  return family_from_json(read_json_file(path));
}

/// "-" writes to stdout.
inline void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text << "\n";
    return;
  }
  std::ofstream out(path);
  if (!out) throw_input("cannot write file: " + path);
  out << text << "\n";
}

inline void write_report(const std::string& path, const json& j) { write_text(path, j.dump(2)); }

}  // namespace hypercorr::io
