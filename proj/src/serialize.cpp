#include "pqlab/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "pqlab/errors.hpp"

namespace pqlab {

namespace {

template <class T>
T field(const Json& j, const char* key) {
  if (!j.contains(key)) throw ValidationError(std::string("missing field \"") + key + "\"");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("field \"") + key + "\": " + e.what());
  }
}

}  // namespace

Json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  const double rounded = std::strtod(buf, nullptr);
  return rounded == 0.0 ? 0.0 : rounded;  // no negative zero
}

Json to_json(const Concept& c) { return {{"N", c.modulus()}, {"bits", c.to_string()}}; }

Json to_json(const Answer& a) { return Json::array({a.x, a.b}); }

Json to_json(const Hypothesis& h) {
  Json table = Json::array();
  for (const Answer& a : h.table()) table.push_back(to_json(a));
  return table;
}

Json to_json(const Edge& e) { return Json::array({e.a, e.b}); }

Json to_json(const Distribution& d) {
  Json out = Json::array();
  for (double p : d.probabilities()) out.push_back(number(p));
  return out;
}

Json to_json(const CoverCertificate& cert) {
  Json cover = Json::array();
  for (std::size_t i = 0; i < cert.cover.size(); ++i) {
    cover.push_back({{"index", cert.cover_indices[i]}, {"answers", to_json(cert.cover[i])}});
  }
  Json coverage = Json::array();
  for (std::size_t cls = 0; cls < cert.coverage.size(); ++cls) {
    coverage.push_back({{"class", class_representative(cert.modulus, static_cast<int>(cls)).to_string()},
                        {"hypothesis", cert.coverage[cls]}});
  }
  return {{"N", cert.modulus},
          {"size", cert.cover.size()},
          {"minimal", cert.minimal},
          {"method", cert.method},
          {"cover", cover},
          {"coverage", coverage},
          {"search",
           {{"hypotheses_scanned", cert.stats.hypotheses_scanned},
            {"distinct_coverage_sets", cert.stats.distinct_coverage_sets},
            {"undominated_sets", cert.stats.undominated_sets},
            {"greedy_size", cert.stats.greedy_size},
            {"nodes_explored", cert.stats.nodes_explored}}}};
}

Json to_json(const CountingAudit& a) {
  Json c0 = Json::array();
  for (const Concept& c : a.c0) c0.push_back(c.to_string());
  Json e0 = Json::array();
  for (std::size_t i = 0; i < a.e0.size(); ++i) e0.push_back({{"edge", to_json(a.e0[i])}, {"queries", a.e0_queries[i]}});
  Json forest = Json::array();
  for (const Edge& e : a.forest) forest.push_back(to_json(e));
  Json bias = Json::array();
  for (double b : a.bias) bias.push_back(number(b));
  Json h_iq = Json::array();
  for (double h : a.h_iq) h_iq.push_back(number(h));
  Json checks = Json::array();
  for (const AuditCheck& c : a.checks) {
    checks.push_back({{"name", c.name},
                      {"lhs", number(c.lhs)},
                      {"relation", c.equality ? "==" : ">="},
                      {"rhs", number(c.rhs)},
                      {"holds", c.holds}});
  }
  return {{"N", a.modulus},
          {"C0", c0},
          {"Q0", a.q0},
          {"E0", e0},
          {"nonisolated", a.nonisolated},
          {"forest", forest},
          {"Q0_prime", a.q0_prime},
          {"log_ratio", number(a.log_ratio)},
          {"entropy",
           {{"H_C_uniform", number(a.h_c_uniform)},
            {"H_C_restricted", number(a.h_c_restricted)},
            {"H_J_uniform", number(a.h_j_uniform)},
            {"H_J_restricted", number(a.h_j_restricted)},
            {"H_C_given_J_uniform", number(a.h_c_given_j_uniform)},
            {"H_C_given_J_restricted", number(a.h_c_given_j_restricted)}}},
          {"bias", bias},
          {"H_Iq", h_iq},
          {"gap_lower_bound", number(a.gap_lower_bound)},
          {"checks", checks},
          {"all_hold", a.all_hold},
          {"unchecked", a.unchecked_note}};
}

Json to_json(const KlChainAudit& a) {
  Json rows = Json::array();
  for (const KlChainRow& r : a.rows) {
    rows.push_back({{"eps_x", number(r.error)},
                    {"kl", number(r.kl_original)},
                    {"kl_refined", number(r.kl_refined)},
                    {"stated_bound", number(r.stated_bound)},
                    {"stated_holds", r.stated_holds},
                    {"entropy_bound", number(r.entropy_bound)},
                    {"entropy_holds", r.entropy_holds}});
  }
  return {{"m", number(a.declared_cost)},
          {"mutual_information", number(a.mutual_information)},
          {"max_eps_x", number(a.max_error)},
          {"per_input", rows},
          {"per_input_stated_holds", a.per_input_stated_holds},
          {"per_input_entropy_holds", a.per_input_entropy_holds},
          {"expected_refined_kl", number(a.expected_refined_kl)},
          {"aggregate_bound", number(a.aggregate_bound)},
          {"aggregate_holds", a.aggregate_holds},
          {"simplified_bound", number(a.simplified_bound)},
          {"simplified_applicable", a.simplified_applicable},
          {"simplified_holds", a.simplified_holds}};
}

Json to_json(const ConversionReport& r) {
  Json per_input = Json::array();
  for (std::size_t x = 0; x < r.hit_probability.size(); ++x) {
    per_input.push_back({{"hit", number(r.hit_probability[x])},
                         {"miss", number(r.miss_probability[x])},
                         {"in_x_prime", static_cast<bool>(r.in_x_prime[x])}});
  }
  return {{"m", number(r.declared_cost)},
          {"mutual_information", number(r.mutual_information)},
          {"eps", number(r.eps)},
          {"family_error", number(r.family_error)},
          {"exponent", number(r.exponent)},
          {"M", r.samples},
          {"message_bits", r.message_bits},
          {"exact_error", number(r.exact_error)},
          {"draws", r.draws},
          {"failures", r.failures},
          {"empirical_error", number(r.empirical_error)},
          {"x_prime_mass", number(r.x_prime_mass)},
          {"x_prime_mass_holds", r.x_prime_mass_holds},
          {"hit_bound_holds", r.hit_bound_holds},
          {"per_input", per_input}};
}

Json to_json(const OneWayCost& c) {
  return {{"messages", c.messages}, {"bits", c.bits}, {"error", number(c.error)}};
}

Hypothesis hypothesis_from_json(int modulus, const Json& j) {
  if (!j.is_array()) throw ValidationError("hypothesis: expected an array of [x, b] pairs");
  std::vector<Answer> table;
  for (const auto& entry : j) {
    if (!entry.is_array() || entry.size() != 2) throw ValidationError("hypothesis: each answer must be [x, b]");
    table.push_back({entry[0].get<int>(), entry[1].get<int>()});
  }
  return Hypothesis(modulus, std::move(table));
}

CoverCertificate certificate_from_json(const Json& j) {
  CoverCertificate cert;
  cert.modulus = field<int>(j, "N");
  cert.minimal = field<bool>(j, "minimal");
  cert.method = field<std::string>(j, "method");
  for (const auto& h : field<Json>(j, "cover")) {
    cert.cover_indices.push_back(field<std::uint64_t>(h, "index"));
    cert.cover.push_back(hypothesis_from_json(cert.modulus, field<Json>(h, "answers")));
  }
  for (const auto& c : field<Json>(j, "coverage")) cert.coverage.push_back(field<int>(c, "hypothesis"));
  return cert;
}

Distribution distribution_from_json(const Json& j) {
  if (!j.is_array()) throw ValidationError("distribution: expected an array of probabilities");
  return Distribution(j.get<std::vector<double>>());
}

AnswerFamily family_from_json(const Json& j) {
  AnswerFamily f{distribution_from_json(field<Json>(j, "prior")), {}};
  for (const auto& d : field<Json>(j, "per_input")) f.per_input.push_back(distribution_from_json(d));
  f.validate();
  return f;
}

SingleInputProblem single_input_from_json(const Json& j) {
  const auto rows = field<std::vector<std::vector<int>>>(j, "relation");
  SingleInputProblem p;
  p.inputs = rows.size();
  p.answers = rows.empty() ? 0 : rows.front().size();
  for (const auto& row : rows) {
    if (row.size() != p.answers) throw ValidationError("relation: rows have different lengths");
    for (int v : row) p.relation.push_back(v != 0 ? 1 : 0);
  }
  p.mu = j.contains("mu") ? distribution_from_json(j.at("mu")) : Distribution::uniform(std::max<std::size_t>(p.inputs, 1));
  p.validate();
  return p;
}

TwoSidedProblem two_sided_from_json(const Json& j) {
  TwoSidedProblem p;
  p.inputs = field<std::size_t>(j, "inputs");
  p.bob_inputs = field<std::size_t>(j, "bob_inputs");
  p.answers = field<std::size_t>(j, "answers");
  p.relation.assign(p.inputs * p.bob_inputs * p.answers, 0);
  for (const auto& t : field<Json>(j, "valid")) {
    const auto v = t.get<std::vector<std::size_t>>();
    if (v.size() != 3 || v[0] >= p.inputs || v[1] >= p.bob_inputs || v[2] >= p.answers) {
      throw ValidationError("two-sided problem: each valid triple must be [x, y, z] within range");
    }
    p.relation[(v[0] * p.bob_inputs + v[1]) * p.answers + v[2]] = 1;
  }
  if (j.contains("mu")) {
    std::vector<double> flat;
    for (const auto& row : j.at("mu")) {
      for (double v : row.get<std::vector<double>>()) flat.push_back(v);
    }
    p.mu = Distribution(std::move(flat));
  } else {
    p.mu = Distribution::uniform(p.inputs * p.bob_inputs);
  }
  p.validate();
  return p;
}

Json to_json(const TwoSidedProblem& p) {
  Json valid = Json::array();
  Json mu = Json::array();
  for (std::size_t x = 0; x < p.inputs; ++x) {
    Json row = Json::array();
    for (std::size_t y = 0; y < p.bob_inputs; ++y) {
      row.push_back(number(p.mu[x * p.bob_inputs + y]));
      for (std::size_t z = 0; z < p.answers; ++z) {
        if (p.accepts(x, y, z)) valid.push_back({x, y, z});
      }
    }
    mu.push_back(row);
  }
  return {{"inputs", p.inputs}, {"bob_inputs", p.bob_inputs}, {"answers", p.answers}, {"valid", valid}, {"mu", mu}};
}

Json to_json(const SingleInputProblem& p) {
  Json rows = Json::array();
  for (std::size_t x = 0; x < p.inputs; ++x) {
    Json row = Json::array();
    for (std::size_t z = 0; z < p.answers; ++z) row.push_back(p.accepts(x, z) ? 1 : 0);
    rows.push_back(row);
  }
  return {{"relation", rows}, {"mu", to_json(p.mu)}};
}

}  // namespace pqlab
