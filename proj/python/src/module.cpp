#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <sstream>

#include "pqlab/commlab.hpp"
#include "pqlab/errors.hpp"
#include "pqlab/experiment.hpp"
#include "pqlab/learner.hpp"
#include "pqlab/modmath.hpp"
#include "pqlab/serialize.hpp"
#include "pqlab/speakability.hpp"

namespace py = pybind11;
using namespace pqlab;

namespace {

// Structured results cross the boundary as JSON text; the Python side parses it.
std::string text(const Json& j) { return j.dump(); }

CoverMode cover_mode(const std::string& mode) {
  if (mode == "exact") return CoverMode::kExact;
  if (mode == "greedy") return CoverMode::kGreedy;
  throw ValidationError("mode must be \"exact\" or \"greedy\"");
}

std::string trials(int n, int k, std::int64_t count, std::uint64_t seed, const std::string& policy, bool exact,
                   unsigned threads) {
  Json params = {{"N", n}, {"k", k}, {"trials", count}, {"query_policy", policy}};
  Json doc = {{"experiment", exact ? "exact-learn" : "learn-sim"}, {"seed", seed}, {"params", params}};
  ConfigOverrides o;
  o.threads = threads;
  return text(execute(parse_config(doc, o)).summary.at("results"));
}

}  // namespace

PYBIND11_MODULE(_pqlab, m) {
  m.doc() = "pqlab core bindings";
  m.attr("__version__") = version();

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<CapExceeded>(m, "CapExceeded", PyExc_RuntimeError);
  py::register_exception<InvariantBreach>(m, "InvariantBreach", PyExc_AssertionError);

  m.def("is_prime", &is_prime);
  m.def("build_matching", [](int n, int x0, int q) {
    std::vector<std::pair<int, int>> out;
    for (const Edge& e : build_matching(n, Zmod(x0, n), q).edges) out.emplace_back(e.a, e.b);
    return out;
  }, py::arg("N"), py::arg("x0"), py::arg("q"));

  m.def("valid_answer", [](const std::string& c, int q, int x, int b) {
    return valid_answer(Concept::from_string(c), q, {x, b});
  }, py::arg("concept"), py::arg("q"), py::arg("x"), py::arg("b"));
  m.def("relation_of", [](const std::string& c) {
    std::vector<std::tuple<int, int, int>> out;
    for (const RelationTriple& t : relation_of(Concept::from_string(c))) out.emplace_back(t.q, t.x, t.b);
    return out;
  });
  m.def("approximates", [](const std::vector<std::pair<int, int>>& table, const std::string& c) {
    const Concept target = Concept::from_string(c);
    std::vector<Answer> answers;
    for (auto [x, b] : table) answers.push_back({x, b});
    return approximates(Hypothesis(target.modulus(), answers), target);
  }, py::arg("hypothesis"), py::arg("concept"));

  m.def("give_up_probability", [](const std::string& c, int k) {
    return enumerate_acquire(Concept::from_string(c), k).give_up_probability;
  });
  m.def("answer_distribution", [](const std::string& c, int q, bool exact, int k) {
    const Concept target = Concept::from_string(c);
    std::vector<std::tuple<int, int, double>> out;
    if (exact) {
      for (const auto& a : enumerate_learn_exact(target, q)) out.emplace_back(a.answer.x, a.answer.b, a.probability);
      return out;
    }
    // Merge over anchors, weighted by acquisition probability; give-up mass is excluded.
    std::map<Answer, double> merged;
    for (const auto& wm : enumerate_acquire(target, k).memories) {
      for (const auto& a : wm.memory.enumerate_answers(q)) merged[a.answer] += wm.probability * a.probability;
    }
    for (const auto& [a, p] : merged) out.emplace_back(a.x, a.b, p);
    return out;
  }, py::arg("concept"), py::arg("q"), py::arg("exact") = false, py::arg("k") = 1);
  m.def("_run_trials", &trials, py::arg("N"), py::arg("k"), py::arg("trials"), py::arg("seed"),
        py::arg("policy") = "all-queries", py::arg("exact") = false, py::arg("threads") = 1);

  m.def("_cover", [](int n, const std::string& mode) { return text(to_json(approx_cover_oracle(n, cover_mode(mode)))); });
  m.def("_counting_audit", [](int n, std::uint64_t index) {
    const Hypothesis h = hypothesis_at(n, index);
    return text(to_json(counting_audit(h, concepts_approximated_by(h))));
  });
  m.def("binary_entropy", &binary_entropy);

  m.def("kl_divergence", [](const std::vector<double>& p, const std::vector<double>& q) {
    return kl_divergence(Distribution(p), Distribution(q));
  });
  m.def("mutual_information", [](const std::vector<double>& prior, const std::vector<std::vector<double>>& per_input) {
    AnswerFamily f{Distribution(prior), {}};
    for (const auto& d : per_input) f.per_input.emplace_back(d);
    f.validate();
    return mutual_information(f);
  }, py::arg("prior"), py::arg("per_input"));
  m.def("_one_way_cost", [](const std::string& problem, double eps) {
    const Json j = Json::parse(problem);
    const OneWayCost c = j.contains("bob_inputs") ? brute_force_one_way_cost(two_sided_from_json(j), eps)
                                                  : brute_force_one_way_cost(single_input_from_json(j), eps);
    return text(to_json(c));
  });

  m.def("_execute", [](const std::string& config, std::optional<std::uint64_t> seed, unsigned threads) {
    ConfigOverrides o;
    o.seed = seed;
    o.threads = threads;
    const ExperimentOutput out = execute(parse_config(Json::parse(config), o));
    return std::make_pair(render_summary(out.summary), out.csv.value_or(""));
  }, py::arg("config"), py::arg("seed") = std::nullopt, py::arg("threads") = 1);
  m.def("_run_config", [](const std::string& config, std::optional<std::uint64_t> seed, std::optional<std::string> out) {
    ConfigOverrides o;
    o.seed = seed;
    if (out) o.out_dir = *out;
    std::ostringstream log;
    const int status = static_cast<int>(run_config(Json::parse(config), o, log));
    return std::make_pair(status, log.str());
  }, py::arg("config"), py::arg("seed") = std::nullopt, py::arg("out") = std::nullopt);
  m.def("_verify", [](const std::string& summary) {
    const VerifyResult r = verify_summary(Json::parse(summary));
    return std::make_pair(r.passed, r.failed);
  });
}
