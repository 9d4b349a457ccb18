#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "pqlab/commlab.hpp"
#include "pqlab/errors.hpp"
#include "pqlab/speakability.hpp"

using namespace pqlab;

namespace {

SingleInputProblem single(std::size_t nx, std::size_t nz, const std::vector<std::pair<std::size_t, std::size_t>>& valid,
                          Distribution mu) {
  SingleInputProblem p;
  p.inputs = nx;
  p.answers = nz;
  p.relation.assign(nx * nz, 0);
  for (auto [x, z] : valid) p.relation[x * nz + z] = 1;
  p.mu = std::move(mu);
  return p;
}

double kl_direct(const std::vector<double>& p, const std::vector<double>& q) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) s += p[i] * std::log2(p[i] / q[i]);
  }
  return s;
}

// Counterexample to the per-input bound with log(1/(1-eps_x)) in place of h(eps_x).
struct KlCounterexample {
  AnswerFamily family;
  SingleInputProblem problem;
};

KlCounterexample kl_counterexample() {
  AnswerFamily f{Distribution({0.01, 0.99}), {Distribution({0.9, 0.1}), Distribution({0.0, 1.0})}};
  SingleInputProblem p = single(2, 2, {{0, 0}, {1, 1}}, f.prior);
  return {std::move(f), std::move(p)};
}

// Two-sided problem where the transform at (eps, delta) = (0.6, 0.25) costs more.
TwoSidedProblem cost_counterexample() {
  TwoSidedProblem p;
  p.inputs = 2;
  p.bob_inputs = 2;
  p.answers = 2;
  p.relation = {1, 0, 1, 0, 0, 1, 1, 0};
  p.mu = Distribution::uniform(4);
  return p;
}

}  // namespace

TEST_SUITE("commlab") {
  TEST_CASE("Distribution validates") {
    CHECK_THROWS_AS(Distribution({0.5, 0.4}), ValidationError);
    CHECK_THROWS_AS(Distribution({1.5, -0.5}), ValidationError);
    CHECK_THROWS_AS(Distribution(std::vector<double>{}), ValidationError);
    CHECK(Distribution::point(3, 2)[2] == 1.0);
  }

  TEST_CASE("kl_divergence examples") {
    const Distribution u = Distribution::uniform(2);
    CHECK(kl_divergence(u, u) == 0.0);
    CHECK(kl_divergence(Distribution::point(2, 0), u) == doctest::Approx(1.0));
    CHECK(std::isinf(kl_divergence(u, Distribution::point(2, 0))));
    CHECK_THROWS_AS(kl_divergence(u, Distribution::uniform(3)), ValidationError);
  }

  TEST_CASE("mutual_information examples") {
    AnswerFamily same{Distribution({0.3, 0.7}), {Distribution({0.2, 0.8}), Distribution({0.2, 0.8})}};
    CHECK(mutual_information(same) == doctest::Approx(0.0));
    AnswerFamily disjoint{Distribution::uniform(2), {Distribution::point(2, 0), Distribution::point(2, 1)}};
    CHECK(mutual_information(disjoint) == doctest::Approx(1.0));
  }

  TEST_CASE("mutual_information on random families matches the definition") {
    Rng rng(31);
    for (int t = 0; t < 1000; ++t) {
      const std::size_t nx = 1 + rng.below(6), nz = 1 + rng.below(6);
      AnswerFamily f{Distribution(oracle::random_simplex(nx, rng)), {}};
      for (std::size_t x = 0; x < nx; ++x) f.per_input.emplace_back(oracle::random_simplex(nz, rng));
      std::vector<double> marginal(nz, 0.0);
      for (std::size_t x = 0; x < nx; ++x) {
        for (std::size_t z = 0; z < nz; ++z) marginal[z] += f.prior[x] * f.per_input[x][z];
      }
      double direct = 0.0;
      for (std::size_t x = 0; x < nx; ++x) direct += f.prior[x] * kl_direct(f.per_input[x].probabilities(), marginal);
      const double mi = mutual_information(f);
      REQUIRE(mi >= -1e-12);
      REQUIRE(mi == doctest::Approx(direct).epsilon(1e-9));
    }
  }

  TEST_CASE("refine_family examples") {
    AnswerFamily perfect{Distribution::uniform(2), {Distribution::point(2, 0), Distribution::point(2, 1)}};
    const auto p = single(2, 2, {{0, 0}, {1, 1}}, Distribution::uniform(2));
    const RefinedFamily r = refine_family(perfect, p);
    CHECK(r.error == std::vector<double>{0.0, 0.0});
    CHECK(r.family.per_input[0].probabilities() == perfect.per_input[0].probabilities());

    AnswerFamily half{Distribution::uniform(2), {Distribution::uniform(2), Distribution::point(2, 1)}};
    const RefinedFamily h = refine_family(half, p);
    CHECK(h.error[0] == doctest::Approx(0.5));
    CHECK(h.family.per_input[0][0] == doctest::Approx(1.0));

    AnswerFamily never{Distribution::uniform(2), {Distribution::point(2, 1), Distribution::point(2, 1)}};
    CHECK_THROWS_AS(refine_family(never, p), ValidationError);
  }

  TEST_CASE("per-input KL bound: stated form fails, entropy form holds") {
    const auto [f, p] = kl_counterexample();
    const KlChainAudit a = audit_kl_chain(f, p, 1.0);
    CHECK_FALSE(a.rows[0].stated_holds);
    CHECK(a.rows[0].kl_refined > a.rows[0].stated_bound);
    CHECK(a.rows[0].entropy_holds);
    CHECK_FALSE(a.per_input_stated_holds);
    CHECK(a.per_input_entropy_holds);
  }

  TEST_CASE("per-input entropy-corrected bound holds on random instances") {
    Rng rng(7);
    for (int t = 0; t < 200; ++t) {
      const auto inst = oracle::random_conversion_instance(rng);
      const KlChainAudit a = audit_kl_chain(inst.family, inst.problem, std::max(1.0, mutual_information(inst.family)));
      REQUIRE(a.per_input_entropy_holds);
      REQUIRE(a.simplified_applicable);
    }
  }

  TEST_CASE("conversion sample count") {
    CHECK(conversion_exponent(0.5, 0.1) == doctest::Approx(4.4));
    CHECK(static_cast<std::uint64_t>(std::ceil(std::exp2(conversion_exponent(0.5, 0.1)))) == 22);
    AnswerFamily perfect{Distribution::uniform(2), {Distribution::point(2, 0), Distribution::point(2, 1)}};
    const auto p = single(2, 2, {{0, 0}, {1, 1}}, Distribution::uniform(2));
    CHECK_THROWS_AS(convert_to_classical(perfect, p, 0.5, 1.0, {}), CapExceeded);
    CHECK_THROWS_AS(convert_to_classical(perfect, p, 0.5, 0.5, {}), ValidationError);
  }

  TEST_CASE("conversion with a low-information family") {
    AnswerFamily f{Distribution::uniform(2), {Distribution({0.6, 0.4}), Distribution({0.4, 0.6})}};
    const auto p = single(2, 2, {{0, 0}, {1, 1}}, Distribution::uniform(2));
    const double m = 0.1;
    REQUIRE(mutual_information(f) <= m);
    ConversionOptions o;
    o.seed = 4;
    const ConversionReport r = convert_to_classical(f, p, 0.5, m, o);
    CHECK(r.samples == 22);
    CHECK(r.message_bits == 5);
    CHECK(r.empirical_error <= 0.5);
    CHECK(r.exact_error <= 0.5);
    CHECK(r.exact_error == doctest::Approx(std::pow(0.5, 22)));
  }

  TEST_CASE("conversion with identical answers needs one sample") {
    AnswerFamily f{Distribution::uniform(3), {Distribution::point(2, 1), Distribution::point(2, 1), Distribution::point(2, 1)}};
    const auto p = single(3, 2, {{0, 1}, {1, 1}, {2, 1}}, Distribution::uniform(3));
    const ConversionReport r = convert_to_classical(f, p, 0.5, 0.0, {});
    CHECK(r.samples == 1);
    CHECK(r.empirical_error == 0.0);
    CHECK(r.exact_error == 0.0);
  }

  TEST_CASE("conversion error <= eps on random instances") {
    Rng rng(7);
    for (int t = 0; t < 100; ++t) {
      const auto inst = oracle::random_conversion_instance(rng);
      ConversionOptions o;
      o.seed = static_cast<std::uint64_t>(t);
      const ConversionReport r =
          convert_to_classical(inst.family, inst.problem, inst.eps, mutual_information(inst.family), o);
      REQUIRE(r.exact_error <= inst.eps);
      REQUIRE(r.empirical_error <= inst.eps);
    }
  }

  TEST_CASE("cost oracle examples") {
    const auto constant = single(3, 2, {{0, 1}, {1, 1}, {2, 1}}, Distribution::uniform(3));
    CHECK(brute_force_one_way_cost(constant, 0.0).messages == 1);
    const auto equality = single(4, 4, {{0, 0}, {1, 1}, {2, 2}, {3, 3}}, Distribution::uniform(4));
    const OneWayCost c = brute_force_one_way_cost(equality, 0.0);
    CHECK(c.messages == 4);
    CHECK(c.bits == 2);
    CHECK(brute_force_one_way_cost(equality, 1.0).messages == 1);
    CHECK(brute_force_one_way_cost(equality, 0.5).messages == 2);
  }

  TEST_CASE("cost oracle caps") {
    SingleInputProblem big = single(9, 2, {}, Distribution::uniform(9));
    for (std::size_t x = 0; x < 9; ++x) big.relation[x * 2] = 1;
    CHECK_THROWS_AS(brute_force_one_way_cost(big, 0.0), CapExceeded);
  }

  TEST_CASE("cost oracle agrees with naive enumeration and is monotone in eps") {
    Rng rng(123);
    for (int t = 0; t < 60; ++t) {
      const TwoSidedProblem p = oracle::random_two_sided(rng, 5, 3, 3, 0.5);
      std::size_t previous = 1000;
      for (double eps : {0.0, 0.1, 0.2, 0.3, 0.5, 0.8, 1.0}) {
        const OneWayCost c = brute_force_one_way_cost(p, eps);
        REQUIRE(c.messages == oracle::naive_cost(p, eps, oracle::best_error_two_sided));
        REQUIRE(c.messages <= previous);
        previous = c.messages;
      }
    }
  }

  TEST_CASE("func_eval_problem examples") {
    const TwoSidedProblem all = func_eval_problem({{0, 0}, {0, 1}, {1, 0}, {1, 1}}, 2);
    CHECK(std::count(all.relation.begin(), all.relation.end(), 1) == 8);
    const TwoSidedProblem singleton = func_eval_problem({{1, 0, 1}}, 2);
    CHECK(brute_force_one_way_cost(singleton, 0.0).messages == 1);
    // indicator functions x -> [x == i]: Alice must name i
    std::vector<std::vector<std::size_t>> indicators(4, std::vector<std::size_t>(4, 0));
    for (std::size_t i = 0; i < 4; ++i) indicators[i][i] = 1;
    CHECK(brute_force_one_way_cost(func_eval_problem(indicators, 2), 0.0).messages == 4);
    CHECK_THROWS_AS(func_eval_problem({{0, 2}}, 2), ValidationError);
  }

  TEST_CASE("single_input_transform of a total function at eps = 1") {
    const TwoSidedProblem p = func_eval_problem({{0, 1, 1}, {1, 0, 0}}, 2);
    const SingleInputTransform t = single_input_transform(p, 1.0);
    CHECK(t.problem.answers == 8);
    for (std::size_t x = 0; x < 2; ++x) {
      for (std::size_t z = 0; z < 8; ++z) {
        const auto tuple = decode_tuple(z, 2, 3);
        const bool agrees = tuple[0] == (x == 0 ? 0U : 1U) && tuple[1] == (x == 0 ? 1U : 0U) &&
                            tuple[2] == (x == 0 ? 1U : 0U);
        CHECK(t.problem.accepts(x, z) == agrees);
      }
    }
    CHECK(decode_tuple(4, 2, 3) == std::vector<std::size_t>{1, 0, 0});
  }

  TEST_CASE("single_input_transform degenerate threshold") {
    const TwoSidedProblem p = func_eval_problem({{0, 1}, {1, 1}}, 2);
    const SingleInputTransform t = single_input_transform(p, 0.1);
    CHECK(t.degenerate_threshold);
    for (std::size_t z = 0; z < 4; ++z) {
      const auto tuple = decode_tuple(z, 2, 2);
      CHECK(t.problem.accepts(0, z) == (tuple[0] == 0 || tuple[1] == 1));
    }
    CHECK_FALSE(single_input_transform(p, 0.9).degenerate_threshold);
    CHECK_THROWS_AS(single_input_transform(p, 0.5, TransformOptions{3}), CapExceeded);
  }

  TEST_CASE("transform cost at the same delta can exceed the original") {
    const TwoSidedProblem p = cost_counterexample();
    CHECK(brute_force_one_way_cost(p, 0.25).messages == 1);
    const SingleInputTransform t = single_input_transform(p, 0.6);
    CHECK(brute_force_one_way_cost(t.problem, 0.25).messages == 2);
    CHECK(brute_force_one_way_cost(t.problem, 0.25 / (1.0 - 0.6)).messages == 1);
  }

  TEST_CASE("transform cost at delta / (1 - eps) never exceeds the original") {
    Rng rng(55);
    for (int t = 0; t < 40; ++t) {
      const TwoSidedProblem p = oracle::random_two_sided(rng, 4, 3, 3, 0.5);
      for (double eps : {0.25, 0.5, 2.0 / 3.0}) {
        const SingleInputTransform tr = single_input_transform(p, eps);
        for (double delta : {0.0, 0.1, 0.25}) {
          const std::size_t original = brute_force_one_way_cost(p, delta).messages;
          const double relaxed = std::min(1.0, delta / (1.0 - eps));
          REQUIRE(brute_force_one_way_cost(tr.problem, relaxed).messages <= original);
        }
      }
    }
  }

  TEST_CASE("single-input cost oracle agrees with naive enumeration") {
    Rng rng(8);
    for (int t = 0; t < 40; ++t) {
      const TwoSidedProblem p = oracle::random_two_sided(rng, 4, 2, 3, 0.5);
      const SingleInputTransform tr = single_input_transform(p, 0.5);
      for (double eps : {0.0, 0.2, 0.4}) {
        REQUIRE(brute_force_one_way_cost(tr.problem, eps).messages ==
                oracle::naive_cost(tr.problem, eps, oracle::best_error_single));
      }
    }
  }

  TEST_CASE("concept_to_comm examples") {
    const SingleInputProblem p = concept_to_comm(5);
    CHECK(p.inputs == 32);
    CHECK(p.answers == 10000);
    const Concept c = Concept::from_string("01101");
    const Hypothesis h = hypothesis_from(c);
    CHECK(p.accepts(c.packed(), concept_answer_index(5, h.table())));
    auto one_wrong = h.table();
    one_wrong[2].b ^= 1;
    CHECK_FALSE(p.accepts(c.packed(), concept_answer_index(5, one_wrong)));
    auto all_wrong = h.table();
    for (auto& a : all_wrong) a.b ^= 1;
    CHECK_FALSE(p.accepts(c.packed(), concept_answer_index(5, all_wrong)));
    CHECK(concept_answer_index(5, h.table()) < hypothesis_count(5));
    CHECK(hypothesis_at(5, concept_answer_index(5, h.table())) == h);
    CHECK_THROWS_AS(concept_to_comm(7), CapExceeded);
  }
}
