#include <doctest.h>

#include <bit>
#include <cmath>
#include <functional>
#include <numeric>

#include "oracles.hpp"
#include "pqlab/errors.hpp"
#include "pqlab/speakability.hpp"

using namespace pqlab;

namespace {

// Classes covered by h, from the brute-force concept enumeration.
ClassSet oracle_classes(const Hypothesis& h) {
  ClassSet s = 0;
  for (std::uint64_t c : oracle::approximated_concepts(h)) {
    if ((c & 1U) == 0) s |= ClassSet{1} << (c >> 1);
  }
  return s;
}

// Minimal cover size by trying every subset of hypotheses of size s (N = 3).
int naive_min_cover(int n) {
  std::vector<ClassSet> sets;
  for (std::uint64_t i = 0; i < hypothesis_count(n); ++i) sets.push_back(oracle_classes(hypothesis_at(n, i)));
  const ClassSet all = (ClassSet{1} << (1 << (n - 1))) - 1;
  for (int s = 1;; ++s) {
    std::vector<std::size_t> pick(static_cast<std::size_t>(s), 0);
    std::function<bool(std::size_t, std::size_t, ClassSet)> go = [&](std::size_t depth, std::size_t from, ClassSet acc) {
      if (depth == pick.size()) return acc == all;
      for (std::size_t i = from; i < sets.size(); ++i) {
        if (go(depth + 1, i + 1, acc | sets[i])) return true;
      }
      return false;
    };
    if (go(0, 0, 0)) return s;
  }
}

}  // namespace

TEST_SUITE("speakability") {
  TEST_CASE("class helpers") {
    CHECK(class_count(5) == 16);
    CHECK(class_representative(5, 0b1011).to_string() == "01101");
    CHECK(class_index(Concept::from_string("10010")) == class_index(Concept::from_string("01101")));
    CHECK(members(3, all_classes(3)).size() == 4);
    CHECK(hypothesis_count(3) == 36);
    CHECK(hypothesis_at(5, 0).table() == std::vector<Answer>(4, Answer{0, 0}));
    CHECK(hypothesis_at(3, 7).table() == std::vector<Answer>{{0, 1}, {0, 1}});
    CHECK_THROWS_AS(hypothesis_at(3, 36), ValidationError);
  }

  TEST_CASE("concepts_approximated_by examples") {
    const ClassSet s = concepts_approximated_by(Hypothesis(3, {{0, 0}, {1, 0}}));
    const auto m = members(3, s);
    REQUIRE(m.size() == 2);
    for (const Concept& c : m) {
      CHECK(c.bit(0) == 0);
      CHECK(c.bit(1) == 0);
    }
    CHECK(concepts_approximated_by(Hypothesis(3, {{0, 0}, {1, 1}})) == 0);
    const Concept c = Concept::from_string("0110100");
    CHECK((concepts_approximated_by(hypothesis_from(c)) >> class_index(c) & 1U) == 1U);
  }

  TEST_CASE("concepts_approximated_by agrees with brute force") {
    for (int n : {3, 5}) {
      for (std::uint64_t i = 0; i < hypothesis_count(n); i += n == 3 ? 1 : 7) {
        const Hypothesis h = hypothesis_at(n, i);
        REQUIRE(concepts_approximated_by(h) == oracle_classes(h));
      }
    }
    Rng rng(77);
    for (int t = 0; t < 300; ++t) {
      const Hypothesis h = hypothesis_at(7, rng.below(hypothesis_count(7)));
      REQUIRE(concepts_approximated_by(h) == oracle_classes(h));
    }
  }

  TEST_CASE("exact cover N = 3 is minimal with size 2") {
    const CoverCertificate cert = approx_cover_oracle(3, CoverMode::kExact);
    CHECK(cert.minimal);
    CHECK(cert.cover.size() == 2);
    CHECK(verify_certificate(cert));
    CHECK(naive_min_cover(3) == 2);
    const CoverCertificate greedy = approx_cover_oracle(3, CoverMode::kGreedy);
    CHECK_FALSE(greedy.minimal);
    CHECK(greedy.cover.size() >= cert.cover.size());
    CHECK(verify_certificate(greedy));
  }

  TEST_CASE("exact cover N = 5") {
    const CoverCertificate cert = approx_cover_oracle(5, CoverMode::kExact);
    CHECK(cert.minimal);
    CHECK(cert.cover.size() == 2);
    CHECK(verify_certificate(cert));
    // no single hypothesis covers every class
    bool single = false;
    for (std::uint64_t i = 0; i < hypothesis_count(5) && !single; ++i) {
      single = oracle_classes(hypothesis_at(5, i)) == all_classes(5);
    }
    CHECK_FALSE(single);
  }

  TEST_CASE("cover limits") {
    CHECK_THROWS_AS(approx_cover_oracle(7, CoverMode::kExact), CapExceeded);
    CHECK_THROWS_AS(approx_cover_oracle(11, CoverMode::kGreedy), CapExceeded);
    CHECK_THROWS_AS(approx_cover_oracle(9, CoverMode::kGreedy), ValidationError);
  }

  TEST_CASE("verify_certificate catches a tampered map") {
    CoverCertificate cert = approx_cover_oracle(3, CoverMode::kExact);
    bool caught = false;
    for (std::size_t c = 0; c < cert.coverage.size(); ++c) {
      CoverCertificate bad = cert;
      bad.coverage[c] = 1 - bad.coverage[c];
      caught = caught || !verify_certificate(bad);
    }
    CHECK(caught);
  }

  TEST_CASE("binary_entropy") {
    CHECK(binary_entropy(0.5) == doctest::Approx(1.0));
    CHECK(binary_entropy(0.0) == 0.0);
    CHECK(binary_entropy(1.0) == 0.0);
    CHECK(binary_entropy(0.6) == doctest::Approx(0.97095).epsilon(1e-4));
    CHECK(binary_entropy(0.6) <= 49.0 / 50.0);
    CHECK_THROWS_AS(binary_entropy(1.5), ValidationError);
    CHECK_THROWS_AS(binary_entropy(-0.1), ValidationError);
  }

  TEST_CASE("audit of a single concept") {
    for (const char* bits : {"010", "01101", "0110100"}) {
      const Concept c = Concept::from_string(bits);
      const int n = c.modulus();
      const CountingAudit a = counting_audit(hypothesis_from(c), ClassSet{1} << class_index(c));
      CHECK(a.q0.size() == static_cast<std::size_t>(n - 1));
      CHECK(a.gap_lower_bound <= std::log2(class_count(n)) + 1e-9);
      CHECK(a.all_hold);
      for (double b : a.bias) CHECK(b >= 0.6 - 1e-12);
    }
  }

  TEST_CASE("audits of cover hypotheses hold, N = 3 and 5") {
    for (int n : {3, 5}) {
      const CoverCertificate cert = approx_cover_oracle(n, CoverMode::kExact);
      for (const Hypothesis& h : cert.cover) {
        const ClassSet c0 = concepts_approximated_by(h);
        const CountingAudit a = counting_audit(h, c0);
        CHECK(a.all_hold);
        CHECK(static_cast<double>(a.q0.size()) >= (n - 1) / 6.0);
        CHECK(a.h_c_uniform == doctest::Approx(a.h_j_uniform + a.h_c_given_j_uniform).epsilon(1e-12));
        CHECK(a.h_c_restricted == doctest::Approx(a.h_j_restricted + a.h_c_given_j_restricted).epsilon(1e-12));
        CHECK(a.h_c_restricted == doctest::Approx(std::log2(2.0 * std::popcount(c0))).epsilon(1e-12));
        CHECK(a.forest.size() <= a.e0.size());
        for (double b : a.bias) CHECK(b >= 0.6 - 1e-12);
        for (double hq : a.h_iq) CHECK(hq <= 49.0 / 50.0 + 1e-12);
      }
    }
  }

  TEST_CASE("audit forest is acyclic and edges are e_q") {
    Rng rng(9);
    int audited = 0;
    while (audited < 100) {
      const Hypothesis h = hypothesis_at(7, rng.below(hypothesis_count(7)));
      const ClassSet c0 = concepts_approximated_by(h);
      if (c0 == 0) continue;
      ++audited;
      const CountingAudit a = counting_audit(h, c0);
      CHECK(a.all_hold);
      std::vector<int> parent(7);
      std::iota(parent.begin(), parent.end(), 0);
      std::function<int(int)> find = [&](int v) { return parent[v] == v ? v : parent[v] = find(parent[v]); };
      for (const Edge& e : a.forest) {
        REQUIRE(find(e.a) != find(e.b));
        parent[find(e.a)] = find(e.b);
      }
      REQUIRE(a.q0_prime.size() == a.forest.size());
      for (std::size_t i = 0; i < a.forest.size(); ++i) {
        const int q = a.q0_prime[i];
        const int x = h(q).x;
        const Edge e{std::min(x, (x + q) % 7), std::max(x, (x + q) % 7)};
        CHECK(e == a.forest[i]);
      }
    }
  }

  TEST_CASE("audit preconditions") {
    const Hypothesis h(3, {{0, 0}, {1, 0}});
    CHECK_THROWS_AS(counting_audit(h, 0), ValidationError);
    CHECK_THROWS_AS(counting_audit(h, all_classes(3)), ValidationError);
  }
}
