#include "pqlab/speakability.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <unordered_map>

#include "pqlab/errors.hpp"

namespace pqlab {

namespace {

void require_speakability_modulus(int modulus, const char* what) {
  require_odd_prime(modulus, what);
  if (modulus > kMaxSpeakabilityModulus) {
    throw CapExceeded(std::string(what) + ": N = " + std::to_string(modulus) + " exceeds the desk-scale limit 7");
  }
}

// valid[(q-1) * 2N + 2x + b]: classes for which (x, b) answers q.
std::vector<ClassSet> answer_masks(int modulus) {
  const int classes = class_count(modulus);
  std::vector<ClassSet> masks(static_cast<std::size_t>((modulus - 1) * 2 * modulus), 0);
  for (int cls = 0; cls < classes; ++cls) {
    const Concept c = class_representative(modulus, cls);
    for (int q = 1; q < modulus; ++q) {
      for (int x = 0; x < modulus; ++x) {
        const int b = c.bit(x) ^ c.bit(x + q);
        masks[static_cast<std::size_t>((q - 1) * 2 * modulus + 2 * x + b)] |= ClassSet{1} << cls;
      }
    }
  }
  return masks;
}

struct CoverageSet {
  ClassSet classes;
  std::uint64_t hypothesis;  // first hypothesis (in enumeration order) with this coverage
};

// Distinct nonempty coverage sets over all (2N)^{N-1} hypotheses, ordered by
// first hypothesis index.
std::vector<CoverageSet> distinct_coverage(int modulus, std::uint64_t& scanned) {
  const std::vector<ClassSet> masks = answer_masks(modulus);
  const int queries = modulus - 1;
  const int digits = 2 * modulus;
  const int threshold = approximation_threshold(modulus);
  std::unordered_map<ClassSet, std::uint64_t> first;
  std::vector<CoverageSet> out;

  // at_least[d][k]: classes with >= k correct answers among the queries fixed
  // so far (queries N-1 down to N-d). Outer loops run over the most
  // significant digit so hypotheses are visited in increasing index order.
  std::vector<std::vector<ClassSet>> at_least(static_cast<std::size_t>(queries + 1),
                                              std::vector<ClassSet>(static_cast<std::size_t>(queries + 2), 0));
  at_least[0][0] = all_classes(modulus);
  std::vector<int> digit(static_cast<std::size_t>(queries), 0);
  scanned = 0;

  std::function<void(int)> descend = [&](int depth) {
    if (depth == queries) {
      ++scanned;
      const ClassSet cov = at_least[depth][threshold];
      if (cov == 0) return;
      std::uint64_t index = 0;
      for (int q = queries; q >= 1; --q) index = index * digits + static_cast<std::uint64_t>(digit[q - 1]);
      if (first.emplace(cov, index).second) out.push_back({cov, index});
      return;
    }
    const int q = queries - depth;
    const auto& prev = at_least[depth];
    auto& next = at_least[depth + 1];
    for (int d = 0; d < digits; ++d) {
      digit[q - 1] = d;
      const ClassSet ok = masks[static_cast<std::size_t>((q - 1) * digits + d)];
      next[0] = prev[0];
      for (int k = 1; k <= depth + 1; ++k) next[k] = prev[k] | (prev[k - 1] & ok);
      descend(depth + 1);
    }
  };
  descend(0);
  return out;
}

std::vector<std::size_t> greedy_cover(const std::vector<CoverageSet>& sets, ClassSet universe) {
  std::vector<std::size_t> chosen;
  ClassSet uncovered = universe;
  while (uncovered != 0) {
    std::size_t best = sets.size();
    int best_gain = 0;
    for (std::size_t s = 0; s < sets.size(); ++s) {
      const int gain = std::popcount(sets[s].classes & uncovered);
      if (gain > best_gain) {
        best_gain = gain;
        best = s;
      }
    }
    if (best == sets.size()) throw InvariantBreach("greedy cover: some class is approximated by no hypothesis");
    chosen.push_back(best);
    uncovered &= ~sets[best].classes;
  }
  return chosen;
}

std::vector<CoverageSet> undominated(const std::vector<CoverageSet>& sets) {
  std::vector<CoverageSet> out;
  for (std::size_t s = 0; s < sets.size(); ++s) {
    bool dominated = false;
    for (std::size_t t = 0; t < sets.size() && !dominated; ++t) {
      dominated = t != s && (sets[s].classes & ~sets[t].classes) == 0;  // distinct sets, so strict subset
    }
    if (!dominated) out.push_back(sets[s]);
  }
  std::stable_sort(out.begin(), out.end(), [](const CoverageSet& a, const CoverageSet& b) {
    return std::popcount(a.classes) > std::popcount(b.classes);
  });
  return out;
}

class BranchAndBound {
 public:
  BranchAndBound(const std::vector<CoverageSet>& sets, int classes, std::vector<std::size_t> incumbent)
      : sets_(sets), best_(std::move(incumbent)), covering_(static_cast<std::size_t>(classes)) {
    for (std::size_t s = 0; s < sets.size(); ++s) {
      max_size_ = std::max<std::size_t>(max_size_, static_cast<std::size_t>(std::popcount(sets[s].classes)));
      for (int c = 0; c < classes; ++c) {
        if ((sets[s].classes >> c) & 1U) covering_[c].push_back(s);
      }
    }
  }

  void run(ClassSet universe) {
    std::vector<std::size_t> chosen;
    search(universe, chosen);
  }

  const std::vector<std::size_t>& best() const { return best_; }
  std::uint64_t nodes() const { return nodes_; }

 private:
  void search(ClassSet uncovered, std::vector<std::size_t>& chosen) {
    ++nodes_;
    if (uncovered == 0) {
      if (chosen.size() < best_.size()) best_ = chosen;
      return;
    }
    const std::size_t bound = (static_cast<std::size_t>(std::popcount(uncovered)) + max_size_ - 1) / max_size_;
    if (chosen.size() + bound >= best_.size()) return;
    // Branch on the uncovered class with the fewest candidate sets.
    int pivot = -1;
    for (ClassSet rest = uncovered; rest != 0; rest &= rest - 1) {
      const int c = std::countr_zero(rest);
      if (pivot < 0 || covering_[c].size() < covering_[pivot].size()) pivot = c;
    }
    for (std::size_t s : covering_[pivot]) {
      chosen.push_back(s);
      search(uncovered & ~sets_[s].classes, chosen);
      chosen.pop_back();
    }
  }

  const std::vector<CoverageSet>& sets_;
  std::vector<std::size_t> best_;
  std::vector<std::vector<std::size_t>> covering_;
  std::size_t max_size_ = 1;
  std::uint64_t nodes_ = 0;
};

double entropy_of_counts(const std::map<std::uint64_t, std::uint64_t>& counts, std::uint64_t total) {
  double h = 0.0;
  for (const auto& [key, n] : counts) {
    const double p = static_cast<double>(n) / static_cast<double>(total);
    h -= p * std::log2(p);
  }
  return h;
}

struct JointEntropies {
  double h_c;
  double h_j;
  double h_c_given_j;
};

// Uniform distribution over `concepts` (packed); J = parities over `edges`.
JointEntropies joint_entropies(const std::vector<std::uint64_t>& concepts, const std::vector<Edge>& edges) {
  std::map<std::uint64_t, std::uint64_t> fibre;
  for (std::uint64_t c : concepts) {
    std::uint64_t j = 0;
    for (std::size_t e = 0; e < edges.size(); ++e) {
      j |= (((c >> edges[e].a) ^ (c >> edges[e].b)) & 1U) << e;
    }
    ++fibre[j];
  }
  const auto total = static_cast<double>(concepts.size());
  double h_c_given_j = 0.0;
  for (const auto& [j, n] : fibre) h_c_given_j += (static_cast<double>(n) / total) * std::log2(static_cast<double>(n));
  return {std::log2(total), entropy_of_counts(fibre, concepts.size()), h_c_given_j};
}

AuditCheck at_least(std::string name, double lhs, double rhs) {
  return {std::move(name), lhs, rhs, false, lhs >= rhs - kAuditTolerance};
}

AuditCheck equal(std::string name, double lhs, double rhs) {
  return {std::move(name), lhs, rhs, true, std::abs(lhs - rhs) <= kAuditTolerance};
}

}  // namespace

int class_count(int modulus) { return 1 << (modulus - 1); }

Concept class_representative(int modulus, int cls) {
  return Concept::from_packed(modulus, static_cast<std::uint64_t>(cls) << 1);
}

int class_index(const Concept& c) { return static_cast<int>(c.canonical().packed() >> 1); }

ClassSet all_classes(int modulus) {
  const int n = class_count(modulus);
  return n == 64 ? ~ClassSet{0} : (ClassSet{1} << n) - 1;
}

ClassSet concepts_approximated_by(const Hypothesis& h) {
  require_speakability_modulus(h.modulus(), "concepts_approximated_by");
  ClassSet out = 0;
  for (int cls = 0; cls < class_count(h.modulus()); ++cls) {
    if (approximates(h, class_representative(h.modulus(), cls))) out |= ClassSet{1} << cls;
  }
  return out;
}

std::vector<Concept> members(int modulus, ClassSet classes) {
  std::vector<Concept> out;
  for (ClassSet rest = classes; rest != 0; rest &= rest - 1) {
    out.push_back(class_representative(modulus, std::countr_zero(rest)));
  }
  return out;
}

std::uint64_t hypothesis_count(int modulus) {
  std::uint64_t n = 1;
  for (int q = 1; q < modulus; ++q) n *= static_cast<std::uint64_t>(2 * modulus);
  return n;
}

Hypothesis hypothesis_at(int modulus, std::uint64_t index) {
  require_odd_prime(modulus, "hypothesis_at");
  if (index >= hypothesis_count(modulus)) throw ValidationError("hypothesis_at: index out of range");
  std::vector<Answer> table;
  for (int q = 1; q < modulus; ++q) {
    const auto d = static_cast<int>(index % static_cast<std::uint64_t>(2 * modulus));
    index /= static_cast<std::uint64_t>(2 * modulus);
    table.push_back({d / 2, d % 2});
  }
  return Hypothesis(modulus, std::move(table));
}

CoverCertificate approx_cover_oracle(int modulus, CoverMode mode) {
  require_speakability_modulus(modulus, "approx_cover_oracle");
  if (mode == CoverMode::kExact && modulus > kMaxExactCoverModulus) {
    throw CapExceeded("approx_cover_oracle: exact mode is limited to N <= 5");
  }
  CoverCertificate cert;
  cert.modulus = modulus;
  const ClassSet universe = all_classes(modulus);
  const std::vector<CoverageSet> distinct = distinct_coverage(modulus, cert.stats.hypotheses_scanned);
  cert.stats.distinct_coverage_sets = distinct.size();

  std::vector<CoverageSet> chosen_sets;
  if (mode == CoverMode::kGreedy) {
    for (std::size_t s : greedy_cover(distinct, universe)) chosen_sets.push_back(distinct[s]);
    cert.stats.greedy_size = chosen_sets.size();
    cert.minimal = false;
    cert.method = "greedy largest-gain cover over distinct coverage sets (upper bound)";
  } else {
    const std::vector<CoverageSet> sets = undominated(distinct);
    cert.stats.undominated_sets = sets.size();
    const auto incumbent = greedy_cover(sets, universe);
    cert.stats.greedy_size = incumbent.size();
    BranchAndBound search(sets, class_count(modulus), incumbent);
    search.run(universe);
    cert.stats.nodes_explored = search.nodes();
    for (std::size_t s : search.best()) chosen_sets.push_back(sets[s]);
    cert.minimal = true;
    cert.method = "exhaustive branch-and-bound set cover over undominated coverage sets, greedy incumbent";
  }
  std::sort(chosen_sets.begin(), chosen_sets.end(),
            [](const CoverageSet& a, const CoverageSet& b) { return a.hypothesis < b.hypothesis; });

  cert.coverage.assign(static_cast<std::size_t>(class_count(modulus)), -1);
  for (std::size_t i = 0; i < chosen_sets.size(); ++i) {
    cert.cover.push_back(hypothesis_at(modulus, chosen_sets[i].hypothesis));
    cert.cover_indices.push_back(chosen_sets[i].hypothesis);
    for (ClassSet rest = chosen_sets[i].classes; rest != 0; rest &= rest - 1) {
      int& slot = cert.coverage[static_cast<std::size_t>(std::countr_zero(rest))];
      if (slot < 0) slot = static_cast<int>(i);
    }
  }
  if (!verify_certificate(cert)) throw InvariantBreach("approx_cover_oracle: produced an unsound certificate");
  return cert;
}

bool verify_certificate(const CoverCertificate& cert) {
  if (cert.coverage.size() != static_cast<std::size_t>(class_count(cert.modulus))) return false;
  for (std::size_t cls = 0; cls < cert.coverage.size(); ++cls) {
    const int idx = cert.coverage[cls];
    if (idx < 0 || static_cast<std::size_t>(idx) >= cert.cover.size()) return false;
    const Concept rep = class_representative(cert.modulus, static_cast<int>(cls));
    if (!approximates(cert.cover[static_cast<std::size_t>(idx)], rep)) return false;
    if (!approximates(cert.cover[static_cast<std::size_t>(idx)], rep.complement())) return false;
  }
  return true;
}

double binary_entropy(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("binary_entropy: p must lie in [0, 1]");
  double h = 0.0;
  if (p > 0.0) h -= p * std::log2(p);
  if (p < 1.0) h -= (1.0 - p) * std::log2(1.0 - p);
  return h;
}

CountingAudit counting_audit(const Hypothesis& h0, ClassSet c0) {
  const int n = h0.modulus();
  require_speakability_modulus(n, "counting_audit");
  if (c0 == 0) throw ValidationError("counting_audit: C0 is empty");
  if ((c0 & ~all_classes(n)) != 0) throw ValidationError("counting_audit: C0 names classes beyond 2^{N-1}");

  CountingAudit audit;
  audit.modulus = n;
  audit.c0 = members(n, c0);
  for (const Concept& c : audit.c0) {
    if (!approximates(h0, c)) throw ValidationError("counting_audit: h0 does not approximate " + c.to_string());
  }
  const auto c0_size = static_cast<int>(audit.c0.size());

  // Q0 and the edges e_q.
  std::map<Edge, std::vector<int>> edge_queries;
  for (int q = 1; q < n; ++q) {
    int good = 0;
    for (const Concept& c : audit.c0) good += valid_answer(c, q, h0(q)) ? 1 : 0;
    if (5 * good < 3 * c0_size) continue;
    audit.q0.push_back(q);
    const int a = h0(q).x;
    const int b = mod(a + q, n);
    edge_queries[{std::min(a, b), std::max(a, b)}].push_back(q);
  }
  std::vector<bool> touched(static_cast<std::size_t>(n), false);
  for (const auto& [edge, qs] : edge_queries) {
    audit.e0.push_back(edge);
    audit.e0_queries.push_back(qs);
    touched[edge.a] = touched[edge.b] = true;
  }
  audit.nonisolated = static_cast<int>(std::count(touched.begin(), touched.end(), true));

  // Spanning forest by union-find, ascending q.
  std::vector<int> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> root = [&](int v) { return parent[v] == v ? v : parent[v] = root(parent[v]); };
  std::vector<Edge> forest_oriented;  // (x_q, x_q + q)
  for (int q : audit.q0) {
    const int a = h0(q).x;
    const int b = mod(a + q, n);
    const int ra = root(a);
    const int rb = root(b);
    if (ra == rb) continue;
    parent[ra] = rb;
    audit.forest.push_back({std::min(a, b), std::max(a, b)});
    audit.q0_prime.push_back(q);
    forest_oriented.push_back({a, b});
  }

  // Exact entropies by enumeration: D over all 2^N concepts, D0 over C0 and complements.
  std::vector<std::uint64_t> everything(std::size_t{1} << n);
  std::iota(everything.begin(), everything.end(), std::uint64_t{0});
  std::vector<std::uint64_t> restricted;
  const std::uint64_t full = (std::uint64_t{1} << n) - 1;
  for (const Concept& c : audit.c0) {
    restricted.push_back(c.packed());
    restricted.push_back(c.packed() ^ full);
  }
  const JointEntropies uniform = joint_entropies(everything, forest_oriented);
  const JointEntropies narrowed = joint_entropies(restricted, forest_oriented);
  audit.h_c_uniform = uniform.h_c;
  audit.h_j_uniform = uniform.h_j;
  audit.h_c_given_j_uniform = uniform.h_c_given_j;
  audit.h_c_restricted = narrowed.h_c;
  audit.h_j_restricted = narrowed.h_j;
  audit.h_c_given_j_restricted = narrowed.h_c_given_j;
  audit.log_ratio = std::log2(static_cast<double>(everything.size()) / static_cast<double>(restricted.size()));

  double sum_h_iq = 0.0;
  double max_h_iq = 0.0;
  for (std::size_t e = 0; e < forest_oriented.size(); ++e) {
    const Edge edge = forest_oriented[e];
    const int wanted = h0(audit.q0_prime[e]).b;
    std::size_t ones = 0;
    std::size_t agree = 0;
    for (std::uint64_t c : restricted) {
      const int parity = static_cast<int>(((c >> edge.a) ^ (c >> edge.b)) & 1U);
      ones += static_cast<std::size_t>(parity);
      agree += parity == wanted ? 1 : 0;
    }
    audit.bias.push_back(static_cast<double>(agree) / static_cast<double>(restricted.size()));
    const double h = binary_entropy(static_cast<double>(ones) / static_cast<double>(restricted.size()));
    audit.h_iq.push_back(h);
    sum_h_iq += h;
    max_h_iq = std::max(max_h_iq, h);
  }
  const auto q0p = static_cast<double>(audit.q0_prime.size());
  audit.gap_lower_bound = q0p - sum_h_iq;

  const double queries = n - 1;
  auto& checks = audit.checks;
  checks.push_back(at_least("q0_size", static_cast<double>(audit.q0.size()), queries / 6.0));
  checks.push_back(at_least("e0_size", static_cast<double>(audit.e0.size()), queries / 12.0));
  checks.push_back(at_least("nonisolated_vertices", audit.nonisolated, std::sqrt(2.0 * static_cast<double>(audit.e0.size()))));
  checks.push_back(at_least("forest_edges", static_cast<double>(audit.forest.size()), std::sqrt(queries / 24.0)));
  checks.push_back(equal("log_ratio_identity", audit.log_ratio, audit.h_c_uniform - audit.h_c_restricted));
  checks.push_back(equal("chain_rule_uniform", audit.h_c_uniform, audit.h_j_uniform + audit.h_c_given_j_uniform));
  checks.push_back(equal("chain_rule_restricted", audit.h_c_restricted, audit.h_j_restricted + audit.h_c_given_j_restricted));
  checks.push_back(equal("h_j_uniform_is_forest_size", audit.h_j_uniform, q0p));
  checks.push_back(equal("h_c_given_j_uniform_is_maximal", audit.h_c_given_j_uniform, n - q0p));
  checks.push_back(at_least("first_inequality", audit.log_ratio, audit.h_j_uniform - audit.h_j_restricted));
  checks.push_back(at_least("subadditivity", sum_h_iq, audit.h_j_restricted));
  const double min_bias = audit.bias.empty() ? 1.0 : *std::min_element(audit.bias.begin(), audit.bias.end());
  checks.push_back(at_least("min_bias", min_bias, 3.0 / 5.0));
  checks.push_back(at_least("bias_entropy_bound", 49.0 / 50.0, max_h_iq));
  checks.push_back(at_least("entropy_gap_chain", audit.log_ratio, audit.gap_lower_bound));
  checks.push_back(at_least("gap_over_fifty", audit.log_ratio, q0p / 50.0));
  audit.all_hold = std::all_of(checks.begin(), checks.end(), [](const AuditCheck& c) { return c.holds; });
  audit.unchecked_note = "asymptotic step |E0'|/50 > sqrt(N)/250 for sufficiently large N is not machine-checked";
  return audit;
}

}  // namespace pqlab
