#include "pqlab/commlab.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <string>

#include "pqlab/errors.hpp"
#include "pqlab/modmath.hpp"
#include "pqlab/speakability.hpp"

namespace pqlab {

namespace {

double log2_inverse_complement(double eps) { return -std::log2(1.0 - eps); }

std::vector<double> cumulative(const Distribution& d) {
  std::vector<double> c(d.size());
  std::partial_sum(d.probabilities().begin(), d.probabilities().end(), c.begin());
  return c;
}

std::size_t sample(const std::vector<double>& cdf, Rng& rng) {
  const double u = rng.uniform() * cdf.back();
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  auto idx = static_cast<std::size_t>(it - cdf.begin());
  if (idx >= cdf.size()) idx = cdf.size() - 1;
  return idx;
}

void require_matching_sizes(const AnswerFamily& f, const SingleInputProblem& p) {
  f.validate();
  p.validate();
  if (f.inputs() != p.inputs || f.answers() != p.answers) {
    throw ValidationError("answer family and problem disagree on |X| or |Z|");
  }
}

// Best total weight over partitions of `universe` into at most c groups,
// where one group S earns value[S]. Returns the smallest c meeting `target`.
OneWayCost minimal_partition(const std::vector<double>& value, std::size_t inputs, double eps) {
  const std::size_t subsets = std::size_t{1} << inputs;
  const std::size_t full = subsets - 1;
  std::vector<double> previous(value);  // c = 1: single group
  previous[0] = 0.0;
  for (std::size_t c = 1;; ++c) {
    const double error = 1.0 - previous[full];
    if (error <= eps + kCostTolerance) {
      const int bits = c <= 1 ? 0 : std::bit_width(c - 1);
      return {c, bits, std::max(0.0, error)};
    }
    if (c >= std::max<std::size_t>(inputs, 1)) {
      throw ValidationError("no deterministic one-way protocol reaches error " + std::to_string(eps) +
                            " (best " + std::to_string(error) + ")");
    }
    std::vector<double> next(subsets, 0.0);
    for (std::size_t s = 1; s < subsets; ++s) {
      const std::size_t low = s & (~s + 1);
      const std::size_t rest = s ^ low;
      // Group containing the lowest element: low | t for t a submask of rest.
      double best = 0.0;
      for (std::size_t t = rest;; t = (t - 1) & rest) {
        best = std::max(best, value[low | t] + previous[rest ^ t]);
        if (t == 0) break;
      }
      next[s] = best;
    }
    previous = std::move(next);
  }
}

}  // namespace

Distribution::Distribution(std::vector<double> p) : p_(std::move(p)) {
  if (p_.empty()) throw ValidationError("Distribution: empty support");
  double total = 0.0;
  for (double v : p_) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw ValidationError("Distribution: probabilities must be finite and nonnegative");
    total += v;
  }
  if (std::abs(total - 1.0) > kDistributionTolerance) {
    throw ValidationError("Distribution: probabilities sum to " + std::to_string(total) + ", not 1");
  }
}

Distribution Distribution::uniform(std::size_t n) {
  if (n == 0) throw ValidationError("Distribution: empty support");
  return Distribution(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

Distribution Distribution::point(std::size_t n, std::size_t at) {
  if (at >= n) throw ValidationError("Distribution::point: label out of range");
  std::vector<double> p(n, 0.0);
  p[at] = 1.0;
  return Distribution(std::move(p));
}

void AnswerFamily::validate() const {
  if (per_input.size() != prior.size()) throw ValidationError("AnswerFamily: need one answer distribution per input");
  for (const auto& d : per_input) {
    if (d.size() != answers()) throw ValidationError("AnswerFamily: answer distributions differ in support size");
  }
}

void SingleInputProblem::validate() const {
  if (inputs == 0 || answers == 0) throw ValidationError("SingleInputProblem: empty input or answer set");
  if (relation.size() != inputs * answers) throw ValidationError("SingleInputProblem: relation size mismatch");
  if (mu.size() != inputs) throw ValidationError("SingleInputProblem: mu must be a distribution over X");
}

void TwoSidedProblem::validate() const {
  if (inputs == 0 || bob_inputs == 0 || answers == 0) throw ValidationError("TwoSidedProblem: empty X, Y, or Z");
  if (relation.size() != inputs * bob_inputs * answers) throw ValidationError("TwoSidedProblem: relation size mismatch");
  if (mu.size() != inputs * bob_inputs) throw ValidationError("TwoSidedProblem: mu must be a distribution over X x Y");
}

double kl_divergence(const Distribution& p, const Distribution& q) {
  if (p.size() != q.size()) throw ValidationError("kl_divergence: distributions over different supports");
  double total = 0.0;
  for (std::size_t z = 0; z < p.size(); ++z) {
    if (p[z] == 0.0) continue;
    if (q[z] == 0.0) return kInfinity;
    total += p[z] * std::log2(p[z] / q[z]);
  }
  return std::max(total, 0.0);
}

Distribution answer_marginal(const AnswerFamily& f) {
  f.validate();
  std::vector<double> marginal(f.answers(), 0.0);
  for (std::size_t x = 0; x < f.inputs(); ++x) {
    for (std::size_t z = 0; z < f.answers(); ++z) marginal[z] += f.prior[x] * f.per_input[x][z];
  }
  // Re-normalize away rounding so the marginal is a valid Distribution.
  const double total = std::accumulate(marginal.begin(), marginal.end(), 0.0);
  for (double& v : marginal) v /= total;
  return Distribution(std::move(marginal));
}

double mutual_information(const AnswerFamily& f) {
  const Distribution marginal = answer_marginal(f);
  double total = 0.0;
  for (std::size_t x = 0; x < f.inputs(); ++x) {
    if (f.prior[x] > 0.0) total += f.prior[x] * kl_divergence(f.per_input[x], marginal);
  }
  return total;
}

RefinedFamily refine_family(const AnswerFamily& f, const SingleInputProblem& p) {
  require_matching_sizes(f, p);
  RefinedFamily out{f, std::vector<double>(f.inputs(), 0.0)};
  out.family.per_input.clear();
  for (std::size_t x = 0; x < f.inputs(); ++x) {
    double correct = 0.0;
    for (std::size_t z = 0; z < f.answers(); ++z) correct += p.accepts(x, z) ? f.per_input[x][z] : 0.0;
    if (correct <= 0.0) throw ValidationError("refine_family: input " + std::to_string(x) + " is never answered correctly");
    std::vector<double> refined(f.answers(), 0.0);
    for (std::size_t z = 0; z < f.answers(); ++z) refined[z] = p.accepts(x, z) ? f.per_input[x][z] / correct : 0.0;
    out.error[x] = std::max(0.0, 1.0 - correct);
    out.family.per_input.emplace_back(std::move(refined));
  }
  return out;
}

double family_error(const AnswerFamily& f, const SingleInputProblem& p) {
  require_matching_sizes(f, p);
  double wrong = 0.0;
  for (std::size_t x = 0; x < f.inputs(); ++x) {
    for (std::size_t z = 0; z < f.answers(); ++z) {
      if (!p.accepts(x, z)) wrong += f.prior[x] * f.per_input[x][z];
    }
  }
  return wrong;
}

KlChainAudit audit_kl_chain(const AnswerFamily& f, const SingleInputProblem& p, double declared_cost) {
  const RefinedFamily refined = refine_family(f, p);
  const Distribution marginal = answer_marginal(f);
  KlChainAudit audit{};
  audit.declared_cost = declared_cost;
  audit.mutual_information = mutual_information(f);
  audit.max_error = *std::max_element(refined.error.begin(), refined.error.end());
  audit.per_input_stated_holds = true;
  audit.per_input_entropy_holds = true;
  for (std::size_t x = 0; x < f.inputs(); ++x) {
    KlChainRow row{};
    row.error = refined.error[x];
    row.kl_original = kl_divergence(f.per_input[x], marginal);
    row.kl_refined = kl_divergence(refined.family.per_input[x], marginal);
    const double keep = 1.0 - row.error;
    row.stated_bound = (row.kl_original + log2_inverse_complement(row.error)) / keep;
    row.entropy_bound = (row.kl_original + binary_entropy(std::clamp(row.error, 0.0, 1.0))) / keep;
    row.stated_holds = row.kl_refined <= row.stated_bound + kChainTolerance;
    row.entropy_holds = row.kl_refined <= row.entropy_bound + kChainTolerance;
    audit.per_input_stated_holds = audit.per_input_stated_holds && row.stated_holds;
    audit.per_input_entropy_holds = audit.per_input_entropy_holds && row.entropy_holds;
    if (f.prior[x] > 0.0) audit.expected_refined_kl += f.prior[x] * row.kl_refined;
    audit.rows.push_back(row);
  }
  const double keep = 1.0 - audit.max_error;
  audit.aggregate_bound = declared_cost / keep + log2_inverse_complement(audit.max_error) / keep;
  audit.aggregate_holds = audit.expected_refined_kl <= audit.aggregate_bound + kChainTolerance;
  audit.simplified_bound = 2.0 * declared_cost / keep;
  audit.simplified_applicable = declared_cost >= 1.0;
  audit.simplified_holds = audit.expected_refined_kl < audit.simplified_bound + kChainTolerance;
  return audit;
}

double conversion_exponent(double eps, double m) { return 11.0 * m / (eps * (1.0 - eps)); }

ConversionReport convert_to_classical(const AnswerFamily& f, const SingleInputProblem& p, double eps, double m,
                                      const ConversionOptions& options) {
  require_matching_sizes(f, p);
  if (!(eps > 0.0 && eps < 1.0)) throw ValidationError("convert_to_classical: eps must lie in (0, 1)");
  if (!(m >= 0.0)) throw ValidationError("convert_to_classical: m must be nonnegative");
  ConversionReport r{};
  r.declared_cost = m;
  r.eps = eps;
  r.mutual_information = mutual_information(f);
  if (m < r.mutual_information - 1e-6) {
    throw ValidationError("convert_to_classical: declared cost m = " + std::to_string(m) +
                          " is below I(A;B) = " + std::to_string(r.mutual_information));
  }
  r.family_error = family_error(f, p);
  if (r.family_error > eps + kDistributionTolerance) {
    throw ValidationError("convert_to_classical: the answer family errs with probability " +
                          std::to_string(r.family_error) + " > eps");
  }
  r.exponent = conversion_exponent(eps, m);
  const double samples = std::ceil(std::exp2(r.exponent));
  if (r.exponent >= 63.0 || samples > static_cast<double>(options.sample_cap)) {
    throw CapExceeded("convert_to_classical: M = 2^" + std::to_string(r.exponent) + " samples exceeds the cap of " +
                      std::to_string(options.sample_cap));
  }
  r.samples = static_cast<std::uint64_t>(samples);
  r.message_bits = static_cast<std::uint64_t>(std::ceil(r.exponent));

  const Distribution marginal = answer_marginal(f);
  const RefinedFamily refined = refine_family(f, p);
  const double x_prime_limit = 5.0 * m / (eps * (1.0 - eps));
  const double hit_floor = std::exp2(-10.0 * m / (eps * (1.0 - eps)) - 1.0);
  r.hit_bound_holds = true;
  for (std::size_t x = 0; x < f.inputs(); ++x) {
    double hit = 0.0;
    for (std::size_t z = 0; z < f.answers(); ++z) hit += p.accepts(x, z) ? marginal[z] : 0.0;
    hit = std::min(hit, 1.0);
    r.hit_probability.push_back(hit);
    const double miss = std::pow(1.0 - hit, static_cast<double>(r.samples));
    r.miss_probability.push_back(miss);
    r.exact_error += f.prior[x] * miss;
    const bool in_x_prime = kl_divergence(refined.family.per_input[x], marginal) < x_prime_limit;
    r.in_x_prime.push_back(in_x_prime);
    if (in_x_prime) {
      r.x_prime_mass += f.prior[x];
      r.hit_bound_holds = r.hit_bound_holds && hit > hit_floor;
    }
  }
  r.x_prime_mass_holds = r.x_prime_mass > 1.0 - eps / 2.0;

  const std::vector<double> prior_cdf = cumulative(f.prior);
  const std::vector<double> answer_cdf = cumulative(marginal);
  r.draws = options.draws;
  for (std::uint64_t d = 0; d < options.draws; ++d) {
    Rng rng = Rng::stream(options.seed, d);
    const std::size_t x = sample(prior_cdf, rng);
    bool found = false;
    // Shared list of M answers; Alice points at the first valid one.
    for (std::uint64_t s = 0; s < r.samples && !found; ++s) found = p.accepts(x, sample(answer_cdf, rng));
    r.failures += found ? 0 : 1;
  }
  r.empirical_error = options.draws == 0 ? 0.0 : static_cast<double>(r.failures) / static_cast<double>(options.draws);
  return r;
}

std::vector<std::size_t> decode_tuple(std::size_t index, std::size_t answers, std::size_t bob_inputs) {
  std::vector<std::size_t> tuple(bob_inputs);
  for (std::size_t y = bob_inputs; y-- > 0;) {
    tuple[y] = index % answers;
    index /= answers;
  }
  return tuple;
}

SingleInputTransform single_input_transform(const TwoSidedProblem& p, double eps, const TransformOptions& options) {
  p.validate();
  double tuples = 1.0;
  for (std::size_t y = 0; y < p.bob_inputs; ++y) tuples *= static_cast<double>(p.answers);
  if (tuples > static_cast<double>(options.tuple_cap)) {
    throw CapExceeded("single_input_transform: |Z|^|Y| = " + std::to_string(tuples) + " exceeds the tuple cap");
  }
  const auto tuple_count = static_cast<std::size_t>(tuples);
  SingleInputTransform out{};
  out.problem.inputs = p.inputs;
  out.problem.answers = tuple_count;
  out.problem.relation.assign(p.inputs * tuple_count, 0);

  std::vector<double> marginal(p.inputs, 0.0);
  double smallest_conditional = 1.0;
  for (std::size_t x = 0; x < p.inputs; ++x) {
    for (std::size_t y = 0; y < p.bob_inputs; ++y) marginal[x] += p.mu[x * p.bob_inputs + y];
  }
  for (std::size_t x = 0; x < p.inputs; ++x) {
    if (marginal[x] <= 0.0) {
      std::fill_n(out.problem.relation.begin() + static_cast<std::ptrdiff_t>(x * tuple_count), tuple_count, 1);
      continue;
    }
    std::vector<double> conditional(p.bob_inputs);
    for (std::size_t y = 0; y < p.bob_inputs; ++y) {
      conditional[y] = p.mu[x * p.bob_inputs + y] / marginal[x];
      if (conditional[y] > 0.0) smallest_conditional = std::min(smallest_conditional, conditional[y]);
    }
    for (std::size_t t = 0; t < tuple_count; ++t) {
      const auto tuple = decode_tuple(t, p.answers, p.bob_inputs);
      double success = 0.0;
      for (std::size_t y = 0; y < p.bob_inputs; ++y) success += p.accepts(x, y, tuple[y]) ? conditional[y] : 0.0;
      out.problem.relation[x * tuple_count + t] = success >= eps - kCostTolerance ? 1 : 0;
    }
  }
  const double total = std::accumulate(marginal.begin(), marginal.end(), 0.0);
  for (double& v : marginal) v /= total;
  out.problem.mu = Distribution(std::move(marginal));
  out.degenerate_threshold = eps <= smallest_conditional;
  return out;
}

OneWayCost brute_force_one_way_cost(const SingleInputProblem& p, double eps, const CostCaps& caps) {
  p.validate();
  if (p.inputs > caps.max_inputs || p.answers > caps.max_single_input_answers) {
    throw CapExceeded("brute_force_one_way_cost: problem exceeds the |X| or |Z| cap");
  }
  const std::size_t subsets = std::size_t{1} << p.inputs;
  std::vector<double> mass(subsets, 0.0);
  for (std::size_t s = 1; s < subsets; ++s) {
    const std::size_t low = static_cast<std::size_t>(std::countr_zero(s));
    mass[s] = mass[s & (s - 1)] + p.mu[low];
  }
  std::vector<bool> seen(subsets, false);
  std::vector<std::size_t> accept_masks;
  for (std::size_t z = 0; z < p.answers; ++z) {
    std::size_t m = 0;
    for (std::size_t x = 0; x < p.inputs; ++x) m |= p.accepts(x, z) ? std::size_t{1} << x : 0;
    if (!seen[m]) {
      seen[m] = true;
      accept_masks.push_back(m);
    }
  }
  std::vector<double> value(subsets, 0.0);
  for (std::size_t s = 1; s < subsets; ++s) {
    for (std::size_t m : accept_masks) value[s] = std::max(value[s], mass[s & m]);
  }
  return minimal_partition(value, p.inputs, eps);
}

OneWayCost brute_force_one_way_cost(const TwoSidedProblem& p, double eps, const CostCaps& caps) {
  p.validate();
  if (p.inputs > caps.max_inputs || p.bob_inputs > caps.max_bob_inputs || p.answers > caps.max_answers) {
    throw CapExceeded("brute_force_one_way_cost: problem exceeds the |X|, |Y| or |Z| cap");
  }
  const std::size_t subsets = std::size_t{1} << p.inputs;
  std::vector<double> value(subsets, 0.0);
  for (std::size_t s = 1; s < subsets; ++s) {
    for (std::size_t y = 0; y < p.bob_inputs; ++y) {
      double best = 0.0;
      for (std::size_t z = 0; z < p.answers; ++z) {
        double w = 0.0;
        for (std::size_t x = 0; x < p.inputs; ++x) {
          if (((s >> x) & 1U) && p.accepts(x, y, z)) w += p.mu[x * p.bob_inputs + y];
        }
        best = std::max(best, w);
      }
      value[s] += best;
    }
  }
  return minimal_partition(value, p.inputs, eps);
}

TwoSidedProblem func_eval_problem(const std::vector<std::vector<std::size_t>>& functions, std::size_t codomain) {
  if (functions.empty() || functions.front().empty() || codomain == 0) {
    throw ValidationError("func_eval_problem: empty function family, domain, or codomain");
  }
  TwoSidedProblem p;
  p.inputs = functions.size();
  p.bob_inputs = functions.front().size();
  p.answers = codomain;
  p.relation.assign(p.inputs * p.bob_inputs * p.answers, 0);
  for (std::size_t f = 0; f < p.inputs; ++f) {
    if (functions[f].size() != p.bob_inputs) throw ValidationError("func_eval_problem: functions have different domains");
    for (std::size_t x = 0; x < p.bob_inputs; ++x) {
      if (functions[f][x] >= codomain) throw ValidationError("func_eval_problem: value outside the codomain");
      p.relation[(f * p.bob_inputs + x) * p.answers + functions[f][x]] = 1;
    }
  }
  p.mu = Distribution::uniform(p.inputs * p.bob_inputs);
  return p;
}

std::size_t concept_answer_index(int modulus, const std::vector<Answer>& answers) {
  if (answers.size() != static_cast<std::size_t>(modulus - 1)) throw ValidationError("concept_answer_index: need N-1 answers");
  std::size_t index = 0;
  for (std::size_t q = answers.size(); q-- > 0;) {
    index = index * static_cast<std::size_t>(2 * modulus) + static_cast<std::size_t>(2 * answers[q].x + answers[q].b);
  }
  return index;
}

SingleInputProblem concept_to_comm(int modulus) {
  require_odd_prime(modulus, "concept_to_comm");
  if (modulus > 5) throw CapExceeded("concept_to_comm: answer tuple space is enumerated only for N <= 5");
  const int threshold = (4 * (modulus - 1) + 4) / 5;  // ceil(4(N-1)/5)
  SingleInputProblem p;
  p.inputs = std::size_t{1} << modulus;
  p.answers = hypothesis_count(modulus);
  p.relation.assign(p.inputs * p.answers, 0);
  for (std::size_t c = 0; c < p.inputs; ++c) {
    const Concept target = Concept::from_packed(modulus, c);
    for (std::size_t t = 0; t < p.answers; ++t) {
      p.relation[c * p.answers + t] = correct_count(hypothesis_at(modulus, t), target) >= threshold ? 1 : 0;
    }
  }
  p.mu = Distribution::uniform(p.inputs);
  return p;
}

}  // namespace pqlab
