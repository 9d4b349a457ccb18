#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "pqlab/concepts.hpp"
#include "pqlab/rng.hpp"

namespace pqlab {

inline constexpr double kDistributionTolerance = 1e-9;

/// Probability vector over labels 0 .. size-1.
class Distribution {
 public:
  explicit Distribution(std::vector<double> p);
  static Distribution uniform(std::size_t n);
  static Distribution point(std::size_t n, std::size_t at);

  std::size_t size() const { return p_.size(); }
  double operator[](std::size_t i) const { return p_[i]; }
  const std::vector<double>& probabilities() const { return p_; }

 private:
  std::vector<double> p_;
};

/// Alice's input prior and Bob's answer distribution for each input.
struct AnswerFamily {
  Distribution prior;
  std::vector<Distribution> per_input;

  std::size_t inputs() const { return prior.size(); }
  std::size_t answers() const { return per_input.empty() ? 0 : per_input.front().size(); }
  void validate() const;
};

/// P subset of X x {0} x Z with a distribution over X.
struct SingleInputProblem {
  std::size_t inputs = 0;
  std::size_t answers = 0;
  std::vector<std::uint8_t> relation;  // relation[x * answers + z]
  Distribution mu = Distribution::uniform(1);

  bool accepts(std::size_t x, std::size_t z) const { return relation[x * answers + z] != 0; }
  void validate() const;
};

/// P subset of X x Y x Z with a distribution over X x Y.
struct TwoSidedProblem {
  std::size_t inputs = 0;        // |X|
  std::size_t bob_inputs = 0;    // |Y|
  std::size_t answers = 0;       // |Z|
  std::vector<std::uint8_t> relation;  // relation[(x * |Y| + y) * |Z| + z]
  Distribution mu = Distribution::uniform(1);  // mu[x * |Y| + y]

  bool accepts(std::size_t x, std::size_t y, std::size_t z) const {
    return relation[(x * bob_inputs + y) * answers + z] != 0;
  }
  void validate() const;
};

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// KL(P || Q) in bits; +infinity when P is not absolutely continuous w.r.t. Q.
double kl_divergence(const Distribution& p, const Distribution& q);

/// mu^B = sum_x prior(x) mu_x^B.
Distribution answer_marginal(const AnswerFamily& f);

/// I(A;B) = E_{x ~ prior} KL(mu_x^B || mu^B), bits.
double mutual_information(const AnswerFamily& f);

struct RefinedFamily {
  AnswerFamily family;
  std::vector<double> error;  // eps_x: mass mu_x^B puts on answers invalid for x
};

/// Conditions each mu_x^B on correctness. Throws ValidationError if some x has eps_x == 1.
RefinedFamily refine_family(const AnswerFamily& f, const SingleInputProblem& p);

/// Expected error of the family: sum_x prior(x) eps_x.
double family_error(const AnswerFamily& f, const SingleInputProblem& p);

struct KlChainRow {
  double error;          // eps_x
  double kl_original;    // KL(mu_x^B || mu^B)
  double kl_refined;     // KL(mu_x^B' || mu^B)
  double stated_bound;   // (KL + log(1/(1-eps_x))) / (1-eps_x)
  bool stated_holds;
  double entropy_bound;  // (KL + h(eps_x)) / (1-eps_x)
  bool entropy_holds;
};

struct KlChainAudit {
  double declared_cost;        // m
  double mutual_information;   // I(A;B)
  double max_error;            // eps = max_x eps_x
  std::vector<KlChainRow> rows;
  bool per_input_stated_holds;
  bool per_input_entropy_holds;
  double expected_refined_kl;  // E_x KL(mu_x^B' || mu^B)
  double aggregate_bound;      // m/(1-eps) + log(1/(1-eps))/(1-eps)
  bool aggregate_holds;
  double simplified_bound;     // 2m/(1-eps)
  bool simplified_applicable;  // m >= 1
  bool simplified_holds;
};

inline constexpr double kChainTolerance = 1e-9;

KlChainAudit audit_kl_chain(const AnswerFamily& f, const SingleInputProblem& p, double declared_cost);

struct ConversionOptions {
  std::uint64_t sample_cap = std::uint64_t{1} << 20;
  std::uint64_t draws = 1000;
  std::uint64_t seed = 0;
};

struct ConversionReport {
  double declared_cost;       // m
  double mutual_information;  // I(A;B)
  double eps;
  double family_error;
  double exponent;            // 11m / (eps (1-eps))
  std::uint64_t samples;      // M = ceil(2^exponent)
  std::uint64_t message_bits; // ceil(exponent)
  std::vector<double> hit_probability;   // mu^B(valid answers for x)
  std::vector<double> miss_probability;  // (1 - hit)^M
  double exact_error;         // sum_x mu(x) (1 - hit_x)^M
  std::uint64_t draws;
  std::uint64_t failures;
  double empirical_error;
  std::vector<bool> in_x_prime;  // KL(mu_x^B' || mu^B) < 5m / (eps (1-eps))
  double x_prime_mass;
  bool x_prime_mass_holds;       // mu(X') > 1 - eps/2
  bool hit_bound_holds;          // hit_x > 2^{-10m/(eps(1-eps)) - 1} on X'
};

/// Shared-randomness classical protocol: both parties draw M answers from
/// mu^B; Alice sends the index of the first one valid for her input (else 0).
/// Throws ValidationError if m < I(A;B) - 1e-6 or the family's error exceeds
/// eps, CapExceeded if M exceeds the cap.
ConversionReport convert_to_classical(const AnswerFamily& f, const SingleInputProblem& p, double eps, double m,
                                      const ConversionOptions& options);

/// Sample count and exponent without running anything.
double conversion_exponent(double eps, double m);

struct TransformOptions {
  std::uint64_t tuple_cap = 4096;
};

struct SingleInputTransform {
  SingleInputProblem problem;     // answers indexed by tuples (z_y), y = 0 most significant
  bool degenerate_threshold;      // eps <= smallest positive mu_x(y): any tuple right somewhere qualifies
};

/// Accepts (x, (z_y)_y) iff Pr_{y ~ mu_x}[(x, y, z_y) in P] >= eps. Inputs x
/// with zero marginal accept every tuple.
SingleInputTransform single_input_transform(const TwoSidedProblem& p, double eps, const TransformOptions& options = {});

std::vector<std::size_t> decode_tuple(std::size_t index, std::size_t answers, std::size_t bob_inputs);

struct CostCaps {
  std::size_t max_inputs = 8;
  std::size_t max_bob_inputs = 4;
  std::size_t max_answers = 8;
  std::size_t max_single_input_answers = 4096;
};

struct OneWayCost {
  std::size_t messages;  // smallest c
  int bits;              // ceil(log2 c)
  double error;          // optimal error with c messages
};

/// Smallest message alphabet for which a deterministic one-way protocol has
/// error <= eps under mu. Exhaustive over partitions of X.
OneWayCost brute_force_one_way_cost(const SingleInputProblem& p, double eps, const CostCaps& caps = {});
OneWayCost brute_force_one_way_cost(const TwoSidedProblem& p, double eps, const CostCaps& caps = {});

/// Tolerance used when comparing a protocol error to eps.
inline constexpr double kCostTolerance = 1e-12;

/// (f, x, f(x)) for f in F and x in the domain. functions[f][x] in [0, codomain).
TwoSidedProblem func_eval_problem(const std::vector<std::vector<std::size_t>>& functions, std::size_t codomain);

/// Problem P_C over all 2^N concepts: answers are full answer tuples, valid
/// when correct on at least ceil(4(N-1)/5) queries. N <= 5.
SingleInputProblem concept_to_comm(int modulus);

/// Answer tuple index for concept_to_comm: digit q-1 (base 2N, least
/// significant first) encodes (x, b) as 2x + b.
std::size_t concept_answer_index(int modulus, const std::vector<Answer>& answers);

}  // namespace pqlab
