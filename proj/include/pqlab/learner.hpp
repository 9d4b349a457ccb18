#pragma once

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "pqlab/concepts.hpp"
#include "pqlab/qsim.hpp"
#include "pqlab/rng.hpp"

namespace pqlab {

struct AnswerBranch {
  Answer answer;
  double probability;
};

/// Post-acquisition learner state: anchor x0 and the residue
/// sum_{k != x0} (-1)^{C_k} |k>. Answers exactly one query.
class LearnerMemory {
 public:
  LearnerMemory(int anchor, StateVector state);

  int modulus() const { return state_.modulus(); }
  int anchor() const { return anchor_; }
  const StateVector& state() const { return state_; }
  bool consumed() const { return consumed_; }

  /// Matching measurement on m_q, then parity discrimination. Collapses the
  /// state; a second call throws std::logic_error.
  Answer answer(int q, Rng& rng);

  /// Every reachable answer to q with its probability. Does not consume.
  std::vector<AnswerBranch> enumerate_answers(int q) const;

 private:
  int anchor_;
  StateVector state_;
  bool consumed_ = false;
};

struct GiveUp {};

using Acquisition = std::variant<LearnerMemory, GiveUp>;

/// Measures up to `copies` fresh examples in the +/- basis, keeping the first
/// minus outcome; gives up if all are plus.
Acquisition acquire(const Concept& c, int copies, Rng& rng);

struct WeightedMemory {
  double probability;
  LearnerMemory memory;
};

struct AcquisitionBranches {
  double give_up_probability = 0.0;
  std::vector<WeightedMemory> memories;  // one per reachable anchor
};

/// acquire() with every measurement enumerated instead of sampled.
AcquisitionBranches enumerate_acquire(const Concept& c, int copies);

Answer answer_query(LearnerMemory& memory, int q, Rng& rng);

/// Learner fed the phase-encoded example; never gives up.
Answer learn_exact(const Concept& c, int q, Rng& rng);
std::vector<AnswerBranch> enumerate_learn_exact(const Concept& c, int q);

/// Copies needed so that the give-up rate (1/2)^k is at most 1/6.
bool meets_success_threshold(int copies);

enum class QueryPolicy { kAllQueries, kUniformRandom };

struct TrialConfig {
  int modulus = 5;
  int copies = 4;
  std::int64_t trials = 1;
  std::uint64_t seed = 0;
  QueryPolicy policy = QueryPolicy::kAllQueries;
  std::optional<Concept> target;  // drawn per trial when absent
  bool exact = false;               // phase-encoded single-example learner
  unsigned threads = 1;
};

struct TrialRecord {
  std::int64_t trial;
  std::string concept_bits;
  int q;
  bool gave_up;
  std::optional<Answer> answer;
  std::optional<bool> correct;
};

struct QueryStats {
  std::int64_t asked = 0;
  std::int64_t gave_up = 0;
  std::int64_t answered = 0;
  std::int64_t correct = 0;
};

struct TrialSummary {
  std::int64_t trials = 0;
  std::int64_t gave_up = 0;
  std::int64_t answered = 0;
  std::int64_t correct = 0;
  std::vector<QueryStats> per_query;  // index q - 1
  std::vector<TrialRecord> records;
};

/// Runs independent trials; trial t uses Rng::stream(seed, t), so results do
/// not depend on the thread count. kAllQueries cycles q = 1 + t mod (N-1).
TrialSummary run_trials(const TrialConfig& cfg);

}  // namespace pqlab
