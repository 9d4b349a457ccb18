#include "pqlab/learner.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <thread>

#include "pqlab/errors.hpp"
#include "pqlab/modmath.hpp"

namespace pqlab {

namespace {

Concept random_concept(int modulus, Rng& rng) {
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(modulus));
  for (auto& b : bits) b = static_cast<std::uint8_t>(rng.next() >> 63);
  return Concept(modulus, std::move(bits));
}

LearnerMemory anchor_and_shift(const Branch<int>& anchored) {
  const int n = anchored.post_state.modulus();
  return LearnerMemory(anchored.label, shift_transform(anchored.post_state, Zmod(anchored.label, n)));
}

std::vector<AnswerBranch> merge(std::vector<AnswerBranch> branches) {
  std::map<Answer, double> totals;
  for (const auto& b : branches) totals[b.answer] += b.probability;
  std::vector<AnswerBranch> out;
  for (const auto& [answer, p] : totals) out.push_back({answer, p});
  return out;
}

TrialRecord run_one(const TrialConfig& cfg, std::int64_t t) {
  Rng rng = Rng::stream(cfg.seed, static_cast<std::uint64_t>(t));
  const int n = cfg.modulus;
  const Concept c = cfg.target ? *cfg.target : random_concept(n, rng);
  const int q = cfg.policy == QueryPolicy::kAllQueries ? static_cast<int>(1 + t % (n - 1))
                                                       : static_cast<int>(1 + rng.below(static_cast<std::uint64_t>(n - 1)));
  TrialRecord record{t, c.to_string(), q, false, std::nullopt, std::nullopt};
  if (cfg.exact) {
    record.answer = learn_exact(c, q, rng);
  } else {
    Acquisition acquired = acquire(c, cfg.copies, rng);
    if (std::holds_alternative<GiveUp>(acquired)) {
      record.gave_up = true;
      return record;
    }
    record.answer = answer_query(std::get<LearnerMemory>(acquired), q, rng);
  }
  record.correct = valid_answer(c, q, *record.answer);
  return record;
}

}  // namespace

LearnerMemory::LearnerMemory(int anchor, StateVector state) : anchor_(anchor), state_(std::move(state)) {
  if (state_.layout() != Layout::kResidue) throw ValidationError("LearnerMemory: state must be a single Z_N register");
  if (anchor_ < 0 || anchor_ >= state_.modulus()) throw ValidationError("LearnerMemory: anchor out of range");
  if (std::abs(state_[static_cast<std::size_t>(anchor_)]) > kStateTolerance) {
    throw InvariantBreach("LearnerMemory: residue state has weight on the anchor");
  }
}

Answer LearnerMemory::answer(int q, Rng& rng) {
  if (consumed_) throw std::logic_error("LearnerMemory: already consumed by an earlier query");
  const Matching m = build_matching(modulus(), Zmod(anchor_, modulus()), q);
  consumed_ = true;
  const auto outcome = measure_matching(state_, m, rng);
  return {outcome.label.edge.a, distinguish_parity(outcome.post_state, outcome.label.edge)};
}

std::vector<AnswerBranch> LearnerMemory::enumerate_answers(int q) const {
  const Matching m = build_matching(modulus(), Zmod(anchor_, modulus()), q);
  std::vector<AnswerBranch> out;
  for (const auto& branch : enumerate_matching(state_, m)) {
    out.push_back({{branch.label.edge.a, distinguish_parity(branch.post_state, branch.label.edge)}, branch.probability});
  }
  return out;
}

Acquisition acquire(const Concept& c, int copies, Rng& rng) {
  if (copies < 1) throw ValidationError("acquire: at least one example copy is required");
  for (int copy = 0; copy < copies; ++copy) {
    auto pm = measure_pm_basis(prepare_example(c), rng);
    if (pm.label == PmOutcome::kMinus) {
      // Remaining copies are abandoned.
      return anchor_and_shift(measure_computational(pm.post_state, rng));
    }
  }
  return GiveUp{};
}

AcquisitionBranches enumerate_acquire(const Concept& c, int copies) {
  if (copies < 1) throw ValidationError("acquire: at least one example copy is required");
  double p_plus = 0.0;
  std::optional<StateVector> minus_state;
  double p_minus = 0.0;
  for (auto& branch : enumerate_pm_basis(prepare_example(c))) {
    if (branch.label == PmOutcome::kPlus) {
      p_plus = branch.probability;
    } else {
      p_minus = branch.probability;
      minus_state = std::move(branch.post_state);
    }
  }
  AcquisitionBranches out;
  // Copy t is reached after t plus outcomes.
  double reach = 1.0;
  double success = 0.0;
  for (int copy = 0; copy < copies; ++copy) {
    success += reach * p_minus;
    reach *= p_plus;
  }
  out.give_up_probability = reach;
  if (minus_state) {
    for (const auto& anchored : enumerate_computational(*minus_state)) {
      out.memories.push_back({success * anchored.probability, anchor_and_shift(anchored)});
    }
  }
  return out;
}

Answer answer_query(LearnerMemory& memory, int q, Rng& rng) { return memory.answer(q, rng); }

Answer learn_exact(const Concept& c, int q, Rng& rng) {
  LearnerMemory memory = anchor_and_shift(measure_computational(prepare_phase_example(c), rng));
  return memory.answer(q, rng);
}

std::vector<AnswerBranch> enumerate_learn_exact(const Concept& c, int q) {
  std::vector<AnswerBranch> out;
  for (const auto& anchored : enumerate_computational(prepare_phase_example(c))) {
    for (const auto& a : anchor_and_shift(anchored).enumerate_answers(q)) {
      out.push_back({a.answer, anchored.probability * a.probability});
    }
  }
  return merge(std::move(out));
}

bool meets_success_threshold(int copies) { return copies >= 3; }

TrialSummary run_trials(const TrialConfig& cfg) {
  require_odd_prime(cfg.modulus, "run_trials");
  if (cfg.trials < 1) throw ValidationError("run_trials: trials must be at least 1");
  if (!cfg.exact && cfg.copies < 1) throw ValidationError("run_trials: k must be at least 1");
  if (cfg.target && cfg.target->modulus() != cfg.modulus) throw ValidationError("run_trials: concept length differs from N");

  TrialSummary summary;
  summary.trials = cfg.trials;
  summary.records.resize(static_cast<std::size_t>(cfg.trials));
  const unsigned workers = std::max(1U, std::min<unsigned>(cfg.threads, static_cast<unsigned>(cfg.trials)));
  auto work = [&](unsigned w) {
    for (std::int64_t t = w; t < cfg.trials; t += workers) summary.records[static_cast<std::size_t>(t)] = run_one(cfg, t);
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
  }

  summary.per_query.assign(static_cast<std::size_t>(cfg.modulus - 1), {});
  for (const auto& r : summary.records) {
    QueryStats& qs = summary.per_query[static_cast<std::size_t>(r.q - 1)];
    ++qs.asked;
    if (r.gave_up) {
      ++qs.gave_up;
      ++summary.gave_up;
      continue;
    }
    ++qs.answered;
    ++summary.answered;
    if (*r.correct) {
      ++qs.correct;
      ++summary.correct;
    }
  }
  return summary;
}

}  // namespace pqlab
