#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "pqlab/concepts.hpp"
#include "pqlab/modmath.hpp"
#include "pqlab/rng.hpp"

namespace pqlab {

using Amplitude = std::complex<double>;

inline constexpr double kStateTolerance = 1e-9;

// Branches lighter than this are treated as impossible and never returned.
inline constexpr double kZeroProbability = 1e-14;

/// Register structure of a state.
enum class Layout {
  kQueryAnchorBit,  // |j, x, i>, j in [N-1], x in Z_N, i in {0,1}
  kQueryAnchor,     // |j, x>
  kResidue,         // |k>, k in Z_N
};

/// Basis label; registers absent from the layout are -1.
struct BasisLabel {
  int j = -1;
  int x = -1;
  int i = -1;
  int k = -1;
  bool operator==(const BasisLabel&) const = default;
};

class StateVector {
 public:
  /// Validates the dimension and unit norm.
  StateVector(Layout layout, int modulus, std::vector<Amplitude> amplitudes);

  static std::size_t dimension(Layout layout, int modulus);

  Layout layout() const { return layout_; }
  int modulus() const { return modulus_; }
  std::size_t size() const { return amplitudes_.size(); }
  std::span<const Amplitude> amplitudes() const { return amplitudes_; }

  std::size_t index(int j, int x, int i) const;  // kQueryAnchorBit
  std::size_t index(int j, int x) const;         // kQueryAnchor
  std::size_t index(int k) const;                // kResidue
  BasisLabel label(std::size_t index) const;

  const Amplitude& operator[](std::size_t index) const { return amplitudes_[index]; }

  double norm() const;

  /// Copy with global phase fixed: first amplitude above tolerance is real positive.
  StateVector phase_normalized() const;

 private:
  Layout layout_;
  int modulus_;
  std::vector<Amplitude> amplitudes_;
};

/// Equality up to global phase, amplitude-wise within `tol`.
bool equal_up_to_phase(const StateVector& a, const StateVector& b, double tol = kStateTolerance);

/// JSON text: list of [label, re, im] for every nonzero amplitude.
std::string dump_state(const StateVector& s);

enum class PmOutcome { kPlus, kMinus };

/// One outcome of a projective measurement: its Born probability and the
/// renormalized post-measurement state.
template <class Label>
struct Branch {
  Label label;
  double probability;
  StateVector post_state;
};

struct MatchingOutcome {
  std::size_t edge_index;
  Edge edge;
};

/// Uniform superposition over the triples (j, x, C_x xor C_{x+j}).
StateVector prepare_example(const Concept& c);

/// Sum over (j, x) of (-1)^{C_x xor C_{x+j}} |j, x>, normalized.
StateVector prepare_phase_example(const Concept& c);

/// Last register in the basis {|0>+|1>, |0>-|1>}. Result lives on (j, x).
std::vector<Branch<PmOutcome>> enumerate_pm_basis(const StateVector& s);
Branch<PmOutcome> measure_pm_basis(const StateVector& s, Rng& rng);

/// x register in the computational basis; the post state keeps the layout.
std::vector<Branch<int>> enumerate_computational(const StateVector& s);
Branch<int> measure_computational(const StateVector& s, Rng& rng);

/// |j, x0> -> |j + x0>. Rejects states with support on more than one x.
StateVector shift_transform(const StateVector& s, Zmod anchor);

/// Projection onto span{|a>, |b>} for every edge of m, completed by |x0><x0|.
/// Throws InvariantBreach if the completion outcome has nonzero probability.
std::vector<Branch<MatchingOutcome>> enumerate_matching(const StateVector& s, const Matching& m);
Branch<MatchingOutcome> measure_matching(const StateVector& s, const Matching& m, Rng& rng);

/// 0 for |a>+|b>, 1 for |a>-|b> (up to global phase). Throws InvariantBreach otherwise.
int distinguish_parity(const StateVector& post, const Edge& edge);

template <class Label>
Branch<Label> sample_branch(std::vector<Branch<Label>> branches, Rng& rng) {
  std::vector<double> weights;
  weights.reserve(branches.size());
  for (const auto& b : branches) weights.push_back(b.probability);
  return std::move(branches[rng.pick(weights)]);
}

}  // namespace pqlab
