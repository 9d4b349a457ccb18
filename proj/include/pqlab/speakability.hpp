#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pqlab/concepts.hpp"
#include "pqlab/modmath.hpp"

namespace pqlab {

// Concepts are taken up to complement. Class c (0 <= c < 2^{N-1}) is
// represented by the concept with bit 0 clear and bit x equal to bit x-1 of c.
// A ClassSet is a bitmask over classes, so N <= 7 throughout this module.
using ClassSet = std::uint64_t;

inline constexpr int kMaxSpeakabilityModulus = 7;
inline constexpr int kMaxExactCoverModulus = 5;

int class_count(int modulus);
Concept class_representative(int modulus, int cls);
int class_index(const Concept& c);
ClassSet all_classes(int modulus);

ClassSet concepts_approximated_by(const Hypothesis& h);
std::vector<Concept> members(int modulus, ClassSet classes);

/// Hypothesis number `index` in the enumeration order: query q's answer is
/// digit q-1 (base 2N, least significant first), digit d meaning (d/2, d%2).
Hypothesis hypothesis_at(int modulus, std::uint64_t index);
std::uint64_t hypothesis_count(int modulus);

enum class CoverMode { kExact, kGreedy };

struct CoverSearchStats {
  std::uint64_t hypotheses_scanned = 0;
  std::uint64_t distinct_coverage_sets = 0;
  std::uint64_t undominated_sets = 0;
  std::uint64_t greedy_size = 0;
  std::uint64_t nodes_explored = 0;
};

struct CoverCertificate {
  int modulus = 0;
  std::vector<Hypothesis> cover;
  std::vector<std::uint64_t> cover_indices;  // hypothesis_at() indices
  std::vector<int> coverage;                 // class -> index into cover
  bool minimal = false;
  std::string method;
  CoverSearchStats stats;
};

CoverCertificate approx_cover_oracle(int modulus, CoverMode mode);

/// Rechecks every class against its recorded hypothesis with approximates().
bool verify_certificate(const CoverCertificate& cert);

/// p log(1/p) + (1-p) log(1/(1-p)) in bits.
double binary_entropy(double p);

struct AuditCheck {
  std::string name;
  double lhs;
  double rhs;
  bool equality;  // lhs == rhs within tolerance, else lhs >= rhs
  bool holds;
};

struct CountingAudit {
  int modulus = 0;
  std::vector<Concept> c0;      // class representatives
  std::vector<int> q0;          // queries answered well for >= 3/5 of C0
  std::vector<Edge> e0;         // distinct undirected e_q, a < b
  std::vector<std::vector<int>> e0_queries;  // queries mapping onto each e0 edge
  int nonisolated = 0;
  std::vector<Edge> forest;     // E0'
  std::vector<int> q0_prime;    // smallest q per forest edge
  double log_ratio = 0.0;       // log(|C| / |C0|)
  double h_c_uniform = 0.0, h_c_restricted = 0.0;
  double h_j_uniform = 0.0, h_j_restricted = 0.0;
  double h_c_given_j_uniform = 0.0, h_c_given_j_restricted = 0.0;
  std::vector<double> bias;     // Pr_{D0}[I_q == h0's parity], q in Q0'
  std::vector<double> h_iq;     // H_{D0}(I_q), q in Q0'
  double gap_lower_bound = 0.0; // sum over Q0' of 1 - H(I_q)
  std::vector<AuditCheck> checks;
  bool all_hold = false;
  std::string unchecked_note;
};

inline constexpr double kAuditTolerance = 1e-9;

/// Evaluates every quantity of the counting argument on (h0, C0). C0 must be
/// nonempty and approximated by h0 throughout.
CountingAudit counting_audit(const Hypothesis& h0, ClassSet c0);

}  // namespace pqlab
