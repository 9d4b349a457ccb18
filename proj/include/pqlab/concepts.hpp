#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace pqlab {

/// A member of the relational class C: a bitstring indexed by Z_N, N an odd
/// prime. (x, b) answers query q iff C[x] xor C[x+q] == b.
class Concept {
 public:
  Concept(int modulus, std::vector<std::uint8_t> bits);

  /// Parses a bit-character string such as "01011"; its length is N.
  static Concept from_string(std::string_view bits);

  /// Concept whose bit x is bit x of `packed`.
  static Concept from_packed(int modulus, std::uint64_t packed);

  int modulus() const { return modulus_; }
  int bit(std::int64_t x) const;
  const std::vector<std::uint8_t>& bits() const { return bits_; }

  Concept complement() const;

  /// Representative of {C, complement(C)} with bit 0 cleared.
  Concept canonical() const;

  std::uint64_t packed() const;
  std::string to_string() const;

  bool operator==(const Concept&) const = default;

 private:
  int modulus_;
  std::vector<std::uint8_t> bits_;
};

struct Answer {
  int x = 0;
  int b = 0;
  bool operator==(const Answer&) const = default;
  auto operator<=>(const Answer&) const = default;
};

struct RelationTriple {
  int q;
  int x;
  int b;
  bool operator==(const RelationTriple&) const = default;
  auto operator<=>(const RelationTriple&) const = default;
};

/// A total map from queries [N-1] to answers.
class Hypothesis {
 public:
  Hypothesis(int modulus, std::vector<Answer> table);

  int modulus() const { return modulus_; }
  const Answer& operator()(int q) const;
  const std::vector<Answer>& table() const { return table_; }

  bool operator==(const Hypothesis&) const = default;

 private:
  int modulus_;
  std::vector<Answer> table_;  // table_[q - 1]
};

bool valid_answer(const Concept& c, int q, const Answer& a);

/// {(q, x, C_x xor C_{x+q})}, sorted by (q, x).
std::vector<RelationTriple> relation_of(const Concept& c);

/// The hypothesis answering every query q with (0, C_0 xor C_q).
Hypothesis hypothesis_from(const Concept& c);

/// Minimal number of correctly answered queries for h to approximate C.
int approximation_threshold(int modulus);

int correct_count(const Hypothesis& h, const Concept& c);

bool approximates(const Hypothesis& h, const Concept& c);

}  // namespace pqlab
