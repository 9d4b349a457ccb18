#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace pqlab {

/// Element of Z_N, stored as its canonical representative in [0, N).
class Zmod {
 public:
  Zmod(std::int64_t value, std::int64_t modulus);

  std::int64_t value() const { return value_; }
  std::int64_t modulus() const { return modulus_; }

  Zmod operator+(std::int64_t k) const { return Zmod(value_ + k, modulus_); }
  bool operator==(const Zmod&) const = default;

 private:
  std::int64_t value_;
  std::int64_t modulus_;
};

/// Canonical residue of a mod n for any sign of a. n > 0.
constexpr int mod(std::int64_t a, std::int64_t n) {
  const std::int64_t r = a % n;
  return static_cast<int>(r < 0 ? r + n : r);
}

bool is_prime(std::uint64_t n);

/// Throws ValidationError unless n is an odd prime.
void require_odd_prime(std::int64_t n, const char* what);

struct Edge {
  int a;
  int b;
  bool operator==(const Edge&) const = default;
  auto operator<=>(const Edge&) const = default;
};

/// The perfect matching m_q on Z_N \ {x0}: edge i joins x0 + (2i+1)q and
/// x0 + (2i+2)q. Edges are stored oriented, so b == a + q (mod N).
struct Matching {
  int modulus = 0;
  int excluded = 0;
  int step = 0;
  std::vector<Edge> edges;
};

Matching build_matching(int modulus, Zmod excluded, int step);

/// True iff m is a perfect matching on Z_N \ {excluded} whose edges are all
/// oriented by `step`. Checks the invariants directly, independent of how
/// the matching was built.
bool is_valid_matching(const Matching& m);

}  // namespace pqlab
