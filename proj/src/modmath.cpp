#include "pqlab/modmath.hpp"

#include <string>

#include "pqlab/errors.hpp"

namespace pqlab {

Zmod::Zmod(std::int64_t value, std::int64_t modulus) : modulus_(modulus) {
  if (modulus < 1) throw ValidationError("Zmod: modulus must be positive");
  value_ = mod(value, modulus);
}

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  if (n < 4) return true;
  if (n % 2 == 0) return false;
  for (std::uint64_t d = 3; d * d <= n; d += 2) {
    if (n % d == 0) return false;
  }
  return true;
}

void require_odd_prime(std::int64_t n, const char* what) {
  if (n < 3 || !is_prime(static_cast<std::uint64_t>(n))) {
    throw ValidationError(std::string(what) + ": modulus " + std::to_string(n) +
                          " is not an odd prime");
  }
}

Matching build_matching(int modulus, Zmod excluded, int step) {
  require_odd_prime(modulus, "build_matching");
  if (excluded.modulus() != modulus) throw ValidationError("build_matching: x0 has a different modulus");
  if (step < 1 || step >= modulus) {
    throw ValidationError("build_matching: q must lie in [1, N-1], got " + std::to_string(step));
  }
  Matching m{modulus, static_cast<int>(excluded.value()), step, {}};
  const std::int64_t x0 = excluded.value();
  const std::int64_t half = (modulus - 1) / 2;
  m.edges.reserve(static_cast<std::size_t>(half));
  for (std::int64_t i = 0; i < half; ++i) {
    m.edges.push_back({mod(x0 + (2 * i + 1) * step, modulus), mod(x0 + (2 * i + 2) * step, modulus)});
  }
  return m;
}

bool is_valid_matching(const Matching& m) {
  if (m.modulus < 3 || m.excluded < 0 || m.excluded >= m.modulus) return false;
  if (m.edges.size() * 2 != static_cast<std::size_t>(m.modulus - 1)) return false;
  std::vector<bool> seen(static_cast<std::size_t>(m.modulus), false);
  for (const Edge& e : m.edges) {
    for (int v : {e.a, e.b}) {
      if (v < 0 || v >= m.modulus || v == m.excluded || seen[v]) return false;
      seen[v] = true;
    }
    if (mod(e.b - e.a, m.modulus) != mod(m.step, m.modulus)) return false;
  }
  return true;
}

}  // namespace pqlab
