#include "pqlab/concepts.hpp"

#include "pqlab/errors.hpp"
#include "pqlab/modmath.hpp"

namespace pqlab {

namespace {

void require_query(int modulus, int q) {
  if (q < 1 || q >= modulus) {
    throw ValidationError("query " + std::to_string(q) + " outside [1, " + std::to_string(modulus - 1) + "]");
  }
}

}  // namespace

Concept::Concept(int modulus, std::vector<std::uint8_t> bits) : modulus_(modulus), bits_(std::move(bits)) {
  require_odd_prime(modulus, "Concept");
  if (bits_.size() != static_cast<std::size_t>(modulus)) {
    throw ValidationError("Concept: expected " + std::to_string(modulus) + " bits, got " +
                          std::to_string(bits_.size()));
  }
  for (auto b : bits_) {
    if (b > 1) throw ValidationError("Concept: bits must be 0 or 1");
  }
}

Concept Concept::from_string(std::string_view text) {
  std::vector<std::uint8_t> bits;
  bits.reserve(text.size());
  for (char ch : text) {
    if (ch != '0' && ch != '1') throw ValidationError("Concept: invalid bit character in \"" + std::string(text) + "\"");
    bits.push_back(static_cast<std::uint8_t>(ch - '0'));
  }
  const auto modulus = static_cast<int>(bits.size());
  return Concept(modulus, std::move(bits));
}

Concept Concept::from_packed(int modulus, std::uint64_t packed) {
  if (modulus > 64) throw ValidationError("Concept::from_packed: modulus above 64");
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(modulus));
  for (int x = 0; x < modulus; ++x) bits[x] = static_cast<std::uint8_t>((packed >> x) & 1U);
  return Concept(modulus, std::move(bits));
}

int Concept::bit(std::int64_t x) const { return bits_[static_cast<std::size_t>(mod(x, modulus_))]; }

Concept Concept::complement() const {
  auto flipped = bits_;
  for (auto& b : flipped) b ^= 1U;
  return Concept(modulus_, std::move(flipped));
}

Concept Concept::canonical() const { return bits_[0] == 0 ? *this : complement(); }

std::uint64_t Concept::packed() const {
  if (modulus_ > 64) throw ValidationError("Concept::packed: modulus above 64");
  std::uint64_t out = 0;
  for (int x = 0; x < modulus_; ++x) out |= static_cast<std::uint64_t>(bits_[x]) << x;
  return out;
}

std::string Concept::to_string() const {
  std::string s;
  s.reserve(bits_.size());
  for (auto b : bits_) s.push_back(static_cast<char>('0' + b));
  return s;
}

Hypothesis::Hypothesis(int modulus, std::vector<Answer> table) : modulus_(modulus), table_(std::move(table)) {
  require_odd_prime(modulus, "Hypothesis");
  if (table_.size() != static_cast<std::size_t>(modulus - 1)) {
    throw ValidationError("Hypothesis: table must cover all " + std::to_string(modulus - 1) + " queries");
  }
  for (const Answer& a : table_) {
    if (a.x < 0 || a.x >= modulus || (a.b != 0 && a.b != 1)) throw ValidationError("Hypothesis: answer out of range");
  }
}

const Answer& Hypothesis::operator()(int q) const {
  require_query(modulus_, q);
  return table_[static_cast<std::size_t>(q - 1)];
}

bool valid_answer(const Concept& c, int q, const Answer& a) {
  require_query(c.modulus(), q);
  return (c.bit(a.x) ^ c.bit(a.x + q)) == a.b;
}

std::vector<RelationTriple> relation_of(const Concept& c) {
  const int n = c.modulus();
  std::vector<RelationTriple> out;
  out.reserve(static_cast<std::size_t>((n - 1) * n));
  for (int q = 1; q < n; ++q) {
    for (int x = 0; x < n; ++x) out.push_back({q, x, c.bit(x) ^ c.bit(x + q)});
  }
  return out;
}

Hypothesis hypothesis_from(const Concept& c) {
  std::vector<Answer> table;
  for (int q = 1; q < c.modulus(); ++q) table.push_back({0, c.bit(0) ^ c.bit(q)});
  return Hypothesis(c.modulus(), std::move(table));
}

int approximation_threshold(int modulus) {
  // ceil(2 (N - 1) / 3)
  return (2 * (modulus - 1) + 2) / 3;
}

int correct_count(const Hypothesis& h, const Concept& c) {
  if (h.modulus() != c.modulus()) throw ValidationError("hypothesis and concept moduli differ");
  int correct = 0;
  for (int q = 1; q < c.modulus(); ++q) correct += valid_answer(c, q, h(q)) ? 1 : 0;
  return correct;
}

bool approximates(const Hypothesis& h, const Concept& c) {
  return correct_count(h, c) >= approximation_threshold(c.modulus());
}

}  // namespace pqlab
