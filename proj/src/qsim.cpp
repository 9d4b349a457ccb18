#include "pqlab/qsim.hpp"

#include <cmath>
#include <json.hpp>
#include <numeric>

#include "pqlab/errors.hpp"

namespace pqlab {

namespace {

double squared_norm(std::span<const Amplitude> amps) {
  double total = 0.0;
  for (const auto& a : amps) total += std::norm(a);
  return total;
}

std::vector<Amplitude> renormalized(std::vector<Amplitude> amps, double probability) {
  const double scale = 1.0 / std::sqrt(probability);
  for (auto& a : amps) a *= scale;
  return amps;
}

void require_layout(const StateVector& s, Layout expected, const char* what) {
  if (s.layout() != expected) throw ValidationError(std::string(what) + ": state has the wrong register layout");
}

}  // namespace

StateVector::StateVector(Layout layout, int modulus, std::vector<Amplitude> amplitudes)
    : layout_(layout), modulus_(modulus), amplitudes_(std::move(amplitudes)) {
  require_odd_prime(modulus, "StateVector");
  if (amplitudes_.size() != dimension(layout, modulus)) {
    throw ValidationError("StateVector: amplitude count does not match the layout");
  }
  if (std::abs(norm() - 1.0) > kStateTolerance) {
    throw ValidationError("StateVector: amplitudes are not normalized");
  }
}

std::size_t StateVector::dimension(Layout layout, int modulus) {
  const auto n = static_cast<std::size_t>(modulus);
  switch (layout) {
    case Layout::kQueryAnchorBit:
      return (n - 1) * n * 2;
    case Layout::kQueryAnchor:
      return (n - 1) * n;
    case Layout::kResidue:
      return n;
  }
  return 0;
}

std::size_t StateVector::index(int j, int x, int i) const {
  if (layout_ != Layout::kQueryAnchorBit || j < 1 || j >= modulus_ || x < 0 || x >= modulus_ || i < 0 || i > 1) {
    throw ValidationError("StateVector::index: label (j, x, i) out of range");
  }
  return (static_cast<std::size_t>(j - 1) * modulus_ + x) * 2 + i;
}

std::size_t StateVector::index(int j, int x) const {
  if (layout_ != Layout::kQueryAnchor || j < 1 || j >= modulus_ || x < 0 || x >= modulus_) {
    throw ValidationError("StateVector::index: label (j, x) out of range");
  }
  return static_cast<std::size_t>(j - 1) * modulus_ + x;
}

std::size_t StateVector::index(int k) const {
  if (layout_ != Layout::kResidue || k < 0 || k >= modulus_) {
    throw ValidationError("StateVector::index: label k out of range");
  }
  return static_cast<std::size_t>(k);
}

BasisLabel StateVector::label(std::size_t idx) const {
  const int n = modulus_;
  const int v = static_cast<int>(idx);
  switch (layout_) {
    case Layout::kQueryAnchorBit:
      return {.j = v / 2 / n + 1, .x = (v / 2) % n, .i = v % 2};
    case Layout::kQueryAnchor:
      return {.j = v / n + 1, .x = v % n};
    case Layout::kResidue:
      return {.k = v};
  }
  return {};
}

double StateVector::norm() const { return std::sqrt(squared_norm(amplitudes_)); }

StateVector StateVector::phase_normalized() const {
  auto amps = amplitudes_;
  for (const auto& a : amplitudes_) {
    if (std::abs(a) > kStateTolerance) {
      const Amplitude rotation = std::conj(a) / std::abs(a);
      for (auto& b : amps) b *= rotation;
      break;
    }
  }
  return StateVector(layout_, modulus_, std::move(amps));
}

bool equal_up_to_phase(const StateVector& a, const StateVector& b, double tol) {
  if (a.layout() != b.layout() || a.modulus() != b.modulus()) return false;
  const auto pa = a.phase_normalized();
  const auto pb = b.phase_normalized();
  for (std::size_t i = 0; i < pa.size(); ++i) {
    if (std::abs(pa[i] - pb[i]) > tol) return false;
  }
  return true;
}

std::string dump_state(const StateVector& s) {
  auto out = nlohmann::json::array();
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (std::abs(s[i]) == 0.0) continue;
    const BasisLabel l = s.label(i);
    nlohmann::json label;
    switch (s.layout()) {
      case Layout::kQueryAnchorBit:
        label = {l.j, l.x, l.i};
        break;
      case Layout::kQueryAnchor:
        label = {l.j, l.x};
        break;
      case Layout::kResidue:
        label = {l.k};
        break;
    }
    out.push_back({label, s[i].real(), s[i].imag()});
  }
  return out.dump();
}

StateVector prepare_example(const Concept& c) {
  const int n = c.modulus();
  std::vector<Amplitude> amps(StateVector::dimension(Layout::kQueryAnchorBit, n));
  const double amp = 1.0 / std::sqrt(static_cast<double>((n - 1) * n));
  for (int j = 1; j < n; ++j) {
    for (int x = 0; x < n; ++x) {
      const int i = c.bit(x) ^ c.bit(x + j);
      amps[(static_cast<std::size_t>(j - 1) * n + x) * 2 + i] = amp;
    }
  }
  return StateVector(Layout::kQueryAnchorBit, n, std::move(amps));
}

StateVector prepare_phase_example(const Concept& c) {
  const int n = c.modulus();
  std::vector<Amplitude> amps(StateVector::dimension(Layout::kQueryAnchor, n));
  const double amp = 1.0 / std::sqrt(static_cast<double>((n - 1) * n));
  for (int j = 1; j < n; ++j) {
    for (int x = 0; x < n; ++x) {
      amps[static_cast<std::size_t>(j - 1) * n + x] = (c.bit(x) ^ c.bit(x + j)) ? -amp : amp;
    }
  }
  return StateVector(Layout::kQueryAnchor, n, std::move(amps));
}

std::vector<Branch<PmOutcome>> enumerate_pm_basis(const StateVector& s) {
  require_layout(s, Layout::kQueryAnchorBit, "measure_pm_basis");
  const int n = s.modulus();
  const std::size_t pairs = StateVector::dimension(Layout::kQueryAnchor, n);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  std::vector<Branch<PmOutcome>> out;
  for (PmOutcome sign : {PmOutcome::kPlus, PmOutcome::kMinus}) {
    const double s_sign = sign == PmOutcome::kPlus ? 1.0 : -1.0;
    std::vector<Amplitude> projected(pairs);
    for (std::size_t p = 0; p < pairs; ++p) {
      projected[p] = (s[2 * p] + s_sign * s[2 * p + 1]) * inv_sqrt2;
    }
    const double probability = squared_norm(projected);
    if (probability <= kZeroProbability) continue;
    out.push_back({sign, probability, StateVector(Layout::kQueryAnchor, n, renormalized(std::move(projected), probability))});
  }
  return out;
}

Branch<PmOutcome> measure_pm_basis(const StateVector& s, Rng& rng) { return sample_branch(enumerate_pm_basis(s), rng); }

std::vector<Branch<int>> enumerate_computational(const StateVector& s) {
  if (s.layout() == Layout::kResidue) throw ValidationError("measure_computational: state has no x register");
  const int n = s.modulus();
  std::vector<Branch<int>> out;
  for (int x0 = 0; x0 < n; ++x0) {
    std::vector<Amplitude> projected(s.size());
    for (std::size_t idx = 0; idx < s.size(); ++idx) {
      if (s.label(idx).x == x0) projected[idx] = s[idx];
    }
    const double probability = squared_norm(projected);
    if (probability <= kZeroProbability) continue;
    out.push_back({x0, probability, StateVector(s.layout(), n, renormalized(std::move(projected), probability))});
  }
  return out;
}

Branch<int> measure_computational(const StateVector& s, Rng& rng) { return sample_branch(enumerate_computational(s), rng); }

StateVector shift_transform(const StateVector& s, Zmod anchor) {
  require_layout(s, Layout::kQueryAnchor, "shift_transform");
  const int n = s.modulus();
  if (anchor.modulus() != n) throw ValidationError("shift_transform: anchor has a different modulus");
  const int x0 = static_cast<int>(anchor.value());
  std::vector<Amplitude> amps(static_cast<std::size_t>(n));
  for (std::size_t idx = 0; idx < s.size(); ++idx) {
    const BasisLabel l = s.label(idx);
    if (l.x != x0) {
      if (std::abs(s[idx]) > kStateTolerance) {
        throw ValidationError("shift_transform: state has support outside x = " + std::to_string(x0));
      }
      continue;
    }
    amps[static_cast<std::size_t>(mod(l.j + x0, n))] = s[idx];
  }
  return StateVector(Layout::kResidue, n, std::move(amps));
}

std::vector<Branch<MatchingOutcome>> enumerate_matching(const StateVector& s, const Matching& m) {
  require_layout(s, Layout::kResidue, "measure_matching");
  if (m.modulus != s.modulus()) throw ValidationError("measure_matching: matching has a different modulus");
  const double completion = std::norm(s[static_cast<std::size_t>(m.excluded)]);
  if (completion > kZeroProbability) {
    throw InvariantBreach("measure_matching: the |x0> completion outcome has probability " + std::to_string(completion));
  }
  std::vector<Branch<MatchingOutcome>> out;
  for (std::size_t e = 0; e < m.edges.size(); ++e) {
    const Edge edge = m.edges[e];
    std::vector<Amplitude> projected(s.size());
    projected[edge.a] = s[edge.a];
    projected[edge.b] = s[edge.b];
    const double probability = std::norm(s[edge.a]) + std::norm(s[edge.b]);
    if (probability <= kZeroProbability) continue;
    out.push_back({{e, edge}, probability, StateVector(Layout::kResidue, s.modulus(), renormalized(std::move(projected), probability))});
  }
  return out;
}

Branch<MatchingOutcome> measure_matching(const StateVector& s, const Matching& m, Rng& rng) {
  return sample_branch(enumerate_matching(s, m), rng);
}

int distinguish_parity(const StateVector& post, const Edge& edge) {
  require_layout(post, Layout::kResidue, "distinguish_parity");
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  const Amplitude a = post[post.index(edge.a)];
  const Amplitude b = post[post.index(edge.b)];
  if (std::abs(std::abs((a + b) * inv_sqrt2) - 1.0) <= kStateTolerance) return 0;
  if (std::abs(std::abs((a - b) * inv_sqrt2) - 1.0) <= kStateTolerance) return 1;
  throw InvariantBreach("distinguish_parity: state is neither |a>+|b> nor |a>-|b>");
}

}  // namespace pqlab
