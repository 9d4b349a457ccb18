#pragma once

// Independent brute-force oracles. None of these call into the code paths
// they are used to check.

#include <cmath>
#include <cstdint>
#include <functional>
#include <set>
#include <utility>
#include <vector>

#include "pqlab/commlab.hpp"
#include "pqlab/concepts.hpp"
#include "pqlab/rng.hpp"

namespace oracle {

inline std::vector<bool> sieve(std::size_t limit) {
  std::vector<bool> prime(limit + 1, true);
  prime[0] = false;
  if (limit >= 1) prime[1] = false;
  for (std::size_t p = 2; p * p <= limit; ++p) {
    if (!prime[p]) continue;
    for (std::size_t m = p * p; m <= limit; m += p) prime[m] = false;
  }
  return prime;
}

inline std::vector<int> odd_primes_up_to(int limit) {
  const auto prime = sieve(static_cast<std::size_t>(limit));
  std::vector<int> out;
  for (int n = 3; n <= limit; ++n) {
    if (prime[static_cast<std::size_t>(n)]) out.push_back(n);
  }
  return out;
}

inline int residue(long long a, long long n) { return static_cast<int>(((a % n) + n) % n); }

// Every perfect matching of Z_N \ {x0} whose edges join vertices differing by +-q.
inline std::vector<std::set<std::pair<int, int>>> difference_matchings(int n, int x0, int q) {
  std::vector<std::set<std::pair<int, int>>> out;
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  used[x0] = true;
  std::set<std::pair<int, int>> current;
  std::function<void()> extend = [&] {
    int v = -1;
    for (int u = 0; u < n && v < 0; ++u) {
      if (!used[u]) v = u;
    }
    if (v < 0) {
      out.push_back(current);
      return;
    }
    for (int w : {residue(v + q, n), residue(v - q, n)}) {
      if (used[w] || w == v) continue;
      used[v] = used[w] = true;
      current.insert({std::min(v, w), std::max(v, w)});
      extend();
      current.erase({std::min(v, w), std::max(v, w)});
      used[v] = used[w] = false;
    }
  };
  extend();
  return out;
}

// Parity relation straight from the definition, on packed bits.
inline int parity(std::uint64_t bits, int n, int x, int q) {
  return static_cast<int>(((bits >> x) ^ (bits >> residue(x + q, n))) & 1U);
}

inline std::set<std::uint64_t> approximated_concepts(const pqlab::Hypothesis& h) {
  const int n = h.modulus();
  const int need = static_cast<int>(std::ceil(2.0 * (n - 1) / 3.0 - 1e-12));
  std::set<std::uint64_t> out;
  for (std::uint64_t c = 0; c < (std::uint64_t{1} << n); ++c) {
    int good = 0;
    for (int q = 1; q < n; ++q) good += parity(c, n, h.table()[q - 1].x, q) == h.table()[q - 1].b ? 1 : 0;
    if (good >= need) out.insert(c);
  }
  return out;
}

// Cost of the best deterministic protocol with at most c messages by
// enumerating every Alice map X -> [c]; Bob answers optimally per message.
inline double best_error_single(const pqlab::SingleInputProblem& p, std::size_t c) {
  std::vector<std::size_t> alice(p.inputs, 0);
  double best = 1.0;
  while (true) {
    double success = 0.0;
    for (std::size_t msg = 0; msg < c; ++msg) {
      double top = 0.0;
      for (std::size_t z = 0; z < p.answers; ++z) {
        double w = 0.0;
        for (std::size_t x = 0; x < p.inputs; ++x) w += alice[x] == msg && p.accepts(x, z) ? p.mu[x] : 0.0;
        top = std::max(top, w);
      }
      success += top;
    }
    best = std::min(best, 1.0 - success);
    std::size_t i = 0;
    while (i < p.inputs && ++alice[i] == c) alice[i++] = 0;
    if (i == p.inputs) break;
  }
  return best;
}

inline double best_error_two_sided(const pqlab::TwoSidedProblem& p, std::size_t c) {
  std::vector<std::size_t> alice(p.inputs, 0);
  double best = 1.0;
  while (true) {
    double success = 0.0;
    for (std::size_t msg = 0; msg < c; ++msg) {
      for (std::size_t y = 0; y < p.bob_inputs; ++y) {
        double top = 0.0;
        for (std::size_t z = 0; z < p.answers; ++z) {
          double w = 0.0;
          for (std::size_t x = 0; x < p.inputs; ++x) {
            w += alice[x] == msg && p.accepts(x, y, z) ? p.mu[x * p.bob_inputs + y] : 0.0;
          }
          top = std::max(top, w);
        }
        success += top;
      }
    }
    best = std::min(best, 1.0 - success);
    std::size_t i = 0;
    while (i < p.inputs && ++alice[i] == c) alice[i++] = 0;
    if (i == p.inputs) break;
  }
  return best;
}

template <class Problem, class ErrorFn>
std::size_t naive_cost(const Problem& p, double eps, ErrorFn error) {
  for (std::size_t c = 1;; ++c) {
    if (error(p, c) <= eps + 1e-12) return c;
  }
}

inline std::vector<double> random_simplex(std::size_t n, pqlab::Rng& rng, double floor = 0.0) {
  std::vector<double> v(n);
  double total = 0.0;
  for (auto& x : v) {
    x = floor + rng.uniform();
    total += x;
  }
  for (auto& x : v) x /= total;
  return v;
}

inline pqlab::TwoSidedProblem random_two_sided(pqlab::Rng& rng, std::size_t max_x, std::size_t max_y, std::size_t max_z,
                                                double density) {
  pqlab::TwoSidedProblem p;
  p.inputs = 2 + rng.below(max_x - 1);
  p.bob_inputs = 2 + rng.below(max_y - 1);
  p.answers = 2 + rng.below(max_z - 1);
  p.relation.assign(p.inputs * p.bob_inputs * p.answers, 0);
  for (std::size_t x = 0; x < p.inputs; ++x) {
    for (std::size_t y = 0; y < p.bob_inputs; ++y) {
      bool any = false;
      for (std::size_t z = 0; z < p.answers; ++z) {
        const bool v = rng.uniform() < density;
        p.relation[(x * p.bob_inputs + y) * p.answers + z] = v ? 1 : 0;
        any = any || v;
      }
      if (!any) p.relation[(x * p.bob_inputs + y) * p.answers + rng.below(p.answers)] = 1;
    }
  }
  p.mu = pqlab::Distribution(random_simplex(p.inputs * p.bob_inputs, rng, 0.1));
  return p;
}

// Family whose answer laws are a common base plus a small input-dependent
// tilt toward valid answers, so I(A;B) stays small.
struct ConversionInstance {
  pqlab::AnswerFamily family;
  pqlab::SingleInputProblem problem;
  double eps;
};

inline ConversionInstance draw_conversion_instance(pqlab::Rng& rng);

// Redraws until the family is an eps-error protocol for the problem.
inline ConversionInstance random_conversion_instance(pqlab::Rng& rng) {
  while (true) {
    ConversionInstance inst = draw_conversion_instance(rng);
    double error = 0.0;
    for (std::size_t x = 0; x < inst.problem.inputs; ++x) {
      for (std::size_t z = 0; z < inst.problem.answers; ++z) {
        if (!inst.problem.accepts(x, z)) error += inst.family.prior[x] * inst.family.per_input[x][z];
      }
    }
    if (error <= inst.eps) return inst;
  }
}

inline ConversionInstance draw_conversion_instance(pqlab::Rng& rng) {
  const std::size_t nx = 2 + rng.below(7);
  const std::size_t nz = 2 + rng.below(7);
  pqlab::SingleInputProblem p;
  p.inputs = nx;
  p.answers = nz;
  p.relation.assign(nx * nz, 0);
  for (std::size_t x = 0; x < nx; ++x) {
    bool any = false;
    for (std::size_t z = 0; z < nz; ++z) {
      const bool v = rng.uniform() < 0.75;
      p.relation[x * nz + z] = v ? 1 : 0;
      any = any || v;
    }
    if (!any) p.relation[x * nz + rng.below(nz)] = 1;
  }
  const double eps = 0.35 + 0.3 * rng.uniform();
  const auto base = random_simplex(nz, rng, 0.1);
  const double tilt = 0.3 * rng.uniform();
  pqlab::AnswerFamily f{pqlab::Distribution(random_simplex(nx, rng, 0.2)), {}};
  for (std::size_t x = 0; x < nx; ++x) {
    std::vector<double> d(nz);
    double total = 0.0;
    for (std::size_t z = 0; z < nz; ++z) {
      d[z] = rng.uniform() * (p.accepts(x, z) ? 1.0 : 0.2);
      total += d[z];
    }
    std::vector<double> mixed(nz);
    for (std::size_t z = 0; z < nz; ++z) mixed[z] = (1.0 - tilt) * base[z] + tilt * d[z] / total;
    f.per_input.emplace_back(std::move(mixed));
  }
  p.mu = f.prior;
  return {std::move(f), std::move(p), eps};
}

}  // namespace oracle
