// Independent brute-force oracles used only by the test suites.
#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "wittlab/fields.hpp"

namespace wittlab::oracle {

// Exhaustive local solvability of z^2 = a x^2 + b y^2 over Q_p (small p) and
// over R, independent of the closed formulas in the library.
//
// After scaling a and b by squares to integers of valuation 0 or 1, a
// solution in Q_p is equivalent to a primitive integral solution mod p^3
// (odd p) resp. mod 2^6: one coordinate is then a unit and the corresponding
// gradient entry 2*coef*coord has valuation at most 2, so the multivariable
// Hensel lemma lifts the approximate zero; conversely an exact solution
// scales to a primitive one.  Only the squares of the coordinates matter, so
// the search runs over the distinct square residues.
inline int hilbert_bruteforce_q(const Rat& ar, const Rat& br, const Place& v) {
  if (v.type == Place::Type::Real) return (ar < 0 && br < 0) ? -1 : 1;
  const long long p = static_cast<long long>(v.p);
  auto normalize = [&](const Rat& r) {
    Int n = num(r) * den(r);
    Int pp = Int(p) * p;
    while (n % pp == 0) n /= pp;
    return n.convert_to<long long>();
  };
  const long long M = p == 2 ? 64 : p * p * p;
  auto md = [&](long long x) { return ((x % M) + M) % M; };
  const long long A = md(normalize(ar)), B = md(normalize(br));
  std::vector<std::uint8_t> any(M, 0), unit(M, 0);
  for (long long t = 0; t < M; ++t) {
    long long s = t * t % M;
    any[s] = 1;
    if (t % p != 0) unit[s] = 1;
  }
  std::vector<std::pair<long long, bool>> sqs;  // (square residue, unit-attained)
  for (long long s = 0; s < M; ++s)
    if (any[s]) sqs.emplace_back(s, unit[s] != 0);
  for (const auto& [s1, u1] : sqs) {
    for (const auto& [s2, u2] : sqs) {
      long long tgt = (A * s1 + B * s2) % M;
      // primitivity: if neither x nor y can be a unit, z must be one
      if ((u1 || u2) ? any[tgt] : unit[tgt]) return 1;
    }
  }
  return -1;
}

// Height-bounded search for an isotropic vector of a diagonal rational form:
// all integer vectors with |coordinates| <= height.
inline bool isotropic_bruteforce_q(const std::vector<Rat>& diag, int height) {
  // clear denominators: isotropy only depends on the square class pattern
  size_t n = diag.size();
  Int lcm = 1;
  for (const Rat& r : diag) lcm *= den(r);
  std::vector<long long> d(n);
  for (size_t i = 0; i < n; ++i) d[i] = Int(Rat(lcm) * diag[i]).convert_to<long long>();
  // starting from zero covers the upper half of the odometer cycle, which by
  // the symmetry v -> -v sees every vector up to sign
  std::vector<long long> vec(n, 0);
  while (true) {
    bool allzero = true;
    long long val = 0;
    for (size_t i = 0; i < n; ++i) {
      if (vec[i] != 0) allzero = false;
      val += d[i] * vec[i] * vec[i];
    }
    if (!allzero && val == 0) return true;
    size_t i = 0;
    while (i < n && vec[i] == height) vec[i++] = -height;
    if (i == n) return false;
    ++vec[i];
  }
}

}  // namespace wittlab::oracle
