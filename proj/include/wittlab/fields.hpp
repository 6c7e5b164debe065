// Exact arithmetic, square classes, places, Hilbert symbols and
// quadratic-extension plumbing for the supported base fields
// Q, Q(sqrt(d)) and Q(t).
#pragma once

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wittlab/common.hpp"

namespace wittlab {

// ---------------------------------------------------------------------------
// Field descriptors
// ---------------------------------------------------------------------------

struct FieldDescriptor {
  enum class Kind { Q, QSqrt, Qt };
  Kind kind = Kind::Q;
  Int d = 0;  // squarefree, != 0, 1; meaningful only for QSqrt

  static FieldDescriptor rationals() { return {Kind::Q, 0}; }
  static FieldDescriptor quad(const Int& d);
  static FieldDescriptor rational_function() { return {Kind::Qt, 0}; }

  bool operator==(const FieldDescriptor& o) const {
    return kind == o.kind && (kind != Kind::QSqrt || d == o.d);
  }
  bool operator!=(const FieldDescriptor& o) const { return !(*this == o); }
  bool is_number_field() const { return kind != Kind::Qt; }
  std::string str() const;
};

// ---------------------------------------------------------------------------
// Monic irreducible polynomials over Q of degree <= 2 (the supported support
// for Q(t) elements).  deg==1 means t + c0, deg==2 means t^2 + c1*t + c0.
// ---------------------------------------------------------------------------

struct Poly {
  int deg = 1;
  Rat c1 = 0;  // only for deg 2
  Rat c0 = 0;

  static Poly linear(const Rat& root) { return Poly{1, 0, -root}; }
  Rat eval(const Rat& t0) const;
  Rat disc() const { return c1 * c1 - 4 * c0; }  // deg 2 only
  std::string str() const;

  friend bool operator==(const Poly& a, const Poly& b) {
    return a.deg == b.deg && a.c1 == b.c1 && a.c0 == b.c0;
  }
  friend bool operator<(const Poly& a, const Poly& b) {
    if (a.deg != b.deg) return a.deg < b.deg;
    if (a.c1 != b.c1) return a.c1 < b.c1;
    return a.c0 < b.c0;
  }
};

// Dense polynomial helpers (used for parsing / addition over Q(t)).
using DensePoly = std::vector<Rat>;  // coefficient list, low degree first

// ---------------------------------------------------------------------------
// Elements
// ---------------------------------------------------------------------------

// An exact scalar of the ambient field.
//  - Q:      value = x0.
//  - QSqrt:  value = x0 + x1*sqrt(d).
//  - Qt:     value = x0 * prod_i poly_i^{e_i}  (factored normal form; the
//            e_i may be negative, giving rational functions).
struct Element {
  FieldDescriptor field;
  Rat x0 = 0;
  Rat x1 = 0;
  std::map<Poly, int> polys;

  bool is_zero() const;
  bool is_rational_constant() const;  // lies in the prime field Q
  std::string str() const;
};

Element make_elem(const FieldDescriptor& F, const Rat& value);
Element make_quad_elem(const Int& d, const Rat& x0, const Rat& x1);
Element elem_t();  // the indeterminate t over Q(t)
Element elem_poly(const Poly& p);

Element neg(const Element& a);
Element mul(const Element& a, const Element& b);
Element mul(const Element& a, const Rat& c);
Element inverse(const Element& a);
Element divide(const Element& a, const Element& b);
Element add(const Element& a, const Element& b);  // Qt: via expansion + refactoring
Element sub(const Element& a, const Element& b);
Element elem_pow(const Element& a, int e);
bool elem_equal(const Element& a, const Element& b);

// Galois conjugate over QSqrt (identity elsewhere).
Element conj(const Element& a);

// Evaluate a Q(t) element at t = t0 (must not hit a zero/pole of a factor
// with nonzero exponent ... callers pick good t0); returns a rational Element.
Element evaluate_at(const Element& a, const Rat& t0);

// ---------------------------------------------------------------------------
// Integer factorization and square classes
// ---------------------------------------------------------------------------

std::map<Int, int> factor_int(Int n);  // n > 0
bool is_prime_int(const Int& n);
Int squarefree_part(const Rat& r);  // signed squarefree integer with r/sf a square

Element square_class(const Element& x);  // canonical squarefree representative
bool is_square(const Element& x);
bool same_square_class(const Element& x, const Element& y);

// ---------------------------------------------------------------------------
// Places of number fields (Q and Q(sqrt d))
// ---------------------------------------------------------------------------

struct Place {
  enum class Type { Real, Finite };
  enum class Split { NA, Split, Inert, Ramified };

  Type type = Type::Finite;
  int real_index = 0;  // embedding: 0 sends sqrt(d) to +sqrt(d), 1 to -sqrt(d)
  Int p = 0;           // rational prime below (Finite)
  Split split = Split::NA;
  int which = 0;  // for Split primes: selects one of the two places above p

  std::string str() const;
  friend bool operator==(const Place& a, const Place& b) {
    return a.type == b.type && a.real_index == b.real_index && a.p == b.p &&
           a.split == b.split && a.which == b.which;
  }
  friend bool operator<(const Place& a, const Place& b);
};

std::vector<Place> real_places(const FieldDescriptor& F);
std::vector<Place> places_above(const FieldDescriptor& F, const Int& p);
// All real places plus the finite places above 2, above primes dividing d,
// and above every prime in the support of the given elements.
std::vector<Place> candidate_places(const FieldDescriptor& F,
                                    const std::vector<Element>& elems);

// Sign of a nonzero element at a real place (+1 / -1).
int real_sign(const Element& x, const Place& v);
// Valuation of a nonzero element at a finite place.
int valuation(const Element& x, const Place& v);
// Is x a nonzero square in the completion at v?
bool local_square(const Element& x, const Place& v);

// Hilbert symbol (a,b)_v over Q or Q(sqrt d); returns +1 or -1.
int hilbert_symbol(const Element& a, const Element& b, const Place& v);

// ---------------------------------------------------------------------------
// Quadratic extensions K = F(sqrt(delta))
// ---------------------------------------------------------------------------

// Only base F = Q is materialized as a field backend (K = Q(sqrt d)); this is
// what every corestriction / Scharlau transfer in the pipelines uses.
struct QuadExtension {
  FieldDescriptor base;
  Int d = 0;  // squarefree nonsquare

  static QuadExtension over_q(const Int& d);
  FieldDescriptor ext_field() const;
};

Element qe_norm(const QuadExtension& K, const Element& x);   // x * iota(x), in base
Element qe_conj(const QuadExtension& K, const Element& x);   // iota(x)
Element qe_s(const QuadExtension& K, const Element& x);      // second coordinate in {1, sqrt d}
Element qe_embed(const QuadExtension& K, const Element& x);  // base -> K

// ---------------------------------------------------------------------------
// Parsing / printing of the tiny scalar grammar, e.g. "(-3/4)*t*(t-1)^2".
// For elements of a quadratic extension the letter `s` denotes sqrt(d).
// ---------------------------------------------------------------------------

Element parse_element(const FieldDescriptor& F, const std::string& text);

// Factor a dense polynomial over Q into content * monic irreducibles of
// degree <= 2; throws UnsupportedSupport when impossible.
std::pair<Rat, std::map<Poly, int>> factor_poly(const DensePoly& p);

}  // namespace wittlab
