// 2-torsion Brauer classes and degree-3 Galois cohomology classes, all backed
// by Witt-form representatives: a Brauer class is stored as a form in I^2, an
// H^3 class as a form in I^3, and every zero/equality test reduces to a
// fundamental-ideal membership decision (e_n identifies I^n/I^{n+1} with the
// 2-torsion of H^n).  A symbol presentation is carried alongside for
// reporting and for residue/corestriction bookkeeping.
#pragma once

#include <optional>

#include "wittlab/qforms.hpp"

namespace wittlab {

struct Symbol2 {
  Element a, b;  // quaternion symbol (a,b)
};

struct BrauerClass2 {
  FieldDescriptor field;
  QuadraticForm rep;  // a form in I^2 whose Clifford class is the class
  std::vector<Symbol2> symbols;
};

BrauerClass2 brauer_zero(const FieldDescriptor& F);
BrauerClass2 brauer_symbol(const Element& a, const Element& b);
// e2 of a form; errors: NotInFundamentalIdealPower
BrauerClass2 e2(const QuadraticForm& q);
BrauerClass2 brauer_add(const BrauerClass2& x, const BrauerClass2& y);  // FieldMismatch
bool brauer_is_zero(const BrauerClass2& x);
bool brauer_equal(const BrauerClass2& x, const BrauerClass2& y);
// 1 iff zero; always <= 2 over number fields; over Q(t) 2 is certified by a
// symbol search and 4 by a Springer anisotropy certificate for an Albert
// form; errors: SearchExhausted when neither certificate is found
int brauer_index(const BrauerClass2& x);
// ramified places over number fields (even cardinality)
std::vector<Place> brauer_ramification(const BrauerClass2& x);
// residue map Br_2(Q(t)) -> kappa(pi)^x / squares (tame symbol); the class is
// zero iff all residues are trivial and the specialization at a good point is
// zero
Element brauer_residue(const BrauerClass2& x, const Poly& pi);
// restriction along Q -> Q(sqrt d)
BrauerClass2 brauer_restrict(const QuadExtension& K, const BrauerClass2& x);

struct Symbol3 {
  Element a, b, c;
};

struct CoresTerm {
  QuadExtension K;
  Element mu;  // in K
  std::vector<Symbol2> symbols_k;
};

struct H3Class {
  FieldDescriptor field;
  QuadraticForm rep;  // a form in I^3 representing the class via e_3
  std::vector<Symbol3> symbols;
  std::vector<CoresTerm> cores;
};

H3Class h3_zero_class(const FieldDescriptor& F);
H3Class h3_symbol(const Element& a, const Element& b, const Element& c);
// e3 of a form; errors: NotInFundamentalIdealPower
H3Class e3(const QuadraticForm& q);
H3Class h3_add(const H3Class& x, const H3Class& y);  // FieldMismatch
// cup product (lambda) . u
H3Class h3_cup(const Element& lambda, const BrauerClass2& u);
bool h3_zero(const H3Class& x);  // errors: UnsupportedSupport (via factoring)
bool h3_equal(const H3Class& x, const H3Class& y);
// residue H^3(Q(t)) -> Br_2(kappa(pi))
BrauerClass2 h3_residue(const H3Class& x, const Poly& pi);

// cores_{K/F}(mu . c) for a class c over K = Q(sqrt d), computed at the Witt
// level via the Scharlau transfer of <1,-mu> (x) rep(c); satisfies the
// projection formula.  errors: NotCorestrictible
H3Class corestriction(const QuadExtension& K, const Element& mu, const BrauerClass2& c);

// ---------------------------------------------------------------------------
// Classes modulo F^x . U
// ---------------------------------------------------------------------------

struct Modulus {
  // the subgroup U of Br_2 (0 is always implicitly a member)
  std::vector<BrauerClass2> classes;
};

struct ModClass {
  H3Class value;
  Modulus modulus;
};

struct ModResult {
  enum class Status { Equal, NotEqual, Unknown };
  Status status = Status::Unknown;
  // certificate for Equal: value_x - value_y = (lambda) . witness
  std::optional<Element> lambda;
  std::optional<BrauerClass2> witness;
  std::int64_t bound = 0;  // exhausted search bound, for Unknown
};

// errors: ModulusMismatch
ModResult mod_equal(const ModClass& x, const ModClass& y);

}  // namespace wittlab
