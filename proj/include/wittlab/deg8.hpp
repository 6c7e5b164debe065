// Degree-8 algebras with orthogonal involution of trivial discriminant:
// triality components of the Clifford algebra, additive decompositions into
// two degree-4 blocks, decomposition groups W, and the extension of e3/f3 to
// the index-(2,2,2) case through an auxiliary degree-12 involution.
#pragma once

#include "wittlab/deg12.hpp"

namespace wittlab {

// (A, sigma) of degree 8 with trivial discriminant: split carrier is an
// 8-dimensional quadratic form, index-2 carrier a rank-4 skew-hermitian form
// over a division quaternion algebra.
struct Involution8 {
  enum class Kind { Split, Index2 };
  Kind kind = Kind::Split;
  std::optional<QuadraticForm> phi;
  std::optional<SkewHermitianForm> h;

  const FieldDescriptor& field() const;
  BrauerClass2 algebra() const;
};

// errors: PreconditionFailed (wrong dimension or rank, nontrivial e1,
// non-division algebra in the index-2 constructor), UnsupportedField
Involution8 involution8_split(const QuadraticForm& phi);
Involution8 involution8_index2(const SkewHermitianForm& h);

// one degree-4 factor (Q_left, -) (x) (Q_right, -) of trivial discriminant,
// with [Q_left] + [Q_right] = [A]
struct Block8 {
  BrauerClass2 q_left;
  BrauerClass2 q_right;
  std::optional<Element> alpha;        // split carrier <alpha> n
  std::optional<PfisterForm> n;
  std::optional<HermBlock> herm_block;  // index-2 carrier <q><1,-lambda>
};

// W = {0, [A], [C+], [C-], [Q_1], ..., [Q_4]} generated by any three of the
// four block factors; it may fail to be quaternionic (three index-4 classes)
struct Decomposition8 {
  Involution8 input;
  std::vector<Block8> blocks;  // two
  QuaternionicSubgroup group;  // W, built without the quaternionic check
};

// requires at least two of ind A, ind C+, ind C- at most 2 (for a split
// carrier this means the Clifford invariant has index at most 2), otherwise
// ObstructedInput.  Split case: a 4-element diagonal subset of square
// product, with a bounded similar-Pfister search as fallback over number
// fields; index-2 case: the rank-2 block chain.  Reassembly is certified
// isometric over number fields.
// errors: ObstructedInput, SearchExhausted, DecompositionFailed
Decomposition8 decompose8(const Involution8& inv);

// the two Clifford components, read off a decomposition: the classes are
// [Q_1]+[Q_3] and [Q_1]+[Q_4] up to permutation.  Labeling is fixed by a
// deterministic ordering of the symbol data; `swapped` records the choice.
// Component carriers (canonical up to a block scale) are built when the
// component has index at most 2 and the bounded block search succeeds.
struct TrialityTriple {
  Decomposition8 dec;
  BrauerClass2 a_class;
  BrauerClass2 c_plus;
  BrauerClass2 c_minus;  // [C+] + [C-] = [A]
  bool swapped = false;
  std::optional<Involution8> sigma_plus;
  std::optional<Involution8> sigma_minus;
};

TrialityTriple triality_components(const Decomposition8& dec);

struct Deg8Invariants {
  Decomposition8 dec;
  BrauerClass2 c_plus;
  BrauerClass2 c_minus;
  H3Class f3;  // in F^x . [Q]
  enum class E3Status { Exact, Unknown };
  E3Status e3_status = E3Status::Unknown;
  std::optional<ModClass> e3;  // mod F^x . V, V = {0, [Q], [C+], [C-]}
  SkewHermitianForm rho;       // the rank-6 carrier of the auxiliary
                               // degree-12 involution used
};

// defined when ind A = ind C+ = ind C- = 2: assembles a degree-12 carrier
// rho with (M_6(Q), rho) = (A, sigma) + (C+, -) (x) (C-, -), delegates to
// e3_f3_deg12, and reduces e3 modulo F^x . V.  Any two carrier choices move
// e3 by (lambda) . [C+], which dies in the quotient.
// errors: ConditionEqCViolated, SearchExhausted
Deg8Invariants e3_f3_deg8(const Involution8& inv);

struct TrialityReport {
  Deg8Invariants base;
  Deg8Invariants plus;
  Deg8Invariants minus;
  bool f3_equal = false;  // exact H3Class equality, carrier-independent
  // e3 equality of the components against the base involution, first modulo
  // F^x . W (carrier-independent), then modulo F^x . V after a bounded
  // search for the component block scale realizing the true component
  ModResult::Status plus_mod_w = ModResult::Status::Unknown;
  ModResult::Status minus_mod_w = ModResult::Status::Unknown;
  ModResult::Status plus_mod_v = ModResult::Status::Unknown;
  ModResult::Status minus_mod_v = ModResult::Status::Unknown;
  std::optional<Element> plus_scale;
  std::optional<Element> minus_scale;
};

// three independent pipeline runs (sigma, sigma+, sigma-)
// errors: ConditionEqCViolated, SearchExhausted
TrialityReport triality_e3_equality(const Involution8& inv);

struct QuadSplit8Report {
  enum class Kind { SplitAndHyperbolicOver, NoneFound, Impossible };
  Kind kind = Kind::NoneFound;
  std::optional<Element> d;  // F(sqrt d) splits W, certified
  std::int64_t bound = 0;
};

// forward direction: a quadratic field splitting W makes the involution
// split and hyperbolic; Impossible when W contains an index-4 class
QuadSplit8Report quadsplit8(const Decomposition8& dec);

// converse direction: given delta with A split and sigma hyperbolic over
// K = F(sqrt delta), produce a decomposition whose group is split by K
// (index-2 case: h = <d><1,alpha,beta,gamma> with d^2 = delta; split case:
// two blocks <alpha_i> n_i with both n_i split by K).  Base field Q only.
// errors: PreconditionFailed, SearchExhausted, UnsupportedField
Decomposition8 quadsplit8_converse(const Involution8& inv, const Element& delta);

}  // namespace wittlab
