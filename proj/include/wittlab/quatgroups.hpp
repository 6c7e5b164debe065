// Quaternionic subgroups U of the 2-torsion Brauer group: construction, the
// form n_U and the invariant f3(U), quadratic-splitting search, verdicts on
// the homology of Peyre's complex, and the xi construction over Q(t).
#pragma once

#include <optional>

#include "wittlab/hermitian.hpp"

namespace wittlab {

struct QuaternionicSubgroup {
  FieldDescriptor field;
  std::vector<BrauerClass2> generators;  // at most 3
  std::vector<BrauerClass2> elements;    // all sums, deduplicated, 0 first
  bool quaternionic = false;             // every nonzero element has index 2

  int order() const { return static_cast<int>(elements.size()); }
};

// enumerates the generated subgroup and checks the quaternionic property.
// errors: TooManyGenerators; NotQuaternionic when expect_quaternionic is set
// and some element has index 4
QuaternionicSubgroup subgroup(const FieldDescriptor& F,
                              const std::vector<BrauerClass2>& generators,
                              bool expect_quaternionic = true);

// single-symbol presentation of an index-<=2 class (nullopt for the zero
// class): syntactic slot merging first, bounded pool search as a fallback.
// errors: SearchExhausted
std::optional<Symbol2> quaternion_presentation(const BrauerClass2& u);

// norm form of an index-<=2 class: <<alpha,beta>> for (alpha,beta), the
// 4-dimensional hyperbolic form for 0
QuadraticForm norm_form(const FieldDescriptor& F, const BrauerClass2& u);

// n_U = sum over all elements of U of the norm forms; verified to lie in I^3
// whenever the sum of the elements vanishes (always, except order-2 groups).
// errors: NotQuaternionic
QuadraticForm n_u(const QuaternionicSubgroup& U);

// f3(U) = (lambda_1 lambda_2 lambda_3).[Q] where [Q] is the sum of the three
// generators, [H_i] the sum of the other two, and n_{Q_i} - n_{H_i} =
// <lambda_i> n_Q in the Witt ring; cross-checked against e3(n_U).
// errors: RoleAssignmentFailed, SearchExhausted
H3Class f3_of_group(const QuaternionicSubgroup& U);

struct SplitSearchResult {
  enum class Kind { SplitBy, Impossible, NoneWithinBound };
  Kind kind = Kind::NoneWithinBound;
  std::optional<Element> d;  // F(sqrt d) splits every element, certified
  std::int64_t bound = 0;    // candidates inspected, for NoneWithinBound
};

// over Q the decision is complete (SplitBy or Impossible); over Q(t) the
// search is bounded and every positive answer carries slot certificates
SplitSearchResult quadratic_splitting(const QuaternionicSubgroup& U);

struct PeyreVerdict {
  enum class Order { One, Two, Unknown };
  Order homology_order = Order::Unknown;
  std::optional<ModClass> generator;       // present for order 2
  std::optional<Element> splitting_field;  // present when a splitting was found
  std::int64_t search_bound_used = 0;
};

// order <= 4 or a quadratic splitting found => homology order 1; a seed class
// certified outside F^x . U => order 2 with that generator; otherwise Unknown.
// errors: NotQuaternionic
PeyreVerdict peyre_verdict(const QuaternionicSubgroup& U,
                           const std::optional<ModClass>& e3_seed = {});

// three-valued membership of a degree-3 class in F^x . U (sums of terms
// (lambda_i).u_i over the generators are allowed, unlike mod_equal)
struct FxuResult {
  enum class Status { In, NotIn, Unknown };
  Status status = Status::Unknown;
  std::int64_t bound = 0;
};
FxuResult fxu_membership(const H3Class& x, const QuaternionicSubgroup& U);

// ---------------------------------------------------------------------------
// the xi construction over F = Q(t)
// ---------------------------------------------------------------------------

struct XiData {
  Element a, b, c;               // independent square classes over Q
  Element x, y;                  // elements of K = Q(sqrt a), not in Q
  std::vector<Symbol2> c_syms;   // a class [C] over Q with res_K[C] = (bc,x)+(c,y)
};

struct XiOutput {
  QuadExtension K;
  BrauerClass2 H;          // (bc, N(x)) = (c, N(y)) over Q
  QuadraticForm psi;       // Albert form <bc, x, -bcx, -c, -y, cy> over K
  H3Class transfer_e3;     // e3 of the Scharlau transfer of psi: s(x)s(y).[H]
  H3Class xi;              // t.[C] + e3(s*(psi)) over Q(t)
  QuaternionicSubgroup U;  // order-8 group gen. by (a,t), (b,t), (c,t)+[H]
};

// errors: PreconditionFailed (dependent square classes, x or y rational),
// InconsistentData (the two presentations of H disagree, or res_K[C] is not
// (bc,x)+(c,y))
XiOutput xi_construct(const XiData& data);

struct DescentWitness {
  Symbol2 a1, a2, a3;  // quaternion algebras over Q with [C] = [A1]+[A2]+[A3]
};

// checks the supplied decomposition witnesses: [C] = [A1]+[A2]+[A3] with A3
// split by K.  errors: WitnessIncomplete when no witness is given
bool descent_criterion(const XiData& data, const std::optional<DescentWitness>& w);

// a witness u with x = (d).u, certifying that F(sqrt d) splits x (Arason's
// description of the kernel of restriction); bounded search
std::optional<BrauerClass2> h3_kernel_witness(const H3Class& x, const Element& d,
                                              const std::vector<Element>& seeds);

}  // namespace wittlab
