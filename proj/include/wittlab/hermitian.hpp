// Quaternion algebras (a,b) with the canonical involution, diagonal
// skew-hermitian forms over them, Morita transfer to quadratic forms over
// splitting quadratic subfields, local-global isotropy/hyperbolicity over Q,
// representation of multiples, and the invariants e1, e2, e3, f3.
#pragma once

#include <optional>
#include <utility>

#include "wittlab/cohomology.hpp"

namespace wittlab {

struct QuaternionAlgebra {
  FieldDescriptor field;
  Element a, b;  // i^2 = a, j^2 = b, k = ij = -ji
};

QuaternionAlgebra make_quaternion_algebra(const Element& a, const Element& b);
BrauerClass2 algebra_class(const QuaternionAlgebra& Q);
bool is_division(const QuaternionAlgebra& Q);

// full quaternion x0 + xi i + xj j + xk k with coefficients in the base field
struct Quat {
  Element x0, xi, xj, xk;

  bool is_zero() const { return x0.is_zero() && xi.is_zero() && xj.is_zero() && xk.is_zero(); }
};

Quat quat_of(const FieldDescriptor& F, const Rat& x0, const Rat& xi, const Rat& xj,
             const Rat& xk);
Quat q_add(const Quat& u, const Quat& v);
Quat q_neg(const Quat& u);
Quat q_mul(const QuaternionAlgebra& Q, const Quat& u, const Quat& v);
Quat q_conj(const Quat& u);
Element q_norm(const QuaternionAlgebra& Q, const Quat& u);  // u * conj(u)
Quat q_inv(const QuaternionAlgebra& Q, const Quat& u);      // errors: ZeroElement

struct PureQuaternion {
  Element xi, xj, xk;

  bool is_zero() const { return xi.is_zero() && xj.is_zero() && xk.is_zero(); }
};

PureQuaternion make_pure(const Element& xi, const Element& xj, const Element& xk);
Quat pure_to_quat(const PureQuaternion& p);
PureQuaternion pure_of_quat(const Quat& u);  // errors: Internal if not pure
Element pure_square(const QuaternionAlgebra& Q, const PureQuaternion& p);
PureQuaternion pure_scale(const Element& c, const PureQuaternion& p);

struct SkewHermitianForm {
  QuaternionAlgebra alg;
  std::vector<PureQuaternion> diag;  // invertible pure quaternions

  int rank() const { return static_cast<int>(diag.size()); }
  int absolute_rank() const { return 2 * rank(); }
};

// errors: ZeroElement for non-invertible entries
SkewHermitianForm make_herm(const QuaternionAlgebra& Q, std::vector<PureQuaternion> diag);
SkewHermitianForm herm_direct_sum(const SkewHermitianForm& x, const SkewHermitianForm& y);
SkewHermitianForm herm_scale(const Element& c, const SkewHermitianForm& h);
SkewHermitianForm herm_neg(const SkewHermitianForm& h);
// <1,-lambda> (x) h = h | <-lambda> h
SkewHermitianForm herm_factor(const Element& lambda, const SkewHermitianForm& h);
// congruence transform of one diagonal entry: q -> conj(g) q g
SkewHermitianForm herm_entry_transform(const SkewHermitianForm& h, int index, const Quat& g);

Element herm_e1(const SkewHermitianForm& h);  // class of prod q_i^2

// ---------------------------------------------------------------------------
// Morita transfer
// ---------------------------------------------------------------------------

// K = F(q) = Q(sqrt(squarefree part of q^2)); returns the 2r-dimensional
// K-quadratic form whose adjoint corresponds to h_K.  Base field must be Q.
// errors: NotSplittingField (q^2 a square), UnsupportedField
std::pair<QuadExtension, QuadraticForm> morita_transfer(const SkewHermitianForm& h,
                                                        const PureQuaternion& q);

// ---------------------------------------------------------------------------
// Isotropy / hyperbolicity over Q (local-global)
// ---------------------------------------------------------------------------

bool isotropic_h(const SkewHermitianForm& h);   // errors: UnsupportedField, PreconditionFailed
bool hyperbolic_h(const SkewHermitianForm& h);
// Witt-cancellation based isometry: h1 = h2 iff h1 | (-h2) is hyperbolic
bool isometric_h(const SkewHermitianForm& h1, const SkewHermitianForm& h2);

// local anisotropic kernel rank of h at a ramified place of the algebra
// (classification: rank and discriminant; no anisotropic forms of rank >= 4)
int local_kernel_rank_ramified(const SkewHermitianForm& h, const Place& v);

// ---------------------------------------------------------------------------
// Representation and block decomposition
// ---------------------------------------------------------------------------

// if h represents a multiple of q, returns (lambda, h_rest) with
// h = <lambda q> | h_rest, produced by an explicit congruence.
// errors: SearchExhausted
std::optional<std::pair<Element, SkewHermitianForm>> represent_multiple(
    const SkewHermitianForm& h, const PureQuaternion& q);

struct HermBlock {
  PureQuaternion q;
  Element a;       // q^2
  Element lambda;  // block <q><1,-lambda> = <q, -lambda q>
};

// h = |_i <q_i><1,-lambda_i>; needs even rank and trivial e1.
// errors: DecompositionFailed
std::vector<HermBlock> herm_decompose_blocks(const SkewHermitianForm& h);

struct HermInvariantReport {
  int relative_rank = 0;
  int absolute_rank = 0;
  Element e1;
  bool e1_trivial = false;
  std::optional<BrauerClass2> e2;  // defined mod [Q], present iff e1 trivial
  bool e2_trivial_mod_q = false;
  std::vector<HermBlock> blocks;             // present with e2
  std::optional<H3Class> f3;                 // present iff e2 trivial mod [Q]
};

// errors: DecompositionFailed
HermInvariantReport herm_invariants(const SkewHermitianForm& h);

// equality of Brauer classes modulo {0, [Q]}
bool brauer_equal_mod_q(const BrauerClass2& x, const BrauerClass2& y,
                        const QuaternionAlgebra& Q);

// ---------------------------------------------------------------------------
// e3 / f3 formula engine
// ---------------------------------------------------------------------------

struct HermE3 {
  ModClass e3;  // mod F^x . [Q]
  H3Class f3;
};

// trivial-discriminant branch: invariants of <1,-lambda> (x) h, where e1(h)=0:
// e3 = lambda . e2(h) and f3 = 0 if the absolute rank of h is 0 mod 4, else
// lambda . [Q].  errors: PreconditionFailed, DecompositionFailed
HermE3 e3_rank2_factor(const SkewHermitianForm& h, const Element& lambda);

// nontrivial-discriminant branch: invariants of <1,-N(mu)> (x) h where K is
// the discriminant extension of h and mu in K: e3 = cores_{K/F}(mu . e2(h_K)),
// f3 = 0 or N(mu) . [Q].  errors: PreconditionFailed, DecompositionFailed
HermE3 e3_rank2_factor_cores(const SkewHermitianForm& h, const Element& mu);

// f3(|_i <lambda_i> h_i) = prod lambda_i^{n_i/2} . [D]; n_i = absolute rank.
// errors: CliffordObstruction if sum lambda_i . e1(h_i) != 0
H3Class f3_sum(const std::vector<std::pair<Element, SkewHermitianForm>>& blocks);

// ModClass arithmetic for the additivity law e3(h | h') = e3(h) + e3(h')
ModClass e3_additive(const ModClass& x, const ModClass& y);
// relative invariant e3(h1 | <lambda> h2) - e3(h1 | h2) = lambda . e2(h2)
// errors: PreconditionFailed when e2(h2) is undefined
ModClass e3_relative(const SkewHermitianForm& h1, const SkewHermitianForm& h2,
                     const Element& lambda);

// restriction of h to K = Q(sqrt d): same pures over the extended base field
SkewHermitianForm herm_restrict(const QuadExtension& K, const SkewHermitianForm& h);

// a pure quaternion q with q^2 a local square at v (so F(q) is split at v);
// used to read off local invariants through a place-adapted Morita transfer.
// errors: SearchExhausted
PureQuaternion splitting_pure_at(const QuaternionAlgebra& Q, const Place& v);

}  // namespace wittlab
