#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "wittlab/deg8.hpp"

using namespace wittlab;

namespace {

const FieldDescriptor Q = FieldDescriptor::rationals();
const FieldDescriptor Qt = FieldDescriptor::rational_function();

QuaternionAlgebra alg_q(int a, int b) {
  return make_quaternion_algebra(make_elem(Q, a), make_elem(Q, b));
}

PureQuaternion pq(const FieldDescriptor& F, const Rat& xi, const Rat& xj, const Rat& xk) {
  return make_pure(make_elem(F, xi), make_elem(F, xj), make_elem(F, xk));
}

// member test up to Brauer equivalence
bool in_group(const QuaternionicSubgroup& g, const BrauerClass2& x) {
  for (const BrauerClass2& y : g.elements)
    if (brauer_equal(x, y)) return true;
  return false;
}

bool block_sums_check(const Decomposition8& dec) {
  BrauerClass2 a = dec.input.algebra();
  for (const Block8& b : dec.blocks)
    if (!brauer_equal(brauer_add(b.q_left, b.q_right), a)) return false;
  return true;
}

}  // namespace

TEST_CASE("split hyperbolic: trivial blocks, split by every quadratic field") {
  Involution8 inv = involution8_split(hyperbolic_form(Q, 4));
  Decomposition8 dec = decompose8(inv);
  CHECK(dec.blocks.size() == 2);
  CHECK(block_sums_check(dec));
  CHECK(dec.group.order() == 1);
  TrialityTriple tri = triality_components(dec);
  CHECK(brauer_is_zero(tri.a_class));
  CHECK(brauer_is_zero(tri.c_plus));
  CHECK(brauer_is_zero(tri.c_minus));
  REQUIRE(tri.sigma_plus.has_value());
  CHECK(tri.sigma_plus->kind == Involution8::Kind::Split);
  CHECK(witt_is_zero(*tri.sigma_plus->phi));
  QuadSplit8Report qs = quadsplit8(dec);
  CHECK(qs.kind == QuadSplit8Report::Kind::SplitAndHyperbolicOver);
  CHECK_THROWS_WITH_AS(e3_f3_deg8(inv), doctest::Contains("ConditionEqCViolated"),
                       Error);
}

TEST_CASE("split sum of two Pfister multiples: blocks, equal components, splitting") {
  QuadraticForm phi = direct_sum(
      pfister({make_elem(Q, -1), make_elem(Q, -1)}).expansion,
      scale_form(make_elem(Q, 3), pfister({make_elem(Q, -1), make_elem(Q, 3)}).expansion));
  Involution8 inv = involution8_split(phi);
  Decomposition8 dec = decompose8(inv);
  REQUIRE(dec.blocks.size() == 2);
  CHECK(block_sums_check(dec));
  // each split block has equal left and right factor
  for (const Block8& b : dec.blocks) CHECK(brauer_equal(b.q_left, b.q_right));
  CHECK(dec.group.order() == 4);
  TrialityTriple tri = triality_components(dec);
  // [A] = 0, so the two components share the class [Q_1] + [Q_2]
  BrauerClass2 c = brauer_add(dec.blocks[0].q_left, dec.blocks[1].q_left);
  CHECK(brauer_equal(tri.c_plus, c));
  CHECK(brauer_equal(tri.c_minus, c));
  REQUIRE(tri.sigma_plus.has_value());
  REQUIRE(tri.sigma_minus.has_value());
  CHECK(tri.sigma_plus->kind == Involution8::Kind::Index2);
  QuadSplit8Report qs = quadsplit8(dec);
  REQUIRE(qs.kind == QuadSplit8Report::Kind::SplitAndHyperbolicOver);
  // the splitting field also drives the converse construction
  Decomposition8 dec2 = quadsplit8_converse(inv, *qs.d);
  CHECK(dec2.blocks.size() == 2);
  CHECK(block_sums_check(dec2));
  Int d = squarefree_part(Rat(num(qs.d->x0) * den(qs.d->x0)));
  QuadExtension K = QuadExtension::over_q(d);
  for (const Block8& b : dec2.blocks) {
    CHECK(brauer_is_zero(brauer_restrict(K, b.q_left)));
    CHECK(brauer_is_zero(brauer_restrict(K, b.q_right)));
  }
}

TEST_CASE("constructor rejections") {
  CHECK_THROWS_WITH_AS(involution8_split(hyperbolic_form(Q, 3)),
                       doctest::Contains("PreconditionFailed"), Error);
  CHECK_THROWS_WITH_AS(involution8_split(parse_form(
                           Q, {"1", "1", "1", "1", "1", "1", "1", "2"})),
                       doctest::Contains("PreconditionFailed"), Error);
  QuaternionAlgebra A = alg_q(-1, -1);
  CHECK_THROWS_WITH_AS(
      involution8_index2(make_herm(A, {pq(Q, 1, 0, 0), pq(Q, 0, 1, 0)})),
      doctest::Contains("PreconditionFailed"), Error);
  QuaternionAlgebra S = alg_q(1, 1);
  CHECK_THROWS_WITH_AS(
      involution8_index2(make_herm(
          S, {pq(Q, 1, 0, 0), pq(Q, 0, 1, 0), pq(Q, 1, 0, 0), pq(Q, 0, 1, 0)})),
      doctest::Contains("PreconditionFailed"), Error);
  // nontrivial discriminant
  CHECK_THROWS_WITH_AS(
      involution8_index2(make_herm(
          A, {pq(Q, 1, 0, 0), pq(Q, 0, 1, 0), pq(Q, 0, 0, 1), pq(Q, 1, 1, 0)})),
      doctest::Contains("PreconditionFailed"), Error);
}

TEST_CASE("split Clifford invariant of index 4 over Q(t): obstructed") {
  QuadraticForm phi = direct_sum(
      pfister({make_elem(Qt, 2), elem_t()}).expansion,
      pfister({make_elem(Qt, 5), mul(make_elem(Qt, 3), elem_t())}).expansion);
  Involution8 inv = involution8_split(phi);
  CHECK_THROWS_WITH_AS(decompose8(inv), doctest::Contains("ObstructedInput"), Error);
}

TEST_CASE("index 2 over Q: blocks, components, e3/f3, carrier independence") {
  QuaternionAlgebra A = alg_q(-1, -1);
  SkewHermitianForm h = make_herm(
      A, {pq(Q, 1, 0, 0), pq(Q, -2, 0, 0), pq(Q, 0, 1, 0), pq(Q, 0, -3, 0)});
  Involution8 inv = involution8_index2(h);
  Decomposition8 dec = decompose8(inv);
  REQUIRE(dec.blocks.size() == 2);
  CHECK(block_sums_check(dec));
  CHECK(dec.group.order() == 4);

  Deg8Invariants out = e3_f3_deg8(inv);
  CHECK(brauer_equal(brauer_add(out.c_plus, out.c_minus), algebra_class(A)));
  CHECK(!brauer_is_zero(out.c_plus));
  CHECK(!brauer_is_zero(out.c_minus));
  CHECK(h3_zero(h3_add(out.f3, out.f3)));  // 2-torsion sanity
  REQUIRE(out.e3_status == Deg8Invariants::E3Status::Exact);

  // V is contained in W
  CHECK(in_group(dec.group, inv.algebra()));
  CHECK(in_group(dec.group, out.c_plus));
  CHECK(in_group(dec.group, out.c_minus));

  // a second carrier rho': scale the appended rank-2 block; e3 agrees mod
  // F^x . V and f3 on the nose
  REQUIRE(out.rho.rank() == 6);
  SkewHermitianForm rho2 = out.rho;
  Element mu = make_elem(Q, 3);
  rho2.diag[4] = pure_scale(mu, rho2.diag[4]);
  rho2.diag[5] = pure_scale(mu, rho2.diag[5]);
  Deg12Invariants alt = e3_f3_deg12(involution_index2(rho2));
  CHECK(h3_equal(out.f3, alt.f3));
  REQUIRE(alt.e3_status == Deg12Invariants::E3Status::Exact);
  ModClass alt_mod{alt.e3->value, out.e3->modulus};
  CHECK(mod_equal(*out.e3, alt_mod).status == ModResult::Status::Equal);
}

TEST_CASE("triality over Q: equal f3 and e3 across the three involutions") {
  QuaternionAlgebra A = alg_q(-1, -1);
  SkewHermitianForm h = make_herm(
      A, {pq(Q, 1, 0, 0), pq(Q, -2, 0, 0), pq(Q, 0, 1, 0), pq(Q, 0, -3, 0)});
  TrialityReport rep = triality_e3_equality(involution8_index2(h));
  CHECK(rep.f3_equal);
  CHECK(rep.plus_mod_w == ModResult::Status::Equal);
  CHECK(rep.minus_mod_w == ModResult::Status::Equal);
  CHECK(rep.plus_mod_v == ModResult::Status::Equal);
  CHECK(rep.minus_mod_v == ModResult::Status::Equal);
  // the component involutions live over the component algebras
  CHECK(brauer_equal(rep.plus.dec.input.algebra(), rep.base.c_plus));
  CHECK(brauer_equal(rep.minus.dec.input.algebra(), rep.base.c_minus));
}

TEST_CASE("index 2 over Q(t): nonzero f3 = t . [Q], triality f3 agreement") {
  QuaternionAlgebra A =
      make_quaternion_algebra(make_elem(Qt, 2), make_elem(Qt, 5));
  Element t = elem_t();
  SkewHermitianForm h = make_herm(
      A, {pq(Qt, 1, 0, 0), pure_scale(neg(t), pq(Qt, 1, 0, 0)), pq(Qt, 0, 1, 0),
          pure_scale(neg(t), pq(Qt, 0, 1, 0))});
  Involution8 inv = involution8_index2(h);
  Deg8Invariants out = e3_f3_deg8(inv);
  CHECK(!h3_zero(out.f3));
  CHECK(h3_equal(out.f3, h3_cup(t, algebra_class(A))));

  TrialityReport rep = triality_e3_equality(inv);
  CHECK(rep.f3_equal);
  CHECK(!h3_zero(rep.plus.f3));
  CHECK(brauer_equal(rep.plus.dec.input.algebra(), rep.base.c_plus));
  CHECK(brauer_equal(rep.minus.dec.input.algebra(), rep.base.c_minus));
}

TEST_CASE("index-4 component over Q(t): eq:C violated, splitting impossible") {
  QuaternionAlgebra A =
      make_quaternion_algebra(make_elem(Qt, 2), make_elem(Qt, 5));
  Element t = elem_t();
  SkewHermitianForm h = make_herm(
      A, {pq(Qt, 1, 0, 0), pure_scale(neg(t), pq(Qt, 1, 0, 0)), pq(Qt, 0, 1, 0),
          pure_scale(neg(mul(make_elem(Qt, 3), t)), pq(Qt, 0, 1, 0))});
  Involution8 inv = involution8_index2(h);
  Decomposition8 dec = decompose8(inv);
  CHECK(dec.blocks.size() == 2);
  CHECK_THROWS_WITH_AS(e3_f3_deg8(inv), doctest::Contains("ConditionEqCViolated"),
                       Error);
  QuadSplit8Report qs = quadsplit8(dec);
  CHECK(qs.kind == QuadSplit8Report::Kind::Impossible);
}

TEST_CASE("converse splitting construction over Q, index 2") {
  QuaternionAlgebra A = alg_q(-1, -1);
  SkewHermitianForm h = make_herm(
      A, {pq(Q, 1, 0, 0), pq(Q, -1, 0, 0), pq(Q, 0, 1, 0), pq(Q, 0, -1, 0)});
  Involution8 inv = involution8_index2(h);
  Element delta = make_elem(Q, -1);
  Decomposition8 dec = quadsplit8_converse(inv, delta);
  REQUIRE(dec.blocks.size() == 2);
  CHECK(block_sums_check(dec));
  QuadExtension K = QuadExtension::over_q(-1);
  for (const Block8& b : dec.blocks) {
    CHECK(brauer_is_zero(brauer_restrict(K, b.q_left)));
    CHECK(brauer_is_zero(brauer_restrict(K, b.q_right)));
  }
  // rejections: square delta, non-splitting field
  CHECK_THROWS_WITH_AS(quadsplit8_converse(inv, make_elem(Q, 4)),
                       doctest::Contains("PreconditionFailed"), Error);
  CHECK_THROWS_WITH_AS(quadsplit8_converse(inv, make_elem(Q, 2)),
                       doctest::Contains("PreconditionFailed"), Error);
}
