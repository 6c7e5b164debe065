#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "wittlab/cohomology.hpp"

using namespace wittlab;

namespace {

const FieldDescriptor Q = FieldDescriptor::rationals();
const FieldDescriptor Qt = FieldDescriptor::rational_function();

Element qe(const std::string& s) { return parse_element(Q, s); }
Element te(const std::string& s) { return parse_element(Qt, s); }

BrauerClass2 qsym(const std::string& a, const std::string& b) {
  return brauer_symbol(qe(a), qe(b));
}
BrauerClass2 tsym(const std::string& a, const std::string& b) {
  return brauer_symbol(te(a), te(b));
}

}  // namespace

TEST_CASE("brauer group law and zero test") {
  BrauerClass2 s = qsym("-1", "-1");
  CHECK_FALSE(brauer_is_zero(s));
  CHECK(brauer_is_zero(brauer_add(s, s)));
  CHECK(brauer_equal(s, s));
  CHECK(brauer_is_zero(qsym("2", "7")));   // split everywhere
  CHECK_FALSE(brauer_is_zero(qsym("2", "5")));
  CHECK(brauer_is_zero(qsym("3", "1")));   // split slot
  CHECK(brauer_equal(brauer_add(qsym("2", "3"), qsym("3", "3")),
                     brauer_add(qsym("3", "3"), qsym("2", "3"))));
  CHECK_THROWS_WITH_AS(brauer_add(qsym("2", "3"), tsym("t", "2")),
                       doctest::Contains("FieldMismatch"), Error);
  CHECK_THROWS_WITH_AS(brauer_symbol(qe("0"), qe("1")),
                       doctest::Contains("ZeroElement"), Error);
}

TEST_CASE("ramification and index over number fields") {
  BrauerClass2 s = qsym("-1", "-1");
  auto ram = brauer_ramification(s);
  REQUIRE(ram.size() == 2);
  // exactly {infinity, 2}
  bool has_real = false, has_2 = false;
  for (const Place& v : ram) {
    if (v.type == Place::Type::Real) has_real = true;
    if (v.type == Place::Type::Finite && v.p == 2) has_2 = true;
  }
  CHECK(has_real);
  CHECK(has_2);
  CHECK(brauer_index(s) == 2);
  CHECK(brauer_index(brauer_zero(Q)) == 1);
  CHECK(brauer_ramification(qsym("2", "7")).empty());
  // (2,5) ramifies at {2?,5}: compute and check even cardinality
  auto r25 = brauer_ramification(qsym("2", "5"));
  CHECK(r25.size() % 2 == 0);
  CHECK_FALSE(r25.empty());
}

TEST_CASE("restriction to a quadratic extension") {
  QuadExtension K = QuadExtension::over_q(-1);
  // (-1,-1) splits over Q(i): -1 becomes a square at the dyadic place
  CHECK(brauer_is_zero(brauer_restrict(K, qsym("-1", "-1"))));
  // (2,5) stays nonzero over Q(i): 5 splits in Q(i) and (2,5)_5 = -1 persists
  CHECK_FALSE(brauer_is_zero(brauer_restrict(K, qsym("2", "5"))));
}

TEST_CASE("brauer residues and index over Q(t)") {
  BrauerClass2 x = brauer_add(tsym("2", "t"), tsym("3", "t"));
  Poly at_t = Poly::linear(0);
  Element r = brauer_residue(x, at_t);
  CHECK(r.field == Q);
  CHECK(same_square_class(r, qe("6")));
  CHECK_FALSE(brauer_is_zero(x));
  CHECK(brauer_index(x) == 2);

  // extended classes have no residues and specialize back (Faddeev)
  BrauerClass2 ext = tsym("2", "5");
  CHECK(is_square(brauer_residue(ext, at_t)));
  CHECK_FALSE(brauer_is_zero(ext));
  CHECK(brauer_is_zero(tsym("2", "7")));

  // (2,t) + (3,5t): Albert form <2,t,-2t,-3,-5t,15t> has residues <2,-3> and
  // <1,-2,-5,15> at t, both anisotropic, so the biquaternion is division
  BrauerClass2 big = brauer_add(tsym("2", "t"), tsym("3", "5*t"));
  CHECK(brauer_index(big) == 4);
}

TEST_CASE("h3 classes: zero tests") {
  CHECK_FALSE(h3_zero(h3_symbol(qe("-1"), qe("-1"), qe("-1"))));
  CHECK(h3_zero(h3_symbol(qe("2"), qe("3"), qe("1"))));
  CHECK(h3_zero(h3_add(h3_symbol(qe("-1"), qe("-1"), qe("-1")),
                       h3_symbol(qe("-1"), qe("-1"), qe("-1")))));
  // symbols with a split quaternion part vanish
  CHECK(h3_zero(h3_symbol(qe("5"), qe("2"), qe("7"))));
  // (t,2,5) over Q(t): residue at t is (2,5) != 0
  H3Class xt = h3_symbol(te("t"), te("2"), te("5"));
  CHECK_FALSE(h3_zero(xt));
  CHECK(brauer_equal(h3_residue(xt, Poly::linear(0)), qsym("2", "5")));
}

TEST_CASE("h3 over Q(t): split residue case") {
  CHECK(h3_zero(h3_symbol(te("t"), te("2"), te("7"))));
  CHECK(h3_zero(h3_zero_class(Qt)));
}

TEST_CASE("e2 / e3 of forms") {
  QuadraticForm n = pfister({qe("2"), qe("5")}).expansion;
  CHECK(brauer_equal(e2(n), qsym("2", "5")));
  CHECK_THROWS_WITH_AS(e2(parse_form(Q, {"1", "2", "3"})),
                       doctest::Contains("NotInFundamentalIdealPower"), Error);
  QuadraticForm p = pfister({qe("-1"), qe("-1"), qe("-1")}).expansion;
  CHECK(h3_equal(e3(p), h3_symbol(qe("-1"), qe("-1"), qe("-1"))));
  CHECK_THROWS_WITH_AS(e3(n), doctest::Contains("NotInFundamentalIdealPower"), Error);
}

TEST_CASE("cup products") {
  // (lambda).(a,b) = (lambda,a,b)
  H3Class c = h3_cup(qe("-1"), qsym("-1", "-1"));
  CHECK(h3_equal(c, h3_symbol(qe("-1"), qe("-1"), qe("-1"))));
  // square multiplier kills the class
  CHECK(h3_zero(h3_cup(qe("4"), qsym("-1", "-1"))));
  // bilinearity in the Brauer slot
  BrauerClass2 u = qsym("2", "5"), v = qsym("-1", "-1");
  CHECK(h3_equal(h3_cup(qe("3"), brauer_add(u, v)),
                 h3_add(h3_cup(qe("3"), u), h3_cup(qe("3"), v))));
}

TEST_CASE("corestriction") {
  QuadExtension K = QuadExtension::over_q(2);
  FieldDescriptor KF = K.ext_field();
  auto ksym = [&](const std::string& a, const std::string& b) {
    return brauer_symbol(parse_element(KF, a), parse_element(KF, b));
  };
  // cores((1+sqrt2).(3,5)_K) = (N(1+sqrt2)).(3,5) = (-1,3,5)
  H3Class c = corestriction(K, parse_element(KF, "1+s"), ksym("3", "5"));
  CHECK(h3_equal(c, h3_symbol(qe("-1"), qe("3"), qe("5"))));
  REQUIRE(c.symbols.size() == 1);
  CHECK(same_square_class(c.symbols[0].a, qe("-1")));

  // trivial multiplier kills extended classes
  CHECK(h3_zero(corestriction(K, parse_element(KF, "1"), ksym("3", "5"))));

  // projection formula with another multiplier: N(2-s) = 2
  H3Class c2 = corestriction(K, parse_element(KF, "2-s"), ksym("3", "5"));
  CHECK(h3_equal(c2, h3_symbol(qe("2"), qe("3"), qe("5"))));

  // group homomorphism in the class argument
  H3Class lhs = corestriction(K, parse_element(KF, "1+s"),
                              brauer_add(ksym("3", "5"), ksym("-1", "7")));
  H3Class rhs = h3_add(corestriction(K, parse_element(KF, "1+s"), ksym("3", "5")),
                       corestriction(K, parse_element(KF, "1+s"), ksym("-1", "7")));
  CHECK(h3_equal(lhs, rhs));

  // cores(res(beta) . 1) = 0
  BrauerClass2 resb = brauer_restrict(K, qsym("2", "5"));
  CHECK(h3_zero(corestriction(K, parse_element(KF, "1"), resb)));

  CHECK_THROWS_WITH_AS(corestriction(K, qe("2"), qsym("3", "5")),
                       doctest::Contains("NotCorestrictible"), Error);
}

TEST_CASE("h3 normalization soundness on random symbol sums") {
  std::mt19937 rng(41);
  std::uniform_int_distribution<int> coef(-9, 9);
  Place inf = real_places(Q)[0];
  for (int it = 0; it < 60; ++it) {
    auto pick = [&]() {
      int c = coef(rng);
      if (c == 0) c = 1;
      return make_elem(Q, c);
    };
    H3Class x = h3_add(h3_symbol(pick(), pick(), pick()), h3_symbol(pick(), pick(), pick()));
    // over Q the class is detected at the real place
    CHECK(h3_zero(x) == (signature(x.rep, inf) % 16 == 0));
  }
}

TEST_CASE("mod_equal over Q") {
  H3Class x = h3_symbol(qe("-1"), qe("-1"), qe("-1"));
  // U = {0, (2,3)}: NotEqual to zero, since (lambda,2,3) has real signature 0
  Modulus u1{{qsym("2", "3")}};
  ModResult r = mod_equal(ModClass{x, u1}, ModClass{h3_zero_class(Q), u1});
  CHECK(r.status == ModResult::Status::NotEqual);

  // U containing (-1,-1): Equal via lambda = -1
  Modulus u2{{qsym("-1", "-1")}};
  r = mod_equal(ModClass{x, u2}, ModClass{h3_zero_class(Q), u2});
  REQUIRE(r.status == ModResult::Status::Equal);
  REQUIRE(r.lambda.has_value());
  CHECK(h3_zero(h3_add(x, h3_cup(*r.lambda, *r.witness))));

  // x = y: Equal with lambda = 1 against the zero witness
  r = mod_equal(ModClass{x, u1}, ModClass{x, u1});
  REQUIRE(r.status == ModResult::Status::Equal);
  CHECK(is_square(*r.lambda));

  CHECK_THROWS_WITH_AS(mod_equal(ModClass{x, u1}, ModClass{x, u2}),
                       doctest::Contains("ModulusMismatch"), Error);
}

TEST_CASE("mod_equal over Q(t)") {
  // (t,2,3) = t.(2,3): Equal with lambda = t
  H3Class x = h3_symbol(te("t"), te("2"), te("3"));
  Modulus u{{tsym("2", "3")}};
  ModResult r = mod_equal(ModClass{x, u}, ModClass{h3_zero_class(Qt), u});
  REQUIRE(r.status == ModResult::Status::Equal);
  CHECK(h3_zero(h3_add(x, h3_cup(*r.lambda, *r.witness))));

  // (t,2,5) against U = {(2,3)}: the residue at t is (2,5), never matched by
  // 0 or by the specialization (2,3); NotEqual
  H3Class y = h3_symbol(te("t"), te("2"), te("5"));
  Modulus u2{{tsym("2", "3")}};
  r = mod_equal(ModClass{y, u2}, ModClass{h3_zero_class(Qt), u2});
  CHECK(r.status == ModResult::Status::NotEqual);

  // constant nonzero class vs a constant witness with no usable residue
  // obstruction: honest Unknown
  H3Class z = h3_symbol(te("-1"), te("-1"), te("-1"));
  Modulus u3{{tsym("2", "3")}};
  r = mod_equal(ModClass{z, u3}, ModClass{h3_zero_class(Qt), u3});
  CHECK(r.status == ModResult::Status::Unknown);
  CHECK(r.bound > 0);
}
