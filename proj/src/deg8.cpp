#include "wittlab/deg8.hpp"

#include <algorithm>

namespace wittlab {

namespace {

// deterministic key for the +/- labeling of Clifford components
std::string class_key(const BrauerClass2& x) {
  std::vector<std::string> parts;
  for (const Symbol2& s : x.symbols)
    parts.push_back(square_class(s.a).str() + "|" + square_class(s.b).str());
  std::sort(parts.begin(), parts.end());
  std::string out;
  for (const std::string& p : parts) out += p + ";";
  return out;
}

// a pure quaternion with square in the square class of `a`, by bounded
// integer-coordinate search
std::optional<PureQuaternion> realize_pure(const QuaternionAlgebra& alg,
                                           const Element& a) {
  const FieldDescriptor& F = alg.field;
  for (int h = 1; h <= 6; ++h)
    for (int x = -h; x <= h; ++x)
      for (int y = -h; y <= h; ++y)
        for (int z = -h; z <= h; ++z) {
          if (std::max({std::abs(x), std::abs(y), std::abs(z)}) != h) continue;
          PureQuaternion p = make_pure(make_elem(F, x), make_elem(F, y), make_elem(F, z));
          Element sq = pure_square(alg, p);
          if (!sq.is_zero() && same_square_class(sq, a)) return p;
        }
  return std::nullopt;
}

// a rank-2 block <q><1,-lambda> over alg whose right factor class (q^2,
// lambda) equals `target`; the left factor is then automatically
// target + [alg]
std::optional<HermBlock> find_rank2_block(const QuaternionAlgebra& alg,
                                          const BrauerClass2& target,
                                          std::vector<Element> seeds) {
  const FieldDescriptor& F = alg.field;
  seeds.push_back(alg.a);
  seeds.push_back(alg.b);
  for (const Symbol2& s : target.symbols) {
    seeds.push_back(s.a);
    seeds.push_back(s.b);
  }
  std::vector<Element> pool = scalar_pool(F, seeds, 64);
  for (const Element& a : pool) {
    if (a.is_zero()) continue;
    std::optional<PureQuaternion> p = realize_pure(alg, a);
    if (!p) continue;
    Element sq = square_class(pure_square(alg, *p));
    for (const Element& lambda : pool) {
      if (lambda.is_zero()) continue;
      if (brauer_equal(brauer_symbol(sq, lambda), target))
        return HermBlock{*p, sq, square_class(lambda)};
    }
  }
  return std::nullopt;
}

// block data of a 4-dimensional trivial-discriminant form <a,b,c,d>:
// <a><<u,v>> with u = -ab, v = -ac, so the factor class is (u, v)
Block8 split_block_data(const QuadraticForm& psi) {
  const Element& a = psi.diag[0];
  Element u = square_class(neg(mul(a, psi.diag[1])));
  Element v = square_class(neg(mul(a, psi.diag[2])));
  BrauerClass2 c = brauer_symbol(u, v);
  return Block8{c, c, square_class(a), pfister({u, v}), {}};
}

Block8 herm_block_to8(const QuaternionAlgebra& alg, const HermBlock& bl) {
  Element b = anticommuting_square(alg, bl.q);
  BrauerClass2 right = brauer_symbol(bl.a, bl.lambda);
  BrauerClass2 left = brauer_symbol(bl.a, square_class(mul(bl.lambda, b)));
  if (!brauer_equal(brauer_add(left, right), algebra_class(alg)))
    fail("Internal", "block factor classes do not sum to [Q]");
  return Block8{left, right, {}, {}, bl};
}

// the two component classes of a decomposition, before labeling
std::pair<BrauerClass2, BrauerClass2> component_classes(const Decomposition8& dec) {
  return {brauer_add(dec.blocks[0].q_left, dec.blocks[1].q_left),
          brauer_add(dec.blocks[0].q_left, dec.blocks[1].q_right)};
}

// carrier of the component whose two degree-4 factors have the given right
// classes, over an algebra of class `c`
std::optional<Involution8> component_carrier(const FieldDescriptor& F,
                                             const BrauerClass2& c,
                                             const BrauerClass2& right1,
                                             const BrauerClass2& right2,
                                             const std::vector<Element>& seeds) {
  if (brauer_is_zero(c)) {
    // both factor pairs coincide: Ad of the sum of the two norm forms
    QuadraticForm phi = direct_sum(norm_form(F, brauer_add(right1, c)),
                                   norm_form(F, brauer_add(right2, c)));
    return involution8_split(phi);
  }
  std::optional<Symbol2> s;
  try {
    s = quaternion_presentation(c);
  } catch (const Error& e) {
    if (e.code() != "SearchExhausted") throw;
    return std::nullopt;
  }
  if (!s) return std::nullopt;
  QuaternionAlgebra D = make_quaternion_algebra(s->a, s->b);
  std::optional<HermBlock> b1 = find_rank2_block(D, right1, seeds);
  std::optional<HermBlock> b2 = find_rank2_block(D, right2, seeds);
  if (!b1 || !b2) return std::nullopt;
  SkewHermitianForm h = herm_direct_sum(block_carrier(D, *b1), block_carrier(D, *b2));
  return involution8_index2(h);
}

// 8-dimensional split carrier over K = Q(sqrt d), used for hyperbolicity
// certificates of rational forms
bool hyperbolic_over_quad(const QuadraticForm& phi, const Int& d) {
  FieldDescriptor K = FieldDescriptor::quad(d);
  QuadraticForm phiK{K, {}};
  for (const Element& x : phi.diag) phiK.diag.push_back(make_quad_elem(d, x.x0, 0));
  return witt_is_zero(phiK);
}

}  // namespace

const FieldDescriptor& Involution8::field() const {
  return kind == Kind::Split ? phi->field : h->alg.field;
}

BrauerClass2 Involution8::algebra() const {
  return kind == Kind::Split ? brauer_zero(field()) : algebra_class(h->alg);
}

Involution8 involution8_split(const QuadraticForm& phi) {
  if (phi.dim() != 8)
    fail("PreconditionFailed", "the split carrier must be an 8-dimensional form");
  if (!is_square(e1(phi)))
    fail("PreconditionFailed", "the involution must have trivial discriminant");
  Involution8 out;
  out.kind = Involution8::Kind::Split;
  out.phi = phi;
  return out;
}

Involution8 involution8_index2(const SkewHermitianForm& h) {
  const FieldDescriptor& F = h.alg.field;
  if (F != FieldDescriptor::rationals() && F.kind != FieldDescriptor::Kind::Qt)
    fail("UnsupportedField", "index-2 involutions are supported over Q and Q(t)");
  if (h.rank() != 4)
    fail("PreconditionFailed", "the index-2 carrier must have relative rank 4");
  if (!is_division(h.alg))
    fail("PreconditionFailed",
         "the quaternion algebra is split: use the split constructor");
  if (!is_square(herm_e1(h)))
    fail("PreconditionFailed", "the involution must have trivial discriminant");
  Involution8 out;
  out.kind = Involution8::Kind::Index2;
  out.h = h;
  return out;
}

Decomposition8 decompose8(const Involution8& inv) {
  const FieldDescriptor& F = inv.field();
  Decomposition8 out{inv, {}, {}};
  if (inv.kind == Involution8::Kind::Split) {
    const QuadraticForm& phi = *inv.phi;
    // a 4-element diagonal subset of square product gives the two blocks
    std::optional<std::pair<QuadraticForm, QuadraticForm>> parts;
    for (int mask = 0; mask < 256 && !parts; ++mask) {
      if (__builtin_popcount(static_cast<unsigned>(mask)) != 4 || !(mask & 1)) continue;
      QuadraticForm s1{F, {}}, s2{F, {}};
      for (int i = 0; i < 8; ++i)
        (mask >> i & 1 ? s1 : s2).diag.push_back(phi.diag[static_cast<std::size_t>(i)]);
      if (is_square(e1(s1))) parts = {s1, s2};
    }
    if (!parts && F.is_number_field()) {
      // bounded search for a similar-Pfister direct summand
      std::vector<Element> pool = scalar_pool(F, phi.diag, 24);
      pool.insert(pool.begin(), make_elem(F, 1));
      for (std::size_t ia = 0; ia < pool.size() && !parts; ++ia)
        for (std::size_t iu = 1; iu < pool.size() && !parts; ++iu)
          for (std::size_t iv = iu; iv < pool.size() && !parts; ++iv) {
            QuadraticForm cand =
                scale_form(pool[ia], pfister({pool[iu], pool[iv]}).expansion);
            QuadraticForm diff = direct_sum(phi, scale_form(make_elem(F, -1), cand));
            if (aniso_dim(diff) > 4) continue;
            QuadraticForm rest = witt_decompose(diff).kernel;
            while (rest.dim() < 4) {
              rest.diag.push_back(make_elem(F, 1));
              rest.diag.push_back(make_elem(F, -1));
            }
            parts = {cand, rest};
          }
    }
    if (!parts) fail("SearchExhausted", "no additive decomposition found");
    out.blocks.push_back(split_block_data(parts->first));
    out.blocks.push_back(split_block_data(parts->second));
    // the Clifford class now carries a two-symbol presentation, which makes
    // the index-4 certificate available over Q(t)
    try {
      if (brauer_index(brauer_add(out.blocks[0].q_left, out.blocks[1].q_left)) > 2)
        fail("ObstructedInput",
             "the Clifford invariant has index 4: fewer than two of the three "
             "algebras have index at most 2");
    } catch (const Error& e) {
      if (e.code() != "SearchExhausted") throw;  // inconclusive index: proceed
    }
    if (F.is_number_field()) {
      QuadraticForm re = direct_sum(
          scale_form(*out.blocks[0].alpha, out.blocks[0].n->expansion),
          scale_form(*out.blocks[1].alpha, out.blocks[1].n->expansion));
      if (!isometric(re, phi))
        fail("Internal", "reassembled decomposition is not isometric to the input");
    }
    out.group = subgroup(F, {out.blocks[0].q_left, out.blocks[1].q_left}, false);
  } else {
    const QuaternionAlgebra& alg = inv.h->alg;
    std::vector<HermBlock> blocks = herm_decompose_blocks(*inv.h);
    for (const HermBlock& bl : blocks) out.blocks.push_back(herm_block_to8(alg, bl));
    if (F == FieldDescriptor::rationals()) {
      SkewHermitianForm re = herm_direct_sum(block_carrier(alg, blocks[0]),
                                             block_carrier(alg, blocks[1]));
      if (!isometric_h(re, *inv.h))
        fail("Internal", "reassembled decomposition is not isometric to the input");
    }
    out.group = subgroup(
        F, {out.blocks[0].q_left, out.blocks[0].q_right, out.blocks[1].q_left}, false);
  }
  return out;
}

TrialityTriple triality_components(const Decomposition8& dec) {
  const FieldDescriptor& F = dec.input.field();
  auto [cp, cm] = component_classes(dec);
  TrialityTriple out{dec, dec.input.algebra(), cp, cm, false, {}, {}};
  if (class_key(cm) < class_key(cp)) {
    std::swap(out.c_plus, out.c_minus);
    out.swapped = true;
  }
  std::vector<Element> seeds;
  if (dec.input.kind == Involution8::Kind::Index2)
    for (const PureQuaternion& q : dec.input.h->diag)
      seeds.push_back(pure_square(dec.input.h->alg, q));
  // the component of class [Q1]+[Q3] pairs (Q1, Q3) with (Q2, Q4); the other
  // pairs (Q1, Q4) with (Q2, Q3)
  auto carrier = [&](const BrauerClass2& c) {
    const BrauerClass2& r1 = brauer_equal(c, cp) ? dec.blocks[1].q_left
                                                 : dec.blocks[1].q_right;
    const BrauerClass2& r2 = brauer_equal(c, cp) ? dec.blocks[1].q_right
                                                 : dec.blocks[1].q_left;
    return component_carrier(F, c, r1, r2, seeds);
  };
  out.sigma_plus = carrier(out.c_plus);
  out.sigma_minus = carrier(out.c_minus);
  return out;
}

Deg8Invariants e3_f3_deg8(const Involution8& inv) {
  if (inv.kind != Involution8::Kind::Index2)
    fail("ConditionEqCViolated", "the index condition requires ind A = 2");
  const QuaternionAlgebra& alg = inv.h->alg;
  Decomposition8 dec = decompose8(inv);
  auto [cp, cm] = component_classes(dec);
  if (class_key(cm) < class_key(cp)) std::swap(cp, cm);  // match the triality labels
  if (brauer_is_zero(cp) || brauer_is_zero(cm))
    fail("ConditionEqCViolated", "a Clifford component is split");
  if (brauer_index(cp) > 2 || brauer_index(cm) > 2)
    fail("ConditionEqCViolated", "a Clifford component has index 4");
  std::vector<Element> seeds;
  for (const PureQuaternion& q : inv.h->diag) seeds.push_back(pure_square(alg, q));
  std::optional<HermBlock> b = find_rank2_block(alg, cm, seeds);
  if (!b)
    fail("SearchExhausted",
         "no rank-2 carrier realizing the product of the Clifford components");
  SkewHermitianForm rho = herm_direct_sum(*inv.h, block_carrier(alg, *b));
  Deg12Invariants i12 = e3_f3_deg12(involution_index2(rho));
  Deg8Invariants out{std::move(dec), cp,      cm, i12.f3,
                     Deg8Invariants::E3Status::Unknown, {}, rho};
  if (i12.e3_status == Deg12Invariants::E3Status::Exact) {
    Modulus V{{inv.algebra(), cp, cm}};
    out.e3 = ModClass{i12.e3->value, V};
    out.e3_status = Deg8Invariants::E3Status::Exact;
  }
  return out;
}

TrialityReport triality_e3_equality(const Involution8& inv) {
  const FieldDescriptor& F = inv.field();
  Deg8Invariants base = e3_f3_deg8(inv);
  TrialityTriple tri = triality_components(base.dec);
  if (!tri.sigma_plus || !tri.sigma_minus)
    fail("SearchExhausted", "no carrier found for a Clifford component");
  Deg8Invariants plus = e3_f3_deg8(*tri.sigma_plus);
  Deg8Invariants minus = e3_f3_deg8(*tri.sigma_minus);
  TrialityReport rep{base,
                     plus,
                     minus,
                     false,
                     ModResult::Status::Unknown,
                     ModResult::Status::Unknown,
                     ModResult::Status::Unknown,
                     ModResult::Status::Unknown,
                     std::nullopt,
                     std::nullopt};
  rep.f3_equal = h3_equal(base.f3, plus.f3) && h3_equal(base.f3, minus.f3);

  Modulus W;
  for (const BrauerClass2& u : base.dec.group.elements)
    if (!brauer_is_zero(u)) W.classes.push_back(u);
  auto mod_w = [&](const Deg8Invariants& comp) {
    if (base.e3_status != Deg8Invariants::E3Status::Exact ||
        comp.e3_status != Deg8Invariants::E3Status::Exact)
      return ModResult::Status::Unknown;
    return mod_equal(ModClass{base.e3->value, W}, ModClass{comp.e3->value, W}).status;
  };
  rep.plus_mod_w = mod_w(plus);
  rep.minus_mod_w = mod_w(minus);

  // block-scale search realizing the true component: scaling the second
  // block moves e3 by a class outside F^x . V, so the quotient comparison
  // needs the right gluing
  auto mod_v = [&](const Involution8& car, const Deg8Invariants& first,
                   std::optional<Element>& scale_out) {
    if (base.e3_status != Deg8Invariants::E3Status::Exact)
      return ModResult::Status::Unknown;
    auto check = [&](const Deg8Invariants& comp) {
      if (comp.e3_status != Deg8Invariants::E3Status::Exact) return false;
      return mod_equal(ModClass{base.e3->value, comp.e3->modulus}, *comp.e3).status ==
             ModResult::Status::Equal;
    };
    if (check(first)) {
      scale_out = make_elem(F, 1);
      return ModResult::Status::Equal;
    }
    if (car.kind != Involution8::Kind::Index2) return ModResult::Status::Unknown;
    for (const Element& mu : scalar_pool(F, {make_elem(F, -1)}, 12)) {
      if (mu.is_zero()) continue;
      SkewHermitianForm h2{car.h->alg,
                           {car.h->diag[0], car.h->diag[1],
                            pure_scale(mu, car.h->diag[2]), pure_scale(mu, car.h->diag[3])}};
      Deg8Invariants scaled = e3_f3_deg8(involution8_index2(h2));
      if (check(scaled)) {
        scale_out = mu;
        return ModResult::Status::Equal;
      }
    }
    return ModResult::Status::Unknown;
  };
  rep.plus_mod_v = mod_v(*tri.sigma_plus, plus, rep.plus_scale);
  rep.minus_mod_v = mod_v(*tri.sigma_minus, minus, rep.minus_scale);
  return rep;
}

QuadSplit8Report quadsplit8(const Decomposition8& dec) {
  QuadSplit8Report out;
  SplitSearchResult r = quadratic_splitting(dec.group);
  if (r.kind == SplitSearchResult::Kind::Impossible) {
    out.kind = QuadSplit8Report::Kind::Impossible;
    return out;
  }
  if (r.kind == SplitSearchResult::Kind::NoneWithinBound) {
    out.bound = r.bound;
    return out;
  }
  out.kind = QuadSplit8Report::Kind::SplitAndHyperbolicOver;
  out.d = r.d;
  // split rational carriers admit a direct hyperbolicity certificate over K
  if (dec.input.kind == Involution8::Kind::Split &&
      dec.input.field() == FieldDescriptor::rationals()) {
    Int d = squarefree_part(Rat(num(out.d->x0) * den(out.d->x0)));
    if (!hyperbolic_over_quad(*dec.input.phi, d))
      fail("Internal", "group splitting field does not hyperbolize the form");
  }
  return out;
}

Decomposition8 quadsplit8_converse(const Involution8& inv, const Element& delta) {
  const FieldDescriptor& F = inv.field();
  if (F != FieldDescriptor::rationals())
    fail("UnsupportedField", "the converse construction is supported over Q");
  if (delta.is_zero() || is_square(delta))
    fail("PreconditionFailed", "delta must define a quadratic extension");
  Int d = squarefree_part(Rat(num(delta.x0) * den(delta.x0)));
  QuadExtension K = QuadExtension::over_q(d);

  Decomposition8 out{inv, {}, {}};
  if (inv.kind == Involution8::Kind::Split) {
    const QuadraticForm& phi = *inv.phi;
    if (!hyperbolic_over_quad(phi, d))
      fail("PreconditionFailed", "the form stays anisotropic over K");
    std::vector<Element> pool = scalar_pool(F, phi.diag, 32);
    pool.insert(pool.begin(), make_elem(F, 1));
    Element dd = make_elem(F, Rat(d));
    for (const Element& alpha : pool)
      for (const Element& u : pool) {
        if (alpha.is_zero() || u.is_zero()) continue;
        QuadraticForm cand = scale_form(alpha, pfister({dd, u}).expansion);
        QuadraticForm diff = direct_sum(phi, scale_form(make_elem(F, -1), cand));
        if (aniso_dim(diff) > 4) continue;
        QuadraticForm rest = witt_decompose(diff).kernel;
        while (rest.dim() < 4) {
          rest.diag.push_back(make_elem(F, 1));
          rest.diag.push_back(make_elem(F, -1));
        }
        Block8 b2 = split_block_data(rest);
        if (!brauer_is_zero(brauer_restrict(K, b2.q_left))) continue;
        out.blocks.push_back(split_block_data(cand));
        out.blocks.push_back(b2);
        out.group = subgroup(F, {out.blocks[0].q_left, out.blocks[1].q_left}, false);
        return out;
      }
    fail("SearchExhausted", "no K-split decomposition found");
  }

  const QuaternionAlgebra& alg = inv.h->alg;
  if (!brauer_is_zero(brauer_restrict(K, algebra_class(alg))))
    fail("PreconditionFailed", "K does not split the algebra");
  std::optional<PureQuaternion> p = realize_pure(alg, delta);
  if (!p) fail("SearchExhausted", "no pure quaternion with square delta found");
  // h = <mu_0 d, mu_1 d, mu_2 d, mu_3 d>: repeated representation peels
  std::vector<Element> mus;
  SkewHermitianForm rest = *inv.h;
  for (int i = 0; i < 4; ++i) {
    auto res = represent_multiple(rest, *p);
    if (!res) fail("SearchExhausted", "the form is not a <d>-multiple within bounds");
    mus.push_back(res->first);
    rest = res->second;
  }
  Element a = square_class(pure_square(alg, *p));
  std::vector<HermBlock> blocks = {
      HermBlock{pure_scale(mus[0], *p), a, square_class(neg(mul(mus[0], mus[1])))},
      HermBlock{pure_scale(mus[2], *p), a, square_class(neg(mul(mus[2], mus[3])))}};
  SkewHermitianForm re =
      herm_direct_sum(block_carrier(alg, blocks[0]), block_carrier(alg, blocks[1]));
  if (!isometric_h(re, *inv.h))
    fail("Internal", "reassembled <d>-decomposition is not isometric to the input");
  for (const HermBlock& bl : blocks) out.blocks.push_back(herm_block_to8(alg, bl));
  for (const Block8& b : out.blocks)
    if (!brauer_is_zero(brauer_restrict(K, b.q_left)) ||
        !brauer_is_zero(brauer_restrict(K, b.q_right)))
      fail("Internal", "a block factor class is not split by K");
  out.group = subgroup(
      F, {out.blocks[0].q_left, out.blocks[0].q_right, out.blocks[1].q_left}, false);
  return out;
}

}  // namespace wittlab
