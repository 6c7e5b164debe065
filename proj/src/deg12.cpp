#include "wittlab/deg12.hpp"

#include <algorithm>
#include <cstdlib>

namespace wittlab {

// a square class b with Q = (q^2, b): the square of any invertible pure
// anticommuting with q, found among cross-combinations orthogonal to q for
// the pure-square form  a x^2 + b y^2 - ab z^2
Element anticommuting_square(const QuaternionAlgebra& Q, const PureQuaternion& q) {
  Element n1 = mul(Q.a, q.xi);
  Element n2 = mul(Q.b, q.xj);
  Element n3 = neg(mul(mul(Q.a, Q.b), q.xk));
  Element z = make_elem(Q.field, 0);
  std::vector<std::array<Element, 3>> cands = {
      {n2, neg(n1), z},          {n3, z, neg(n1)},
      {z, n3, neg(n2)},          {add(n2, n3), neg(n1), neg(n1)},
      {n2, sub(n3, n1), neg(n2)}, {n3, n3, neg(add(n1, n2))}};
  for (const auto& c : cands) {
    if (c[0].is_zero() && c[1].is_zero() && c[2].is_zero()) continue;
    PureQuaternion p{c[0], c[1], c[2]};
    Element val = pure_square(Q, p);
    if (!val.is_zero()) return square_class(val);
  }
  fail("Internal", "no anticommuting complement found");
}

// the rank-2 form <q><1,-lambda> = <q, -lambda q>
SkewHermitianForm block_carrier(const QuaternionAlgebra& Q, const HermBlock& bl) {
  return make_herm(Q, {bl.q, pure_scale(neg(bl.lambda), bl.q)});
}

namespace {

BrauerClass2 blocks_h_sum(const FieldDescriptor& F, const std::vector<HermBlock>& blocks) {
  BrauerClass2 acc = brauer_zero(F);
  for (const HermBlock& bl : blocks) acc = brauer_add(acc, brauer_symbol(bl.a, bl.lambda));
  return acc;
}

// turns three rank-2 blocks into degree-4 factors: normalizes the lambdas so
// that [H_1]+[H_2]+[H_3] = 0, then reads off [H_i] = (a_i, lambda_i) and
// [Q_i] = (a_i, lambda_i b_i) with b_i the anticommuting complement square
std::vector<Block12> factor_blocks(const QuaternionAlgebra& alg,
                                   std::vector<HermBlock> blocks) {
  const FieldDescriptor& F = alg.field;
  BrauerClass2 A = algebra_class(alg);
  BrauerClass2 total = blocks_h_sum(F, blocks);
  if (!brauer_is_zero(total)) {
    if (!brauer_equal(total, A))
      fail("Internal", "block Clifford classes do not sum to 0 or [Q]");
    Element b0 = anticommuting_square(alg, blocks[0].q);
    blocks[0].lambda = square_class(mul(blocks[0].lambda, b0));
    if (!brauer_is_zero(blocks_h_sum(F, blocks)))
      fail("Internal", "block normalization did not trivialize the sum");
  }
  std::vector<Block12> out;
  for (const HermBlock& bl : blocks) {
    Element b = anticommuting_square(alg, bl.q);
    if (!brauer_equal(brauer_symbol(bl.a, b), A))
      fail("Internal", "anticommuting complement does not recover the algebra");
    BrauerClass2 hcl = brauer_symbol(bl.a, bl.lambda);
    BrauerClass2 qcl = brauer_symbol(bl.a, square_class(mul(bl.lambda, b)));
    out.push_back(Block12{qcl, hcl, {}, bl});
  }
  return out;
}

H3Class f3_of_decomposition(const Involution12& inv) {
  if (inv.kind == Involution12::Kind::Split) return h3_zero_class(inv.field());
  return *inv.report->f3;
}

// e3 of an index-2 involution over Q, through the real place: when the
// algebra splits at infinity the value is read off the signature of a Morita
// transfer adapted to the real place (0 or (-1,-1,-1)); when the algebra
// ramifies at infinity the quotient modulo F^x . [Q] is trivial.  Both
// branches are cross-checked against the hyperbolicity decision.
H3Class e3_index2_over_q(const SkewHermitianForm& h) {
  const FieldDescriptor& F = h.alg.field;
  bool real_ram = false;
  for (const Place& v : brauer_ramification(algebra_class(h.alg)))
    if (v.type == Place::Type::Real) real_ram = true;
  bool hyp = hyperbolic_h(h);
  if (real_ram) {
    if (!hyp) fail("Internal", "definite algebra: the involution must be hyperbolic");
    return h3_zero_class(F);
  }
  PureQuaternion q = splitting_pure_at(h.alg, real_places(F)[0]);
  auto [K, phiK] = morita_transfer(h, q);
  int s = signature(phiK, real_places(K.ext_field())[0]);
  if (s % 8 != 0 || std::abs(s) > 8) fail("Internal", "unexpected signature of a form in I^3");
  bool bit = std::abs(s) == 8;
  if (bit == hyp) fail("Internal", "e3 signature bit disagrees with hyperbolicity");
  Element m1 = make_elem(F, -1);
  return bit ? h3_symbol(m1, m1, m1) : h3_zero_class(F);
}

// a symbol (w,-1,-1) with the same real bits as the given class, certified by
// an exact equality check
std::optional<Symbol3> symbol_from_real_bits(const H3Class& val) {
  const FieldDescriptor& F = val.field;
  std::vector<Place> reals = real_places(F);
  std::vector<int> want;
  for (const Place& v : reals)
    want.push_back((signature(val.rep, v) / 8) % 2 != 0 ? -1 : 1);
  Element m1 = make_elem(F, -1);
  for (const Element& w : scalar_pool(F, {m1}, 32)) {
    if (w.is_zero() || is_square(w)) continue;
    bool ok = true;
    for (std::size_t i = 0; ok && i < reals.size(); ++i)
      if (real_sign(w, reals[i]) != want[i]) ok = false;
    if (!ok) continue;
    if (h3_equal(val, h3_symbol(w, m1, m1))) return Symbol3{w, m1, m1};
  }
  return std::nullopt;
}

// candidate pures for alternative first peels: the diagonal entries, their
// pairwise sums, and small coordinate combinations
std::vector<PureQuaternion> candidate_pures(const SkewHermitianForm& h) {
  std::vector<PureQuaternion> out;
  auto push = [&](const PureQuaternion& p) {
    if (!pure_square(h.alg, p).is_zero() && out.size() < 32) out.push_back(p);
  };
  for (const PureQuaternion& q : h.diag) push(q);
  for (std::size_t i = 0; i < h.diag.size(); ++i)
    for (std::size_t j = i + 1; j < h.diag.size(); ++j) {
      PureQuaternion s{add(h.diag[i].xi, h.diag[j].xi), add(h.diag[i].xj, h.diag[j].xj),
                       add(h.diag[i].xk, h.diag[j].xk)};
      if (!s.is_zero()) push(s);
    }
  const FieldDescriptor& F = h.alg.field;
  for (int x = -1; x <= 2; ++x)
    for (int y = -1; y <= 2; ++y)
      for (int z = -1; z <= 2; ++z) {
        if (x == 0 && y == 0 && z == 0) continue;
        push(PureQuaternion{make_elem(F, x), make_elem(F, y), make_elem(F, z)});
      }
  return out;
}

std::optional<std::array<Element, 3>> find_hyperbolic_twist(const Deg12Invariants& inv3) {
  const Involution12& input = inv3.decom.input;
  const FieldDescriptor& F = input.field();
  std::vector<Element> signs = {make_elem(F, 1), make_elem(F, -1)};
  if (F.kind == FieldDescriptor::Kind::QSqrt) {
    Element s = make_quad_elem(F.d, 0, 1);
    signs.push_back(s);
    signs.push_back(neg(s));
  }
  for (const Element& a1 : signs)
    for (const Element& a2 : signs)
      for (const Element& a3 : signs) {
        Involution12 tw = twist(inv3.decom, a1, a2, a3);
        bool hyp = tw.kind == Involution12::Kind::Split ? witt_is_zero(*tw.phi)
                                                        : hyperbolic_h(*tw.h);
        if (hyp) return std::array<Element, 3>{a1, a2, a3};
      }
  return std::nullopt;
}

}  // namespace

const FieldDescriptor& Involution12::field() const {
  return kind == Kind::Split ? phi->field : h->alg.field;
}

BrauerClass2 Involution12::algebra() const {
  return kind == Kind::Split ? brauer_zero(field()) : algebra_class(h->alg);
}

Involution12 involution_split(const QuadraticForm& phi) {
  if (phi.dim() != 12)
    fail("PreconditionFailed", "the split carrier must be a 12-dimensional form");
  if (!is_square(e1(phi)))
    fail("PreconditionFailed", "the involution must have trivial discriminant");
  if (!brauer_is_zero(e2(phi)))
    fail("PreconditionFailed", "the involution must have trivial Clifford invariant");
  Involution12 out;
  out.kind = Involution12::Kind::Split;
  out.phi = phi;
  return out;
}

Involution12 involution_index2(const SkewHermitianForm& h) {
  const FieldDescriptor& F = h.alg.field;
  if (F != FieldDescriptor::rationals() && F.kind != FieldDescriptor::Kind::Qt)
    fail("UnsupportedField", "index-2 involutions are supported over Q and Q(t)");
  if (h.rank() != 6)
    fail("PreconditionFailed", "the index-2 carrier must have relative rank 6");
  if (!is_division(h.alg))
    fail("PreconditionFailed",
         "the quaternion algebra is split: use the split constructor");
  HermInvariantReport rep = herm_invariants(h);
  if (!rep.e1_trivial)
    fail("PreconditionFailed", "the involution must have trivial discriminant");
  if (!rep.e2_trivial_mod_q)
    fail("PreconditionFailed", "the involution must have trivial Clifford invariant");
  if (rep.blocks.size() != 3 || !rep.f3)
    fail("DecompositionFailed", "no chain of rank-2 blocks was found");
  Involution12 out;
  out.kind = Involution12::Kind::Index2;
  out.h = h;
  out.report = std::move(rep);
  return out;
}

Decomposition12 decompose12(const Involution12& inv) {
  const FieldDescriptor& F = inv.field();
  Decomposition12 out{inv, {}, {}};
  std::vector<BrauerClass2> gens;
  if (inv.kind == Involution12::Kind::Split) {
    for (const PfisterBlock& b : pfister_decompose_12(*inv.phi)) {
      // split factors (Q_i,-) (x) (Q_i,-): both Clifford classes coincide
      BrauerClass2 c = brauer_symbol(b.n.slots[0], b.n.slots[1]);
      out.blocks.push_back(Block12{c, c, b, {}});
      gens.push_back(c);
    }
    // pfister_decompose_12 certified the reassembly isometry already
  } else {
    const QuaternionAlgebra& alg = inv.h->alg;
    out.blocks = factor_blocks(alg, inv.report->blocks);
    BrauerClass2 hsum = brauer_zero(F);
    for (const Block12& b : out.blocks) {
      hsum = brauer_add(hsum, b.h_class);
      gens.push_back(b.q_class);
    }
    if (!brauer_is_zero(hsum)) fail("Internal", "the [H_i] do not sum to zero");
    if (F == FieldDescriptor::rationals()) {
      SkewHermitianForm re{alg, {}};
      for (const Block12& b : out.blocks)
        re = herm_direct_sum(re, block_carrier(alg, *b.herm_block));
      if (!isometric_h(re, *inv.h))
        fail("Internal", "reassembled decomposition is not isometric to the input");
    }
  }
  out.group = subgroup(F, gens);
  // independent cross-check of the two f3 computations (skipped when the
  // group-side search runs out of certificates)
  try {
    if (!h3_equal(f3_of_group(out.group), f3_of_decomposition(inv)))
      fail("Internal", "f3 of the blocks disagrees with f3 of the group");
  } catch (const Error& e) {
    if (e.code() != "SearchExhausted") throw;
  }
  return out;
}

Deg12Invariants e3_f3_deg12(const Involution12& inv) {
  const FieldDescriptor& F = inv.field();
  Deg12Invariants out{decompose12(inv), f3_of_decomposition(inv),
                      Deg12Invariants::E3Status::Unknown, {}};
  Modulus mod{{inv.algebra()}};
  if (inv.kind == Involution12::Kind::Split) {
    out.e3 = ModClass{e3(*inv.phi), mod};
    out.e3_status = Deg12Invariants::E3Status::Exact;
    return out;
  }
  if (F == FieldDescriptor::rationals()) {
    out.e3 = ModClass{e3_index2_over_q(*inv.h), mod};
    out.e3_status = Deg12Invariants::E3Status::Exact;
    return out;
  }
  // Q(t): recognize h = <1,-lambda> (x) h0 with e1(h0) = 0 from the blocks
  const std::vector<HermBlock>& bls = inv.report->blocks;
  if (same_square_class(bls[0].lambda, bls[1].lambda) &&
      same_square_class(bls[0].lambda, bls[2].lambda) &&
      is_square(mul(mul(bls[0].a, bls[1].a), bls[2].a))) {
    SkewHermitianForm h0 = make_herm(inv.h->alg, {bls[0].q, bls[1].q, bls[2].q});
    try {
      HermE3 he = e3_rank2_factor(h0, bls[0].lambda);
      if (!h3_equal(he.f3, out.f3))
        fail("Internal", "rank-2-factor f3 disagrees with the block computation");
      out.e3 = he.e3;
      out.e3_status = Deg12Invariants::E3Status::Exact;
    } catch (const Error& e) {
      if (e.code() != "DecompositionFailed" && e.code() != "SearchExhausted") throw;
    }
  }
  return out;
}

IsotropyReport isotropy_by_e3(const Involution12& inv) {
  const FieldDescriptor& F = inv.field();
  Deg12Invariants inv3 = e3_f3_deg12(inv);
  IsotropyReport crit;
  if (!h3_zero(inv3.f3)) {
    crit.kind = IsotropyReport::Kind::Anisotropic;
  } else if (inv3.e3_status == Deg12Invariants::E3Status::Exact) {
    ModClass zero{h3_zero_class(F), inv3.e3->modulus};
    ModResult r = mod_equal(*inv3.e3, zero);
    if (r.status == ModResult::Status::Equal) {
      crit.kind = IsotropyReport::Kind::Hyperbolic;
    } else if (F.is_number_field()) {
      crit.symbol = symbol_from_real_bits(inv3.e3->value);
      if (!crit.symbol) fail("Internal", "no symbol matches the real bits of e3");
      crit.kind = IsotropyReport::Kind::IsotropicWithSymbol;
    } else {
      // bounded symbol-representability search over Q(t)
      for (const Symbol3& s : inv3.e3->value.symbols) {
        ModClass cand{h3_symbol(s.a, s.b, s.c), inv3.e3->modulus};
        if (mod_equal(*inv3.e3, cand).status == ModResult::Status::Equal) {
          crit.kind = IsotropyReport::Kind::IsotropicWithSymbol;
          crit.symbol = s;
          break;
        }
      }
    }
  }
  if (F.is_number_field()) {
    IsotropyReport::Kind direct;
    if (inv.kind == Involution12::Kind::Split) {
      WittClass w = witt_decompose(*inv.phi);
      direct = w.kernel.dim() == 0    ? IsotropyReport::Kind::Hyperbolic
               : w.kernel.dim() == 12 ? IsotropyReport::Kind::Anisotropic
                                      : IsotropyReport::Kind::IsotropicWithSymbol;
    } else {
      direct = hyperbolic_h(*inv.h)  ? IsotropyReport::Kind::Hyperbolic
               : isotropic_h(*inv.h) ? IsotropyReport::Kind::IsotropicWithSymbol
                                     : IsotropyReport::Kind::Anisotropic;
    }
    if (direct != crit.kind)
      fail("Internal", "direct isotropy decision disagrees with the e3 criterion");
  }
  return crit;
}

Involution12 twist(const Decomposition12& decom, const Element& alpha1,
                   const Element& alpha2, const Element& alpha3) {
  std::array<const Element*, 3> alphas = {&alpha1, &alpha2, &alpha3};
  for (const Element* a : alphas)
    if (a->is_zero()) fail("ZeroElement", "twist scalars must be nonzero");
  const Involution12& input = decom.input;
  if (input.kind == Involution12::Kind::Split) {
    QuadraticForm phi{input.field(), {}};
    for (int i = 0; i < 3; ++i) {
      const PfisterBlock& b = *decom.blocks[static_cast<std::size_t>(i)].split_block;
      phi = direct_sum(phi, scale_form(mul(*alphas[static_cast<std::size_t>(i)], b.alpha),
                                       b.n.expansion));
    }
    return involution_split(phi);
  }
  const QuaternionAlgebra& alg = input.h->alg;
  SkewHermitianForm h{alg, {}};
  for (int i = 0; i < 3; ++i) {
    const Block12& b = decom.blocks[static_cast<std::size_t>(i)];
    h = herm_direct_sum(
        h, herm_scale(*alphas[static_cast<std::size_t>(i)], block_carrier(alg, *b.herm_block)));
  }
  return involution_index2(h);
}

HomologyReport homology_generator(const Involution12& inv) {
  Deg12Invariants inv3 = e3_f3_deg12(inv);
  std::optional<ModClass> seed;
  if (inv3.e3_status == Deg12Invariants::E3Status::Exact) {
    Modulus mU;
    for (const BrauerClass2& u : inv3.decom.group.elements)
      if (!brauer_is_zero(u)) mU.classes.push_back(u);
    seed = ModClass{inv3.e3->value, mU};
  }
  HomologyReport out{peyre_verdict(inv3.decom.group, seed), {}};
  if (out.verdict.homology_order == PeyreVerdict::Order::One &&
      inv.field().is_number_field()) {
    out.hyperbolic_twist = find_hyperbolic_twist(inv3);
    if (!out.hyperbolic_twist)
      fail("Internal", "order-1 homology verdict without a hyperbolic twist");
  }
  return out;
}

QuadSplitReport quad_split_report(const Involution12& inv) {
  QuadSplitReport out;
  H3Class f3 = f3_of_decomposition(inv);
  if (!h3_zero(f3)) {
    out.kind = QuadSplitReport::Kind::Impossible;
    out.f3_cert = f3;
    return out;
  }
  auto try_group = [](const QuaternionicSubgroup& U) -> std::optional<Element> {
    SplitSearchResult r = quadratic_splitting(U);
    if (r.kind == SplitSearchResult::Kind::SplitBy) return r.d;
    return std::nullopt;
  };
  Decomposition12 dec = decompose12(inv);
  if (auto d = try_group(dec.group)) {
    out.kind = QuadSplitReport::Kind::SplitAndHyperbolicOver;
    out.d = d;
    return out;
  }
  if (inv.kind == Involution12::Kind::Index2) {
    const QuaternionAlgebra& alg = inv.h->alg;
    for (const PureQuaternion& p : candidate_pures(*inv.h)) {
      ++out.bound;
      try {
        auto res = represent_multiple(*inv.h, p);
        if (!res) continue;
        std::vector<HermBlock> blocks = {HermBlock{
            p, square_class(pure_square(alg, p)), square_class(neg(res->first))}};
        for (const HermBlock& bl : herm_decompose_blocks(res->second))
          blocks.push_back(bl);
        std::vector<BrauerClass2> gens;
        for (const Block12& b : factor_blocks(alg, std::move(blocks)))
          gens.push_back(b.q_class);
        if (auto d = try_group(subgroup(alg.field, gens))) {
          out.kind = QuadSplitReport::Kind::SplitAndHyperbolicOver;
          out.d = d;
          return out;
        }
      } catch (const Error& e) {
        if (e.code() != "SearchExhausted" && e.code() != "DecompositionFailed") throw;
      }
    }
  }
  out.kind = QuadSplitReport::Kind::NoneFound;
  return out;
}

}  // namespace wittlab
