#include "wittlab/hermitian.hpp"

#include <algorithm>
#include <array>
#include <cstdlib>
#include <set>

namespace wittlab {

namespace {

std::optional<Rat> rat_sqrt(const Rat& r) {
  if (r < 0) return std::nullopt;
  Int n = num(r), d = den(r);
  Int sn = boost::multiprecision::sqrt(n);
  Int sd = boost::multiprecision::sqrt(d);
  if (sn * sn != n || sd * sd != d) return std::nullopt;
  return Rat(sn, sd);
}

// square root of an element known (or required) to be a square
Element elem_sqrt(const Element& x) {
  switch (x.field.kind) {
    case FieldDescriptor::Kind::Q: {
      if (auto s = rat_sqrt(x.x0)) return make_elem(x.field, *s);
      break;
    }
    case FieldDescriptor::Kind::QSqrt: {
      Rat d(x.field.d);
      if (x.x1 == 0) {
        if (auto s = rat_sqrt(x.x0)) return make_quad_elem(x.field.d, *s, 0);
        if (auto s = rat_sqrt(x.x0 / d)) return make_quad_elem(x.field.d, 0, *s);
        break;
      }
      Rat nrm = x.x0 * x.x0 - d * x.x1 * x.x1;
      if (auto n = rat_sqrt(nrm)) {
        for (int sgn : {1, -1}) {
          Rat y0sq = (x.x0 + (sgn > 0 ? *n : -*n)) / 2;
          if (auto y0 = rat_sqrt(y0sq)) {
            if (*y0 != 0) return make_quad_elem(x.field.d, *y0, x.x1 / (2 * *y0));
          }
        }
      }
      break;
    }
    case FieldDescriptor::Kind::Qt: {
      auto s = rat_sqrt(x.x0);
      if (s) {
        Element out = make_elem(x.field, *s);
        bool ok = true;
        for (const auto& [p, e] : x.polys) {
          if (e % 2 != 0) {
            ok = false;
            break;
          }
          out = mul(out, elem_pow(elem_poly(p), e / 2));
        }
        if (ok) return out;
      }
      break;
    }
  }
  fail("Internal", "elem_sqrt called on a nonsquare: " + x.str());
}

Quat quat_zero(const FieldDescriptor& F) {
  Element z = make_elem(F, 0);
  return Quat{z, z, z, z};
}

Quat q_scale(const Quat& u, const Element& c) {
  return Quat{mul(u.x0, c), mul(u.xi, c), mul(u.xj, c), mul(u.xk, c)};
}

PureQuaternion pure_add(const PureQuaternion& p, const PureQuaternion& q) {
  return PureQuaternion{add(p.xi, q.xi), add(p.xj, q.xj), add(p.xk, q.xk)};
}

// h(u, v) = sum conj(u_m) q_m v_m
Quat herm_pair(const SkewHermitianForm& h, const std::vector<Quat>& u,
               const std::vector<Quat>& v) {
  Quat acc = quat_zero(h.alg.field);
  for (int m = 0; m < h.rank(); ++m) {
    if (u[m].is_zero() || v[m].is_zero()) continue;
    Quat t = q_mul(h.alg, q_mul(h.alg, q_conj(u[m]), pure_to_quat(h.diag[m])), v[m]);
    acc = q_add(acc, t);
  }
  return acc;
}

SkewHermitianForm remove_entry(const SkewHermitianForm& h, int index) {
  SkewHermitianForm out{h.alg, {}};
  for (int m = 0; m < h.rank(); ++m)
    if (m != index) out.diag.push_back(h.diag[m]);
  return out;
}

std::vector<Quat> vec_sub_scaled(const std::vector<Quat>& u, const std::vector<Quat>& v,
                                 const QuaternionAlgebra& Q, const Quat& c) {
  std::vector<Quat> out(u.size(), quat_zero(Q.field));
  for (std::size_t m = 0; m < u.size(); ++m)
    out[m] = q_add(u[m], q_neg(q_mul(Q, v[m], c)));
  return out;
}

// Gram-Schmidt over the (division) quaternion algebra: diagonalize the
// restriction of h to the span of the given vectors.
std::vector<PureQuaternion> diagonalize_span(const SkewHermitianForm& h,
                                             std::vector<std::vector<Quat>> work) {
  const QuaternionAlgebra& Q = h.alg;
  std::vector<PureQuaternion> out;
  std::vector<Quat> units = {quat_of(Q.field, 1, 0, 0, 0), quat_of(Q.field, 0, 1, 0, 0),
                             quat_of(Q.field, 0, 0, 1, 0), quat_of(Q.field, 0, 0, 0, 1)};
  while (!work.empty()) {
    int pivot = -1;
    for (std::size_t i = 0; i < work.size() && pivot < 0; ++i) {
      Quat p = herm_pair(h, work[i], work[i]);
      if (!p.is_zero() && !pure_square(Q, pure_of_quat(p)).is_zero())
        pivot = static_cast<int>(i);
    }
    if (pivot < 0) {
      // every diagonal value vanishes: mix two vectors with a nonzero pairing
      for (std::size_t i = 0; i < work.size() && pivot < 0; ++i) {
        for (std::size_t j = i + 1; j < work.size() && pivot < 0; ++j) {
          Quat c = herm_pair(h, work[i], work[j]);
          if (c.is_zero()) continue;
          for (const Quat& dq : units) {
            std::vector<Quat> cand(work[i].size(), quat_zero(Q.field));
            for (std::size_t m = 0; m < cand.size(); ++m)
              cand[m] = q_add(work[i][m], q_mul(Q, work[j][m], dq));
            Quat p = herm_pair(h, cand, cand);
            if (!p.is_zero() && !pure_square(Q, pure_of_quat(p)).is_zero()) {
              work[i] = cand;
              pivot = static_cast<int>(i);
              break;
            }
          }
        }
      }
    }
    if (pivot < 0) fail("Internal", "degenerate gram matrix in hermitian diagonalization");
    std::swap(work[static_cast<std::size_t>(pivot)], work[0]);
    Quat p = herm_pair(h, work[0], work[0]);
    out.push_back(pure_of_quat(p));
    Quat pinv = q_inv(Q, p);
    for (std::size_t t = 1; t < work.size(); ++t) {
      Quat c = herm_pair(h, work[0], work[t]);
      if (!c.is_zero()) work[t] = vec_sub_scaled(work[t], work[0], Q, q_mul(Q, pinv, c));
    }
    work.erase(work.begin());
  }
  return out;
}

// deterministic small quaternion coordinate pool
std::vector<Quat> component_quats(const FieldDescriptor& F, const std::vector<Rat>& comps) {
  std::vector<Quat> out;
  for (const Rat& c0 : comps)
    for (const Rat& c1 : comps)
      for (const Rat& c2 : comps)
        for (const Rat& c3 : comps) {
          Quat q = quat_of(F, c0, c1, c2, c3);
          if (!q.is_zero()) out.push_back(q);
        }
  return out;
}

std::vector<Place> algebra_ramification(const QuaternionAlgebra& Q) {
  return brauer_ramification(algebra_class(Q));
}

bool has_real_ram(const std::vector<Place>& ram) {
  for (const Place& v : ram)
    if (v.type == Place::Type::Real) return true;
  return false;
}

// finite places (outside the ramification of the algebra) where the local
// isometry class of h can be nontrivial: 2, the primes of a, b, of the entry
// squares and of every entry coordinate
std::vector<Place> finite_split_candidates(const SkewHermitianForm& h,
                                           const std::vector<Place>& ram) {
  std::vector<Element> elems = {h.alg.a, h.alg.b};
  for (const PureQuaternion& q : h.diag) {
    elems.push_back(pure_square(h.alg, q));
    for (const Element* c : {&q.xi, &q.xj, &q.xk})
      if (!c->is_zero()) elems.push_back(*c);
  }
  std::vector<Place> out;
  for (const Place& v : candidate_places(h.alg.field, elems)) {
    if (v.type != Place::Type::Finite) continue;
    if (std::find(ram.begin(), ram.end(), v) != ram.end()) continue;
    out.push_back(v);
  }
  return out;
}

// the split place of K above the rational prime of v (v splits in K by choice)
Place split_place_above(const QuadExtension& K, const Place& v) {
  for (const Place& w : places_above(K.ext_field(), v.p))
    if (w.split == Place::Split::Split && w.which == 0) return w;
  fail("Internal", "expected a split place above p=" + v.p.str());
}

struct AdaptedLocal {
  QuadExtension K;
  QuadraticForm phi;
  Place w;  // place of K with K_w = completion of the base at v
};

AdaptedLocal adapted_morita(const SkewHermitianForm& h, const Place& v) {
  PureQuaternion q = splitting_pure_at(h.alg, v);
  auto [K, phi] = morita_transfer(h, q);
  Place w = v.type == Place::Type::Real ? real_places(K.ext_field())[0]
                                        : split_place_above(K, v);
  return AdaptedLocal{K, phi, w};
}

void require_division_over_q(const SkewHermitianForm& h, const char* what) {
  if (h.alg.field != FieldDescriptor::rationals())
    fail("UnsupportedField", std::string(what) + " is only decided over Q");
  if (!is_division(h.alg)) fail("PreconditionFailed", std::string(what) + " needs a division algebra");
}

}  // namespace

// ---------------------------------------------------------------------------
// basic arithmetic
// ---------------------------------------------------------------------------

QuaternionAlgebra make_quaternion_algebra(const Element& a, const Element& b) {
  if (a.field != b.field) fail("FieldMismatch", "quaternion algebra slots over different fields");
  if (a.is_zero() || b.is_zero()) fail("ZeroElement", "quaternion algebra slots must be nonzero");
  return QuaternionAlgebra{a.field, a, b};
}

BrauerClass2 algebra_class(const QuaternionAlgebra& Q) { return brauer_symbol(Q.a, Q.b); }

bool is_division(const QuaternionAlgebra& Q) { return !brauer_is_zero(algebra_class(Q)); }

Quat quat_of(const FieldDescriptor& F, const Rat& x0, const Rat& xi, const Rat& xj,
             const Rat& xk) {
  return Quat{make_elem(F, x0), make_elem(F, xi), make_elem(F, xj), make_elem(F, xk)};
}

Quat q_add(const Quat& u, const Quat& v) {
  return Quat{add(u.x0, v.x0), add(u.xi, v.xi), add(u.xj, v.xj), add(u.xk, v.xk)};
}

Quat q_neg(const Quat& u) { return Quat{neg(u.x0), neg(u.xi), neg(u.xj), neg(u.xk)}; }

Quat q_mul(const QuaternionAlgebra& Q, const Quat& u, const Quat& v) {
  const Element& a = Q.a;
  const Element& b = Q.b;
  Element ab = mul(a, b);
  // 1:  u0 v0 + a ui vi + b uj vj - ab uk vk
  Element x0 = add(add(mul(u.x0, v.x0), mul(a, mul(u.xi, v.xi))),
                   sub(mul(b, mul(u.xj, v.xj)), mul(ab, mul(u.xk, v.xk))));
  // i:  u0 vi + ui v0 - b uj vk + b uk vj
  Element xi = add(add(mul(u.x0, v.xi), mul(u.xi, v.x0)),
                   mul(b, sub(mul(u.xk, v.xj), mul(u.xj, v.xk))));
  // j:  u0 vj + uj v0 + a ui vk - a uk vi
  Element xj = add(add(mul(u.x0, v.xj), mul(u.xj, v.x0)),
                   mul(a, sub(mul(u.xi, v.xk), mul(u.xk, v.xi))));
  // k:  u0 vk + uk v0 + ui vj - uj vi
  Element xk = add(add(mul(u.x0, v.xk), mul(u.xk, v.x0)),
                   sub(mul(u.xi, v.xj), mul(u.xj, v.xi)));
  return Quat{x0, xi, xj, xk};
}

Quat q_conj(const Quat& u) { return Quat{u.x0, neg(u.xi), neg(u.xj), neg(u.xk)}; }

Element q_norm(const QuaternionAlgebra& Q, const Quat& u) {
  Element ab = mul(Q.a, Q.b);
  return add(sub(mul(u.x0, u.x0), mul(Q.a, mul(u.xi, u.xi))),
             sub(mul(ab, mul(u.xk, u.xk)), mul(Q.b, mul(u.xj, u.xj))));
}

Quat q_inv(const QuaternionAlgebra& Q, const Quat& u) {
  Element n = q_norm(Q, u);
  if (n.is_zero()) fail("ZeroElement", "quaternion is not invertible");
  Element ninv = inverse(n);
  return q_scale(q_conj(u), ninv);
}

PureQuaternion make_pure(const Element& xi, const Element& xj, const Element& xk) {
  if (xi.field != xj.field || xi.field != xk.field)
    fail("FieldMismatch", "pure quaternion coordinates over different fields");
  return PureQuaternion{xi, xj, xk};
}

Quat pure_to_quat(const PureQuaternion& p) {
  return Quat{make_elem(p.xi.field, 0), p.xi, p.xj, p.xk};
}

PureQuaternion pure_of_quat(const Quat& u) {
  if (!u.x0.is_zero()) fail("Internal", "quaternion has a nonzero scalar part");
  return PureQuaternion{u.xi, u.xj, u.xk};
}

Element pure_square(const QuaternionAlgebra& Q, const PureQuaternion& p) {
  Element ab = mul(Q.a, Q.b);
  return sub(add(mul(Q.a, mul(p.xi, p.xi)), mul(Q.b, mul(p.xj, p.xj))),
             mul(ab, mul(p.xk, p.xk)));
}

PureQuaternion pure_scale(const Element& c, const PureQuaternion& p) {
  return PureQuaternion{mul(c, p.xi), mul(c, p.xj), mul(c, p.xk)};
}

// ---------------------------------------------------------------------------
// forms
// ---------------------------------------------------------------------------

SkewHermitianForm make_herm(const QuaternionAlgebra& Q, std::vector<PureQuaternion> diag) {
  for (const PureQuaternion& q : diag)
    if (pure_square(Q, q).is_zero())
      fail("ZeroElement", "skew-hermitian diagonal entries must be invertible pures");
  return SkewHermitianForm{Q, std::move(diag)};
}

SkewHermitianForm herm_direct_sum(const SkewHermitianForm& x, const SkewHermitianForm& y) {
  if (x.alg.field != y.alg.field || !elem_equal(x.alg.a, y.alg.a) ||
      !elem_equal(x.alg.b, y.alg.b))
    fail("FieldMismatch", "direct sum over different quaternion algebras");
  SkewHermitianForm out = x;
  out.diag.insert(out.diag.end(), y.diag.begin(), y.diag.end());
  return out;
}

SkewHermitianForm herm_scale(const Element& c, const SkewHermitianForm& h) {
  if (c.is_zero()) fail("ZeroElement", "scaling a hermitian form by zero");
  SkewHermitianForm out{h.alg, {}};
  for (const PureQuaternion& q : h.diag) out.diag.push_back(pure_scale(c, q));
  return out;
}

SkewHermitianForm herm_neg(const SkewHermitianForm& h) {
  return herm_scale(make_elem(h.alg.field, -1), h);
}

SkewHermitianForm herm_factor(const Element& lambda, const SkewHermitianForm& h) {
  return herm_direct_sum(h, herm_scale(neg(lambda), h));
}

SkewHermitianForm herm_entry_transform(const SkewHermitianForm& h, int index, const Quat& g) {
  if (index < 0 || index >= h.rank()) fail("Internal", "entry index out of range");
  if (q_norm(h.alg, g).is_zero()) fail("ZeroElement", "transform must be invertible");
  SkewHermitianForm out = h;
  Quat t = q_mul(h.alg, q_mul(h.alg, q_conj(g), pure_to_quat(h.diag[index])), g);
  out.diag[static_cast<std::size_t>(index)] = pure_of_quat(t);
  return out;
}

Element herm_e1(const SkewHermitianForm& h) {
  Element acc = make_elem(h.alg.field, 1);
  for (const PureQuaternion& q : h.diag) acc = mul(acc, pure_square(h.alg, q));
  return square_class(acc);
}

SkewHermitianForm herm_restrict(const QuadExtension& K, const SkewHermitianForm& h) {
  if (h.alg.field != K.base) fail("FieldMismatch", "restriction base mismatch");
  QuaternionAlgebra algK =
      make_quaternion_algebra(qe_embed(K, h.alg.a), qe_embed(K, h.alg.b));
  SkewHermitianForm out{algK, {}};
  for (const PureQuaternion& q : h.diag)
    out.diag.push_back(
        PureQuaternion{qe_embed(K, q.xi), qe_embed(K, q.xj), qe_embed(K, q.xk)});
  return out;
}

// ---------------------------------------------------------------------------
// Morita transfer
// ---------------------------------------------------------------------------

std::pair<QuadExtension, QuadraticForm> morita_transfer(const SkewHermitianForm& h,
                                                        const PureQuaternion& q) {
  if (h.alg.field != FieldDescriptor::rationals())
    fail("UnsupportedField", "morita transfer needs base field Q");
  Element delta = pure_square(h.alg, q);
  if (delta.is_zero()) fail("ZeroElement", "morita transfer needs an invertible pure");
  if (is_square(delta))
    fail("NotSplittingField", "q^2 is a square, F(q) is not a quadratic field");
  Rat drat = delta.x0;
  Int dsf = squarefree_part(drat);
  Rat s = *rat_sqrt(drat / Rat(dsf));
  QuadExtension K = QuadExtension::over_q(dsf);
  FieldDescriptor KF = K.ext_field();
  Element theta = make_quad_elem(dsf, 0, s);  // the image of q in K

  // a pure z with zq = -qz: orthogonal to q for the pure-square form
  Rat a = h.alg.a.x0, b = h.alg.b.x0;
  Rat n1 = a * q.xi.x0, n2 = b * q.xj.x0, n3 = -a * b * q.xk.x0;
  std::vector<std::array<Rat, 3>> zc = {{n2, -n1, Rat(0)},  {n3, Rat(0), -n1},
                                        {Rat(0), n3, -n2},  {n2 + n3, -n1, -n1},
                                        {n2, n3 - n1, -n2}, {n3, n3, -n1 - n2}};
  std::optional<PureQuaternion> zopt;
  Rat nu = 0;
  for (const auto& c : zc) {
    if (c[0] == 0 && c[1] == 0 && c[2] == 0) continue;
    Rat val = a * c[0] * c[0] + b * c[1] * c[1] - a * b * c[2] * c[2];
    if (val == 0) continue;
    FieldDescriptor F = h.alg.field;
    zopt = PureQuaternion{make_elem(F, c[0]), make_elem(F, c[1]), make_elem(F, c[2])};
    nu = val;
    break;
  }
  if (!zopt) fail("Internal", "no anticommuting complement found");
  PureQuaternion z = *zopt;
  PureQuaternion zq = pure_of_quat(q_mul(h.alg, pure_to_quat(z), pure_to_quat(q)));

  // columns of the basis matrix (q, z, zq) in (i, j, k)-coordinates
  auto col = [](const PureQuaternion& p) {
    return std::array<Rat, 3>{p.xi.x0, p.xj.x0, p.xk.x0};
  };
  std::array<std::array<Rat, 3>, 3> M = {col(q), col(z), col(zq)};  // M[col][row]
  auto det3 = [](const std::array<Rat, 3>& c0, const std::array<Rat, 3>& c1,
                 const std::array<Rat, 3>& c2) {
    return c0[0] * (c1[1] * c2[2] - c1[2] * c2[1]) - c1[0] * (c0[1] * c2[2] - c0[2] * c2[1]) +
           c2[0] * (c0[1] * c1[2] - c0[2] * c1[1]);
  };
  Rat dM = det3(M[0], M[1], M[2]);
  if (dM == 0) fail("Internal", "q, z, zq do not span the pure part");

  std::vector<Element> entries;
  for (const PureQuaternion& e : h.diag) {
    std::array<Rat, 3> rhs = col(e);
    Rat c0 = det3(rhs, M[1], M[2]) / dM;
    Rat u = det3(M[0], rhs, M[2]) / dM;
    Rat v = det3(M[0], M[1], rhs) / dM;
    Element esq = pure_square(h.alg, e);
    if (u == 0 && v == 0) {
      // e = c0 q: a hyperbolic plane over K
      Element c0theta = mul(theta, c0);
      entries.push_back(mul(c0theta, Rat(-2)));
      entries.push_back(mul(c0theta, Rat(2)));
      continue;
    }
    Element gamma = make_quad_elem(dsf, u, v * s);
    Rat ngamma = u * u - drat * v * v;  // N_{K/F}(gamma)
    Rat detg = -(nu * ngamma + c0 * c0 * drat);
    if (detg != -esq.x0) fail("Internal", "morita block determinant mismatch");
    Element detk = make_elem(KF, detg);
    entries.push_back(gamma);
    entries.push_back(divide(detk, gamma));
  }
  return {K, make_form(KF, std::move(entries))};
}

// ---------------------------------------------------------------------------
// local-global isotropy
// ---------------------------------------------------------------------------

PureQuaternion splitting_pure_at(const QuaternionAlgebra& Q, const Place& v) {
  if (Q.field != FieldDescriptor::rationals())
    fail("UnsupportedField", "splitting pures are searched over Q");
  Rat a = Q.a.x0, b = Q.b.x0;
  for (int height = 1; height <= 12; ++height) {
    for (int x = -height; x <= height; ++x)
      for (int y = -height; y <= height; ++y)
        for (int z = -height; z <= height; ++z) {
          if (std::max({std::abs(x), std::abs(y), std::abs(z)}) != height) continue;
          Rat val = a * x * x + b * y * y - a * b * z * z;
          if (val == 0) continue;
          Element de = make_elem(Q.field, val);
          if (is_square(de)) continue;
          if (local_square(de, v))
            return PureQuaternion{make_elem(Q.field, x), make_elem(Q.field, y),
                                  make_elem(Q.field, z)};
        }
  }
  fail("SearchExhausted", "no splitting pure adapted to " + v.str() + " found");
}

int local_kernel_rank_ramified(const SkewHermitianForm& h, const Place& v) {
  int r = h.rank();
  if (v.type == Place::Type::Real) return r % 2;
  bool sq = r == 0 ? true : local_square(herm_e1(h), v);
  if (sq) return r % 2 == 0 ? 0 : 3;
  return r % 2 == 0 ? 2 : 1;
}

bool isotropic_h(const SkewHermitianForm& h) {
  require_division_over_q(h, "hermitian isotropy");
  int r = h.rank();
  if (r <= 1) return false;
  Element disc = herm_e1(h);
  std::vector<Place> ram = algebra_ramification(h.alg);
  for (const Place& v : ram) {
    if (v.type != Place::Type::Finite) continue;  // ramified real: isotropic for r >= 2
    bool sq = local_square(disc, v);
    if (r == 2 && !sq) return false;
    if (r == 3 && sq) return false;
  }
  if (!has_real_ram(ram)) {
    AdaptedLocal loc = adapted_morita(h, real_places(h.alg.field)[0]);
    if (std::abs(signature(loc.phi, loc.w)) == 2 * r) return false;
  }
  if (r == 2) {
    for (const Place& v : finite_split_candidates(h, ram)) {
      AdaptedLocal loc = adapted_morita(h, v);
      if (!locally_isotropic(loc.phi, loc.w)) return false;
    }
  }
  return true;
}

bool hyperbolic_h(const SkewHermitianForm& h) {
  require_division_over_q(h, "hermitian hyperbolicity");
  int r = h.rank();
  if (r % 2 != 0) return false;
  if (r == 0) return true;
  if (!is_square(herm_e1(h))) return false;
  std::vector<Place> ram = algebra_ramification(h.alg);
  // at ramified places even rank + trivial discriminant forces a zero kernel
  if (!has_real_ram(ram)) {
    AdaptedLocal loc = adapted_morita(h, real_places(h.alg.field)[0]);
    if (signature(loc.phi, loc.w) != 0) return false;
  }
  for (const Place& v : finite_split_candidates(h, ram)) {
    AdaptedLocal loc = adapted_morita(h, v);
    if (local_aniso_dim(loc.phi, loc.w) != 0) return false;
  }
  return true;
}

bool isometric_h(const SkewHermitianForm& h1, const SkewHermitianForm& h2) {
  if (h1.alg.field != h2.alg.field || !elem_equal(h1.alg.a, h2.alg.a) ||
      !elem_equal(h1.alg.b, h2.alg.b))
    fail("FieldMismatch", "isometry over different quaternion algebras");
  if (h1.rank() != h2.rank()) return false;
  return hyperbolic_h(herm_direct_sum(h1, herm_neg(h2)));
}

// ---------------------------------------------------------------------------
// representation
// ---------------------------------------------------------------------------

std::optional<std::pair<Element, SkewHermitianForm>> represent_multiple(
    const SkewHermitianForm& h, const PureQuaternion& q) {
  const QuaternionAlgebra& alg = h.alg;
  const FieldDescriptor& F = alg.field;
  int r = h.rank();
  if (r == 0) return std::nullopt;
  Element delta = pure_square(alg, q);
  if (delta.is_zero()) fail("ZeroElement", "represent_multiple target must be invertible");

  if (F == FieldDescriptor::rationals() && !is_square(delta)) {
    auto [K, phi] = morita_transfer(h, q);
    if (!isotropic(phi)) return std::nullopt;  // h over F(q) is anisotropic
  }

  // a candidate vector v yields a certificate when p = h(v,v) satisfies
  // p^2 = l^2 q^2: the pure x = p + l q conjugates <p> onto <-l x^2 q>
  auto attempt = [&](const std::vector<Quat>& v)
      -> std::optional<std::pair<Element, SkewHermitianForm>> {
    Quat pq = herm_pair(h, v, v);
    if (pq.is_zero()) return std::nullopt;
    PureQuaternion p = pure_of_quat(pq);
    Element psq = pure_square(alg, p);
    if (psq.is_zero()) return std::nullopt;
    Element ratio = divide(psq, delta);
    if (!is_square(ratio)) return std::nullopt;
    Element lam = elem_sqrt(ratio);

    Element mu;
    Quat g = quat_of(F, 1, 0, 0, 0);
    bool found = false;
    for (int sgn : {1, -1}) {
      Element l = sgn > 0 ? lam : neg(lam);
      PureQuaternion x = pure_add(p, pure_scale(l, q));
      if (x.is_zero()) {  // p = -l q already
        mu = neg(l);
        found = true;
        break;
      }
      Element xsq = pure_square(alg, x);
      if (xsq.is_zero()) continue;  // zero divisor; only possible when split
      mu = neg(mul(l, xsq));
      g = pure_to_quat(x);
      found = true;
      break;
    }
    if (!found) return std::nullopt;

    // new basis vector v' = v g has h(v',v') = mu q
    std::vector<Quat> vp(v.size(), quat_zero(F));
    for (std::size_t m = 0; m < v.size(); ++m) vp[m] = q_mul(alg, v[m], g);
    int pivot = -1;
    for (std::size_t m = 0; m < vp.size(); ++m)
      if (!vp[m].is_zero()) {
        pivot = static_cast<int>(m);
        break;
      }
    if (pivot < 0) return std::nullopt;

    Quat entry = q_scale(pure_to_quat(q), mu);
    Quat pinv = q_inv(alg, entry);
    std::vector<std::vector<Quat>> complement;
    for (int m = 0; m < r; ++m) {
      if (m == pivot) continue;
      Quat c = q_mul(alg, q_conj(vp[static_cast<std::size_t>(m)]),
                     pure_to_quat(h.diag[static_cast<std::size_t>(m)]));
      Quat coeff = q_mul(alg, pinv, c);
      std::vector<Quat> u(vp.size(), quat_zero(F));
      for (std::size_t t = 0; t < u.size(); ++t) {
        Quat base = (static_cast<int>(t) == m) ? quat_of(F, 1, 0, 0, 0) : quat_zero(F);
        u[t] = q_add(base, q_neg(q_mul(alg, vp[t], coeff)));
      }
      complement.push_back(std::move(u));
    }
    SkewHermitianForm rest = make_herm(alg, diagonalize_span(h, complement));
    Element scaled = mul(mul(mu, mu), delta);  // (mu q)^2
    if (!same_square_class(herm_e1(h), mul(scaled, herm_e1(rest))))
      fail("Internal", "representation certificate has an inconsistent discriminant");
    return std::make_pair(mu, rest);
  };

  const std::int64_t cap = budget().vector_search;
  std::int64_t used = 0;

  // stage 0: single entries
  for (int i = 0; i < r; ++i) {
    std::vector<Quat> v(static_cast<std::size_t>(r), quat_zero(F));
    v[static_cast<std::size_t>(i)] = quat_of(F, 1, 0, 0, 0);
    ++used;
    if (auto res = attempt(v)) return res;
  }

  // stage 1/2: supported on two entries; stage 3: three entries
  struct Stage {
    int support;
    std::vector<Rat> comps;
  };
  std::vector<Stage> stages = {{2, {0, 1, -1}}, {2, {0, 1, -1, 2, -2}}, {3, {0, 1, -1}}};
  for (const Stage& st : stages) {
    if (st.support > r) continue;
    std::vector<Quat> pool = component_quats(F, st.comps);
    if (st.support == 2) {
      for (int i = 0; i < r; ++i)
        for (int j = i + 1; j < r; ++j)
          for (const Quat& ci : pool)
            for (const Quat& cj : pool) {
              if (++used > cap) fail("SearchExhausted", "representation search budget used up");
              std::vector<Quat> v(static_cast<std::size_t>(r), quat_zero(F));
              v[static_cast<std::size_t>(i)] = ci;
              v[static_cast<std::size_t>(j)] = cj;
              if (auto res = attempt(v)) return res;
            }
    } else {
      for (int i = 0; i < r; ++i)
        for (int j = i + 1; j < r; ++j)
          for (int k = j + 1; k < r; ++k)
            for (const Quat& ci : pool)
              for (const Quat& cj : pool)
                for (const Quat& ck : pool) {
                  if (++used > cap)
                    fail("SearchExhausted", "representation search budget used up");
                  std::vector<Quat> v(static_cast<std::size_t>(r), quat_zero(F));
                  v[static_cast<std::size_t>(i)] = ci;
                  v[static_cast<std::size_t>(j)] = cj;
                  v[static_cast<std::size_t>(k)] = ck;
                  if (auto res = attempt(v)) return res;
                }
    }
  }
  fail("SearchExhausted", "no representation witness within the search budget");
}

// ---------------------------------------------------------------------------
// invariants
// ---------------------------------------------------------------------------

std::vector<HermBlock> herm_decompose_blocks(const SkewHermitianForm& h) {
  if (h.rank() % 2 != 0)
    fail("DecompositionFailed", "block decomposition needs even rank");
  if (!is_square(herm_e1(h)))
    fail("DecompositionFailed", "block decomposition needs trivial discriminant");
  std::vector<HermBlock> blocks;
  SkewHermitianForm work = h;
  while (work.rank() > 0) {
    bool peeled = false;
    for (int i = 0; i < work.rank() && !peeled; ++i) {
      PureQuaternion q = work.diag[static_cast<std::size_t>(i)];
      SkewHermitianForm rest = remove_entry(work, i);
      std::optional<std::pair<Element, SkewHermitianForm>> res;
      try {
        res = represent_multiple(rest, q);
      } catch (const Error& e) {
        if (e.code() != "SearchExhausted") throw;
        continue;
      }
      if (!res) continue;
      // work = <q, mu q> | res->second = <q><1,-(-mu)> | ...
      blocks.push_back(HermBlock{q, square_class(pure_square(work.alg, q)),
                                 square_class(neg(res->first))});
      work = res->second;
      peeled = true;
    }
    if (!peeled)
      fail("DecompositionFailed", "no rank-2 block with trivial discriminant splits off");
  }
  return blocks;
}

bool brauer_equal_mod_q(const BrauerClass2& x, const BrauerClass2& y,
                        const QuaternionAlgebra& Q) {
  BrauerClass2 diff = brauer_add(x, y);
  return brauer_is_zero(diff) || brauer_equal(diff, algebra_class(Q));
}

namespace {

BrauerClass2 blocks_e2(const FieldDescriptor& F, const std::vector<HermBlock>& blocks) {
  BrauerClass2 acc = brauer_zero(F);
  for (const HermBlock& bl : blocks) acc = brauer_add(acc, brauer_symbol(bl.a, bl.lambda));
  return acc;
}

// e2 mod [Q] from local data, for forms that do not admit a chain of rank-2
// blocks (odd rank).  Only supported when the algebra ramifies at exactly two
// places, so that classes ramified inside ram(Q) are 0 or [Q].
BrauerClass2 herm_e2_from_local_data(const SkewHermitianForm& h) {
  require_division_over_q(h, "local Clifford computation");
  std::vector<Place> ram = algebra_ramification(h.alg);
  if (ram.size() != 2)
    fail("DecompositionFailed",
         "local Clifford reconstruction needs an algebra with two ramified places");
  int r = h.rank();
  std::set<Place> target;  // places outside ram(Q) with nontrivial local class
  if (!has_real_ram(ram)) {
    AdaptedLocal loc = adapted_morita(h, real_places(h.alg.field)[0]);
    if (std::abs(signature(loc.phi, loc.w)) % 8 == 4) target.insert(real_places(h.alg.field)[0]);
  }
  for (const Place& v : finite_split_candidates(h, ram)) {
    AdaptedLocal loc = adapted_morita(h, v);
    QuadraticForm hyp = hyperbolic_form(loc.K.ext_field(), r);
    if (hasse_symbol(loc.phi, loc.w) != hasse_symbol(hyp, loc.w)) target.insert(v);
  }
  if (target.empty()) return brauer_zero(h.alg.field);

  // search a symbol sum whose ramification outside ram(Q) is exactly `target`
  std::vector<Element> seeds = {h.alg.a, h.alg.b};
  for (const PureQuaternion& q : h.diag) seeds.push_back(pure_square(h.alg, q));
  for (const Place& v : target)
    if (v.type == Place::Type::Finite) seeds.push_back(make_elem(h.alg.field, Rat(v.p)));
  std::vector<Element> pool = scalar_pool(h.alg.field, seeds, 48);
  auto matches = [&](const BrauerClass2& y) {
    std::set<Place> yram;
    for (const Place& v : brauer_ramification(y))
      if (std::find(ram.begin(), ram.end(), v) == ram.end()) yram.insert(v);
    return yram == target;
  };
  std::vector<BrauerClass2> singles;
  std::int64_t used = 0;
  const std::int64_t cap = budget().candidate_scalars;
  for (std::size_t i = 0; i < pool.size(); ++i)
    for (std::size_t j = i; j < pool.size(); ++j) {
      if (++used > cap) break;
      BrauerClass2 y = brauer_symbol(pool[i], pool[j]);
      if (matches(y)) return y;
      singles.push_back(y);
    }
  for (std::size_t i = 0; i < singles.size() && used <= cap; ++i)
    for (std::size_t j = i + 1; j < singles.size(); ++j) {
      if (++used > cap) break;
      BrauerClass2 y = brauer_add(singles[i], singles[j]);
      if (matches(y)) return y;
    }
  fail("SearchExhausted", "no symbol sum matches the local Clifford data");
}

bool herm_is_constant(const SkewHermitianForm& h) {
  if (!h.alg.a.is_rational_constant() || !h.alg.b.is_rational_constant()) return false;
  for (const PureQuaternion& q : h.diag)
    for (const Element* c : {&q.xi, &q.xj, &q.xk})
      if (!c->is_rational_constant()) return false;
  return true;
}

SkewHermitianForm herm_to_rationals(const SkewHermitianForm& h) {
  FieldDescriptor Q = FieldDescriptor::rationals();
  QuaternionAlgebra alg =
      make_quaternion_algebra(make_elem(Q, h.alg.a.x0), make_elem(Q, h.alg.b.x0));
  SkewHermitianForm out{alg, {}};
  for (const PureQuaternion& q : h.diag)
    out.diag.push_back(PureQuaternion{make_elem(Q, q.xi.x0), make_elem(Q, q.xj.x0),
                                      make_elem(Q, q.xk.x0)});
  return out;
}

// e2 mod [Q]: chain extraction where possible, local reconstruction otherwise;
// constant data over Q(t) is computed over Q and lifted
BrauerClass2 herm_e2_class(const SkewHermitianForm& h, std::vector<HermBlock>* blocks_out) {
  if (blocks_out) blocks_out->clear();
  if (h.rank() % 2 == 0) {
    try {
      std::vector<HermBlock> blocks = herm_decompose_blocks(h);
      BrauerClass2 out = blocks_e2(h.alg.field, blocks);
      if (blocks_out) *blocks_out = std::move(blocks);
      return out;
    } catch (const Error& e) {
      if (e.code() != "DecompositionFailed" && e.code() != "SearchExhausted") throw;
    }
  }
  if (h.alg.field == FieldDescriptor::rationals()) return herm_e2_from_local_data(h);
  if (h.alg.field.kind == FieldDescriptor::Kind::Qt && herm_is_constant(h)) {
    BrauerClass2 base = herm_e2_class(herm_to_rationals(h), nullptr);
    BrauerClass2 out = brauer_zero(h.alg.field);
    for (const Symbol2& s : base.symbols)
      out = brauer_add(out, brauer_symbol(make_elem(h.alg.field, s.a.x0),
                                          make_elem(h.alg.field, s.b.x0)));
    return out;
  }
  fail("DecompositionFailed", "e2 is not computable for this form");
}

}  // namespace

HermInvariantReport herm_invariants(const SkewHermitianForm& h) {
  HermInvariantReport rep;
  rep.relative_rank = h.rank();
  rep.absolute_rank = h.absolute_rank();
  rep.e1 = herm_e1(h);
  rep.e1_trivial = is_square(rep.e1);
  if (!rep.e1_trivial) return rep;

  std::vector<HermBlock> blocks;
  rep.e2 = herm_e2_class(h, &blocks);
  rep.blocks = blocks;
  rep.e2_trivial_mod_q = brauer_equal_mod_q(*rep.e2, brauer_zero(h.alg.field), h.alg);
  if (!rep.e2_trivial_mod_q || h.rank() % 2 != 0 || blocks.empty()) return rep;

  // normalize the first block so that the symbol sum vanishes exactly
  // (<q><1,-lambda> = <q><1,-lambda b> whenever (q^2, b) = [Q])
  if (!brauer_is_zero(blocks_e2(h.alg.field, blocks))) {
    std::vector<Element> seeds = {h.alg.a, h.alg.b, blocks[0].a};
    bool fixed = false;
    for (const Element& b1 : scalar_pool(h.alg.field, seeds, 48)) {
      if (b1.is_zero() || is_square(b1)) continue;
      if (brauer_equal(brauer_symbol(blocks[0].a, b1), algebra_class(h.alg))) {
        blocks[0].lambda = square_class(mul(blocks[0].lambda, b1));
        fixed = true;
        break;
      }
    }
    if (!fixed) fail("SearchExhausted", "no block normalization scalar found");
    if (!brauer_is_zero(blocks_e2(h.alg.field, blocks)))
      fail("Internal", "block normalization did not trivialize the symbol sum");
  }
  std::vector<std::pair<Element, SkewHermitianForm>> pieces;
  Element one = make_elem(h.alg.field, 1);
  for (const HermBlock& bl : blocks) {
    pieces.emplace_back(one, make_herm(h.alg, {bl.q}));
    pieces.emplace_back(bl.lambda, make_herm(h.alg, {pure_scale(make_elem(h.alg.field, -1), bl.q)}));
  }
  rep.f3 = f3_sum(pieces);
  return rep;
}

// ---------------------------------------------------------------------------
// e3 / f3 formula engine
// ---------------------------------------------------------------------------

H3Class f3_sum(const std::vector<std::pair<Element, SkewHermitianForm>>& blocks) {
  if (blocks.empty()) fail("PreconditionFailed", "f3_sum needs at least one block");
  const QuaternionAlgebra& alg = blocks[0].second.alg;
  const FieldDescriptor& F = alg.field;
  BrauerClass2 obstruction = brauer_zero(F);
  Element muprod = make_elem(F, 1);
  for (const auto& [lambda, hi] : blocks) {
    if (lambda.is_zero()) fail("ZeroElement", "f3_sum block multiplier must be nonzero");
    if (hi.alg.field != F || !elem_equal(hi.alg.a, alg.a) || !elem_equal(hi.alg.b, alg.b))
      fail("FieldMismatch", "f3_sum blocks over different quaternion algebras");
    obstruction = brauer_add(obstruction, brauer_symbol(lambda, herm_e1(hi)));
    muprod = mul(muprod, elem_pow(lambda, hi.rank()));  // n_i/2 = relative rank
  }
  if (!brauer_is_zero(obstruction))
    fail("CliffordObstruction", "sum lambda_i . e1(h_i) does not vanish");
  return h3_cup(square_class(muprod), algebra_class(alg));
}

HermE3 e3_rank2_factor(const SkewHermitianForm& h, const Element& lambda) {
  if (lambda.is_zero()) fail("ZeroElement", "rank-2 factor slot must be nonzero");
  if (lambda.field != h.alg.field) fail("FieldMismatch", "rank-2 factor slot field");
  if (!is_square(herm_e1(h)))
    fail("PreconditionFailed", "the trivial-discriminant branch needs e1(h) = 0");
  BrauerClass2 e2h = herm_e2_class(h, nullptr);
  HermE3 out{ModClass{h3_cup(lambda, e2h), Modulus{{algebra_class(h.alg)}}},
             h3_zero_class(h.alg.field)};
  if (h.absolute_rank() % 4 != 0) out.f3 = h3_cup(lambda, algebra_class(h.alg));
  return out;
}

HermE3 e3_rank2_factor_cores(const SkewHermitianForm& h, const Element& mu) {
  if (h.alg.field != FieldDescriptor::rationals())
    fail("UnsupportedField", "the corestriction branch needs base field Q");
  Element d = herm_e1(h);
  if (is_square(d))
    fail("PreconditionFailed", "the corestriction branch needs a nontrivial discriminant");
  QuadExtension K = QuadExtension::over_q(squarefree_part(d.x0));
  if (mu.field != K.ext_field())
    fail("FieldMismatch", "mu must live in the discriminant extension " + K.ext_field().str());
  if (mu.is_zero()) fail("ZeroElement", "mu must be nonzero");
  SkewHermitianForm hK = herm_restrict(K, h);
  BrauerClass2 e2K = brauer_zero(K.ext_field());
  try {
    e2K = herm_e2_class(hK, nullptr);
  } catch (const Error& e) {
    if (e.code() != "DecompositionFailed") throw;
    // odd rank: K = F(z) for any pure z with z^2 in the class of d, the
    // algebra splits over K, and e2(h_K) is the Clifford invariant of the
    // Morita transfer along z
    std::optional<PureQuaternion> z;
    for (const PureQuaternion& q : h.diag)
      if (same_square_class(pure_square(h.alg, q), d)) {
        z = q;
        break;
      }
    if (!z) {
      for (int x = -6; x <= 6 && !z; ++x)
        for (int y = -6; y <= 6 && !z; ++y)
          for (int w = -6; w <= 6 && !z; ++w) {
            if (x == 0 && y == 0 && w == 0) continue;
            PureQuaternion cand{make_elem(h.alg.field, x), make_elem(h.alg.field, y),
                                make_elem(h.alg.field, w)};
            Element sq = pure_square(h.alg, cand);
            if (!sq.is_zero() && same_square_class(sq, d)) z = cand;
          }
    }
    if (!z) fail("DecompositionFailed", "no pure generator of the discriminant extension");
    e2K = e2(morita_transfer(h, *z).second);
  }
  HermE3 out{ModClass{corestriction(K, mu, e2K), Modulus{{algebra_class(h.alg)}}},
             h3_zero_class(h.alg.field)};
  if (h.absolute_rank() % 4 != 0)
    out.f3 = h3_cup(qe_norm(K, mu), algebra_class(h.alg));
  return out;
}

ModClass e3_additive(const ModClass& x, const ModClass& y) {
  if (x.modulus.classes.size() != y.modulus.classes.size())
    fail("ModulusMismatch", "e3_additive over different moduli");
  for (std::size_t i = 0; i < x.modulus.classes.size(); ++i)
    if (!brauer_equal(x.modulus.classes[i], y.modulus.classes[i]))
      fail("ModulusMismatch", "e3_additive over different moduli");
  return ModClass{h3_add(x.value, y.value), x.modulus};
}

ModClass e3_relative(const SkewHermitianForm& h1, const SkewHermitianForm& h2,
                     const Element& lambda) {
  if (h1.alg.field != h2.alg.field || !elem_equal(h1.alg.a, h2.alg.a) ||
      !elem_equal(h1.alg.b, h2.alg.b))
    fail("FieldMismatch", "relative invariant over different quaternion algebras");
  if (lambda.is_zero()) fail("ZeroElement", "relative scaling must be nonzero");
  if (!is_square(herm_e1(h2)))
    fail("PreconditionFailed", "the relative formula needs e2(h2), so e1(h2) = 0");
  BrauerClass2 e2h2 = herm_e2_class(h2, nullptr);
  return ModClass{h3_cup(lambda, e2h2), Modulus{{algebra_class(h1.alg)}}};
}

}  // namespace wittlab
