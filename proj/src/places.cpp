// Places of Q and Q(sqrt d), local square tests and Hilbert symbols.
//
// Strategy: closed formulas everywhere they are classical and easy to get
// right (real places, odd places via tame symbols, split places via a
// Hensel-lifted embedding into Q_p), and the product formula for the single
// non-split dyadic place of Q(sqrt d).  A mod-p^k exhaustive solver lives in
// the test suite as an independent oracle.
#include <set>

#include "wittlab/fields.hpp"

namespace wittlab {

// ---------------------------------------------------------------------------
// modular helpers
// ---------------------------------------------------------------------------

static Int mod_pos(const Int& a, const Int& m) {
  Int r = a % m;
  if (r < 0) r += m;
  return r;
}

static Int mod_pow(Int b, Int e, const Int& m) {
  return boost::multiprecision::powm(mod_pos(b, m), e, m);
}

static Int mod_inv(const Int& a, const Int& m) {
  // extended euclid
  Int t = 0, newt = 1, r = m, newr = mod_pos(a, m);
  while (newr != 0) {
    Int q = r / newr;
    Int tmp = t - q * newt;
    t = newt;
    newt = tmp;
    tmp = r - q * newr;
    r = newr;
    newr = tmp;
  }
  if (r != 1) fail("Internal", "mod_inv of non-unit");
  return mod_pos(t, m);
}

// Legendre symbol (a|p), p odd prime, p does not divide a.
static int legendre(const Int& a, const Int& p) {
  Int r = mod_pow(a, (p - 1) / 2, p);
  if (r == 1) return 1;
  if (r == p - 1) return -1;
  fail("Internal", "legendre of non-unit");
}

// Tonelli-Shanks square root mod odd prime p (a a QR).
static Int sqrt_mod_p(const Int& a0, const Int& p) {
  Int a = mod_pos(a0, p);
  if (a == 0) return 0;
  if (p % 4 == 3) return mod_pow(a, (p + 1) / 4, p);
  // find a non-residue
  Int z = 2;
  while (legendre(z, p) != -1) ++z;
  Int q = p - 1;
  int s = 0;
  while (q % 2 == 0) {
    q /= 2;
    ++s;
  }
  Int m = s, c = mod_pow(z, q, p), t = mod_pow(a, q, p), r = mod_pow(a, (q + 1) / 2, p);
  while (t != 1) {
    Int tt = t;
    int i = 0;
    while (tt != 1) {
      tt = tt * tt % p;
      ++i;
    }
    Int b = c;
    for (Int j = 0; j < m - i - 1; ++j) b = b * b % p;
    m = i;
    c = b * b % p;
    t = t * c % p;
    r = r * b % p;
  }
  return r;
}

// Hensel-lift a square root of a mod p^k (p odd, a a unit QR; or p=2 with
// a ≡ 1 mod 8).
static Int sqrt_mod_pk(const Int& a, const Int& p, int k) {
  Int pk = 1;
  for (int i = 0; i < k; ++i) pk *= p;
  if (p == 2) {
    if (mod_pos(a, 8) != 1) fail("Internal", "dyadic sqrt needs a = 1 mod 8");
    Int r = 1, mod = 8;
    // lift: if r^2 = a mod 2^j then r or r + 2^{j-1} works mod 2^{j+1}
    for (int j = 3; j < k; ++j) {
      Int next = mod * 2;
      if (mod_pos(r * r - a, next) != 0) r += mod / 2;
      mod = next;
    }
    return mod_pos(r, pk);
  }
  Int r = sqrt_mod_p(a, p);
  Int mod = p;
  while (mod < pk) {
    Int next = mod * mod;
    if (next > pk) next = pk;
    // Newton: r <- r - (r^2 - a) / (2r)
    Int inv2r = mod_inv(2 * r % next, next);
    r = mod_pos(r - (r * r - a) % next * inv2r, next);
    mod = next;
  }
  return mod_pos(r, pk);
}

static int vp_int(Int n, const Int& p) {
  if (n == 0) fail("Internal", "valuation of zero");
  int v = 0;
  while (n % p == 0) {
    n /= p;
    ++v;
  }
  return v;
}

static int vp_rat(const Rat& r, const Int& p) {
  return vp_int(num(r), p) - vp_int(den(r), p);
}

// rational with p-free denominator reduced mod p^k
static Int rat_mod(const Rat& r, const Int& pk) {
  return mod_pos(num(r) % pk * mod_inv(den(r), pk), pk);
}

// ---------------------------------------------------------------------------
// p-adic data of rationals and of Q(sqrt d) elements at split places
// ---------------------------------------------------------------------------

struct PadicData {
  int val = 0;
  Int unit_mod = 0;  // unit part mod p (p odd) or mod 8 (p = 2)
};

static PadicData padic_of_rational(const Rat& r, const Int& p) {
  PadicData d;
  d.val = vp_rat(r, p);
  Rat u = r;
  if (d.val >= 0) {
    for (int i = 0; i < d.val; ++i) u /= Rat(p);
  } else {
    for (int i = 0; i < -d.val; ++i) u *= Rat(p);
  }
  Int m = p == 2 ? Int(8) : p;
  d.unit_mod = rat_mod(u, m);
  return d;
}

// Splitting type of the rational prime p in Q(sqrt d).
static Place::Split split_type(const Int& d, const Int& p) {
  if (p == 2) {
    Int m = mod_pos(d, 8);
    if (m == 1) return Place::Split::Split;
    if (m == 5) return Place::Split::Inert;
    return Place::Split::Ramified;
  }
  if (mod_pos(d, p) == 0) return Place::Split::Ramified;
  return legendre(d, p) == 1 ? Place::Split::Split : Place::Split::Inert;
}

// Embedding data at a split place: the canonical lift r of sqrt(d) mod p^M
// (which == 0 uses +r, which == 1 uses -r, where r is the lift of the
// numerically smaller square root mod p).
static Int split_root(const Int& d, const Int& p, int M) {
  Int r0 = p == 2 ? Int(0) : sqrt_mod_p(d, p);
  if (p != 2 && p - r0 < r0) r0 = p - r0;
  Int pk = 1;
  for (int i = 0; i < M; ++i) pk *= p;
  if (p == 2) {
    // reduce to an odd square: d = 1 mod 8 here
    return sqrt_mod_pk(mod_pos(d, pk), p, M);
  }
  Int r = sqrt_mod_pk(d, p, M);
  // normalize: pick the lift congruent to r0 mod p
  if (mod_pos(r, p) != r0) r = pk - r;
  return r;
}

// p-adic valuation and unit of x = x0 + x1*sqrt(d) under the embedding
// sqrt(d) -> sign*root.
static PadicData padic_of_quad(const Element& x, const Int& p, int which) {
  const Int d = x.field.d;
  Int L = boost::multiprecision::lcm(den(x.x0), den(x.x1));
  Int A = num(x.x0) * (L / den(x.x0));
  Int B = num(x.x1) * (L / den(x.x1));
  // upper bound for v_p(A + B*root): v_p of the norm (A+Br)(A-Br) = A^2 - B^2 d
  Int nn = A * A - B * B * d;
  int vbound = nn == 0 ? 0 : vp_int(nn, p);
  int M = vbound + 5;
  Int pk = 1;
  for (int i = 0; i < M; ++i) pk *= p;
  Int root = split_root(d, p, M);
  if (which == 1) root = pk - root;
  Int Z = mod_pos(A + B * root, pk);
  if (Z == 0) fail("Internal", "split-place precision exhausted");
  int v = vp_int(Z, p);
  PadicData out;
  int vL = vp_int(L, p);
  out.val = v - vL;
  Int u = Z;
  for (int i = 0; i < v; ++i) u /= p;
  Int Lu = L;
  for (int i = 0; i < vL; ++i) Lu /= p;
  Int m = p == 2 ? Int(8) : p;
  out.unit_mod = mod_pos(u * mod_inv(Lu, m), m);
  return out;
}

// ---------------------------------------------------------------------------
// Place bookkeeping
// ---------------------------------------------------------------------------

bool operator<(const Place& a, const Place& b) {
  auto key = [](const Place& v) {
    return std::tuple<int, int, Int, int, int>(
        static_cast<int>(v.type), v.real_index, v.p, static_cast<int>(v.split), v.which);
  };
  return key(a) < key(b);
}

std::string Place::str() const {
  if (type == Type::Real) return "real" + std::to_string(real_index);
  std::string s = "p=" + p.str();
  switch (split) {
    case Split::Split: s += which == 0 ? " (split,0)" : " (split,1)"; break;
    case Split::Inert: s += " (inert)"; break;
    case Split::Ramified: s += " (ramified)"; break;
    default: break;
  }
  return s;
}

std::vector<Place> real_places(const FieldDescriptor& F) {
  std::vector<Place> out;
  if (F.kind == FieldDescriptor::Kind::Q) {
    out.push_back(Place{Place::Type::Real, 0, 0, Place::Split::NA, 0});
  } else if (F.kind == FieldDescriptor::Kind::QSqrt && F.d > 0) {
    out.push_back(Place{Place::Type::Real, 0, 0, Place::Split::NA, 0});
    out.push_back(Place{Place::Type::Real, 1, 0, Place::Split::NA, 0});
  }
  return out;
}

std::vector<Place> places_above(const FieldDescriptor& F, const Int& p) {
  std::vector<Place> out;
  if (F.kind == FieldDescriptor::Kind::Q) {
    out.push_back(Place{Place::Type::Finite, 0, p, Place::Split::NA, 0});
    return out;
  }
  if (F.kind != FieldDescriptor::Kind::QSqrt) fail("UnsupportedField", "places_above");
  switch (split_type(F.d, p)) {
    case Place::Split::Split:
      out.push_back(Place{Place::Type::Finite, 0, p, Place::Split::Split, 0});
      out.push_back(Place{Place::Type::Finite, 0, p, Place::Split::Split, 1});
      break;
    case Place::Split::Inert:
      out.push_back(Place{Place::Type::Finite, 0, p, Place::Split::Inert, 0});
      break;
    default:
      out.push_back(Place{Place::Type::Finite, 0, p, Place::Split::Ramified, 0});
      break;
  }
  return out;
}

std::vector<Place> candidate_places(const FieldDescriptor& F,
                                    const std::vector<Element>& elems) {
  std::set<Int> primes{2};
  if (F.kind == FieldDescriptor::Kind::QSqrt) {
    for (const auto& [q, e] : factor_int(boost::multiprecision::abs(F.d))) primes.insert(q);
  }
  auto add_rat = [&](const Rat& r) {
    if (r == 0) return;
    for (const auto& [q, e] : factor_int(boost::multiprecision::abs(num(r)))) primes.insert(q);
    for (const auto& [q, e] : factor_int(den(r))) primes.insert(q);
  };
  for (const auto& x : elems) {
    if (x.field != F) fail("FieldMismatch", "candidate_places");
    if (F.kind == FieldDescriptor::Kind::QSqrt) {
      add_rat(x.x0 * x.x0 - Rat(F.d) * x.x1 * x.x1);  // norm support
    } else {
      add_rat(x.x0);
    }
  }
  std::vector<Place> out = real_places(F);
  for (const Int& p : primes) {
    auto above = places_above(F, p);
    out.insert(out.end(), above.begin(), above.end());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Signs, valuations, local squares
// ---------------------------------------------------------------------------

int real_sign(const Element& x, const Place& v) {
  if (v.type != Place::Type::Real) fail("UnsupportedPlace", "real_sign at finite place");
  if (x.is_zero()) fail("ZeroElement", "sign of zero");
  if (x.field.kind == FieldDescriptor::Kind::Q) return x.x0 > 0 ? 1 : -1;
  if (x.field.kind != FieldDescriptor::Kind::QSqrt) fail("UnsupportedField", "real_sign");
  if (x.field.d < 0) fail("UnsupportedPlace", "imaginary quadratic field has no real place");
  // sign of x0 + x1 * sigma * sqrt(d) with sigma = +-1
  int sigma = v.real_index == 0 ? 1 : -1;
  Rat a = x.x0, b = x.x1 * sigma;
  if (b == 0) return a > 0 ? 1 : -1;
  if (a == 0) return b > 0 ? 1 : -1;
  if (a > 0 && b > 0) return 1;
  if (a < 0 && b < 0) return -1;
  // opposite signs: compare a^2 with d*b^2
  bool a_wins = a * a > Rat(x.field.d) * b * b;
  return (a_wins ? (a > 0) : (b > 0)) ? 1 : -1;
}

int valuation(const Element& x, const Place& v) {
  if (v.type != Place::Type::Finite) fail("UnsupportedPlace", "valuation at real place");
  if (x.is_zero()) fail("ZeroElement", "valuation of zero");
  switch (x.field.kind) {
    case FieldDescriptor::Kind::Q:
      return vp_rat(x.x0, v.p);
    case FieldDescriptor::Kind::QSqrt: {
      switch (v.split) {
        case Place::Split::Split:
          return padic_of_quad(x, v.p, v.which).val;
        case Place::Split::Inert: {
          // v_P(x) = v_p(N(x)) / 2: the place is unramified with a Galois-
          // stable prime, so both conjugates share the valuation.  (The
          // naive min over coordinate valuations is wrong at p = 2 when the
          // maximal order contains half-integral elements.)
          Rat n = x.x0 * x.x0 - Rat(x.field.d) * x.x1 * x.x1;
          return vp_rat(n, v.p) / 2;
        }
        case Place::Split::Ramified: {
          Rat n = x.x0 * x.x0 - Rat(x.field.d) * x.x1 * x.x1;
          return vp_rat(n, v.p);  // v_P = v_p of the norm when e = 2, f = 1
        }
        default:
          fail("UnsupportedPlace", "unclassified place");
      }
    }
    default:
      fail("UnsupportedPlace", "function-field places use residue machinery");
  }
}

// exhaustive dyadic unit-square test in the non-split dyadic completion of
// Q(sqrt d): search y mod (a lattice containing P^3) with
// v_P(y^2 - u) >= 2 v_P(2) + 1 (then Hensel lifts the root).
static bool dyadic_unit_square_quad(const Element& u, const Place& v) {
  const Int d = u.field.d;
  bool inert = v.split == Place::Split::Inert;
  int need = inert ? 3 : 5;  // 2*v_P(2) + 1
  auto vP = [&](const Element& z) -> int {
    if (z.is_zero()) return 1000;
    Rat n = z.x0 * z.x0 - Rat(d) * z.x1 * z.x1;
    int vn = vp_rat(n, 2);
    return inert ? vn / 2 : vn;
  };
  // candidates: y = (y0 + y1 sqrt d)/2 over the maximal order (halves only
  // when d = 1 mod 4)
  bool halves = mod_pos(d, 4) == 1;
  for (int y0 = 0; y0 < 16; ++y0) {
    for (int y1 = 0; y1 < 16; ++y1) {
      if (y0 == 0 && y1 == 0) continue;
      if (halves && (y0 + y1) % 2 != 0) continue;
      Rat h = halves ? Rat(1, 2) : Rat(1);
      Element y = make_quad_elem(d, Rat(y0) * h, Rat(y1) * h);
      Element diff = sub(mul(y, y), u);
      if (vP(diff) >= need) return true;
    }
  }
  return false;
}

bool local_square(const Element& x, const Place& v) {
  if (x.is_zero()) fail("ZeroElement", "local square test of zero");
  if (v.type == Place::Type::Real) return real_sign(x, v) > 0;
  switch (x.field.kind) {
    case FieldDescriptor::Kind::Q: {
      PadicData pd = padic_of_rational(x.x0, v.p);
      if (pd.val % 2 != 0) return false;
      if (v.p == 2) return pd.unit_mod == 1;
      return legendre(pd.unit_mod, v.p) == 1;
    }
    case FieldDescriptor::Kind::QSqrt: {
      const Int d = x.field.d;
      switch (v.split) {
        case Place::Split::Split: {
          PadicData pd = padic_of_quad(x, v.p, v.which);
          if (pd.val % 2 != 0) return false;
          if (v.p == 2) return pd.unit_mod == 1;
          return legendre(pd.unit_mod, v.p) == 1;
        }
        case Place::Split::Inert: {
          int w = valuation(x, v);
          if (w % 2 != 0) return false;
          Rat scale = 1;
          for (int i = 0; i < std::abs(w); ++i) scale = w > 0 ? scale / Rat(v.p) : scale * Rat(v.p);
          Element u = mul(x, scale);
          if (v.p == 2) return dyadic_unit_square_quad(u, v);
          // unit is a square iff its norm to F_p is a QR
          Rat n = u.x0 * u.x0 - Rat(d) * u.x1 * u.x1;
          return legendre(rat_mod(n, v.p), v.p) == 1;
        }
        case Place::Split::Ramified: {
          int w = valuation(x, v);
          if (w % 2 != 0) return false;
          // divide by d^{w/2} = (sqrt d)^w times a unit square
          Rat scale = 1;
          for (int i = 0; i < std::abs(w) / 2; ++i) scale = w > 0 ? scale / Rat(d) : scale * Rat(d);
          Element u = mul(x, scale);
          if (v.p == 2) return dyadic_unit_square_quad(u, v);
          // odd ramified: unit square iff residue is a QR; residue = u.x0 mod p
          return legendre(rat_mod(u.x0, v.p), v.p) == 1;
        }
        default:
          fail("UnsupportedPlace", "unclassified place");
      }
    }
    default:
      fail("UnsupportedPlace", "local_square over Q(t)");
  }
}

// ---------------------------------------------------------------------------
// Hilbert symbols
// ---------------------------------------------------------------------------

// local symbol over Q_p from (valuation, unit) data
static int hilbert_from_padic(const PadicData& a, const PadicData& b, const Int& p) {
  int alpha = a.val, beta = b.val;
  if (p == 2) {
    auto eps = [](const Int& u) { return static_cast<int>(mod_pos((u - 1) / 2, 2)); };
    auto omega = [](const Int& u) { return static_cast<int>(mod_pos((u * u - 1) / 8, 2)); };
    int e = eps(a.unit_mod) * eps(b.unit_mod) + alpha * omega(b.unit_mod) +
            beta * omega(a.unit_mod);
    return e % 2 == 0 ? 1 : -1;
  }
  int epsp = static_cast<int>(mod_pos((p - 1) / 2, 2));
  int sign = (alpha * beta * epsp) % 2 == 0 ? 1 : -1;
  if (beta % 2 != 0) sign *= legendre(a.unit_mod, p);
  if (alpha % 2 != 0) sign *= legendre(b.unit_mod, p);
  return sign;
}

static int hilbert_q(const Element& a, const Element& b, const Place& v) {
  if (v.type == Place::Type::Real) return (a.x0 < 0 && b.x0 < 0) ? -1 : 1;
  return hilbert_from_padic(padic_of_rational(a.x0, v.p), padic_of_rational(b.x0, v.p), v.p);
}

static int hilbert_quad(const Element& a, const Element& b, const Place& v);

// product over all places other than v0 (used for the one non-split dyadic
// place of Q(sqrt d), where no simple closed formula is available)
static int hilbert_quad_by_reciprocity(const Element& a, const Element& b, const Place& v0) {
  int prod = 1;
  for (const Place& w : candidate_places(a.field, {a, b})) {
    if (w == v0) continue;
    prod *= hilbert_quad(a, b, w);
  }
  return prod;
}

static int hilbert_quad(const Element& a, const Element& b, const Place& v) {
  const Int d = a.field.d;
  if (v.type == Place::Type::Real)
    return (real_sign(a, v) < 0 && real_sign(b, v) < 0) ? -1 : 1;
  switch (v.split) {
    case Place::Split::Split:
      return hilbert_from_padic(padic_of_quad(a, v.p, v.which),
                                padic_of_quad(b, v.p, v.which), v.p);
    case Place::Split::Inert: {
      if (v.p == 2) return hilbert_quad_by_reciprocity(a, b, v);
      int m = valuation(a, v), n = valuation(b, v);
      // tame symbol: (-1)^{mn} a^n b^{-m}, reduced to F_{p^2}; square there
      // iff its norm to F_p is a QR
      Element t = mul(elem_pow(a, n), elem_pow(inverse(b), m));
      if ((m * n) % 2 != 0) t = neg(t);
      Rat nrm = t.x0 * t.x0 - Rat(d) * t.x1 * t.x1;
      return legendre(rat_mod(nrm, v.p), v.p);
    }
    case Place::Split::Ramified: {
      if (v.p == 2) return hilbert_quad_by_reciprocity(a, b, v);
      int m = valuation(a, v), n = valuation(b, v);
      Element t = mul(elem_pow(a, n), elem_pow(inverse(b), m));
      if ((m * n) % 2 != 0) t = neg(t);
      // residue field F_p; v_P(t) = 0 forces t.x0 to be the unit residue
      return legendre(rat_mod(t.x0, v.p), v.p);
    }
    default:
      fail("UnsupportedPlace", "unclassified place");
  }
}

int hilbert_symbol(const Element& a, const Element& b, const Place& v) {
  if (a.field != b.field) fail("FieldMismatch", "hilbert_symbol");
  if (a.is_zero() || b.is_zero()) fail("ZeroElement", "hilbert_symbol of zero");
  switch (a.field.kind) {
    case FieldDescriptor::Kind::Q:
      return hilbert_q(a, b, v);
    case FieldDescriptor::Kind::QSqrt:
      return hilbert_quad(a, b, v);
    default:
      fail("UnsupportedPlace", "hilbert_symbol over Q(t): use residue machinery");
  }
}

}  // namespace wittlab
