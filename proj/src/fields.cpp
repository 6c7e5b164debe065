#include "wittlab/fields.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include <boost/multiprecision/miller_rabin.hpp>

namespace wittlab {

// ---------------------------------------------------------------------------
// FieldDescriptor
// ---------------------------------------------------------------------------

FieldDescriptor FieldDescriptor::quad(const Int& d) {
  if (d == 0 || d == 1) fail("BadField", "d must be a nonzero squarefree integer != 1");
  Int n = d < 0 ? -d : d;
  for (Int q = 2; q * q <= n; ++q) {
    if (n % (q * q) == 0) fail("BadField", "d must be squarefree");
    while (n % q == 0) n /= q;
  }
  return {Kind::QSqrt, d};
}

std::string FieldDescriptor::str() const {
  switch (kind) {
    case Kind::Q: return "Q";
    case Kind::QSqrt: return "Q(sqrt " + d.str() + ")";
    case Kind::Qt: return "Q(t)";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Poly
// ---------------------------------------------------------------------------

Rat Poly::eval(const Rat& t0) const {
  if (deg == 1) return t0 + c0;
  return t0 * t0 + c1 * t0 + c0;
}

std::string Poly::str() const {
  auto term = [](const Rat& c, const std::string& mon) -> std::string {
    if (c == 0) return "";
    std::ostringstream os;
    if (c > 0) os << "+";
    if ((c != 1 && c != -1) || mon.empty()) {
      os << c;
      if (!mon.empty()) os << "*";
    } else if (c == -1) {
      os << "-";
    }
    os << mon;
    return os.str();
  };
  std::string s = deg == 1 ? "t" : "t^2";
  if (deg == 2) s += term(c1, "t");
  s += term(c0, "");
  if (!s.empty() && s[0] == '+') s = s.substr(0);
  return s;
}

// ---------------------------------------------------------------------------
// Element basics
// ---------------------------------------------------------------------------

bool Element::is_zero() const { return x0 == 0 && x1 == 0; }

bool Element::is_rational_constant() const {
  if (field.kind == FieldDescriptor::Kind::QSqrt) return x1 == 0;
  if (field.kind == FieldDescriptor::Kind::Qt) {
    for (const auto& [p, e] : polys)
      if (e != 0) return false;
    return true;
  }
  return true;
}

std::string Element::str() const {
  std::ostringstream os;
  switch (field.kind) {
    case FieldDescriptor::Kind::Q:
      os << x0;
      break;
    case FieldDescriptor::Kind::QSqrt:
      if (x1 == 0) {
        os << x0;
      } else {
        if (x0 != 0) os << x0 << (x1 > 0 ? "+" : "");
        if (x1 == 1) {
          os << "s";
        } else if (x1 == -1) {
          os << "-s";
        } else {
          os << x1 << "*s";
        }
      }
      break;
    case FieldDescriptor::Kind::Qt: {
      bool first = true;
      if (x0 != 1 || polys.empty()) {
        if (den(x0) == 1) {
          os << x0;
        } else {
          os << "(" << x0 << ")";
        }
        first = false;
      }
      for (const auto& [p, e] : polys) {
        if (e == 0) continue;
        if (!first) os << "*";
        first = false;
        os << "(" << p.str() << ")";
        if (e != 1) os << "^" << e;
      }
      break;
    }
  }
  return os.str();
}

Element make_elem(const FieldDescriptor& F, const Rat& value) {
  Element e;
  e.field = F;
  e.x0 = value;
  return e;
}

Element make_quad_elem(const Int& d, const Rat& x0, const Rat& x1) {
  Element e;
  e.field = FieldDescriptor::quad(d);
  e.x0 = x0;
  e.x1 = x1;
  return e;
}

Element elem_t() {
  Element e;
  e.field = FieldDescriptor::rational_function();
  e.x0 = 1;
  e.polys[Poly::linear(0)] = 1;
  return e;
}

Element elem_poly(const Poly& p) {
  Element e;
  e.field = FieldDescriptor::rational_function();
  e.x0 = 1;
  e.polys[p] = 1;
  return e;
}

static void check_same_field(const Element& a, const Element& b) {
  if (a.field != b.field) fail("FieldMismatch", "elements live in different fields");
}

static void prune(Element& a) {
  for (auto it = a.polys.begin(); it != a.polys.end();) {
    if (it->second == 0) {
      it = a.polys.erase(it);
    } else {
      ++it;
    }
  }
  if (a.is_zero()) a.polys.clear();
}

Element neg(const Element& a) {
  Element r = a;
  r.x0 = -r.x0;
  r.x1 = -r.x1;
  return r;
}

Element mul(const Element& a, const Element& b) {
  check_same_field(a, b);
  Element r;
  r.field = a.field;
  switch (a.field.kind) {
    case FieldDescriptor::Kind::Q:
      r.x0 = a.x0 * b.x0;
      break;
    case FieldDescriptor::Kind::QSqrt:
      r.x0 = a.x0 * b.x0 + Rat(a.field.d) * a.x1 * b.x1;
      r.x1 = a.x0 * b.x1 + a.x1 * b.x0;
      break;
    case FieldDescriptor::Kind::Qt:
      r.x0 = a.x0 * b.x0;
      r.polys = a.polys;
      for (const auto& [p, e] : b.polys) r.polys[p] += e;
      prune(r);
      break;
  }
  return r;
}

Element mul(const Element& a, const Rat& c) {
  Element r = a;
  r.x0 *= c;
  r.x1 *= c;
  if (r.is_zero()) r.polys.clear();
  return r;
}

Element inverse(const Element& a) {
  if (a.is_zero()) fail("ZeroElement", "division by zero");
  Element r;
  r.field = a.field;
  switch (a.field.kind) {
    case FieldDescriptor::Kind::Q:
      r.x0 = Rat(1) / a.x0;
      break;
    case FieldDescriptor::Kind::QSqrt: {
      Rat n = a.x0 * a.x0 - Rat(a.field.d) * a.x1 * a.x1;
      r.x0 = a.x0 / n;
      r.x1 = -a.x1 / n;
      break;
    }
    case FieldDescriptor::Kind::Qt:
      r.x0 = Rat(1) / a.x0;
      for (const auto& [p, e] : a.polys) r.polys[p] = -e;
      break;
  }
  return r;
}

Element divide(const Element& a, const Element& b) { return mul(a, inverse(b)); }

Element conj(const Element& a) {
  Element r = a;
  r.x1 = -r.x1;
  return r;
}

Element elem_pow(const Element& a, int e) {
  if (e == 0) return make_elem(a.field, 1);
  Element base = e > 0 ? a : inverse(a);
  int n = e > 0 ? e : -e;
  Element r = make_elem(a.field, 1);
  for (int i = 0; i < n; ++i) r = mul(r, base);
  return r;
}

bool elem_equal(const Element& a, const Element& b) {
  if (a.field != b.field) return false;
  if (a.field.kind != FieldDescriptor::Kind::Qt)
    return a.x0 == b.x0 && a.x1 == b.x1;
  if (a.x0 != b.x0) return false;
  // compare pruned factor multisets
  Element x = a, y = b;
  prune(x);
  prune(y);
  return x.polys == y.polys;
}

Element evaluate_at(const Element& a, const Rat& t0) {
  if (a.field.kind != FieldDescriptor::Kind::Qt)
    fail("UnsupportedField", "evaluate_at needs a Q(t) element");
  Rat v = a.x0;
  for (const auto& [p, e] : a.polys) {
    Rat pv = p.eval(t0);
    if (pv == 0) fail("BadSpecialization", "t0 hits a zero of a factor");
    if (e >= 0) {
      for (int i = 0; i < e; ++i) v *= pv;
    } else {
      for (int i = 0; i < -e; ++i) v /= pv;
    }
  }
  return make_elem(FieldDescriptor::rationals(), v);
}

// ---------------------------------------------------------------------------
// Dense polynomial helpers and factorization over Q
// ---------------------------------------------------------------------------

static DensePoly dp_trim(DensePoly p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
  return p;
}

static DensePoly dp_mul(const DensePoly& a, const DensePoly& b) {
  if (a.empty() || b.empty()) return {};
  DensePoly r(a.size() + b.size() - 1, Rat(0));
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return dp_trim(r);
}

static DensePoly dp_add(const DensePoly& a, const DensePoly& b) {
  DensePoly r(std::max(a.size(), b.size()), Rat(0));
  for (size_t i = 0; i < a.size(); ++i) r[i] += a[i];
  for (size_t i = 0; i < b.size(); ++i) r[i] += b[i];
  return dp_trim(r);
}

// divide a by (t - root); caller guarantees root is a root
static DensePoly dp_deflate(const DensePoly& a, const Rat& root) {
  DensePoly q(a.size() - 1, Rat(0));
  Rat acc = a.back();
  for (size_t i = a.size() - 1; i-- > 0;) {
    q[i] = acc;
    acc = a[i] + acc * root;
  }
  return q;
}

static Rat dp_eval(const DensePoly& a, const Rat& x) {
  Rat v = 0;
  for (size_t i = a.size(); i-- > 0;) v = v * x + a[i];
  return v;
}

static bool rat_is_square(const Rat& r, Rat* root = nullptr) {
  if (r < 0) return false;
  if (r == 0) {
    if (root) *root = 0;
    return true;
  }
  Int n = num(r), d = den(r);
  Int sn = boost::multiprecision::sqrt(n), sd = boost::multiprecision::sqrt(d);
  if (sn * sn != n || sd * sd != d) return false;
  if (root) *root = Rat(sn, sd);
  return true;
}

std::pair<Rat, std::map<Poly, int>> factor_poly(const DensePoly& input) {
  DensePoly p = dp_trim(input);
  if (p.empty()) fail("ZeroElement", "cannot factor the zero polynomial");
  std::map<Poly, int> factors;
  Rat content = p.back();
  for (auto& c : p) c /= content;
  // peel rational roots (candidates from the integer model of the monic poly)
  while (p.size() > 1) {
    if (p.size() == 2) {  // t + c0
      factors[Poly{1, 0, p[0]}] += 1;
      p = {Rat(1)};
      break;
    }
    if (p.size() == 3) {  // t^2 + c1 t + c0
      Rat c1 = p[1], c0 = p[0];
      Rat disc = c1 * c1 - 4 * c0, sq;
      if (rat_is_square(disc, &sq)) {
        Rat r1 = (-c1 + sq) / 2, r2 = (-c1 - sq) / 2;
        factors[Poly::linear(r1)] += 1;
        factors[Poly::linear(r2)] += 1;
      } else {
        factors[Poly{2, c1, c0}] += 1;
      }
      p = {Rat(1)};
      break;
    }
    // degree >= 3: find a rational root or give up
    Int dlcm = 1;
    for (const auto& c : p) dlcm = boost::multiprecision::lcm(dlcm, den(c));
    std::vector<Int> ip;
    for (const auto& c : p) ip.push_back(num(c) * (dlcm / den(c)));
    Int a0 = ip.front(), an = ip.back();
    bool found = false;
    if (a0 == 0) {
      factors[Poly::linear(0)] += 1;
      p = dp_deflate(p, 0);
      found = true;
    } else {
      auto fa0 = factor_int(boost::multiprecision::abs(a0));
      auto fan = factor_int(boost::multiprecision::abs(an));
      std::vector<Int> divs0{1}, divsn{1};
      auto expand = [](const std::map<Int, int>& f, std::vector<Int>& out) {
        for (const auto& [q, e] : f) {
          size_t sz = out.size();
          Int qe = 1;
          for (int i = 0; i < e; ++i) {
            qe *= q;
            for (size_t j = 0; j < sz; ++j) out.push_back(out[j] * qe);
          }
        }
      };
      expand(fa0, divs0);
      expand(fan, divsn);
      for (const Int& r : divs0) {
        for (const Int& s : divsn) {
          for (int sg : {1, -1}) {
            Rat cand(sg * r, s);
            if (dp_eval(p, cand) == 0) {
              factors[Poly::linear(cand)] += 1;
              p = dp_deflate(p, cand);
              found = true;
              break;
            }
          }
          if (found) break;
        }
        if (found) break;
      }
    }
    if (!found)
      fail("UnsupportedSupport",
           "polynomial has an irreducible factor of degree > 2");
  }
  return {content, factors};
}

Element add(const Element& a, const Element& b) {
  check_same_field(a, b);
  Element r;
  r.field = a.field;
  switch (a.field.kind) {
    case FieldDescriptor::Kind::Q:
    case FieldDescriptor::Kind::QSqrt:
      r.x0 = a.x0 + b.x0;
      r.x1 = a.x1 + b.x1;
      return r;
    case FieldDescriptor::Kind::Qt:
      break;
  }
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  // Bring to a common denominator of polynomial factors, expand numerators,
  // add, and re-factor.  Negative exponents land in the common denominator.
  std::map<Poly, int> denom;
  auto add_denom = [&](const std::map<Poly, int>& polys) {
    for (const auto& [p, e] : polys)
      if (e < 0) denom[p] = std::max(denom[p], -e);
  };
  add_denom(a.polys);
  add_denom(b.polys);
  auto numer_dense = [&](const Element& x) {
    DensePoly acc{x.x0};
    for (const auto& [p, e] : x.polys) {
      DensePoly pp = p.deg == 1 ? DensePoly{p.c0, Rat(1)} : DensePoly{p.c0, p.c1, Rat(1)};
      int tot = e + (denom.count(p) ? denom.at(p) : 0);
      for (int i = 0; i < tot; ++i) acc = dp_mul(acc, pp);
    }
    for (const auto& [p, m] : denom) {
      if (x.polys.count(p)) continue;
      DensePoly pp = p.deg == 1 ? DensePoly{p.c0, Rat(1)} : DensePoly{p.c0, p.c1, Rat(1)};
      for (int i = 0; i < m; ++i) acc = dp_mul(acc, pp);
    }
    return acc;
  };
  DensePoly sum = dp_add(numer_dense(a), numer_dense(b));
  sum = dp_trim(sum);
  if (sum.empty()) return make_elem(a.field, 0);
  auto [content, fs] = factor_poly(sum);
  r.x0 = content;
  r.polys = fs;
  for (const auto& [p, m] : denom) r.polys[p] -= m;
  prune(r);
  return r;
}

Element sub(const Element& a, const Element& b) { return add(a, neg(b)); }

// ---------------------------------------------------------------------------
// Integer factorization
// ---------------------------------------------------------------------------

bool is_prime_int(const Int& n) {
  if (n < 2) return false;
  for (Int q : {Int(2), Int(3), Int(5), Int(7), Int(11), Int(13)}) {
    if (n == q) return true;
    if (n % q == 0) return false;
  }
  return boost::multiprecision::miller_rabin_test(n, 32);
}

static Int pollard_rho(const Int& n) {
  // Brent-style rho; n composite, odd, not a prime power of small primes.
  Int x = 2, y = 2, d = 1, c = 1;
  while (true) {
    x = 2;
    y = 2;
    d = 1;
    while (d == 1) {
      x = (x * x + c) % n;
      y = (y * y + c) % n;
      y = (y * y + c) % n;
      Int diff = x > y ? x - y : y - x;
      if (diff == 0) break;
      d = boost::multiprecision::gcd(diff, n);
    }
    if (d != 0 && d != 1 && d != n) return d;
    ++c;
  }
}

std::map<Int, int> factor_int(Int n) {
  if (n <= 0) fail("ZeroElement", "factor_int requires a positive integer");
  std::map<Int, int> out;
  for (Int q = 2; q * q <= n && q < 100000; q == 2 ? q = 3 : q += 2) {
    while (n % q == 0) {
      out[q]++;
      n /= q;
    }
  }
  // remaining cofactor: prime, prime square, or cracked by rho
  std::vector<Int> stack;
  if (n > 1) stack.push_back(n);
  while (!stack.empty()) {
    Int m = stack.back();
    stack.pop_back();
    if (m == 1) continue;
    if (is_prime_int(m)) {
      out[m]++;
      continue;
    }
    Int s = boost::multiprecision::sqrt(m);
    if (s * s == m) {
      stack.push_back(s);
      stack.push_back(s);
      continue;
    }
    Int f = pollard_rho(m);
    stack.push_back(f);
    stack.push_back(m / f);
  }
  return out;
}

Int squarefree_part(const Rat& r) {
  if (r == 0) fail("ZeroElement", "squarefree part of zero");
  Int n = num(r) * den(r);  // same square class as r
  int sign = n < 0 ? -1 : 1;
  auto f = factor_int(boost::multiprecision::abs(n));
  Int out = sign;
  for (const auto& [q, e] : f)
    if (e % 2 == 1) out *= q;
  return out;
}

// ---------------------------------------------------------------------------
// Square classes
// ---------------------------------------------------------------------------

bool is_square(const Element& x) {
  if (x.is_zero()) fail("ZeroElement", "square test of zero");
  switch (x.field.kind) {
    case FieldDescriptor::Kind::Q:
      return rat_is_square(x.x0);
    case FieldDescriptor::Kind::Qt: {
      for (const auto& [p, e] : x.polys)
        if (e % 2 != 0) return false;
      return rat_is_square(x.x0);
    }
    case FieldDescriptor::Kind::QSqrt: {
      // z is a square in Q(sqrt d) iff N(z) = w^2 for some rational w and
      // (z.x0 + w)/2 is a square or (z.x0 + w)/(2d) is a square (either sign of w).
      Rat n = x.x0 * x.x0 - Rat(x.field.d) * x.x1 * x.x1;
      Rat w;
      if (!rat_is_square(n, &w)) return false;
      for (int sgn : {1, -1}) {
        Rat ww = w * Rat(sgn);
        Rat p = (x.x0 + ww) / 2;
        if (p != 0 && rat_is_square(p)) {
          // z = (u + v sqrt d)^2 with u^2 = p, v = x1/(2u); verify
          Rat u;
          rat_is_square(p, &u);
          if (u != 0) {
            Rat v = x.x1 / (2 * u);
            if (u * u + Rat(x.field.d) * v * v == x.x0 && 2 * u * v == x.x1) return true;
          }
        }
        Rat q = (x.x0 + ww) / (2 * Rat(x.field.d));
        if (q != 0 && rat_is_square(q)) {
          Rat v;
          rat_is_square(q, &v);
          if (v != 0) {
            Rat u = x.x1 / (2 * v);
            if (u * u + Rat(x.field.d) * v * v == x.x0 && 2 * u * v == x.x1) return true;
          }
        }
      }
      // rational z: z or z*d a rational square
      if (x.x1 == 0)
        return rat_is_square(x.x0) || rat_is_square(x.x0 * Rat(x.field.d));
      return false;
    }
  }
  return false;
}

Element square_class(const Element& x) {
  if (x.is_zero()) fail("ZeroElement", "square class of zero");
  switch (x.field.kind) {
    case FieldDescriptor::Kind::Q:
      return make_elem(x.field, Rat(squarefree_part(x.x0)));
    case FieldDescriptor::Kind::Qt: {
      Element r;
      r.field = x.field;
      r.x0 = Rat(squarefree_part(x.x0));
      for (const auto& [p, e] : x.polys)
        if (e % 2 != 0) r.polys[p] = 1;
      return r;
    }
    case FieldDescriptor::Kind::QSqrt: {
      // designated reduced form: scale by a rational square so that the
      // coordinates are coprime integers (with x1 >= 0 preferred normalization
      // not enforced: classes are compared via is_square).
      Element r = x;
      Int l = boost::multiprecision::lcm(den(x.x0), den(x.x1));
      r.x0 *= Rat(l * l);
      r.x1 *= Rat(l * l);
      Int g = boost::multiprecision::gcd(num(r.x0), num(r.x1));
      if (g > 1) {
        Int t = 1;
        for (const auto& [q, e] : factor_int(g))
          for (int i = 0; i + 1 < e; i += 2) t *= q;  // largest t with t^2 | g
        if (t > 1) {
          r.x0 /= Rat(t * t);
          r.x1 /= Rat(t * t);
        }
      }
      if (r.x1 == 0) r.x0 = Rat(squarefree_part(r.x0));
      return r;
    }
  }
  fail("UnsupportedField", "square_class");
}

bool same_square_class(const Element& x, const Element& y) {
  if (x.field != y.field) return false;
  return is_square(mul(x, y));
}

// ---------------------------------------------------------------------------
// Quadratic extensions over Q
// ---------------------------------------------------------------------------

QuadExtension QuadExtension::over_q(const Int& d) {
  QuadExtension K;
  K.base = FieldDescriptor::rationals();
  K.d = FieldDescriptor::quad(d).d;
  return K;
}

FieldDescriptor QuadExtension::ext_field() const { return FieldDescriptor::quad(d); }

Element qe_norm(const QuadExtension& K, const Element& x) {
  if (x.field != K.ext_field()) fail("FieldMismatch", "norm argument not in K");
  return make_elem(K.base, x.x0 * x.x0 - Rat(K.d) * x.x1 * x.x1);
}

Element qe_conj(const QuadExtension& K, const Element& x) {
  if (x.field != K.ext_field()) fail("FieldMismatch", "conj argument not in K");
  return conj(x);
}

Element qe_s(const QuadExtension& K, const Element& x) {
  if (x.field != K.ext_field()) fail("FieldMismatch", "s argument not in K");
  return make_elem(K.base, x.x1);
}

Element qe_embed(const QuadExtension& K, const Element& x) {
  if (x.field != K.base) fail("FieldMismatch", "embed argument not in base");
  return make_quad_elem(K.d, x.x0, 0);
}

// ---------------------------------------------------------------------------
// Parser for the scalar grammar
// ---------------------------------------------------------------------------

namespace {

struct Parser {
  const FieldDescriptor& F;
  const std::string& s;
  size_t i = 0;

  void skip() {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  }
  bool eat(char c) {
    skip();
    if (i < s.size() && s[i] == c) {
      ++i;
      return true;
    }
    return false;
  }
  char peek() {
    skip();
    return i < s.size() ? s[i] : '\0';
  }

  Element parse_expr() {
    Element v = parse_term();
    while (true) {
      if (eat('+')) {
        v = add(v, parse_term());
      } else if (eat('-')) {
        v = sub(v, parse_term());
      } else {
        return v;
      }
    }
  }

  Element parse_term() {
    Element v = parse_factor();
    while (true) {
      if (eat('*')) {
        v = mul(v, parse_factor());
      } else if (eat('/')) {
        v = divide(v, parse_factor());
      } else {
        return v;
      }
    }
  }

  Element parse_factor() {
    Element v = parse_atom();
    if (eat('^')) {
      bool negexp = eat('-');
      Int e = parse_int();
      int ei = static_cast<int>(e);
      if (v.field.kind == FieldDescriptor::Kind::Qt) {
        v = elem_pow(v, negexp ? -ei : ei);
      } else {
        v = elem_pow(v, negexp ? -ei : ei);
      }
    }
    return v;
  }

  Int parse_int() {
    skip();
    size_t start = i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
    if (start == i) fail("SchemaError", "expected integer in scalar at offset " + std::to_string(i));
    return Int(s.substr(start, i - start));
  }

  Element parse_atom() {
    skip();
    if (eat('-')) return neg(parse_atom());
    if (eat('+')) return parse_atom();
    if (eat('(')) {
      Element v = parse_expr();
      if (!eat(')')) fail("SchemaError", "missing ')' in scalar");
      return v;
    }
    if (peek() == 't') {
      ++i;
      if (F.kind != FieldDescriptor::Kind::Qt)
        fail("SchemaError", "'t' only allowed over Q(t)");
      return elem_t();
    }
    if (peek() == 's') {
      ++i;
      if (F.kind != FieldDescriptor::Kind::QSqrt)
        fail("SchemaError", "'s' only allowed over a quadratic field");
      return make_quad_elem(F.d, 0, 1);
    }
    Int n = parse_int();
    return make_elem(F, Rat(n));
  }
};

}  // namespace

Element parse_element(const FieldDescriptor& F, const std::string& text) {
  Parser p{F, text};
  Element v = p.parse_expr();
  p.skip();
  if (p.i != text.size()) fail("SchemaError", "trailing characters in scalar: " + text);
  return v;
}

}  // namespace wittlab
