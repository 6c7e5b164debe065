#include "wittlab/cli.hpp"

#include <string>
#include <vector>

namespace wittlab::cli {

namespace {

[[noreturn]] void schema(const std::string& at, const std::string& msg) {
  fail("SchemaError", at + ": " + msg);
}

const Json& expect_object(const Json& j, const std::string& at) {
  if (!j.is_object()) schema(at, "expected an object");
  return j;
}

const Json& expect_member(const Json& j, const char* key, const std::string& at) {
  expect_object(j, at);
  auto it = j.find(key);
  if (it == j.end()) schema(at + "/" + key, "missing");
  return *it;
}

std::string expect_string(const Json& j, const std::string& at) {
  if (!j.is_string()) schema(at, "expected a string");
  return j.get<std::string>();
}

Int expect_int(const Json& j, const std::string& at) {
  if (j.is_number_integer()) return Int(j.get<long long>());
  if (j.is_string()) {
    try {
      return Int(j.get<std::string>());
    } catch (const std::exception&) {
      schema(at, "not an integer");
    }
  }
  schema(at, "expected an integer");
}

}  // namespace

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

FieldDescriptor parse_field(const Json& j, const std::string& at) {
  std::string name = expect_string(expect_member(j, "field", at), at + "/field");
  if (name == "Q") return FieldDescriptor::rationals();
  if (name == "Q(t)") return FieldDescriptor::rational_function();
  if (name == "Q(sqrt)") {
    Int d = expect_int(expect_member(j, "d", at), at + "/d");
    if (d == 0 || d == 1) schema(at + "/d", "d must define a quadratic field");
    return FieldDescriptor::quad(d);
  }
  schema(at + "/field", "unknown field '" + name + "'");
}

Element parse_scalar(const FieldDescriptor& F, const Json& j, const std::string& at) {
  Element x;
  if (j.is_number_integer())
    x = make_elem(F, Rat(Int(j.get<long long>())));
  else if (j.is_string()) {
    try {
      x = parse_element(F, j.get<std::string>());
    } catch (const Error& e) {
      schema(at, e.what());
    }
  } else
    schema(at, "expected a scalar (string or integer)");
  if (x.is_zero()) schema(at, "zero entry rejected");
  return x;
}

QuadraticForm parse_qform(const Json& j, const std::string& at) {
  FieldDescriptor F = parse_field(expect_member(j, "field", at), at + "/field");
  const Json& d = expect_member(j, "diag", at);
  if (!d.is_array() || d.empty()) schema(at + "/diag", "expected a nonempty array");
  std::vector<Element> diag;
  for (std::size_t i = 0; i < d.size(); ++i)
    diag.push_back(parse_scalar(F, d[i], at + "/diag/" + std::to_string(i)));
  return make_form(F, std::move(diag));
}

SkewHermitianForm parse_herm(const Json& j, const std::string& at) {
  FieldDescriptor F = FieldDescriptor::rationals();
  if (j.is_object() && j.contains("field"))
    F = parse_field(j["field"], at + "/field");
  const Json& q = expect_member(j, "quat", at);
  QuaternionAlgebra alg = make_quaternion_algebra(
      parse_scalar(F, expect_member(q, "a", at + "/quat"), at + "/quat/a"),
      parse_scalar(F, expect_member(q, "b", at + "/quat"), at + "/quat/b"));
  const Json& d = expect_member(j, "diag", at);
  if (!d.is_array() || d.empty()) schema(at + "/diag", "expected a nonempty array");
  std::vector<PureQuaternion> diag;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const std::string here = at + "/diag/" + std::to_string(i);
    if (!d[i].is_array() || d[i].size() != 3)
      schema(here, "expected pure-quaternion coordinates [i, j, k]");
    Element c[3];
    for (int k = 0; k < 3; ++k) {
      const Json& e = d[i][static_cast<std::size_t>(k)];
      const std::string leaf = here + "/" + std::to_string(k);
      if (e.is_number_integer())
        c[k] = make_elem(F, Rat(Int(e.get<long long>())));
      else if (e.is_string()) {
        try {
          c[k] = parse_element(F, e.get<std::string>());
        } catch (const Error& err) {
          schema(leaf, err.what());
        }
      } else
        schema(leaf, "expected a scalar (string or integer)");
    }
    PureQuaternion p = make_pure(c[0], c[1], c[2]);
    if (p.is_zero()) schema(here, "zero entry rejected");
    diag.push_back(p);
  }
  return make_herm(alg, std::move(diag));
}

Involution12 parse_inv12(const Json& j, const std::string& at) {
  expect_object(j, at);
  if (j.contains("quat")) return involution_index2(parse_herm(j, at));
  return involution_split(parse_qform(j, at));
}

Involution8 parse_inv8(const Json& j, const std::string& at) {
  expect_object(j, at);
  if (j.contains("quat")) return involution8_index2(parse_herm(j, at));
  return involution8_split(parse_qform(j, at));
}

H3Class parse_h3(const FieldDescriptor& F, const Json& j, const std::string& at) {
  const Json& terms = expect_member(j, "h3", at);
  if (!terms.is_array()) schema(at + "/h3", "expected an array");
  H3Class out = h3_zero_class(F);
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const std::string here = at + "/h3/" + std::to_string(i);
    const Json& term = terms[i];
    expect_object(term, here);
    if (term.contains("sym")) {
      const Json& s = term["sym"];
      if (!s.is_array() || s.size() != 3) schema(here + "/sym", "expected [a, b, c]");
      out = h3_add(out, h3_symbol(parse_scalar(F, s[0], here + "/sym/0"),
                                  parse_scalar(F, s[1], here + "/sym/1"),
                                  parse_scalar(F, s[2], here + "/sym/2")));
    } else if (term.contains("cores")) {
      if (F != FieldDescriptor::rationals())
        schema(here + "/cores", "corestriction terms need base field Q");
      const Json& c = term["cores"];
      Int d = expect_int(expect_member(expect_member(c, "K", here + "/cores"), "d",
                                       here + "/cores/K"),
                         here + "/cores/K/d");
      QuadExtension K = QuadExtension::over_q(d);
      FieldDescriptor Kf = K.ext_field();
      Element mu = parse_scalar(Kf, expect_member(c, "mu", here + "/cores"),
                                here + "/cores/mu");
      const Json& s = expect_member(c, "sym", here + "/cores");
      if (!s.is_array() || s.size() != 2)
        schema(here + "/cores/sym", "expected [a, b]");
      BrauerClass2 cls = brauer_symbol(parse_scalar(Kf, s[0], here + "/cores/sym/0"),
                                       parse_scalar(Kf, s[1], here + "/cores/sym/1"));
      out = h3_add(out, corestriction(K, mu, cls));
    } else
      schema(here, "expected a 'sym' or 'cores' term");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

Json field_json(const FieldDescriptor& F) {
  switch (F.kind) {
    case FieldDescriptor::Kind::Q: return Json{{"field", "Q"}};
    case FieldDescriptor::Kind::Qt: return Json{{"field", "Q(t)"}};
    case FieldDescriptor::Kind::QSqrt: break;
  }
  return Json{{"field", "Q(sqrt)"}, {"d", F.d.str()}};
}

Json qform_json(const QuadraticForm& q) {
  Json diag = Json::array();
  for (const Element& x : q.diag) diag.push_back(x.str());
  return Json{{"field", field_json(q.field)}, {"diag", diag}};
}

Json herm_json(const SkewHermitianForm& h) {
  Json diag = Json::array();
  for (const PureQuaternion& p : h.diag)
    diag.push_back(Json::array({p.xi.str(), p.xj.str(), p.xk.str()}));
  return Json{{"field", field_json(h.alg.field)},
              {"quat", Json{{"a", h.alg.a.str()}, {"b", h.alg.b.str()}}},
              {"diag", diag}};
}

Json brauer_json(const BrauerClass2& x) {
  Json syms = Json::array();
  for (const Symbol2& s : x.symbols) syms.push_back(Json::array({s.a.str(), s.b.str()}));
  Json out{{"symbols", syms}, {"zero", brauer_is_zero(x)}};
  if (x.symbols.empty() && !out["zero"].get<bool>()) out["rep"] = qform_json(x.rep);
  return out;
}

Json h3_json(const H3Class& x) {
  Json terms = Json::array();
  for (const Symbol3& s : x.symbols)
    terms.push_back(Json{{"sym", Json::array({s.a.str(), s.b.str(), s.c.str()})}});
  for (const CoresTerm& c : x.cores) {
    Json syms = Json::array();
    for (const Symbol2& s : c.symbols_k)
      syms.push_back(Json::array({s.a.str(), s.b.str()}));
    terms.push_back(Json{{"cores", Json{{"K", Json{{"d", c.K.d.str()}}},
                                        {"mu", c.mu.str()},
                                        {"symbols", syms}}}});
  }
  Json out{{"h3", terms}};
  if (terms.empty()) out["rep"] = qform_json(x.rep);
  return out;
}

Json mod_json(const ModClass& x) {
  Json mods = Json::array();
  for (const BrauerClass2& u : x.modulus.classes) mods.push_back(brauer_json(u));
  return Json{{"value", h3_json(x.value)}, {"modulus", mods}};
}

// ---------------------------------------------------------------------------
// Command implementations
// ---------------------------------------------------------------------------

namespace {

Json group_json(const QuaternionicSubgroup& u) {
  Json elems = Json::array();
  for (const BrauerClass2& x : u.elements) elems.push_back(brauer_json(x));
  return Json{{"order", u.order()},
              {"quaternionic", u.quaternionic},
              {"elements", elems}};
}

// residue table of a nonzero H^3 class over Q(t): the certificate used by all
// f3 != 0 claims
Json residue_certificate(const H3Class& x) {
  Json rows = Json::array();
  for (const Poly& pi : residue_support(x.rep)) {
    BrauerClass2 r = h3_residue(x, pi);
    if (!brauer_is_zero(r))
      rows.push_back(Json{{"pi", pi.str()}, {"residue", brauer_json(r)}});
  }
  return Json{{"type", "residue-table"}, {"rows", rows}};
}

const char* mod_status_str(ModResult::Status s) {
  switch (s) {
    case ModResult::Status::Equal: return "equal";
    case ModResult::Status::NotEqual: return "not-equal";
    case ModResult::Status::Unknown: return "unknown";
  }
  return "unknown";
}

std::vector<BrauerClass2> parse_gens(const FieldDescriptor& F, const Json& payload,
                                     const std::string& at) {
  const Json& g = expect_member(payload, "gens", at);
  if (!g.is_array()) schema(at + "/gens", "expected an array of symbol pairs");
  std::vector<BrauerClass2> gens;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const std::string here = at + "/gens/" + std::to_string(i);
    if (!g[i].is_array() || g[i].size() != 2) schema(here, "expected [a, b]");
    gens.push_back(brauer_symbol(parse_scalar(F, g[i][0], here + "/0"),
                                 parse_scalar(F, g[i][1], here + "/1")));
  }
  return gens;
}

void run_qform(const std::string& verb, const Json& payload, Json& result,
               Json& certs) {
  QuadraticForm q = parse_qform(payload, "/payload");
  const FieldDescriptor& F = q.field;
  if (verb == "invariants") {
    result["dim"] = q.dim();
    result["e1"] = e1(q).str();
    bool i2 = in_fundamental_power(q, 2);
    result["in_i2"] = i2;
    bool i3 = i2 && in_fundamental_power(q, 3);
    result["in_i3"] = i3;
    if (i3) {
      bool z = in_fundamental_power(q, 4);
      result["e3_zero"] = z;
      if (!z && F.is_number_field()) {
        for (const Place& v : real_places(F)) {
          int s = signature(q, v);
          if (s % 16 != 0)
            certs.push_back(Json{{"type", "signature"},
                                 {"place", v.str()},
                                 {"value", s}});
        }
      }
      if (!z && !F.is_number_field()) certs.push_back(residue_certificate(e3(q)));
    }
  } else if (verb == "isotropy") {
    result["hyperbolic"] = witt_is_zero(q);
    if (F.is_number_field()) {
      result["isotropic"] = isotropic(q);
      result["witt_index"] = witt_decompose(q).witt_index();
    } else {
      result["isotropic"] = "unknown";
    }
  } else if (verb == "witt") {
    WittClass w = witt_decompose(q);
    result["witt_index"] = w.witt_index();
    result["kernel"] = qform_json(w.kernel);
  } else if (verb == "decompose12") {
    std::vector<PfisterBlock> blocks = pfister_decompose_12(q);
    Json bj = Json::array();
    QuadraticForm re{F, {}};
    for (const PfisterBlock& b : blocks) {
      bj.push_back(Json{{"alpha", b.alpha.str()},
                        {"slots", Json::array({b.n.slots[0].str(),
                                               b.n.slots[1].str()})}});
      re = direct_sum(re, scale_form(b.alpha, b.n.expansion));
    }
    result["blocks"] = bj;
    if (F.is_number_field() && !isometric(re, q))
      fail("Internal", "reassembled Pfister decomposition is not isometric");
    certs.push_back(Json{{"type", "reassembly-isometric"}, {"value", true}});
  } else
    schema("/command", "unknown qform verb '" + verb + "'");
}

void run_group(const std::string& verb, const Json& payload, Json& result,
               Json& certs) {
  FieldDescriptor F =
      parse_field(expect_member(payload, "field", "/payload"), "/payload/field");
  QuaternionicSubgroup U = subgroup(F, parse_gens(F, payload, "/payload"));
  result["group"] = group_json(U);
  if (verb == "f3u") {
    H3Class f3 = f3_of_group(U);
    result["f3"] = h3_json(f3);
    bool z = h3_zero(f3);
    result["f3_zero"] = z;
    if (!z && !F.is_number_field()) certs.push_back(residue_certificate(f3));
  } else if (verb == "split") {
    SplitSearchResult r = quadratic_splitting(U);
    switch (r.kind) {
      case SplitSearchResult::Kind::SplitBy:
        result["kind"] = "split-by";
        result["d"] = r.d->str();
        certs.push_back(Json{{"type", "splitting-field"}, {"d", r.d->str()}});
        break;
      case SplitSearchResult::Kind::Impossible:
        result["kind"] = "impossible";
        break;
      case SplitSearchResult::Kind::NoneWithinBound:
        result["kind"] = "none-within-bound";
        result["bound"] = r.bound;
        break;
    }
  } else if (verb == "peyre") {
    PeyreVerdict v = peyre_verdict(U);
    switch (v.homology_order) {
      case PeyreVerdict::Order::One: result["homology_order"] = 1; break;
      case PeyreVerdict::Order::Two: result["homology_order"] = 2; break;
      case PeyreVerdict::Order::Unknown: result["homology_order"] = "unknown"; break;
    }
    if (v.generator) result["generator"] = mod_json(*v.generator);
    if (v.splitting_field) {
      result["splitting_field"] = v.splitting_field->str();
      certs.push_back(
          Json{{"type", "splitting-field"}, {"d", v.splitting_field->str()}});
    }
    result["bound"] = v.search_bound_used;
  } else
    schema("/command", "unknown group verb '" + verb + "'");
}

void run_xi(const Json& payload, Json& result, Json& certs) {
  const FieldDescriptor Q = FieldDescriptor::rationals();
  XiData data;
  data.a = parse_scalar(Q, expect_member(payload, "a", "/payload"), "/payload/a");
  data.b = parse_scalar(Q, expect_member(payload, "b", "/payload"), "/payload/b");
  data.c = parse_scalar(Q, expect_member(payload, "c", "/payload"), "/payload/c");
  Int d = squarefree_part(Rat(num(data.a.x0) * den(data.a.x0)));
  FieldDescriptor K = FieldDescriptor::quad(d);
  data.x = parse_scalar(K, expect_member(payload, "x", "/payload"), "/payload/x");
  data.y = parse_scalar(K, expect_member(payload, "y", "/payload"), "/payload/y");
  const Json& cs = expect_member(payload, "c_syms", "/payload");
  if (!cs.is_array()) schema("/payload/c_syms", "expected an array of symbol pairs");
  for (std::size_t i = 0; i < cs.size(); ++i) {
    const std::string here = "/payload/c_syms/" + std::to_string(i);
    if (!cs[i].is_array() || cs[i].size() != 2) schema(here, "expected [a, b]");
    data.c_syms.push_back(Symbol2{parse_scalar(Q, cs[i][0], here + "/0"),
                                  parse_scalar(Q, cs[i][1], here + "/1")});
  }
  XiOutput out = xi_construct(data);
  result["H"] = brauer_json(out.H);
  result["psi"] = qform_json(out.psi);
  result["transfer_e3"] = h3_json(out.transfer_e3);
  result["transfer_e3_zero"] = h3_zero(out.transfer_e3);
  result["xi"] = h3_json(out.xi);
  result["group"] = group_json(out.U);
  SplitSearchResult split = quadratic_splitting(out.U);
  if (split.kind == SplitSearchResult::Kind::SplitBy) {
    result["split_by"] = split.d->str();
    certs.push_back(Json{{"type", "splitting-field"}, {"d", split.d->str()}});
  }
}

void run_herm(const std::string& verb, const Json& payload, Json& result,
              Json& certs) {
  SkewHermitianForm h = parse_herm(payload, "/payload");
  if (verb == "invariants") {
    HermInvariantReport rep = herm_invariants(h);
    result["relative_rank"] = rep.relative_rank;
    result["absolute_rank"] = rep.absolute_rank;
    result["e1"] = rep.e1.str();
    result["e1_trivial"] = rep.e1_trivial;
    if (rep.e2) {
      result["e2"] = brauer_json(*rep.e2);
      result["e2_trivial_mod_q"] = rep.e2_trivial_mod_q;
    }
    Json bj = Json::array();
    for (const HermBlock& b : rep.blocks)
      bj.push_back(Json{{"q", Json::array({b.q.xi.str(), b.q.xj.str(), b.q.xk.str()})},
                        {"a", b.a.str()},
                        {"lambda", b.lambda.str()}});
    result["blocks"] = bj;
    if (rep.f3) {
      result["f3"] = h3_json(*rep.f3);
      bool z = h3_zero(*rep.f3);
      result["f3_zero"] = z;
      if (!z && !h.alg.field.is_number_field())
        certs.push_back(residue_certificate(*rep.f3));
    }
  } else if (verb == "isotropy") {
    if (h.alg.field == FieldDescriptor::rationals() && is_division(h.alg)) {
      result["isotropic"] = isotropic_h(h);
      result["hyperbolic"] = hyperbolic_h(h);
    } else {
      result["isotropic"] = "unknown";
    }
  } else
    schema("/command", "unknown herm verb '" + verb + "'");
}

void run_deg12(const std::string& verb, const Json& payload, Json& result,
               Json& certs) {
  Involution12 inv = parse_inv12(payload, "/payload");
  if (verb == "decompose") {
    Decomposition12 dec = decompose12(inv);
    result["input"] = payload;
    Json bj = Json::array();
    for (const Block12& b : dec.blocks) {
      Json one{{"q_class", brauer_json(b.q_class)},
               {"h_class", brauer_json(b.h_class)}};
      if (b.split_block)
        one["carrier"] = Json{
            {"alpha", b.split_block->alpha.str()},
            {"slots", Json::array({b.split_block->n.slots[0].str(),
                                   b.split_block->n.slots[1].str()})}};
      if (b.herm_block)
        one["carrier"] = Json{{"q", Json::array({b.herm_block->q.xi.str(),
                                                 b.herm_block->q.xj.str(),
                                                 b.herm_block->q.xk.str()})},
                              {"lambda", b.herm_block->lambda.str()}};
      bj.push_back(one);
    }
    result["blocks"] = bj;
    result["group"] = group_json(dec.group);
    certs.push_back(Json{{"type", "reassembly-isometric"}, {"value", true}});
  } else if (verb == "invariants") {
    Deg12Invariants out = e3_f3_deg12(inv);
    result["f3"] = h3_json(out.f3);
    bool z = h3_zero(out.f3);
    result["f3_zero"] = z;
    if (!z && !inv.field().is_number_field())
      certs.push_back(residue_certificate(out.f3));
    result["e3_status"] =
        out.e3_status == Deg12Invariants::E3Status::Exact ? "exact" : "unknown";
    if (out.e3) result["e3"] = mod_json(*out.e3);
  } else if (verb == "isotropy") {
    IsotropyReport rep = isotropy_by_e3(inv);
    switch (rep.kind) {
      case IsotropyReport::Kind::Hyperbolic: result["kind"] = "hyperbolic"; break;
      case IsotropyReport::Kind::IsotropicWithSymbol:
        result["kind"] = "isotropic";
        result["symbol"] = Json::array(
            {rep.symbol->a.str(), rep.symbol->b.str(), rep.symbol->c.str()});
        certs.push_back(Json{
            {"type", "e3-symbol"},
            {"symbol", Json::array({rep.symbol->a.str(), rep.symbol->b.str(),
                                    rep.symbol->c.str()})}});
        break;
      case IsotropyReport::Kind::Anisotropic: result["kind"] = "anisotropic"; break;
      case IsotropyReport::Kind::Unknown: result["kind"] = "unknown"; break;
    }
  } else if (verb == "peyre") {
    HomologyReport rep = homology_generator(inv);
    switch (rep.verdict.homology_order) {
      case PeyreVerdict::Order::One: result["homology_order"] = 1; break;
      case PeyreVerdict::Order::Two: result["homology_order"] = 2; break;
      case PeyreVerdict::Order::Unknown: result["homology_order"] = "unknown"; break;
    }
    if (rep.verdict.generator) result["generator"] = mod_json(*rep.verdict.generator);
    if (rep.verdict.splitting_field)
      result["splitting_field"] = rep.verdict.splitting_field->str();
    if (rep.hyperbolic_twist) {
      Json tw = Json::array({(*rep.hyperbolic_twist)[0].str(),
                             (*rep.hyperbolic_twist)[1].str(),
                             (*rep.hyperbolic_twist)[2].str()});
      result["hyperbolic_twist"] = tw;
      certs.push_back(Json{{"type", "hyperbolic-twist"}, {"alphas", tw}});
    }
    result["bound"] = rep.verdict.search_bound_used;
  } else if (verb == "quadsplit") {
    QuadSplitReport rep = quad_split_report(inv);
    switch (rep.kind) {
      case QuadSplitReport::Kind::SplitAndHyperbolicOver:
        result["kind"] = "split-and-hyperbolic-over";
        result["d"] = rep.d->str();
        certs.push_back(Json{{"type", "splitting-field"}, {"d", rep.d->str()}});
        break;
      case QuadSplitReport::Kind::Impossible:
        result["kind"] = "impossible";
        result["f3"] = h3_json(*rep.f3_cert);
        if (!inv.field().is_number_field())
          certs.push_back(residue_certificate(*rep.f3_cert));
        break;
      case QuadSplitReport::Kind::NoneFound:
        result["kind"] = "none-found";
        result["bound"] = rep.bound;
        break;
    }
  } else
    schema("/command", "unknown deg12 verb '" + verb + "'");
}

void run_deg8(const std::string& verb, const Json& payload, Json& result,
              Json& certs) {
  Involution8 inv = parse_inv8(payload, "/payload");
  if (verb == "decompose") {
    Decomposition8 dec = decompose8(inv);
    result["input"] = payload;
    Json bj = Json::array();
    for (const Block8& b : dec.blocks) {
      Json one{{"q_left", brauer_json(b.q_left)},
               {"q_right", brauer_json(b.q_right)}};
      if (b.n)
        one["carrier"] = Json{
            {"alpha", b.alpha->str()},
            {"slots", Json::array({b.n->slots[0].str(), b.n->slots[1].str()})}};
      if (b.herm_block)
        one["carrier"] = Json{{"q", Json::array({b.herm_block->q.xi.str(),
                                                 b.herm_block->q.xj.str(),
                                                 b.herm_block->q.xk.str()})},
                              {"lambda", b.herm_block->lambda.str()}};
      bj.push_back(one);
    }
    result["blocks"] = bj;
    result["group"] = group_json(dec.group);
    certs.push_back(Json{{"type", "reassembly-isometric"}, {"value", true}});
  } else if (verb == "invariants") {
    Deg8Invariants out = e3_f3_deg8(inv);
    result["c_plus"] = brauer_json(out.c_plus);
    result["c_minus"] = brauer_json(out.c_minus);
    result["f3"] = h3_json(out.f3);
    bool z = h3_zero(out.f3);
    result["f3_zero"] = z;
    if (!z && !inv.field().is_number_field())
      certs.push_back(residue_certificate(out.f3));
    result["e3_status"] =
        out.e3_status == Deg8Invariants::E3Status::Exact ? "exact" : "unknown";
    if (out.e3) result["e3"] = mod_json(*out.e3);
    result["rho"] = herm_json(out.rho);
  } else if (verb == "triality") {
    TrialityReport rep = triality_e3_equality(inv);
    result["f3_equal"] = rep.f3_equal;
    result["plus_mod_w"] = mod_status_str(rep.plus_mod_w);
    result["minus_mod_w"] = mod_status_str(rep.minus_mod_w);
    result["plus_mod_v"] = mod_status_str(rep.plus_mod_v);
    result["minus_mod_v"] = mod_status_str(rep.minus_mod_v);
    if (rep.plus_scale) result["plus_scale"] = rep.plus_scale->str();
    if (rep.minus_scale) result["minus_scale"] = rep.minus_scale->str();
    result["c_plus"] = brauer_json(rep.base.c_plus);
    result["c_minus"] = brauer_json(rep.base.c_minus);
    result["f3"] = h3_json(rep.base.f3);
  } else
    schema("/command", "unknown deg8 verb '" + verb + "'");
}

}  // namespace

Json run(const Json& request) {
  expect_object(request, "");
  std::string command =
      expect_string(expect_member(request, "command", ""), "/command");
  const Json& payload = expect_member(request, "payload", "");
  std::int64_t seed = 0;
  if (request.contains("seed")) {
    if (!request["seed"].is_number_integer()) schema("/seed", "expected an integer");
    seed = request["seed"].get<std::int64_t>();
  }

  auto space = command.find(' ');
  std::string group = command.substr(0, space);
  std::string verb = space == std::string::npos ? "" : command.substr(space + 1);

  Json result = Json::object();
  Json certs = Json::array();
  if (group == "qform")
    run_qform(verb, payload, result, certs);
  else if (group == "group")
    run_group(verb, payload, result, certs);
  else if (group == "xi")
    run_xi(payload, result, certs);
  else if (group == "herm")
    run_herm(verb, payload, result, certs);
  else if (group == "deg12")
    run_deg12(verb, payload, result, certs);
  else if (group == "deg8")
    run_deg8(verb, payload, result, certs);
  else
    schema("/command", "unknown command '" + command + "'");

  const Budget& b = budget();
  return Json{{"command", command},
              {"seed", seed},
              {"result", result},
              {"certificates", certs},
              {"budget", Json{{"vector_search", b.vector_search},
                              {"candidate_scalars", b.candidate_scalars},
                              {"atom_product_size", b.atom_product_size}}}};
}

int exit_code(const Error& e) {
  std::string code = e.code();
  if (code == "SearchExhausted") return 3;
  if (code == "Internal") return 1;
  return 2;
}

}  // namespace wittlab::cli
