#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "wittlab/cli.hpp"

using namespace wittlab;
using cli::Json;

namespace {

Json req(const std::string& command, Json payload) {
  return Json{{"command", command}, {"payload", std::move(payload)}, {"seed", 0}};
}

}  // namespace

TEST_CASE("schema errors carry a JSON-pointer location") {
  Json bad = req("qform invariants",
                 Json{{"field", Json{{"field", "Q"}}}, {"diag", {"1", "0", "2"}}});
  try {
    cli::run(bad);
    FAIL("expected SchemaError");
  } catch (const Error& e) {
    CHECK(e.code() == "SchemaError");
    CHECK(std::string(e.what()).find("/payload/diag/1") != std::string::npos);
  }
  CHECK_THROWS_WITH_AS(cli::run(req("qform frobnicate", Json::object())),
                       doctest::Contains("SchemaError"), Error);
  CHECK_THROWS_WITH_AS(
      cli::run(req("qform invariants", Json{{"diag", {"1"}}})),
      doctest::Contains("SchemaError"), Error);
  CHECK(cli::exit_code(Error("SchemaError", "x")) == 2);
  CHECK(cli::exit_code(Error("SearchExhausted", "x")) == 3);
  CHECK(cli::exit_code(Error("Internal", "x")) == 1);
}

TEST_CASE("qform invariants: three-fold Pfister form has nonzero e3") {
  Json payload{{"field", Json{{"field", "Q"}}},
               {"diag", {"1", "1", "1", "1", "1", "1", "1", "1"}}};
  Json report = cli::run(req("qform invariants", payload));
  CHECK(report["result"]["in_i3"] == true);
  CHECK(report["result"]["e3_zero"] == false);
  REQUIRE(!report["certificates"].empty());
  CHECK(report["certificates"][0]["type"] == "signature");
  CHECK(report["certificates"][0]["value"] == 8);
}

TEST_CASE("reports are byte-identical across repeated runs") {
  Json payload{{"field", Json{{"field", "Q"}}}, {"diag", {"1", "-2", "3", "5"}}};
  Json request = req("qform isotropy", payload);
  CHECK(cli::run(request).dump() == cli::run(request).dump());
}

TEST_CASE("deg12 invariants over Q(t): f3 = t.[A] with a residue certificate") {
  Json payload{
      {"field", Json{{"field", "Q(t)"}}},
      {"quat", Json{{"a", "2"}, {"b", "5"}}},
      {"diag", Json::parse(R"([["1","0","0"],["-t","0","0"],
                               ["0","1","0"],["0","-t","0"],
                               ["5","0","1"],["-5*t","0","-t"]])")}};
  Json report = cli::run(req("deg12 invariants", payload));
  CHECK(report["result"]["f3_zero"] == false);
  CHECK(report["result"]["e3_status"] == "exact");
  bool found_t = false;
  for (const Json& cert : report["certificates"])
    if (cert["type"] == "residue-table")
      for (const Json& row : cert["rows"])
        if (row["pi"].get<std::string>().find("t") != std::string::npos)
          found_t = true;
  CHECK(found_t);
}

TEST_CASE("deg12 decompose result round-trips into follow-up commands") {
  Json payload{{"field", Json{{"field", "Q"}}},
               {"quat", Json{{"a", "-1"}, {"b", "-1"}}},
               {"diag", Json::parse(R"([["1","0","0"],["-2","0","0"],
                                        ["0","1","0"],["0","-3","0"],
                                        ["0","0","1"],["0","0","-6"]])")}};
  Json dec = cli::run(req("deg12 decompose", payload));
  CHECK(dec["result"]["blocks"].size() == 3);
  Json follow = cli::run(req("deg12 peyre", dec["result"]["input"]));
  CHECK(follow["result"]["homology_order"] == 1);
  CHECK(follow["result"].contains("hyperbolic_twist"));
}

TEST_CASE("group split and f3u") {
  Json payload{{"field", Json{{"field", "Q"}}},
               {"gens", Json::parse(R"([["-1","-1"],["-1","3"]])")}};
  Json split = cli::run(req("group split", payload));
  CHECK(split["result"]["kind"] == "split-by");
  Json f3u = cli::run(req("group f3u", payload));
  CHECK(f3u["result"]["group"]["order"] == 4);
  CHECK(f3u["result"]["f3_zero"] == true);
}

TEST_CASE("herm invariants and isotropy") {
  Json payload{{"field", Json{{"field", "Q"}}},
               {"quat", Json{{"a", "-1"}, {"b", "-1"}}},
               {"diag", Json::parse(R"([["1","0","0"],["-2","0","0"]])")}};
  Json inv = cli::run(req("herm invariants", payload));
  CHECK(inv["result"]["relative_rank"] == 2);
  CHECK(inv["result"]["e1_trivial"] == true);
  // <i><1,-2> is hyperbolic: 2 is a reduced norm of (-1,-1)
  Json iso = cli::run(req("herm isotropy", payload));
  CHECK(iso["result"]["isotropic"] == true);
  CHECK(iso["result"]["hyperbolic"] == true);
}

TEST_CASE("xi construction through the CLI layer") {
  Json payload{{"a", "2"},     {"b", "3"},
               {"c", "5"},     {"x", "3+4*s"},
               {"y", "5+s"},   {"c_syms", Json::parse(R"([["-1","23"]])")}};
  Json report = cli::run(req("xi", payload));
  CHECK(report["result"]["transfer_e3_zero"] == true);
  CHECK(report["result"]["group"]["order"] == 8);
  CHECK(report["result"].contains("split_by"));
}

TEST_CASE("h3 payload grammar parses and serializes") {
  const FieldDescriptor Q = FieldDescriptor::rationals();
  Json j = Json::parse(
      R"({"h3":[{"sym":["-1","-1","-1"]},
                {"cores":{"K":{"d":2},"mu":"1+s","sym":["3","5"]}}]})");
  H3Class x = cli::parse_h3(Q, j, "/payload");
  // the rational-slot corestriction term projects to a symbol (norm, 3, 5)
  CHECK(x.symbols.size() == 2);
  Json back = cli::h3_json(x);
  CHECK(back["h3"].size() == 2);
}
