// wittlab command-line driver: assembles a JSON request from the arguments,
// dispatches it, and prints the report to stdout (timing goes to stderr so
// that reports stay byte-identical across runs).
#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include "wittlab/cli.hpp"

namespace {

using wittlab::cli::Json;

Json parse_json_text(const std::string& text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    wittlab::fail("SchemaError", what + ": " + e.what());
  }
}

Json load_payload(const std::string& path) {
  std::ostringstream buf;
  if (path == "-") {
    buf << std::cin.rdbuf();
  } else {
    std::ifstream in(path);
    if (!in) wittlab::fail("SchemaError", "/payload: cannot read '" + path + "'");
    buf << in.rdbuf();
  }
  return parse_json_text(buf.str(), "/payload");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wittlab: exact Arason and obstruction invariants of quadratic "
               "forms, skew-hermitian forms and orthogonal involutions"};
  app.require_subcommand(1);

  std::string format = "pretty";
  app.add_option("--format", format, "report layout: pretty or jsonl")
      ->check(CLI::IsMember({"pretty", "jsonl"}));
  int threads = 1;
  app.add_option("--threads", threads, "internal parallelism bound")
      ->check(CLI::Range(1, 64));
  std::int64_t seed = 0;
  app.add_option("--seed", seed, "seed echoed into the report");

  // file-driven command groups
  struct Leaf {
    CLI::App* cmd = nullptr;
    std::string command;
    std::string file;
  };
  std::vector<Leaf> leaves;
  auto add_file_group = [&](const std::string& group,
                            const std::vector<std::string>& verbs) {
    CLI::App* g = app.add_subcommand(group);
    g->require_subcommand(1);
    for (const std::string& verb : verbs) {
      leaves.push_back(Leaf{nullptr, group + " " + verb, ""});
      Leaf& leaf = leaves.back();
      leaf.cmd = g->add_subcommand(verb);
      leaf.cmd->add_option("--file", leaf.file, "payload file ('-' for stdin)")
          ->required();
    }
  };
  leaves.reserve(32);
  add_file_group("qform", {"invariants", "isotropy", "witt", "decompose12"});
  add_file_group("herm", {"invariants", "isotropy"});
  add_file_group("deg12", {"decompose", "invariants", "isotropy", "peyre", "quadsplit"});
  add_file_group("deg8", {"decompose", "triality", "invariants"});

  // group commands take the generators inline
  CLI::App* grp = app.add_subcommand("group");
  grp->require_subcommand(1);
  std::string grp_field = R"({"field":"Q"})";
  std::string grp_gens;
  struct GroupLeaf {
    CLI::App* cmd;
    std::string command;
  };
  std::vector<GroupLeaf> group_leaves;
  for (const std::string& verb : {"f3u", "split", "peyre"}) {
    CLI::App* c = grp->add_subcommand(verb);
    c->add_option("--field", grp_field, "field descriptor JSON");
    c->add_option("--gens", grp_gens, "generators as JSON symbol pairs")->required();
    group_leaves.push_back(GroupLeaf{c, "group " + verb});
  }

  // the xi construction takes its data inline
  CLI::App* xi = app.add_subcommand("xi");
  std::string xi_a, xi_b, xi_c, xi_x, xi_y, xi_csyms = "[]";
  xi->add_option("--a", xi_a)->required();
  xi->add_option("--b", xi_b)->required();
  xi->add_option("--c", xi_c)->required();
  xi->add_option("--x", xi_x, "element of Q(sqrt a), 's' denotes the root")
      ->required();
  xi->add_option("--y", xi_y)->required();
  xi->add_option("--csyms", xi_csyms, "symbols of [C] as JSON pairs");

  CLI11_PARSE(app, argc, argv);

  try {
    Json request;
    if (xi->parsed()) {
      request["command"] = "xi";
      request["payload"] = Json{{"a", xi_a}, {"b", xi_b},     {"c", xi_c},
                                {"x", xi_x}, {"y", xi_y},
                                {"c_syms", parse_json_text(xi_csyms, "/payload/c_syms")}};
    } else {
      for (const auto& leaf : group_leaves)
        if (leaf.cmd->parsed()) {
          request["command"] = leaf.command;
          request["payload"] =
              Json{{"field", parse_json_text(grp_field, "/payload/field")},
                   {"gens", parse_json_text(grp_gens, "/payload/gens")}};
        }
      for (const auto& leaf : leaves)
        if (leaf.cmd->parsed()) {
          request["command"] = leaf.command;
          request["payload"] = load_payload(leaf.file);
        }
    }
    if (!request.contains("command"))
      wittlab::fail("SchemaError", "/command: no command given");
    request["seed"] = seed;

    auto t0 = std::chrono::steady_clock::now();
    Json report = wittlab::cli::run(request);
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                  std::chrono::steady_clock::now() - t0)
                  .count();
    std::cout << (format == "pretty" ? report.dump(2) : report.dump()) << "\n";
    std::cerr << "time_ms=" << ms << "\n";
    return 0;
  } catch (const wittlab::Error& e) {
    Json err{{"error", Json{{"code", e.code()}, {"message", e.what()}}}};
    std::cerr << err.dump(2) << "\n";
    return wittlab::cli::exit_code(e);
  }
}
