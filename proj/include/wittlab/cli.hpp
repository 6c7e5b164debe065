// JSON request/report layer and command dispatch for the wittlab tool:
// schema-checked parsing of forms, hermitian forms, involutions and groups,
// certificate-bearing reports, and deterministic serialization (reports are
// byte-identical for identical requests).
#pragma once

#include <json.hpp>

#include "wittlab/deg8.hpp"

namespace wittlab::cli {

using Json = nlohmann::json;

// ---------------------------------------------------------------------------
// Parsing.  Every violation raises SchemaError with a JSON-pointer location.
// ---------------------------------------------------------------------------

FieldDescriptor parse_field(const Json& j, const std::string& at);
Element parse_scalar(const FieldDescriptor& F, const Json& j, const std::string& at);
QuadraticForm parse_qform(const Json& j, const std::string& at);
SkewHermitianForm parse_herm(const Json& j, const std::string& at);
Involution12 parse_inv12(const Json& j, const std::string& at);
Involution8 parse_inv8(const Json& j, const std::string& at);
H3Class parse_h3(const FieldDescriptor& F, const Json& j, const std::string& at);

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

Json field_json(const FieldDescriptor& F);
Json qform_json(const QuadraticForm& q);
Json herm_json(const SkewHermitianForm& h);
Json brauer_json(const BrauerClass2& x);
Json h3_json(const H3Class& x);
Json mod_json(const ModClass& x);

// ---------------------------------------------------------------------------
// Dispatch
// ---------------------------------------------------------------------------

// request: {"command": "<group> <verb>", "payload": {...}, "seed": n}.
// Returns the full report (command echo, result, certificates, budget, seed).
// Throws Error; exit_code maps error codes to the process exit convention:
// 2 for input errors, 3 for exhausted search budgets, 1 otherwise.
Json run(const Json& request);
int exit_code(const Error& e);

}  // namespace wittlab::cli
