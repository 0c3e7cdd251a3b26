#pragma once

#include <string>

#include "gcore/ast.hpp"

namespace gcore {

// Parses a query, applies the static-semantics checks and assigns internal
// names to anonymous pattern elements. Throws ParseError.
QueryPtr parse_query(const std::string& text);

// Canonical text form; re-parsing it yields a structurally identical AST.
std::string render_query(const QueryAst& q);

// Diagnostic JSON rendering of the AST, for tooling and --explain.
std::string ast_to_json(const QueryAst& q);

}  // namespace gcore
