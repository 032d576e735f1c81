#pragma once

#include <json.hpp>
#include <string>
#include <string_view>

#include "forge/theory.hpp"

namespace forge {

// Parses the theory language:
//
//   theory Name {
//     op join : 2;
//     op bot : 0;
//     eq (x, y) join(x, y) = join(y, x);
//   }
//
// Inside an equation, names listed in the context are variables; any other
// name must be a declared operation. Throws ParseError with line/column.
Theory parse_theory(std::string_view text);

// Parses a single term. Declared operations of `sig` are applications, every
// other identifier is a variable.
Term parse_term(std::string_view text, const Signature& sig);

// Inverse of parse_theory (up to whitespace and comments).
std::string print_theory(const Theory& t);

// Canonical form: ops sorted by name, equations sorted by "lhs = rhs".
nlohmann::json theory_to_json(const Theory& t);

}  // namespace forge
