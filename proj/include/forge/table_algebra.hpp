#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "forge/finite_set.hpp"
#include "forge/theory.hpp"

namespace forge {

// A finite Sigma-structure given by total operation tables. Elements are
// addressed by position in `elements`; a table for an n-ary operation has
// size^n entries indexed in mixed radix with the first argument most
// significant.
struct TableAlgebra {
    std::vector<Value> elements;
    std::map<std::string, std::vector<std::uint32_t>> tables;

    std::size_t size() const { return elements.size(); }
    std::uint32_t apply(const std::string& op, std::span<const std::uint32_t> args) const;
    std::size_t index_of(const Value& v) const;

    friend bool operator==(const TableAlgebra&, const TableAlgebra&) = default;
};

// Carrier {0, 1, ..., n-1} as atoms.
std::vector<Value> numbered_elements(std::size_t n);

// Tables for every operation of `sig`, all entries 0. Throws when the table
// for some operation would exceed `maxEntries`.
TableAlgebra blank_algebra(const Signature& sig, std::size_t size, std::size_t maxEntries = 1 << 22);

// Value of t under an assignment of variables to element indices.
std::uint32_t eval_term(const TableAlgebra& a, const Term& t, const std::map<std::string, std::uint32_t>& env);

struct EquationViolation {
    Equation equation;
    std::map<std::string, std::uint32_t> assignment;
    std::uint32_t lhs = 0, rhs = 0;

    nlohmann::json to_json(const TableAlgebra& a) const;
};

struct AlgebraCheck {
    bool ok = true;
    std::uint64_t instances = 0;
    std::optional<EquationViolation> violation;

    nlohmann::json to_json(const TableAlgebra& a) const;
};

// Checks that the tables cover T's signature with the right sizes (throws
// Error otherwise) and that every equation holds under every assignment.
AlgebraCheck algebra_of_table(const Theory& t, const TableAlgebra& a);

// Does `eq` hold under every assignment? Fills `violation` on failure.
bool holds(const TableAlgebra& a, const Equation& eq, std::uint64_t& instances,
           std::optional<EquationViolation>* violation = nullptr);

// {carrier:[...], tables:{op:{"i,j":k}}, generators:[...]}. Table keys and
// values use element strings.
nlohmann::json algebra_to_json(const TableAlgebra& a, const Signature& sig,
                               const std::vector<std::uint32_t>& generators = {});
TableAlgebra algebra_from_json(const nlohmann::json& j, const Signature& sig,
                               std::vector<std::uint32_t>* generators = nullptr);

}  // namespace forge
