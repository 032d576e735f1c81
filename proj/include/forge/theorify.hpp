#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "forge/monad.hpp"
#include "forge/theory.hpp"

namespace forge {

struct TheorifyOptions {
    std::size_t maxArity = 2;
    // Schemas are also checked with arguments drawn from T Z for every Z of
    // size <= modelSize, besides the generic arguments eta(x).
    std::size_t modelSize = 1;
};

struct SchemaViolation {
    std::string schema;  // "unit" or "substitution"
    std::string equation;
    std::string lhs, rhs;

    nlohmann::json to_json() const;
};

struct TheorifyReport {
    std::string monad;
    std::size_t maxArity = 0;
    std::size_t operations = 0;
    std::size_t unitEquations = 0;
    std::size_t substitutionEquations = 0;
    // Substitution instances whose f*m leaves the materialized fragment; they
    // are checked but contribute no equation to the truncated theory.
    std::size_t outsideFragment = 0;
    std::uint64_t checkedInstances = 0;
    std::uint64_t violations = 0;
    std::optional<SchemaViolation> firstViolation;

    nlohmann::json to_json() const;
};

struct TheorifyResult {
    Theory theory;
    TheorifyReport report;
    // Operation name -> (arity, element of T{x0..}) it stands for.
    std::vector<std::pair<std::string, std::string>> operationMeaning;
};

// The truncation of Theta(M) to argument sets X = {x0..x(k-1)}, k <= maxArity:
// an operation h_{X,m} of arity |X| for every m in T X, the unit schema
//   h_{X,eta(a)}(p_x | x in X) = p_a
// and the substitution schema
//   h_{Y,f*m}(p_y | y in Y) = h_{X,m}(h_{Y,f(x)}(p_y | y in Y) | x in X)
// for all f: X -> T Y, m in T X. Each h_{X,m} is interpreted in M by Kleisli
// extension (h_{X,m}(q) = q*(m)) and both schemas are checked exhaustively.
TheorifyResult theorify(const FiniteMonad& m, const TheorifyOptions& options = {});

}  // namespace forge
