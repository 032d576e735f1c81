#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "forge/free_algebra.hpp"
#include "forge/model_finder.hpp"
#include "forge/monad.hpp"
#include "forge/presentation.hpp"
#include "forge/table_algebra.hpp"
#include "forge/theory.hpp"

namespace forge {

// A T-algebra alpha: T A -> A.
struct EMAlgebra {
    FiniteMonad monad;
    FiniteSet carrier;
    std::function<Value(const Value&)> structure;
};

struct EMCheck {
    bool ok = true;
    std::uint64_t checked = 0;
    std::optional<nlohmann::json> witness;

    nlohmann::json to_json() const;
};

// alpha . eta = id, and the multiplication law in Kleisli form
//   alpha(f*(m)) = alpha(T(alpha . f)(m))
// for every f: Y -> T A and m in T Y with |Y| <= bound.
EMCheck check_em_algebra(const EMAlgebra& a, std::size_t bound = 2);

// The structure induced by a table algebra of p's theory, tabulated over
// T(carrier) so that later lookups are cheap. Carrier elements are the
// algebra's elements.
EMAlgebra em_algebra_of_tables(const Presentation& p, const TableAlgebra& a);

struct TensorAlgebra {
    FiniteSet carrier;
    EMAlgebra t;  // alpha
    EMAlgebra s;  // beta
};

struct TensorLawOptions {
    std::size_t yBound = 2;
    std::size_t zBound = 2;
    std::uint64_t budget = 50'000'000;  // (p, q, f) triples
};

struct TensorLawReport {
    bool ok = true;
    bool partial = false;  // budget reached before all triples were checked
    std::uint64_t checked = 0;
    std::optional<nlohmann::json> witness;

    nlohmann::json to_json() const;
};

// For p in S Y, q in T Z and f: Y x Z -> A,
//   alpha(T(z |-> beta(S(y |-> f(y,z))(p)))(q))
//     = beta(S(y |-> alpha(T(z |-> f(y,z))(q)))(p))
// over all |Y| <= yBound, |Z| <= zBound.
TensorLawReport check_tensor_law(const TensorAlgebra& a, const TensorLawOptions& options = {});

// The commutation equations of left against right, named as in
// theory_tensor(left, right).
std::vector<Equation> commutation_equations(const Theory& left, const Theory& right);

// Checks every commutation instance on an algebra whose tables are named as
// in theory_tensor(left, right).
AlgebraCheck check_commutation_tables(const Theory& left, const Theory& right, const TableAlgebra& a);

// The left and right reducts of an algebra of theory_sum(left, right), with
// tables under the component theories' own operation names.
std::pair<TableAlgebra, TableAlgebra> split_sum_algebra(const Theory& left, const Theory& right,
                                                        const TableAlgebra& a);

// Theories whose operations depend on the carrier size. "WellOrder" gives
// WellOrder(n) on carriers of size n; any other built-in name is constant.
using TheoryFamily = std::function<Theory(std::size_t carrier)>;
TheoryFamily theory_family(std::string_view name);

struct TensorSearchConfig {
    std::size_t generators = 1;
    std::size_t minCarrier = 1;
    std::size_t maxCarrier = 3;
    bool symmetryBreaking = true;
    std::uint64_t nodeBudget = 2'000'000'000;
    bool keepAlgebras = false;
};

struct CarrierStats {
    std::size_t carrier = 0;
    std::uint64_t count = 0;
    std::uint64_t nodes = 0;
    bool partial = false;
    double seconds = 0;
};

struct TensorEnumeration {
    std::string left, right;
    std::size_t generators = 0;
    std::vector<CarrierStats> perCarrier;
    std::uint64_t total = 0;
    std::size_t largestCarrier = 0;  // largest size with at least one algebra
    bool partial = false;
    std::vector<TableAlgebra> algebras;  // when keepAlgebras

    nlohmann::json to_json() const;
};

// Reachable algebras of theory_tensor(left(n), right(n)) on carriers of size
// n in [minCarrier, maxCarrier], up to isomorphism fixing the generators.
TensorEnumeration enumerate_tensor_algebras(const TheoryFamily& left, const TheoryFamily& right,
                                            const TensorSearchConfig& config);

struct SaturationReport {
    std::string monad;
    std::size_t generators = 0;
    PhasedClosure closure;
    // The classes were all reached by one join phase followed by one
    // operation phase, after which nothing changed.
    bool stabilizationPattern = false;

    nlohmann::json to_json() const;
};

// The free algebra of theory_tensor(Semilattice, theory of `monad`) over
// x0..x(n-1), built by alternating closure: the monad's operations, then
// join and bot.
SaturationReport saturate_free_tensor(std::string_view monad, std::size_t generators, std::size_t maxRounds = 8,
                                      std::size_t budget = kDefaultTermBudget);

struct HomomorphismReport {
    bool homomorphism = true;
    bool surjective = true;
    std::vector<std::uint32_t> classImage;  // per class of the free algebra
    std::optional<std::string> witness;
};

// The map from a free quotient algebra sending generator i to element
// generatorImages[i] (through representatives), checked against every
// operation-table entry of the quotient and for surjectivity. Operation names
// must agree.
HomomorphismReport free_homomorphism(const QuotientAlgebra& free, const TableAlgebra& target,
                                     const std::vector<std::uint32_t>& generatorImages);

struct StateTensorReport {
    std::size_t stateSize = 0, generatorCount = 0;
    std::uint64_t expected = 0;  // (2^(|S||X|))^|S|
    std::size_t classes = 0;
    std::size_t depth = 0;
    bool closed = false;
    bool bijection = false;
    bool respectsOperations = false;
    bool respectsGenerators = false;
    std::optional<std::string> witness;

    bool conclusive() const { return closed; }
    bool passed() const { return closed && bijection && respectsOperations && respectsGenerators && classes == expected; }
    nlohmann::json to_json() const;
};

// Builds the free algebra of theory_tensor(Semilattice, StateTheory(S)) over
// X generators with increasing depth until it closes, then evaluates every
// class in S -> P(S x X) and checks that this is a bijection compatible with
// the generators and every operation.
StateTensorReport verify_state_tensor(std::size_t stateSize = 2, std::size_t generatorCount = 1,
                                      std::size_t maxDepth = 8, std::size_t budget = 2'000'000);

}  // namespace forge
