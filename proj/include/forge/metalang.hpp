#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "forge/error.hpp"
#include "forge/finite_set.hpp"
#include "forge/monad.hpp"

namespace forge {

// Types: 1 | B | A * B | T A. `*` is right associative; T binds tighter.
struct MLType {
    enum class Kind { Unit, Base, Product, Monadic };
    Kind kind = Kind::Unit;
    std::string name;           // Base
    std::vector<MLType> parts;  // Product: two, Monadic: one

    static MLType unit() { return {}; }
    static MLType base(std::string name) { return {Kind::Base, std::move(name), {}}; }
    static MLType product(MLType a, MLType b) { return {Kind::Product, {}, {std::move(a), std::move(b)}}; }
    static MLType monadic(MLType a) { return {Kind::Monadic, {}, {std::move(a)}}; }

    std::string str() const;
    friend bool operator==(const MLType&, const MLType&) = default;
};

MLType parse_type(std::string_view text);

class MLTerm {
public:
    enum class Kind { Var, Apply, Star, Pair, Fst, Snd, Ret, Do };

    static MLTerm var(std::string name);
    static MLTerm apply(std::string function, MLTerm arg);
    static MLTerm star();
    static MLTerm pair(MLTerm a, MLTerm b);
    static MLTerm fst(MLTerm t);
    static MLTerm snd(MLTerm t);
    static MLTerm ret(MLTerm t);
    // do x <- bound; body
    static MLTerm bind(std::string x, MLTerm bound, MLTerm body);

    Kind kind() const { return node_->kind; }
    // Variable, function symbol, or bound variable of a do.
    const std::string& name() const { return node_->name; }
    const std::vector<MLTerm>& children() const { return node_->children; }

    std::string str() const;
    friend bool operator==(const MLTerm& a, const MLTerm& b);

private:
    struct Node {
        Kind kind;
        std::string name;
        std::vector<MLTerm> children;
    };
    explicit MLTerm(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    std::shared_ptr<const Node> node_;
};

// Grammar:
//   term := do x <- term ; term | ret term | fst term | snd term
//         | f term | x | * | star | ( term ) | ( term , term )
// An identifier directly followed by the start of a term is an application.
MLTerm parse_ml_term(std::string_view text);

struct MLFunction {
    MLType dom, cod;
    std::optional<Value> table;  // absent: equiv ranges over all tables
};

struct MLSignature {
    // A base type without a carrier gets atoms of every size up to the bound
    // in equiv.
    std::map<std::string, std::optional<FiniteSet>> bases;
    std::map<std::string, MLFunction> functions;
};

// Ordered; a later entry shadows an earlier one of the same name.
using MLContext = std::vector<std::pair<std::string, MLType>>;

class TypeError : public Error {
public:
    TypeError(std::string rule, const std::string& message) : Error(rule + ": " + message), rule_(std::move(rule)) {}
    const std::string& rule() const { return rule_; }

private:
    std::string rule_;
};

MLType typecheck(const MLContext& ctx, const MLTerm& t, const MLSignature& sig);

// Concrete carriers for the base types and tables for the function symbols.
struct MLInterpretation {
    std::map<std::string, FiniteSet> bases;
    std::map<std::string, Value> functions;
};

FiniteSet ml_carrier(const MLType& a, const FiniteMonad& m, const MLInterpretation& in);

// The denotation of t; env holds one value per context entry. ret is the
// unit, do is Kleisli extension of the body as a function of the bound value
// with the rest of the environment fixed.
Value evaluate(const MLTerm& t, const FiniteMonad& m, const MLSignature& sig, const MLInterpretation& in,
               const MLContext& ctx, const std::vector<Value>& env);

struct EquivOptions {
    std::size_t sizeBound = 2;
    std::uint64_t budget = 100'000'000;  // environments
};

struct EquivResult {
    bool equal = true;
    bool exhaustive = true;  // false when the budget cut enumeration short
    std::uint64_t checked = 0;
    std::optional<nlohmann::json> witness;

    nlohmann::json to_json() const;
};

// Compares the two terms under every choice of carriers (sizes 0..sizeBound
// for unfixed base types), every table for unfixed function symbols and
// every valuation of the context.
EquivResult equiv(const MLContext& ctx, const MLTerm& a, const MLTerm& b, const FiniteMonad& m,
                  const MLSignature& sig, const EquivOptions& options = {});

// A .ml-meta source: declarations, then the term.
//   base A                      base B = {b0, b1}
//   fun g : A -> T B            fun f : A -> B = [a0->b0,a1->b1]
//   var p : T A
//   term do x <- p; ret x
struct MLProgram {
    MLSignature sig;
    MLContext ctx;
    MLTerm term = MLTerm::star();
};

MLProgram parse_program(std::string_view text);

// The monad-law and commutation programs used by the suites:
// "left-unit", "right-unit", "associativity" (pairs of sides) and "comm".
std::pair<MLProgram, MLProgram> law_programs(std::string_view law);

}  // namespace forge
