#pragma once

#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "forge/monad.hpp"
#include "forge/table_algebra.hpp"
#include "forge/theory.hpp"

namespace forge {

// A theory together with the monad it presents. Each operation denotes an
// element of T{p0..p(n-1)} (its generic instance); terms are interpreted by
// Kleisli extension. `reify` goes the other way and picks a term for every
// element of T X.
struct Presentation {
    Theory theory;
    FiniteMonad monad;
    // The element denoted by op(p0, ..., p(n-1)) over parameters(n).
    std::function<Value(const OpSymbol& op)> generic;
    // A term denoting m, with leaf(x) as the term for x in X.
    std::function<Term(const FiniteSet& x, const Value& m, const std::function<Term(const Value&)>& leaf)> reify;
};

// {p0, ..., p(n-1)}; positional order is given by parameter(i), not by the
// set's sorted order.
const FiniteSet& parameters(std::size_t n);
const Value& parameter(std::size_t i);

// Interprets t in T X; env sends each variable of t to an element of X.
Value interpret(const Presentation& p, const FiniteSet& x, const Term& t, const std::map<std::string, Value>& env);

// Variable names used by reify_term: the element's printed form.
Term reify_term(const Presentation& p, const FiniteSet& x, const Value& m);

// The Eilenberg-Moore structure T A -> A induced by a table algebra of the
// presenting theory: evaluate the reified term in the tables.
Value em_structure(const Presentation& p, const TableAlgebra& a, const FiniteSet& carrier, const Value& m);

// Presentations by monad name:
//   identity -> EmptyTheory, powerset:full -> Semilattice,
//   powerset:nonempty -> NonemptySemilattice, list:cap=n -> Monoid,
//   multiset:cap=n -> CommutativeMonoid, state:S=n -> StateTheory(n),
//   free:I=n:depth=d -> FreeOp(n), output:O=n:depth=d -> Output(n),
//   sigma22:depth=d -> Sigma22Free;
// a +exc:E=n suffix adds the constants e0.. to the theory.
Presentation builtin_presentation(std::string_view monad);
std::vector<std::string> builtin_presentation_catalog();

}  // namespace forge
