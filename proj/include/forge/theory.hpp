#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "forge/term.hpp"

namespace forge {

// An equation-in-context. All variables of both sides belong to `context`.
struct Equation {
    std::vector<std::string> context;  // sorted, distinct
    Term lhs;
    Term rhs;

    Equation() = default;
    Equation(std::vector<std::string> ctx, Term l, Term r);

    std::string str() const;
    friend bool operator==(const Equation&, const Equation&) = default;
};

// A finitary equational theory. Equations have set semantics: adding a
// structurally equal equation twice keeps one copy.
class Theory {
public:
    Theory() = default;
    Theory(std::string name, Signature sig);

    const std::string& name() const { return name_; }
    const Signature& signature() const { return sig_; }
    const std::vector<Equation>& equations() const { return equations_; }

    // Returns false when the equation was already present. Throws Error when
    // it mentions an operation outside the signature or a variable outside
    // its context.
    bool add_equation(Equation eq);

    void rename(std::string name) { name_ = std::move(name); }

private:
    std::string name_;
    Signature sig_;
    std::vector<Equation> equations_;
    std::set<std::string> keys_;
};

// Disjoint union of signatures and equations. Clashing operation names are
// qualified as left.<op> / right.<op>.
Theory theory_sum(const Theory& left, const Theory& right);

// The sum plus one commutation equation per pair (f, g) in
// Sigma_left x Sigma_right:
//   f(g(x_i_0..x_i_{m-1}) | i < n) = g(f(x_0_j..x_{n-1}_j) | j < m).
Theory theory_tensor(const Theory& left, const Theory& right);

// Adds a nullary operation per label. Labels already used by the signature
// are qualified as const.<label>.
Theory add_constants(const Theory& t, const std::vector<std::string>& labels);

// The commutation equation of f over g with row index taken from f.
Equation commutation_equation(const OpSymbol& f, const OpSymbol& g);

// Built-in theories by name:
//   EmptyTheory, Semilattice, NonemptySemilattice, Sigma22Free, Monoid,
//   CommutativeMonoid, Unary, SpuriousAnalog(n), StateTheory(n), FreeOp(n),
//   Output(n), WellOrder(n)
// Throws Error for unknown names or parameters out of range.
Theory builtin_theory(std::string_view name);
std::vector<std::string> builtin_theory_names();

// Key identifying an equation up to orientation and consistent renaming of
// variables, used to compare theories built in different orders.
std::string equation_shape_key(const Equation& eq);

}  // namespace forge
