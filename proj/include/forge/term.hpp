#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace forge {

struct OpSymbol {
    std::string name;
    std::size_t arity = 0;

    friend auto operator<=>(const OpSymbol&, const OpSymbol&) = default;
};

// A finitary signature. Operation names are unique.
class Signature {
public:
    Signature() = default;
    explicit Signature(std::vector<OpSymbol> ops);

    void add(OpSymbol op);
    const std::vector<OpSymbol>& ops() const { return ops_; }
    std::size_t size() const { return ops_.size(); }
    bool empty() const { return ops_.empty(); }

    const OpSymbol* find(const std::string& name) const;
    std::optional<std::size_t> index_of(const std::string& name) const;
    bool contains(const std::string& name) const { return find(name) != nullptr; }

    friend bool operator==(const Signature&, const Signature&) = default;

private:
    std::vector<OpSymbol> ops_;
    std::map<std::string, std::size_t> index_;
};

// First-order term: a variable or an operation applied to arguments. Arity is
// checked against a signature by `check_term`, not by construction, so terms
// can be built before the signature is complete (e.g. while parsing).
class Term {
public:
    static Term var(std::string name);
    static Term app(std::string op, std::vector<Term> args = {});

    bool is_var() const { return is_var_; }
    const std::string& name() const { return name_; }
    const std::vector<Term>& args() const { return args_; }

    std::size_t height() const;
    std::size_t node_count() const;
    void collect_vars(std::set<std::string>& out) const;
    void collect_ops(std::set<std::string>& out) const;
    std::string str() const;

    // Structural order: variables before applications, then by name, then
    // arguments lexicographically.
    friend std::strong_ordering operator<=>(const Term& a, const Term& b);
    friend bool operator==(const Term& a, const Term& b);

private:
    bool is_var_ = true;
    std::string name_;
    std::vector<Term> args_;
};

// Throws Error when an operation is unknown or applied to the wrong number
// of arguments.
void check_term(const Term& t, const Signature& sig);

// Replaces bound variables; unbound variables are left untouched.
Term substitute(const Term& t, const std::map<std::string, Term>& bindings);

// Renames operation symbols via `renaming`; absent names stay as they are.
Term rename_ops(const Term& t, const std::map<std::string, std::string>& renaming);

}  // namespace forge
