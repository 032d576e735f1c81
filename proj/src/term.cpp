#include "forge/term.hpp"

#include <algorithm>

#include "forge/error.hpp"

namespace forge {

Signature::Signature(std::vector<OpSymbol> ops)
{
    for (auto& op : ops)
        add(std::move(op));
}

void Signature::add(OpSymbol op)
{
    if (index_.contains(op.name))
        throw Error("duplicate operation '" + op.name + "' in signature");
    index_.emplace(op.name, ops_.size());
    ops_.push_back(std::move(op));
}

const OpSymbol* Signature::find(const std::string& name) const
{
    auto it = index_.find(name);
    return it == index_.end() ? nullptr : &ops_[it->second];
}

std::optional<std::size_t> Signature::index_of(const std::string& name) const
{
    auto it = index_.find(name);
    if (it == index_.end())
        return std::nullopt;
    return it->second;
}

Term Term::var(std::string name)
{
    Term t;
    t.is_var_ = true;
    t.name_ = std::move(name);
    return t;
}

Term Term::app(std::string op, std::vector<Term> args)
{
    Term t;
    t.is_var_ = false;
    t.name_ = std::move(op);
    t.args_ = std::move(args);
    return t;
}

std::size_t Term::height() const
{
    std::size_t h = 0;
    for (const auto& a : args_)
        h = std::max(h, a.height() + 1);
    return h;
}

std::size_t Term::node_count() const
{
    std::size_t n = 1;
    for (const auto& a : args_)
        n += a.node_count();
    return n;
}

void Term::collect_vars(std::set<std::string>& out) const
{
    if (is_var_) {
        out.insert(name_);
        return;
    }
    for (const auto& a : args_)
        a.collect_vars(out);
}

void Term::collect_ops(std::set<std::string>& out) const
{
    if (is_var_)
        return;
    out.insert(name_);
    for (const auto& a : args_)
        a.collect_ops(out);
}

std::string Term::str() const
{
    if (is_var_ || args_.empty())
        return name_;
    std::string out = name_ + "(";
    for (std::size_t i = 0; i < args_.size(); ++i) {
        if (i > 0)
            out += ',';
        out += args_[i].str();
    }
    out += ')';
    return out;
}

std::strong_ordering operator<=>(const Term& a, const Term& b)
{
    if (a.is_var_ != b.is_var_)
        return a.is_var_ ? std::strong_ordering::less : std::strong_ordering::greater;
    if (auto c = a.name_.compare(b.name_); c != 0)
        return c < 0 ? std::strong_ordering::less : std::strong_ordering::greater;
    return std::lexicographical_compare_three_way(a.args_.begin(), a.args_.end(), b.args_.begin(),
                                                  b.args_.end());
}

bool operator==(const Term& a, const Term& b)
{
    return a.is_var_ == b.is_var_ && a.name_ == b.name_ && a.args_ == b.args_;
}

void check_term(const Term& t, const Signature& sig)
{
    if (t.is_var())
        return;
    const OpSymbol* op = sig.find(t.name());
    if (op == nullptr)
        throw Error("unknown operation '" + t.name() + "'");
    if (op->arity != t.args().size()) {
        throw Error("operation '" + t.name() + "' has arity " + std::to_string(op->arity) + " but is applied to " +
                    std::to_string(t.args().size()) + " arguments");
    }
    for (const auto& a : t.args())
        check_term(a, sig);
}

Term substitute(const Term& t, const std::map<std::string, Term>& bindings)
{
    if (t.is_var()) {
        auto it = bindings.find(t.name());
        return it == bindings.end() ? t : it->second;
    }
    std::vector<Term> args;
    args.reserve(t.args().size());
    for (const auto& a : t.args())
        args.push_back(substitute(a, bindings));
    return Term::app(t.name(), std::move(args));
}

Term rename_ops(const Term& t, const std::map<std::string, std::string>& renaming)
{
    if (t.is_var())
        return t;
    std::vector<Term> args;
    args.reserve(t.args().size());
    for (const auto& a : t.args())
        args.push_back(rename_ops(a, renaming));
    auto it = renaming.find(t.name());
    return Term::app(it == renaming.end() ? t.name() : it->second, std::move(args));
}

}  // namespace forge
