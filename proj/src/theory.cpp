#include "forge/theory.hpp"

#include <algorithm>
#include <functional>
#include <map>

#include "forge/error.hpp"

namespace forge {

namespace {

std::string var_name(const std::string& base, std::size_t i)
{
    return base + "_" + std::to_string(i);
}

std::string var_name(const std::string& base, std::size_t i, std::size_t j)
{
    return base + "_" + std::to_string(i) + "_" + std::to_string(j);
}

std::vector<std::string> context_of(const Term& a, const Term& b)
{
    std::set<std::string> vars;
    a.collect_vars(vars);
    b.collect_vars(vars);
    return {vars.begin(), vars.end()};
}

Equation eq_auto(Term lhs, Term rhs)
{
    auto ctx = context_of(lhs, rhs);
    return Equation(std::move(ctx), std::move(lhs), std::move(rhs));
}

}  // namespace

Equation::Equation(std::vector<std::string> ctx, Term l, Term r)
    : context(std::move(ctx)), lhs(std::move(l)), rhs(std::move(r))
{
    std::sort(context.begin(), context.end());
    context.erase(std::unique(context.begin(), context.end()), context.end());
}

std::string Equation::str() const
{
    std::string out = "(";
    for (std::size_t i = 0; i < context.size(); ++i) {
        if (i > 0)
            out += ',';
        out += context[i];
    }
    out += ") " + lhs.str() + " = " + rhs.str();
    return out;
}

Theory::Theory(std::string name, Signature sig) : name_(std::move(name)), sig_(std::move(sig)) {}

bool Theory::add_equation(Equation eq)
{
    check_term(eq.lhs, sig_);
    check_term(eq.rhs, sig_);
    std::set<std::string> vars;
    eq.lhs.collect_vars(vars);
    eq.rhs.collect_vars(vars);
    for (const auto& v : vars) {
        if (!std::binary_search(eq.context.begin(), eq.context.end(), v))
            throw Error("variable '" + v + "' of equation " + eq.str() + " is not in its context");
    }
    if (!keys_.insert(eq.str()).second)
        return false;
    equations_.push_back(std::move(eq));
    return true;
}

Theory theory_sum(const Theory& left, const Theory& right)
{
    std::map<std::string, std::string> renameLeft;
    std::map<std::string, std::string> renameRight;
    for (const auto& op : left.signature().ops()) {
        if (right.signature().contains(op.name)) {
            renameLeft[op.name] = "left." + op.name;
            renameRight[op.name] = "right." + op.name;
        }
    }
    Signature sig;
    for (const auto& op : left.signature().ops()) {
        auto it = renameLeft.find(op.name);
        sig.add({it == renameLeft.end() ? op.name : it->second, op.arity});
    }
    for (const auto& op : right.signature().ops()) {
        auto it = renameRight.find(op.name);
        sig.add({it == renameRight.end() ? op.name : it->second, op.arity});
    }
    Theory out("Sum(" + left.name() + "," + right.name() + ")", std::move(sig));
    for (const auto& eq : left.equations())
        out.add_equation({eq.context, rename_ops(eq.lhs, renameLeft), rename_ops(eq.rhs, renameLeft)});
    for (const auto& eq : right.equations())
        out.add_equation({eq.context, rename_ops(eq.lhs, renameRight), rename_ops(eq.rhs, renameRight)});
    return out;
}

Equation commutation_equation(const OpSymbol& f, const OpSymbol& g)
{
    const std::size_t n = f.arity;
    const std::size_t m = g.arity;
    std::vector<std::string> ctx;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j)
            ctx.push_back(var_name("x", i, j));

    std::vector<Term> rows;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<Term> row;
        for (std::size_t j = 0; j < m; ++j)
            row.push_back(Term::var(var_name("x", i, j)));
        rows.push_back(Term::app(g.name, std::move(row)));
    }
    std::vector<Term> cols;
    for (std::size_t j = 0; j < m; ++j) {
        std::vector<Term> col;
        for (std::size_t i = 0; i < n; ++i)
            col.push_back(Term::var(var_name("x", i, j)));
        cols.push_back(Term::app(f.name, std::move(col)));
    }
    return Equation(std::move(ctx), Term::app(f.name, std::move(rows)), Term::app(g.name, std::move(cols)));
}

Theory theory_tensor(const Theory& left, const Theory& right)
{
    Theory out = theory_sum(left, right);
    out.rename("Tensor(" + left.name() + "," + right.name() + ")");
    const auto& ops = out.signature().ops();
    const std::size_t nLeft = left.signature().size();
    for (std::size_t a = 0; a < nLeft; ++a)
        for (std::size_t b = nLeft; b < ops.size(); ++b)
            out.add_equation(commutation_equation(ops[a], ops[b]));
    return out;
}

Theory add_constants(const Theory& t, const std::vector<std::string>& labels)
{
    Signature sig = t.signature();
    std::set<std::string> seen;
    for (const auto& label : labels) {
        if (!seen.insert(label).second)
            continue;
        std::string name = sig.contains(label) ? "const." + label : label;
        sig.add({name, 0});
    }
    Theory out(labels.empty() ? t.name() : t.name() + "+Const", std::move(sig));
    for (const auto& eq : t.equations())
        out.add_equation(eq);
    return out;
}

namespace {

Theory semilattice(bool withBottom)
{
    Signature sig;
    sig.add({"join", 2});
    if (withBottom)
        sig.add({"bot", 0});
    Theory t(withBottom ? "Semilattice" : "NonemptySemilattice", std::move(sig));
    auto x = Term::var("x"), y = Term::var("y"), z = Term::var("z");
    auto join = [](Term a, Term b) { return Term::app("join", {std::move(a), std::move(b)}); };
    t.add_equation(eq_auto(join(join(x, y), z), join(x, join(y, z))));
    t.add_equation(eq_auto(join(x, y), join(y, x)));
    t.add_equation(eq_auto(join(x, x), x));
    if (withBottom)
        t.add_equation(eq_auto(join(x, Term::app("bot")), x));
    return t;
}

Theory monoid(bool commutative)
{
    Signature sig;
    sig.add({"append", 2});
    sig.add({"nil", 0});
    Theory t(commutative ? "CommutativeMonoid" : "Monoid", std::move(sig));
    auto x = Term::var("x"), y = Term::var("y"), z = Term::var("z");
    auto app = [](Term a, Term b) { return Term::app("append", {std::move(a), std::move(b)}); };
    auto nil = Term::app("nil");
    t.add_equation(eq_auto(app(app(x, y), z), app(x, app(y, z))));
    t.add_equation(eq_auto(app(nil, x), x));
    t.add_equation(eq_auto(app(x, nil), x));
    if (commutative)
        t.add_equation(eq_auto(app(x, y), app(y, x)));
    return t;
}

Theory spurious_analog(std::size_t n)
{
    if (n == 0)
        throw Error("SpuriousAnalog needs at least one constant");
    Signature sig;
    for (std::size_t a = 0; a < n; ++a)
        sig.add({"k" + std::to_string(a), 0});
    sig.add({"f", 3});
    Theory t("SpuriousAnalog(" + std::to_string(n) + ")", std::move(sig));
    auto k = [](std::size_t a) { return Term::app("k" + std::to_string(a)); };
    auto x = Term::var("x");
    for (std::size_t a = 0; a < n; ++a)
        t.add_equation(eq_auto(Term::app("f", {k(a), k(a), x}), k(0)));
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            if (a != b)
                t.add_equation(eq_auto(Term::app("f", {k(a), k(b), x}), x));
    return t;
}

// Single-location global state over n values: lookup is n-ary, update_v unary.
Theory state_theory(std::size_t n)
{
    if (n == 0)
        throw Error("StateTheory needs at least one value");
    Signature sig;
    sig.add({"lookup", n});
    for (std::size_t v = 0; v < n; ++v)
        sig.add({"update_" + std::to_string(v), 1});
    Theory t("StateTheory(" + std::to_string(n) + ")", std::move(sig));
    auto update = [](std::size_t v, Term a) { return Term::app("update_" + std::to_string(v), {std::move(a)}); };
    auto x = Term::var("x");

    t.add_equation(eq_auto(Term::app("lookup", std::vector<Term>(n, x)), x));

    std::vector<Term> nested, diagonal;
    for (std::size_t v = 0; v < n; ++v) {
        std::vector<Term> inner;
        for (std::size_t w = 0; w < n; ++w)
            inner.push_back(Term::var(var_name("x", v, w)));
        nested.push_back(Term::app("lookup", std::move(inner)));
        diagonal.push_back(Term::var(var_name("x", v, v)));
    }
    std::vector<std::string> ctx2;
    for (std::size_t v = 0; v < n; ++v)
        for (std::size_t w = 0; w < n; ++w)
            ctx2.push_back(var_name("x", v, w));
    t.add_equation(Equation(ctx2, Term::app("lookup", std::move(nested)), Term::app("lookup", std::move(diagonal))));

    std::vector<Term> xs;
    std::vector<std::string> ctx3;
    for (std::size_t w = 0; w < n; ++w) {
        xs.push_back(Term::var(var_name("x", w)));
        ctx3.push_back(var_name("x", w));
    }
    for (std::size_t v = 0; v < n; ++v)
        t.add_equation(Equation(ctx3, update(v, Term::app("lookup", xs)), update(v, xs[v])));

    for (std::size_t v = 0; v < n; ++v)
        for (std::size_t w = 0; w < n; ++w)
            t.add_equation(eq_auto(update(v, update(w, x)), update(w, x)));

    std::vector<Term> updates;
    for (std::size_t v = 0; v < n; ++v)
        updates.push_back(update(v, x));
    t.add_equation(eq_auto(Term::app("lookup", std::move(updates)), x));
    return t;
}

Theory free_op(std::size_t n)
{
    Signature sig;
    sig.add({"read", n});
    return Theory("FreeOp(" + std::to_string(n) + ")", std::move(sig));
}

Theory output_theory(std::size_t n)
{
    Signature sig;
    for (std::size_t o = 0; o < n; ++o)
        sig.add({"o" + std::to_string(o), 1});
    return Theory("Output(" + std::to_string(n) + ")", std::move(sig));
}

// Strict non-empty well-orders lowered to arities 1..n. On a carrier of at
// most n elements every higher iota is forced to bot by non-repetitiveness.
Theory well_order(std::size_t n)
{
    if (n == 0)
        throw Error("WellOrder needs a positive arity bound");
    auto iota = [](std::size_t k) { return "iota" + std::to_string(k); };
    Signature sig;
    sig.add({"bot", 0});
    for (std::size_t k = 1; k <= n; ++k)
        sig.add({iota(k), k});
    Theory t("WellOrder(" + std::to_string(n) + ")", std::move(sig));
    const Term bot = Term::app("bot");

    t.add_equation(eq_auto(Term::app(iota(1), {Term::var("x")}), Term::var("x")));

    for (std::size_t k = 1; k <= n; ++k) {
        for (std::size_t i = 0; i < k; ++i) {
            std::vector<Term> args;
            for (std::size_t j = 0; j < k; ++j)
                args.push_back(j == i ? bot : Term::var(var_name("x", j)));
            t.add_equation(eq_auto(Term::app(iota(k), std::move(args)), bot));
        }
    }
    for (std::size_t k = 2; k <= n; ++k) {
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t j = i + 1; j < k; ++j) {
                std::vector<Term> args;
                for (std::size_t l = 0; l < k; ++l)
                    args.push_back(Term::var(var_name("x", l == j ? i : l)));
                t.add_equation(eq_auto(Term::app(iota(k), std::move(args)), bot));
            }
        }
    }
    // Associativity over every composition k = k_0 + ... + k_{nu-1} <= n.
    std::function<void(std::vector<std::size_t>&, std::size_t)> compositions =
        [&](std::vector<std::size_t>& parts, std::size_t total) {
            if (!parts.empty()) {
                std::vector<Term> flat, grouped;
                for (std::size_t mu = 0; mu < parts.size(); ++mu) {
                    std::vector<Term> group;
                    for (std::size_t a = 0; a < parts[mu]; ++a) {
                        flat.push_back(Term::var(var_name("w", mu, a)));
                        group.push_back(Term::var(var_name("w", mu, a)));
                    }
                    grouped.push_back(Term::app(iota(parts[mu]), std::move(group)));
                }
                t.add_equation(
                    eq_auto(Term::app(iota(total), std::move(flat)), Term::app(iota(parts.size()), std::move(grouped))));
            }
            for (std::size_t next = 1; total + next <= n; ++next) {
                parts.push_back(next);
                compositions(parts, total + next);
                parts.pop_back();
            }
        };
    std::vector<std::size_t> parts;
    compositions(parts, 0);
    return t;
}

// Splits "Name(3)" into ("Name", 3); a missing parameter yields fallback.
std::pair<std::string, std::size_t> split_param(std::string_view name, std::size_t fallback)
{
    auto open = name.find('(');
    if (open == std::string_view::npos)
        return {std::string(name), fallback};
    if (name.back() != ')')
        throw Error("malformed theory name '" + std::string(name) + "'");
    std::string digits(name.substr(open + 1, name.size() - open - 2));
    if (digits.empty() || !std::all_of(digits.begin(), digits.end(), ::isdigit))
        throw Error("malformed parameter in theory name '" + std::string(name) + "'");
    return {std::string(name.substr(0, open)), std::stoul(digits)};
}

}  // namespace

Theory builtin_theory(std::string_view name)
{
    auto [base, n] = split_param(name, 0);
    auto needs = [&, &n = n, &base = base](std::size_t dflt) {
        std::size_t value = n == 0 ? dflt : n;
        if (value == 0)
            throw Error("theory " + base + " needs a positive parameter");
        return value;
    };
    if (base == "EmptyTheory")
        return Theory("EmptyTheory", Signature{});
    if (base == "Semilattice")
        return semilattice(true);
    if (base == "NonemptySemilattice")
        return semilattice(false);
    if (base == "Sigma22Free") {
        Signature sig;
        sig.add({"u0", 2});
        sig.add({"u1", 2});
        return Theory("Sigma22Free", std::move(sig));
    }
    if (base == "Monoid")
        return monoid(false);
    if (base == "CommutativeMonoid")
        return monoid(true);
    if (base == "Unary") {
        Signature sig;
        sig.add({"h", 1});
        return Theory("Unary", std::move(sig));
    }
    if (base == "SpuriousAnalog")
        return spurious_analog(needs(3));
    if (base == "StateTheory")
        return state_theory(needs(2));
    if (base == "FreeOp")
        return free_op(needs(2));
    if (base == "Output")
        return output_theory(needs(2));
    if (base == "WellOrder")
        return well_order(needs(3));
    throw Error("unknown theory '" + std::string(name) + "'");
}

std::vector<std::string> builtin_theory_names()
{
    return {"EmptyTheory", "Semilattice", "NonemptySemilattice", "Sigma22Free", "Monoid", "CommutativeMonoid",
            "Unary", "SpuriousAnalog(n)", "StateTheory(n)", "FreeOp(n)", "Output(n)", "WellOrder(n)"};
}

namespace {

void alpha_rename(const Term& t, std::map<std::string, std::string>& names, std::string& out)
{
    if (t.is_var()) {
        auto [it, inserted] = names.emplace(t.name(), "v" + std::to_string(names.size()));
        out += it->second;
        return;
    }
    out += t.name();
    out += '(';
    for (const auto& a : t.args()) {
        alpha_rename(a, names, out);
        out += ',';
    }
    out += ')';
}

std::string oriented_key(const Term& a, const Term& b)
{
    std::map<std::string, std::string> names;
    std::string out;
    alpha_rename(a, names, out);
    out += " = ";
    alpha_rename(b, names, out);
    return out;
}

}  // namespace

std::string equation_shape_key(const Equation& eq)
{
    return std::min(oriented_key(eq.lhs, eq.rhs), oriented_key(eq.rhs, eq.lhs));
}

}  // namespace forge
