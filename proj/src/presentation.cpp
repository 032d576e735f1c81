#include "forge/presentation.hpp"

#include <mutex>

#include "forge/error.hpp"

namespace forge {

const FiniteSet& parameters(std::size_t n)
{
    static std::mutex mutex;
    static std::map<std::size_t, FiniteSet> cache;
    std::lock_guard lock(mutex);
    auto it = cache.find(n);
    if (it == cache.end()) {
        std::vector<Value> ps;
        for (std::size_t i = 0; i < n; ++i)
            ps.push_back(parameter(i));
        it = cache.emplace(n, FiniteSet(std::move(ps))).first;
    }
    return it->second;
}

const Value& parameter(std::size_t i)
{
    static std::mutex mutex;
    static std::vector<Value> ps;
    std::lock_guard lock(mutex);
    while (ps.size() <= i)
        ps.push_back(Value::atom("p" + std::to_string(ps.size())));
    return ps[i];
}

Value interpret(const Presentation& p, const FiniteSet& x, const Term& t, const std::map<std::string, Value>& env)
{
    if (t.is_var()) {
        auto it = env.find(t.name());
        if (it == env.end())
            throw Error("unassigned variable " + t.name());
        return p.monad.unit(x, it->second);
    }
    const OpSymbol* op = p.theory.signature().find(t.name());
    if (op == nullptr)
        throw Error("operation " + t.name() + " is not in " + p.theory.name());
    if (op->arity != t.args().size())
        throw Error("operation " + t.name() + " applied to the wrong number of arguments");
    std::vector<Value> params;
    std::vector<Value> children;
    for (std::size_t i = 0; i < t.args().size(); ++i) {
        params.push_back(parameter(i));
        children.push_back(interpret(p, x, t.args()[i], env));
    }
    KleisliMap f = [&](const Value& v) -> Value {
        for (std::size_t i = 0; i < params.size(); ++i)
            if (params[i] == v)
                return children[i];
        throw Error("value " + v.str() + " is not a parameter");
    };
    return p.monad.extend(parameters(op->arity), x, f, p.generic(*op));
}

Term reify_term(const Presentation& p, const FiniteSet& x, const Value& m)
{
    return p.reify(x, m, [](const Value& v) { return Term::var(v.str()); });
}

Value em_structure(const Presentation& p, const TableAlgebra& a, const FiniteSet& carrier, const Value& m)
{
    std::map<std::string, std::uint32_t> env;
    Term t = p.reify(carrier, m, [&](const Value& v) {
        std::string name = "v" + std::to_string(a.index_of(v));
        env[name] = static_cast<std::uint32_t>(a.index_of(v));
        return Term::var(name);
    });
    return a.elements[eval_term(a, t, env)];
}

namespace {

struct MonadName {
    std::string base;
    std::map<std::string, std::size_t> params;
};

// Splits a canonical monad name such as free:I=2:depth=2.
MonadName split_name(std::string_view name)
{
    MonadName out;
    std::size_t pos = 0;
    bool first = true;
    while (true) {
        std::size_t next = name.find(':', pos);
        std::string part(name.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
        auto eq = part.find('=');
        if (first || eq == std::string::npos) {
            out.base += (first ? "" : ":") + part;
        } else {
            out.params[part.substr(0, eq)] = std::stoul(part.substr(eq + 1));
        }
        first = false;
        if (next == std::string_view::npos)
            break;
        pos = next + 1;
    }
    return out;
}

using Leaf = std::function<Term(const Value&)>;

Term fold_right(const std::string& op, std::span<const Value> items, const Leaf& leaf)
{
    Term acc = leaf(items.back());
    for (std::size_t i = items.size() - 1; i > 0; --i)
        acc = Term::app(op, {leaf(items[i - 1]), std::move(acc)});
    return acc;
}

Term reify_tree(const Value& t, const Leaf& leaf)
{
    if (t.label() == "ret")
        return leaf(t.items()[0]);
    std::vector<Term> args;
    for (const auto& c : t.items())
        args.push_back(reify_tree(c, leaf));
    return Term::app(t.label(), std::move(args));
}

std::size_t state_index(const Value& s)
{
    return std::stoul(s.label().substr(1));
}

Presentation base_presentation(const FiniteMonad& monad)
{
    MonadName n = split_name(monad.name());
    Presentation p{Theory(), monad, nullptr, nullptr};
    if (n.base == "identity") {
        p.theory = builtin_theory("EmptyTheory");
        p.generic = [](const OpSymbol& op) -> Value { throw Error("identity has no operation " + op.name); };
        p.reify = [](const FiniteSet&, const Value& m, const Leaf& leaf) { return leaf(m); };
    } else if (n.base == "powerset:full" || n.base == "powerset:nonempty" || n.base == "list" ||
               n.base == "multiset") {
        bool powerset = n.base.starts_with("powerset");
        if (powerset)
            p.theory = builtin_theory(n.base == "powerset:full" ? "Semilattice" : "NonemptySemilattice");
        else
            p.theory = builtin_theory(n.base == "list" ? "Monoid" : "CommutativeMonoid");
        std::string binary = powerset ? "join" : "append";
        std::string unit = powerset ? "bot" : "nil";
        std::string base = n.base;
        p.generic = [base, binary](const OpSymbol& op) {
            std::vector<Value> items;
            if (op.name == binary)
                items = {parameter(0), parameter(1)};
            if (base.starts_with("powerset"))
                return Value::set(std::move(items));
            return base == "list" ? Value::seq(std::move(items)) : Value::bag(std::move(items));
        };
        p.reify = [binary, unit](const FiniteSet&, const Value& m, const Leaf& leaf) {
            if (m.size() == 0)
                return Term::app(unit);
            return fold_right(binary, m.items(), leaf);
        };
    } else if (n.base == "state") {
        std::size_t states = n.params.at("S");
        p.theory = builtin_theory("StateTheory(" + std::to_string(states) + ")");
        FiniteSet ss = atoms(states, "s");
        std::vector<Value> byIndex(states);
        for (const auto& s : ss)
            byIndex[state_index(s)] = s;
        p.generic = [byIndex](const OpSymbol& op) {
            std::vector<std::pair<Value, Value>> entries;
            for (std::size_t i = 0; i < byIndex.size(); ++i) {
                if (op.name == "lookup")
                    entries.emplace_back(byIndex[i], Value::pair(byIndex[i], parameter(i)));
                else
                    entries.emplace_back(byIndex[i], Value::pair(byIndex[std::stoul(op.name.substr(7))], parameter(0)));
            }
            return Value::table(std::move(entries));
        };
        p.reify = [byIndex](const FiniteSet&, const Value& m, const Leaf& leaf) {
            std::vector<Term> branches;
            for (const auto& s : byIndex) {
                const Value& step = m.at(s);
                branches.push_back(Term::app("update_" + std::to_string(state_index(step.first())), {leaf(step.second())}));
            }
            return Term::app("lookup", std::move(branches));
        };
    } else if (n.base == "free" || n.base == "output" || n.base == "sigma22") {
        if (n.base == "free")
            p.theory = builtin_theory("FreeOp(" + std::to_string(n.params.at("I")) + ")");
        else if (n.base == "output")
            p.theory = builtin_theory("Output(" + std::to_string(n.params.at("O")) + ")");
        else
            p.theory = builtin_theory("Sigma22Free");
        p.generic = [](const OpSymbol& op) {
            std::vector<Value> leaves;
            for (std::size_t i = 0; i < op.arity; ++i)
                leaves.push_back(Value::tag("ret", {parameter(i)}));
            return Value::tag(op.name, std::move(leaves));
        };
        p.reify = [](const FiniteSet&, const Value& m, const Leaf& leaf) { return reify_tree(m, leaf); };
    } else {
        throw Error("no presentation for monad " + monad.name());
    }
    return p;
}

}  // namespace

Presentation builtin_presentation(std::string_view name)
{
    FiniteMonad monad = builtin_monad(name);
    auto plus = monad.name().find("+exc");
    if (plus == std::string::npos)
        return base_presentation(monad);

    Presentation base = base_presentation(builtin_monad(std::string_view(monad.name()).substr(0, plus)));
    std::size_t count = split_name(monad.name().substr(plus + 1)).params.at("E");
    FiniteSet e = atoms(count, "e");
    std::vector<std::string> labels;
    for (const auto& v : e)
        labels.push_back(v.label());
    Theory theory = add_constants(base.theory, labels);
    // Constant name for each exception value, after clash qualification.
    std::map<std::string, Value> constants;
    for (const auto& v : e)
        constants[base.theory.signature().contains(v.label()) ? "const." + v.label() : v.label()] = v;

    Presentation p{theory, monad, nullptr, nullptr};
    FiniteMonad inner = base.monad;
    p.generic = [base, inner, constants, e](const OpSymbol& op) {
        auto c = constants.find(op.name);
        if (c != constants.end())
            return inner.unit(tagged_union(parameters(0), e), Value::tag("inr", {c->second}));
        const FiniteSet& ps = parameters(op.arity);
        return inner.fmap(ps, tagged_union(ps, e), [](const Value& v) { return Value::tag("inl", {v}); },
                          base.generic(op));
    };
    std::map<Value, std::string> constantOf;
    for (const auto& [name, v] : constants)
        constantOf.emplace(v, name);
    p.reify = [base, constantOf, e](const FiniteSet& x, const Value& m, const Leaf& leaf) {
        return base.reify(tagged_union(x, e), m, [&](const Value& tagged) {
            if (tagged.label() == "inl")
                return leaf(tagged.items()[0]);
            return Term::app(constantOf.at(tagged.items()[0]));
        });
    };
    return p;
}

std::vector<std::string> builtin_presentation_catalog()
{
    return {"identity",
            "powerset:full",
            "powerset:nonempty",
            "list:cap=3",
            "multiset:cap=3",
            "state:S=1",
            "state:S=2",
            "free:I=2:depth=2",
            "output:O=2",
            "sigma22:depth=1",
            "identity+exc:E=1",
            "powerset:full+exc:E=1",
            "state:S=1+exc:E=1"};
}

}  // namespace forge
