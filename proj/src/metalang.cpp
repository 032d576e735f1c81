#include "forge/metalang.hpp"

#include <functional>
#include <set>
#include <sstream>

#include "forge/scanner.hpp"

namespace forge {

std::string MLType::str() const
{
    switch (kind) {
    case Kind::Unit: return "1";
    case Kind::Base: return name;
    case Kind::Product: {
        const MLType& l = parts[0];
        std::string left = l.kind == Kind::Product ? "(" + l.str() + ")" : l.str();
        return left + " * " + parts[1].str();
    }
    case Kind::Monadic: {
        const MLType& a = parts[0];
        return a.kind == Kind::Product ? "T (" + a.str() + ")" : "T " + a.str();
    }
    }
    return "?";
}

namespace {

MLType type_product(Scanner& s);

MLType type_unary(Scanner& s)
{
    if (s.try_consume("(")) {
        MLType t = type_product(s);
        s.expect(")");
        return t;
    }
    if (s.try_consume("1"))
        return MLType::unit();
    if (s.try_keyword("T"))
        return MLType::monadic(type_unary(s));
    return MLType::base(s.ident());
}

MLType type_product(Scanner& s)
{
    MLType left = type_unary(s);
    if (s.try_consume("*"))
        return MLType::product(std::move(left), type_product(s));
    return left;
}

const std::set<std::string>& keywords()
{
    static const std::set<std::string> words{"do", "ret", "fst", "snd", "star"};
    return words;
}

bool starts_term(Scanner& s)
{
    char c = s.peek();
    return c == '(' || c == '*' || Scanner::is_ident_char(c);
}

MLTerm parse_term_at(Scanner& s)
{
    if (s.try_keyword("do")) {
        std::string x = s.ident();
        if (keywords().contains(x))
            s.fail("keyword '" + x + "' cannot be bound");
        s.expect("<-");
        MLTerm bound = parse_term_at(s);
        s.expect(";");
        MLTerm body = parse_term_at(s);
        return MLTerm::bind(std::move(x), std::move(bound), std::move(body));
    }
    if (s.try_keyword("ret"))
        return MLTerm::ret(parse_term_at(s));
    if (s.try_keyword("fst"))
        return MLTerm::fst(parse_term_at(s));
    if (s.try_keyword("snd"))
        return MLTerm::snd(parse_term_at(s));
    if (s.try_keyword("star") || s.try_consume("*"))
        return MLTerm::star();
    if (s.try_consume("(")) {
        MLTerm first = parse_term_at(s);
        if (s.try_consume(",")) {
            MLTerm second = parse_term_at(s);
            s.expect(")");
            return MLTerm::pair(std::move(first), std::move(second));
        }
        s.expect(")");
        return first;
    }
    if (!s.at_ident())
        s.fail("expected a term");
    std::string name = s.ident();
    if (starts_term(s))
        return MLTerm::apply(std::move(name), parse_term_at(s));
    return MLTerm::var(std::move(name));
}

}  // namespace

MLType parse_type(std::string_view text)
{
    Scanner s(text);
    MLType t = type_product(s);
    if (!s.at_end())
        s.fail("unexpected text after type");
    return t;
}

MLTerm MLTerm::var(std::string name) { return MLTerm(std::make_shared<Node>(Node{Kind::Var, std::move(name), {}})); }
MLTerm MLTerm::apply(std::string function, MLTerm arg)
{
    return MLTerm(std::make_shared<Node>(Node{Kind::Apply, std::move(function), {std::move(arg)}}));
}
MLTerm MLTerm::star() { return MLTerm(std::make_shared<Node>(Node{Kind::Star, {}, {}})); }
MLTerm MLTerm::pair(MLTerm a, MLTerm b)
{
    return MLTerm(std::make_shared<Node>(Node{Kind::Pair, {}, {std::move(a), std::move(b)}}));
}
MLTerm MLTerm::fst(MLTerm t) { return MLTerm(std::make_shared<Node>(Node{Kind::Fst, {}, {std::move(t)}})); }
MLTerm MLTerm::snd(MLTerm t) { return MLTerm(std::make_shared<Node>(Node{Kind::Snd, {}, {std::move(t)}})); }
MLTerm MLTerm::ret(MLTerm t) { return MLTerm(std::make_shared<Node>(Node{Kind::Ret, {}, {std::move(t)}})); }
MLTerm MLTerm::bind(std::string x, MLTerm bound, MLTerm body)
{
    return MLTerm(std::make_shared<Node>(Node{Kind::Do, std::move(x), {std::move(bound), std::move(body)}}));
}

bool operator==(const MLTerm& a, const MLTerm& b)
{
    if (a.node_ == b.node_)
        return true;
    return a.kind() == b.kind() && a.name() == b.name() && a.children() == b.children();
}

std::string MLTerm::str() const
{
    auto arg = [](const MLTerm& t) { return t.kind() == Kind::Do ? "(" + t.str() + ")" : t.str(); };
    switch (kind()) {
    case Kind::Var: return name();
    case Kind::Apply: return name() + " " + arg(children()[0]);
    case Kind::Star: return "*";
    case Kind::Pair: return "(" + children()[0].str() + ", " + children()[1].str() + ")";
    case Kind::Fst: return "fst " + arg(children()[0]);
    case Kind::Snd: return "snd " + arg(children()[0]);
    case Kind::Ret: return "ret " + arg(children()[0]);
    case Kind::Do: return "do " + name() + " <- " + arg(children()[0]) + "; " + children()[1].str();
    }
    return "?";
}

MLTerm parse_ml_term(std::string_view text)
{
    Scanner s(text);
    MLTerm t = parse_term_at(s);
    if (!s.at_end())
        s.fail("unexpected text after term");
    return t;
}

namespace {

// A term annotated with types, variables resolved to environment slots.
struct Typed {
    MLTerm::Kind kind;
    MLType type;
    std::size_t slot = 0;            // Var: index into the environment
    const MLFunction* fn = nullptr;  // Apply
    std::string fnName;
    std::vector<Typed> children;
    // Filled by Evaluator::prepare for the current interpretation.
    const Value* table = nullptr;      // Apply
    const FiniteSet* dom = nullptr;    // Ret: carrier of the argument; Do: of the bound value
    const FiniteSet* cod = nullptr;    // Do: carrier of the result
};

void check_type(const MLType& a, const MLSignature& sig)
{
    if (a.kind == MLType::Kind::Base && !sig.bases.contains(a.name))
        throw TypeError("type", "unknown base type " + a.name);
    for (const auto& p : a.parts)
        check_type(p, sig);
}

Typed annotate(MLContext& ctx, const MLTerm& t, const MLSignature& sig)
{
    using K = MLTerm::Kind;
    Typed out{t.kind(), {}, 0, nullptr, {}, {}, nullptr, nullptr, nullptr};
    switch (t.kind()) {
    case K::Var: {
        for (std::size_t i = ctx.size(); i-- > 0;) {
            if (ctx[i].first == t.name()) {
                out.slot = i;
                out.type = ctx[i].second;
                return out;
            }
        }
        throw TypeError("var", "unbound variable " + t.name());
    }
    case K::Star: out.type = MLType::unit(); return out;
    case K::Apply: {
        auto it = sig.functions.find(t.name());
        if (it == sig.functions.end())
            throw TypeError("apply", t.name() + " is not a function symbol");
        out.children.push_back(annotate(ctx, t.children()[0], sig));
        if (out.children[0].type != it->second.dom)
            throw TypeError("apply", t.name() + " expects " + it->second.dom.str() + ", got " +
                                         out.children[0].type.str());
        out.fn = &it->second;
        out.fnName = t.name();
        out.type = it->second.cod;
        return out;
    }
    case K::Pair:
        out.children.push_back(annotate(ctx, t.children()[0], sig));
        out.children.push_back(annotate(ctx, t.children()[1], sig));
        out.type = MLType::product(out.children[0].type, out.children[1].type);
        return out;
    case K::Fst:
    case K::Snd: {
        const char* rule = t.kind() == K::Fst ? "fst" : "snd";
        out.children.push_back(annotate(ctx, t.children()[0], sig));
        const MLType& a = out.children[0].type;
        if (a.kind != MLType::Kind::Product)
            throw TypeError(rule, "expected a product, got " + a.str());
        out.type = a.parts[t.kind() == K::Fst ? 0 : 1];
        return out;
    }
    case K::Ret:
        out.children.push_back(annotate(ctx, t.children()[0], sig));
        out.type = MLType::monadic(out.children[0].type);
        return out;
    case K::Do: {
        out.children.push_back(annotate(ctx, t.children()[0], sig));
        const MLType& p = out.children[0].type;
        if (p.kind != MLType::Kind::Monadic)
            throw TypeError("do", "bound term " + t.children()[0].str() + " has type " + p.str() +
                                      ", not T A");
        ctx.emplace_back(t.name(), p.parts[0]);
        try {
            out.children.push_back(annotate(ctx, t.children()[1], sig));
        } catch (...) {
            ctx.pop_back();
            throw;
        }
        ctx.pop_back();
        const MLType& q = out.children[1].type;
        if (q.kind != MLType::Kind::Monadic)
            throw TypeError("do", "body " + t.children()[1].str() + " has type " + q.str() + ", not T B");
        out.type = q;
        return out;
    }
    }
    throw TypeError("term", "unknown term");
}

class Evaluator {
public:
    Evaluator(const FiniteMonad& m, const MLInterpretation& in) : m_(m), in_(in) {}

    const FiniteSet& carrier(const MLType& a)
    {
        std::string key = a.str();
        auto it = carriers_.find(key);
        if (it == carriers_.end())
            it = carriers_.emplace(key, ml_carrier(a, m_, in_)).first;
        return it->second;
    }

    // Resolves carriers and function tables; must be called again whenever
    // the interpretation gains a function entry.
    void prepare(Typed& t)
    {
        using K = MLTerm::Kind;
        for (auto& c : t.children)
            prepare(c);
        if (t.kind == K::Apply) {
            auto it = in_.functions.find(t.fnName);
            t.table = it != in_.functions.end() ? &it->second : t.fn->table ? &*t.fn->table : nullptr;
            if (t.table == nullptr)
                throw Error("function symbol " + t.fnName + " has no table");
        } else if (t.kind == K::Ret) {
            t.dom = &carrier(t.children[0].type);
        } else if (t.kind == K::Do) {
            t.dom = &carrier(t.children[0].type.parts[0]);
            t.cod = &carrier(t.type.parts[0]);
        }
    }

    Value eval(const Typed& t, std::vector<Value>& env)
    {
        using K = MLTerm::Kind;
        switch (t.kind) {
        case K::Var: return env[t.slot];
        case K::Star: return Value::unit();
        case K::Apply: return t.table->at(eval(t.children[0], env));
        case K::Pair: return Value::pair(eval(t.children[0], env), eval(t.children[1], env));
        case K::Fst: return eval(t.children[0], env).first();
        case K::Snd: return eval(t.children[0], env).second();
        case K::Ret: return m_.unit(*t.dom, eval(t.children[0], env));
        case K::Do: {
            Value p = eval(t.children[0], env);
            const Typed& body = t.children[1];
            KleisliMap f = [&](const Value& a) {
                env.push_back(a);
                Value r = eval(body, env);
                env.pop_back();
                return r;
            };
            return m_.extend(*t.dom, *t.cod, f, p);
        }
        }
        throw Error("unknown term");
    }

private:
    const FiniteMonad& m_;
    const MLInterpretation& in_;
    std::map<std::string, FiniteSet> carriers_;
};

}  // namespace

MLType typecheck(const MLContext& ctx, const MLTerm& t, const MLSignature& sig)
{
    for (const auto& [name, type] : ctx)
        check_type(type, sig);
    MLContext scratch = ctx;
    return annotate(scratch, t, sig).type;
}

FiniteSet ml_carrier(const MLType& a, const FiniteMonad& m, const MLInterpretation& in)
{
    switch (a.kind) {
    case MLType::Kind::Unit: return FiniteSet({Value::unit()});
    case MLType::Kind::Base: {
        auto it = in.bases.find(a.name);
        if (it == in.bases.end())
            throw Error("no carrier for base type " + a.name);
        return it->second;
    }
    case MLType::Kind::Product: return product(ml_carrier(a.parts[0], m, in), ml_carrier(a.parts[1], m, in));
    case MLType::Kind::Monadic: return m.carrier(ml_carrier(a.parts[0], m, in));
    }
    throw Error("unknown type");
}

Value evaluate(const MLTerm& t, const FiniteMonad& m, const MLSignature& sig, const MLInterpretation& in,
               const MLContext& ctx, const std::vector<Value>& env)
{
    if (env.size() != ctx.size())
        throw Error("environment does not match the context");
    MLContext scratch = ctx;
    Typed typed = annotate(scratch, t, sig);
    Evaluator ev(m, in);
    ev.prepare(typed);
    std::vector<Value> values = env;
    return ev.eval(typed, values);
}

nlohmann::json EquivResult::to_json() const
{
    nlohmann::json j{{"status", equal ? "pass" : "fail"}, {"checked", checked}, {"exhaustive", exhaustive}};
    if (witness)
        j["witness"] = *witness;
    return j;
}

namespace {

void collect_bases(const MLType& a, std::set<std::string>& out)
{
    if (a.kind == MLType::Kind::Base)
        out.insert(a.name);
    for (const auto& p : a.parts)
        collect_bases(p, out);
}

std::string lower(std::string s)
{
    for (auto& c : s)
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

}  // namespace

EquivResult equiv(const MLContext& ctx, const MLTerm& a, const MLTerm& b, const FiniteMonad& m,
                  const MLSignature& sig, const EquivOptions& options)
{
    MLType ta = typecheck(ctx, a, sig);
    MLType tb = typecheck(ctx, b, sig);
    if (ta != tb)
        throw TypeError("equiv", "sides have types " + ta.str() + " and " + tb.str());
    MLContext scratch = ctx;
    Typed typedA = annotate(scratch, a, sig);
    Typed typedB = annotate(scratch, b, sig);

    std::vector<std::string> freeBases;
    for (const auto& [name, carrier] : sig.bases)
        if (!carrier)
            freeBases.push_back(name);
    std::vector<std::string> freeFns;
    for (const auto& [name, fn] : sig.functions)
        if (!fn.table)
            freeFns.push_back(name);

    EquivResult out;
    MLInterpretation in;
    for (const auto& [name, carrier] : sig.bases)
        if (carrier)
            in.bases[name] = *carrier;

    // Environments: context values, innermost loop.
    auto run_values = [&](Evaluator& ev) {
        std::vector<const FiniteSet*> sets;
        for (const auto& [name, type] : ctx)
            sets.push_back(&ev.carrier(type));
        std::vector<std::size_t> pick(ctx.size(), 0);
        for (auto* s : sets)
            if (s->empty())
                return true;
        ev.prepare(typedA);
        ev.prepare(typedB);
        std::vector<Value> env(ctx.size());
        while (true) {
            if (out.checked >= options.budget) {
                out.exhaustive = false;
                return false;
            }
            ++out.checked;
            for (std::size_t i = 0; i < ctx.size(); ++i)
                env[i] = (*sets[i])[pick[i]];
            Value va = ev.eval(typedA, env);
            Value vb = ev.eval(typedB, env);
            if (va != vb) {
                nlohmann::json w;
                for (const auto& [name, carrier] : in.bases)
                    w["bases"][name] = carrier.str();
                for (const auto& [name, table] : in.functions)
                    w["functions"][name] = table.str();
                for (std::size_t i = 0; i < ctx.size(); ++i)
                    w["env"][ctx[i].first] = env[i].str();
                w["lhs"] = va.str();
                w["rhs"] = vb.str();
                out.equal = false;
                out.witness = std::move(w);
                return false;
            }
            std::size_t i = ctx.size();
            while (i > 0 && ++pick[i - 1] == sets[i - 1]->size())
                pick[--i] = 0;
            if (i == 0)
                return true;
        }
    };

    std::function<bool(std::size_t, Evaluator&)> run_fns = [&](std::size_t k, Evaluator& ev) -> bool {
        if (k == freeFns.size())
            return run_values(ev);
        const MLFunction& fn = sig.functions.at(freeFns[k]);
        const FiniteSet& dom = ev.carrier(fn.dom);
        const FiniteSet& cod = ev.carrier(fn.cod);
        return for_each_tuple(dom.size(), cod.size(), [&](std::span<const std::size_t> choice) {
            std::vector<std::pair<Value, Value>> entries;
            for (std::size_t i = 0; i < dom.size(); ++i)
                entries.emplace_back(dom[i], cod[choice[i]]);
            in.functions[freeFns[k]] = Value::table(std::move(entries));
            return run_fns(k + 1, ev);
        });
    };

    std::function<bool(std::size_t)> run_bases = [&](std::size_t k) -> bool {
        if (k == freeBases.size()) {
            Evaluator ev(m, in);
            return run_fns(0, ev);
        }
        for (std::size_t n = 0; n <= options.sizeBound; ++n) {
            in.bases[freeBases[k]] = atoms(n, lower(freeBases[k]));
            if (!run_bases(k + 1))
                return false;
        }
        return true;
    };
    run_bases(0);
    return out;
}

MLProgram parse_program(std::string_view text)
{
    MLProgram out;
    std::istringstream lines{std::string(text)};
    std::string line;
    std::string termText;
    bool inTerm = false;
    std::size_t lineNo = 0;
    auto fail = [&](const std::string& message) { throw ParseError(message, lineNo, 1); };
    while (std::getline(lines, line)) {
        ++lineNo;
        if (inTerm) {
            termText += line + "\n";
            continue;
        }
        std::string body = line.substr(0, line.find('#'));
        std::istringstream words(body);
        std::string keyword;
        if (!(words >> keyword))
            continue;
        std::string rest;
        std::getline(words, rest);
        if (keyword == "term") {
            inTerm = true;
            termText = rest + "\n";
        } else if (keyword == "base") {
            auto eq = rest.find('=');
            std::string name = rest.substr(0, eq);
            name.erase(0, name.find_first_not_of(" \t"));
            name.erase(name.find_last_not_of(" \t") + 1);
            if (name.empty() || name == "T")
                fail("bad base type name");
            if (eq == std::string::npos) {
                out.sig.bases[name] = std::nullopt;
            } else {
                Value v = parse_value(rest.substr(eq + 1));
                if (!v.is(ValueKind::Set))
                    fail("base carrier must be a set");
                out.sig.bases[name] = FiniteSet(std::vector<Value>(v.items().begin(), v.items().end()));
            }
        } else if (keyword == "fun") {
            auto colon = rest.find(':');
            auto eq = rest.find('=');
            if (colon == std::string::npos)
                fail("fun needs ': A -> B'");
            std::string name = rest.substr(0, colon);
            name.erase(0, name.find_first_not_of(" \t"));
            name.erase(name.find_last_not_of(" \t") + 1);
            std::string sigText = rest.substr(colon + 1, eq == std::string::npos ? std::string::npos : eq - colon - 1);
            auto arrow = sigText.find("->");
            if (arrow == std::string::npos)
                fail("fun needs ': A -> B'");
            MLFunction fn{parse_type(sigText.substr(0, arrow)), parse_type(sigText.substr(arrow + 2)), std::nullopt};
            if (eq != std::string::npos)
                fn.table = parse_value(rest.substr(eq + 1));
            out.sig.functions[name] = std::move(fn);
        } else if (keyword == "var") {
            auto colon = rest.find(':');
            if (colon == std::string::npos)
                fail("var needs ': A'");
            std::string name = rest.substr(0, colon);
            name.erase(0, name.find_first_not_of(" \t"));
            name.erase(name.find_last_not_of(" \t") + 1);
            out.ctx.emplace_back(name, parse_type(rest.substr(colon + 1)));
        } else {
            fail("unknown declaration '" + keyword + "'");
        }
    }
    if (!inTerm)
        throw ParseError("missing 'term'", lineNo, 1);
    out.term = parse_ml_term(termText);
    return out;
}

std::pair<MLProgram, MLProgram> law_programs(std::string_view law)
{
    std::string decls, lhs, rhs;
    if (law == "left-unit") {
        decls = "base A\nbase B\nfun g : A -> T B\nvar a : A\n";
        lhs = "do x <- ret a; g x";
        rhs = "g a";
    } else if (law == "right-unit") {
        decls = "base A\nvar p : T A\n";
        lhs = "do x <- p; ret x";
        rhs = "p";
    } else if (law == "associativity") {
        decls = "base A\nbase B\nbase C\nfun g : A -> T B\nfun h : B -> T C\nvar p : T A\n";
        lhs = "do x <- (do y <- p; g y); h x";
        rhs = "do y <- p; do x <- g y; h x";
    } else if (law == "comm") {
        decls = "base A\nbase B\nvar p : T A\nvar q : T B\n";
        lhs = "do x <- p; do y <- q; ret (x, y)";
        rhs = "do y <- q; do x <- p; ret (x, y)";
    } else {
        throw Error("unknown law program '" + std::string(law) + "'");
    }
    return {parse_program(decls + "term " + lhs), parse_program(decls + "term " + rhs)};
}

}  // namespace forge
