#include "forge/theory_dsl.hpp"

#include <algorithm>

#include "forge/error.hpp"
#include "forge/scanner.hpp"

namespace forge {

namespace {

Term read_term(Scanner& in, const Signature& sig, const std::set<std::string>* context)
{
    in.skip_space();
    std::size_t line = in.line();
    std::size_t column = in.column();
    std::string name = in.ident();
    bool isVar = context != nullptr ? context->contains(name) : !sig.contains(name);
    if (isVar) {
        if (in.peek() == '(')
            throw ParseError("variable '" + name + "' cannot take arguments", in.line(), in.column());
        return Term::var(std::move(name));
    }
    const OpSymbol* op = sig.find(name);
    if (op == nullptr)
        throw ParseError("'" + name + "' is neither a context variable nor a declared operation", line, column);
    std::vector<Term> args;
    if (in.try_consume("(")) {
        if (!in.try_consume(")")) {
            do {
                args.push_back(read_term(in, sig, context));
            } while (in.try_consume(","));
            in.expect(")");
        }
    }
    if (args.size() != op->arity) {
        throw ParseError("operation '" + name + "' expects " + std::to_string(op->arity) + " arguments, got " +
                             std::to_string(args.size()),
                         line, column);
    }
    return Term::app(std::move(name), std::move(args));
}

}  // namespace

Theory parse_theory(std::string_view text)
{
    Scanner in(text);
    if (!in.try_keyword("theory"))
        in.fail("expected 'theory'");
    // Names of combined theories such as Tensor(A,B) are kept verbatim.
    std::string name;
    in.skip_space();
    while (!in.at_end() && in.peek() != '{') {
        char c = in.peek_raw();
        if (c == '\n' || c == '}' || c == ';')
            in.fail("expected '{'");
        name += c;
        in.try_consume(std::string(1, c));
    }
    while (!name.empty() && std::isspace(static_cast<unsigned char>(name.back())))
        name.pop_back();
    if (name.empty())
        in.fail("expected theory name");
    in.expect("{");

    Signature sig;
    struct PendingEq {
        std::vector<std::string> context;
        Term lhs, rhs;
    };
    std::vector<PendingEq> eqs;

    while (!in.try_consume("}")) {
        if (in.try_keyword("op")) {
            in.skip_space();
            std::size_t line = in.line(), column = in.column();
            std::string opName = in.ident();
            in.expect(":");
            std::size_t arity = in.number();
            in.expect(";");
            if (sig.contains(opName))
                throw ParseError("duplicate operation '" + opName + "'", line, column);
            sig.add({opName, arity});
        } else if (in.try_keyword("eq")) {
            in.expect("(");
            std::set<std::string> context;
            if (!in.try_consume(")")) {
                do {
                    context.insert(in.ident());
                } while (in.try_consume(","));
                in.expect(")");
            }
            Term lhs = read_term(in, sig, &context);
            in.expect("=");
            Term rhs = read_term(in, sig, &context);
            in.expect(";");
            eqs.push_back({{context.begin(), context.end()}, std::move(lhs), std::move(rhs)});
        } else {
            in.fail("expected 'op', 'eq' or '}'");
        }
    }
    if (!in.at_end())
        in.fail("unexpected text after theory");

    Theory t(std::move(name), std::move(sig));
    for (auto& e : eqs)
        t.add_equation(Equation(std::move(e.context), std::move(e.lhs), std::move(e.rhs)));
    return t;
}

Term parse_term(std::string_view text, const Signature& sig)
{
    Scanner in(text);
    Term t = read_term(in, sig, nullptr);
    if (!in.at_end())
        in.fail("unexpected text after term");
    return t;
}

std::string print_theory(const Theory& t)
{
    std::string out = "theory " + t.name() + " {\n";
    for (const auto& op : t.signature().ops())
        out += "  op " + op.name + " : " + std::to_string(op.arity) + ";\n";
    for (const auto& eq : t.equations()) {
        out += "  eq (";
        for (std::size_t i = 0; i < eq.context.size(); ++i)
            out += (i > 0 ? ", " : "") + eq.context[i];
        out += ") " + eq.lhs.str() + " = " + eq.rhs.str() + ";\n";
    }
    out += "}\n";
    return out;
}

nlohmann::json theory_to_json(const Theory& t)
{
    auto ops = t.signature().ops();
    std::sort(ops.begin(), ops.end(), [](const OpSymbol& a, const OpSymbol& b) { return a.name < b.name; });
    nlohmann::json jops = nlohmann::json::array();
    for (const auto& op : ops)
        jops.push_back({{"name", op.name}, {"arity", op.arity}});

    std::vector<const Equation*> eqs;
    for (const auto& eq : t.equations())
        eqs.push_back(&eq);
    auto key = [](const Equation* e) { return e->lhs.str() + " = " + e->rhs.str(); };
    std::stable_sort(eqs.begin(), eqs.end(), [&](auto* a, auto* b) { return key(a) < key(b); });
    nlohmann::json jeqs = nlohmann::json::array();
    for (const auto* eq : eqs)
        jeqs.push_back({{"context", eq->context}, {"lhs", eq->lhs.str()}, {"rhs", eq->rhs.str()}});

    return {{"name", t.name()}, {"ops", jops}, {"equations", jeqs}};
}

}  // namespace forge
