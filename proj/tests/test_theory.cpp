#include <doctest.h>

#include "forge/error.hpp"
#include "forge/theory.hpp"
#include "forge/theory_dsl.hpp"

using namespace forge;

namespace {

bool well_formed(const Theory& t)
{
    for (const auto& eq : t.equations()) {
        std::set<std::string> ops;
        eq.lhs.collect_ops(ops);
        eq.rhs.collect_ops(ops);
        for (const auto& op : ops)
            if (!t.signature().contains(op))
                return false;
    }
    return true;
}

std::multiset<std::string> shapes(const Theory& t, const std::map<std::string, std::string>& renaming = {})
{
    std::multiset<std::string> out;
    for (const auto& eq : t.equations())
        out.insert(equation_shape_key({eq.context, rename_ops(eq.lhs, renaming), rename_ops(eq.rhs, renaming)}));
    return out;
}

}  // namespace

TEST_CASE("substitute")
{
    auto x = Term::var("x"), y = Term::var("y"), z = Term::var("z");
    auto bot = Term::app("bot");
    CHECK(substitute(x, {{"x", bot}}) == bot);
    CHECK(substitute(Term::app("join", {x, y}), {{"x", y}}) == Term::app("join", {y, y}));
    CHECK(substitute(Term::app("join", {x, z}), {{"x", bot}}) == Term::app("join", {bot, z}));
}

TEST_CASE("builtin theories have the documented sizes")
{
    auto sl = builtin_theory("Semilattice");
    CHECK(sl.signature().size() == 2);
    CHECK(sl.equations().size() == 4);

    auto sp = builtin_theory("SpuriousAnalog(3)");
    CHECK(sp.signature().size() == 4);
    CHECK(sp.equations().size() == 3 + 6);

    auto s22 = builtin_theory("Sigma22Free");
    CHECK(s22.signature().size() == 2);
    CHECK(s22.equations().empty());

    // 1 + 1 + |V| + |V|^2 + 1 axioms.
    for (std::size_t n = 1; n <= 3; ++n)
        CHECK(builtin_theory("StateTheory(" + std::to_string(n) + ")").equations().size() == 3 + n + n * n);

    CHECK_THROWS_AS(builtin_theory("Nope"), Error);
    CHECK_THROWS_AS(builtin_theory("StateTheory(x)"), Error);
    for (const auto& name : builtin_theory_names()) {
        std::string concrete = name;
        if (auto pos = concrete.find("(n)"); pos != std::string::npos)
            concrete.replace(pos, 3, "(2)");
        CHECK(well_formed(builtin_theory(concrete)));
    }
}

TEST_CASE("sum is a disjoint union")
{
    auto sl = builtin_theory("Semilattice");
    auto s22 = builtin_theory("Sigma22Free");
    auto sum = theory_sum(sl, s22);
    CHECK(sum.signature().size() == sl.signature().size() + s22.signature().size());
    CHECK(sum.equations().size() == sl.equations().size() + s22.equations().size());

    auto self = theory_sum(sl, sl);
    CHECK(self.signature().size() == 4);
    CHECK(self.signature().contains("left.join"));
    CHECK(self.signature().contains("right.bot"));
    CHECK(self.equations().size() == 8);
    CHECK(well_formed(self));

    auto withEmpty = theory_sum(sl, builtin_theory("EmptyTheory"));
    CHECK(withEmpty.signature() == sl.signature());
    CHECK(withEmpty.equations() == sl.equations());
}

TEST_CASE("tensor adds one commutation equation per pair")
{
    auto sl = builtin_theory("Semilattice");
    auto s22 = builtin_theory("Sigma22Free");
    auto tensor = theory_tensor(sl, s22);
    CHECK(tensor.equations().size() == sl.equations().size() + s22.equations().size() + 2 * 2);
    CHECK(well_formed(tensor));

    auto botU0 = commutation_equation({"bot", 0}, {"u0", 2});
    CHECK(botU0.lhs == Term::app("bot"));
    CHECK(botU0.rhs == Term::app("u0", {Term::app("bot"), Term::app("bot")}));
    CHECK(botU0.context.empty());

    auto sum = theory_sum(sl, s22);
    for (const auto& eq : sum.equations())
        CHECK(std::find(tensor.equations().begin(), tensor.equations().end(), eq) != tensor.equations().end());

    auto withEmpty = theory_tensor(sl, builtin_theory("EmptyTheory"));
    CHECK(withEmpty.equations().size() == sl.equations().size());
}

TEST_CASE("tensor is symmetric up to renaming and orientation")
{
    std::vector<std::pair<std::string, std::string>> pairs = {
        {"Semilattice", "Sigma22Free"}, {"StateTheory(2)", "Semilattice"}, {"Monoid", "Monoid"}, {"Unary", "SpuriousAnalog(2)"}};
    for (const auto& [a, b] : pairs) {
        CAPTURE(a);
        CAPTURE(b);
        auto ta = builtin_theory(a), tb = builtin_theory(b);
        auto ab = theory_tensor(ta, tb);
        auto ba = theory_tensor(tb, ta);
        std::map<std::string, std::string> swap;
        for (const auto& op : ab.signature().ops()) {
            if (op.name.starts_with("left."))
                swap[op.name] = "right." + op.name.substr(5);
            else if (op.name.starts_with("right."))
                swap[op.name] = "left." + op.name.substr(6);
        }
        CHECK(shapes(ab, swap) == shapes(ba));
        CHECK(ab.equations().size() == ta.equations().size() + tb.equations().size() +
                                           ta.signature().size() * tb.signature().size());
    }
}

TEST_CASE("constants extend the signature only")
{
    auto sl = builtin_theory("Semilattice");
    auto ext = add_constants(sl, {"err"});
    CHECK(ext.signature().size() == 3);
    CHECK(ext.equations() == sl.equations());
    CHECK(add_constants(sl, {}).signature() == sl.signature());
    auto clash = add_constants(sl, {"bot"});
    CHECK(clash.signature().contains("const.bot"));
    auto two = add_constants(builtin_theory("EmptyTheory"), {"a", "b"});
    CHECK(two.signature().size() == 2);
    CHECK(two.equations().empty());
}

TEST_CASE("theory language round trip")
{
    for (const char* name : {"Semilattice", "StateTheory(2)", "SpuriousAnalog(3)", "WellOrder(3)"}) {
        auto t = builtin_theory(name);
        auto text = print_theory(theory_sum(t, builtin_theory("Unary")));
        auto back = parse_theory(text);
        CHECK(print_theory(back) == text);
        CHECK(theory_to_json(back) == theory_to_json(theory_sum(t, builtin_theory("Unary"))));
    }
}

TEST_CASE("theory parser reports positions")
{
    auto fails_at = [](const std::string& text, std::size_t line, std::size_t column) {
        try {
            parse_theory(text);
        } catch (const ParseError& e) {
            CHECK(e.line() == line);
            CHECK(e.column() == column);
            return;
        }
        FAIL("no parse error for " << text);
    };
    fails_at("theory T {\n  op f : 2;\n  eq (x) f(x) = x;\n}", 3, 10);
    fails_at("theory T {\n  op f : 1;\n  eq (x) g(x) = x;\n}", 3, 10);
    fails_at("theory T { op f : ; }", 1, 19);
    fails_at("theory T { op f : 1; ", 1, 22);

    auto t = parse_theory("theory T { op e : 0; op m : 2; eq (x) m(e, x) = x; eq (x) m(e(), x) = x; }");
    CHECK(t.equations().size() == 1);
}

TEST_CASE("parse_term treats undeclared names as variables")
{
    auto sl = builtin_theory("Semilattice");
    auto t = parse_term("join(a, bot)", sl.signature());
    CHECK(t == Term::app("join", {Term::var("a"), Term::app("bot")}));
    CHECK_THROWS_AS(parse_term("join(a)", sl.signature()), ParseError);
}

TEST_CASE("canonical json sorts ops and equations")
{
    auto j = theory_to_json(builtin_theory("Semilattice"));
    CHECK(j["ops"][0]["name"] == "bot");
    CHECK(j["ops"][1]["name"] == "join");
    std::vector<std::string> keys;
    for (const auto& e : j["equations"])
        keys.push_back(e["lhs"].get<std::string>() + " = " + e["rhs"].get<std::string>());
    CHECK(std::is_sorted(keys.begin(), keys.end()));
}
