#include <doctest.h>

#include <random>

#include "forge/error.hpp"
#include "forge/metalang.hpp"
#include "forge/monad_laws.hpp"

using namespace forge;

namespace {

MLTerm random_term(std::mt19937_64& rng, int depth)
{
    std::uniform_int_distribution<int> pick(0, depth > 0 ? 7 : 1);
    const char* vars[] = {"p", "q", "x1"};
    switch (pick(rng)) {
    case 0: return MLTerm::var(vars[rng() % 3]);
    case 1: return MLTerm::star();
    case 2: return MLTerm::apply(rng() % 2 ? "f" : "g", random_term(rng, depth - 1));
    case 3: return MLTerm::pair(random_term(rng, depth - 1), random_term(rng, depth - 1));
    case 4: return MLTerm::fst(random_term(rng, depth - 1));
    case 5: return MLTerm::snd(random_term(rng, depth - 1));
    case 6: return MLTerm::ret(random_term(rng, depth - 1));
    default: return MLTerm::bind(vars[rng() % 3], random_term(rng, depth - 1), random_term(rng, depth - 1));
    }
}

std::string rule_of(const std::string& program)
{
    try {
        MLProgram p = parse_program(program);
        typecheck(p.ctx, p.term, p.sig);
    } catch (const TypeError& e) {
        return e.rule();
    }
    return "ok";
}

Value eval_program(const std::string& program, const std::string& monad, const std::vector<Value>& env)
{
    MLProgram p = parse_program(program);
    MLInterpretation in;
    for (const auto& [name, carrier] : p.sig.bases)
        in.bases[name] = *carrier;
    for (const auto& [name, fn] : p.sig.functions)
        in.functions[name] = *fn.table;
    return evaluate(p.term, builtin_monad(monad), p.sig, in, p.ctx, env);
}

}  // namespace

TEST_CASE("types parse and print")
{
    CHECK(parse_type("T A * B") == MLType::product(MLType::monadic(MLType::base("A")), MLType::base("B")));
    CHECK(parse_type("A * B * C") ==
          MLType::product(MLType::base("A"), MLType::product(MLType::base("B"), MLType::base("C"))));
    CHECK(parse_type("T (A * 1)") == MLType::monadic(MLType::product(MLType::base("A"), MLType::unit())));
    for (const char* s : {"1", "A", "T T A", "(A * B) * C", "T (A * B)", "A * T B"})
        CHECK(parse_type(parse_type(s).str()) == parse_type(s));
    CHECK_THROWS_AS(parse_type("A *"), ParseError);
}

TEST_CASE("terms parse")
{
    MLTerm t = parse_ml_term("do x <- p; do y <- q; ret (x, y)");
    REQUIRE(t.kind() == MLTerm::Kind::Do);
    CHECK(t.name() == "x");
    CHECK(t.children()[0] == MLTerm::var("p"));
    CHECK(t.children()[1].kind() == MLTerm::Kind::Do);
    CHECK(parse_ml_term("g fst (a, *)") == MLTerm::apply("g", MLTerm::fst(MLTerm::pair(MLTerm::var("a"), MLTerm::star()))));
    CHECK(parse_ml_term("star") == MLTerm::star());
    CHECK_THROWS_AS(parse_ml_term("do x p; ret x"), ParseError);
    CHECK_THROWS_AS(parse_ml_term("(p, q"), ParseError);
    CHECK_THROWS_AS(parse_ml_term("ret"), ParseError);
}

TEST_CASE("printing round trips on random terms")
{
    std::mt19937_64 rng(3);
    for (int i = 0; i < 500; ++i) {
        MLTerm t = random_term(rng, 4);
        CAPTURE(t.str());
        CHECK(parse_ml_term(t.str()) == t);
    }
}

TEST_CASE("typing rules")
{
    const std::string decls = "base A\nbase B\nfun g : A -> T B\nvar a : A\nvar p : T A\n";
    MLProgram ok = parse_program(decls + "term do x <- p; g x");
    CHECK(typecheck(ok.ctx, ok.term, ok.sig) == MLType::monadic(MLType::base("B")));
    MLProgram pair = parse_program(decls + "term ret (a, *)");
    CHECK(typecheck(pair.ctx, pair.term, pair.sig).str() == "T (A * 1)");

    CHECK(rule_of(decls + "term g z") == "var");
    CHECK(rule_of(decls + "term g p") == "apply");
    CHECK(rule_of(decls + "term h a") == "apply");
    CHECK(rule_of(decls + "term fst a") == "fst");
    CHECK(rule_of(decls + "term snd p") == "snd");
    CHECK(rule_of(decls + "term do x <- a; ret x") == "do");
    CHECK(rule_of(decls + "term do x <- p; x") == "do");
    CHECK(rule_of("var c : C\nterm c") == "type");
    // The bound variable is gone after the do.
    CHECK(rule_of(decls + "term (do x <- p; ret x, x)") == "var");
    // Inner bindings shadow outer ones.
    CHECK(rule_of(decls + "term do a <- ret *; ret a") == "ok");
}

TEST_CASE("program files")
{
    MLProgram p = parse_program("# comment\nbase A = {a0, a1}\nfun f : A -> A = [a0->a1,a1->a0]\nvar x : A\n"
                                "term\n  ret f x\n");
    REQUIRE(p.sig.bases.at("A"));
    CHECK(p.sig.bases.at("A")->size() == 2);
    CHECK(p.sig.functions.at("f").table);
    CHECK(p.ctx.size() == 1);
    CHECK_THROWS_AS(parse_program("base A\n"), ParseError);
    CHECK_THROWS_AS(parse_program("frob A\nterm *"), ParseError);
}

TEST_CASE("evaluation")
{
    Value a0 = Value::atom("a0"), a1 = Value::atom("a1"), b0 = Value::atom("b0"), b1 = Value::atom("b1");
    const std::string decls = "base A = {a0, a1}\nbase B = {b0, b1}\n"
                              "fun g : A -> T B = [a0->{b0},a1->{b0,b1}]\nvar p : T A\n";
    CHECK(eval_program(decls + "term do x <- p; g x", "powerset:full", {Value::set({a0, a1})}) ==
          Value::set({b0, b1}));
    CHECK(eval_program(decls + "term do x <- p; g x", "powerset:full", {Value::set({})}) == Value::set({}));
    CHECK(eval_program(decls + "term do x <- p; ret (x, x)", "powerset:full", {Value::set({a1})}) ==
          Value::set({Value::pair(a1, a1)}));

    const std::string lists = "base A = {a0, a1}\nvar p : T A\nvar q : T A\n";
    Value l = eval_program(lists + "term do x <- p; do y <- q; ret (x, y)", "list:cap=3",
                           {Value::seq({a0}), Value::seq({a0, a1})});
    CHECK(l == Value::seq({Value::pair(a0, a0), Value::pair(a0, a1)}));
}

TEST_CASE("law programs are equivalent for small monads")
{
    for (const std::string monad : {"identity", "powerset:full", "wellorder", "state:S=1"}) {
        for (const char* law : {"left-unit", "right-unit", "associativity"}) {
            CAPTURE(monad);
            CAPTURE(law);
            auto [a, b] = law_programs(law);
            EquivResult r = equiv(a.ctx, a.term, b.term, builtin_monad(monad), a.sig);
            CHECK(r.equal);
            CHECK(r.exhaustive);
            CHECK(r.checked > 0);
        }
    }
}

TEST_CASE("equiv finds differences with a witness")
{
    MLProgram a = parse_program("base A\nvar p : T A\nterm p");
    MLProgram b = parse_program("base A\nvar p : T A\nterm do x <- p; do y <- p; ret x");
    // Idempotent for sets, not for lists.
    CHECK(equiv(a.ctx, a.term, b.term, builtin_monad("powerset:full"), a.sig).equal);
    EquivResult r = equiv(a.ctx, a.term, b.term, builtin_monad("list:cap=3"), a.sig);
    CHECK_FALSE(r.equal);
    REQUIRE(r.witness);
    CHECK(r.witness->contains("env"));

    EquivOptions tiny;
    tiny.budget = 3;
    EquivResult cut = equiv(a.ctx, a.term, a.term, builtin_monad("powerset:full"), a.sig, tiny);
    CHECK(cut.equal);
    CHECK_FALSE(cut.exhaustive);
}

TEST_CASE("comm programs agree with monad-level commutation")
{
    for (const std::string name : {"powerset:full", "state:S=2", "wellorder", "list:cap=3", "multiset:cap=3"}) {
        CAPTURE(name);
        FiniteMonad m = builtin_monad(name);
        auto [lhs, rhs] = law_programs("comm");
        for (std::size_t as = 1; as <= 2; ++as) {
            for (std::size_t bs = 1; bs <= 2; ++bs) {
                MLInterpretation in{{{"A", atoms(as, "a")}, {"B", atoms(bs, "b")}}, {}};
                for (const auto& p : m.carrier(in.bases["A"])) {
                    for (const auto& q : m.carrier(in.bases["B"])) {
                        bool direct = commutes(m, in.bases["A"], in.bases["B"], p, q).commutes;
                        Value l = evaluate(lhs.term, m, lhs.sig, in, lhs.ctx, {p, q});
                        Value r = evaluate(rhs.term, m, rhs.sig, in, rhs.ctx, {p, q});
                        CHECK(direct == (l == r));
                    }
                }
            }
        }
    }
}
