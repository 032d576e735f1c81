#include <doctest.h>

#include <functional>

#include "forge/error.hpp"
#include "forge/free_algebra.hpp"
#include "forge/theory_dsl.hpp"

using namespace forge;

namespace {

// c(0) = |gens| + #constants, c(d+1) = |gens| + sum over ops of c(d)^arity.
std::uint64_t count_oracle(const Signature& sig, std::size_t gens, std::size_t depth)
{
    std::uint64_t c = gens;
    for (const auto& op : sig.ops())
        c += op.arity == 0 ? 1 : 0;
    for (std::size_t d = 0; d < depth; ++d) {
        std::uint64_t next = gens;
        for (const auto& op : sig.ops()) {
            std::uint64_t p = 1;
            for (std::size_t i = 0; i < op.arity; ++i)
                p *= c;
            next += p;
        }
        c = next;
    }
    return c;
}

// Semilattice terms denote the set of generators they mention.
std::set<std::string> as_subset(const Term& t)
{
    std::set<std::string> out;
    t.collect_vars(out);
    return out;
}

}  // namespace

TEST_CASE("enumerate_terms small cases")
{
    Signature justBot({{"bot", 0}});
    auto t0 = enumerate_terms(justBot, {}, 0);
    REQUIRE(t0.size() == 1);
    CHECK(t0[0] == Term::app("bot"));

    auto sl = builtin_theory("Semilattice").signature();
    auto t1 = enumerate_terms(sl, {"a"}, 1);
    std::set<std::string> got;
    for (const auto& t : t1)
        got.insert(t.str());
    CHECK(got == std::set<std::string>{"a", "bot", "join(a,a)", "join(a,bot)", "join(bot,a)", "join(bot,bot)"});
}

TEST_CASE("enumerate_terms matches the counting recursion")
{
    std::vector<Signature> sigs = {builtin_theory("Sigma22Free").signature(), builtin_theory("Semilattice").signature(),
                                   builtin_theory("StateTheory(2)").signature(), Signature({{"a", 0}, {"f", 3}})};
    for (const auto& sig : sigs) {
        for (std::size_t g = 0; g <= 2; ++g) {
            std::vector<std::string> gens;
            for (std::size_t i = 0; i < g; ++i)
                gens.push_back("x" + std::to_string(i));
            for (std::size_t d = 0; d <= 2; ++d) {
                auto expected = count_oracle(sig, g, d);
                if (expected > 50000)
                    continue;
                auto terms = enumerate_terms(sig, gens, d);
                CHECK(terms.size() == expected);
                std::set<Term> distinct(terms.begin(), terms.end());
                CHECK(distinct.size() == terms.size());
                for (const auto& t : terms)
                    CHECK(t.height() <= d);
            }
        }
    }
    CHECK_THROWS_AS(enumerate_terms(builtin_theory("Sigma22Free").signature(), {"a", "b"}, 4, 1000), BudgetExceeded);
}

TEST_CASE("free semilattice is the finite powerset")
{
    auto sl = builtin_theory("Semilattice");
    for (std::size_t n = 0; n <= 3; ++n) {
        std::vector<std::string> gens;
        for (std::size_t i = 0; i < n; ++i)
            gens.push_back("a" + std::to_string(i));
        auto q = free_algebra(sl, gens, 3);
        CAPTURE(n);
        CHECK_FALSE(q.capped);
        CHECK(q.closed);
        CHECK(q.class_count() == (std::size_t{1} << n));
        std::set<std::set<std::string>> subsets;
        for (const auto& c : q.classes)
            subsets.insert(as_subset(c.repr));
        CHECK(subsets.size() == q.class_count());
    }
    auto q = free_algebra(sl, {"a", "b"}, 3);
    std::set<std::string> reprs;
    for (const auto& c : q.classes)
        reprs.insert(c.repr.str());
    CHECK(reprs == std::set<std::string>{"a", "b", "bot", "join(a,b)"});
}

TEST_CASE("free algebra of the spurious analog collapses onto its constants")
{
    auto q = free_algebra(builtin_theory("SpuriousAnalog(3)"), {}, 2);
    CHECK(q.class_count() == 3);
    std::set<std::string> reprs;
    for (const auto& c : q.classes)
        reprs.insert(c.repr.str());
    CHECK(reprs == std::set<std::string>{"k0", "k1", "k2"});
}

TEST_CASE("absolutely free algebra has one class per term")
{
    Theory t("U0", Signature({{"u0", 2}}));
    for (std::size_t d = 0; d <= 3; ++d) {
        auto q = free_algebra(t, {"a"}, d);
        CHECK(q.class_count() == count_oracle(t.signature(), 1, d));
        for (const auto& c : q.classes)
            CHECK(c.size == 1);
        CHECK_FALSE(q.closed);
    }
}

TEST_CASE("class sizes add up to the term count")
{
    auto sl = builtin_theory("Semilattice");
    for (std::size_t d = 0; d <= 2; ++d) {
        auto q = free_algebra(sl, {"a", "b"}, d);
        std::uint64_t total = 0;
        for (const auto& c : q.classes)
            total += c.size;
        CHECK(total == count_oracle(sl.signature(), 2, d));
        for (const auto& t : enumerate_terms(sl.signature(), {"a", "b"}, d))
            CHECK(q.class_of(t).has_value());
    }
}

TEST_CASE("quotient is a congruence and op tables agree with enumerated terms")
{
    auto t = builtin_theory("StateTheory(2)");
    auto q = free_algebra(t, {"x"}, 2);
    auto terms = enumerate_terms(t.signature(), {"x"}, 2);
    for (const auto& term : terms) {
        if (term.is_var() || term.args().empty())
            continue;
        std::vector<std::size_t> args;
        for (const auto& a : term.args())
            args.push_back(*q.class_of(a));
        CHECK(q.apply(*t.signature().index_of(term.name()), args) == q.class_of(term));
    }
}

TEST_CASE("refinement is monotone in depth")
{
    auto t = theory_tensor(builtin_theory("Semilattice"), builtin_theory("Unary"));
    auto shallow = free_algebra(t, {"a"}, 2);
    auto deep = free_algebra(t, {"a"}, 3);
    auto terms = enumerate_terms(t.signature(), {"a"}, 2);
    std::set<std::size_t> shallowClasses, deepClasses;
    for (const auto& term : terms) {
        shallowClasses.insert(*shallow.class_of(term));
        deepClasses.insert(*deep.class_of(term));
    }
    CHECK(deepClasses.size() <= shallowClasses.size());
    for (const auto& a : terms)
        for (const auto& b : terms)
            if (shallow.class_of(a) == shallow.class_of(b))
                CHECK(deep.class_of(a) == deep.class_of(b));
}

TEST_CASE("empty generators without constants give the empty algebra")
{
    auto q = free_algebra(builtin_theory("Sigma22Free"), {}, 3);
    CHECK(q.class_count() == 0);
    CHECK(q.closed);
}

TEST_CASE("budget produces a capped result")
{
    auto q = free_algebra(builtin_theory("Sigma22Free"), {"a", "b"}, 6, 5000);
    CHECK(q.capped);
    CHECK(q.depth < 6);
    CHECK(q.nodeCount <= 5000);
}

TEST_CASE("decide_equal")
{
    auto sl = builtin_theory("Semilattice");
    auto a = Term::var("a"), b = Term::var("b");
    CHECK(decide_equal(sl, Term::app("join", {a, b}), Term::app("join", {b, a}), 2) == Decision::Equal);
    CHECK(decide_equal(sl, a, b, 3) == Decision::Unknown);

    auto sp = builtin_theory("SpuriousAnalog(3)");
    auto k = [](int i) { return Term::app("k" + std::to_string(i)); };
    auto inner = Term::app("f", {k(0), k(0), k(2)});
    CHECK(decide_equal(sp, Term::app("f", {k(1), inner, k(2)}), k(2), 3) == Decision::Equal);

    auto s22 = builtin_theory("Sigma22Free");
    CHECK(decide_equal(s22, Term::app("u0", {a, b}), Term::app("u1", {a, b}), 3) == Decision::Unknown);

    // Once equal, equal at every larger depth.
    auto t = builtin_theory("StateTheory(2)");
    auto x = Term::var("x");
    auto lhs = Term::app("update_0", {Term::app("update_1", {x})});
    auto rhs = Term::app("update_1", {x});
    for (std::size_t d = 2; d <= 4; ++d)
        CHECK(decide_equal(t, lhs, rhs, d) == Decision::Equal);
}
