#include <doctest.h>

#include <map>
#include <random>

#include "forge/free_algebra.hpp"
#include "forge/model_finder.hpp"
#include "forge/presentation.hpp"
#include "forge/tensor.hpp"

using namespace forge;

namespace {

// Powerset algebras on A given by a table over all subsets. Oracle: alpha is
// an EM algebra iff alpha{a} = a and alpha(S u T) = alpha{alpha S, alpha T}.
struct SubsetAlgebra {
    FiniteSet carrier;
    std::map<Value, Value> table;

    bool oracle() const
    {
        for (const auto& a : carrier)
            if (table.at(Value::set({a})) != a)
                return false;
        for (const auto& [s, as] : table)
            for (const auto& [t, at] : table) {
                std::vector<Value> both(s.items().begin(), s.items().end());
                both.insert(both.end(), t.items().begin(), t.items().end());
                if (table.at(Value::set(both)) != table.at(Value::set({as, at})))
                    return false;
            }
        return true;
    }

    EMAlgebra em() const
    {
        auto t = table;
        return {builtin_monad("powerset:full"), carrier, [t](const Value& m) { return t.at(m); }};
    }
};

SubsetAlgebra random_subset_algebra(std::mt19937_64& rng, std::size_t n)
{
    SubsetAlgebra a{atoms(n), {}};
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    FiniteMonad p = builtin_monad("powerset:full");
    for (const auto& s : p.carrier(a.carrier)) {
        // Singletons mostly map to themselves so that the multiplication law
        // is what gets tested.
        if (s.size() == 1 && pick(rng) != 0)
            a.table[s] = s.items()[0];
        else
            a.table[s] = a.carrier[pick(rng)];
    }
    return a;
}

TableAlgebra semilattice(std::vector<std::uint32_t> join, std::uint32_t bot)
{
    Theory sl = builtin_theory("Semilattice");
    std::size_t n = join.size() == 4 ? 2 : 3;
    TableAlgebra a = blank_algebra(sl.signature(), n);
    a.tables["join"] = std::move(join);
    a.tables["bot"] = {bot};
    return a;
}

}  // namespace

TEST_CASE("EM algebras of presented models")
{
    Presentation p = builtin_presentation("powerset:full");
    for (std::size_t n = 1; n <= 3; ++n) {
        auto models = find_models(p.theory, n, {});
        for (const auto& m : models.models) {
            EMCheck c = check_em_algebra(em_algebra_of_tables(p, m));
            CHECK(c.ok);
            CHECK(c.checked > 0);
        }
    }
    Presentation s = builtin_presentation("state:S=2");
    for (const auto& m : find_models(s.theory, 2, {}).models)
        CHECK(check_em_algebra(em_algebra_of_tables(s, m)).ok);
}

TEST_CASE("EM check agrees with the union oracle on seeded random structures")
{
    std::mt19937_64 rng(7);
    std::size_t accepted = 0, rejected = 0;
    for (int i = 0; i < 300; ++i) {
        SubsetAlgebra a = random_subset_algebra(rng, 2 + i % 2);
        bool expected = a.oracle();
        EMCheck c = check_em_algebra(a.em());
        CHECK(c.ok == expected);
        if (!c.ok)
            CHECK(c.witness);
        (c.ok ? accepted : rejected) += 1;
    }
    // Both outcomes must actually occur for the comparison to mean anything.
    CHECK(accepted > 0);
    CHECK(rejected > 0);
}

TEST_CASE("commutation equations count and tables")
{
    Theory sl = builtin_theory("Semilattice"), s22 = builtin_theory("Sigma22Free");
    CHECK(commutation_equations(sl, s22).size() == sl.signature().size() * s22.signature().size());
    Theory st = builtin_theory("StateTheory(2)");
    CHECK(commutation_equations(sl, st).size() == 2 * 3);

    // Two copies of max on {0,1}: join commutes with itself.
    Presentation p = builtin_presentation("powerset:full");
    Theory sum = theory_sum(p.theory, p.theory);
    TableAlgebra both = blank_algebra(sum.signature(), 2);
    for (const auto& op : sum.signature().ops())
        both.tables[op.name] = op.arity == 2 ? std::vector<std::uint32_t>{0, 1, 1, 1} : std::vector<std::uint32_t>{0};
    CHECK(algebra_of_table(sum, both).ok);
    CHECK(check_commutation_tables(p.theory, p.theory, both).ok);

    // max against min does not commute.
    TableAlgebra mixed = both;
    for (const auto& op : sum.signature().ops())
        if (op.name.starts_with("right."))
            mixed.tables[op.name] = op.arity == 2 ? std::vector<std::uint32_t>{0, 0, 0, 1} : std::vector<std::uint32_t>{1};
    CHECK(algebra_of_table(sum, mixed).ok);
    AlgebraCheck c = check_commutation_tables(p.theory, p.theory, mixed);
    CHECK_FALSE(c.ok);
    CHECK(c.violation);
}

TEST_CASE("tensor law agrees with commutation tables on all small sum models")
{
    std::vector<std::pair<std::string, std::string>> pairs = {
        {"powerset:full", "powerset:full"}, {"powerset:full", "state:S=1"}, {"powerset:nonempty", "state:S=2"}};
    std::size_t commuting = 0, total = 0;
    for (const auto& [l, r] : pairs) {
        Presentation lp = builtin_presentation(l), rp = builtin_presentation(r);
        Theory sum = theory_sum(lp.theory, rp.theory);
        for (std::size_t n = 1; n <= 2; ++n) {
            for (const auto& m : find_models(sum, n, {}).models) {
                auto [la, ra] = split_sum_algebra(lp.theory, rp.theory, m);
                CHECK(algebra_of_table(lp.theory, la).ok);
                CHECK(algebra_of_table(rp.theory, ra).ok);
                TensorAlgebra ta{FiniteSet(m.elements), em_algebra_of_tables(lp, la), em_algebra_of_tables(rp, ra)};
                bool tables = check_commutation_tables(lp.theory, rp.theory, m).ok;
                TensorLawReport law = check_tensor_law(ta);
                CHECK_FALSE(law.partial);
                CHECK(law.ok == tables);
                if (!law.ok)
                    CHECK(law.witness);
                commuting += tables ? 1 : 0;
                ++total;
            }
        }
    }
    CHECK(commuting > 0);
    CHECK(commuting < total);
}

TEST_CASE("state tensor matches S -> P(S x X)")
{
    for (auto [s, x, expected] : {std::tuple<std::size_t, std::size_t, std::uint64_t>{1, 1, 2}, {1, 2, 4}, {2, 1, 16}}) {
        CAPTURE(s);
        CAPTURE(x);
        StateTensorReport r = verify_state_tensor(s, x);
        CHECK(r.expected == expected);
        CHECK(r.classes == expected);
        CHECK(r.passed());
    }
}

TEST_CASE("saturation of the free semilattice tensor")
{
    SaturationReport r = saturate_free_tensor("state:S=1", 1);
    CHECK(r.closure.fixpoint);
    CHECK_FALSE(r.closure.capped);
    CHECK(r.closure.algebra.class_count() == 2);
    SaturationReport id = saturate_free_tensor("identity", 2);
    CHECK(id.closure.fixpoint);
    CHECK(id.closure.algebra.class_count() == 4);
    CHECK(id.stabilizationPattern);
}

TEST_CASE("every 2-generated semilattice is a quotient of the free one")
{
    Theory sl = builtin_theory("Semilattice");
    QuotientAlgebra free = free_algebra(sl, {"x0", "x1"}, 3);
    REQUIRE(free.closed);
    REQUIRE(free.class_count() == 4);
    ModelSearchOptions opt;
    opt.generators = 2;
    std::size_t seen = 0;
    for (std::size_t n = 1; n <= 3; ++n) {
        for (const auto& m : find_models(sl, n, opt).models) {
            HomomorphismReport h = free_homomorphism(free, m, {0, 1});
            CHECK(h.homomorphism);
            CHECK(h.surjective);
            ++seen;
        }
    }
    CHECK(seen > 0);
    // Sending both generators to bottom misses the rest of a 3-element chain.
    TableAlgebra chain = semilattice({0, 1, 2, 1, 1, 2, 2, 2, 2}, 0);
    HomomorphismReport h = free_homomorphism(free, chain, {0, 0});
    CHECK(h.homomorphism);
    CHECK_FALSE(h.surjective);
}

TEST_CASE("symmetry breaking does not change enumeration counts")
{
    TensorSearchConfig cfg;
    cfg.generators = 1;
    cfg.maxCarrier = 3;
    auto sb = enumerate_tensor_algebras(theory_family("Semilattice"), theory_family("Unary"), cfg);
    cfg.symmetryBreaking = false;
    auto plain = enumerate_tensor_algebras(theory_family("Semilattice"), theory_family("Unary"), cfg);
    REQUIRE(sb.perCarrier.size() == plain.perCarrier.size());
    for (std::size_t i = 0; i < sb.perCarrier.size(); ++i)
        CHECK(sb.perCarrier[i].count == plain.perCarrier[i].count);
    CHECK(sb.total == plain.total);
    CHECK(sb.total > 0);
    CHECK_FALSE(sb.partial);
}

TEST_CASE("well-order against Sigma22Free at small carriers")
{
    TensorSearchConfig cfg;
    cfg.generators = 2;
    cfg.maxCarrier = 2;
    cfg.keepAlgebras = true;
    auto e = enumerate_tensor_algebras(theory_family("WellOrder"), theory_family("Sigma22Free"), cfg);
    CHECK_FALSE(e.partial);
    REQUIRE(e.perCarrier.size() == 2);
    CHECK(e.algebras.size() == e.total);
    for (const auto& a : e.algebras) {
        Theory t = theory_tensor(builtin_theory("WellOrder(" + std::to_string(a.size()) + ")"),
                                 builtin_theory("Sigma22Free"));
        CHECK(algebra_of_table(t, a).ok);
        CHECK(generated_by(a, t.signature(), 2));
    }
}
