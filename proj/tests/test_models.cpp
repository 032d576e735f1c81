#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <optional>
#include <set>

#include "forge/error.hpp"
#include "forge/model_finder.hpp"
#include "forge/table_algebra.hpp"
#include "forge/theory.hpp"

using namespace forge;

namespace {

// Brute force over every table assignment, sharing no code with the search:
// its own term evaluation, reachability and isomorphism canonicalization.
struct Brute {
    const Theory& theory;
    std::size_t n;
    std::optional<std::size_t> gens;
    std::vector<std::vector<std::uint32_t>> tables;  // per op, mixed radix

    std::size_t cell(std::size_t op, const std::vector<std::uint32_t>& args) const
    {
        std::size_t i = 0;
        for (auto a : args)
            i = i * n + a;
        (void)op;
        return i;
    }

    std::uint32_t eval(const Term& t, const std::map<std::string, std::uint32_t>& env) const
    {
        if (t.is_var())
            return env.at(t.name());
        std::vector<std::uint32_t> args;
        for (const auto& a : t.args())
            args.push_back(eval(a, env));
        std::size_t op = *theory.signature().index_of(t.name());
        return tables[op][cell(op, args)];
    }

    bool model() const
    {
        for (const auto& eq : theory.equations()) {
            std::vector<std::uint32_t> vals(eq.context.size(), 0);
            while (true) {
                std::map<std::string, std::uint32_t> env;
                for (std::size_t i = 0; i < vals.size(); ++i)
                    env[eq.context[i]] = vals[i];
                if (eval(eq.lhs, env) != eval(eq.rhs, env))
                    return false;
                std::size_t i = vals.size();
                while (i > 0 && ++vals[i - 1] == n)
                    vals[--i] = 0;
                if (i == 0)
                    break;
            }
        }
        return true;
    }

    bool generated() const
    {
        std::vector<bool> in(n, false);
        for (std::size_t g = 0; g < *gens; ++g)
            in[g] = true;
        bool grew = true;
        while (grew) {
            grew = false;
            const auto& ops = theory.signature().ops();
            for (std::size_t op = 0; op < ops.size(); ++op) {
                std::size_t cells = tables[op].size();
                for (std::size_t c = 0; c < cells; ++c) {
                    bool argsIn = true;
                    std::size_t rest = c;
                    for (std::size_t k = 0; k < ops[op].arity; ++k, rest /= n)
                        argsIn = argsIn && in[rest % n];
                    if (argsIn && !in[tables[op][c]]) {
                        in[tables[op][c]] = true;
                        grew = true;
                    }
                }
            }
        }
        return std::all_of(in.begin(), in.end(), [](bool b) { return b; });
    }

    std::vector<std::uint32_t> canonical() const
    {
        std::vector<std::uint32_t> perm(n), best;
        std::iota(perm.begin(), perm.end(), 0);
        std::size_t fixed = gens.value_or(0);
        do {
            bool ok = true;
            for (std::size_t g = 0; g < fixed; ++g)
                ok = ok && perm[g] == g;
            if (!ok)
                continue;
            std::vector<std::uint32_t> key;
            const auto& ops = theory.signature().ops();
            for (std::size_t op = 0; op < ops.size(); ++op) {
                std::vector<std::uint32_t> relabeled(tables[op].size());
                for (std::size_t c = 0; c < tables[op].size(); ++c) {
                    // perm sends old element e to perm[e].
                    std::size_t rest = c, target = 0, scale = 1;
                    for (std::size_t k = 0; k < ops[op].arity; ++k, rest /= n, scale *= n)
                        target += perm[rest % n] * scale;
                    relabeled[target] = perm[tables[op][c]];
                }
                key.insert(key.end(), relabeled.begin(), relabeled.end());
            }
            if (best.empty() || key < best)
                best = key;
        } while (std::next_permutation(perm.begin(), perm.end()));
        return best;
    }

    std::size_t count()
    {
        const auto& ops = theory.signature().ops();
        tables.clear();
        std::vector<std::pair<std::size_t, std::size_t>> cells;
        for (std::size_t op = 0; op < ops.size(); ++op) {
            std::size_t size = 1;
            for (std::size_t k = 0; k < ops[op].arity; ++k)
                size *= n;
            tables.emplace_back(size, 0);
            for (std::size_t c = 0; c < size; ++c)
                cells.emplace_back(op, c);
        }
        std::set<std::vector<std::uint32_t>> classes;
        while (true) {
            if (model() && (!gens || generated()))
                classes.insert(canonical());
            std::size_t i = cells.size();
            while (i > 0) {
                auto [op, c] = cells[i - 1];
                if (++tables[op][c] < n)
                    break;
                tables[op][c] = 0;
                --i;
            }
            if (i == 0)
                break;
        }
        return classes.size();
    }
};

std::size_t brute_count(const Theory& t, std::size_t n, std::optional<std::size_t> gens = std::nullopt)
{
    Brute b{t, n, gens, {}};
    return b.count();
}

}  // namespace

TEST_CASE("table algebra basics")
{
    Theory sl = builtin_theory("Semilattice");
    TableAlgebra a = blank_algebra(sl.signature(), 2);
    CHECK(a.size() == 2);
    CHECK(a.tables.at("join").size() == 4);
    // max on {0,1} with bottom 0.
    a.tables["join"] = {0, 1, 1, 1};
    a.tables["bot"] = {0};
    AlgebraCheck ok = algebra_of_table(sl, a);
    CHECK(ok.ok);
    CHECK(ok.instances > 0);
    std::uint32_t args[] = {1, 0};
    CHECK(a.apply("join", args) == 1);
    CHECK(eval_term(a, Term::app("join", {Term::var("x"), Term::app("bot")}), {{"x", 1}}) == 1);

    a.tables["join"] = {0, 1, 0, 1};  // projection onto the second argument
    AlgebraCheck bad = algebra_of_table(sl, a);
    REQUIRE_FALSE(bad.ok);
    REQUIRE(bad.violation);
    const auto& v = *bad.violation;
    CHECK(eval_term(a, v.equation.lhs, v.assignment) == v.lhs);
    CHECK(eval_term(a, v.equation.rhs, v.assignment) == v.rhs);
    CHECK(v.lhs != v.rhs);
}

TEST_CASE("algebra JSON round trip")
{
    Theory sl = builtin_theory("Semilattice");
    TableAlgebra a = blank_algebra(sl.signature(), 3);
    a.tables["join"] = {0, 1, 2, 1, 1, 2, 2, 2, 2};
    a.tables["bot"] = {0};
    std::vector<std::uint32_t> gens{1};
    auto j = algebra_to_json(a, sl.signature(), gens);
    std::vector<std::uint32_t> back;
    TableAlgebra b = algebra_from_json(j, sl.signature(), &back);
    CHECK(b == a);
    CHECK(back == gens);
    CHECK_THROWS_AS(algebra_from_json(nlohmann::json{{"carrier", {"0"}}, {"tables", nlohmann::json::object()}},
                                      sl.signature()),
                    Error);
}

TEST_CASE("model counts agree with brute force")
{
    for (const std::string name : {"Semilattice", "Monoid", "CommutativeMonoid", "NonemptySemilattice", "Unary"}) {
        Theory t = builtin_theory(name);
        for (std::size_t n = 1; n <= 3; ++n) {
            CAPTURE(name);
            CAPTURE(n);
            ModelSearchOptions opt;
            opt.keepModels = false;
            CHECK(find_models(t, n, opt).isoClasses == brute_count(t, n));
        }
    }
}

TEST_CASE("generated model counts agree with brute force, with and without symmetry breaking")
{
    Theory t = theory_tensor(builtin_theory("Semilattice"), builtin_theory("Unary"));
    for (std::size_t n = 1; n <= 3; ++n) {
        CAPTURE(n);
        ModelSearchOptions sb;
        sb.generators = 1;
        ModelSearchOptions plain = sb;
        plain.symmetryBreaking = false;
        std::size_t oracle = brute_count(t, n, 1);
        CHECK(find_models(t, n, sb).isoClasses == oracle);
        CHECK(find_models(t, n, plain).isoClasses == oracle);
    }
    Theory sl = builtin_theory("Semilattice");
    ModelSearchOptions two;
    two.generators = 2;
    for (std::size_t n = 2; n <= 3; ++n)
        CHECK(find_models(sl, n, two).isoClasses == brute_count(sl, n, 2));
    // {bot, x, y, x v y} is the only one of size 4, and none is larger.
    CHECK(find_models(sl, 4, two).isoClasses == 1);
    CHECK(find_models(sl, 5, two).isoClasses == 0);
}

TEST_CASE("found models are models, pairwise non-isomorphic")
{
    Theory t = builtin_theory("CommutativeMonoid");
    auto r = find_models(t, 3, {});
    REQUIRE(r.models.size() == r.isoClasses);
    std::set<std::vector<std::uint32_t>> seen;
    for (const auto& m : r.models) {
        CHECK(algebra_of_table(t, m).ok);
        TableAlgebra c = canonical_form(m, t.signature(), 0);
        std::vector<std::uint32_t> key;
        for (const auto& [op, table] : c.tables)
            key.insert(key.end(), table.begin(), table.end());
        CHECK(seen.insert(key).second);
    }
}

TEST_CASE("spurious analog collapses to the singleton")
{
    Theory t = builtin_theory("SpuriousAnalog(3)");
    CHECK(find_models(t, 1, {}).isoClasses == 1);
    CHECK(find_models(t, 2, {}).isoClasses == 0);
    CHECK(brute_count(t, 2) == 0);
}

TEST_CASE("generated_by")
{
    Theory sl = builtin_theory("Semilattice");
    TableAlgebra a = blank_algebra(sl.signature(), 3);
    a.tables["join"] = {0, 1, 2, 1, 1, 2, 2, 2, 2};
    a.tables["bot"] = {0};
    CHECK_FALSE(generated_by(a, sl.signature(), 1));
    CHECK(generated_by(a, sl.signature(), 3));
}

TEST_CASE("node budget marks a search partial")
{
    ModelSearchOptions opt;
    opt.nodeBudget = 10;
    auto r = find_models(builtin_theory("Monoid"), 4, opt);
    CHECK(r.partial);
}
