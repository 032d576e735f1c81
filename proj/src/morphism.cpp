#include "forge/morphism.hpp"

#include <map>

#include "forge/error.hpp"
#include "forge/free_algebra.hpp"
#include "forge/monad_laws.hpp"

namespace forge {

nlohmann::json MorphismReport::to_json() const
{
    nlohmann::json j = {{"morphism", morphism},
                        {"maxSize", maxSize},
                        {"unitChecks", unitChecks},
                        {"extensionChecks", extensionChecks},
                        {"preservesUnit", preservesUnit},
                        {"preservesExtension", preservesExtension},
                        {"surjective", surjective},
                        {"status", passed() ? "pass" : "fail"}};
    if (witness)
        j["witness"] = *witness;
    return j;
}

MorphismReport check_morphism(const MonadMorphism& alpha, std::size_t maxSize)
{
    MorphismReport r;
    r.morphism = alpha.name;
    r.maxSize = maxSize;
    auto note = [&](std::string what) {
        if (!r.witness)
            r.witness = std::move(what);
    };
    const FiniteMonad& s = alpha.source;
    const FiniteMonad& t = alpha.target;
    for (std::size_t xs = 0; xs <= maxSize; ++xs) {
        FiniteSet x = atoms(xs, "a");
        const FiniteSet& sx = s.carrier(x);
        for (const auto& a : x) {
            ++r.unitChecks;
            Value lhs = alpha.component(x, s.unit(x, a));
            if (!(lhs == t.unit(x, a))) {
                r.preservesUnit = false;
                note("unit at " + a.str() + ": " + lhs.str());
            }
        }
        std::vector<bool> hit(t.carrier(x).size(), false);
        for (const auto& m : sx)
            if (auto i = t.carrier(x).index_of(alpha.component(x, m)))
                hit[*i] = true;
        for (std::size_t i = 0; i < hit.size(); ++i) {
            if (!hit[i]) {
                r.surjective = false;
                note("no preimage for " + t.carrier(x)[i].str());
            }
        }
        for (std::size_t ys = 0; ys <= maxSize; ++ys) {
            FiniteSet y = atoms(ys, "b");
            const FiniteSet& sy = s.carrier(y);
            if (sy.empty() && !x.empty())
                continue;
            std::vector<Value> images(x.size());
            for_each_tuple(x.size(), sy.size(), [&](std::span<const std::size_t> pick) {
                for (std::size_t i = 0; i < pick.size(); ++i)
                    images[i] = sy[pick[i]];
                FiniteMap f(x, images);
                auto alphaF = [&](const Value& v) { return alpha.component(y, f(v)); };
                for (const auto& m : sx) {
                    ++r.extensionChecks;
                    Value lhs = alpha.component(y, s.extend(x, y, std::cref(f), m));
                    Value rhs = t.extend(x, y, alphaF, alpha.component(x, m));
                    if (!(lhs == rhs)) {
                        r.preservesExtension = false;
                        note("extension at f = " + f.table().str() + ", m = " + m.str() + ": " + lhs.str() +
                             " vs " + rhs.str());
                        return false;
                    }
                }
                return true;
            });
        }
    }
    return r;
}

MonadMorphism builtin_morphism(std::string_view name)
{
    if (name == "list->multiset") {
        return {"list->multiset", builtin_monad("list:cap=3"), builtin_monad("multiset:cap=3"),
                [](const FiniteSet&, const Value& t) {
                    return Value::bag(std::vector<Value>(t.items().begin(), t.items().end()));
                }};
    }
    if (name == "powerset:nonempty->collapse") {
        return {"powerset:nonempty->collapse", builtin_monad("powerset:nonempty"), builtin_monad("collapse"),
                [](const FiniteSet&, const Value&) { return Value::unit(); }};
    }
    if (name.starts_with("identity:")) {
        FiniteMonad m = builtin_monad(name.substr(9));
        return {"identity:" + m.name(), m, m, [](const FiniteSet&, const Value& t) { return t; }};
    }
    throw Error("unknown monad morphism '" + std::string(name) + "'");
}

nlohmann::json QuotientPresentation::to_json() const
{
    return {{"theory", theory.name()},
            {"termsEnumerated", termsEnumerated},
            {"imageClasses", imageClasses},
            {"equationsAdded", equationsAdded},
            {"equationsUnproved", equationsUnproved}};
}

QuotientPresentation quotient_presentation(const MonadMorphism& alpha, const Presentation& source, std::size_t depth,
                                           std::size_t generators)
{
    MorphismReport check = check_morphism(alpha, generators);
    if (!check.surjective)
        throw Error("morphism " + alpha.name + " is not surjective: " + check.witness.value_or(""));

    std::vector<std::string> gens;
    FiniteSet x = atoms(generators, "x");
    std::map<std::string, Value> env;
    for (const auto& v : x) {
        gens.push_back(v.label());
        env[v.label()] = v;
    }
    std::vector<Term> terms = enumerate_terms(source.theory.signature(), gens, depth);

    QuotientPresentation out;
    out.termsEnumerated = terms.size();
    out.theory = source.theory;
    out.theory.rename(source.theory.name() + "/" + alpha.name);

    // Terms grouped by image; the first term (in enumeration order) of each
    // group is the one every other member is equated with.
    std::map<Value, std::size_t> firstWithImage;
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < terms.size(); ++i) {
        Value image = alpha.component(x, interpret(source, x, terms[i], env));
        auto [it, inserted] = firstWithImage.emplace(image, i);
        if (!inserted)
            pairs.emplace_back(it->second, i);
    }
    out.imageClasses = firstWithImage.size();

    QuotientAlgebra base = free_algebra(source.theory, gens, depth);
    for (auto [i, j] : pairs) {
        std::set<std::string> vars;
        terms[i].collect_vars(vars);
        terms[j].collect_vars(vars);
        Equation eq(std::vector<std::string>(vars.begin(), vars.end()), terms[i], terms[j]);
        if (!out.theory.add_equation(eq))
            continue;
        ++out.equationsAdded;
        auto ci = base.class_of(terms[i]);
        auto cj = base.class_of(terms[j]);
        if (!ci || !cj || *ci != *cj)
            ++out.equationsUnproved;
    }
    return out;
}

}  // namespace forge
