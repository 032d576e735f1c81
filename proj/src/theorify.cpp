#include "forge/theorify.hpp"

#include "forge/monad_laws.hpp"

namespace forge {

nlohmann::json SchemaViolation::to_json() const
{
    return {{"schema", schema}, {"equation", equation}, {"lhs", lhs}, {"rhs", rhs}};
}

nlohmann::json TheorifyReport::to_json() const
{
    nlohmann::json j = {{"monad", monad},
                        {"maxArity", maxArity},
                        {"operations", operations},
                        {"unitEquations", unitEquations},
                        {"substitutionEquations", substitutionEquations},
                        {"outsideFragment", outsideFragment},
                        {"checked", checkedInstances},
                        {"violations", violations},
                        {"status", violations == 0 ? "pass" : "fail"}};
    if (firstViolation)
        j["witness"] = firstViolation->to_json();
    return j;
}

namespace {

std::string op_name(std::size_t arity, std::size_t index)
{
    return "h" + std::to_string(arity) + "_" + std::to_string(index);
}

std::vector<Term> argument_vars(std::size_t n)
{
    std::vector<Term> out;
    for (std::size_t i = 0; i < n; ++i)
        out.push_back(Term::var("p" + std::to_string(i)));
    return out;
}

std::vector<std::string> context(std::size_t n)
{
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i)
        out.push_back("p" + std::to_string(i));
    return out;
}

// All maps dom -> cod as image vectors, in odometer order.
template <typename Visit>
void for_each_map(const FiniteSet& dom, const FiniteSet& cod, Visit visit)
{
    if (cod.empty() && !dom.empty())
        return;
    std::vector<Value> images(dom.size());
    for_each_tuple(dom.size(), cod.size(), [&](std::span<const std::size_t> pick) {
        for (std::size_t i = 0; i < pick.size(); ++i)
            images[i] = cod[pick[i]];
        visit(FiniteMap(dom, images));
        return true;
    });
}

class Checker {
public:
    Checker(const FiniteMonad& m, const TheorifyOptions& o) : m_(m), options_(o) {}

    TheorifyResult run()
    {
        TheorifyResult out;
        auto& report = out.report;
        report.monad = m_.name();
        report.maxArity = options_.maxArity;

        Signature sig;
        for (std::size_t k = 0; k <= options_.maxArity; ++k) {
            const FiniteSet& tx = m_.carrier(set(k));
            for (std::size_t i = 0; i < tx.size(); ++i) {
                sig.add({op_name(k, i), k});
                out.operationMeaning.emplace_back(op_name(k, i), tx[i].str());
            }
        }
        report.operations = sig.size();
        out.theory = Theory("Theta(" + m_.name() + ")", std::move(sig));

        for (std::size_t k = 0; k <= options_.maxArity; ++k)
            unit_schema(k, out);
        for (std::size_t k = 0; k <= options_.maxArity; ++k)
            for (std::size_t l = 0; l <= options_.maxArity; ++l)
                substitution_schema(k, l, out);
        return out;
    }

private:
    FiniteSet set(std::size_t k) const { return atoms(k, "x"); }

    void compare(const char* schema, const Equation& eq, const Value& lhs, const Value& rhs, TheorifyReport& r)
    {
        ++r.checkedInstances;
        if (lhs == rhs)
            return;
        ++r.violations;
        if (!r.firstViolation)
            r.firstViolation = SchemaViolation{schema, eq.str(), lhs.str(), rhs.str()};
    }

    void unit_schema(std::size_t k, TheorifyResult& out)
    {
        FiniteSet x = set(k);
        const FiniteSet& tx = m_.carrier(x);
        auto eta = [&](const Value& v) { return m_.unit(x, v); };
        for (std::size_t j = 0; j < k; ++j) {
            Value ea = m_.unit(x, x[j]);
            auto index = tx.index_of(ea);
            Equation eq(context(k), Term::app(op_name(k, index.value_or(0)), argument_vars(k)),
                        Term::var("p" + std::to_string(j)));
            if (index && out.theory.add_equation(eq))
                ++out.report.unitEquations;
            // Generic arguments p_x = eta(x).
            compare("unit", eq, m_.extend(x, x, eta, ea), ea, out.report);
            for (std::size_t zs = 0; zs <= options_.modelSize; ++zs) {
                FiniteSet z = atoms(zs, "z");
                for_each_map(x, m_.carrier(z), [&](const FiniteMap& q) {
                    compare("unit", eq, m_.extend(x, z, std::cref(q), ea), q(x[j]), out.report);
                });
            }
        }
    }

    void substitution_schema(std::size_t k, std::size_t l, TheorifyResult& out)
    {
        FiniteSet x = set(k), y = set(l);
        const FiniteSet& tx = m_.carrier(x);
        const FiniteSet& ty = m_.carrier(y);
        auto etaY = [&](const Value& v) { return m_.unit(y, v); };
        std::vector<FiniteSet> zs;
        for (std::size_t s = 0; s <= options_.modelSize; ++s)
            zs.push_back(atoms(s, "z"));
        for_each_map(x, ty, [&](const FiniteMap& f) {
            std::vector<Term> inner;
            for (std::size_t j = 0; j < k; ++j)
                inner.push_back(Term::app(op_name(l, *ty.index_of(f.images()[j])), argument_vars(l)));
            for (std::size_t mi = 0; mi < tx.size(); ++mi) {
                const Value& m = tx[mi];
                Value fm = m_.extend(x, y, std::cref(f), m);
                auto index = ty.index_of(fm);
                Equation eq(context(l), Term::app(index ? op_name(l, *index) : "h[" + fm.str() + "]", argument_vars(l)),
                            Term::app(op_name(k, mi), inner));
                if (!index)
                    ++out.report.outsideFragment;
                else if (out.theory.add_equation(eq))
                    ++out.report.substitutionEquations;
                // Generic arguments p_y = eta(y), then arguments from T Z.
                {
                    Value lhs = m_.extend(y, y, etaY, fm);
                    Value rhs = m_.extend(x, y, [&](const Value& a) { return m_.extend(y, y, etaY, f(a)); }, m);
                    compare("substitution", eq, lhs, rhs, out.report);
                }
                for (const auto& z : zs) {
                    for_each_map(y, m_.carrier(z), [&](const FiniteMap& q) {
                        Value lhs = m_.extend(y, z, std::cref(q), fm);
                        Value rhs =
                            m_.extend(x, z, [&](const Value& a) { return m_.extend(y, z, std::cref(q), f(a)); }, m);
                        compare("substitution", eq, lhs, rhs, out.report);
                    });
                }
            }
        });
    }

    const FiniteMonad& m_;
    TheorifyOptions options_;
};

}  // namespace

TheorifyResult theorify(const FiniteMonad& m, const TheorifyOptions& options)
{
    return Checker(m, options).run();
}

}  // namespace forge
