#include "forge/tensor.hpp"

#include <algorithm>
#include <chrono>
#include <memory>
#include <set>

#include "forge/error.hpp"

namespace forge {

namespace {

// The map i |-> dom[i] |-> images[choice[i]] as a table value.
Value choice_table(const FiniteSet& dom, std::span<const Value> cod, std::span<const std::size_t> choice)
{
    std::vector<std::pair<Value, Value>> entries;
    for (std::size_t i = 0; i < dom.size(); ++i)
        entries.emplace_back(dom[i], cod[choice[i]]);
    return Value::table(std::move(entries));
}

std::size_t position(const FiniteSet& s, const Value& v)
{
    auto i = s.index_of(v);
    if (!i)
        throw Error(v.str() + " is not in " + s.str());
    return *i;
}

}  // namespace

nlohmann::json EMCheck::to_json() const
{
    nlohmann::json j{{"status", ok ? "pass" : "fail"}, {"checked", checked}};
    if (witness)
        j["witness"] = *witness;
    return j;
}

EMCheck check_em_algebra(const EMAlgebra& a, std::size_t bound)
{
    EMCheck out;
    const FiniteMonad& t = a.monad;
    for (const auto& x : a.carrier) {
        ++out.checked;
        Value back = a.structure(t.unit(a.carrier, x));
        if (back != x) {
            out.ok = false;
            out.witness = nlohmann::json{{"law", "unit"}, {"x", x.str()}, {"result", back.str()}};
            return out;
        }
    }
    const FiniteSet& ta = t.carrier(a.carrier);
    for (std::size_t k = 0; k <= bound; ++k) {
        FiniteSet y = atoms(k, "y");
        const FiniteSet& ty = t.carrier(y);
        bool stop = !for_each_tuple(k, ta.size(), [&](std::span<const std::size_t> pick) {
            KleisliMap f = [&](const Value& v) -> const Value& { return ta[pick[position(y, v)]]; };
            std::vector<Value> flat;
            for (auto i : pick)
                flat.push_back(a.structure(ta[i]));
            auto alphaF = [&](const Value& v) -> Value { return flat[position(y, v)]; };
            for (const auto& m : ty) {
                ++out.checked;
                Value lhs = a.structure(t.extend(y, a.carrier, f, m));
                Value rhs = a.structure(t.fmap(y, a.carrier, alphaF, m));
                if (lhs != rhs) {
                    out.ok = false;
                    out.witness = nlohmann::json{{"law", "multiplication"}, {"ySize", k},
                                                 {"f", choice_table(y, ta.elements(), pick).str()},
                                                 {"m", m.str()}, {"lhs", lhs.str()}, {"rhs", rhs.str()}};
                    return false;
                }
            }
            return true;
        });
        if (stop)
            break;
    }
    return out;
}

EMAlgebra em_algebra_of_tables(const Presentation& p, const TableAlgebra& a)
{
    FiniteSet carrier(a.elements);
    auto ta = std::make_shared<FiniteSet>(p.monad.carrier(carrier));
    auto images = std::make_shared<std::vector<Value>>();
    images->reserve(ta->size());
    for (const auto& m : *ta)
        images->push_back(em_structure(p, a, carrier, m));
    // Elements outside the materialized T(carrier) (bounded fragments) are
    // evaluated directly.
    auto structure = [p, a, carrier, ta, images](const Value& m) -> Value {
        if (auto i = ta->index_of(m))
            return (*images)[*i];
        return em_structure(p, a, carrier, m);
    };
    return {p.monad, carrier, std::move(structure)};
}

nlohmann::json TensorLawReport::to_json() const
{
    nlohmann::json j{{"status", ok ? "pass" : "fail"}, {"checked", checked}, {"partial", partial}};
    if (witness)
        j["witness"] = *witness;
    return j;
}

TensorLawReport check_tensor_law(const TensorAlgebra& a, const TensorLawOptions& options)
{
    TensorLawReport out;
    const FiniteMonad& tm = a.t.monad;
    const FiniteMonad& sm = a.s.monad;
    const FiniteSet& carrier = a.carrier;
    for (std::size_t ny = 0; ny <= options.yBound; ++ny) {
        FiniteSet y = atoms(ny, "y");
        const FiniteSet& sy = sm.carrier(y);
        for (std::size_t nz = 0; nz <= options.zBound; ++nz) {
            FiniteSet z = atoms(nz, "z");
            const FiniteSet& tz = tm.carrier(z);
            std::vector<Value> inner(nz), outer(ny);
            bool stop = !for_each_tuple(ny * nz, carrier.size(), [&](std::span<const std::size_t> f) {
                auto cell = [&](std::size_t i, std::size_t j) -> const Value& { return carrier[f[i * nz + j]]; };
                for (const auto& p : sy) {
                    // inner(j) = beta(S(y |-> f(y, z_j))(p))
                    for (std::size_t j = 0; j < nz; ++j) {
                        auto column = [&](const Value& v) -> Value { return cell(position(y, v), j); };
                        inner[j] = a.s.structure(sm.fmap(y, carrier, column, p));
                    }
                    auto innerMap = [&](const Value& v) -> Value { return inner[position(z, v)]; };
                    for (const auto& q : tz) {
                        if (out.checked >= options.budget) {
                            out.partial = true;
                            return false;
                        }
                        ++out.checked;
                        Value lhs = a.t.structure(tm.fmap(z, carrier, innerMap, q));
                        // outer(i) = alpha(T(z |-> f(y_i, z))(q))
                        for (std::size_t i = 0; i < ny; ++i) {
                            auto row = [&](const Value& v) -> Value { return cell(i, position(z, v)); };
                            outer[i] = a.t.structure(tm.fmap(z, carrier, row, q));
                        }
                        auto outerMap = [&](const Value& v) -> Value { return outer[position(y, v)]; };
                        Value rhs = a.s.structure(sm.fmap(y, carrier, outerMap, p));
                        if (lhs != rhs) {
                            std::vector<std::pair<Value, Value>> entries;
                            for (std::size_t i = 0; i < ny; ++i)
                                for (std::size_t j = 0; j < nz; ++j)
                                    entries.emplace_back(Value::pair(y[i], z[j]), cell(i, j));
                            out.ok = false;
                            out.witness = nlohmann::json{{"ySize", ny}, {"zSize", nz}, {"p", p.str()},
                                                         {"q", q.str()},
                                                         {"f", Value::table(std::move(entries)).str()},
                                                         {"lhs", lhs.str()}, {"rhs", rhs.str()}};
                            return false;
                        }
                    }
                }
                return true;
            });
            if (stop)
                return out;
        }
    }
    return out;
}

std::vector<Equation> commutation_equations(const Theory& left, const Theory& right)
{
    Theory sum = theory_sum(left, right);
    const auto& ops = sum.signature().ops();
    const std::size_t nLeft = left.signature().size();
    std::vector<Equation> out;
    for (std::size_t a = 0; a < nLeft; ++a)
        for (std::size_t b = nLeft; b < ops.size(); ++b)
            out.push_back(commutation_equation(ops[a], ops[b]));
    return out;
}

namespace {

void require_tables(const Signature& sig, const TableAlgebra& a)
{
    for (const auto& op : sig.ops()) {
        auto it = a.tables.find(op.name);
        if (it == a.tables.end())
            throw Error("algebra has no table for " + op.name);
        if (it->second.size() != power_saturating(a.size(), op.arity))
            throw Error("table for " + op.name + " has the wrong size");
    }
}

}  // namespace

AlgebraCheck check_commutation_tables(const Theory& left, const Theory& right, const TableAlgebra& a)
{
    require_tables(theory_sum(left, right).signature(), a);
    AlgebraCheck out;
    for (const auto& eq : commutation_equations(left, right)) {
        if (!holds(a, eq, out.instances, &out.violation)) {
            out.ok = false;
            return out;
        }
    }
    return out;
}

std::pair<TableAlgebra, TableAlgebra> split_sum_algebra(const Theory& left, const Theory& right,
                                                        const TableAlgebra& a)
{
    Theory sum = theory_sum(left, right);
    require_tables(sum.signature(), a);
    const auto& ops = sum.signature().ops();
    const std::size_t nLeft = left.signature().size();
    TableAlgebra l{a.elements, {}}, r{a.elements, {}};
    for (std::size_t i = 0; i < ops.size(); ++i) {
        if (i < nLeft)
            l.tables[left.signature().ops()[i].name] = a.tables.at(ops[i].name);
        else
            r.tables[right.signature().ops()[i - nLeft].name] = a.tables.at(ops[i].name);
    }
    return {std::move(l), std::move(r)};
}

TheoryFamily theory_family(std::string_view name)
{
    if (name == "WellOrder")
        return [](std::size_t n) { return builtin_theory("WellOrder(" + std::to_string(std::max<std::size_t>(n, 1)) + ")"); };
    Theory t = builtin_theory(name);
    return [t](std::size_t) { return t; };
}

nlohmann::json TensorEnumeration::to_json() const
{
    nlohmann::json rows = nlohmann::json::array();
    bool monotone = true;
    for (std::size_t i = 0; i < perCarrier.size(); ++i) {
        const auto& c = perCarrier[i];
        rows.push_back({{"carrier", c.carrier}, {"count", c.count}, {"nodes", c.nodes}, {"partial", c.partial},
                        {"seconds", c.seconds}});
        if (i > 0 && c.count < perCarrier[i - 1].count)
            monotone = false;
    }
    return {{"left", left},     {"right", right},   {"generators", generators}, {"perCarrier", rows},
            {"total", total},   {"largestCarrier", largestCarrier}, {"monotone", monotone},
            {"partial", partial}};
}

TensorEnumeration enumerate_tensor_algebras(const TheoryFamily& left, const TheoryFamily& right,
                                            const TensorSearchConfig& config)
{
    if (config.maxCarrier < config.generators)
        throw Error("maxCarrier must be at least the number of generators");
    TensorEnumeration out;
    out.generators = config.generators;
    for (std::size_t n = config.minCarrier; n <= config.maxCarrier; ++n) {
        Theory l = left(n), r = right(n);
        out.left = l.name();
        out.right = r.name();
        CarrierStats stats;
        stats.carrier = n;
        if (n >= config.generators && n > 0) {
            ModelSearchOptions options;
            options.generators = config.generators;
            options.symmetryBreaking = config.symmetryBreaking;
            options.nodeBudget = config.nodeBudget;
            options.keepModels = config.keepAlgebras;
            auto start = std::chrono::steady_clock::now();
            auto found = find_models(theory_tensor(l, r), n, options);
            stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            stats.count = found.isoClasses;
            stats.nodes = found.nodes;
            stats.partial = found.partial;
            for (auto& m : found.models)
                out.algebras.push_back(std::move(m));
        }
        out.total += stats.count;
        out.partial = out.partial || stats.partial;
        if (stats.count > 0)
            out.largestCarrier = n;
        out.perCarrier.push_back(stats);
    }
    return out;
}

nlohmann::json SaturationReport::to_json() const
{
    nlohmann::json log = nlohmann::json::array();
    for (const auto& s : closure.phaseLog)
        log.push_back({{"round", s.round}, {"phase", s.phase == 0 ? "operations" : "joins"}, {"grew", s.grew},
                       {"classes", s.classes}});
    nlohmann::json classes = nlohmann::json::array();
    for (const auto& c : closure.algebra.classes)
        classes.push_back(c.repr.str());
    return {{"monad", monad},
            {"generators", generators},
            {"classes", closure.algebra.class_count()},
            {"representatives", classes},
            {"rounds", closure.rounds},
            {"fixpoint", closure.fixpoint},
            {"capped", closure.capped},
            {"stabilizationPattern", stabilizationPattern},
            {"phases", log}};
}

SaturationReport saturate_free_tensor(std::string_view monad, std::size_t generators, std::size_t maxRounds,
                                      std::size_t budget)
{
    Presentation p = builtin_presentation(monad);
    Theory sl = builtin_theory("Semilattice");
    Theory tensor = theory_tensor(sl, p.theory);
    const auto& ops = tensor.signature().ops();
    std::vector<std::string> monadOps, joinOps;
    for (std::size_t i = 0; i < ops.size(); ++i)
        (i < sl.signature().size() ? joinOps : monadOps).push_back(ops[i].name);
    std::vector<std::string> gens;
    for (std::size_t i = 0; i < generators; ++i)
        gens.push_back("x" + std::to_string(i));

    SaturationReport out;
    out.monad = std::string(monad);
    out.generators = generators;
    out.closure = close_in_phases(tensor, gens, {monadOps, joinOps}, maxRounds, budget);
    // After the last join phase that grew, at most one operation phase grows.
    const auto& log = out.closure.phaseLog;
    std::size_t lastJoin = log.size();
    for (std::size_t i = 0; i < log.size(); ++i)
        if (log[i].phase == 1 && log[i].grew)
            lastJoin = i;
    std::size_t laterGrowth = 0;
    for (std::size_t i = lastJoin == log.size() ? 0 : lastJoin + 1; i < log.size(); ++i)
        laterGrowth += log[i].grew ? 1 : 0;
    out.stabilizationPattern = out.closure.fixpoint && laterGrowth <= 1;
    return out;
}

HomomorphismReport free_homomorphism(const QuotientAlgebra& free, const TableAlgebra& target,
                                     const std::vector<std::uint32_t>& generatorImages)
{
    if (generatorImages.size() != free.generators.size())
        throw Error("free_homomorphism: one image per generator expected");
    std::map<std::string, std::uint32_t> env;
    for (std::size_t i = 0; i < free.generators.size(); ++i)
        env[free.generators[i]] = generatorImages[i];
    HomomorphismReport out;
    for (const auto& c : free.classes)
        out.classImage.push_back(eval_term(target, c.repr, env));
    for (const auto& [key, cls] : free.opTable) {
        const auto& [op, args] = key;
        std::vector<std::uint32_t> images;
        for (auto a : args)
            images.push_back(out.classImage[a]);
        if (target.apply(free.signature.ops()[op].name, images) != out.classImage[cls]) {
            out.homomorphism = false;
            out.witness = "operation " + free.signature.ops()[op].name + " at class " + std::to_string(cls);
            break;
        }
    }
    std::set<std::uint32_t> hit(out.classImage.begin(), out.classImage.end());
    out.surjective = hit.size() == target.size();
    if (!out.surjective && !out.witness)
        out.witness = "image has " + std::to_string(hit.size()) + " of " + std::to_string(target.size()) + " elements";
    return out;
}

nlohmann::json StateTensorReport::to_json() const
{
    nlohmann::json j{{"S", stateSize},
                     {"X", generatorCount},
                     {"expected", expected},
                     {"classes", classes},
                     {"depth", depth},
                     {"closed", closed},
                     {"bijection", bijection},
                     {"respectsOperations", respectsOperations},
                     {"respectsGenerators", respectsGenerators},
                     {"status", !closed ? "inconclusive" : passed() ? "pass" : "fail"}};
    if (witness)
        j["witness"] = *witness;
    return j;
}

namespace {

// An element of S -> P(S x X): for each state s a bit set over (s', x) at
// bit s' * |X| + x.
using StateSem = std::vector<std::uint64_t>;

std::string sem_str(const StateSem& v)
{
    std::string out;
    for (auto bits : v)
        out += (out.empty() ? "" : "|") + std::to_string(bits);
    return out;
}

}  // namespace

StateTensorReport verify_state_tensor(std::size_t stateSize, std::size_t generatorCount, std::size_t maxDepth,
                                      std::size_t budget)
{
    if (stateSize == 0 || stateSize * generatorCount > 16)
        throw Error("verify_state_tensor: sizes out of range");
    StateTensorReport out;
    out.stateSize = stateSize;
    out.generatorCount = generatorCount;
    out.expected = power_saturating(power_saturating(2, stateSize * generatorCount), stateSize);

    Theory tensor = theory_tensor(builtin_theory("Semilattice"),
                                  builtin_theory("StateTheory(" + std::to_string(stateSize) + ")"));
    std::vector<std::string> gens;
    for (std::size_t i = 0; i < generatorCount; ++i)
        gens.push_back("x" + std::to_string(i));
    QuotientAlgebra q = free_algebra(tensor, gens, maxDepth, budget);
    out.classes = q.class_count();
    out.depth = q.depth;
    out.closed = q.closed;

    const std::size_t nx = generatorCount;
    auto op_sem = [&](const std::string& name, const std::vector<StateSem>& args) -> StateSem {
        StateSem r(stateSize, 0);
        if (name == "join") {
            for (std::size_t s = 0; s < stateSize; ++s)
                r[s] = args[0][s] | args[1][s];
        } else if (name == "lookup") {
            for (std::size_t s = 0; s < stateSize; ++s)
                r[s] = args[s][s];
        } else if (name.starts_with("update_")) {
            std::size_t v = std::stoul(name.substr(7));
            for (std::size_t s = 0; s < stateSize; ++s)
                r[s] = args[0][v];
        } else if (name != "bot") {
            throw Error("verify_state_tensor: unexpected operation " + name);
        }
        return r;
    };
    auto gen_sem = [&](std::size_t g) {
        StateSem r(stateSize, 0);
        for (std::size_t s = 0; s < stateSize; ++s)
            r[s] = std::uint64_t{1} << (s * nx + g);
        return r;
    };
    std::function<StateSem(const Term&)> eval = [&](const Term& t) -> StateSem {
        if (t.is_var()) {
            auto it = std::find(gens.begin(), gens.end(), t.name());
            return gen_sem(static_cast<std::size_t>(it - gens.begin()));
        }
        std::vector<StateSem> args;
        for (const auto& a : t.args())
            args.push_back(eval(a));
        return op_sem(t.name(), args);
    };

    std::vector<StateSem> image;
    for (const auto& c : q.classes)
        image.push_back(eval(c.repr));

    out.respectsGenerators = true;
    for (std::size_t g = 0; g < gens.size(); ++g) {
        if (image[q.generatorClass.at(gens[g])] != gen_sem(g)) {
            out.respectsGenerators = false;
            out.witness = "generator " + gens[g];
        }
    }
    out.respectsOperations = true;
    for (const auto& [key, cls] : q.opTable) {
        std::vector<StateSem> args;
        for (auto a : key.second)
            args.push_back(image[a]);
        const std::string& name = q.signature.ops()[key.first].name;
        if (op_sem(name, args) != image[cls]) {
            out.respectsOperations = false;
            out.witness = "operation " + name + " into class " + std::to_string(cls) + " (" + sem_str(image[cls]) + ")";
            break;
        }
    }
    std::set<StateSem> distinct(image.begin(), image.end());
    out.bijection = distinct.size() == image.size() && image.size() == out.expected;
    if (!out.bijection && !out.witness)
        out.witness = std::to_string(distinct.size()) + " distinct images for " + std::to_string(image.size()) +
                      " classes";
    return out;
}

}  // namespace forge
