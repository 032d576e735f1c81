#include "forge/free_algebra.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <unordered_map>

#include "forge/error.hpp"
#include "forge/finite_set.hpp"

namespace forge {

std::vector<Term> enumerate_terms(const Signature& sig, const std::vector<std::string>& gens, std::size_t depth,
                                  std::size_t budget)
{
    std::vector<Term> previous;
    std::vector<Term> level;
    for (std::size_t h = 0; h <= depth; ++h) {
        level.clear();
        for (const auto& g : gens)
            level.push_back(Term::var(g));
        for (const auto& op : sig.ops()) {
            if (h == 0 && op.arity > 0)
                continue;
            std::uint64_t count = power_saturating(previous.size(), op.arity);
            if (level.size() + count > budget)
                throw BudgetExceeded("term enumeration exceeds budget of " + std::to_string(budget) + " terms");
            for_each_tuple(op.arity, previous.size(), [&](std::span<const std::size_t> pick) {
                std::vector<Term> args;
                args.reserve(pick.size());
                for (auto i : pick)
                    args.push_back(previous[i]);
                level.push_back(Term::app(op.name, std::move(args)));
                return true;
            });
        }
        previous.swap(level);
    }
    return previous;
}

namespace {

constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();
constexpr std::size_t kInfLevel = std::numeric_limits<std::size_t>::max();

struct KeyHash {
    std::size_t operator()(const std::vector<std::uint32_t>& key) const
    {
        std::size_t h = key.size();
        for (auto k : key)
            h ^= k + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        return h;
    }
};

struct Pattern {
    bool isVar = false;
    std::uint32_t var = 0;
    std::uint32_t op = 0;
    std::vector<Pattern> args;
};

struct CompiledEquation {
    Pattern first;
    Pattern second;
    std::vector<std::uint32_t> secondVars;
};

// Operations carry their signature index; generator g is the nullary
// pseudo-operation numOps + g.
struct Node {
    std::uint32_t op;
    std::uint32_t cls;
    std::vector<std::uint32_t> args;
};

class EGraph {
public:
    EGraph(const Signature& sig, std::size_t gens) : numOps_(static_cast<std::uint32_t>(sig.size()))
    {
        byOp_.resize(numOps_ + gens);
    }

    std::size_t node_count() const { return alive_.size(); }

    std::uint32_t find(std::uint32_t c) const
    {
        while (parent_[c] != c)
            c = parent_[c];
        return c;
    }

    // Adds a node if absent; returns true when a node was created.
    bool add(std::uint32_t op, std::vector<std::uint32_t> args)
    {
        for (auto& a : args)
            a = find(a);
        std::vector<std::uint32_t> key;
        key.reserve(args.size() + 1);
        key.push_back(op);
        key.insert(key.end(), args.begin(), args.end());
        if (hash_.contains(key))
            return false;
        auto id = static_cast<std::uint32_t>(nodes_.size());
        nodes_.push_back({op, id, std::move(args)});
        parent_.push_back(id);
        classNodes_.emplace_back(1, id);
        std::size_t lvl = 0;
        for (auto a : nodes_.back().args)
            lvl = std::max(lvl, level_[a] == kInfLevel ? kInfLevel : level_[a] + 1);
        level_.push_back(lvl);
        hash_.emplace(std::move(key), id);
        alive_.push_back(id);
        byOp_[op].push_back(id);
        return true;
    }

    std::vector<std::uint32_t> classes_up_to(std::size_t maxLevel) const
    {
        std::vector<std::uint32_t> out;
        for (std::uint32_t c = 0; c < parent_.size(); ++c)
            if (parent_[c] == c && level_[c] <= maxLevel)
                out.push_back(c);
        return out;
    }

    std::vector<std::uint32_t> roots() const { return classes_up_to(kInfLevel); }

    std::size_t level(std::uint32_t c) const { return level_[find(c)]; }

    std::optional<std::uint32_t> lookup(const Pattern& p, const std::vector<std::uint32_t>& subst) const
    {
        if (p.isVar)
            return find(subst[p.var]);
        std::vector<std::uint32_t> key;
        key.reserve(p.args.size() + 1);
        key.push_back(p.op);
        for (const auto& a : p.args) {
            auto c = lookup(a, subst);
            if (!c)
                return std::nullopt;
            key.push_back(*c);
        }
        auto it = hash_.find(key);
        if (it == hash_.end())
            return std::nullopt;
        return find(nodes_[it->second].cls);
    }

    // Collects unions for every instance of the equation whose two sides are
    // both represented.
    void match_equation(const CompiledEquation& eq, std::size_t numVars,
                        std::vector<std::pair<std::uint32_t, std::uint32_t>>& out) const
    {
        std::vector<std::uint32_t> subst(numVars, kNone);
        match_anywhere(eq.first, subst, [&](std::uint32_t c1) {
            bool bound = std::all_of(eq.secondVars.begin(), eq.secondVars.end(),
                                     [&](std::uint32_t v) { return subst[v] != kNone; });
            if (bound) {
                if (auto c2 = lookup(eq.second, subst); c2 && *c2 != c1)
                    out.emplace_back(c1, *c2);
                return;
            }
            match_anywhere(eq.second, subst, [&](std::uint32_t c2) {
                if (c1 != c2)
                    out.emplace_back(c1, c2);
            });
        });
    }

    // Returns the number of unions that changed the partition.
    std::size_t unite_all(const std::vector<std::pair<std::uint32_t, std::uint32_t>>& pairs)
    {
        std::size_t merged = 0;
        for (auto [a, b] : pairs)
            merged += unite(a, b) ? 1 : 0;
        if (merged > 0)
            rebuild();
        return merged;
    }

    const std::vector<std::uint32_t>& alive() const { return alive_; }
    const Node& node(std::uint32_t id) const { return nodes_[id]; }
    const std::vector<std::uint32_t>& class_nodes(std::uint32_t root) const { return classNodes_[root]; }
    std::uint32_t num_ops() const { return numOps_; }

private:
    bool unite(std::uint32_t a, std::uint32_t b)
    {
        a = find(a);
        b = find(b);
        if (a == b)
            return false;
        if (b < a)
            std::swap(a, b);
        parent_[b] = a;
        return true;
    }

    // Restores the congruence invariant: nodes with equal canonical keys
    // belong to one class, and each key has a single live node.
    void rebuild()
    {
        bool changed = true;
        while (changed) {
            changed = false;
            hash_.clear();
            for (auto id : alive_) {
                Node& n = nodes_[id];
                for (auto& a : n.args)
                    a = find(a);
                std::vector<std::uint32_t> key;
                key.reserve(n.args.size() + 1);
                key.push_back(n.op);
                key.insert(key.end(), n.args.begin(), n.args.end());
                auto [it, inserted] = hash_.try_emplace(std::move(key), id);
                if (!inserted && unite(nodes_[it->second].cls, n.cls))
                    changed = true;
            }
        }
        alive_.clear();
        for (const auto& [key, id] : hash_)
            alive_.push_back(id);
        std::sort(alive_.begin(), alive_.end());

        for (auto& list : classNodes_)
            list.clear();
        for (auto& list : byOp_)
            list.clear();
        for (auto id : alive_) {
            classNodes_[find(nodes_[id].cls)].push_back(id);
            byOp_[nodes_[id].op].push_back(id);
        }
        recompute_levels();
    }

    void recompute_levels()
    {
        std::fill(level_.begin(), level_.end(), kInfLevel);
        bool changed = true;
        while (changed) {
            changed = false;
            for (auto id : alive_) {
                const Node& n = nodes_[id];
                std::size_t lvl = 0;
                for (auto a : n.args) {
                    std::size_t al = level_[find(a)];
                    lvl = al == kInfLevel ? kInfLevel : std::max(lvl, al + 1);
                }
                auto c = find(n.cls);
                if (lvl < level_[c]) {
                    level_[c] = lvl;
                    changed = true;
                }
            }
        }
    }

    void match_class(const Pattern& p, std::uint32_t cls, std::vector<std::uint32_t>& subst,
                     const std::function<void()>& k) const
    {
        if (p.isVar) {
            if (subst[p.var] == kNone) {
                subst[p.var] = cls;
                k();
                subst[p.var] = kNone;
            } else if (find(subst[p.var]) == cls) {
                k();
            }
            return;
        }
        for (auto id : classNodes_[cls]) {
            const Node& n = nodes_[id];
            if (n.op == p.op)
                match_args(p.args, n.args, 0, subst, k);
        }
    }

    void match_args(const std::vector<Pattern>& pats, const std::vector<std::uint32_t>& args, std::size_t i,
                    std::vector<std::uint32_t>& subst, const std::function<void()>& k) const
    {
        if (i == pats.size()) {
            k();
            return;
        }
        match_class(pats[i], find(args[i]), subst, [&] { match_args(pats, args, i + 1, subst, k); });
    }

    void match_anywhere(const Pattern& p, std::vector<std::uint32_t>& subst,
                        const std::function<void(std::uint32_t)>& k) const
    {
        if (p.isVar) {
            if (subst[p.var] != kNone) {
                k(find(subst[p.var]));
                return;
            }
            for (auto c : roots()) {
                subst[p.var] = c;
                k(c);
            }
            subst[p.var] = kNone;
            return;
        }
        for (auto id : byOp_[p.op]) {
            const Node& n = nodes_[id];
            match_args(p.args, n.args, 0, subst, [&] { k(find(n.cls)); });
        }
    }

    std::uint32_t numOps_;
    std::vector<Node> nodes_;
    std::vector<std::uint32_t> parent_;
    std::vector<std::size_t> level_;
    std::vector<std::vector<std::uint32_t>> classNodes_;
    std::vector<std::vector<std::uint32_t>> byOp_;
    std::vector<std::uint32_t> alive_;
    std::unordered_map<std::vector<std::uint32_t>, std::uint32_t, KeyHash> hash_;
};

Pattern compile(const Term& t, const Signature& sig, std::map<std::string, std::uint32_t>& vars)
{
    Pattern p;
    if (t.is_var()) {
        p.isVar = true;
        auto [it, inserted] = vars.emplace(t.name(), static_cast<std::uint32_t>(vars.size()));
        p.var = it->second;
        return p;
    }
    p.op = static_cast<std::uint32_t>(*sig.index_of(t.name()));
    for (const auto& a : t.args())
        p.args.push_back(compile(a, sig, vars));
    return p;
}

void pattern_vars(const Pattern& p, std::set<std::uint32_t>& out)
{
    if (p.isVar) {
        out.insert(p.var);
        return;
    }
    for (const auto& a : p.args)
        pattern_vars(a, out);
}

// Matches the side with more variables first (an application when there is
// a choice) so the second side is usually a plain lookup.
std::pair<CompiledEquation, std::size_t> compile(const Equation& eq, const Signature& sig)
{
    std::map<std::string, std::uint32_t> vars;
    Pattern lhs = compile(eq.lhs, sig, vars);
    Pattern rhs = compile(eq.rhs, sig, vars);
    std::set<std::uint32_t> lv, rv;
    pattern_vars(lhs, lv);
    pattern_vars(rhs, rv);
    bool swap = rv.size() > lv.size() || (lhs.isVar && !rhs.isVar);
    CompiledEquation out;
    out.first = swap ? std::move(rhs) : std::move(lhs);
    out.second = swap ? std::move(lhs) : std::move(rhs);
    const auto& secondVars = swap ? lv : rv;
    out.secondVars.assign(secondVars.begin(), secondVars.end());
    return {std::move(out), vars.size()};
}

std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b)
{
    if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a)
        return std::numeric_limits<std::uint64_t>::max();
    return a * b;
}

std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b)
{
    return b > std::numeric_limits<std::uint64_t>::max() - a ? std::numeric_limits<std::uint64_t>::max() : a + b;
}

class Builder {
public:
    Builder(const Theory& t, const std::vector<std::string>& gens, std::size_t budget)
        : theory_(&t), numGens_(gens.size()), budget_(budget), graph_(t.signature(), gens.size())
    {
        for (const auto& eq : t.equations()) {
            if (eq.lhs == eq.rhs)
                continue;
            equations_.push_back(compile(eq, t.signature()));
        }
    }

    // Returns false when the budget forbids completing this depth.
    bool extend_to(std::size_t h)
    {
        const auto& ops = theory_->signature().ops();
        if (h == 0) {
            for (std::size_t g = 0; g < numGens_; ++g)
                graph_.add(static_cast<std::uint32_t>(ops.size() + g), {});
            for (std::size_t i = 0; i < ops.size(); ++i)
                if (ops[i].arity == 0)
                    graph_.add(static_cast<std::uint32_t>(i), {});
            saturate();
            return true;
        }
        while (true) {
            auto eligible = graph_.classes_up_to(h - 1);
            std::uint64_t projected = graph_.node_count();
            for (const auto& op : ops)
                projected = saturating_add(projected, power_saturating(eligible.size(), op.arity));
            if (projected > budget_)
                return false;
            std::size_t added = 0;
            for (std::size_t i = 0; i < ops.size(); ++i) {
                if (ops[i].arity == 0)
                    continue;
                for_each_tuple(ops[i].arity, eligible.size(), [&](std::span<const std::size_t> pick) {
                    std::vector<std::uint32_t> args;
                    args.reserve(pick.size());
                    for (auto k : pick)
                        args.push_back(eligible[k]);
                    added += graph_.add(static_cast<std::uint32_t>(i), std::move(args)) ? 1 : 0;
                    return true;
                });
            }
            std::size_t merged = saturate();
            if (added == 0 && merged == 0)
                return true;
        }
    }

    // Applies the listed operations to every class until no new node appears.
    // Returns false when the budget forbids a pass.
    bool close_under(const std::vector<std::size_t>& opIndices, bool& grew)
    {
        const auto& ops = theory_->signature().ops();
        while (true) {
            auto eligible = graph_.roots();
            std::uint64_t projected = graph_.node_count();
            for (auto i : opIndices)
                projected = saturating_add(projected, power_saturating(eligible.size(), ops[i].arity));
            if (projected > budget_)
                return false;
            std::size_t added = 0;
            for (auto i : opIndices) {
                for_each_tuple(ops[i].arity, eligible.size(), [&](std::span<const std::size_t> pick) {
                    std::vector<std::uint32_t> args;
                    args.reserve(pick.size());
                    for (auto k : pick)
                        args.push_back(eligible[k]);
                    added += graph_.add(static_cast<std::uint32_t>(i), std::move(args)) ? 1 : 0;
                    return true;
                });
            }
            saturate();
            if (added == 0)
                return true;
            grew = true;
        }
    }

    std::size_t class_count() const { return graph_.roots().size(); }
    std::size_t max_level() const
    {
        std::size_t m = 0;
        for (auto c : graph_.roots())
            m = std::max(m, graph_.level(c));
        return m;
    }
    const EGraph& graph() const { return graph_; }

private:
    std::size_t saturate()
    {
        std::size_t total = 0;
        while (true) {
            std::vector<std::pair<std::uint32_t, std::uint32_t>> unions;
            for (const auto& [eq, numVars] : equations_)
                graph_.match_equation(eq, numVars, unions);
            std::size_t merged = graph_.unite_all(unions);
            total += merged;
            if (merged == 0)
                return total;
        }
    }

    const Theory* theory_;
    std::size_t numGens_;
    std::size_t budget_;
    EGraph graph_;
    std::vector<std::pair<CompiledEquation, std::size_t>> equations_;
};

QuotientAlgebra extract(const Theory& t, const std::vector<std::string>& gens, const EGraph& g, std::size_t depth)
{
    QuotientAlgebra out;
    out.theory = t.name();
    out.signature = t.signature();
    out.generators = gens;
    out.depth = depth;
    out.nodeCount = g.node_count();

    const auto roots = g.roots();
    const auto& ops = t.signature().ops();
    auto term_of_leaf = [&](const Node& n) {
        return n.op < g.num_ops() ? Term::app(ops[n.op].name) : Term::var(gens[n.op - g.num_ops()]);
    };

    // least[h][c]: least member of class c with height <= h.
    std::map<std::uint32_t, std::optional<Term>> least;
    std::map<std::uint32_t, std::uint64_t> count;
    std::map<std::uint32_t, Term> repr;
    for (auto c : roots) {
        least[c] = std::nullopt;
        count[c] = 0;
    }
    for (std::size_t h = 0; h <= depth; ++h) {
        std::map<std::uint32_t, std::optional<Term>> nextLeast;
        std::map<std::uint32_t, std::uint64_t> nextCount;
        for (auto c : roots) {
            std::optional<Term> best;
            std::uint64_t n = 0;
            for (auto id : g.class_nodes(c)) {
                const Node& node = g.node(id);
                if (node.args.empty()) {
                    n = saturating_add(n, 1);
                    Term leaf = term_of_leaf(node);
                    if (!best || leaf < *best)
                        best = std::move(leaf);
                    continue;
                }
                if (h == 0)
                    continue;
                std::uint64_t product = 1;
                std::vector<Term> args;
                bool complete = true;
                for (auto a : node.args) {
                    auto root = g.find(a);
                    product = saturating_mul(product, count[root]);
                    if (!least[root]) {
                        complete = false;
                        break;
                    }
                    args.push_back(*least[root]);
                }
                if (!complete)
                    continue;
                n = saturating_add(n, product);
                Term candidate = Term::app(ops[node.op].name, std::move(args));
                if (!best || candidate < *best)
                    best = std::move(candidate);
            }
            if (best && !repr.contains(c))
                repr.emplace(c, *best);
            nextLeast[c] = std::move(best);
            nextCount[c] = n;
        }
        least.swap(nextLeast);
        count.swap(nextCount);
    }

    std::vector<std::uint32_t> order(roots.begin(), roots.end());
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        auto la = g.level(a), lb = g.level(b);
        if (la != lb)
            return la < lb;
        return repr.at(a) < repr.at(b);
    });
    std::map<std::uint32_t, std::size_t> index;
    for (std::size_t i = 0; i < order.size(); ++i) {
        index[order[i]] = i;
        out.classes.push_back({repr.at(order[i]), g.level(order[i]), count.at(order[i])});
    }
    for (auto id : g.alive()) {
        const Node& node = g.node(id);
        std::size_t cls = index.at(g.find(node.cls));
        if (node.op >= g.num_ops()) {
            out.generatorClass[gens[node.op - g.num_ops()]] = cls;
            continue;
        }
        std::vector<std::size_t> args;
        for (auto a : node.args)
            args.push_back(index.at(g.find(a)));
        out.opTable[{node.op, std::move(args)}] = cls;
    }
    return out;
}

}  // namespace

std::optional<std::size_t> QuotientAlgebra::class_of(const Term& t) const
{
    if (t.is_var()) {
        auto it = generatorClass.find(t.name());
        if (it == generatorClass.end())
            return std::nullopt;
        return it->second;
    }
    auto op = signature.index_of(t.name());
    if (!op)
        return std::nullopt;
    std::vector<std::size_t> args;
    for (const auto& a : t.args()) {
        auto c = class_of(a);
        if (!c)
            return std::nullopt;
        args.push_back(*c);
    }
    return apply(*op, args);
}

std::optional<std::size_t> QuotientAlgebra::apply(std::size_t op, const std::vector<std::size_t>& args) const
{
    auto it = opTable.find({op, args});
    if (it == opTable.end())
        return std::nullopt;
    return it->second;
}

QuotientAlgebra free_algebra(const Theory& t, const std::vector<std::string>& gens, std::size_t depth,
                             std::size_t budget)
{
    Builder builder(t, gens, budget);
    std::vector<std::size_t> counts;
    std::size_t reached = 0;
    bool capped = false;
    for (std::size_t h = 0; h <= depth; ++h) {
        Builder snapshot = builder;
        if (!builder.extend_to(h)) {
            if (h == 0)
                throw BudgetExceeded("free algebra exceeds budget of " + std::to_string(budget) + " nodes at depth 0");
            builder = std::move(snapshot);
            capped = true;
            break;
        }
        counts.push_back(builder.class_count());
        reached = h;
    }

    QuotientAlgebra out = extract(t, gens, builder.graph(), reached);
    out.requestedDepth = depth;
    out.capped = capped;
    out.classCountByDepth = counts;
    bool allOld = std::all_of(out.classes.begin(), out.classes.end(),
                              [&](const QuotientClass& c) { return reached > 0 && c.level < reached; });
    bool stable = counts.size() >= 2 && counts[counts.size() - 1] == counts[counts.size() - 2];
    out.closed = out.classes.empty() || (allOld && stable);
    return out;
}

PhasedClosure close_in_phases(const Theory& t, const std::vector<std::string>& gens,
                              const std::vector<std::vector<std::string>>& phases, std::size_t maxRounds,
                              std::size_t budget)
{
    std::vector<std::vector<std::size_t>> indices;
    for (const auto& phase : phases) {
        std::vector<std::size_t> ops;
        for (const auto& name : phase) {
            auto i = t.signature().index_of(name);
            if (!i)
                throw Error("close_in_phases: unknown operation '" + name + "'");
            ops.push_back(*i);
        }
        indices.push_back(std::move(ops));
    }
    Builder builder(t, gens, budget);
    builder.extend_to(0);
    PhasedClosure out;
    for (std::size_t round = 0; round < maxRounds && !out.fixpoint; ++round) {
        bool grewThisRound = false;
        for (std::size_t k = 0; k < indices.size(); ++k) {
            bool grew = false;
            if (!builder.close_under(indices[k], grew)) {
                out.capped = true;
                break;
            }
            grewThisRound = grewThisRound || grew;
            out.phaseLog.push_back({round, k, grew, builder.class_count()});
        }
        if (out.capped)
            break;
        ++out.rounds;
        out.fixpoint = !grewThisRound;
    }
    out.algebra = extract(t, gens, builder.graph(), builder.max_level());
    out.algebra.requestedDepth = out.algebra.depth;
    out.algebra.closed = out.fixpoint;
    out.algebra.capped = out.capped;
    return out;
}

Decision decide_equal(const Theory& t, const Term& a, const Term& b, std::size_t depth, std::size_t budget)
{
    if (a == b)
        return Decision::Equal;
    std::set<std::string> vars;
    a.collect_vars(vars);
    b.collect_vars(vars);
    std::vector<std::string> gens(vars.begin(), vars.end());
    std::size_t d = std::max({depth, a.height(), b.height()});
    QuotientAlgebra q = free_algebra(t, gens, d, budget);
    auto ca = q.class_of(a);
    auto cb = q.class_of(b);
    return ca && cb && *ca == *cb ? Decision::Equal : Decision::Unknown;
}

nlohmann::json quotient_to_json(const QuotientAlgebra& q, std::size_t opSample)
{
    nlohmann::json classes = nlohmann::json::array();
    for (const auto& c : q.classes)
        classes.push_back({{"repr", c.repr.str()}, {"size", c.size}});
    nlohmann::json table = nlohmann::json::array();
    for (const auto& [key, result] : q.opTable) {
        if (table.size() == opSample)
            break;
        table.push_back({{"op", q.signature.ops()[key.first].name}, {"args", key.second}, {"result", result}});
    }
    return {{"schema", 1},
            {"theory", q.theory},
            {"generators", q.generators},
            {"depth", q.depth},
            {"requestedDepth", q.requestedDepth},
            {"closed", q.closed},
            {"capped", q.capped},
            {"classCount", q.class_count()},
            {"classCountByDepth", q.classCountByDepth},
            {"classes", classes},
            {"opTable", table}};
}

}  // namespace forge
