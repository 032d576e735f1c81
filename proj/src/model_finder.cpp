#include "forge/model_finder.hpp"

#include <algorithm>
#include <array>
#include <numeric>
#include <set>

#include "forge/error.hpp"

namespace forge {

namespace {

struct CTerm {
    int var = -1;
    int op = -1;
    std::vector<CTerm> args;
};

struct Instance {
    std::uint32_t equation;
    std::uint32_t env;  // offset into the shared assignment pool
};

class Search {
public:
    Search(const Theory& t, std::size_t n, const ModelSearchOptions& o) : theory_(t), n_(n), options_(o)
    {
        for (const auto& op : t.signature().ops())
            ops_.push_back(op);
        std::sort(ops_.begin(), ops_.end(), [](const OpSymbol& a, const OpSymbol& b) { return a.name < b.name; });
        std::size_t total = 0;
        for (const auto& op : ops_) {
            offset_.push_back(total);
            std::uint64_t cells = power_saturating(n, op.arity);
            if (cells > (1u << 22))
                throw BudgetExceeded("table for " + op.name + " is too large");
            total += cells;
        }
        values_.assign(total, -1);
        watch_.resize(total);
        build_order();
        compile_equations();
    }

    ModelSearchResult run()
    {
        ModelSearchResult r;
        r.carrier = n_;
        result_ = &r;
        if (n_ == 0)
            return r;
        std::size_t k = options_.generators.value_or(0);
        if (k > n_)
            return r;
        discovered_ = options_.generators ? k : n_;
        if (initial_propagation())
            descend(0);
        if (!canonicalOnly())
            r.isoClasses = seen_.size();
        return r;
    }

private:
    bool canonicalOnly() const { return options_.generators && options_.symmetryBreaking; }

    void build_order()
    {
        struct Entry {
            int stage;
            std::size_t op;
            std::size_t index;
        };
        std::vector<Entry> entries;
        for (std::size_t i = 0; i < ops_.size(); ++i) {
            std::size_t cells = power_saturating(n_, ops_[i].arity);
            for (std::size_t idx = 0; idx < cells; ++idx) {
                int stage = -1;
                std::size_t rest = idx;
                for (std::size_t a = 0; a < ops_[i].arity; ++a) {
                    stage = std::max(stage, static_cast<int>(rest % n_));
                    rest /= n_;
                }
                entries.push_back({stage, i, idx});
            }
        }
        std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) { return a.stage < b.stage; });
        for (const auto& e : entries) {
            order_.push_back(static_cast<std::uint32_t>(offset_[e.op] + e.index));
            stageOf_.push_back(e.stage);
        }
    }

    CTerm compile(const Term& t, const std::vector<std::string>& ctx)
    {
        CTerm c;
        if (t.is_var()) {
            c.var = static_cast<int>(std::find(ctx.begin(), ctx.end(), t.name()) - ctx.begin());
            return c;
        }
        auto it = std::find_if(ops_.begin(), ops_.end(), [&](const OpSymbol& op) { return op.name == t.name(); });
        c.op = static_cast<int>(it - ops_.begin());
        for (const auto& a : t.args())
            c.args.push_back(compile(a, ctx));
        return c;
    }

    void compile_equations()
    {
        for (const auto& eq : theory_.equations()) {
            if (eq.lhs == eq.rhs)
                continue;
            equations_.push_back({compile(eq.lhs, eq.context), compile(eq.rhs, eq.context)});
            std::uint32_t id = static_cast<std::uint32_t>(equations_.size() - 1);
            for_each_tuple(eq.context.size(), n_, [&](std::span<const std::size_t> pick) {
                std::uint32_t env = static_cast<std::uint32_t>(pool_.size());
                for (auto v : pick)
                    pool_.push_back(static_cast<std::uint8_t>(v));
                instances_.push_back({id, env});
                return true;
            });
        }
    }

    // Value of t, or -1 with `blocked` set to the first missing cell; `top`
    // tells whether that cell is t's own.
    int eval(const CTerm& t, const std::uint8_t* env, std::int64_t& blocked, bool& top) const
    {
        if (t.var >= 0)
            return env[t.var];
        std::size_t index = 0;
        std::array<int, 8> vals;
        std::size_t k = t.args.size(), unknown = 0;
        std::int64_t argBlocked = -1;
        for (std::size_t i = 0; i < k; ++i) {
            vals[i] = eval(t.args[i], env, blocked, top);
            if (vals[i] < 0) {
                if (unknown++ == 0)
                    argBlocked = blocked;
            } else if (unknown == 0) {
                index = index * n_ + static_cast<std::size_t>(vals[i]);
            }
        }
        if (unknown > 0)
            return eval_partial(t, vals, argBlocked, blocked, top);
        std::size_t cell = offset_[static_cast<std::size_t>(t.op)] + index;
        if (values_[cell] < 0) {
            blocked = static_cast<std::int64_t>(cell);
            top = true;
            return -1;
        }
        return values_[cell];
    }

    // Some arguments are unknown: the value is still determined when every
    // cell they could select holds the same value. Otherwise blocks on the
    // first unassigned such cell, or on the first unknown argument.
    int eval_partial(const CTerm& t, const std::array<int, 8>& vals, std::int64_t argBlocked,
                     std::int64_t& blocked, bool& top) const
    {
        top = false;
        std::size_t k = t.args.size(), base = offset_[static_cast<std::size_t>(t.op)];
        std::array<std::size_t, 8> digit{};
        int common = -1;
        while (true) {
            std::size_t index = 0;
            for (std::size_t i = 0; i < k; ++i)
                index = index * n_ + (vals[i] >= 0 ? static_cast<std::size_t>(vals[i]) : digit[i]);
            int v = values_[base + index];
            if (v < 0) {
                blocked = static_cast<std::int64_t>(base + index);
                return -1;
            }
            if (common >= 0 && v != common) {
                blocked = argBlocked;
                return -1;
            }
            common = v;
            std::size_t i = k;
            while (i > 0) {
                --i;
                if (vals[i] >= 0)
                    continue;
                if (++digit[i] < n_)
                    break;
                digit[i] = 0;
                if (i == 0)
                    return common;
            }
            bool done = true;
            for (std::size_t j = 0; j < k; ++j)
                if (vals[j] < 0 && digit[j] != 0)
                    done = false;
            if (done)
                return common;
        }
    }

    // Re-examines one instance; false on violation.
    bool examine(std::uint32_t i)
    {
        const Instance& inst = instances_[i];
        const auto& [lhs, rhs] = equations_[inst.equation];
        const std::uint8_t* env = pool_.data() + inst.env;
        std::int64_t lb = -1, rb = -1;
        bool lt = false, rt = false;
        int l = eval(lhs, env, lb, lt);
        int r = eval(rhs, env, rb, rt);
        if (l >= 0 && r >= 0) {
            --open_;
            return l == r;
        }
        if (l >= 0 && rt) {
            --open_;
            return force(static_cast<std::uint32_t>(rb), l);
        }
        if (r >= 0 && lt) {
            --open_;
            return force(static_cast<std::uint32_t>(lb), r);
        }
        std::uint32_t cell = static_cast<std::uint32_t>(l < 0 ? lb : rb);
        watch_[cell].push_back(i);
        watchTrail_.push_back(cell);
        return true;
    }

    bool force(std::uint32_t cell, int value)
    {
        if (values_[cell] >= 0)
            return values_[cell] == value;
        values_[cell] = value;
        trail_.push_back(cell);
        pending_.push_back(cell);
        return true;
    }

    bool propagate()
    {
        while (!pending_.empty()) {
            std::uint32_t cell = pending_.back();
            pending_.pop_back();
            // The list may not grow while we walk it: `cell` has a value.
            for (std::size_t k = 0; k < watch_[cell].size(); ++k) {
                if (!examine(watch_[cell][k])) {
                    pending_.clear();
                    return false;
                }
            }
        }
        return true;
    }

    bool initial_propagation()
    {
        open_ = instances_.size();
        for (std::uint32_t i = 0; i < instances_.size(); ++i)
            if (!examine(i))
                return false;
        return propagate();
    }

    void undo(std::size_t trailMark, std::size_t watchMark)
    {
        while (trail_.size() > trailMark) {
            values_[trail_.back()] = -1;
            trail_.pop_back();
        }
        while (watchTrail_.size() > watchMark) {
            watch_[watchTrail_.back()].pop_back();
            watchTrail_.pop_back();
        }
    }

    void descend(std::size_t pos)
    {
        if (result_->partial)
            return;
        if (pos == order_.size()) {
            leaf();
            return;
        }
        std::uint32_t cell = order_[pos];
        bool canonical = canonicalOnly();
        if (canonical && open_ == 0 && !options_.keepModels) {
            // No equation instance is waiting on anything: the remaining
            // cells are free, so count the canonical completions directly.
            result_->isoClasses += count_free_completions(pos);
            return;
        }
        if (canonical && stageOf_[pos] >= static_cast<int>(discovered_))
            return;  // the remaining cells cannot reach a new element
        if (values_[cell] >= 0) {
            step(pos, values_[cell], canonical);
            return;
        }
        int limit = canonical ? static_cast<int>(std::min(discovered_, n_ - 1)) : static_cast<int>(n_ - 1);
        for (int v = 0; v <= limit && !result_->partial; ++v) {
            if (++result_->nodes > options_.nodeBudget) {
                result_->partial = true;
                return;
            }
            std::size_t trailMark = trail_.size(), watchMark = watchTrail_.size(), openMark = open_;
            values_[cell] = v;
            trail_.push_back(cell);
            pending_.push_back(cell);
            if (propagate())
                step(pos, v, canonical);
            undo(trailMark, watchMark);
            open_ = openMark;
        }
    }

    // Continues after cell order_[pos] holds v.
    void step(std::size_t pos, int v, bool canonical)
    {
        if (!canonical) {
            descend(pos + 1);
            return;
        }
        if (v > static_cast<int>(discovered_))
            return;
        bool fresh = v == static_cast<int>(discovered_);
        if (fresh)
            ++discovered_;
        descend(pos + 1);
        if (fresh)
            --discovered_;
    }

    // Completions of positions pos.. under the canonical-labeling rule with
    // every element discovered at the end; a DP over the discovered count.
    std::uint64_t count_free_completions(std::size_t pos) const
    {
        std::vector<std::uint64_t> ways(n_ + 1, 0), next(n_ + 1);
        ways[discovered_] = 1;
        for (std::size_t p = pos; p < order_.size(); ++p) {
            std::fill(next.begin(), next.end(), 0);
            int value = values_[order_[p]];
            for (std::size_t d = 0; d <= n_; ++d) {
                if (ways[d] == 0 || stageOf_[p] >= static_cast<int>(d))
                    continue;
                if (value >= 0) {
                    if (value < static_cast<int>(d))
                        next[d] += ways[d];
                    else if (value == static_cast<int>(d))
                        next[d + 1] += ways[d];
                    continue;
                }
                next[d] += ways[d] * d;
                if (d < n_)
                    next[d + 1] += ways[d];
            }
            ways.swap(next);
        }
        return ways[n_];
    }

    TableAlgebra current() const
    {
        TableAlgebra a;
        a.elements = numbered_elements(n_);
        for (std::size_t i = 0; i < ops_.size(); ++i) {
            std::size_t cells = power_saturating(n_, ops_[i].arity);
            auto& table = a.tables[ops_[i].name];
            for (std::size_t k = 0; k < cells; ++k)
                table.push_back(static_cast<std::uint32_t>(values_[offset_[i] + k]));
        }
        return a;
    }

    void leaf()
    {
        if (canonicalOnly()) {
            if (discovered_ != n_)
                return;
            ++result_->isoClasses;
            if (options_.keepModels)
                result_->models.push_back(current());
            return;
        }
        TableAlgebra a = current();
        std::size_t fixed = options_.generators.value_or(0);
        if (options_.generators && !generated_by(a, theory_.signature(), fixed))
            return;
        TableAlgebra c = canonical_form(a, theory_.signature(), fixed);
        std::vector<std::uint32_t> key;
        for (const auto& op : theory_.signature().ops())
            key.insert(key.end(), c.tables.at(op.name).begin(), c.tables.at(op.name).end());
        if (seen_.insert(std::move(key)).second && options_.keepModels)
            result_->models.push_back(std::move(c));
    }

    const Theory& theory_;
    std::size_t n_;
    ModelSearchOptions options_;
    std::vector<OpSymbol> ops_;
    std::vector<std::size_t> offset_;
    std::vector<int> values_;
    std::vector<std::uint32_t> order_;
    std::vector<int> stageOf_;
    std::vector<std::pair<CTerm, CTerm>> equations_;
    std::vector<Instance> instances_;
    std::vector<std::uint8_t> pool_;
    std::vector<std::vector<std::uint32_t>> watch_;
    std::vector<std::uint32_t> watchTrail_;
    std::vector<std::uint32_t> trail_;
    std::vector<std::uint32_t> pending_;
    std::size_t discovered_ = 0;
    std::size_t open_ = 0;  // instances neither satisfied nor forced yet
    std::set<std::vector<std::uint32_t>> seen_;
    ModelSearchResult* result_ = nullptr;
};

}  // namespace

ModelSearchResult find_models(const Theory& t, std::size_t size, const ModelSearchOptions& options)
{
    if (size > 255)
        throw Error("carrier too large for model search");
    Search s(t, size, options);
    return s.run();
}

TableAlgebra canonical_form(const TableAlgebra& a, const Signature& sig, std::size_t fixed)
{
    std::size_t n = a.size();
    std::vector<std::uint32_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::optional<std::vector<std::uint32_t>> best;
    std::vector<std::uint32_t> bestPerm;
    do {
        std::vector<std::uint32_t> key;
        for (const auto& op : sig.ops()) {
            const auto& table = a.tables.at(op.name);
            std::vector<std::uint32_t> relabeled(table.size());
            std::vector<std::size_t> args(op.arity);
            for (std::size_t idx = 0; idx < table.size(); ++idx) {
                std::size_t rest = idx, target = 0;
                for (std::size_t k = op.arity; k > 0; --k) {
                    args[k - 1] = rest % n;
                    rest /= n;
                }
                for (auto x : args)
                    target = target * n + perm[x];
                relabeled[target] = perm[table[idx]];
            }
            key.insert(key.end(), relabeled.begin(), relabeled.end());
        }
        if (!best || key < *best) {
            best = std::move(key);
            bestPerm = perm;
        }
    } while (n > fixed && std::next_permutation(perm.begin() + static_cast<std::ptrdiff_t>(fixed), perm.end()));

    TableAlgebra out;
    out.elements = a.elements;
    std::size_t pos = 0;
    for (const auto& op : sig.ops()) {
        std::size_t cells = a.tables.at(op.name).size();
        out.tables[op.name].assign(best->begin() + static_cast<std::ptrdiff_t>(pos),
                                   best->begin() + static_cast<std::ptrdiff_t>(pos + cells));
        pos += cells;
    }
    return out;
}

bool generated_by(const TableAlgebra& a, const Signature& sig, std::size_t k)
{
    std::size_t n = a.size();
    std::vector<bool> reached(n, false);
    for (std::size_t i = 0; i < k && i < n; ++i)
        reached[i] = true;
    bool changed = true;
    while (changed) {
        changed = false;
        std::vector<std::size_t> current;
        for (std::size_t i = 0; i < n; ++i)
            if (reached[i])
                current.push_back(i);
        for (const auto& op : sig.ops()) {
            const auto& table = a.tables.at(op.name);
            for_each_tuple(op.arity, current.size(), [&](std::span<const std::size_t> pick) {
                std::size_t index = 0;
                for (auto p : pick)
                    index = index * n + current[p];
                if (!reached[table[index]]) {
                    reached[table[index]] = true;
                    changed = true;
                }
                return true;
            });
        }
    }
    return std::all_of(reached.begin(), reached.end(), [](bool b) { return b; });
}

}  // namespace forge
