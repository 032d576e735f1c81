#include "forge/monad.hpp"

#include <algorithm>
#include <array>
#include <cstddef>
#include <new>
#include <map>
#include <mutex>
#include <optional>

#include "forge/error.hpp"

namespace forge {

struct FiniteMonad::Impl {
    std::string name;
    CarrierFn carrier;
    UnitFn unit;
    ExtendFn extend;
    bool boundedFragment;
    mutable std::mutex mutex;
    mutable std::map<std::vector<Value>, std::shared_ptr<const FiniteSet>> cache;
};

FiniteMonad::FiniteMonad(std::string name, CarrierFn carrier, UnitFn unit, ExtendFn extend, bool boundedFragment)
    : impl_(std::make_shared<Impl>())
{
    impl_->name = std::move(name);
    impl_->carrier = std::move(carrier);
    impl_->unit = std::move(unit);
    impl_->extend = std::move(extend);
    impl_->boundedFragment = boundedFragment;
}

const std::string& FiniteMonad::name() const
{
    return impl_->name;
}

bool FiniteMonad::bounded_fragment() const
{
    return impl_->boundedFragment;
}

const FiniteSet& FiniteMonad::carrier(const FiniteSet& x) const
{
    std::vector<Value> key(x.begin(), x.end());
    {
        std::lock_guard lock(impl_->mutex);
        auto it = impl_->cache.find(key);
        if (it != impl_->cache.end())
            return *it->second;
    }
    auto computed = std::make_shared<const FiniteSet>(impl_->carrier(x));
    std::lock_guard lock(impl_->mutex);
    auto [it, inserted] = impl_->cache.emplace(std::move(key), std::move(computed));
    return *it->second;
}

Value FiniteMonad::unit(const FiniteSet& x, const Value& a) const
{
    return impl_->unit(x, a);
}

Value FiniteMonad::extend(const FiniteSet& dom, const FiniteSet& cod, const KleisliMap& f, const Value& m) const
{
    return impl_->extend(dom, cod, f, m);
}

Value FiniteMonad::fmap(const FiniteSet& dom, const FiniteSet& cod, const std::function<Value(const Value&)>& h,
                        const Value& m) const
{
    return extend(dom, cod, [&](const Value& x) { return unit(cod, h(x)); }, m);
}

Value FiniteMonad::multiply(const FiniteSet& x, const Value& mm) const
{
    return extend(carrier(x), x, [](const Value& m) { return m; }, mm);
}

namespace {

// --- carriers ---------------------------------------------------------------

std::vector<std::vector<Value>> sequences_up_to(const FiniteSet& x, std::size_t maxLength, bool injective)
{
    std::vector<std::vector<Value>> out;
    std::vector<Value> current;
    std::vector<bool> used(x.size(), false);
    std::function<void()> grow = [&] {
        out.push_back(current);
        if (current.size() == maxLength)
            return;
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (injective && used[i])
                continue;
            used[i] = true;
            current.push_back(x[i]);
            grow();
            current.pop_back();
            used[i] = false;
        }
    };
    grow();
    return out;
}

std::vector<std::vector<Value>> subsets(const FiniteSet& x)
{
    std::vector<std::vector<Value>> out;
    if (x.size() >= 20)
        throw Error("powerset of a " + std::to_string(x.size()) + "-element set is too large");
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << x.size()); ++mask) {
        std::vector<Value> s;
        for (std::size_t i = 0; i < x.size(); ++i)
            if (mask & (std::uint64_t{1} << i))
                s.push_back(x[i]);
        out.push_back(std::move(s));
    }
    return out;
}

// Sorted multisets of size <= cap.
std::vector<std::vector<Value>> bags_up_to(const FiniteSet& x, std::size_t cap)
{
    std::vector<std::vector<Value>> out;
    std::vector<Value> current;
    std::function<void(std::size_t)> grow = [&](std::size_t from) {
        out.push_back(current);
        if (current.size() == cap)
            return;
        for (std::size_t i = from; i < x.size(); ++i) {
            current.push_back(x[i]);
            grow(i);
            current.pop_back();
        }
    };
    grow(0);
    return out;
}

// --- individual monads -----------------------------------------------------

FiniteMonad identity_monad()
{
    return FiniteMonad(
        "identity", [](const FiniteSet& x) { return x; }, [](const FiniteSet&, const Value& a) { return a; },
        [](const FiniteSet&, const FiniteSet&, const KleisliMap& f, const Value& m) { return f(m); });
}

// The terminal monad: every T X is a point.
FiniteMonad trivial_monad()
{
    return FiniteMonad(
        "trivial", [](const FiniteSet&) { return FiniteSet({Value::unit()}); },
        [](const FiniteSet&, const Value&) { return Value::unit(); },
        [](const FiniteSet&, const FiniteSet&, const KleisliMap&, const Value&) { return Value::unit(); });
}

// X |-> 1 for nonempty X, the empty set for X empty: the image of any monad
// whose T X is nonempty exactly when X is.
FiniteMonad collapse_monad()
{
    return FiniteMonad(
        "collapse", [](const FiniteSet& x) { return x.empty() ? FiniteSet() : FiniteSet({Value::unit()}); },
        [](const FiniteSet&, const Value&) { return Value::unit(); },
        [](const FiniteSet&, const FiniteSet&, const KleisliMap&, const Value&) { return Value::unit(); });
}

FiniteMonad state_monad(std::size_t n)
{
    if (n == 0)
        throw Error("state monad needs S >= 1");
    FiniteSet states = atoms(n, "s");
    auto carrier = [states](const FiniteSet& x) {
        auto cells = product(states, x);
        std::vector<Value> out;
        for (auto& t : all_tables(states, cells.elements()))
            out.push_back(std::move(t));
        return FiniteSet(std::move(out));
    };
    auto unit = [states](const FiniteSet&, const Value& a) {
        std::vector<std::pair<Value, Value>> entries;
        for (const auto& s : states)
            entries.emplace_back(s, Value::pair(s, a));
        return Value::table(std::move(entries));
    };
    auto extend = [states](const FiniteSet&, const FiniteSet&, const KleisliMap& f, const Value& m) {
        std::vector<std::pair<Value, Value>> entries;
        for (const auto& s : states) {
            const Value& step = m.at(s);
            entries.emplace_back(s, f(step.second()).at(step.first()));
        }
        return Value::table(std::move(entries));
    };
    return FiniteMonad("state:S=" + std::to_string(n), carrier, unit, extend);
}

FiniteMonad powerset_monad(bool nonempty)
{
    auto carrier = [nonempty](const FiniteSet& x) {
        std::vector<Value> out;
        for (auto& s : subsets(x))
            if (!nonempty || !s.empty())
                out.push_back(Value::set(std::move(s)));
        return FiniteSet(std::move(out));
    };
    auto unit = [](const FiniteSet&, const Value& a) { return Value::set({a}); };
    auto extend = [](const FiniteSet&, const FiniteSet&, const KleisliMap& f, const Value& m) {
        std::vector<Value> out;
        for (const auto& x : m.items()) {
            Value fx = f(x);
            out.insert(out.end(), fx.items().begin(), fx.items().end());
        }
        return Value::set(std::move(out));
    };
    return FiniteMonad(nonempty ? "powerset:nonempty" : "powerset:full", carrier, unit, extend);
}

FiniteMonad list_monad(std::size_t cap)
{
    auto carrier = [cap](const FiniteSet& x) {
        std::vector<Value> out;
        for (auto& s : sequences_up_to(x, cap, false))
            out.push_back(Value::seq(std::move(s)));
        return FiniteSet(std::move(out));
    };
    auto unit = [](const FiniteSet&, const Value& a) { return Value::seq({a}); };
    auto extend = [](const FiniteSet&, const FiniteSet&, const KleisliMap& f, const Value& m) {
        std::vector<Value> out;
        for (const auto& x : m.items()) {
            Value fx = f(x);
            out.insert(out.end(), fx.items().begin(), fx.items().end());
        }
        return Value::seq(std::move(out));
    };
    return FiniteMonad("list:cap=" + std::to_string(cap), carrier, unit, extend, true);
}

FiniteMonad multiset_monad(std::size_t cap)
{
    auto carrier = [cap](const FiniteSet& x) {
        std::vector<Value> out;
        for (auto& b : bags_up_to(x, cap))
            out.push_back(Value::bag(std::move(b)));
        return FiniteSet(std::move(out));
    };
    auto unit = [](const FiniteSet&, const Value& a) { return Value::bag({a}); };
    auto extend = [](const FiniteSet&, const FiniteSet&, const KleisliMap& f, const Value& m) {
        std::vector<Value> out;
        for (const auto& x : m.items()) {
            Value fx = f(x);
            out.insert(out.end(), fx.items().begin(), fx.items().end());
        }
        return Value::bag(std::move(out));
    };
    return FiniteMonad("multiset:cap=" + std::to_string(cap), carrier, unit, extend, true);
}

FiniteMonad continuation_monad(std::size_t n)
{
    if (n == 0)
        throw Error("continuation monad needs R >= 1");
    FiniteSet results = atoms(n, "r");
    // X -> R tables, memoized per X since extend needs them on every call.
    struct Cache {
        std::mutex mutex;
        std::map<std::vector<Value>, std::shared_ptr<const FiniteSet>> sets;
    };
    auto cache = std::make_shared<Cache>();
    auto continuations = [results, cache](const FiniteSet& x) -> const FiniteSet& {
        std::vector<Value> key(x.begin(), x.end());
        std::lock_guard lock(cache->mutex);
        auto& slot = cache->sets[std::move(key)];
        if (!slot)
            slot = std::make_shared<const FiniteSet>(all_tables(x, results.elements()));
        return *slot;
    };
    auto carrier = [results, continuations](const FiniteSet& x) {
        return FiniteSet(all_tables(continuations(x), results.elements()));
    };
    auto unit = [continuations](const FiniteSet& x, const Value& a) {
        std::vector<std::pair<Value, Value>> entries;
        for (const auto& k : continuations(x))
            entries.emplace_back(k, k.at(a));
        return Value::table(std::move(entries));
    };
    // f*(m)(k) = m(x |-> f(x)(k)).
    auto extend = [continuations](const FiniteSet& dom, const FiniteSet& cod, const KleisliMap& f, const Value& m) {
        std::vector<Value> fx;
        fx.reserve(dom.size());
        for (const auto& x : dom)
            fx.push_back(f(x));
        std::vector<std::pair<Value, Value>> entries;
        for (const auto& k : continuations(cod)) {
            std::vector<std::pair<Value, Value>> pulled;
            pulled.reserve(dom.size());
            for (std::size_t i = 0; i < dom.size(); ++i)
                pulled.emplace_back(dom[i], fx[i].at(k));
            entries.emplace_back(k, m.at(Value::table(std::move(pulled))));
        }
        return Value::table(std::move(entries));
    };
    return FiniteMonad("cont:R=" + std::to_string(n), carrier, unit, extend);
}

// Finite well-orders on nonempty subsets (duplicate-free sequences) plus bot.
FiniteMonad wellorder_monad()
{
    auto carrier = [](const FiniteSet& x) {
        std::vector<Value> out{Value::bottom()};
        for (auto& s : sequences_up_to(x, x.size(), true))
            if (!s.empty())
                out.push_back(Value::seq(std::move(s)));
        return FiniteSet(std::move(out));
    };
    auto unit = [](const FiniteSet&, const Value& a) { return Value::seq({a}); };
    auto extend = [](const FiniteSet&, const FiniteSet&, const KleisliMap& f, const Value& m) {
        if (m.is(ValueKind::Bottom))
            return Value::bottom();
        std::vector<Value> out;
        for (const auto& x : m.items()) {
            Value fx = f(x);
            if (fx.is(ValueKind::Bottom))
                return Value::bottom();
            out.insert(out.end(), fx.items().begin(), fx.items().end());
        }
        std::vector<Value> sorted = out;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            return Value::bottom();
        return Value::seq(std::move(out));
    };
    return FiniteMonad("wellorder", carrier, unit, extend);
}

// Substitutes f at the ret-leaves of a tree.
Value substitute_leaves(const Value& t, const KleisliMap& f, const std::string* ret)
{
    if (&t.label() == ret)
        return f(t.items()[0]);
    if (t.size() <= 4) {
        alignas(Value) std::byte buffer[4 * sizeof(Value)];
        auto* children = reinterpret_cast<Value*>(buffer);
        std::size_t built = 0;
        struct Cleanup {
            Value* items;
            std::size_t& n;
            ~Cleanup()
            {
                for (std::size_t i = 0; i < n; ++i)
                    items[i].~Value();
            }
        } cleanup{children, built};
        for (; built < t.size(); ++built)
            new (children + built) Value(substitute_leaves(t.items()[built], f, ret));
        return Value::tag(t.label_symbol(), std::span<Value>(children, t.size()));
    }
    std::vector<Value> children;
    children.reserve(t.size());
    for (const auto& c : t.items())
        children.push_back(substitute_leaves(c, f, ret));
    return Value::tag(t.label_symbol(), std::move(children));
}

// Free monad over a finite signature: leaves ret(x), nodes op(children).
// Carriers hold the trees of height <= depth.
FiniteMonad free_signature_monad(std::string name, std::vector<std::pair<std::string, std::size_t>> ops,
                                 std::size_t depth)
{
    const Symbol ret = symbol("ret");
    auto carrier = [ops, depth, ret](const FiniteSet& x) {
        std::vector<Value> level;
        for (const auto& a : x)
            level.push_back(Value::tag(ret, {a}));
        std::vector<Value> leaves = level;
        for (std::size_t h = 1; h <= depth; ++h) {
            std::vector<Value> next = leaves;
            for (const auto& [op, arity] : ops) {
                Symbol label = symbol(op);
                for_each_tuple(arity, level.size(), [&](std::span<const std::size_t> pick) {
                    std::vector<Value> children;
                    for (auto i : pick)
                        children.push_back(level[i]);
                    next.push_back(Value::tag(label, std::move(children)));
                    return true;
                });
            }
            level = std::move(next);
        }
        return FiniteSet(std::move(level));
    };
    auto unit = [ret](const FiniteSet&, const Value& a) { return Value::tag(ret, {a}); };
    auto extend = [ret](const FiniteSet&, const FiniteSet&, const KleisliMap& f, const Value& m) {
        return substitute_leaves(m, f, ret.text);
    };
    return FiniteMonad(std::move(name), carrier, unit, extend, true);
}

struct ParsedName {
    std::string base;
    std::map<std::string, std::size_t> params;
};

ParsedName parse_monad_name(std::string_view text)
{
    ParsedName out;
    std::size_t pos = 0;
    bool first = true;
    while (pos <= text.size()) {
        std::size_t next = text.find(':', pos);
        std::string_view part = text.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos);
        if (first) {
            out.base = std::string(part);
            first = false;
        } else {
            auto eq = part.find('=');
            if (eq == std::string_view::npos) {
                // A bare word such as powerset:full.
                out.base += ":" + std::string(part);
            } else {
                std::string key(part.substr(0, eq));
                std::string value(part.substr(eq + 1));
                if (value.empty() || !std::all_of(value.begin(), value.end(), ::isdigit))
                    throw Error("parameter " + key + " of monad '" + std::string(text) + "' must be a natural number");
                out.params[key] = std::stoul(value);
            }
        }
        if (next == std::string_view::npos)
            break;
        pos = next + 1;
    }
    return out;
}

std::size_t take(ParsedName& p, const std::string& key, std::size_t fallback)
{
    auto it = p.params.find(key);
    if (it == p.params.end())
        return fallback;
    std::size_t v = it->second;
    p.params.erase(it);
    return v;
}

FiniteMonad base_monad(std::string_view text)
{
    ParsedName p = parse_monad_name(text);
    std::optional<FiniteMonad> m;
    if (p.base == "identity") {
        m = identity_monad();
    } else if (p.base == "trivial") {
        m = trivial_monad();
    } else if (p.base == "collapse") {
        m = collapse_monad();
    } else if (p.base == "state") {
        m = state_monad(take(p, "S", 2));
    } else if (p.base == "powerset:full" || p.base == "powerset") {
        m = powerset_monad(false);
    } else if (p.base == "powerset:nonempty") {
        m = powerset_monad(true);
    } else if (p.base == "list") {
        m = list_monad(take(p, "cap", 3));
    } else if (p.base == "multiset") {
        m = multiset_monad(take(p, "cap", 3));
    } else if (p.base == "cont") {
        m = continuation_monad(take(p, "R", 2));
    } else if (p.base == "wellorder") {
        m = wellorder_monad();
    } else if (p.base == "free") {
        std::size_t arity = take(p, "I", 2);
        std::size_t depth = take(p, "depth", 2);
        m = free_signature_monad("free:I=" + std::to_string(arity) + ":depth=" + std::to_string(depth),
                                 {{"read", arity}}, depth);
    } else if (p.base == "sigma22") {
        std::size_t depth = take(p, "depth", 1);
        m = free_signature_monad("sigma22:depth=" + std::to_string(depth), {{"u0", 2}, {"u1", 2}}, depth);
    } else if (p.base == "output") {
        std::size_t outputs = take(p, "O", 2);
        std::size_t depth = take(p, "depth", 2);
        std::vector<std::pair<std::string, std::size_t>> ops;
        for (std::size_t o = 0; o < outputs; ++o)
            ops.emplace_back("o" + std::to_string(o), 1);
        m = free_signature_monad("output:O=" + std::to_string(outputs) + ":depth=" + std::to_string(depth),
                                 std::move(ops), depth);
    } else {
        throw Error("unknown monad '" + std::string(text) + "'");
    }
    if (!p.params.empty())
        throw Error("unexpected parameter " + p.params.begin()->first + " for monad '" + std::string(text) + "'");
    return *m;
}

}  // namespace

FiniteMonad exception_extend(const FiniteMonad& m, const FiniteSet& e)
{
    auto carrier = [m, e](const FiniteSet& x) { return m.carrier(tagged_union(x, e)); };
    auto unit = [m, e](const FiniteSet& x, const Value& a) { return m.unit(tagged_union(x, e), Value::tag("inl", {a})); };
    auto extend = [m, e](const FiniteSet& dom, const FiniteSet& cod, const KleisliMap& f, const Value& v) {
        FiniteSet domE = tagged_union(dom, e);
        FiniteSet codE = tagged_union(cod, e);
        return m.extend(domE, codE,
                        [&](const Value& tagged) {
                            if (tagged.label() == "inl")
                                return f(tagged.items()[0]);
                            return m.unit(codE, tagged);
                        },
                        v);
    };
    return FiniteMonad(m.name() + "+exc:E=" + std::to_string(e.size()), carrier, unit, extend, m.bounded_fragment());
}

FiniteMonad builtin_monad(std::string_view text)
{
    auto plus = text.find("+exc");
    if (plus == std::string_view::npos)
        return base_monad(text);
    FiniteMonad base = base_monad(text.substr(0, plus));
    std::string_view rest = text.substr(plus + 1);
    ParsedName p = parse_monad_name(rest);
    if (p.base != "exc")
        throw Error("unknown monad suffix '" + std::string(rest) + "'");
    std::size_t count = take(p, "E", 1);
    if (!p.params.empty())
        throw Error("unexpected parameter " + p.params.begin()->first + " in '" + std::string(rest) + "'");
    return exception_extend(base, atoms(count, "e"));
}

std::vector<std::string> builtin_monad_catalog()
{
    return {"identity",
            "trivial",
            "collapse",
            "state:S=2",
            "powerset:full",
            "powerset:nonempty",
            "list:cap=3",
            "multiset:cap=3",
            "cont:R=2",
            "wellorder",
            "free:I=2:depth=2",
            "sigma22:depth=1",
            "output:O=2",
            "identity+exc:E=1",
            "powerset:full+exc:E=1",
            "powerset:nonempty+exc:E=1",
            "wellorder+exc:E=1",
            "state:S=1+exc:E=1"};
}

}  // namespace forge
