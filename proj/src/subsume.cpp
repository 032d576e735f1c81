#include "forge/subsume.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <random>

#include "forge/error.hpp"
#include "forge/scanner.hpp"

namespace forge {

std::uint32_t Lasso::at(std::size_t i) const
{
    if (i < preamble.size())
        return preamble[i];
    return cycle[(i - preamble.size()) % cycle.size()];
}

std::uint32_t Universe::index(std::string_view name)
{
    auto it = std::find(names.begin(), names.end(), name);
    if (it != names.end())
        return static_cast<std::uint32_t>(it - names.begin());
    if (names.size() == 32)
        throw Error("universe exceeds 32 values");
    names.emplace_back(name);
    return static_cast<std::uint32_t>(names.size() - 1);
}

std::string Universe::value_str(std::uint32_t v) const
{
    return v < names.size() ? names[v] : "#" + std::to_string(v);
}

std::string Universe::set_str(std::uint32_t mask) const
{
    std::string out = "{";
    bool first = true;
    for (std::uint32_t v = 0; v < 32; ++v) {
        if ((mask >> v & 1U) == 0)
            continue;
        if (!first)
            out += ',';
        first = false;
        out += value_str(v);
    }
    return out + "}";
}

namespace {

std::uint32_t parse_item(Scanner& s, Universe& u, bool sets)
{
    if (!sets)
        return u.index(s.ident());
    s.expect("{");
    std::uint32_t mask = 0;
    if (!s.try_consume("}")) {
        do {
            mask |= 1U << u.index(s.ident());
        } while (s.try_consume(","));
        s.expect("}");
    }
    return mask;
}

std::vector<std::uint32_t> parse_list(Scanner& s, Universe& u, bool sets)
{
    std::vector<std::uint32_t> out;
    s.expect("[");
    if (s.try_consume("]"))
        return out;
    do {
        out.push_back(parse_item(s, u, sets));
    } while (s.try_consume(","));
    s.expect("]");
    return out;
}

Lasso parse_lasso(std::string_view text, Universe& u, bool sets)
{
    Scanner s(text);
    Lasso out;
    if (s.try_keyword("pre")) {
        s.expect(":");
        out.preamble = parse_list(s, u, sets);
        s.expect(";");
    }
    if (!s.try_keyword("cyc"))
        s.fail("expected 'cyc'");
    s.expect(":");
    out.cycle = parse_list(s, u, sets);
    if (!s.at_end())
        s.fail("unexpected text after lasso");
    if (out.cycle.empty())
        throw ParseError("cycle must be nonempty", s.line(), s.column());
    return out;
}

std::string lasso_str(const Lasso& l, const std::function<std::string(std::uint32_t)>& item)
{
    auto list = [&](const std::vector<std::uint32_t>& xs) {
        std::string out = "[";
        for (std::size_t i = 0; i < xs.size(); ++i)
            out += (i ? "," : "") + item(xs[i]);
        return out + "]";
    };
    return "pre:" + list(l.preamble) + ";cyc:" + list(l.cycle);
}

}  // namespace

Lasso parse_value_lasso(std::string_view text, Universe& u) { return parse_lasso(text, u, false); }
Lasso parse_set_lasso(std::string_view text, Universe& u) { return parse_lasso(text, u, true); }

std::string value_lasso_str(const Lasso& x, const Universe& u)
{
    return lasso_str(x, [&](std::uint32_t v) { return u.value_str(v); });
}

std::string set_lasso_str(const Lasso& a, const Universe& u)
{
    return lasso_str(a, [&](std::uint32_t m) { return u.set_str(m); });
}

Alignment align(const Lasso& a, const Lasso& b)
{
    if (a.cycle.empty() || b.cycle.empty())
        throw Error("lasso cycle must be nonempty");
    return {std::max(a.preamble.size(), b.preamble.size()), std::lcm(a.cycle.size(), b.cycle.size())};
}

bool subsumes(const Lasso& a, const Lasso& x)
{
    Alignment al = align(a, x);
    for (std::size_t i = al.start; i < al.start + al.period; ++i)
        if (a.at(i) >> x.at(i) & 1U)
            return true;
    return false;
}

std::size_t longest_chain(const Lasso& a, const Lasso& x, std::size_t length, std::size_t universeSize)
{
    if (universeSize > 20)
        throw Error("longest_chain: universe too large");
    // best[S]: longest chain so far whose set of x-values is S, or -1.
    std::vector<long> best(std::size_t{1} << universeSize, -1);
    best[0] = 0;
    long longest = 0;
    for (std::size_t j = 0; j < length; ++j) {
        std::uint32_t allowed = a.at(j);
        std::uint32_t v = x.at(j);
        // Read before writing: S | bit(v) may equal another S visited later.
        std::vector<std::pair<std::size_t, long>> updates;
        for (std::size_t s = 0; s < best.size(); ++s) {
            if (best[s] < 0 || (s & ~static_cast<std::size_t>(allowed)) != 0)
                continue;
            updates.emplace_back(s | std::size_t{1} << v, best[s] + 1);
        }
        for (auto [s, len] : updates) {
            best[s] = std::max(best[s], len);
            longest = std::max(longest, len);
        }
    }
    return static_cast<std::size_t>(longest);
}

bool subsumes_by_chains(const Lasso& a, const Lasso& x, std::size_t universeSize)
{
    Alignment al = align(a, x);
    std::size_t k = al.start + universeSize + 1;
    return longest_chain(a, x, al.start + k * al.period, universeSize) >= k;
}

Lasso lasso_union(const Lasso& a, const Lasso& b)
{
    Alignment al = align(a, b);
    Lasso out;
    for (std::size_t i = 0; i < al.start; ++i)
        out.preamble.push_back(a.at(i) | b.at(i));
    for (std::size_t i = al.start; i < al.start + al.period; ++i)
        out.cycle.push_back(a.at(i) | b.at(i));
    return out;
}

bool union_split_property(const Lasso& a, const Lasso& b, const Lasso& x)
{
    return subsumes(lasso_union(a, b), x) == (subsumes(a, x) || subsumes(b, x));
}

nlohmann::json RamseyReport::to_json() const
{
    return {{"samples", samples},     {"universe", universe},
            {"seed", seed},           {"holds", holds},
            {"unionSubsumes", unionSubsumes}, {"status", passed() ? "pass" : "fail"},
            {"failures", failures}};
}

namespace {

// Sets include each value with probability 1/4, so that subsumption is
// neither rare nor near certain.
Lasso random_lasso(std::mt19937_64& rng, std::size_t universeSize, bool sets)
{
    std::uniform_int_distribution<std::size_t> pre(0, 3), cyc(1, 4);
    std::uniform_int_distribution<std::uint32_t> value(0, static_cast<std::uint32_t>(universeSize) - 1);
    std::bernoulli_distribution member(0.25);
    auto item = [&] {
        if (!sets)
            return value(rng);
        std::uint32_t mask = 0;
        for (std::size_t v = 0; v < universeSize; ++v)
            if (member(rng))
                mask |= 1U << v;
        return mask;
    };
    Lasso out;
    out.preamble.resize(pre(rng));
    out.cycle.resize(cyc(rng));
    for (auto& v : out.preamble)
        v = item();
    for (auto& v : out.cycle)
        v = item();
    return out;
}

Universe numbered_universe(std::size_t n)
{
    Universe u;
    for (std::size_t i = 0; i < n; ++i)
        u.index("v" + std::to_string(i));
    return u;
}

}  // namespace

RamseyReport ramsey_run(std::size_t samples, std::size_t universeSize, std::uint64_t seed)
{
    if (universeSize == 0 || universeSize > 16)
        throw Error("ramsey: universe size must be in 1..16");
    RamseyReport out;
    out.samples = samples;
    out.universe = universeSize;
    out.seed = seed;
    std::mt19937_64 rng(seed);
    Universe u = numbered_universe(universeSize);
    for (std::size_t i = 0; i < samples; ++i) {
        Lasso a = random_lasso(rng, universeSize, true);
        Lasso b = random_lasso(rng, universeSize, true);
        Lasso x = random_lasso(rng, universeSize, false);
        bool whole = subsumes(lasso_union(a, b), x);
        out.unionSubsumes += whole ? 1 : 0;
        if (union_split_property(a, b, x)) {
            ++out.holds;
        } else if (out.failures.size() < 10) {
            out.failures.push_back({{"a", set_lasso_str(a, u)}, {"b", set_lasso_str(b, u)}, {"x", value_lasso_str(x, u)}});
        }
    }
    return out;
}

Universe catalog_universe()
{
    Universe u;
    for (const char* n : {"u", "v", "w", "z"})
        u.index(n);
    return u;
}

std::vector<SubsumeCase> subsume_catalog()
{
    Universe u = catalog_universe();
    std::vector<SubsumeCase> out;
    auto add = [&](std::string name, std::string_view a, std::string_view x) {
        out.push_back({std::move(name), parse_set_lasso(a, u), parse_value_lasso(x, u)});
    };
    add("constant-match", "cyc:[{v}]", "cyc:[v]");
    add("empty-sets", "cyc:[{}]", "cyc:[v]");
    add("empty-sets-alternating-x", "cyc:[{}]", "cyc:[u,v]");
    add("alternating-mismatch", "cyc:[{v},{u}]", "cyc:[u,v]");
    add("alternating-match", "cyc:[{u},{v}]", "cyc:[u,v]");
    add("shifted-by-preamble", "pre:[{v}];cyc:[{u},{v}]", "cyc:[u,v]");
    add("preamble-only-match", "pre:[{u}];cyc:[{}]", "pre:[u];cyc:[v]");
    add("preamble-then-never", "pre:[{u},{u},{u}];cyc:[{v}]", "pre:[u,u,u];cyc:[u]");
    add("full-sets", "cyc:[{u,v,w,z}]", "cyc:[w,z,u]");
    add("period-3-vs-2-hit", "cyc:[{u},{},{}]", "cyc:[u,v]");
    add("period-3-vs-2-miss", "cyc:[{w},{},{}]", "cyc:[u,v]");
    add("late-cycle-hit", "pre:[{},{},{}];cyc:[{},{z}]", "pre:[z];cyc:[z]");
    add("sparse-hit", "cyc:[{},{},{},{w}]", "cyc:[u,v,w]");
    add("sparse-miss", "cyc:[{},{},{},{w}]", "cyc:[u,v,w,u]");
    add("off-by-one", "cyc:[{v},{w},{u}]", "cyc:[u,v,w]");
    add("complement", "cyc:[{v,w,z},{u,w,z}]", "cyc:[u,v]");
    add("complement-shift", "pre:[{}];cyc:[{v,w,z},{u,w,z}]", "cyc:[v,u]");
    add("singleton-universe-hit", "pre:[{},{}];cyc:[{u}]", "cyc:[u]");
    add("x-preamble-differs", "cyc:[{w}]", "pre:[u,v];cyc:[w]");
    add("x-preamble-only-w", "cyc:[{w}]", "pre:[w,w];cyc:[u,v]");
    std::mt19937_64 rng(20240601);
    for (std::size_t i = out.size(); i < 50; ++i)
        out.push_back({"random-" + std::to_string(i), random_lasso(rng, 4, true), random_lasso(rng, 4, false)});
    return out;
}

}  // namespace forge
