#include "forge/monad_laws.hpp"

#include <functional>
#include <random>

#include "forge/error.hpp"
#include "forge/parallel.hpp"

namespace forge {

FiniteMap::FiniteMap(const FiniteSet& dom, std::vector<Value> images) : dom_(&dom), images_(std::move(images))
{
    if (images_.size() != dom.size())
        throw Error("map needs one image per domain element");
}

const Value& FiniteMap::operator()(const Value& x) const
{
    auto i = dom_->index_of(x);
    if (!i)
        throw Error("value " + x.str() + " outside map domain " + dom_->str());
    return images_[*i];
}

Value FiniteMap::table() const
{
    std::vector<std::pair<Value, Value>> entries;
    for (std::size_t i = 0; i < images_.size(); ++i)
        entries.emplace_back((*dom_)[i], images_[i]);
    return Value::table(std::move(entries));
}

const char* law_name(MonadLaw law)
{
    switch (law) {
    case MonadLaw::LeftUnit: return "left-unit";
    case MonadLaw::RightUnit: return "right-unit";
    case MonadLaw::Associativity: return "associativity";
    }
    return "?";
}

nlohmann::json LawWitness::to_json() const
{
    nlohmann::json j = {{"law", law_name(law)}, {"xSize", xSize}, {"ySize", ySize}, {"zSize", zSize},
                        {"m", m.str()},       {"lhs", lhs.str()}, {"rhs", rhs.str()}};
    if (f)
        j["f"] = f->str();
    if (g)
        j["g"] = g->str();
    return j;
}

nlohmann::json LawReport::to_json() const
{
    nlohmann::json laws = nlohmann::json::object();
    for (const auto& [name, count] : perLaw)
        laws[name] = count;
    nlohmann::json j = {{"monad", monad},   {"maxSize", maxSize},          {"checked", checked},
                        {"laws", laws},     {"status", passed ? "pass" : "fail"},
                        {"sampled", sampled}, {"boundedFragment", boundedFragment}};
    if (witness)
        j["witness"] = witness->to_json();
    return j;
}

namespace {

// The i-th map dom -> cod in odometer order (last domain element fastest).
std::vector<Value> nth_map(std::uint64_t index, std::size_t domSize, const FiniteSet& cod)
{
    std::vector<Value> images(domSize);
    for (std::size_t k = domSize; k > 0; --k) {
        images[k - 1] = cod[index % cod.size()];
        index /= cod.size();
    }
    return images;
}

struct Outcome {
    std::uint64_t checked = 0;
    std::optional<LawWitness> witness;
};

class LawChecker {
public:
    LawChecker(const FiniteMonad& m, const LawCheckOptions& options) : m_(m), options_(options), rng_(options.seed) {}

    LawReport run()
    {
        LawReport report;
        report.monad = m_.name();
        report.maxSize = options_.maxSize;
        report.boundedFragment = m_.bounded_fragment();
        for (auto law : options_.laws) {
            std::uint64_t before = report.checked;
            for (std::size_t xs = options_.minSize; xs <= options_.maxSize && !report.witness; ++xs) {
                FiniteSet x = atoms(xs, "a");
                if (law == MonadLaw::RightUnit) {
                    merge(report, right_unit(x, xs));
                    continue;
                }
                for (std::size_t ys = options_.minSize; ys <= options_.maxSize && !report.witness; ++ys) {
                    FiniteSet y = atoms(ys, "b");
                    if (law == MonadLaw::LeftUnit) {
                        merge(report, left_unit(x, y));
                        continue;
                    }
                    for (std::size_t zs = options_.minSize; zs <= options_.maxSize && !report.witness; ++zs)
                        merge(report, associativity(x, y, atoms(zs, "c")));
                }
            }
            report.perLaw.emplace_back(law_name(law), report.checked - before);
            if (report.witness)
                break;
        }
        report.passed = !report.witness.has_value();
        report.sampled = sampled_;
        return report;
    }

private:
    static void merge(LawReport& report, Outcome o)
    {
        report.checked += o.checked;
        if (o.witness && !report.witness)
            report.witness = std::move(o.witness);
    }

    // Picks the indices to visit out of `total`: all of them within budget,
    // otherwise a seeded sample.
    std::vector<std::uint64_t> plan(std::uint64_t total, std::uint64_t perItem)
    {
        std::uint64_t items = perItem == 0 ? total : std::max<std::uint64_t>(1, options_.instanceBudget / perItem);
        std::vector<std::uint64_t> out;
        if (total <= items) {
            out.resize(total);
            for (std::uint64_t i = 0; i < total; ++i)
                out[i] = i;
            return out;
        }
        sampled_ = true;
        std::uniform_int_distribution<std::uint64_t> pick(0, total - 1);
        for (std::uint64_t i = 0; i < items; ++i)
            out.push_back(pick(rng_));
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

    Outcome left_unit(const FiniteSet& x, const FiniteSet& y)
    {
        const FiniteSet& ty = m_.carrier(y);
        Outcome out;
        if (x.empty())
            return out;
        std::uint64_t maps = power_saturating(ty.size(), x.size());
        for (auto index : plan(maps, x.size())) {
            FiniteMap f(x, nth_map(index, x.size(), ty));
            const KleisliMap fk = std::cref(f);
            for (const auto& a : x) {
                ++out.checked;
                Value lhs = m_.extend(x, y, fk, m_.unit(x, a));
                if (!(lhs == f(a))) {
                    out.witness = LawWitness{MonadLaw::LeftUnit, x.size(), y.size(), 0, f.table(), std::nullopt,
                                             a, lhs, f(a)};
                    return out;
                }
            }
        }
        return out;
    }

    Outcome right_unit(const FiniteSet& x, std::size_t xs)
    {
        const FiniteSet& tx = m_.carrier(x);
        Outcome out;
        auto eta = [&](const Value& a) { return m_.unit(x, a); };
        for (const auto& mv : tx) {
            ++out.checked;
            Value lhs = m_.extend(x, x, eta, mv);
            if (!(lhs == mv)) {
                out.witness = LawWitness{MonadLaw::RightUnit, xs, xs, 0, std::nullopt, std::nullopt, mv, lhs, mv};
                return out;
            }
        }
        return out;
    }

    Outcome associativity(const FiniteSet& x, const FiniteSet& y, const FiniteSet& z)
    {
        const FiniteSet& tx = m_.carrier(x);
        const FiniteSet& ty = m_.carrier(y);
        const FiniteSet& tz = m_.carrier(z);
        if (tx.empty())
            return {};
        std::uint64_t fCount = power_saturating(ty.size(), x.size());
        std::uint64_t gCount = power_saturating(tz.size(), y.size());
        std::uint64_t perF = gCount == UINT64_MAX || tx.size() > UINT64_MAX / std::max<std::uint64_t>(gCount, 1)
                                 ? UINT64_MAX
                                 : gCount * tx.size();
        std::vector<std::uint64_t> fs = plan(fCount, perF == 0 ? 1 : perF);
        std::vector<std::uint64_t> gs;
        if (perF == UINT64_MAX || perF > options_.instanceBudget) {
            std::uint64_t gBudget = std::max<std::uint64_t>(1, options_.instanceBudget / (fs.size() * tx.size()));
            std::uniform_int_distribution<std::uint64_t> pick(0, gCount - 1);
            for (std::uint64_t i = 0; i < gBudget && gCount > 0; ++i)
                gs.push_back(pick(rng_));
            std::sort(gs.begin(), gs.end());
            gs.erase(std::unique(gs.begin(), gs.end()), gs.end());
            sampled_ = true;
        } else {
            gs.resize(gCount);
            for (std::uint64_t i = 0; i < gCount; ++i)
                gs[i] = i;
        }

        std::vector<Outcome> results(fs.size());
        parallel_for(fs.size(), [&](std::size_t fi) {
            FiniteMap f(x, nth_map(fs[fi], x.size(), ty));
            const KleisliMap fk = std::cref(f);
            std::vector<Value> fm;
            fm.reserve(tx.size());
            for (const auto& mv : tx)
                fm.push_back(m_.extend(x, y, fk, mv));
            Outcome& out = results[fi];
            for (auto gi : gs) {
                FiniteMap g(y, nth_map(gi, y.size(), tz));
                const KleisliMap gk = std::cref(g);
                std::vector<Value> hImages;
                hImages.reserve(x.size());
                for (const auto& a : x)
                    hImages.push_back(m_.extend(y, z, gk, f(a)));
                FiniteMap h(x, std::move(hImages));
                const KleisliMap hk = std::cref(h);
                for (std::size_t i = 0; i < tx.size(); ++i) {
                    ++out.checked;
                    Value lhs = m_.extend(x, z, hk, tx[i]);
                    Value rhs = m_.extend(y, z, gk, fm[i]);
                    if (!(lhs == rhs)) {
                        out.witness = LawWitness{MonadLaw::Associativity, x.size(), y.size(), z.size(),
                                                 f.table(), g.table(), tx[i], lhs, rhs};
                        return;
                    }
                }
            }
        });
        Outcome total;
        for (auto& r : results) {
            total.checked += r.checked;
            if (r.witness && !total.witness)
                total.witness = std::move(r.witness);
        }
        return total;
    }

    const FiniteMonad& m_;
    const LawCheckOptions& options_;
    std::mt19937_64 rng_;
    bool sampled_ = false;
};

FiniteMap map_from_table(const FiniteSet& dom, const Value& table)
{
    std::vector<Value> images;
    for (const auto& a : dom)
        images.push_back(table.at(a));
    return FiniteMap(dom, std::move(images));
}

}  // namespace

LawReport check_monad_laws(const FiniteMonad& m, const LawCheckOptions& options)
{
    if (options.maxSize < options.minSize)
        throw Error("maxSize must be at least minSize");
    return LawChecker(m, options).run();
}

bool replay_law_witness(const FiniteMonad& m, const LawWitness& w)
{
    FiniteSet x = atoms(w.xSize, "a");
    FiniteSet y = atoms(w.ySize, "b");
    FiniteSet z = atoms(w.zSize, "c");
    switch (w.law) {
    case MonadLaw::LeftUnit: {
        FiniteMap f = map_from_table(x, *w.f);
        return !(m.extend(x, y, f, m.unit(x, w.m)) == f(w.m));
    }
    case MonadLaw::RightUnit:
        return !(m.extend(x, x, [&](const Value& a) { return m.unit(x, a); }, w.m) == w.m);
    case MonadLaw::Associativity: {
        FiniteMap f = map_from_table(x, *w.f);
        FiniteMap g = map_from_table(y, *w.g);
        auto h = [&](const Value& a) { return m.extend(y, z, g, f(a)); };
        return !(m.extend(x, z, h, w.m) == m.extend(y, z, g, m.extend(x, y, f, w.m)));
    }
    }
    return false;
}

CommutationResult commutes(const FiniteMonad& m, const FiniteSet& a, const FiniteSet& b, const Value& p,
                           const Value& q)
{
    FiniteSet ab = product(a, b);
    Value left = m.extend(a, ab,
                          [&](const Value& x) {
                              return m.extend(b, ab, [&](const Value& y) { return m.unit(ab, Value::pair(x, y)); }, q);
                          },
                          p);
    Value right = m.extend(b, ab,
                           [&](const Value& y) {
                               return m.extend(a, ab, [&](const Value& x) { return m.unit(ab, Value::pair(x, y)); }, p);
                           },
                           q);
    bool same = left == right;
    return {same, std::move(left), std::move(right)};
}

nlohmann::json CommutativityReport::to_json() const
{
    nlohmann::json j = {{"monad", monad}, {"maxSize", maxSize}, {"checked", checked}, {"commutative", commutative},
                        {"status", commutative ? "pass" : "fail"}};
    if (!commutative) {
        j["witness"] = {{"aSize", *aSize}, {"bSize", *bSize}, {"p", p->str()},
                        {"q", q->str()},   {"left", left->str()}, {"right", right->str()}};
    }
    return j;
}

CommutativityReport is_commutative(const FiniteMonad& m, std::size_t maxSize)
{
    CommutativityReport report;
    report.monad = m.name();
    report.maxSize = maxSize;
    // Visit size pairs by increasing |A|+|B| so the first failure is minimal.
    for (std::size_t total = 2; total <= 2 * maxSize; ++total) {
        for (std::size_t as = 1; as <= maxSize; ++as) {
            if (total < as + 1 || total - as > maxSize)
                continue;
            std::size_t bs = total - as;
            FiniteSet a = atoms(as, "a");
            FiniteSet b = atoms(bs, "b");
            for (const auto& p : m.carrier(a)) {
                for (const auto& q : m.carrier(b)) {
                    ++report.checked;
                    auto r = commutes(m, a, b, p, q);
                    if (!r.commutes) {
                        report.commutative = false;
                        report.aSize = as;
                        report.bSize = bs;
                        report.p = p;
                        report.q = q;
                        report.left = r.left;
                        report.right = r.right;
                        return report;
                    }
                }
            }
        }
    }
    return report;
}

}  // namespace forge

namespace forge {

nlohmann::json MultiplicationReport::to_json() const
{
    nlohmann::json j = {{"monad", monad}, {"checked", checked}, {"skippedSets", skippedSets},
                        {"status", passed ? "pass" : "fail"}};
    if (witness)
        j["witness"] = *witness;
    return j;
}

MultiplicationReport check_multiplication_laws(const FiniteMonad& m, std::size_t maxSize, std::size_t maxInner)
{
    MultiplicationReport r;
    r.monad = m.name();
    auto fail = [&](const std::string& what) {
        if (r.passed)
            r.witness = what;
        r.passed = false;
    };
    for (std::size_t n = 0; n <= maxSize && r.passed; ++n) {
        FiniteSet x = atoms(n, "a");
        const FiniteSet& tx = m.carrier(x);
        auto eta = [&](const Value& v) { return m.unit(x, v); };
        for (const auto& t : tx) {
            r.checked += 2;
            Value viaUnit = m.multiply(x, m.unit(tx, t));
            if (!(viaUnit == t))
                fail("mu . eta_T at " + t.str() + " gives " + viaUnit.str());
            Value viaMap = m.multiply(x, m.fmap(x, tx, eta, t));
            if (!(viaMap == t))
                fail("mu . T eta at " + t.str() + " gives " + viaMap.str());
        }
        if (tx.size() > maxInner) {
            ++r.skippedSets;
            continue;
        }
        const FiniteSet& ttx = m.carrier(tx);
        if (ttx.size() > maxInner) {
            ++r.skippedSets;
            continue;
        }
        const FiniteSet& tttx = m.carrier(ttx);
        auto muX = [&](const Value& v) { return m.multiply(x, v); };
        for (const auto& t : tttx) {
            ++r.checked;
            Value lhs = m.multiply(x, m.fmap(ttx, tx, muX, t));
            Value rhs = m.multiply(x, m.multiply(tx, t));
            if (!(lhs == rhs))
                fail("mu . T mu vs mu . mu_T at " + t.str() + ": " + lhs.str() + " vs " + rhs.str());
        }
    }
    return r;
}

}  // namespace forge
