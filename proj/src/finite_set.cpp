#include "forge/finite_set.hpp"

#include <algorithm>
#include <limits>

namespace forge {

FiniteSet::FiniteSet(std::vector<Value> elements) : elements_(std::move(elements))
{
    std::sort(elements_.begin(), elements_.end());
    elements_.erase(std::unique(elements_.begin(), elements_.end()), elements_.end());
}

bool FiniteSet::contains(const Value& v) const
{
    return std::binary_search(elements_.begin(), elements_.end(), v);
}

std::optional<std::size_t> FiniteSet::index_of(const Value& v) const
{
    if (elements_.size() <= 8) {
        for (std::size_t i = 0; i < elements_.size(); ++i)
            if (elements_[i] == v)
                return i;
        return std::nullopt;
    }
    auto it = std::lower_bound(elements_.begin(), elements_.end(), v);
    if (it == elements_.end() || !(*it == v))
        return std::nullopt;
    return static_cast<std::size_t>(it - elements_.begin());
}

std::string FiniteSet::str() const
{
    return Value::set(elements_).str();
}

FiniteSet atoms(std::size_t n, const std::string& prefix)
{
    std::vector<Value> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        out.push_back(Value::atom(prefix + std::to_string(i)));
    return FiniteSet(std::move(out));
}

FiniteSet product(const FiniteSet& x, const FiniteSet& y)
{
    std::vector<Value> out;
    out.reserve(x.size() * y.size());
    for (const auto& a : x)
        for (const auto& b : y)
            out.push_back(Value::pair(a, b));
    return FiniteSet(std::move(out));
}

FiniteSet tagged_union(const FiniteSet& x, const FiniteSet& e)
{
    std::vector<Value> out;
    for (const auto& a : x)
        out.push_back(Value::tag("inl", {a}));
    for (const auto& b : e)
        out.push_back(Value::tag("inr", {b}));
    return FiniteSet(std::move(out));
}

bool for_each_tuple(std::size_t length, std::size_t radix,
                    const std::function<bool(std::span<const std::size_t>)>& visit)
{
    std::vector<std::size_t> digits(length, 0);
    if (length > 0 && radix == 0)
        return true;
    while (true) {
        if (!visit(digits))
            return false;
        std::size_t i = length;
        while (i > 0) {
            --i;
            if (++digits[i] < radix)
                break;
            digits[i] = 0;
            if (i == 0)
                return true;
        }
        if (length == 0)
            return true;
    }
}

std::vector<Value> all_tables(const FiniteSet& dom, std::span<const Value> cod)
{
    std::vector<Value> out;
    for_each_tuple(dom.size(), cod.size(), [&](std::span<const std::size_t> choice) {
        std::vector<std::pair<Value, Value>> entries;
        entries.reserve(dom.size());
        for (std::size_t i = 0; i < dom.size(); ++i)
            entries.emplace_back(dom[i], cod[choice[i]]);
        out.push_back(Value::table(std::move(entries)));
        return true;
    });
    return out;
}

std::uint64_t power_saturating(std::uint64_t radix, std::uint64_t length)
{
    constexpr auto cap = std::numeric_limits<std::uint64_t>::max();
    std::uint64_t result = 1;
    for (std::uint64_t i = 0; i < length; ++i) {
        if (radix != 0 && result > cap / radix)
            return cap;
        result *= radix;
    }
    return result;
}

}  // namespace forge
