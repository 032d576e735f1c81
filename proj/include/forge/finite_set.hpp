#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "forge/value.hpp"

namespace forge {

// An explicitly listed finite set. Elements are kept sorted and distinct so
// that iteration order, and therefore every report, is deterministic.
class FiniteSet {
public:
    FiniteSet() = default;
    explicit FiniteSet(std::vector<Value> elements);

    std::span<const Value> elements() const { return elements_; }
    std::size_t size() const { return elements_.size(); }
    bool empty() const { return elements_.empty(); }
    const Value& operator[](std::size_t i) const { return elements_[i]; }

    bool contains(const Value& v) const;
    // Position of v, or nullopt.
    std::optional<std::size_t> index_of(const Value& v) const;

    auto begin() const { return elements_.begin(); }
    auto end() const { return elements_.end(); }

    std::string str() const;

    friend bool operator==(const FiniteSet&, const FiniteSet&) = default;

private:
    std::vector<Value> elements_;
};

// Canonical test sets: {prefix0, ..., prefix(n-1)}.
FiniteSet atoms(std::size_t n, const std::string& prefix = "a");

// X x Y as pairs.
FiniteSet product(const FiniteSet& x, const FiniteSet& y);

// Disjoint union X + E using inl/inr tags.
FiniteSet tagged_union(const FiniteSet& x, const FiniteSet& e);

// All function tables dom -> cod, |cod|^|dom| of them.
std::vector<Value> all_tables(const FiniteSet& dom, std::span<const Value> cod);

// Calls visit(choice) for every vector in [0,radix)^length in lexicographic
// order; stops early when visit returns false. Returns false if stopped.
bool for_each_tuple(std::size_t length, std::size_t radix,
                    const std::function<bool(std::span<const std::size_t>)>& visit);

// radix^length, saturating at UINT64_MAX.
std::uint64_t power_saturating(std::uint64_t radix, std::uint64_t length);

}  // namespace forge
