#pragma once

#include <atomic>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace forge {

enum class ValueKind : std::uint8_t { Atom, Unit, Bottom, Pair, Seq, Set, Bag, Table, Tag };

// An interned label. Interning once and reusing the symbol avoids a lookup in
// the global table on every construction.
struct Symbol {
    const std::string* text;
    std::size_t hash;
};
Symbol symbol(std::string_view text);

class Value;

namespace detail {

// Header of a value node; `count` Value items follow it in the same block.
struct ValueNode {
    mutable std::atomic<std::uint32_t> refs;
    ValueKind kind;
    std::uint32_t count;
    const std::string* label;
    std::size_t labelHash;
    std::size_t hash;
};

void destroy(const ValueNode* node);

}  // namespace detail

// Immutable structured value used for every carrier element in the workbench:
// atoms, pairs, sequences (lists, well-orders), sets, multisets, finite
// function tables and tagged trees. Copies share structure.
class Value {
public:
    Value();  // the unit value `*`
    Value(const Value& other) noexcept : node_(other.node_) { retain(); }
    Value(Value&& other) noexcept : node_(other.node_) { other.node_ = nullptr; }
    ~Value() { release(); }
    Value& operator=(const Value& other) noexcept
    {
        other.retain();
        release();
        node_ = other.node_;
        return *this;
    }
    Value& operator=(Value&& other) noexcept
    {
        if (this != &other) {
            release();
            node_ = other.node_;
            other.node_ = nullptr;
        }
        return *this;
    }

    static Value atom(std::string_view name);
    static Value atom(const Symbol& name);
    static Value unit();
    static Value bottom();
    static Value pair(Value first, Value second);
    static Value seq(std::vector<Value> items);
    // Sorted and deduplicated.
    static Value set(std::vector<Value> items);
    // Sorted, duplicates kept.
    static Value bag(std::vector<Value> items);
    // Entries are sorted by key; keys must be distinct.
    static Value table(std::vector<std::pair<Value, Value>> entries);
    static Value tag(std::string_view label, std::vector<Value> items);
    static Value tag(const Symbol& label, std::vector<Value> items);
    // Moves the items out of the span.
    static Value tag(const Symbol& label, std::span<Value> items);

    ValueKind kind() const { return node_->kind; }
    const std::string& label() const { return *node_->label; }
    Symbol label_symbol() const { return {node_->label, node_->labelHash}; }
    std::span<const Value> items() const
    {
        return {reinterpret_cast<const Value*>(node_ + 1), node_->count};
    }
    std::size_t size() const { return node_->count; }

    const Value& first() const { return items()[0]; }
    const Value& second() const { return items()[1]; }

    // Table lookup by key; nullptr when absent or not a table.
    const Value* lookup(const Value& key) const;
    // Table lookup that throws on a missing key.
    const Value& at(const Value& key) const;

    bool is(ValueKind k) const { return kind() == k; }
    std::size_t hash() const { return node_->hash; }
    std::string str() const;

    friend bool operator==(const Value& a, const Value& b);
    friend std::strong_ordering operator<=>(const Value& a, const Value& b);

private:
    explicit Value(const detail::ValueNode* node) : node_(node) {}
    static Value make(ValueKind kind, const Symbol& label, std::span<Value> items);

    void retain() const noexcept
    {
        if (node_ != nullptr)
            node_->refs.fetch_add(1, std::memory_order_relaxed);
    }
    void release() noexcept
    {
        if (node_ != nullptr && node_->refs.fetch_sub(1, std::memory_order_acq_rel) == 1)
            detail::destroy(node_);
    }

    const detail::ValueNode* node_;
};

struct ValueHash {
    std::size_t operator()(const Value& v) const { return v.hash(); }
};

// Inverse of Value::str(). Throws ParseError.
Value parse_value(std::string_view text);

}  // namespace forge
