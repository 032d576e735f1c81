#include "forge/value.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <mutex>
#include <new>
#include <unordered_map>

#include "forge/error.hpp"
#include "forge/scanner.hpp"

namespace forge {

namespace {

std::size_t mix(std::size_t seed, std::size_t h)
{
    return seed ^ (h + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

const Symbol& empty_symbol()
{
    static const Symbol s = symbol("");
    return s;
}

}  // namespace

Symbol symbol(std::string_view text)
{
    static std::mutex mutex;
    static std::unordered_map<std::string, std::size_t> table;
    std::lock_guard lock(mutex);
    auto it = table.find(std::string(text));
    if (it == table.end())
        it = table.emplace(std::string(text), std::hash<std::string_view>{}(text)).first;
    return {&it->first, it->second};
}

namespace detail {

namespace {

// Per-thread free lists for small node blocks, indexed by item count. Law
// checks build and drop millions of short-lived trees.
constexpr std::uint32_t kPooledItems = 4;
constexpr std::size_t kPoolCap = 1 << 14;

// Values held by static caches can outlive the thread's pool; after the pool
// is gone blocks go straight to the heap.
thread_local bool poolGone = false;

struct BlockPool {
    std::array<std::vector<void*>, kPooledItems + 1> free;
    ~BlockPool()
    {
        poolGone = true;
        for (auto& list : free)
            for (void* block : list)
                ::operator delete(block);
    }
};

BlockPool& pool()
{
    thread_local BlockPool p;
    return p;
}

void* allocate_block(std::uint32_t count)
{
    if (count <= kPooledItems && !poolGone) {
        auto& list = pool().free[count];
        if (!list.empty()) {
            void* block = list.back();
            list.pop_back();
            return block;
        }
    }
    return ::operator new(sizeof(ValueNode) + count * sizeof(Value));
}

void free_block(void* block, std::uint32_t count)
{
    if (count <= kPooledItems && !poolGone) {
        auto& list = pool().free[count];
        if (list.size() < kPoolCap) {
            list.push_back(block);
            return;
        }
    }
    ::operator delete(block);
}

}  // namespace

void destroy(const ValueNode* node)
{
    auto* items = reinterpret_cast<const Value*>(node + 1);
    std::uint32_t count = node->count;
    for (std::uint32_t i = 0; i < count; ++i)
        items[i].~Value();
    node->~ValueNode();
    free_block(const_cast<ValueNode*>(node), count);
}

}  // namespace detail

Value::Value() : node_(unit().node_)
{
    retain();
}

Value Value::make(ValueKind kind, const Symbol& label, std::span<Value> items)
{
    static_assert(sizeof(detail::ValueNode) % alignof(Value) == 0);
    std::size_t h = mix(label.hash, static_cast<std::size_t>(kind));
    for (const auto& item : items)
        h = mix(h, item.hash());
    void* block = detail::allocate_block(static_cast<std::uint32_t>(items.size()));
    auto* node = new (block) detail::ValueNode{{1}, kind, static_cast<std::uint32_t>(items.size()), label.text, label.hash, h};
    auto* slots = reinterpret_cast<Value*>(node + 1);
    for (std::size_t i = 0; i < items.size(); ++i)
        new (slots + i) Value(std::move(items[i]));
    return Value(node);
}

Value Value::atom(std::string_view name)
{
    return make(ValueKind::Atom, symbol(name), {});
}

Value Value::atom(const Symbol& name)
{
    return make(ValueKind::Atom, name, {});
}

Value Value::unit()
{
    static const Value u = make(ValueKind::Unit, empty_symbol(), {});
    return u;
}

Value Value::bottom()
{
    static const Value b = make(ValueKind::Bottom, empty_symbol(), {});
    return b;
}

Value Value::pair(Value first, Value second)
{
    std::array<Value, 2> items{std::move(first), std::move(second)};
    return make(ValueKind::Pair, empty_symbol(), items);
}

Value Value::seq(std::vector<Value> items)
{
    return make(ValueKind::Seq, empty_symbol(), items);
}

Value Value::set(std::vector<Value> items)
{
    std::sort(items.begin(), items.end());
    items.erase(std::unique(items.begin(), items.end()), items.end());
    return make(ValueKind::Set, empty_symbol(), items);
}

Value Value::bag(std::vector<Value> items)
{
    std::sort(items.begin(), items.end());
    return make(ValueKind::Bag, empty_symbol(), items);
}

Value Value::table(std::vector<std::pair<Value, Value>> entries)
{
    auto byKey = [](const auto& a, const auto& b) { return a.first < b.first; };
    if (!std::is_sorted(entries.begin(), entries.end(), byKey))
        std::sort(entries.begin(), entries.end(), byKey);
    for (std::size_t i = 1; i < entries.size(); ++i) {
        if (entries[i - 1].first == entries[i].first)
            throw Error("duplicate table key " + entries[i].first.str());
    }
    std::vector<Value> items;
    items.reserve(entries.size());
    for (auto& [k, v] : entries)
        items.push_back(pair(std::move(k), std::move(v)));
    return make(ValueKind::Table, empty_symbol(), items);
}

Value Value::tag(std::string_view label, std::vector<Value> items)
{
    return make(ValueKind::Tag, symbol(label), items);
}

Value Value::tag(const Symbol& label, std::vector<Value> items)
{
    return make(ValueKind::Tag, label, items);
}

Value Value::tag(const Symbol& label, std::span<Value> items)
{
    return make(ValueKind::Tag, label, items);
}

const Value* Value::lookup(const Value& key) const
{
    if (node_->kind != ValueKind::Table)
        return nullptr;
    auto items = this->items();
    auto it = std::lower_bound(items.begin(), items.end(), key,
                               [](const Value& entry, const Value& k) { return entry.first() < k; });
    if (it == items.end() || !(it->first() == key))
        return nullptr;
    return &it->second();
}

const Value& Value::at(const Value& key) const
{
    const Value* v = lookup(key);
    if (v == nullptr)
        throw Error("key " + key.str() + " not in table " + str());
    return *v;
}

bool operator==(const Value& a, const Value& b)
{
    if (a.node_ == b.node_)
        return true;
    if (a.node_->hash != b.node_->hash || a.node_->kind != b.node_->kind || a.node_->count != b.node_->count)
        return false;
    if (a.node_->label != b.node_->label)
        return false;
    auto x = a.items();
    auto y = b.items();
    return std::equal(x.begin(), x.end(), y.begin());
}

std::strong_ordering operator<=>(const Value& a, const Value& b)
{
    if (a.node_ == b.node_)
        return std::strong_ordering::equal;
    if (auto c = a.node_->kind <=> b.node_->kind; c != 0)
        return c;
    if (a.node_->label != b.node_->label) {
        if (auto c = a.node_->label->compare(*b.node_->label); c != 0)
            return c < 0 ? std::strong_ordering::less : std::strong_ordering::greater;
    }
    auto x = a.items();
    auto y = b.items();
    std::size_t n = std::min(x.size(), y.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (auto c = x[i] <=> y[i]; c != 0)
            return c;
    }
    return x.size() <=> y.size();
}

namespace {

void print(const Value& v, std::string& out)
{
    auto list = [&](std::string_view open, std::string_view close) {
        out += open;
        bool firstItem = true;
        for (const auto& item : v.items()) {
            if (!firstItem)
                out += ',';
            firstItem = false;
            print(item, out);
        }
        out += close;
    };
    switch (v.kind()) {
    case ValueKind::Atom: out += v.label(); break;
    case ValueKind::Unit: out += '*'; break;
    case ValueKind::Bottom: out += "bot"; break;
    case ValueKind::Pair: list("(", ")"); break;
    case ValueKind::Seq: list("<", ">"); break;
    case ValueKind::Set: list("{", "}"); break;
    case ValueKind::Bag: list("{|", "|}"); break;
    case ValueKind::Tag:
        out += v.label();
        list("(", ")");
        break;
    case ValueKind::Table: {
        out += '[';
        bool firstItem = true;
        for (const auto& entry : v.items()) {
            if (!firstItem)
                out += ',';
            firstItem = false;
            print(entry.first(), out);
            out += "->";
            print(entry.second(), out);
        }
        out += ']';
        break;
    }
    }
}

class ValueParser {
public:
    explicit ValueParser(std::string_view text) : in_(text) {}

    Value parse_all()
    {
        Value v = parse();
        if (!in_.at_end())
            in_.fail("trailing input after value");
        return v;
    }

private:
    std::vector<Value> items_until(std::string_view close)
    {
        std::vector<Value> out;
        if (in_.try_consume(close))
            return out;
        do {
            out.push_back(parse());
        } while (in_.try_consume(","));
        in_.expect(close);
        return out;
    }

    Value parse()
    {
        if (in_.try_consume("*"))
            return Value::unit();
        if (in_.try_consume("{|"))
            return Value::bag(items_until("|}"));
        if (in_.try_consume("{"))
            return Value::set(items_until("}"));
        if (in_.try_consume("<"))
            return Value::seq(items_until(">"));
        if (in_.try_consume("(")) {
            auto items = items_until(")");
            if (items.size() != 2)
                in_.fail("pair needs exactly two components");
            return Value::pair(items[0], items[1]);
        }
        if (in_.try_consume("[")) {
            std::vector<std::pair<Value, Value>> entries;
            if (!in_.try_consume("]")) {
                do {
                    Value k = parse();
                    in_.expect("->");
                    Value v = parse();
                    entries.emplace_back(std::move(k), std::move(v));
                } while (in_.try_consume(","));
                in_.expect("]");
            }
            return Value::table(std::move(entries));
        }
        if (in_.at_ident()) {
            std::string name = in_.ident();
            if (in_.peek_raw() == '(') {
                in_.expect("(");
                return Value::tag(std::move(name), items_until(")"));
            }
            if (name == "bot")
                return Value::bottom();
            return Value::atom(std::move(name));
        }
        in_.fail("expected value");
    }

    Scanner in_;
};

}  // namespace

std::string Value::str() const
{
    std::string out;
    print(*this, out);
    return out;
}

Value parse_value(std::string_view text)
{
    return ValueParser(text).parse_all();
}

}  // namespace forge
