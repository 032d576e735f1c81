#include "forge/table_algebra.hpp"

#include "forge/error.hpp"

namespace forge {

std::uint32_t TableAlgebra::apply(const std::string& op, std::span<const std::uint32_t> args) const
{
    auto it = tables.find(op);
    if (it == tables.end())
        throw Error("algebra has no table for operation " + op);
    std::size_t index = 0;
    for (auto a : args)
        index = index * elements.size() + a;
    return it->second[index];
}

std::size_t TableAlgebra::index_of(const Value& v) const
{
    for (std::size_t i = 0; i < elements.size(); ++i)
        if (elements[i] == v)
            return i;
    throw Error("value " + v.str() + " is not an element of the algebra");
}

std::vector<Value> numbered_elements(std::size_t n)
{
    std::vector<Value> out;
    for (std::size_t i = 0; i < n; ++i)
        out.push_back(Value::atom(std::to_string(i)));
    return out;
}

TableAlgebra blank_algebra(const Signature& sig, std::size_t size, std::size_t maxEntries)
{
    TableAlgebra a;
    a.elements = numbered_elements(size);
    for (const auto& op : sig.ops()) {
        std::uint64_t entries = power_saturating(size, op.arity);
        if (entries > maxEntries)
            throw BudgetExceeded("table for " + op.name + " on " + std::to_string(size) + " elements is too large");
        a.tables[op.name].assign(entries, 0);
    }
    return a;
}

std::uint32_t eval_term(const TableAlgebra& a, const Term& t, const std::map<std::string, std::uint32_t>& env)
{
    if (t.is_var()) {
        auto it = env.find(t.name());
        if (it == env.end())
            throw Error("unassigned variable " + t.name());
        return it->second;
    }
    auto table = a.tables.find(t.name());
    if (table == a.tables.end())
        throw Error("algebra has no table for operation " + t.name());
    std::size_t index = 0;
    for (const auto& arg : t.args())
        index = index * a.size() + eval_term(a, arg, env);
    return table->second[index];
}

namespace {

nlohmann::json assignment_json(const TableAlgebra& a, const std::map<std::string, std::uint32_t>& env)
{
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [var, v] : env)
        j[var] = a.elements[v].str();
    return j;
}

}  // namespace

nlohmann::json EquationViolation::to_json(const TableAlgebra& a) const
{
    return {{"equation", equation.str()},
            {"assignment", assignment_json(a, assignment)},
            {"lhs", a.elements[lhs].str()},
            {"rhs", a.elements[rhs].str()}};
}

nlohmann::json AlgebraCheck::to_json(const TableAlgebra& a) const
{
    nlohmann::json j = {{"status", ok ? "pass" : "fail"}, {"instances", instances}};
    if (violation)
        j["violation"] = violation->to_json(a);
    return j;
}

bool holds(const TableAlgebra& a, const Equation& eq, std::uint64_t& instances,
           std::optional<EquationViolation>* violation)
{
    std::map<std::string, std::uint32_t> env;
    for (const auto& v : eq.context)
        env[v] = 0;
    if (a.size() == 0)
        return true;
    bool ok = true;
    for_each_tuple(eq.context.size(), a.size(), [&](std::span<const std::size_t> pick) {
        for (std::size_t i = 0; i < pick.size(); ++i)
            env[eq.context[i]] = static_cast<std::uint32_t>(pick[i]);
        ++instances;
        std::uint32_t l = eval_term(a, eq.lhs, env);
        std::uint32_t r = eval_term(a, eq.rhs, env);
        if (l != r) {
            ok = false;
            if (violation)
                *violation = EquationViolation{eq, env, l, r};
            return false;
        }
        return true;
    });
    return ok;
}

AlgebraCheck algebra_of_table(const Theory& t, const TableAlgebra& a)
{
    for (const auto& op : t.signature().ops()) {
        auto it = a.tables.find(op.name);
        if (it == a.tables.end())
            throw Error("missing table for operation " + op.name);
        if (it->second.size() != power_saturating(a.size(), op.arity))
            throw Error("table for " + op.name + " has " + std::to_string(it->second.size()) + " entries, expected " +
                        std::to_string(power_saturating(a.size(), op.arity)));
        for (auto v : it->second)
            if (v >= a.size())
                throw Error("table for " + op.name + " leaves the carrier");
    }
    AlgebraCheck out;
    for (const auto& eq : t.equations()) {
        if (!holds(a, eq, out.instances, &out.violation)) {
            out.ok = false;
            break;
        }
    }
    return out;
}

nlohmann::json algebra_to_json(const TableAlgebra& a, const Signature& sig,
                               const std::vector<std::uint32_t>& generators)
{
    nlohmann::json carrier = nlohmann::json::array();
    for (const auto& e : a.elements)
        carrier.push_back(e.str());
    nlohmann::json tables = nlohmann::json::object();
    for (const auto& op : sig.ops()) {
        const auto& table = a.tables.at(op.name);
        nlohmann::json entries = nlohmann::json::object();
        std::size_t index = 0;
        for_each_tuple(op.arity, a.size(), [&](std::span<const std::size_t> pick) {
            std::string key;
            for (std::size_t i = 0; i < pick.size(); ++i)
                key += (i ? "," : "") + a.elements[pick[i]].str();
            entries[key] = a.elements[table[index++]].str();
            return true;
        });
        tables[op.name] = entries;
    }
    nlohmann::json j = {{"carrier", carrier}, {"tables", tables}};
    nlohmann::json gens = nlohmann::json::array();
    for (auto g : generators)
        gens.push_back(a.elements[g].str());
    j["generators"] = gens;
    return j;
}

TableAlgebra algebra_from_json(const nlohmann::json& j, const Signature& sig, std::vector<std::uint32_t>* generators)
{
    TableAlgebra a;
    for (const auto& e : j.at("carrier"))
        a.elements.push_back(parse_value(e.get<std::string>()));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t k = 0; k < i; ++k)
            if (a.elements[i] == a.elements[k])
                throw Error("duplicate carrier element " + a.elements[i].str());
    const auto& tables = j.at("tables");
    for (const auto& op : sig.ops()) {
        if (!tables.contains(op.name))
            throw Error("missing table for operation " + op.name);
        const auto& entries = tables.at(op.name);
        std::vector<std::uint32_t> table(power_saturating(a.size(), op.arity), 0);
        std::vector<bool> seen(table.size(), false);
        for (const auto& [key, value] : entries.items()) {
            std::vector<std::uint32_t> args;
            std::size_t pos = 0;
            while (op.arity > 0 && pos <= key.size()) {
                auto comma = key.find(',', pos);
                std::string part = key.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
                args.push_back(static_cast<std::uint32_t>(a.index_of(parse_value(part))));
                if (comma == std::string::npos)
                    break;
                pos = comma + 1;
            }
            if (args.size() != op.arity)
                throw Error("table entry '" + key + "' of " + op.name + " has the wrong number of arguments");
            std::size_t index = 0;
            for (auto x : args)
                index = index * a.size() + x;
            table[index] = static_cast<std::uint32_t>(a.index_of(parse_value(value.get<std::string>())));
            seen[index] = true;
        }
        for (bool s : seen)
            if (!s)
                throw Error("table for " + op.name + " is not total");
        a.tables[op.name] = std::move(table);
    }
    if (generators && j.contains("generators"))
        for (const auto& g : j.at("generators"))
            generators->push_back(static_cast<std::uint32_t>(a.index_of(parse_value(g.get<std::string>()))));
    return a;
}

}  // namespace forge
