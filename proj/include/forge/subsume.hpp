#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace forge {

// An ultimately periodic sequence: the preamble, then the cycle forever.
// Values are indices into a universe of at most 32 names; set-valued
// sequences store subsets as bit masks.
struct Lasso {
    std::vector<std::uint32_t> preamble;
    std::vector<std::uint32_t> cycle;  // nonempty

    std::uint32_t at(std::size_t i) const;
    friend bool operator==(const Lasso&, const Lasso&) = default;
};

struct Universe {
    std::vector<std::string> names;

    std::uint32_t index(std::string_view name);  // adds unknown names
    std::string value_str(std::uint32_t v) const;
    std::string set_str(std::uint32_t mask) const;
};

// Text forms: "pre:[u,v];cyc:[v]" for values and "pre:[{v}];cyc:[{u},{v}]"
// for sets. Both sides of a comparison must share the universe.
Lasso parse_value_lasso(std::string_view text, Universe& u);
Lasso parse_set_lasso(std::string_view text, Universe& u);
std::string value_lasso_str(const Lasso& x, const Universe& u);
std::string set_lasso_str(const Lasso& a, const Universe& u);

// Both sequences are periodic from max(preambles) on with period lcm(cycles).
struct Alignment {
    std::size_t start = 0;
    std::size_t period = 1;
};
Alignment align(const Lasso& a, const Lasso& b);

// Is there an infinite M with x_i in a_j for all i < j in M? Decided as: some
// position i in one aligned period has x_i in a_i. (If M is infinite some
// value v = x_i recurs infinitely often on it, and then v is in a_j at every
// later such j; conversely the positions with x_i in a_i, all of one value,
// form such an M.)
bool subsumes(const Lasso& a, const Lasso& x);

// Longest i_1 < ... < i_k below `length` with x_{i_p} in a_{i_q} for p < q,
// by dynamic programming over the set of values already on the chain.
std::size_t longest_chain(const Lasso& a, const Lasso& x, std::size_t length, std::size_t universeSize);

// Independent decision from chains alone: with P the aligned start and U the
// universe size, a chain inside the first P + K periods (K = P + U + 1) has
// length >= K exactly when M exists, since outside the preamble a bounded
// chain repeats no value.
bool subsumes_by_chains(const Lasso& a, const Lasso& x, std::size_t universeSize);

// Pointwise union over the aligned shape.
Lasso lasso_union(const Lasso& a, const Lasso& b);

// subsumes(a u b, x) <=> subsumes(a, x) or subsumes(b, x).
bool union_split_property(const Lasso& a, const Lasso& b, const Lasso& x);

struct RamseyReport {
    std::size_t samples = 0;
    std::size_t universe = 0;
    std::uint64_t seed = 0;
    std::size_t holds = 0;
    std::size_t unionSubsumes = 0;  // instances where a u b subsumes x
    std::vector<nlohmann::json> failures;

    bool passed() const { return holds == samples; }
    nlohmann::json to_json() const;
};

// union_split_property on `samples` seeded random instances: preambles of
// length 0..3, cycles of length 1..4, uniformly random subsets and values.
RamseyReport ramsey_run(std::size_t samples, std::size_t universeSize, std::uint64_t seed);

struct SubsumeCase {
    std::string name;
    Lasso a, x;
};

// Fifty fixed instances over the universe {u, v, w, z}: hand-made cases
// (constant, empty, alternating, shifted, preamble-only matches) followed by
// seeded random ones.
std::vector<SubsumeCase> subsume_catalog();
Universe catalog_universe();

}  // namespace forge
