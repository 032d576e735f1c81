#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "forge/monad.hpp"

namespace forge {

// A map between finite sets stored by position in its domain; converts to a
// Value table for reports.
class FiniteMap {
public:
    FiniteMap(const FiniteSet& dom, std::vector<Value> images);

    const Value& operator()(const Value& x) const;
    const FiniteSet& domain() const { return *dom_; }
    const std::vector<Value>& images() const { return images_; }
    Value table() const;

private:
    const FiniteSet* dom_;
    std::vector<Value> images_;
};

enum class MonadLaw { LeftUnit, RightUnit, Associativity };
const char* law_name(MonadLaw law);

struct LawWitness {
    MonadLaw law;
    std::size_t xSize = 0, ySize = 0, zSize = 0;
    std::optional<Value> f, g;  // tables
    Value m;                    // element of T X (or x in X for the left unit law)
    Value lhs, rhs;

    nlohmann::json to_json() const;
};

struct LawCheckOptions {
    std::size_t maxSize = 2;
    std::size_t minSize = 0;
    std::vector<MonadLaw> laws = {MonadLaw::LeftUnit, MonadLaw::RightUnit, MonadLaw::Associativity};
    // Per (X,Y,Z) size triple; larger cases are sampled and flagged.
    std::uint64_t instanceBudget = 200'000'000;
    std::uint64_t seed = 1;
};

struct LawReport {
    std::string monad;
    std::size_t maxSize = 0;
    std::uint64_t checked = 0;
    bool passed = true;
    bool sampled = false;
    bool boundedFragment = false;
    std::vector<std::pair<std::string, std::uint64_t>> perLaw;
    std::optional<LawWitness> witness;

    nlohmann::json to_json() const;
};

// Kleisli-form laws f* . eta = f, eta* = id, (g* . f)* = g* . f* over the
// canonical sets a0.. of every size in [minSize, maxSize], all maps f, g and
// all m in T X.
LawReport check_monad_laws(const FiniteMonad& m, const LawCheckOptions& options = {});

// Re-evaluates a witness; true when the two sides still differ.
bool replay_law_witness(const FiniteMonad& m, const LawWitness& w);

// Program commutation in T(A x B):
//   do x <- p; do y <- q; ret (x,y)   versus   do y <- q; do x <- p; ret (x,y)
struct CommutationResult {
    bool commutes;
    Value left, right;
};
CommutationResult commutes(const FiniteMonad& m, const FiniteSet& a, const FiniteSet& b, const Value& p,
                           const Value& q);

struct CommutativityReport {
    std::string monad;
    std::size_t maxSize = 0;
    std::uint64_t checked = 0;
    bool commutative = true;
    // Minimal witness: smallest |A|+|B|, then carrier order of p, q.
    std::optional<std::size_t> aSize, bSize;
    std::optional<Value> p, q, left, right;

    nlohmann::json to_json() const;
};

// Quantifies commutes over all p in T A, q in T B with 1 <= |A|,|B| <= maxSize.
CommutativityReport is_commutative(const FiniteMonad& m, std::size_t maxSize);

// Laws of the derived multiplication mu = id* and functor action
// T h = (eta . h)*:
//   mu . eta_T = id,  mu . T eta = id  on T X,
//   mu . T mu = mu . mu_T              on T T T X.
// Iterated carriers are only materialized from sets of at most maxInner
// elements; larger levels are skipped and counted.
struct MultiplicationReport {
    std::string monad;
    std::uint64_t checked = 0;
    std::uint64_t skippedSets = 0;
    bool passed = true;
    std::optional<std::string> witness;

    nlohmann::json to_json() const;
};
MultiplicationReport check_multiplication_laws(const FiniteMonad& m, std::size_t maxSize, std::size_t maxInner = 8);

}  // namespace forge
