#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "forge/monad.hpp"
#include "forge/presentation.hpp"
#include "forge/theory.hpp"

namespace forge {

// A family of maps T X -> T' X, given per set.
struct MonadMorphism {
    std::string name;
    FiniteMonad source, target;
    std::function<Value(const FiniteSet& x, const Value& t)> component;
};

struct MorphismReport {
    std::string morphism;
    std::size_t maxSize = 0;
    std::uint64_t unitChecks = 0, extensionChecks = 0;
    bool preservesUnit = true, preservesExtension = true;
    // Every element of T' X is hit, for every test set X.
    bool surjective = true;
    std::optional<std::string> witness;

    bool passed() const { return preservesUnit && preservesExtension; }
    nlohmann::json to_json() const;
};

// alpha(eta a) = eta'(a) and alpha(f* m) = (alpha . f)*'(alpha m) for all
// sets of size <= maxSize, all f: X -> T Y and m in T X; surjectivity of every
// component on the materialized target carriers.
MorphismReport check_morphism(const MonadMorphism& alpha, std::size_t maxSize);

// Built-in morphisms:
//   list->multiset       forgets the order (caps 3)
//   identity:<monad>     the identity on any built-in monad
//   powerset:nonempty->collapse
MonadMorphism builtin_morphism(std::string_view name);

struct QuotientPresentation {
    Theory theory;
    std::size_t termsEnumerated = 0;
    std::size_t imageClasses = 0;
    std::size_t equationsAdded = 0;
    // Added equations not derivable in the source theory by bounded closure.
    std::size_t equationsUnproved = 0;

    nlohmann::json to_json() const;
};

// The source theory plus t = t' for every pair of terms of height <= depth
// over `generators` variables whose alpha-images coincide. `source` must
// present alpha.source. Throws Error when alpha is not surjective up to
// `generators` elements.
QuotientPresentation quotient_presentation(const MonadMorphism& alpha, const Presentation& source, std::size_t depth,
                                           std::size_t generators = 2);

}  // namespace forge
