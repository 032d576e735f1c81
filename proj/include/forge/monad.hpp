#pragma once

#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "forge/finite_set.hpp"
#include "forge/value.hpp"

namespace forge {

// A map X -> T Y given pointwise.
using KleisliMap = std::function<Value(const Value&)>;

// A monad on finite sets as a Kleisli triple. The object map is materialized
// on demand (and cached); extension receives the domain and codomain because
// some monads (continuations) need to enumerate them.
class FiniteMonad {
public:
    using CarrierFn = std::function<FiniteSet(const FiniteSet&)>;
    using UnitFn = std::function<Value(const FiniteSet&, const Value&)>;
    using ExtendFn = std::function<Value(const FiniteSet&, const FiniteSet&, const KleisliMap&, const Value&)>;

    FiniteMonad(std::string name, CarrierFn carrier, UnitFn unit, ExtendFn extend, bool boundedFragment = false);

    const std::string& name() const;
    // True when carrier() lists a bounded fragment of an infinite T X.
    bool bounded_fragment() const;

    const FiniteSet& carrier(const FiniteSet& x) const;
    Value unit(const FiniteSet& x, const Value& a) const;
    // f*(m) for f: dom -> T cod and m in T dom.
    Value extend(const FiniteSet& dom, const FiniteSet& cod, const KleisliMap& f, const Value& m) const;

    // T h = (unit . h)*.
    Value fmap(const FiniteSet& dom, const FiniteSet& cod, const std::function<Value(const Value&)>& h,
               const Value& m) const;
    // mu = id*, on T T X.
    Value multiply(const FiniteSet& x, const Value& mm) const;

private:
    struct Impl;
    std::shared_ptr<Impl> impl_;
};

// Names accepted by builtin_monad, with their parameters:
//   identity, trivial, collapse, state:S=n, powerset:full, powerset:nonempty, list:cap=n,
//   multiset:cap=n, cont:R=n, wellorder, free:I=n:depth=d, sigma22:depth=d,
//   output:O=n:depth=d
// Any of them may carry the suffix +exc:E=n (exception_extend with n
// exception values e0..).
FiniteMonad builtin_monad(std::string_view name);

// The catalog exercised by the law suites.
std::vector<std::string> builtin_monad_catalog();

// X |-> M(X + E): unit via inl, exceptions inr e propagate unchanged.
FiniteMonad exception_extend(const FiniteMonad& m, const FiniteSet& e);

}  // namespace forge
