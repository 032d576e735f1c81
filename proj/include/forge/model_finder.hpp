#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "forge/table_algebra.hpp"
#include "forge/theory.hpp"

namespace forge {

struct ModelSearchOptions {
    // When set, elements 0..k-1 are labeled generators and only algebras
    // generated by them are accepted; isomorphisms must fix them. Otherwise
    // every model counts and isomorphism is over all permutations.
    std::optional<std::size_t> generators;
    // Canonical generation (each isomorphism class built once). Only used
    // with generators; without, models are deduplicated by canonical form.
    bool symmetryBreaking = true;
    std::uint64_t nodeBudget = 200'000'000;
    bool keepModels = true;
};

struct ModelSearchResult {
    std::size_t carrier = 0;
    std::uint64_t isoClasses = 0;
    std::uint64_t nodes = 0;
    bool partial = false;  // node budget exhausted
    std::vector<TableAlgebra> models;
};

// All models of t on {0..size-1} up to isomorphism. Tables are filled cell by
// cell, operations in name order and argument tuples in lexicographic order
// grouped by their largest argument; each equation instance is re-checked when
// a cell it is waiting on gets a value, and an instance with one side known
// and the other missing only its top cell forces that cell.
ModelSearchResult find_models(const Theory& t, std::size_t size, const ModelSearchOptions& options = {});

// Least relabeling of `a` (comparing tables in signature order) over all
// permutations that fix elements 0..fixed-1.
TableAlgebra canonical_form(const TableAlgebra& a, const Signature& sig, std::size_t fixed);

// Is every element reachable from elements 0..k-1 and the constants?
bool generated_by(const TableAlgebra& a, const Signature& sig, std::size_t k);

}  // namespace forge
