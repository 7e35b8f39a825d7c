#pragma once

#include <cstddef>
#include <cstdint>

namespace finrel {

// Resource limits shared by the exhaustive algorithms. All searches in this
// library are complete, so every limit aborts with a resource_error rather
// than returning a wrong answer.
struct Budget {
    // Largest carrier any operation will accept.
    std::size_t max_elements = 64;
    // Backtracking nodes per single map search.
    std::uint64_t max_nodes = 10'000'000;
    // Largest carrier for permutation-based canonical forms (n! work).
    std::size_t max_canonical = 8;
    // Labeled candidates per class enumeration pass.
    std::uint64_t max_enumeration = 1u << 20;
    // |A|^n tuples per tuple-order construction.
    std::uint64_t max_tuples = 1u << 16;
    // Arity cap for expand_by_types.
    int max_expand_arity = 2;
    // Up-set cap for tuple orders and expansions.
    std::size_t max_upsets = 4096;

    static const Budget& default_budget() {
        static const Budget b{};
        return b;
    }
};

} // namespace finrel
