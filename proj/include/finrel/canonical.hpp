#pragma once

#include <algorithm>
#include <numeric>
#include <string>

#include "finrel/homsearch.hpp"
#include "finrel/structures.hpp"

namespace finrel {

namespace detail {

inline std::vector<std::vector<Tuple>> relabel_contents(const Structure& A,
                                                        const std::vector<int>& perm) {
    // perm[old index] = new index
    std::vector<std::vector<Tuple>> contents(static_cast<std::size_t>(A.signature().size()));
    for (int r = 0; r < A.signature().size(); ++r) {
        auto& out = contents[static_cast<std::size_t>(r)];
        for (const Tuple& t : A.tuples(r)) {
            Tuple mapped;
            mapped.reserve(t.size());
            for (int v : t) mapped.push_back(perm[static_cast<std::size_t>(v)]);
            out.push_back(std::move(mapped));
        }
        std::sort(out.begin(), out.end());
    }
    return contents;
}

} // namespace detail

// Canonical relabeling: exhaustive search over carrier permutations for the
// lexicographically least relation encoding. Isomorphic inputs produce
// byte-identical output (elements renamed e0, e1, ...); idempotent.
inline Structure canonical_form(const Structure& A,
                                const Budget& budget = Budget::default_budget()) {
    const int n = A.size();
    if (static_cast<std::size_t>(n) > budget.max_canonical)
        throw resource_error("canonical form over " + std::to_string(n) +
                             " elements exceeds the budget of " + std::to_string(budget.max_canonical));
    std::vector<std::string> names;
    names.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) names.push_back("e" + std::to_string(i));
    if (n == 0) return Structure(A.signature(), {}, detail::relabel_contents(A, {}));

    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::vector<int> perm(static_cast<std::size_t>(n));
    bool have_best = false;
    std::vector<std::vector<Tuple>> best;
    do {
        // order[new index] = old index; invert for relabeling.
        for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] = i;
        auto contents = detail::relabel_contents(A, perm);
        if (!have_best || contents < best) {
            best = std::move(contents);
            have_best = true;
        }
    } while (std::next_permutation(order.begin(), order.end()));
    return Structure(A.signature(), std::move(names), std::move(best));
}

// Key identifying the isomorphism class of A; equal keys iff isomorphic
// (same signature assumed).
inline std::string canonical_code(const Structure& A,
                                  const Budget& budget = Budget::default_budget()) {
    return canonical_form(A, budget).encode();
}

inline bool isomorphic(const Structure& A, const Structure& B,
                       const Budget& budget = Budget::default_budget()) {
    if (A.signature() != B.signature() || A.size() != B.size()) return false;
    return search_map(A, B, SearchMode::Iso, budget).found();
}

} // namespace finrel
