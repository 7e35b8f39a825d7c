#pragma once

#include <bit>
#include <cstdint>
#include <functional>
#include <optional>

#include "finrel/structures.hpp"

namespace finrel {

struct SearchResult {
    std::optional<PartialMap> map;
    std::uint64_t nodes = 0;

    bool found() const { return map.has_value(); }
};

namespace detail {

// Validity of a partial assignment viewed as a map-in-progress: fully
// assigned tuples preserved, injectivity for mono and above, and reflection
// over the assigned part for embedding/iso.
inline bool partial_map_valid(const Structure& A, const Structure& B, const std::vector<int>& asg,
                              SearchMode mode) {
    Tuple mapped;
    for (int r = 0; r < A.signature().size(); ++r) {
        for (const Tuple& t : A.tuples(r)) {
            mapped.clear();
            bool all = true;
            for (int v : t) {
                int w = asg[static_cast<std::size_t>(v)];
                if (w < 0) { all = false; break; }
                mapped.push_back(w);
            }
            if (all && !B.has_tuple(r, mapped)) return false;
        }
    }
    if (mode == SearchMode::Hom) return true;
    std::vector<int> pre(static_cast<std::size_t>(B.size()), -1);
    for (std::size_t v = 0; v < asg.size(); ++v) {
        if (asg[v] < 0) continue;
        if (pre[static_cast<std::size_t>(asg[v])] != -1) return false; // not injective
        pre[static_cast<std::size_t>(asg[v])] = static_cast<int>(v);
    }
    if (mode == SearchMode::Mono) return true;
    Tuple back;
    for (int r = 0; r < B.signature().size(); ++r) {
        for (const Tuple& t : B.tuples(r)) {
            back.clear();
            bool in_image = true;
            for (int w : t) {
                int p = pre[static_cast<std::size_t>(w)];
                if (p < 0) { in_image = false; break; }
                back.push_back(p);
            }
            if (in_image && !A.has_tuple(r, back)) return false;
        }
    }
    return true;
}

// Complete backtracking search for total maps A -> B. Branch variable is the
// most constrained unassigned element (fewest candidate images, ties broken
// by carrier order); propagation is forward checking on relation tuples with
// exactly one unassigned element. Embedding and iso leaves are re-verified in
// full, so pruning only ever discards maps that cannot satisfy the mode.
class MapSearch {
public:
    MapSearch(const Structure& A, const Structure& B, SearchMode mode, const Budget& budget)
        : A_(A), B_(B), mode_(mode), budget_(budget) {
        require_same_signature(A, B, "search_map");
        if (static_cast<std::size_t>(A.size()) > budget.max_elements ||
            static_cast<std::size_t>(B.size()) > budget.max_elements)
            throw resource_error("search instance exceeds the element budget of " +
                                 std::to_string(budget.max_elements));
        if (B.size() > 64) throw resource_error("search target exceeds 64 elements");
        full_ = B_.size() == 64 ? ~0ull : ((1ull << B_.size()) - 1);
        assignment_.assign(static_cast<std::size_t>(A_.size()), -1);
        candidates_.assign(static_cast<std::size_t>(A_.size()), full_);
        tuples_by_elem_.assign(static_cast<std::size_t>(A_.size()), {});
        for (int r = 0; r < A_.signature().size(); ++r) {
            const auto& ts = A_.tuples(r);
            for (std::size_t ti = 0; ti < ts.size(); ++ti)
                for (std::size_t p = 0; p < ts[ti].size(); ++p)
                    if (p == 0 || ts[ti][p] != ts[ti][p - 1])
                        tuples_by_elem_[static_cast<std::size_t>(ts[ti][p])].emplace_back(
                            r, static_cast<int>(ti));
        }
        injective_ = mode_ != SearchMode::Hom;
    }

    // Seed application; returns false when the pruned state is already empty
    // somewhere (the caller decides whether that is an error or "exhausted").
    bool apply_seed(const std::vector<int>& seed) {
        for (std::size_t v = 0; v < seed.size(); ++v) {
            if (seed[v] < 0) continue;
            if (!(candidates_[v] >> seed[v] & 1)) return false;
            if (!set(static_cast<int>(v), seed[v], assignment_, candidates_)) return false;
        }
        return true;
    }

    // Visits every completion in deterministic order; the callback returns
    // true to continue enumerating.
    std::uint64_t run(const std::function<bool(const std::vector<int>&)>& on_solution) {
        on_solution_ = &on_solution;
        stop_ = false;
        if (mode_ == SearchMode::Iso && A_.size() != B_.size()) return nodes_;
        recurse(assignment_, candidates_);
        return nodes_;
    }

private:
    bool set(int v, int w, std::vector<int>& asg, std::vector<std::uint64_t>& cand) const {
        asg[static_cast<std::size_t>(v)] = w;
        cand[static_cast<std::size_t>(v)] = 1ull << w;
        if (injective_) {
            for (std::size_t u = 0; u < asg.size(); ++u)
                if (asg[u] < 0) {
                    cand[u] &= ~(1ull << w);
                    if (cand[u] == 0) return false;
                }
        }
        return propagate(v, asg, cand);
    }

    bool propagate(int v, const std::vector<int>& asg, std::vector<std::uint64_t>& cand) const {
        Tuple pattern;
        for (const auto& [r, ti] : tuples_by_elem_[static_cast<std::size_t>(v)]) {
            const Tuple& t = A_.tuples(r)[static_cast<std::size_t>(ti)];
            int free_elem = -1;
            bool several_free = false;
            for (int u : t) {
                if (asg[static_cast<std::size_t>(u)] >= 0) continue;
                if (free_elem >= 0 && free_elem != u) { several_free = true; break; }
                free_elem = u;
            }
            if (several_free) continue;
            if (free_elem < 0) {
                pattern.clear();
                for (int u : t) pattern.push_back(asg[static_cast<std::size_t>(u)]);
                if (!B_.has_tuple(r, pattern)) return false;
                continue;
            }
            std::uint64_t allowed = 0;
            for (const Tuple& bt : B_.tuples(r)) {
                int image = -1;
                bool match = true;
                for (std::size_t p = 0; p < t.size(); ++p) {
                    int u = t[p];
                    int w = asg[static_cast<std::size_t>(u)];
                    if (w >= 0) {
                        if (bt[p] != w) { match = false; break; }
                    } else {
                        if (image >= 0 && bt[p] != image) { match = false; break; }
                        image = bt[p];
                    }
                }
                if (match && image >= 0) allowed |= 1ull << image;
            }
            auto& c = cand[static_cast<std::size_t>(free_elem)];
            c &= allowed;
            if (c == 0) return false;
        }
        return true;
    }

    bool leaf_ok(const std::vector<int>& asg) const {
        // Hom and mono are fully enforced during search.
        if (mode_ == SearchMode::Embedding || mode_ == SearchMode::Iso)
            return reflects_tuples(A_, B_, asg);
        return true;
    }

    void recurse(const std::vector<int>& asg, const std::vector<std::uint64_t>& cand) {
        if (stop_) return;
        int branch = -1;
        int branch_count = 65;
        for (std::size_t v = 0; v < asg.size(); ++v) {
            if (asg[v] >= 0) continue;
            int c = std::popcount(cand[v]);
            if (c < branch_count) {
                branch_count = c;
                branch = static_cast<int>(v);
            }
        }
        if (branch < 0) {
            if (leaf_ok(asg) && !(*on_solution_)(asg)) stop_ = true;
            return;
        }
        std::uint64_t options = cand[static_cast<std::size_t>(branch)];
        for (int w = 0; w < B_.size() && !stop_; ++w) {
            if (!(options >> w & 1)) continue;
            if (++nodes_ > budget_.max_nodes)
                throw resource_error("search exceeded the node budget of " +
                                     std::to_string(budget_.max_nodes));
            std::vector<int> asg2 = asg;
            std::vector<std::uint64_t> cand2 = cand;
            if (set(branch, w, asg2, cand2)) recurse(asg2, cand2);
        }
    }

    const Structure& A_;
    const Structure& B_;
    SearchMode mode_;
    const Budget& budget_;
    std::uint64_t full_ = 0;
    bool injective_ = false;
    bool stop_ = false;
    std::uint64_t nodes_ = 0;
    std::vector<int> assignment_;
    std::vector<std::uint64_t> candidates_;
    std::vector<std::vector<std::pair<int, int>>> tuples_by_elem_;
    const std::function<bool(const std::vector<int>&)>* on_solution_ = nullptr;
};

} // namespace detail

// Complete search for a total map A -> B in the given mode extending `seed`.
// Exhausted means no such map exists. Throws precondition_error when the seed
// itself already violates the mode.
inline SearchResult search_map(const Structure& A, const Structure& B, SearchMode mode,
                               const PartialMap& seed,
                               const Budget& budget = Budget::default_budget()) {
    detail::require_same_signature(A, B, "search_map");
    if (seed.source() != A || seed.target() != B)
        throw precondition_error("search_map: seed endpoints do not match the instance");
    if (!detail::partial_map_valid(A, B, seed.image_vector(), mode))
        throw precondition_error("search_map: seed already violates mode " + to_string(mode));
    detail::MapSearch search(A, B, mode, budget);
    if (!search.apply_seed(seed.image_vector()))
        return SearchResult{std::nullopt, 0};
    SearchResult result;
    auto src = std::make_shared<Structure>(A);
    auto dst = std::make_shared<Structure>(B);
    result.nodes = search.run([&](const std::vector<int>& asg) {
        result.map = PartialMap(src, dst, asg);
        return false;
    });
    return result;
}

inline SearchResult search_map(const Structure& A, const Structure& B, SearchMode mode,
                               const Budget& budget = Budget::default_budget()) {
    return search_map(A, B, mode, PartialMap(A, B), budget);
}

// Exact number of total maps A -> B passing the mode.
inline std::uint64_t count_maps(const Structure& A, const Structure& B, SearchMode mode,
                                const Budget& budget = Budget::default_budget()) {
    detail::MapSearch search(A, B, mode, budget);
    std::uint64_t count = 0;
    search.run([&](const std::vector<int>&) {
        ++count;
        return true;
    });
    return count;
}

// All total maps A -> B passing the mode, in deterministic search order.
inline std::vector<PartialMap> enumerate_maps(const Structure& A, const Structure& B, SearchMode mode,
                                              const Budget& budget = Budget::default_budget()) {
    detail::MapSearch search(A, B, mode, budget);
    auto src = std::make_shared<Structure>(A);
    auto dst = std::make_shared<Structure>(B);
    std::vector<PartialMap> maps;
    search.run([&](const std::vector<int>& asg) {
        maps.emplace_back(src, dst, asg);
        return true;
    });
    return maps;
}

// A partial self-map of A is a local homomorphism when it is a homomorphism
// from the substructure induced by its domain into A; a local isomorphism
// additionally reflects tuples over its (injective) image.
inline bool is_local_map(const Structure& A, const std::vector<int>& asg, SearchMode mode) {
    Tuple mapped;
    for (int r = 0; r < A.signature().size(); ++r) {
        for (const Tuple& t : A.tuples(r)) {
            mapped.clear();
            bool inside = true;
            for (int v : t) {
                int w = asg[static_cast<std::size_t>(v)];
                if (w < 0) { inside = false; break; }
                mapped.push_back(w);
            }
            if (inside && !A.has_tuple(r, mapped)) return false;
        }
    }
    if (mode == SearchMode::Hom) return true;
    // Injectivity on the domain, then reflection of tuples inside the image
    // whose preimages lie inside the domain.
    std::vector<int> pre(static_cast<std::size_t>(A.size()), -1);
    for (std::size_t v = 0; v < asg.size(); ++v) {
        if (asg[v] < 0) continue;
        if (pre[static_cast<std::size_t>(asg[v])] != -1) return false;
        pre[static_cast<std::size_t>(asg[v])] = static_cast<int>(v);
    }
    Tuple back;
    for (int r = 0; r < A.signature().size(); ++r) {
        for (const Tuple& t : A.tuples(r)) {
            back.clear();
            bool in_image = true;
            for (int w : t) {
                int p = pre[static_cast<std::size_t>(w)];
                if (p < 0) { in_image = false; break; }
                back.push_back(p);
            }
            if (in_image && !A.has_tuple(r, back)) return false;
        }
    }
    return true;
}

inline bool is_local_map(const Structure& A, const PartialMap& f, SearchMode mode) {
    if (f.source() != A || f.target() != A)
        throw precondition_error("local map must live inside the given structure");
    return is_local_map(A, f.image_vector(), mode);
}

// Extends a local homomorphism f of A to the substructure induced by `goal`.
// Found iff f extends to a homomorphism induced(goal) -> A agreeing with f on
// dom(f); the returned map's source is the induced substructure.
inline SearchResult extend_local(const Structure& A, const PartialMap& f,
                                 const std::vector<int>& goal,
                                 const Budget& budget = Budget::default_budget()) {
    if (f.source() != A || f.target() != A)
        throw precondition_error("extend_local: map must be a partial self-map of A");
    if (!is_local_map(A, f.image_vector(), SearchMode::Hom))
        throw precondition_error("extend_local: map is not a local homomorphism");
    std::vector<char> in_goal(static_cast<std::size_t>(A.size()), 0);
    for (int v : goal) {
        if (v < 0 || v >= A.size()) throw precondition_error("extend_local: goal element out of range");
        in_goal[static_cast<std::size_t>(v)] = 1;
    }
    for (int v = 0; v < A.size(); ++v)
        if (f.defined(v) && !in_goal[static_cast<std::size_t>(v)])
            throw precondition_error("extend_local: goal must contain the domain of the map");

    std::vector<int> goal_sorted;
    for (int v = 0; v < A.size(); ++v)
        if (in_goal[static_cast<std::size_t>(v)]) goal_sorted.push_back(v);
    Structure G = induced_substructure_idx(A, goal_sorted);
    std::vector<int> seed(goal_sorted.size(), -1);
    for (std::size_t i = 0; i < goal_sorted.size(); ++i)
        if (f.defined(goal_sorted[i])) seed[i] = f.image_of(goal_sorted[i]);

    detail::MapSearch search(G, A, SearchMode::Hom, budget);
    SearchResult result;
    if (!search.apply_seed(seed)) return result;
    auto src = std::make_shared<Structure>(G);
    auto dst = std::make_shared<Structure>(A);
    result.nodes = search.run([&](const std::vector<int>& asg) {
        result.map = PartialMap(src, dst, asg);
        return false;
    });
    return result;
}

inline SearchResult extend_local(const Structure& A, const PartialMap& f,
                                 const std::vector<std::string>& goal,
                                 const Budget& budget = Budget::default_budget()) {
    std::vector<int> idx;
    for (const auto& name : goal) {
        int v = A.element_index(name);
        if (v < 0) throw precondition_error("extend_local: unknown element '" + name + "'");
        idx.push_back(v);
    }
    return extend_local(A, f, idx, budget);
}

enum class HomogeneityKind { Hom, Iso };

struct HomogeneityResult {
    bool homogeneous = false;
    std::optional<PartialMap> counterexample;
};

// Decides homomorphism-homogeneity (every local homomorphism extends to an
// endomorphism) or plain homogeneity (every local isomorphism extends to an
// automorphism). Local maps are enumerated by increasing domain size, then
// lexicographically by domain and assignment, and the first non-extendable
// one is reported.
inline HomogeneityResult homogeneity_check(const Structure& A, HomogeneityKind kind,
                                           const Budget& budget = Budget::default_budget()) {
    const int n = A.size();
    SearchMode mode = kind == HomogeneityKind::Hom ? SearchMode::Hom : SearchMode::Iso;
    auto shared = std::make_shared<Structure>(A);

    HomogeneityResult result;
    result.homogeneous = true;

    // Try every assignment vector over a fixed domain, lexicographically.
    auto scan_assignments = [&](const std::vector<int>& dom) -> bool {
        std::vector<int> asg(static_cast<std::size_t>(n), -1);
        std::vector<int> odo(dom.size(), 0);
        while (true) {
            for (std::size_t i = 0; i < dom.size(); ++i)
                asg[static_cast<std::size_t>(dom[i])] = odo[i];
            if (is_local_map(A, asg, mode)) {
                PartialMap f(shared, shared, asg);
                if (!search_map(A, A, mode, f, budget).found()) {
                    result.homogeneous = false;
                    result.counterexample = f;
                    return false;
                }
            }
            std::size_t i = dom.size();
            while (true) {
                if (i == 0) return true;
                --i;
                if (++odo[i] < n) break;
                odo[i] = 0;
            }
        }
    };

    std::function<bool(std::vector<int>&, std::size_t, int)> scan_domains =
        [&](std::vector<int>& dom, std::size_t pos, int next) -> bool {
        if (pos == dom.size()) return scan_assignments(dom);
        for (int v = next; v < n; ++v) {
            dom[pos] = v;
            if (!scan_domains(dom, pos + 1, v + 1)) return false;
        }
        return true;
    };

    for (int size = 1; size <= n && result.homogeneous; ++size) {
        std::vector<int> dom(static_cast<std::size_t>(size), 0);
        scan_domains(dom, 0, 0);
    }
    return result;
}

// Homomorphisms in both directions.
inline bool hom_equivalent(const Structure& A, const Structure& B,
                           const Budget& budget = Budget::default_budget()) {
    detail::require_same_signature(A, B, "hom_equivalent");
    return search_map(A, B, SearchMode::Hom, budget).found() &&
           search_map(B, A, SearchMode::Hom, budget).found();
}

} // namespace finrel
