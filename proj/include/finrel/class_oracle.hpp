#pragma once

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <vector>

#include "finrel/canonical.hpp"
#include "finrel/homsearch.hpp"
#include "finrel/structures.hpp"

namespace finrel {

namespace detail {

// All structures over `sig` with exactly k elements, one canonical
// representative per isomorphism class, sorted by encoding. Works by walking
// every labeled structure (all subsets of the tuple space per relation), so
// the labeled count is guarded by the budget.
inline std::vector<Structure> enumerate_iso_classes(const Signature& sig, int k,
                                                    const Budget& budget) {
    std::vector<std::string> elems;
    for (int i = 0; i < k; ++i) elems.push_back("e" + std::to_string(i));

    // Tuple slots per relation, in lexicographic order.
    std::vector<std::vector<Tuple>> slots(static_cast<std::size_t>(sig.size()));
    long double labeled = 1;
    for (int r = 0; r < sig.size(); ++r) {
        int arity = sig.at(r).arity;
        std::uint64_t count = 1;
        for (int i = 0; i < arity; ++i) count *= static_cast<std::uint64_t>(k);
        Tuple t(static_cast<std::size_t>(arity), 0);
        while (true) {
            slots[static_cast<std::size_t>(r)].push_back(t);
            int p = arity;
            while (true) {
                if (p == 0) break;
                --p;
                if (++t[static_cast<std::size_t>(p)] < k) break;
                t[static_cast<std::size_t>(p)] = 0;
            }
            if (static_cast<std::uint64_t>(slots[static_cast<std::size_t>(r)].size()) == count) break;
        }
        labeled *= std::pow(2.0L, static_cast<long double>(count));
        if (labeled > static_cast<long double>(budget.max_enumeration))
            throw resource_error("structure enumeration over " + sig.to_string() + " with " +
                                 std::to_string(k) + " elements exceeds the enumeration budget");
    }

    std::set<std::string> seen;
    std::vector<Structure> reps;
    std::vector<std::uint64_t> choice(static_cast<std::size_t>(sig.size()), 0);
    while (true) {
        std::vector<std::vector<Tuple>> contents(static_cast<std::size_t>(sig.size()));
        for (int r = 0; r < sig.size(); ++r) {
            const auto& sl = slots[static_cast<std::size_t>(r)];
            for (std::size_t i = 0; i < sl.size(); ++i)
                if (choice[static_cast<std::size_t>(r)] >> i & 1)
                    contents[static_cast<std::size_t>(r)].push_back(sl[i]);
        }
        Structure S(sig, elems, std::move(contents));
        Structure C = canonical_form(S, budget);
        if (seen.insert(C.encode()).second) reps.push_back(std::move(C));

        // Odometer over relation subsets.
        std::size_t r = static_cast<std::size_t>(sig.size());
        bool done = false;
        while (true) {
            if (r == 0) { done = true; break; }
            --r;
            ++choice[r];
            if ((choice[r] >> slots[r].size()) == 0) break;
            choice[r] = 0;
        }
        if (done) break;
    }
    std::sort(reps.begin(), reps.end(),
              [](const Structure& a, const Structure& b) { return a.encode() < b.encode(); });
    return reps;
}

inline const std::vector<Structure>& all_structures_cached(const Signature& sig, int k,
                                                           const Budget& budget) {
    static std::map<std::pair<std::string, int>, std::vector<Structure>> cache;
    static std::mutex mutex;
    std::lock_guard<std::mutex> lock(mutex);
    auto key = std::make_pair(sig.to_string(), k);
    auto it = cache.find(key);
    if (it == cache.end())
        it = cache.emplace(key, enumerate_iso_classes(sig, k, budget)).first;
    return it->second;
}

} // namespace detail

// All structures over `sig` with 1..n elements, canonical representatives
// sorted by (size, encoding). This is the universe CSP equivalence quantifies
// over.
inline std::vector<Structure> enumerate_all_structures(const Signature& sig, int n,
                                                       const Budget& budget = Budget::default_budget()) {
    std::vector<Structure> all;
    for (int k = 1; k <= n; ++k) {
        const auto& reps = detail::all_structures_cached(sig, k, budget);
        all.insert(all.end(), reps.begin(), reps.end());
    }
    return all;
}

// A (size-bounded) isomorphism-closed class of finite structures, given by a
// membership predicate and an enumerator of canonical representatives. Covers
// every class the constructions need: ages, all graphs, all digraphs, linear
// orders, forbidden-substructure classes and explicit finite lists.
class ClassOracle {
public:
    enum class Kind { AgeOf, AllGraphs, AllDigraphs, LinearOrders, Forbidden, Explicit };

    static ClassOracle age_of(Structure A, std::string name = "") {
        ClassOracle c;
        c.kind_ = Kind::AgeOf;
        c.sig_ = A.signature();
        c.base_ = std::make_shared<Structure>(std::move(A));
        c.description_ = name.empty() ? "age-of:?" : "age-of:" + name;
        return c;
    }

    static ClassOracle all_graphs() {
        ClassOracle c;
        c.kind_ = Kind::AllGraphs;
        c.sig_ = graph_signature();
        c.description_ = "all-graphs";
        return c;
    }

    static ClassOracle all_digraphs() {
        ClassOracle c;
        c.kind_ = Kind::AllDigraphs;
        c.sig_ = graph_signature();
        c.description_ = "all-digraphs";
        return c;
    }

    static ClassOracle linear_orders() {
        ClassOracle c;
        c.kind_ = Kind::LinearOrders;
        c.sig_ = Signature({{"lt", 2}});
        c.description_ = "linear-orders";
        return c;
    }

    static ClassOracle forbidden(std::vector<Structure> list) {
        if (list.empty()) throw precondition_error("forbidden class needs at least one structure");
        ClassOracle c;
        c.kind_ = Kind::Forbidden;
        c.sig_ = list[0].signature();
        for (const auto& s : list) detail::require_same_signature(list[0], s, "forbidden class");
        c.list_ = std::make_shared<std::vector<Structure>>(std::move(list));
        c.description_ = "forbidden";
        return c;
    }

    static ClassOracle explicit_list(std::vector<Structure> list) {
        if (list.empty()) throw precondition_error("explicit class needs at least one structure");
        ClassOracle c;
        c.kind_ = Kind::Explicit;
        c.sig_ = list[0].signature();
        for (const auto& s : list) detail::require_same_signature(list[0], s, "explicit class");
        c.list_ = std::make_shared<std::vector<Structure>>(std::move(list));
        c.description_ = "explicit";
        return c;
    }

    Kind kind() const { return kind_; }
    const Signature& signature() const { return sig_; }
    const std::string& description() const { return description_; }

    // True when the class is closed under induced substructures by
    // construction (mathematically, not just at a checked bound). Explicit
    // lists are the one kind without this guarantee; witness searches may not
    // certify failure for them.
    bool hereditary_by_construction() const { return kind_ != Kind::Explicit; }

    bool member(const Structure& S, const Budget& budget = Budget::default_budget()) const {
        if (S.signature() != sig_) return false;
        if (S.size() == 0) return false;
        switch (kind_) {
            case Kind::AgeOf:
                return search_map(S, *base_, SearchMode::Embedding, budget).found();
            case Kind::AllGraphs: {
                for (const Tuple& t : S.tuples(0)) {
                    if (t[0] == t[1]) return false;
                    if (!S.has_tuple(0, {t[1], t[0]})) return false;
                }
                return true;
            }
            case Kind::AllDigraphs:
                return true;
            case Kind::LinearOrders: {
                const int n = S.size();
                for (const Tuple& t : S.tuples(0))
                    if (t[0] == t[1]) return false;
                for (int a = 0; a < n; ++a)
                    for (int b = 0; b < n; ++b) {
                        if (a == b) continue;
                        bool ab = S.has_tuple(0, {a, b});
                        bool ba = S.has_tuple(0, {b, a});
                        if (ab == ba) return false; // totality and antisymmetry
                        for (int c = 0; c < n && ab; ++c)
                            if (S.has_tuple(0, {b, c}) && !S.has_tuple(0, {a, c})) return false;
                    }
                return true;
            }
            case Kind::Forbidden: {
                for (const Structure& f : *list_)
                    if (search_map(f, S, SearchMode::Embedding, budget).found()) return false;
                return true;
            }
            case Kind::Explicit: {
                for (const Structure& m : *list_)
                    if (isomorphic(S, m, budget)) return true;
                return false;
            }
        }
        return false;
    }

    // Canonical representatives of all members with <= n elements, pairwise
    // non-isomorphic, sorted by (size, encoding).
    std::vector<Structure> enumerate_up_to(int n, const Budget& budget = Budget::default_budget()) const {
        std::lock_guard<std::mutex> lock(cache_->mutex);
        auto it = cache_->entries.find(n);
        if (it != cache_->entries.end()) return it->second;
        std::vector<Structure> members = enumerate_impl(n, budget);
        cache_->entries[n] = members;
        return members;
    }

private:
    std::vector<Structure> enumerate_impl(int n, const Budget& budget) const {
        std::vector<Structure> members;
        switch (kind_) {
            case Kind::AgeOf: {
                std::set<std::string> seen;
                const Structure& A = *base_;
                std::vector<int> subset;
                std::function<void(int)> rec = [&](int next) {
                    if (!subset.empty()) {
                        Structure C = canonical_form(induced_substructure_idx(A, subset), budget);
                        if (seen.insert(C.encode()).second) members.push_back(std::move(C));
                    }
                    if (static_cast<int>(subset.size()) == n) return;
                    for (int v = next; v < A.size(); ++v) {
                        subset.push_back(v);
                        rec(v + 1);
                        subset.pop_back();
                    }
                };
                rec(0);
                break;
            }
            case Kind::AllGraphs: {
                for (int k = 1; k <= n; ++k) {
                    // Subsets of unordered vertex pairs, symmetrized.
                    std::vector<std::pair<int, int>> pairs;
                    for (int a = 0; a < k; ++a)
                        for (int b = a + 1; b < k; ++b) pairs.emplace_back(a, b);
                    if (pairs.size() > 22)
                        throw resource_error("graph enumeration beyond 22 edge slots");
                    std::vector<std::string> elems;
                    for (int i = 0; i < k; ++i) elems.push_back("e" + std::to_string(i));
                    std::set<std::string> seen;
                    std::vector<Structure> found;
                    for (std::uint64_t mask = 0; mask < (1ull << pairs.size()); ++mask) {
                        std::vector<Tuple> edges;
                        for (std::size_t i = 0; i < pairs.size(); ++i)
                            if (mask >> i & 1) {
                                edges.push_back({pairs[i].first, pairs[i].second});
                                edges.push_back({pairs[i].second, pairs[i].first});
                            }
                        Structure S(sig_, elems, {edges});
                        Structure C = canonical_form(S, budget);
                        if (seen.insert(C.encode()).second) found.push_back(std::move(C));
                    }
                    std::sort(found.begin(), found.end(), [](const Structure& a, const Structure& b) {
                        return a.encode() < b.encode();
                    });
                    for (auto& s : found) members.push_back(std::move(s));
                }
                break;
            }
            case Kind::AllDigraphs: {
                for (int k = 1; k <= n; ++k) {
                    const auto& reps = detail::all_structures_cached(sig_, k, budget);
                    members.insert(members.end(), reps.begin(), reps.end());
                }
                break;
            }
            case Kind::LinearOrders: {
                for (int k = 1; k <= n; ++k) {
                    std::vector<std::string> elems;
                    for (int i = 0; i < k; ++i) elems.push_back("e" + std::to_string(i));
                    std::vector<Tuple> lt;
                    for (int a = 0; a < k; ++a)
                        for (int b = a + 1; b < k; ++b) lt.push_back({a, b});
                    members.emplace_back(sig_, std::move(elems), std::vector<std::vector<Tuple>>{lt});
                }
                break;
            }
            case Kind::Forbidden: {
                for (int k = 1; k <= n; ++k)
                    for (const Structure& S : detail::all_structures_cached(sig_, k, budget))
                        if (member(S, budget)) members.push_back(S);
                break;
            }
            case Kind::Explicit: {
                std::set<std::string> seen;
                std::vector<Structure> reps;
                for (const Structure& s : *list_) {
                    if (s.size() > n) continue;
                    Structure C = canonical_form(s, budget);
                    if (seen.insert(C.encode()).second) reps.push_back(std::move(C));
                }
                std::sort(reps.begin(), reps.end(), [](const Structure& a, const Structure& b) {
                    return std::make_pair(a.size(), a.encode()) < std::make_pair(b.size(), b.encode());
                });
                members = std::move(reps);
                break;
            }
        }
        std::stable_sort(members.begin(), members.end(), [](const Structure& a, const Structure& b) {
            return std::make_pair(a.size(), a.encode()) < std::make_pair(b.size(), b.encode());
        });
        return members;
    }

    struct Cache {
        std::mutex mutex;
        std::map<int, std::vector<Structure>> entries;
    };

    Kind kind_ = Kind::AllGraphs;
    Signature sig_;
    std::shared_ptr<const Structure> base_;
    std::shared_ptr<const std::vector<Structure>> list_;
    std::string description_;
    std::shared_ptr<Cache> cache_ = std::make_shared<Cache>();
};

} // namespace finrel
