#pragma once

#include <optional>
#include <string>
#include <vector>

#include "finrel/canonical.hpp"
#include "finrel/class_oracle.hpp"
#include "finrel/homsearch.hpp"
#include "finrel/structures.hpp"

namespace finrel {

// The tuple quasiorder: a <= b iff the componentwise map a_i -> b_i is a local
// homomorphism of A. False (not an error) when the assignment is not
// functional. Reflexive and transitive since local homomorphisms compose.
inline bool tuple_leq(const Structure& A, const Tuple& a, const Tuple& b) {
    if (a.size() != b.size())
        throw precondition_error("tuple_leq: tuples of different length");
    std::vector<int> asg(static_cast<std::size_t>(A.size()), -1);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] < 0 || a[i] >= A.size() || b[i] < 0 || b[i] >= A.size())
            throw precondition_error("tuple_leq: tuple entry outside the carrier");
        int& slot = asg[static_cast<std::size_t>(a[i])];
        if (slot != -1 && slot != b[i]) return false;
        slot = b[i];
    }
    return is_local_map(A, asg, SearchMode::Hom);
}

inline bool tuple_leq(const Structure& A, const std::vector<std::string>& a,
                      const std::vector<std::string>& b) {
    auto idx = [&](const std::vector<std::string>& names) {
        Tuple t;
        for (const auto& nm : names) {
            int v = A.element_index(nm);
            if (v < 0) throw precondition_error("tuple_leq: unknown element '" + nm + "'");
            t.push_back(v);
        }
        return t;
    };
    return tuple_leq(A, idx(a), idx(b));
}

// Quotient of the n-tuple quasiorder into equivalence classes plus the induced
// partial order, maximal class flags and the number of up-closed sets (the
// count of n-ary relations invariant under the generating maps; empty and
// full sets included).
struct TupleOrder {
    Structure base;
    int arity = 0;
    int carrier = 0;
    std::vector<std::vector<Tuple>> classes;  // sorted internally, ordered by least tuple
    std::vector<std::vector<char>> leq;       // leq[c][d]: class c below class d
    std::vector<bool> maximal;
    std::uint64_t upset_count = 0;

    int class_count() const { return static_cast<int>(classes.size()); }

    int class_of(const Tuple& t) const {
        for (int c = 0; c < class_count(); ++c) {
            const auto& members = classes[static_cast<std::size_t>(c)];
            if (std::binary_search(members.begin(), members.end(), t)) return c;
        }
        throw precondition_error("class_of: tuple not in the order");
    }

    const Tuple& representative(int c) const { return classes.at(static_cast<std::size_t>(c))[0]; }
};

namespace detail {

inline std::vector<Tuple> all_tuples(int carrier, int arity, const Budget& budget) {
    std::uint64_t total = 1;
    for (int i = 0; i < arity; ++i) {
        total *= static_cast<std::uint64_t>(carrier);
        if (total > budget.max_tuples)
            throw resource_error("tuple order over " + std::to_string(carrier) + "^" +
                                 std::to_string(arity) + " tuples exceeds the budget of " +
                                 std::to_string(budget.max_tuples));
    }
    std::vector<Tuple> tuples;
    tuples.reserve(total);
    Tuple t(static_cast<std::size_t>(arity), 0);
    while (true) {
        tuples.push_back(t);
        int p = arity;
        while (true) {
            if (p == 0) return tuples;
            --p;
            if (++t[static_cast<std::size_t>(p)] < carrier) break;
            t[static_cast<std::size_t>(p)] = 0;
        }
    }
}

// Builds a TupleOrder from a reachability predicate that is already reflexive
// and transitive. Up-set counting is optional: callers that only need the
// classes and the order skip it, since the count can be exponential in the
// number of classes.
inline TupleOrder build_tuple_order(const Structure& A, int arity,
                                    const std::function<bool(const Tuple&, const Tuple&)>& reach,
                                    const Budget& budget, bool count_upsets = true) {
    TupleOrder order;
    order.base = A;
    order.arity = arity;
    order.carrier = A.size();
    std::vector<Tuple> tuples = all_tuples(A.size(), arity, budget);
    const std::size_t T = tuples.size();

    std::vector<int> class_of(T, -1);
    for (std::size_t i = 0; i < T; ++i) {
        if (class_of[i] >= 0) continue;
        int c = static_cast<int>(order.classes.size());
        std::vector<Tuple> members{tuples[i]};
        class_of[i] = c;
        for (std::size_t j = i + 1; j < T; ++j) {
            if (class_of[j] >= 0) continue;
            if (reach(tuples[i], tuples[j]) && reach(tuples[j], tuples[i])) {
                class_of[j] = c;
                members.push_back(tuples[j]);
            }
        }
        order.classes.push_back(std::move(members));
    }
    const int k = order.class_count();
    order.leq.assign(static_cast<std::size_t>(k), std::vector<char>(static_cast<std::size_t>(k), 0));
    for (int c = 0; c < k; ++c)
        for (int d = 0; d < k; ++d)
            order.leq[static_cast<std::size_t>(c)][static_cast<std::size_t>(d)] =
                c == d || reach(order.representative(c), order.representative(d));
    order.maximal.assign(static_cast<std::size_t>(k), true);
    for (int c = 0; c < k; ++c)
        for (int d = 0; d < k; ++d)
            if (c != d && order.leq[static_cast<std::size_t>(c)][static_cast<std::size_t>(d)])
                order.maximal[static_cast<std::size_t>(c)] = false;

    if (!count_upsets) return order;

    // Count up-closed sets by deciding classes along a linear extension from
    // the top: a class may join only when everything strictly above is in.
    std::vector<int> topo;
    {
        std::vector<char> placed(static_cast<std::size_t>(k), 0);
        while (static_cast<int>(topo.size()) < k) {
            for (int c = 0; c < k; ++c) {
                if (placed[static_cast<std::size_t>(c)]) continue;
                bool ready = true;
                for (int d = 0; d < k && ready; ++d)
                    if (d != c && !placed[static_cast<std::size_t>(d)] &&
                        order.leq[static_cast<std::size_t>(c)][static_cast<std::size_t>(d)])
                        ready = false;
                if (ready) {
                    topo.push_back(c);
                    placed[static_cast<std::size_t>(c)] = 1;
                }
            }
        }
    }
    std::uint64_t count = 0;
    std::vector<char> in(static_cast<std::size_t>(k), 0);
    std::function<void(std::size_t)> enumerate = [&](std::size_t pos) {
        if (pos == topo.size()) {
            if (++count > budget.max_upsets)
                throw resource_error("up-set count exceeds the budget of " +
                                     std::to_string(budget.max_upsets));
            return;
        }
        int c = topo[pos];
        in[static_cast<std::size_t>(c)] = 0;
        enumerate(pos + 1);
        bool allowed = true;
        for (int d = 0; d < k && allowed; ++d)
            if (d != c && order.leq[static_cast<std::size_t>(c)][static_cast<std::size_t>(d)] &&
                !in[static_cast<std::size_t>(d)])
                allowed = false;
        if (allowed) {
            in[static_cast<std::size_t>(c)] = 1;
            enumerate(pos + 1);
            in[static_cast<std::size_t>(c)] = 0;
        }
    };
    enumerate(0);
    order.upset_count = count;
    return order;
}

} // namespace detail

// Tuple order under local-homomorphism reachability (the quasiorder behind
// saturation and hom-irreducibility).
inline TupleOrder type_classes(const Structure& A, int arity,
                               const Budget& budget = Budget::default_budget()) {
    if (arity < 1) throw precondition_error("type_classes: arity must be positive");
    return detail::build_tuple_order(
        A, arity, [&](const Tuple& a, const Tuple& b) { return tuple_leq(A, a, b); }, budget);
}

// Tuple order under endomorphism reachability: a <= b iff some endomorphism
// maps a to b componentwise. For finite structures this is the extensional
// form of positive-existential type containment (the canonical conjunctive
// query of (A, a) is realized at b exactly when such an endomorphism exists),
// which is what type expansion needs. The up-set count is not computed here;
// only the classes and their order are.
inline TupleOrder endo_type_classes(const Structure& A, int arity,
                                    const Budget& budget = Budget::default_budget()) {
    if (arity < 1) throw precondition_error("endo_type_classes: arity must be positive");
    std::vector<PartialMap> endos = enumerate_maps(A, A, SearchMode::Hom, budget);
    auto reach = [&](const Tuple& a, const Tuple& b) {
        for (const PartialMap& g : endos) {
            bool hit = true;
            for (std::size_t i = 0; i < a.size() && hit; ++i)
                if (g.image_of(a[i]) != b[i]) hit = false;
            if (hit) return true;
        }
        return false;
    };
    return detail::build_tuple_order(A, arity, reach, budget, /*count_upsets=*/false);
}

// Climbs the tuple order greedily (least class strictly above the current
// one, in canonical class order) until a maximal class is reached. Returns
// the representative of that class together with the witnessing local
// homomorphism a_i -> max_i.
struct SaturateResult {
    Tuple tuple;
    PartialMap witness;
    int class_index = -1;
};

inline SaturateResult saturate(const Structure& A, const Tuple& a,
                               const Budget& budget = Budget::default_budget()) {
    const int arity = static_cast<int>(a.size());
    if (arity < 1) throw precondition_error("saturate: empty tuple");
    TupleOrder order = type_classes(A, arity, budget);
    int c = order.class_of(a);
    while (!order.maximal[static_cast<std::size_t>(c)]) {
        for (int d = 0; d < order.class_count(); ++d) {
            if (d == c) continue;
            if (order.leq[static_cast<std::size_t>(c)][static_cast<std::size_t>(d)]) {
                c = d;
                break;
            }
        }
    }
    Tuple a_max = order.representative(c);
    if (!tuple_leq(A, a, a_max))
        throw invariant_error("saturate: chosen maximal tuple is not above the input");
    std::vector<int> asg(static_cast<std::size_t>(A.size()), -1);
    for (std::size_t i = 0; i < a.size(); ++i) asg[static_cast<std::size_t>(a[i])] = a_max[i];
    auto shared = std::make_shared<Structure>(A);
    return SaturateResult{a_max, PartialMap(shared, shared, asg), c};
}

// Hom-irreducibility of A within a class: every homomorphism from A into a
// member (up to n elements) is an embedding.
struct IrreducibilityResult {
    bool yes = false;
    std::optional<PartialMap> witness; // a non-embedding homomorphism
};

inline IrreducibilityResult is_hom_irreducible(const Structure& A, const ClassOracle& oracle,
                                               int n,
                                               const Budget& budget = Budget::default_budget()) {
    if (!oracle.member(A, budget))
        throw precondition_error("is_hom_irreducible: structure is not a member of the class");
    for (const Structure& B : oracle.enumerate_up_to(n, budget))
        for (const PartialMap& f : enumerate_maps(A, B, SearchMode::Hom, budget))
            if (!check_map(f, SearchMode::Embedding)) return {false, f};
    return {true, std::nullopt};
}

// Members of the class (up to n elements) that are hom-irreducible in it,
// tested against members up to 2n.
inline std::vector<Structure> irreducibles(const ClassOracle& oracle, int n,
                                           const Budget& budget = Budget::default_budget()) {
    if (n < 1) throw precondition_error("irreducibles: bound must be positive");
    std::vector<Structure> out;
    for (const Structure& A : oracle.enumerate_up_to(n, budget))
        if (is_hom_irreducible(A, oracle, 2 * n, budget).yes) out.push_back(A);
    return out;
}

// Is every endomorphism an embedding?
struct CoreCheck {
    bool core = false;
    std::optional<PartialMap> witness; // a non-embedding endomorphism
};

inline CoreCheck is_core(const Structure& A, const Budget& budget = Budget::default_budget()) {
    for (const PartialMap& f : enumerate_maps(A, A, SearchMode::Hom, budget))
        if (!check_map(f, SearchMode::Embedding)) return {false, f};
    return {true, std::nullopt};
}

// A homomorphic retraction of A onto an induced substructure that is a core.
// `map` is a total endomorphism of A, identical on the image carrier, with
// image exactly the image carrier.
struct Retraction {
    Structure source;
    Structure image;
    PartialMap map; // A -> A
};

// The minimum-size retract of A whose induced substructure is a core; ties
// between same-size images are broken by canonical encoding, then by subset
// order. Finite structures always have one (the identity at worst).
inline Retraction finite_core(const Structure& A, const Budget& budget = Budget::default_budget()) {
    auto shared = std::make_shared<Structure>(A);
    for (int size = 1; size <= A.size(); ++size) {
        struct Candidate {
            std::vector<int> subset;
            std::vector<int> endo;
            std::string code;
        };
        std::vector<Candidate> found;
        std::vector<int> subset;
        std::function<void(int)> rec = [&](int next) {
            if (static_cast<int>(subset.size()) == size) {
                Structure G = induced_substructure_idx(A, subset);
                std::vector<int> seed(static_cast<std::size_t>(A.size()), -1);
                for (std::size_t i = 0; i < subset.size(); ++i)
                    seed[static_cast<std::size_t>(subset[i])] = static_cast<int>(i);
                PartialMap seed_map(shared, std::make_shared<Structure>(G), seed);
                SearchResult r = search_map(A, G, SearchMode::Hom, seed_map, budget);
                if (r.found() && is_core(G, budget).core) {
                    std::vector<int> endo(static_cast<std::size_t>(A.size()));
                    for (int v = 0; v < A.size(); ++v)
                        endo[static_cast<std::size_t>(v)] = subset[static_cast<std::size_t>(
                            r.map->image_of(v))];
                    found.push_back({subset, std::move(endo), canonical_code(G, budget)});
                }
                return;
            }
            for (int v = next; v < A.size(); ++v) {
                subset.push_back(v);
                rec(v + 1);
                subset.pop_back();
            }
        };
        rec(0);
        if (!found.empty()) {
            std::size_t best = 0;
            for (std::size_t i = 1; i < found.size(); ++i)
                if (found[i].code < found[best].code) best = i;
            Structure image = induced_substructure_idx(A, found[best].subset);
            PartialMap map(shared, shared, found[best].endo);
            if (!check_map(map, SearchMode::Hom))
                throw invariant_error("finite_core: retraction is not a homomorphism");
            return Retraction{A, std::move(image), std::move(map)};
        }
    }
    throw invariant_error("finite_core: no retract found (unreachable for nonempty structures)");
}

// Expands A by one new m-ary relation per principal up-set of the
// endomorphism tuple order, for each arity m <= k: the relation named
// t<m>_<c> holds the tuples of all classes above class c. Original relations
// stay; the carrier is unchanged. Endomorphisms are preserved exactly.
inline Structure expand_by_types(const Structure& A, int k,
                                 const Budget& budget = Budget::default_budget()) {
    if (k < 1) throw precondition_error("expand_by_types: arity bound must be positive");
    if (k > budget.max_expand_arity)
        throw resource_error("expand_by_types: arity " + std::to_string(k) +
                             " exceeds the configured budget of " +
                             std::to_string(budget.max_expand_arity));
    std::vector<RelationSymbol> symbols = A.signature().relations();
    std::map<std::string, std::vector<Tuple>> new_contents;
    std::size_t added = 0;
    for (int m = 1; m <= k; ++m) {
        TupleOrder order = endo_type_classes(A, m, budget);
        for (int c = 0; c < order.class_count(); ++c) {
            if (++added > budget.max_upsets)
                throw resource_error("expand_by_types: number of up-sets exceeds the budget of " +
                                     std::to_string(budget.max_upsets));
            std::string name = "t" + std::to_string(m) + "_" + std::to_string(c);
            while (A.signature().index_of(name) >= 0 || new_contents.count(name)) name += "x";
            std::vector<Tuple> content;
            for (int d = 0; d < order.class_count(); ++d)
                if (order.leq[static_cast<std::size_t>(c)][static_cast<std::size_t>(d)])
                    for (const Tuple& t : order.classes[static_cast<std::size_t>(d)])
                        content.push_back(t);
            symbols.push_back({name, m});
            new_contents[name] = std::move(content);
        }
    }
    Signature expanded(symbols);
    std::vector<std::vector<Tuple>> contents(static_cast<std::size_t>(expanded.size()));
    for (int r = 0; r < expanded.size(); ++r) {
        const std::string& name = expanded.at(r).name;
        int old = A.signature().index_of(name);
        if (old >= 0 && !new_contents.count(name))
            contents[static_cast<std::size_t>(r)] = A.tuples(old);
        else
            contents[static_cast<std::size_t>(r)] = new_contents.at(name);
    }
    return Structure(expanded, A.elements(), std::move(contents));
}

} // namespace finrel
