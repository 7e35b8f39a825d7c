#pragma once

#include <optional>
#include <string>
#include <vector>

#include "finrel/class_oracle.hpp"
#include "finrel/homsearch.hpp"
#include "finrel/structures.hpp"

namespace finrel {

// Canonical representatives of every isomorphism class of substructures of A
// with at most n elements, sorted by (size, encoding).
inline std::vector<Structure> age(const Structure& A, int n,
                                  const Budget& budget = Budget::default_budget()) {
    if (n < 1) throw precondition_error("age: bound must be at least 1");
    return ClassOracle::age_of(A).enumerate_up_to(n, budget);
}

// The pushout of a homomorphism f1: A -> B1 against an embedding f2: A -> B2:
// the disjoint union glued along f1(a) ~ f2(a), with no tuples beyond the
// images. g1 embeds B1, g2 is a homomorphism from B2, and the square
// commutes; these are construction invariants and are re-verified here.
struct Amalgam {
    Structure structure;
    PartialMap g1; // B1 -> structure, embedding
    PartialMap g2; // B2 -> structure, homomorphism
};

inline Amalgam free_amalgam(const PartialMap& f1, const PartialMap& f2) {
    if (f1.source() != f2.source())
        throw precondition_error("free_amalgam: the two maps must share their source");
    if (!check_map(f1, SearchMode::Hom))
        throw precondition_error("free_amalgam: f1 is not a homomorphism");
    if (!check_map(f2, SearchMode::Embedding))
        throw precondition_error("free_amalgam: f2 is not an embedding");

    const Structure& A = f1.source();
    auto du = disjoint_union_with_injections({f1.target(), f2.target()});
    const int n1 = f1.target().size();

    // Union-find over the disjoint-union carrier, gluing f1(a) with f2(a).
    std::vector<int> parent(static_cast<std::size_t>(du.structure.size()));
    for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = static_cast<int>(i);
    std::function<int(int)> find = [&](int x) {
        while (parent[static_cast<std::size_t>(x)] != x) x = parent[static_cast<std::size_t>(x)];
        return x;
    };
    for (int a = 0; a < A.size(); ++a) {
        int x = find(f1.image_of(a));
        int y = find(f2.image_of(a) + n1);
        if (x != y) parent[static_cast<std::size_t>(y)] = x;
    }
    std::map<int, std::vector<int>> blocks;
    for (int v = 0; v < du.structure.size(); ++v) blocks[find(v)].push_back(v);
    std::vector<std::vector<int>> block_list;
    for (auto& [root, members] : blocks) block_list.push_back(std::move(members));

    auto q = quotient_idx(du.structure, block_list);
    Amalgam result{q.structure, compose(du.injections[0], q.projection),
                   compose(du.injections[1], q.projection)};
    if (!check_map(result.g1, SearchMode::Embedding) || !check_map(result.g2, SearchMode::Hom))
        throw invariant_error("free_amalgam produced maps of the wrong kind");
    for (int a = 0; a < A.size(); ++a)
        if (result.g1.image_of(f1.image_of(a)) != result.g2.image_of(f2.image_of(a)))
            throw invariant_error("free_amalgam square does not commute");
    return result;
}

enum class ClassProperty { HP, JEP, AP, HAP };

inline std::string to_string(ClassProperty p) {
    switch (p) {
        case ClassProperty::HP: return "hp";
        case ClassProperty::JEP: return "jep";
        case ClassProperty::AP: return "ap";
        case ClassProperty::HAP: return "hap";
    }
    return "?";
}

// One amalgamation-style configuration: maps f1: A -> B1 and f2: A -> B2
// looking for a member C with g1: B1 -> C an embedding and g2: B2 -> C in
// `g2_mode`, commuting over A. JEP configurations have an empty A.
struct SquareConfig {
    Structure A;
    Structure B1;
    Structure B2;
    std::optional<PartialMap> f1;
    std::optional<PartialMap> f2;
    SearchMode g2_mode = SearchMode::Embedding;
};

struct SquareWitness {
    Structure C;
    PartialMap g1;
    PartialMap g2;
};

namespace detail {

// Glue-partition enumeration for the witness search. The free elements (the
// B2-side elements not glued onto B1) may be merged into B1 blocks or, when
// g2 only needs to be a homomorphism, with each other. The identity partition
// comes first, so the free amalgam itself is always the first candidate.
inline void enumerate_glue_partitions(int f_size, const std::vector<int>& b1_elems,
                                      const std::vector<int>& free_elems, bool allow_free_merge,
                                      const std::vector<char>& b1_joinable,
                                      const std::function<bool(const std::vector<std::vector<int>>&)>& visit) {
    // choice per free element: -1 = own singleton block, 0..|b1|-1 = join that
    // B1 block, |b1|+t = join the block opened by free element t.
    std::vector<int> choice(free_elems.size(), -2);
    std::vector<char> open(free_elems.size(), 0);
    bool stop = false;

    std::function<void(std::size_t)> rec = [&](std::size_t pos) {
        if (stop) return;
        if (pos == free_elems.size()) {
            std::vector<std::vector<int>> blocks(static_cast<std::size_t>(f_size));
            for (int v = 0; v < f_size; ++v) blocks[static_cast<std::size_t>(v)].push_back(v);
            auto merge_into = [&](int host, int v) {
                blocks[static_cast<std::size_t>(host)].push_back(v);
                blocks[static_cast<std::size_t>(v)].clear();
            };
            // Resolve choices to concrete blocks.
            std::vector<int> root(free_elems.size());
            for (std::size_t t = 0; t < free_elems.size(); ++t) {
                if (choice[t] == -1) {
                    root[t] = free_elems[t];
                } else if (choice[t] < static_cast<int>(b1_elems.size())) {
                    root[t] = b1_elems[static_cast<std::size_t>(choice[t])];
                    merge_into(root[t], free_elems[t]);
                } else {
                    int owner = choice[t] - static_cast<int>(b1_elems.size());
                    root[t] = root[static_cast<std::size_t>(owner)];
                    merge_into(root[t], free_elems[t]);
                }
            }
            std::vector<std::vector<int>> nonempty;
            for (auto& b : blocks)
                if (!b.empty()) nonempty.push_back(std::move(b));
            if (!visit(nonempty)) stop = true;
            return;
        }
        // Own block first, so finer partitions come before coarser ones.
        choice[pos] = -1;
        open[pos] = 1;
        rec(pos + 1);
        open[pos] = 0;
        if (stop) return;
        for (int b = 0; b < static_cast<int>(b1_elems.size()) && !stop; ++b) {
            if (!b1_joinable[static_cast<std::size_t>(b)]) continue;
            bool taken = false;
            for (std::size_t t = 0; t < pos; ++t)
                if (choice[t] == b) taken = true;
            if (taken && !allow_free_merge) continue;
            choice[pos] = b;
            rec(pos + 1);
        }
        if (allow_free_merge) {
            for (std::size_t t = 0; t < pos && !stop; ++t) {
                if (!open[t]) continue;
                choice[pos] = static_cast<int>(b1_elems.size() + t);
                rec(pos + 1);
            }
        }
        choice[pos] = -2;
    };
    rec(0);
}

} // namespace detail

// Complete bounded witness search for one configuration. Candidate order:
// the free amalgam, then its glue quotients, then one-tuple relational
// extensions of those, then class members up to the amalgam bound with a
// seeded two-map search. Returns the first witness found.
//
// When no witness exists the search is provably complete iff the class is
// hereditary by construction and the free amalgam fits the bound (the image
// of any witness square restricts to a member of at most that size);
// `certified` reports this so callers can distinguish fails from
// inconclusive.
struct SquareSearchResult {
    std::optional<SquareWitness> witness;
    bool certified_exhausted = false;
};

inline SquareSearchResult find_square_witness(const SquareConfig& cfg, const ClassOracle& oracle,
                                              int m, const Budget& budget = Budget::default_budget()) {
    SquareSearchResult result;

    // Free amalgam of the configuration (plain disjoint union when A is empty).
    auto du = disjoint_union_with_injections({cfg.B1, cfg.B2});
    const int n1 = cfg.B1.size();
    std::vector<int> parent(static_cast<std::size_t>(du.structure.size()));
    for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = static_cast<int>(i);
    std::function<int(int)> find = [&](int x) {
        while (parent[static_cast<std::size_t>(x)] != x) x = parent[static_cast<std::size_t>(x)];
        return x;
    };
    for (int a = 0; a < cfg.A.size(); ++a) {
        int x = find(cfg.f1->image_of(a));
        int y = find(cfg.f2->image_of(a) + n1);
        if (x != y) parent[static_cast<std::size_t>(y)] = x;
    }
    std::vector<std::vector<int>> glue_blocks;
    {
        std::map<int, std::vector<int>> blocks;
        for (int v = 0; v < du.structure.size(); ++v) blocks[find(v)].push_back(v);
        for (auto& [root, members] : blocks) glue_blocks.push_back(std::move(members));
    }
    auto fq = quotient_idx(du.structure, glue_blocks);
    Structure F = fq.structure;
    PartialMap j1 = compose(du.injections[0], fq.projection);
    PartialMap j2 = compose(du.injections[1], fq.projection);

    std::vector<char> is_j1(static_cast<std::size_t>(F.size()), 0);
    std::vector<char> is_j2(static_cast<std::size_t>(F.size()), 0);
    for (int v = 0; v < cfg.B1.size(); ++v) is_j1[static_cast<std::size_t>(j1.image_of(v))] = 1;
    for (int v = 0; v < cfg.B2.size(); ++v) is_j2[static_cast<std::size_t>(j2.image_of(v))] = 1;

    std::vector<int> b1_elems, free_elems;
    for (int v = 0; v < F.size(); ++v)
        (is_j1[static_cast<std::size_t>(v)] ? b1_elems : free_elems).push_back(v);
    const bool allow_free_merge = cfg.g2_mode == SearchMode::Hom;
    std::vector<char> b1_joinable(b1_elems.size(), 1);
    if (cfg.g2_mode == SearchMode::Embedding) {
        // g2 must stay injective: blocks holding a B2-image already cannot
        // absorb another one.
        for (std::size_t b = 0; b < b1_elems.size(); ++b)
            if (is_j2[static_cast<std::size_t>(b1_elems[b])]) b1_joinable[b] = 0;
    }

    auto try_candidate = [&](const Structure& C, const PartialMap& g1, const PartialMap& g2)
        -> bool {
        if (C.size() > m) return false;
        if (!check_map(g1, SearchMode::Embedding)) return false;
        if (!check_map(g2, cfg.g2_mode)) return false;
        if (!oracle.member(C, budget)) return false;
        result.witness = SquareWitness{C, g1, g2};
        return true;
    };

    // Stages 1 and 2: the free amalgam and its glue quotients, finest first.
    std::vector<std::pair<Structure, std::pair<PartialMap, PartialMap>>> quotients;
    detail::enumerate_glue_partitions(
        F.size(), b1_elems, free_elems, allow_free_merge, b1_joinable,
        [&](const std::vector<std::vector<int>>& blocks) {
            auto q = quotient_idx(F, blocks);
            PartialMap g1 = compose(j1, q.projection);
            PartialMap g2 = compose(j2, q.projection);
            if (q.structure.size() <= m) quotients.emplace_back(q.structure, std::make_pair(g1, g2));
            return !try_candidate(q.structure, g1, g2);
        });
    if (result.witness) return result;

    // Stage 3: one-tuple relational extensions, in (relation, tuple) order.
    for (const auto& [Q, maps] : quotients) {
        for (int r = 0; r < Q.signature().size(); ++r) {
            const int arity = Q.signature().at(r).arity;
            Tuple t(static_cast<std::size_t>(arity), 0);
            while (true) {
                if (!Q.has_tuple(r, t)) {
                    std::vector<std::vector<Tuple>> contents;
                    for (int rr = 0; rr < Q.signature().size(); ++rr) contents.push_back(Q.tuples(rr));
                    contents[static_cast<std::size_t>(r)].push_back(t);
                    Structure Qext(Q.signature(), Q.elements(), std::move(contents));
                    auto shared = std::make_shared<Structure>(Qext);
                    PartialMap g1(maps.first.source_ptr(), shared, maps.first.image_vector());
                    PartialMap g2(maps.second.source_ptr(), shared, maps.second.image_vector());
                    if (try_candidate(Qext, g1, g2)) return result;
                }
                int p = arity;
                bool done = false;
                while (true) {
                    if (p == 0) { done = true; break; }
                    --p;
                    if (++t[static_cast<std::size_t>(p)] < Q.size()) break;
                    t[static_cast<std::size_t>(p)] = 0;
                }
                if (done) break;
            }
        }
    }

    // Stage 4: members of the class up to the bound, with a seeded search for
    // g2 once g1 is fixed.
    bool enumeration_complete = true;
    std::vector<Structure> members;
    try {
        members = oracle.enumerate_up_to(m, budget);
    } catch (const resource_error&) {
        enumeration_complete = false;
    }
    for (const Structure& C : members) {
        for (const PartialMap& g1 : enumerate_maps(cfg.B1, C, SearchMode::Embedding, budget)) {
            std::vector<int> seed(static_cast<std::size_t>(cfg.B2.size()), -1);
            bool consistent = true;
            for (int a = 0; a < cfg.A.size(); ++a) {
                int at2 = cfg.f2->image_of(a);
                int want = g1.image_of(cfg.f1->image_of(a));
                if (seed[static_cast<std::size_t>(at2)] >= 0 &&
                    seed[static_cast<std::size_t>(at2)] != want) {
                    consistent = false;
                    break;
                }
                seed[static_cast<std::size_t>(at2)] = want;
            }
            if (!consistent) continue;
            PartialMap seed_map(std::make_shared<Structure>(cfg.B2), std::make_shared<Structure>(C),
                                seed);
            if (!detail::partial_map_valid(cfg.B2, C, seed, cfg.g2_mode)) continue;
            SearchResult r = search_map(cfg.B2, C, cfg.g2_mode, seed_map, budget);
            if (r.found()) {
                result.witness = SquareWitness{C, g1, *r.map};
                return result;
            }
        }
    }

    result.certified_exhausted = oracle.hereditary_by_construction() && F.size() <= m &&
                                 enumeration_complete;
    return result;
}

// Verdict of a bounded class-property check. HP is two-valued; for the
// existential properties a blocked configuration only certifies failure when
// the bounded search was provably complete for it.
struct PropertyVerdict {
    enum class Outcome { Holds, Fails, Inconclusive };

    ClassProperty property = ClassProperty::HP;
    int size_bound = 0;
    int amalgam_bound = 0;
    Outcome outcome = Outcome::Holds;

    // HP failure: a member whose induced substructure is not a member.
    std::optional<Structure> hp_member;
    std::optional<Structure> hp_substructure;

    // JEP/AP/HAP: blocked configurations in enumeration order; for a Fails
    // verdict the first certified one.
    std::vector<SquareConfig> blocked;

    bool holds() const { return outcome == Outcome::Holds; }
    bool fails() const { return outcome == Outcome::Fails; }
};

inline PropertyVerdict check_class_property(const ClassOracle& oracle, ClassProperty property,
                                            int n, int m,
                                            const Budget& budget = Budget::default_budget()) {
    if (n < 1 || m < n) throw precondition_error("check_class_property: need 1 <= n <= m");
    PropertyVerdict verdict;
    verdict.property = property;
    verdict.size_bound = n;
    verdict.amalgam_bound = m;

    std::vector<Structure> members = oracle.enumerate_up_to(n, budget);

    if (property == ClassProperty::HP) {
        for (const Structure& A : members) {
            std::vector<int> subset;
            bool ok = true;
            std::function<void(int)> rec = [&](int next) {
                if (!ok) return;
                if (!subset.empty() && static_cast<int>(subset.size()) < A.size()) {
                    Structure sub = induced_substructure_idx(A, subset);
                    if (!oracle.member(sub, budget)) {
                        verdict.outcome = PropertyVerdict::Outcome::Fails;
                        verdict.hp_member = A;
                        verdict.hp_substructure = sub;
                        ok = false;
                        return;
                    }
                }
                for (int v = next; v < A.size() && ok; ++v) {
                    subset.push_back(v);
                    rec(v + 1);
                    subset.pop_back();
                }
            };
            rec(0);
            if (!ok) return verdict;
        }
        verdict.outcome = PropertyVerdict::Outcome::Holds;
        return verdict;
    }

    bool any_certified = false;
    std::optional<SquareConfig> first_certified;

    auto process = [&](SquareConfig cfg) {
        auto r = find_square_witness(cfg, oracle, m, budget);
        if (r.witness) return;
        if (r.certified_exhausted && !first_certified) {
            any_certified = true;
            first_certified = cfg;
        }
        verdict.blocked.push_back(std::move(cfg));
    };

    if (property == ClassProperty::JEP) {
        Structure empty(oracle.signature(), {},
                        std::vector<std::vector<Tuple>>(
                            static_cast<std::size_t>(oracle.signature().size())));
        for (std::size_t i = 0; i < members.size(); ++i)
            for (std::size_t j = i; j < members.size(); ++j) {
                SquareConfig cfg;
                cfg.A = empty;
                cfg.B1 = members[i];
                cfg.B2 = members[j];
                cfg.f1 = PartialMap(empty, members[i]);
                cfg.f2 = PartialMap(empty, members[j]);
                cfg.g2_mode = SearchMode::Embedding;
                process(std::move(cfg));
            }
    } else {
        const SearchMode f1_mode = property == ClassProperty::HAP ? SearchMode::Hom
                                                                  : SearchMode::Embedding;
        const SearchMode g2_mode = property == ClassProperty::HAP ? SearchMode::Hom
                                                                  : SearchMode::Embedding;
        for (const Structure& A : members)
            for (const Structure& B1 : members)
                for (const Structure& B2 : members)
                    for (const PartialMap& f1 : enumerate_maps(A, B1, f1_mode, budget))
                        for (const PartialMap& f2 :
                             enumerate_maps(A, B2, SearchMode::Embedding, budget)) {
                            SquareConfig cfg;
                            cfg.A = A;
                            cfg.B1 = B1;
                            cfg.B2 = B2;
                            cfg.f1 = f1;
                            cfg.f2 = f2;
                            cfg.g2_mode = g2_mode;
                            process(std::move(cfg));
                        }
    }

    if (verdict.blocked.empty())
        verdict.outcome = PropertyVerdict::Outcome::Holds;
    else if (any_certified)
        verdict.outcome = PropertyVerdict::Outcome::Fails;
    else
        verdict.outcome = PropertyVerdict::Outcome::Inconclusive;
    return verdict;
}

// Does every member of CA (up to n elements) map homomorphically into some
// member of CB (up to n elements)?
struct ProjectionResult {
    bool yes = false;
    std::optional<Structure> witness; // a CA member with no target
};

inline ProjectionResult age_projects(const ClassOracle& CA, const ClassOracle& CB, int n,
                                     const Budget& budget = Budget::default_budget()) {
    if (CA.signature() != CB.signature())
        throw precondition_error("age_projects: classes over different signatures");
    auto targets = CB.enumerate_up_to(n, budget);
    for (const Structure& A : CA.enumerate_up_to(n, budget)) {
        bool mapped = false;
        for (const Structure& B : targets)
            if (search_map(A, B, SearchMode::Hom, budget).found()) {
                mapped = true;
                break;
            }
        if (!mapped) return {false, A};
    }
    return {true, std::nullopt};
}

// The bounded homomorphism order on structures: H precedes H2 when the
// n-bounded age of H2 embeds into H and every homomorphism from an induced
// A <= B <= H (|B| <= n) into H2 extends to B.
struct PrecedesResult {
    bool yes = false;
    std::optional<Structure> missing_member;          // age(H2) member not embeddable in H
    std::optional<Structure> witness_sub;             // A
    std::optional<Structure> witness_super;           // B
    std::optional<PartialMap> witness_map;            // f: A -> H2 without extension
};

inline PrecedesResult hom_precedes(const Structure& H, const Structure& H2, int n,
                                   const Budget& budget = Budget::default_budget()) {
    detail::require_same_signature(H, H2, "hom_precedes");
    PrecedesResult result;
    for (const Structure& M : age(H2, n, budget)) {
        if (!search_map(M, H, SearchMode::Embedding, budget).found()) {
            result.missing_member = M;
            return result;
        }
    }
    // Enumerate induced pairs A <= B <= H with |B| <= n.
    std::vector<int> super;
    std::function<bool(int)> outer = [&](int next) -> bool {
        if (!super.empty()) {
            Structure B = induced_substructure_idx(H, super);
            std::vector<std::size_t> positions; // indices into B's carrier
            std::vector<int> sub;
            std::function<bool(std::size_t)> inner = [&](std::size_t from) -> bool {
                if (!sub.empty() && sub.size() < super.size()) {
                    Structure A = induced_substructure_idx(B, sub);
                    for (const PartialMap& f : enumerate_maps(A, H2, SearchMode::Hom, budget)) {
                        std::vector<int> seed(static_cast<std::size_t>(B.size()), -1);
                        for (std::size_t i = 0; i < sub.size(); ++i)
                            seed[static_cast<std::size_t>(sub[i])] = f.image_of(static_cast<int>(i));
                        PartialMap seed_map(std::make_shared<Structure>(B),
                                            std::make_shared<Structure>(H2), seed);
                        if (!search_map(B, H2, SearchMode::Hom, seed_map, budget).found()) {
                            result.witness_sub = A;
                            result.witness_super = B;
                            result.witness_map = f;
                            return false;
                        }
                    }
                }
                for (std::size_t p = from; p < static_cast<std::size_t>(B.size()); ++p) {
                    sub.push_back(static_cast<int>(p));
                    if (!inner(p + 1)) return false;
                    sub.pop_back();
                }
                return true;
            };
            if (!inner(0)) return false;
        }
        if (static_cast<int>(super.size()) == n) return true;
        for (int v = next; v < H.size(); ++v) {
            super.push_back(v);
            if (!outer(v + 1)) return false;
            super.pop_back();
        }
        return true;
    };
    if (!outer(0)) return result;
    result.yes = true;
    return result;
}

// Bounded CSP equivalence: do all structures with at most n elements over the
// signature map into A exactly when they map into B? Computed directly over
// the canonical universe; cross-checked against hom-equivalence whenever the
// bound covers both structures (where the two computations provably agree).
struct CspResult {
    bool equivalent = false;
    std::optional<Structure> witness; // first C in canonical order separating the CSPs
};

inline CspResult csp_equivalent(const Structure& A, const Structure& B, int n,
                                const Budget& budget = Budget::default_budget()) {
    detail::require_same_signature(A, B, "csp_equivalent");
    CspResult result;
    result.equivalent = true;
    for (const Structure& C : enumerate_all_structures(A.signature(), n, budget)) {
        bool to_a = search_map(C, A, SearchMode::Hom, budget).found();
        bool to_b = search_map(C, B, SearchMode::Hom, budget).found();
        if (to_a != to_b) {
            result.equivalent = false;
            result.witness = C;
            break;
        }
    }
    if (n >= std::max(A.size(), B.size())) {
        // With both structures inside the bound the two computations must
        // coincide: each structure itself is a candidate instance.
        bool criterion = hom_equivalent(A, B, budget);
        if (criterion != result.equivalent)
            throw invariant_error("csp_equivalent: direct answer and hom-equivalence disagree "
                                  "although the bound covers both structures");
    }
    return result;
}

} // namespace finrel
