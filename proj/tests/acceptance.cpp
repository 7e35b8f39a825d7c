// Acceptance suite: one pass/fail line per criterion, exit 0 iff all pass.
// Each criterion is checked at its stated bound against brute-force oracles.

#include <chrono>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "catalog.hpp"
#include "oracles.hpp"

#include "finrel/finrel.hpp"

using namespace finrel;

namespace {

struct Outcome {
    bool pass = true;
    std::string details;
};

using CriterionFn = std::function<Outcome()>;

const std::vector<SearchMode> all_modes = {SearchMode::Hom, SearchMode::Mono,
                                           SearchMode::Embedding, SearchMode::Iso};

bool is_complete_graph(const Structure& g) {
    for (int a = 0; a < g.size(); ++a)
        for (int b = 0; b < g.size(); ++b)
            if (a != b && !g.has_tuple(0, {a, b})) return false;
    return true;
}

// 1. Solver-oracle equivalence over the whole catalog, all four modes,
//    within 60 seconds.
Outcome criterion1() {
    auto start = std::chrono::steady_clock::now();
    int pairs = 0;
    for (const auto& ea : catalog::entries())
        for (const auto& eb : catalog::entries()) {
            const Structure& a = ea.structure;
            const Structure& b = eb.structure;
            if (a.signature() != b.signature()) continue;
            ++pairs;
            for (SearchMode mode : all_modes) {
                std::size_t expected = oracle::count(a, b, mode);
                if (count_maps(a, b, mode) != expected)
                    return {false, "count mismatch on " + ea.name + " -> " + eb.name};
                SearchResult r = search_map(a, b, mode);
                if (r.found() != (expected > 0))
                    return {false, "existence mismatch on " + ea.name + " -> " + eb.name};
                if (r.found() && !check_map(*r.map, mode))
                    return {false, "found map fails its own mode on " + ea.name + " -> " + eb.name};
            }
        }
    auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::steady_clock::now() - start)
                       .count();
    std::ostringstream details;
    details << pairs << " pairs x 4 modes in " << elapsed << " ms";
    if (pairs < 30 * 30 / 2) return {false, "catalog too small: " + details.str()};
    if (elapsed >= 60000) return {false, "over the 60 s budget: " + details.str()};
    return {true, details.str()};
}

// 2. Among graphs with at most 4 vertices, hom-irreducibility in the class of
//    all graphs holds exactly for the complete ones.
Outcome criterion2() {
    auto graphs = ClassOracle::all_graphs();
    int checked = 0;
    for (const Structure& g : graphs.enumerate_up_to(4)) {
        ++checked;
        bool irreducible = is_hom_irreducible(g, graphs, 5).yes;
        if (irreducible != is_complete_graph(g))
            return {false, "mismatch on a " + std::to_string(g.size()) + "-vertex graph"};
    }
    return {true, std::to_string(checked) + " graphs"};
}

// 3. Ages of homomorphism-homogeneous catalog structures never fail the HAP.
Outcome criterion3() {
    int checked = 0;
    for (const auto& e : catalog::entries()) {
        if (!homogeneity_check(e.structure, HomogeneityKind::Hom).homogeneous) continue;
        ++checked;
        auto verdict =
            check_class_property(ClassOracle::age_of(e.structure, e.name), ClassProperty::HAP, 3, 8);
        if (verdict.fails()) return {false, "HAP fails for age of " + e.name};
    }
    if (checked == 0) return {false, "no homomorphism-homogeneous catalog members found"};
    return {true, std::to_string(checked) + " homomorphism-homogeneous structures"};
}

// 4. Chain soundness of the graph limit construction.
Outcome criterion4() {
    auto graphs = ClassOracle::all_graphs();
    auto longer = build_limit(graphs, 12, LimitMode::Hap, 2);
    for (const Structure& rep : longer.state.reps)
        if (!search_map(rep, longer.limit, SearchMode::Embedding).found())
            return {false, "a 2-element representative does not embed"};
    for (const Structure& member : age(longer.limit, 3))
        if (!graphs.member(member)) return {false, "age member outside the class"};
    if (!verify_discharged(longer.state, longer.limit))
        return {false, "a discharged task regressed in the final stage"};
    // Monotone: the shorter run is a prefix and its discharged tasks stay
    // discharged inside the longer limit.
    auto shorter = build_limit(graphs, 6, LimitMode::Hap, 2);
    for (std::size_t s = 0; s < shorter.state.stages.size(); ++s)
        if (shorter.state.stages[s] != longer.state.stages[s])
            return {false, "stage prefix determinism broken"};
    if (!verify_discharged(shorter.state, longer.limit))
        return {false, "a task discharged at 6 steps regressed at 12"};
    int discharged = 0;
    for (const auto& list : longer.state.listed)
        for (const auto& task : list)
            if (task.processed) ++discharged;
    return {true, "final size " + std::to_string(longer.limit.size()) + ", " +
                      std::to_string(discharged) + " tasks discharged"};
}

// 5. Bounded CSP equivalence coincides with hom-equivalence on catalog pairs
//    with at most 4 elements at bound 4.
Outcome criterion5() {
    int pairs = 0;
    for (const auto& ea : catalog::entries())
        for (const auto& eb : catalog::entries()) {
            const Structure& a = ea.structure;
            const Structure& b = eb.structure;
            if (a.signature() != b.signature()) continue;
            if (a.size() > 4 || b.size() > 4) continue;
            ++pairs;
            if (csp_equivalent(a, b, 4).equivalent != hom_equivalent(a, b))
                return {false, "mismatch on " + ea.name + " vs " + eb.name};
        }
    return {true, std::to_string(pairs) + " pairs at bound 4"};
}

// 6. Core pipeline on homomorphism-homogeneous graphs with at most 6 vertices.
Outcome criterion6() {
    std::vector<catalog::Entry> graphs;
    for (const auto& e : catalog::entries())
        if (e.structure.signature() == graph_signature()) graphs.push_back(e);
    for (const auto& e : catalog::six_vertex_entries()) graphs.push_back(e);

    int checked = 0;
    for (const auto& e : graphs) {
        if (!homogeneity_check(e.structure, HomogeneityKind::Hom).homogeneous) continue;
        ++checked;
        Retraction r = finite_core(e.structure);
        if (!is_complete_graph(r.image)) return {false, e.name + ": core image is not complete"};
        if (!is_core(r.image).core) return {false, e.name + ": image is not a core"};
        if (!hom_equivalent(e.structure, r.image))
            return {false, e.name + ": not hom-equivalent to its core"};
        std::string code = canonical_code(r.image);
        bool inside = false;
        for (const Structure& irr :
             irreducibles(ClassOracle::age_of(e.structure, e.name), e.structure.size()))
            if (canonical_code(irr) == code) inside = true;
        if (!inside) return {false, e.name + ": image is not an irreducible age member"};
    }
    if (checked == 0) return {false, "no homomorphism-homogeneous graphs found"};
    return {true, std::to_string(checked) + " homomorphism-homogeneous graphs"};
}

// 7. Saturation lands on maximal tuples whose induced substructures are
//    hom-irreducible in the age, for all catalog tuples of arity up to 2.
Outcome criterion7() {
    int tuples = 0;
    for (const auto& e : catalog::entries()) {
        const Structure& s = e.structure;
        auto age_oracle = ClassOracle::age_of(s, e.name);
        for (int arity = 1; arity <= 2; ++arity) {
            TupleOrder order = type_classes(s, arity);
            Tuple t(static_cast<std::size_t>(arity), 0);
            while (true) {
                ++tuples;
                auto r = saturate(s, t);
                if (!order.maximal[static_cast<std::size_t>(order.class_of(r.tuple))])
                    return {false, e.name + ": saturation did not reach a maximal class"};
                if (!tuple_leq(s, t, r.tuple))
                    return {false, e.name + ": saturated tuple is not above the input"};
                if (!is_local_map(s, r.witness, SearchMode::Hom))
                    return {false, e.name + ": witness is not a local homomorphism"};
                std::vector<int> entries(r.tuple.begin(), r.tuple.end());
                Structure induced = induced_substructure_idx(s, entries);
                if (!is_hom_irreducible(induced, age_oracle, s.size()).yes)
                    return {false, e.name + ": induced substructure is reducible"};
                int p = arity;
                bool done = false;
                while (true) {
                    if (p == 0) { done = true; break; }
                    --p;
                    if (++t[static_cast<std::size_t>(p)] < s.size()) break;
                    t[static_cast<std::size_t>(p)] = 0;
                }
                if (done) break;
            }
        }
    }
    return {true, std::to_string(tuples) + " tuples saturated"};
}

// 8. The homomorphism tree finds a branch exactly when a homomorphism exists,
//    and branch maps form an exact restriction tower.
Outcome criterion8() {
    int pairs = 0;
    for (const auto& ea : catalog::entries())
        for (const auto& eb : catalog::entries()) {
            const Structure& a = ea.structure;
            const Structure& b = eb.structure;
            if (a.signature() != b.signature()) continue;
            ++pairs;
            std::vector<Structure> chain;
            std::vector<int> prefix;
            for (int v = 0; v < a.size(); ++v) {
                prefix.push_back(v);
                chain.push_back(induced_substructure_idx(a, prefix));
            }
            auto r = konig_hom(chain, b, a.size());
            bool expected = search_map(a, b, SearchMode::Hom).found();
            if (r.found != expected)
                return {false, "branch/hom mismatch on " + ea.name + " -> " + eb.name};
            if (!r.found) continue;
            if (!check_map(r.branch.back(), SearchMode::Hom))
                return {false, "final branch map is not a homomorphism"};
            for (std::size_t t = 0; t + 1 < r.branch.size(); ++t)
                for (int v = 0; v < chain[t].size(); ++v) {
                    int up = chain[t + 1].element_index(chain[t].element(v));
                    if (r.branch[t].image_of(v) != r.branch[t + 1].image_of(up))
                        return {false, "tower is not exact on " + ea.name + " -> " + eb.name};
                }
        }
    return {true, std::to_string(pairs) + " pairs with prefix filtrations"};
}

// 9. Type expansion up to the carrier size yields a homomorphism-homogeneous
//    structure with exactly the same endomorphism count, for every structure
//    with at most 4 elements (all graphs up to isomorphism plus the bounded
//    linear orders).
Outcome criterion9() {
    Budget wide;
    wide.max_expand_arity = 4;
    std::vector<Structure> inputs;
    for (const Structure& g : ClassOracle::all_graphs().enumerate_up_to(4)) inputs.push_back(g);
    for (const Structure& l : ClassOracle::linear_orders().enumerate_up_to(4)) inputs.push_back(l);
    for (const Structure& a : inputs) {
        Structure ex = expand_by_types(a, a.size(), wide);
        if (count_maps(a, a, SearchMode::Hom) != count_maps(ex, ex, SearchMode::Hom))
            return {false, "endomorphism count changed on a " + std::to_string(a.size()) +
                               "-element structure"};
        if (!homogeneity_check(ex, HomogeneityKind::Hom).homogeneous)
            return {false, "expansion is not homomorphism-homogeneous on a " +
                               std::to_string(a.size()) + "-element structure"};
    }
    return {true, std::to_string(inputs.size()) + " structures expanded"};
}

// 10. The schedule is a bijection onto the first 10,000 even naturals and
//     never undercuts its listing stage.
Outcome criterion10() {
    std::set<std::pair<std::uint64_t, std::uint64_t>> seen;
    for (std::uint64_t value = 0; value < 20000; value += 2) {
        auto [i, j] = unpair(value);
        if (i % 2 != 0) return {false, "unpair produced an odd listing stage"};
        if (pairing(i, j) != value) return {false, "round trip failed at " + std::to_string(value)};
        if (value < i) return {false, "schedule undercuts its listing stage"};
        if (!seen.insert({i, j}).second)
            return {false, "pair hit twice at " + std::to_string(value)};
    }
    return {true, "10000 even values round-tripped"};
}

} // namespace

int main() {
    std::vector<std::pair<std::string, CriterionFn>> criteria = {
        {"solver-oracle equivalence on the catalog", criterion1},
        {"graph irreducibility law (complete graphs only)", criterion2},
        {"HAP necessity for homomorphism-homogeneous ages", criterion3},
        {"chain soundness of the graph limit", criterion4},
        {"bounded CSP equivalence equals hom-equivalence", criterion5},
        {"core pipeline on homomorphism-homogeneous graphs", criterion6},
        {"saturation reaches hom-irreducible maximal tuples", criterion7},
        {"homomorphism tree equivalence and exact towers", criterion8},
        {"type expansion forces homogeneity, endomorphisms intact", criterion9},
        {"schedule bijectivity and stage dominance", criterion10},
    };

    bool all_pass = true;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome outcome;
        try {
            outcome = criteria[i].second();
        } catch (const std::exception& e) {
            outcome = {false, std::string("exception: ") + e.what()};
        }
        all_pass = all_pass && outcome.pass;
        std::cout << (outcome.pass ? "[PASS]" : "[FAIL]") << " " << (i + 1) << " "
                  << criteria[i].first;
        if (!outcome.details.empty()) std::cout << " - " << outcome.details;
        std::cout << "\n";
    }
    std::cout << (all_pass ? "acceptance: all criteria passed" : "acceptance: FAILURES above")
              << "\n";
    return all_pass ? 0 : 1;
}
