#pragma once

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "finrel/ages.hpp"
#include "finrel/canonical.hpp"
#include "finrel/class_oracle.hpp"
#include "finrel/cores.hpp"
#include "finrel/homsearch.hpp"
#include "finrel/pairing.hpp"

namespace finrel {

// A canonical pair A <= B: B is a class member, A the substructure induced by
// `sub`. One representative per isomorphism class of pairs.
struct InducedPair {
    Structure B;
    std::vector<int> sub;
    Structure A;
};

namespace detail {

// Dedup key for pairs: the canonical code of B with the substructure marked
// by an auxiliary unary relation.
inline std::string pair_code(const Structure& B, const std::vector<int>& sub,
                             const Budget& budget) {
    std::string marker = "sub";
    while (B.signature().index_of(marker) >= 0) marker += "x";
    std::vector<RelationSymbol> symbols = B.signature().relations();
    symbols.push_back({marker, 1});
    Signature marked_sig(symbols);
    std::vector<std::vector<Tuple>> contents(static_cast<std::size_t>(marked_sig.size()));
    for (int r = 0; r < marked_sig.size(); ++r) {
        int old = B.signature().index_of(marked_sig.at(r).name);
        if (marked_sig.at(r).name == marker) {
            for (int v : sub) contents[static_cast<std::size_t>(r)].push_back({v});
        } else {
            contents[static_cast<std::size_t>(r)] = B.tuples(old);
        }
    }
    Structure marked(marked_sig, B.elements(), std::move(contents));
    return canonical_code(marked, budget);
}

} // namespace detail

// Representatives of all pairs A <= B with B a member of the class of at most
// n elements, one per isomorphism class of pairs, in deterministic order.
inline std::vector<InducedPair> pair_catalog(const ClassOracle& oracle, int n,
                                             const Budget& budget = Budget::default_budget()) {
    std::vector<InducedPair> pairs;
    std::set<std::string> seen;
    for (const Structure& B : oracle.enumerate_up_to(n, budget)) {
        std::vector<int> subset;
        std::function<void(int)> rec = [&](int next) {
            if (!subset.empty()) {
                if (seen.insert(detail::pair_code(B, subset, budget)).second)
                    pairs.push_back({B, subset, induced_substructure_idx(B, subset)});
            }
            for (int v = next; v < B.size(); ++v) {
                subset.push_back(v);
                rec(v + 1);
                subset.pop_back();
            }
        };
        rec(0);
    }
    return pairs;
}

enum class LimitMode { Hap, Ap };

inline std::string to_string(LimitMode m) { return m == LimitMode::Hap ? "hap" : "ap"; }

// One scheduled triple (A, B, f): pair index into the catalog plus a map
// f: A -> H_listed, enumerated when an even stage is reached and processed at
// the stage the pairing function assigns.
struct LimitTask {
    int pair_index = -1;
    PartialMap f;
    bool processed = false;
    int processed_stage = -1;
    std::optional<PartialMap> g; // B -> H_{processed_stage + 1} extending f
};

struct LogLine {
    int stage = 0;
    std::string action; // amalgam | joint-embed
    int size = 0;
    std::string task; // triple:<i>:<j> | rep:<r>

    std::string to_string() const {
        std::ostringstream out;
        out << "stage=" << stage << " action=" << action << " size=" << size << " task=" << task;
        return out.str();
    }
};

// The whole construction state: the chain of stages (each a literal induced
// substructure of the next), the pair catalog, the per-even-stage triple
// lists, and the replayable log.
struct ChainState {
    ClassOracle oracle;
    LimitMode mode = LimitMode::Hap;
    int seed_bound = 0;
    std::vector<Structure> stages;
    std::vector<Structure> reps;
    std::vector<InducedPair> pairs;
    std::vector<std::vector<LimitTask>> listed; // indexed by stage; filled at even stages
    std::vector<LogLine> log;

    std::string log_text() const {
        std::ostringstream out;
        for (const auto& line : log) out << line.to_string() << "\n";
        return out.str();
    }
};

struct LimitResult {
    Structure limit;
    ChainState state;
};

namespace detail {

// Renames the witness C so that H becomes a literal induced prefix: elements
// of img(g1) keep H's names and order, fresh elements get stage-tagged names.
struct RelabeledExtension {
    Structure next;
    std::vector<int> new_index; // C index -> next index
};

inline RelabeledExtension relabel_extension(const Structure& H, const Structure& C,
                                            const PartialMap& g1, int stage) {
    std::vector<int> new_index(static_cast<std::size_t>(C.size()), -1);
    std::vector<std::string> names(static_cast<std::size_t>(C.size()));
    for (int h = 0; h < H.size(); ++h) {
        new_index[static_cast<std::size_t>(g1.image_of(h))] = h;
        names[static_cast<std::size_t>(h)] = H.element(h);
    }
    int next_slot = H.size();
    int fresh = 0;
    for (int c = 0; c < C.size(); ++c) {
        if (new_index[static_cast<std::size_t>(c)] >= 0) continue;
        std::string name = "n" + std::to_string(stage) + "_" + std::to_string(fresh++);
        while (std::find(names.begin(), names.begin() + next_slot, name) !=
                   names.begin() + next_slot ||
               H.element_index(name) >= 0)
            name += "x";
        new_index[static_cast<std::size_t>(c)] = next_slot;
        names[static_cast<std::size_t>(next_slot)] = name;
        ++next_slot;
    }
    std::vector<std::vector<Tuple>> contents(static_cast<std::size_t>(C.signature().size()));
    for (int r = 0; r < C.signature().size(); ++r)
        for (const Tuple& t : C.tuples(r)) {
            Tuple mapped;
            for (int v : t) mapped.push_back(new_index[static_cast<std::size_t>(v)]);
            contents[static_cast<std::size_t>(r)].push_back(std::move(mapped));
        }
    return {Structure(C.signature(), std::move(names), std::move(contents)), std::move(new_index)};
}

inline void list_stage_tasks(ChainState& cs, int stage, const Budget& budget) {
    const Structure& H = cs.stages[static_cast<std::size_t>(stage)];
    auto& list = cs.listed[static_cast<std::size_t>(stage)];
    const SearchMode task_mode = cs.mode == LimitMode::Hap ? SearchMode::Hom
                                                           : SearchMode::Embedding;
    for (std::size_t p = 0; p < cs.pairs.size(); ++p)
        for (const PartialMap& f : enumerate_maps(cs.pairs[p].A, H, task_mode, budget))
            list.push_back(LimitTask{static_cast<int>(p), f, false, -1, std::nullopt});
}

} // namespace detail

// The chain construction: alternates amalgamation steps (discharging the
// scheduled triple, extending the stage inside the class) with joint-embedding
// steps that insert the next canonical representative. Aborts with a
// construction_error when a step's bounded amalgam search is inconclusive.
inline LimitResult build_limit(const ClassOracle& oracle, int steps, LimitMode mode,
                               int seed_bound, const Budget& budget = Budget::default_budget()) {
    if (steps < 1) throw precondition_error("build_limit: need at least one step");
    if (seed_bound < 1) throw precondition_error("build_limit: seed bound must be positive");

    // The class must not demonstrably lack the required properties.
    for (ClassProperty prop : mode == LimitMode::Hap
                                  ? std::vector<ClassProperty>{ClassProperty::HP, ClassProperty::JEP,
                                                               ClassProperty::HAP}
                                  : std::vector<ClassProperty>{ClassProperty::HP, ClassProperty::JEP,
                                                               ClassProperty::AP}) {
        PropertyVerdict v = check_class_property(oracle, prop, seed_bound, 2 * seed_bound, budget);
        if (v.fails())
            throw precondition_error("build_limit: class fails " + to_string(prop) +
                                     " at bound " + std::to_string(seed_bound));
    }

    ChainState cs;
    cs.oracle = oracle;
    cs.mode = mode;
    cs.seed_bound = seed_bound;
    cs.reps = oracle.enumerate_up_to(seed_bound, budget);
    if (cs.reps.empty()) throw precondition_error("build_limit: class has no members in bound");
    cs.pairs = pair_catalog(oracle, seed_bound, budget);
    cs.stages.push_back(cs.reps[0]);
    cs.listed.resize(static_cast<std::size_t>(steps) + 1);
    cs.log.push_back({0, "joint-embed", cs.stages[0].size(), "rep:0"});
    detail::list_stage_tasks(cs, 0, budget);

    std::size_t next_rep = 1;
    for (int k = 0; k < steps; ++k) {
        const Structure& H = cs.stages.back();
        Structure next = H;
        std::string task_label;
        std::string action;

        if (k % 2 == 0) {
            // Step 1: discharge the triple scheduled for this even stage.
            action = "amalgam";
            auto [i, j] = unpair(static_cast<std::uint64_t>(k));
            task_label = "triple:" + std::to_string(i) + ":" + std::to_string(j);
            if (i < cs.listed.size() && j < cs.listed[static_cast<std::size_t>(i)].size()) {
                LimitTask& task = cs.listed[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
                if (task.processed)
                    throw invariant_error("build_limit: triple scheduled twice");
                const InducedPair& pair = cs.pairs[static_cast<std::size_t>(task.pair_index)];
                // f maps A into H_i, a literal induced prefix of H.
                SquareConfig cfg;
                cfg.A = pair.A;
                cfg.B1 = H;
                cfg.B2 = pair.B;
                std::vector<int> f1(static_cast<std::size_t>(pair.A.size()));
                for (int a = 0; a < pair.A.size(); ++a) f1[static_cast<std::size_t>(a)] = task.f.image_of(a);
                cfg.f1 = PartialMap(std::make_shared<Structure>(pair.A), std::make_shared<Structure>(H),
                                    f1);
                std::vector<int> f2(static_cast<std::size_t>(pair.A.size()));
                for (std::size_t a = 0; a < pair.sub.size(); ++a) f2[a] = pair.sub[a];
                cfg.f2 = PartialMap(std::make_shared<Structure>(pair.A),
                                    std::make_shared<Structure>(pair.B), f2);
                cfg.g2_mode = mode == LimitMode::Hap ? SearchMode::Hom : SearchMode::Embedding;
                int m = H.size() + pair.B.size() - pair.A.size() + 2;
                auto found = find_square_witness(cfg, oracle, m, budget);
                if (!found.witness)
                    throw construction_error("build_limit: blocked triple " + task_label +
                                             " at stage " + std::to_string(k));
                auto rel = detail::relabel_extension(H, found.witness->C, found.witness->g1, k + 1);
                next = rel.next;
                std::vector<int> g(static_cast<std::size_t>(pair.B.size()));
                for (int b = 0; b < pair.B.size(); ++b)
                    g[static_cast<std::size_t>(b)] =
                        rel.new_index[static_cast<std::size_t>(found.witness->g2.image_of(b))];
                task.processed = true;
                task.processed_stage = k;
                task.g = PartialMap(std::make_shared<Structure>(pair.B),
                                    std::make_shared<Structure>(next), g);
                // The recorded extension must restrict to f on A.
                for (int a = 0; a < pair.A.size(); ++a)
                    if (task.g->image_of(pair.sub[static_cast<std::size_t>(a)]) != task.f.image_of(a))
                        throw invariant_error("build_limit: extension does not restrict to its task");
            }
        } else {
            // Step 2: joint-embed the next representative (cycling once all
            // bounded representatives are in).
            action = "joint-embed";
            std::size_t rep_index = next_rep % cs.reps.size();
            ++next_rep;
            task_label = "rep:" + std::to_string(rep_index);
            const Structure& rep = cs.reps[rep_index];
            if (!search_map(rep, H, SearchMode::Embedding, budget).found()) {
                SquareConfig cfg;
                Structure empty(oracle.signature(), {},
                                std::vector<std::vector<Tuple>>(
                                    static_cast<std::size_t>(oracle.signature().size())));
                cfg.A = empty;
                cfg.B1 = H;
                cfg.B2 = rep;
                cfg.f1 = PartialMap(empty, H);
                cfg.f2 = PartialMap(empty, rep);
                cfg.g2_mode = SearchMode::Embedding;
                int m = H.size() + rep.size() + 2;
                auto found = find_square_witness(cfg, oracle, m, budget);
                if (!found.witness)
                    throw construction_error("build_limit: blocked joint embedding " + task_label +
                                             " at stage " + std::to_string(k));
                next = detail::relabel_extension(H, found.witness->C, found.witness->g1, k + 1).next;
            }
        }

        // Stage invariants: literal prefix inclusion and class membership.
        std::vector<int> prefix;
        for (int v = 0; v < H.size(); ++v) prefix.push_back(v);
        if (induced_substructure_idx(next, prefix) != H)
            throw invariant_error("build_limit: previous stage is not an induced prefix");
        if (!oracle.member(next, budget))
            throw invariant_error("build_limit: stage left the class");

        cs.stages.push_back(next);
        cs.log.push_back({k + 1, action, next.size(), task_label});
        if ((k + 1) % 2 == 0 && k + 1 < static_cast<int>(cs.listed.size()))
            detail::list_stage_tasks(cs, k + 1, budget);
    }

    return LimitResult{cs.stages.back(), std::move(cs)};
}

// The convergence measure: every homomorphism from A into H, for every pair
// A <= B of members with |B| <= n, extends to B inside H.
struct ExtensionReport {
    bool yes = false;
    std::optional<Structure> witness_sub;   // A
    std::optional<Structure> witness_super; // B
    std::optional<PartialMap> witness_map;  // f: A -> H without extension
};

inline ExtensionReport verify_extension_property(const Structure& H, const ClassOracle& oracle,
                                                 int n,
                                                 const Budget& budget = Budget::default_budget()) {
    ExtensionReport report;
    for (const InducedPair& pair : pair_catalog(oracle, n, budget)) {
        for (const PartialMap& f : enumerate_maps(pair.A, H, SearchMode::Hom, budget)) {
            std::vector<int> seed(static_cast<std::size_t>(pair.B.size()), -1);
            for (std::size_t a = 0; a < pair.sub.size(); ++a)
                seed[static_cast<std::size_t>(pair.sub[a])] = f.image_of(static_cast<int>(a));
            PartialMap seed_map(std::make_shared<Structure>(pair.B), std::make_shared<Structure>(H),
                                seed);
            if (!search_map(pair.B, H, SearchMode::Hom, seed_map, budget).found()) {
                report.witness_sub = pair.A;
                report.witness_super = pair.B;
                report.witness_map = f;
                return report;
            }
        }
    }
    report.yes = true;
    return report;
}

// Re-checks every discharged triple of a finished construction against a
// stage (by default the final one): the recorded extension target only ever
// grows, so no discharged task may regress.
inline bool verify_discharged(const ChainState& cs, const Structure& H,
                              const Budget& budget = Budget::default_budget()) {
    for (const auto& stage_list : cs.listed)
        for (const LimitTask& task : stage_list) {
            if (!task.processed) continue;
            const InducedPair& pair = cs.pairs[static_cast<std::size_t>(task.pair_index)];
            std::vector<int> seed(static_cast<std::size_t>(pair.B.size()), -1);
            for (std::size_t a = 0; a < pair.sub.size(); ++a)
                seed[static_cast<std::size_t>(pair.sub[a])] = task.f.image_of(static_cast<int>(a));
            PartialMap seed_map(std::make_shared<Structure>(pair.B), std::make_shared<Structure>(H),
                                seed);
            if (!search_map(pair.B, H, SearchMode::Hom, seed_map, budget).found()) return false;
        }
    return true;
}

// Level data of the homomorphism tree: homomorphisms chain[t] -> B up to
// local-isomorphism equivalence of their image tuples. Two homomorphisms are
// equivalent iff their image tuples share the equality pattern and the atoms
// over tuple positions, which is exactly when a local isomorphism of B maps
// one image tuple onto the other.
struct HomClass {
    std::string key;
    PartialMap representative;
    int parent = -1; // class index one level down
};

struct HomTree {
    std::vector<std::vector<HomClass>> levels;
};

struct KonigResult {
    bool found = false;
    int empty_level = 0;            // 1-based first level with no class, when !found
    std::vector<PartialMap> branch; // exact restriction tower, one map per level
    std::vector<int> branch_classes;
    HomTree tree;
};

namespace detail {

inline std::string hom_class_key(const Structure& source, const Structure& B,
                                 const PartialMap& h) {
    std::ostringstream key;
    const int n = source.size();
    // equality pattern of the image tuple
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (h.image_of(i) == h.image_of(j)) key << i << "=" << j << ";";
    key << "|";
    // atoms over tuple positions
    for (int r = 0; r < B.signature().size(); ++r) {
        const int arity = B.signature().at(r).arity;
        Tuple pos(static_cast<std::size_t>(arity), 0);
        while (true) {
            Tuple img;
            for (int p : pos) img.push_back(h.image_of(p));
            if (B.has_tuple(r, img)) {
                key << r << ":";
                for (std::size_t q = 0; q < pos.size(); ++q) key << (q ? "," : "") << pos[q];
                key << ";";
            }
            int p = arity;
            bool done = false;
            while (true) {
                if (p == 0) { done = true; break; }
                --p;
                if (++pos[static_cast<std::size_t>(p)] < n) break;
                pos[static_cast<std::size_t>(p)] = 0;
            }
            if (done) break;
        }
    }
    return key.str();
}

} // namespace detail

// Level-wise tree search for a homomorphism tower along a nested chain of
// structures. Levels hold the equivalence classes of homomorphisms
// chain[t] -> B; a branch is realized by restricting the representative of
// the leftmost viable deepest class, which yields an exact extension tower.
inline KonigResult konig_hom(const std::vector<Structure>& chain, const Structure& B, int depth,
                             const Budget& budget = Budget::default_budget()) {
    if (depth < 1 || depth > static_cast<int>(chain.size()))
        throw precondition_error("konig_hom: depth must be between 1 and the chain length");
    for (int t = 0; t + 1 < depth; ++t) {
        const Structure& small = chain[static_cast<std::size_t>(t)];
        const Structure& big = chain[static_cast<std::size_t>(t + 1)];
        detail::require_same_signature(small, big, "konig_hom");
        std::vector<int> idx;
        for (const auto& name : small.elements()) {
            int v = big.element_index(name);
            if (v < 0)
                throw precondition_error("konig_hom: chain is not nested (element '" + name +
                                         "' missing upward)");
            idx.push_back(v);
        }
        if (induced_substructure_idx(big, idx) != small)
            throw precondition_error("konig_hom: chain members are not induced substructures");
        if (small.size() >= big.size())
            throw precondition_error("konig_hom: chain must be strictly nested");
    }
    detail::require_same_signature(chain[0], B, "konig_hom");

    KonigResult result;
    for (int t = 0; t < depth; ++t) {
        const Structure& At = chain[static_cast<std::size_t>(t)];
        auto homs = enumerate_maps(At, B, SearchMode::Hom, budget);
        if (homs.empty()) {
            result.empty_level = t + 1;
            return result;
        }
        std::vector<HomClass> level;
        std::map<std::string, int> index_of;
        for (const PartialMap& h : homs) {
            std::string key = detail::hom_class_key(At, B, h);
            int parent = -1;
            if (t > 0) {
                const Structure& prev = chain[static_cast<std::size_t>(t - 1)];
                std::vector<int> restriction(static_cast<std::size_t>(prev.size()));
                for (int v = 0; v < prev.size(); ++v)
                    restriction[static_cast<std::size_t>(v)] =
                        h.image_of(At.element_index(prev.element(v)));
                PartialMap rh(std::make_shared<Structure>(prev), h.target_ptr(), restriction);
                std::string rkey = detail::hom_class_key(prev, B, rh);
                bool located = false;
                const auto& prev_level = result.tree.levels[static_cast<std::size_t>(t - 1)];
                for (std::size_t c = 0; c < prev_level.size(); ++c)
                    if (prev_level[c].key == rkey) {
                        parent = static_cast<int>(c);
                        located = true;
                        break;
                    }
                if (!located)
                    throw invariant_error("konig_hom: restriction class missing one level down");
            }
            auto it = index_of.find(key);
            if (it == index_of.end()) {
                index_of[key] = static_cast<int>(level.size());
                level.push_back(HomClass{key, h, parent});
            } else if (level[static_cast<std::size_t>(it->second)].parent != parent) {
                throw invariant_error("konig_hom: equivalent homomorphisms restrict into "
                                      "different classes");
            }
        }
        result.tree.levels.push_back(std::move(level));
    }

    // Leftmost viable branch: each class has a unique parent chain, so pick
    // the deepest-level class whose ancestor chain is lexicographically least.
    const auto& leaves = result.tree.levels.back();
    std::vector<int> best_chain;
    int best_leaf = -1;
    for (std::size_t c = 0; c < leaves.size(); ++c) {
        std::vector<int> anc(static_cast<std::size_t>(depth), 0);
        int cur = static_cast<int>(c);
        for (int t = depth - 1; t >= 0; --t) {
            anc[static_cast<std::size_t>(t)] = cur;
            cur = result.tree.levels[static_cast<std::size_t>(t)][static_cast<std::size_t>(cur)].parent;
        }
        if (best_leaf < 0 || anc < best_chain) {
            best_chain = anc;
            best_leaf = static_cast<int>(c);
        }
    }
    result.found = true;
    result.branch_classes = best_chain;
    const PartialMap& rep = leaves[static_cast<std::size_t>(best_leaf)].representative;
    for (int t = 0; t < depth; ++t) {
        const Structure& At = chain[static_cast<std::size_t>(t)];
        std::vector<int> img(static_cast<std::size_t>(At.size()));
        const Structure& Ad = chain[static_cast<std::size_t>(depth - 1)];
        for (int v = 0; v < At.size(); ++v)
            img[static_cast<std::size_t>(v)] = rep.image_of(Ad.element_index(At.element(v)));
        result.branch.emplace_back(std::make_shared<Structure>(At), rep.target_ptr(), img);
    }
    return result;
}

// The core-approximation pipeline: take the hom-irreducible members of the
// age, check they form an amalgamation class, project the age onto them, and
// run the chain construction in AP mode. For finite input the result must be
// homomorphism-equivalent to it with age exactly the irreducibles.
struct CoreApproxReport {
    bool input_hom_homogeneous = false;
    std::vector<Structure> irreducible_members;
    PropertyVerdict hp_verdict;
    PropertyVerdict ap_verdict;
    bool age_projects_onto_irreducibles = false;
    bool hom_equivalent_to_input = false;
    bool age_matches_irreducibles = false;
};

struct CoreApproxResult {
    Structure core;
    ChainState state;
    CoreApproxReport report;
};

inline CoreApproxResult build_core_approx(const Structure& A, int steps,
                                          const Budget& budget = Budget::default_budget()) {
    CoreApproxReport report;
    report.input_hom_homogeneous = homogeneity_check(A, HomogeneityKind::Hom, budget).homogeneous;

    ClassOracle age_oracle = ClassOracle::age_of(A);
    report.irreducible_members = irreducibles(age_oracle, A.size(), budget);
    if (report.irreducible_members.empty())
        throw invariant_error("build_core_approx: no hom-irreducible members found");
    ClassOracle D = ClassOracle::explicit_list(report.irreducible_members);

    report.hp_verdict = check_class_property(D, ClassProperty::HP, A.size(), 2 * A.size(), budget);
    report.ap_verdict = check_class_property(D, ClassProperty::AP, A.size(), 2 * A.size(), budget);
    if (report.hp_verdict.fails() || report.ap_verdict.fails())
        throw construction_error("build_core_approx: irreducibles fail HP or AP");
    report.age_projects_onto_irreducibles = age_projects(age_oracle, D, A.size(), budget).yes;

    LimitResult limit = build_limit(D, steps, LimitMode::Ap, A.size(), budget);

    report.hom_equivalent_to_input = hom_equivalent(A, limit.limit, budget);
    std::set<std::string> want, got;
    for (const Structure& s : report.irreducible_members) want.insert(canonical_code(s, budget));
    for (const Structure& s : age(limit.limit, A.size(), budget)) got.insert(canonical_code(s, budget));
    report.age_matches_irreducibles = want == got;

    return CoreApproxResult{limit.limit, std::move(limit.state), std::move(report)};
}

} // namespace finrel
