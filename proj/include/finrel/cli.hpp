#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "finrel/ages.hpp"
#include "finrel/canonical.hpp"
#include "finrel/class_oracle.hpp"
#include "finrel/cores.hpp"
#include "finrel/homsearch.hpp"
#include "finrel/limits.hpp"
#include "finrel/structures.hpp"
#include "finrel/text_format.hpp"

namespace finrel::cli {

// Exit codes: 0 holds/found, 1 fails/not found (witness in the report),
// 2 inconclusive or resource exhaustion, 64 usage, 65 parse error,
// 70 internal invariant violation.
struct CliResult {
    int code = 0;
    std::string report;
};

namespace detail {

// Deterministic two-mode report sink. Text mode is human oriented; machine
// mode emits one key=value record per line. Witness structures are emitted in
// the structure file format (text) or as key=value lines carrying the same
// file-format fragments (machine), so they can be re-fed to the tool.
class Report {
public:
    explicit Report(bool machine) : machine_(machine) {}

    void kv(const std::string& key, const std::string& value) {
        if (machine_)
            out_ << key << "=" << value << "\n";
        else if (value.empty())
            out_ << key << ":" << "\n";
        else
            out_ << key << ": " << value << "\n";
    }

    void kv(const std::string& key, std::uint64_t value) { kv(key, std::to_string(value)); }
    void kv(const std::string& key, int value) { kv(key, std::to_string(value)); }

    void map(const std::string& key, const PartialMap& m) {
        std::ostringstream s;
        bool first = true;
        for (int v = 0; v < m.source().size(); ++v) {
            if (!m.defined(v)) continue;
            if (!first) s << ",";
            first = false;
            s << m.source().element(v) << ":" << m.target().element(m.image_of(v));
        }
        kv(key, s.str());
    }

    void structure(const std::string& name, const Structure& s) {
        if (machine_) {
            out_ << name << ".signature=" << s.signature().to_string() << "\n";
            std::ostringstream elems;
            for (int v = 0; v < s.size(); ++v) elems << (v ? " " : "") << s.element(v);
            out_ << name << ".elements=" << elems.str() << "\n";
            for (int r = 0; r < s.signature().size(); ++r) {
                out_ << name << "." << s.signature().at(r).name << "=";
                bool first = true;
                for (const Tuple& t : s.tuples(r)) {
                    if (!first) out_ << " ";
                    first = false;
                    out_ << "(";
                    for (std::size_t i = 0; i < t.size(); ++i)
                        out_ << (i ? "," : "") << s.element(t[i]);
                    out_ << ")";
                }
                out_ << "\n";
            }
        } else {
            out_ << "\n" << print_structure(name, s);
        }
    }

    void raw(const std::string& text) { out_ << text; }

    std::string str() const { return out_.str(); }

private:
    bool machine_;
    std::ostringstream out_;
};

struct StructureRef {
    std::string path;
    std::string name; // empty: the file's only structure
};

inline StructureRef split_ref(const std::string& ref) {
    auto hash = ref.find('#');
    if (hash == std::string::npos) return {ref, ""};
    return {ref.substr(0, hash), ref.substr(hash + 1)};
}

inline Structure load_structure(const std::string& ref, const Budget& budget) {
    StructureRef r = split_ref(ref);
    StructureFile file = parse_structures_file(r.path, budget);
    if (r.name.empty()) {
        if (file.structures.size() != 1)
            throw parse_error(r.path + ": file holds " + std::to_string(file.structures.size()) +
                              " structures; use <file>#<name>");
        return file.structures[0].second;
    }
    if (!file.has(r.name)) throw parse_error(r.path + ": no structure named '" + r.name + "'");
    return file.get(r.name);
}

inline ClassOracle load_class(const std::string& spec, const Budget& budget) {
    if (spec == "all-graphs") return ClassOracle::all_graphs();
    if (spec == "all-digraphs") return ClassOracle::all_digraphs();
    if (spec == "linear-orders") return ClassOracle::linear_orders();
    auto colon = spec.find(':');
    if (colon == std::string::npos)
        throw precondition_error("unknown class spec '" + spec + "'");
    std::string kind = spec.substr(0, colon);
    std::string rest = spec.substr(colon + 1);
    if (kind == "age-of") {
        StructureRef r = split_ref(rest);
        return ClassOracle::age_of(load_structure(rest, budget),
                                   r.name.empty() ? rest : r.name);
    }
    if (kind == "forbidden" || kind == "explicit") {
        StructureFile file = parse_structures_file(rest, budget);
        std::vector<Structure> list;
        for (auto& [nm, s] : file.structures) list.push_back(s);
        return kind == "forbidden" ? ClassOracle::forbidden(std::move(list))
                                   : ClassOracle::explicit_list(std::move(list));
    }
    throw precondition_error("unknown class spec '" + spec + "'");
}

inline std::vector<std::pair<std::string, std::string>> parse_seed(const std::string& text) {
    std::vector<std::pair<std::string, std::string>> pairs;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, ',')) {
        auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 == item.size())
            throw precondition_error("bad seed entry '" + item + "', expected key=value");
        pairs.emplace_back(item.substr(0, eq), item.substr(eq + 1));
    }
    return pairs;
}

inline SearchMode parse_mode(const std::string& mode) {
    if (mode == "hom") return SearchMode::Hom;
    if (mode == "mono") return SearchMode::Mono;
    if (mode == "embed") return SearchMode::Embedding;
    if (mode == "iso") return SearchMode::Iso;
    throw precondition_error("unknown mode '" + mode + "'");
}

inline void report_square_config(Report& rep, const std::string& prefix, const SquareConfig& cfg) {
    if (cfg.A.size() > 0) rep.structure(prefix + "_A", cfg.A);
    rep.structure(prefix + "_B1", cfg.B1);
    rep.structure(prefix + "_B2", cfg.B2);
    if (cfg.f1 && cfg.A.size() > 0) rep.map(prefix + "_f1", *cfg.f1);
    if (cfg.f2 && cfg.A.size() > 0) rep.map(prefix + "_f2", *cfg.f2);
}

} // namespace detail

// Parses and runs one command; never lets exceptions escape.
inline CliResult run(const std::vector<std::string>& args) {
    using detail::Report;

    CLI::App app{"finite relational structures toolbox"};
    app.require_subcommand(1);

    std::string format = "text";
    std::string output_path;
    Budget budget;
    app.add_option("--format", format)->check(CLI::IsMember({"text", "machine"}));
    app.add_option("--output", output_path);
    app.add_option("--element-budget", budget.max_elements);
    app.add_option("--node-budget", budget.max_nodes);
    app.add_option("--max-upsets", budget.max_upsets);

    // hom find|count
    auto* hom = app.add_subcommand("hom", "map search between two structures");
    hom->require_subcommand(1);
    std::string hom_a, hom_b, hom_mode = "hom", hom_seed;
    auto* hom_find = hom->add_subcommand("find", "search for one map");
    auto* hom_count = hom->add_subcommand("count", "count all maps");
    for (auto* cmd : {hom_find, hom_count}) {
        cmd->add_option("A", hom_a)->required();
        cmd->add_option("B", hom_b)->required();
        cmd->add_option("--mode", hom_mode)->check(CLI::IsMember({"hom", "mono", "embed", "iso"}));
    }
    hom_find->add_option("--seed", hom_seed);

    // homog check
    auto* homog = app.add_subcommand("homog", "homogeneity checks");
    homog->require_subcommand(1);
    auto* homog_check = homog->add_subcommand("check", "test homogeneity");
    std::string homog_a, homog_kind = "hom";
    homog_check->add_option("A", homog_a)->required();
    homog_check->add_option("--kind", homog_kind)->check(CLI::IsMember({"hom", "iso"}));

    // age
    auto* age_cmd = app.add_subcommand("age", "age of a structure up to a size bound");
    std::string age_a;
    int age_max = 3;
    age_cmd->add_option("A", age_a)->required();
    age_cmd->add_option("--max", age_max)->required();

    // core / core check
    auto* core_cmd = app.add_subcommand("core", "finite core of a structure");
    auto* core_check = core_cmd->add_subcommand("check", "is the structure a core?");
    std::string core_a, core_check_a;
    core_cmd->add_option("A", core_a);
    core_check->add_option("A", core_check_a)->required();

    // irr
    auto* irr_cmd = app.add_subcommand("irr", "hom-irreducibility inside a class");
    std::string irr_a, irr_class;
    int irr_bound = 3;
    irr_cmd->add_option("A", irr_a)->required();
    irr_cmd->add_option("--class", irr_class)->required();
    irr_cmd->add_option("--bound", irr_bound)->required();

    // saturate
    auto* sat_cmd = app.add_subcommand("saturate", "climb a tuple to a maximal one");
    std::string sat_a, sat_tuple;
    sat_cmd->add_option("A", sat_a)->required();
    sat_cmd->add_option("--tuple", sat_tuple)->required();

    // types
    auto* types_cmd = app.add_subcommand("types", "tuple type classes of a structure");
    std::string types_a;
    int types_arity = 1;
    types_cmd->add_option("A", types_a)->required();
    types_cmd->add_option("--arity", types_arity)->required();

    // expand
    auto* expand_cmd = app.add_subcommand("expand", "expansion by type relations");
    std::string expand_a;
    int expand_arity = 1;
    expand_cmd->add_option("A", expand_a)->required();
    expand_cmd->add_option("--arity", expand_arity)->required();

    // class check
    auto* class_cmd = app.add_subcommand("class", "class property checks");
    class_cmd->require_subcommand(1);
    auto* class_check = class_cmd->add_subcommand("check", "verify HP/JEP/AP/HAP");
    std::string class_spec, class_prop;
    int class_size = 2, class_amalgam = 4;
    class_check->add_option("spec", class_spec)->required();
    class_check->add_option("--prop", class_prop)
        ->required()
        ->check(CLI::IsMember({"hp", "jep", "ap", "hap"}));
    class_check->add_option("--size", class_size)->required();
    class_check->add_option("--amalgam", class_amalgam)->required();

    // project
    auto* project_cmd = app.add_subcommand("project", "class projection");
    std::string project_a, project_b;
    int project_size = 3;
    project_cmd->add_option("classA", project_a)->required();
    project_cmd->add_option("classB", project_b)->required();
    project_cmd->add_option("--size", project_size)->required();

    // precedes
    auto* precedes_cmd = app.add_subcommand("precedes", "bounded homomorphism order");
    std::string precedes_h, precedes_h2;
    int precedes_size = 3;
    precedes_cmd->add_option("H", precedes_h)->required();
    precedes_cmd->add_option("H2", precedes_h2)->required();
    precedes_cmd->add_option("--size", precedes_size)->required();

    // cspeq
    auto* cspeq_cmd = app.add_subcommand("cspeq", "bounded CSP equivalence");
    std::string cspeq_a, cspeq_b;
    int cspeq_size = 3;
    cspeq_cmd->add_option("A", cspeq_a)->required();
    cspeq_cmd->add_option("B", cspeq_b)->required();
    cspeq_cmd->add_option("--size", cspeq_size)->required();

    // limit build | limit verify
    auto* limit_cmd = app.add_subcommand("limit", "chain constructions");
    limit_cmd->require_subcommand(1);
    auto* limit_build = limit_cmd->add_subcommand("build", "build a bounded chain limit");
    std::string lb_spec, lb_mode = "hap", lb_log;
    int lb_steps = 4, lb_seed = 2;
    limit_build->add_option("spec", lb_spec)->required();
    limit_build->add_option("--steps", lb_steps)->required();
    limit_build->add_option("--mode", lb_mode)->check(CLI::IsMember({"hap", "ap"}));
    limit_build->add_option("--seed-bound", lb_seed)->required();
    limit_build->add_option("--log", lb_log);
    auto* limit_verify = limit_cmd->add_subcommand("verify", "extension property of a structure");
    std::string lv_h, lv_spec;
    int lv_size = 2;
    limit_verify->add_option("H", lv_h)->required();
    limit_verify->add_option("spec", lv_spec)->required();
    limit_verify->add_option("--size", lv_size)->required();

    // konig
    auto* konig_cmd = app.add_subcommand("konig", "level-wise homomorphism tree");
    std::string konig_chain, konig_b;
    int konig_depth = 1;
    konig_cmd->add_option("chain", konig_chain)->required();
    konig_cmd->add_option("B", konig_b)->required();
    konig_cmd->add_option("--depth", konig_depth)->required();

    // coreapprox
    auto* coreapprox_cmd = app.add_subcommand("coreapprox", "core approximation pipeline");
    std::string ca_a;
    int ca_steps = 4;
    coreapprox_cmd->add_option("A", ca_a)->required();
    coreapprox_cmd->add_option("--steps", ca_steps)->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        std::ostringstream msg;
        msg << "usage error: " << e.what() << "\n";
        return {64, msg.str()};
    }

    Report rep(format == "machine");
    int code = 0;
    try {
        if (hom_find->parsed() || hom_count->parsed()) {
            Structure A = detail::load_structure(hom_a, budget);
            Structure B = detail::load_structure(hom_b, budget);
            SearchMode mode = detail::parse_mode(hom_mode);
            rep.kv("mode", hom_mode);
            if (hom_count->parsed()) {
                std::uint64_t n = count_maps(A, B, mode, budget);
                rep.kv("count", n);
                code = n > 0 ? 0 : 1;
            } else {
                PartialMap seed(A, B, hom_seed.empty()
                                           ? std::vector<std::pair<std::string, std::string>>{}
                                           : detail::parse_seed(hom_seed));
                SearchResult r = search_map(A, B, mode, seed, budget);
                rep.kv("result", r.found() ? "found" : "exhausted");
                rep.kv("nodes", r.nodes);
                if (r.found()) rep.map("map", *r.map);
                code = r.found() ? 0 : 1;
            }
        } else if (homog_check->parsed()) {
            Structure A = detail::load_structure(homog_a, budget);
            HomogeneityKind kind = homog_kind == "hom" ? HomogeneityKind::Hom : HomogeneityKind::Iso;
            auto r = homogeneity_check(A, kind, budget);
            rep.kv("kind", homog_kind);
            rep.kv("result", r.homogeneous ? "yes" : "no");
            if (!r.homogeneous) rep.map("counterexample", *r.counterexample);
            code = r.homogeneous ? 0 : 1;
        } else if (age_cmd->parsed()) {
            Structure A = detail::load_structure(age_a, budget);
            auto members = age(A, age_max, budget);
            rep.kv("count", static_cast<std::uint64_t>(members.size()));
            for (std::size_t i = 0; i < members.size(); ++i)
                rep.structure("m" + std::to_string(i), members[i]);
        } else if (core_check->parsed()) {
            Structure A = detail::load_structure(core_check_a, budget);
            auto r = is_core(A, budget);
            rep.kv("result", r.core ? "yes" : "no");
            if (!r.core) rep.map("witness", *r.witness);
            code = r.core ? 0 : 1;
        } else if (core_cmd->parsed()) {
            if (core_a.empty()) return {64, "usage error: core needs a structure reference\n"};
            Structure A = detail::load_structure(core_a, budget);
            Retraction r = finite_core(A, budget);
            rep.kv("size", r.image.size());
            rep.map("retraction", r.map);
            rep.structure("image", r.image);
        } else if (irr_cmd->parsed()) {
            Structure A = detail::load_structure(irr_a, budget);
            ClassOracle oracle = detail::load_class(irr_class, budget);
            auto r = is_hom_irreducible(A, oracle, irr_bound, budget);
            rep.kv("result", r.yes ? "yes" : "no");
            if (!r.yes) {
                rep.map("witness", *r.witness);
                rep.structure("witness_target", r.witness->target());
            }
            code = r.yes ? 0 : 1;
        } else if (sat_cmd->parsed()) {
            Structure A = detail::load_structure(sat_a, budget);
            Tuple t;
            std::istringstream in(sat_tuple);
            std::string item;
            while (std::getline(in, item, ',')) {
                int v = A.element_index(item);
                if (v < 0) throw precondition_error("unknown element '" + item + "' in --tuple");
                t.push_back(v);
            }
            auto r = saturate(A, t, budget);
            std::ostringstream max;
            max << "(";
            for (std::size_t i = 0; i < r.tuple.size(); ++i)
                max << (i ? "," : "") << A.element(r.tuple[i]);
            max << ")";
            rep.kv("maximal", max.str());
            rep.kv("class", r.class_index);
            rep.map("witness", r.witness);
        } else if (types_cmd->parsed()) {
            Structure A = detail::load_structure(types_a, budget);
            TupleOrder order = type_classes(A, types_arity, budget);
            rep.kv("classes", order.class_count());
            rep.kv("upsets", order.upset_count);
            for (int c = 0; c < order.class_count(); ++c) {
                std::ostringstream line;
                for (std::size_t i = 0; i < order.classes[static_cast<std::size_t>(c)].size(); ++i) {
                    const Tuple& t = order.classes[static_cast<std::size_t>(c)][i];
                    line << (i ? " " : "") << "(";
                    for (std::size_t j = 0; j < t.size(); ++j)
                        line << (j ? "," : "") << A.element(t[j]);
                    line << ")";
                }
                if (order.maximal[static_cast<std::size_t>(c)]) line << " maximal";
                rep.kv("class" + std::to_string(c), line.str());
            }
            std::ostringstream rels;
            bool first = true;
            for (int c = 0; c < order.class_count(); ++c)
                for (int d = 0; d < order.class_count(); ++d)
                    if (c != d && order.leq[static_cast<std::size_t>(c)][static_cast<std::size_t>(d)]) {
                        rels << (first ? "" : " ") << c << "<" << d;
                        first = false;
                    }
            rep.kv("order", rels.str());
        } else if (expand_cmd->parsed()) {
            Structure A = detail::load_structure(expand_a, budget);
            Budget b = budget;
            if (expand_arity > b.max_expand_arity) b.max_expand_arity = expand_arity;
            Structure ex = expand_by_types(A, expand_arity, b);
            rep.kv("relations", ex.signature().size());
            rep.structure("expanded", ex);
        } else if (class_check->parsed()) {
            ClassOracle oracle = detail::load_class(class_spec, budget);
            ClassProperty prop = class_prop == "hp"    ? ClassProperty::HP
                                 : class_prop == "jep" ? ClassProperty::JEP
                                 : class_prop == "ap"  ? ClassProperty::AP
                                                       : ClassProperty::HAP;
            auto verdict = check_class_property(oracle, prop, class_size, class_amalgam, budget);
            rep.kv("class", oracle.description());
            rep.kv("property", class_prop);
            switch (verdict.outcome) {
                case PropertyVerdict::Outcome::Holds:
                    rep.kv("outcome", "holds");
                    code = 0;
                    break;
                case PropertyVerdict::Outcome::Fails:
                    rep.kv("outcome", "fails");
                    code = 1;
                    break;
                case PropertyVerdict::Outcome::Inconclusive:
                    rep.kv("outcome", "inconclusive");
                    code = 2;
                    break;
            }
            if (verdict.hp_member) {
                rep.structure("member", *verdict.hp_member);
                rep.structure("substructure", *verdict.hp_substructure);
            }
            if (!verdict.blocked.empty()) {
                rep.kv("blocked", static_cast<std::uint64_t>(verdict.blocked.size()));
                detail::report_square_config(rep, "blocked", verdict.blocked.front());
            }
        } else if (project_cmd->parsed()) {
            ClassOracle ca = detail::load_class(project_a, budget);
            ClassOracle cb = detail::load_class(project_b, budget);
            auto r = age_projects(ca, cb, project_size, budget);
            rep.kv("result", r.yes ? "yes" : "no");
            if (!r.yes) rep.structure("witness", *r.witness);
            code = r.yes ? 0 : 1;
        } else if (precedes_cmd->parsed()) {
            Structure H = detail::load_structure(precedes_h, budget);
            Structure H2 = detail::load_structure(precedes_h2, budget);
            auto r = hom_precedes(H, H2, precedes_size, budget);
            rep.kv("result", r.yes ? "yes" : "no");
            if (r.missing_member) rep.structure("missing_member", *r.missing_member);
            if (r.witness_map) {
                rep.structure("witness_sub", *r.witness_sub);
                rep.structure("witness_super", *r.witness_super);
                rep.map("witness_map", *r.witness_map);
            }
            code = r.yes ? 0 : 1;
        } else if (cspeq_cmd->parsed()) {
            Structure A = detail::load_structure(cspeq_a, budget);
            Structure B = detail::load_structure(cspeq_b, budget);
            auto r = csp_equivalent(A, B, cspeq_size, budget);
            rep.kv("result", r.equivalent ? "yes" : "no");
            if (!r.equivalent) rep.structure("witness", *r.witness);
            code = r.equivalent ? 0 : 1;
        } else if (limit_build->parsed()) {
            ClassOracle oracle = detail::load_class(lb_spec, budget);
            LimitMode mode = lb_mode == "hap" ? LimitMode::Hap : LimitMode::Ap;
            auto result = build_limit(oracle, lb_steps, mode, lb_seed, budget);
            rep.kv("stages", static_cast<std::uint64_t>(result.state.stages.size()));
            rep.kv("size", result.limit.size());
            if (!lb_log.empty()) {
                std::ofstream log(lb_log);
                if (!log) throw precondition_error("cannot write log file '" + lb_log + "'");
                log << result.state.log_text();
            } else {
                rep.raw(result.state.log_text());
            }
            rep.structure("limit", result.limit);
        } else if (limit_verify->parsed()) {
            Structure H = detail::load_structure(lv_h, budget);
            ClassOracle oracle = detail::load_class(lv_spec, budget);
            auto r = verify_extension_property(H, oracle, lv_size, budget);
            rep.kv("result", r.yes ? "yes" : "no");
            if (!r.yes) {
                rep.structure("witness_sub", *r.witness_sub);
                rep.structure("witness_super", *r.witness_super);
                rep.map("witness_map", *r.witness_map);
            }
            code = r.yes ? 0 : 1;
        } else if (konig_cmd->parsed()) {
            std::ifstream in(konig_chain);
            if (!in) throw parse_error("cannot open chain file '" + konig_chain + "'");
            std::vector<Structure> chain;
            std::string line;
            while (std::getline(in, line)) {
                // refs contain '#', so only whole comment lines are stripped
                std::string trimmed = line;
                while (!trimmed.empty() && trimmed.back() <= ' ') trimmed.pop_back();
                std::size_t start = 0;
                while (start < trimmed.size() && trimmed[start] <= ' ') ++start;
                trimmed = trimmed.substr(start);
                if (trimmed.empty() || trimmed[0] == '#') continue;
                chain.push_back(detail::load_structure(trimmed, budget));
            }
            if (chain.empty()) throw parse_error(konig_chain + ": empty chain file");
            Structure B = detail::load_structure(konig_b, budget);
            auto r = konig_hom(chain, B, konig_depth, budget);
            rep.kv("result", r.found ? "branch" : "empty");
            if (r.found) {
                for (std::size_t t = 0; t < r.branch.size(); ++t)
                    rep.map("level" + std::to_string(t + 1), r.branch[t]);
            } else {
                rep.kv("empty_level", r.empty_level);
            }
            code = r.found ? 0 : 1;
        } else if (coreapprox_cmd->parsed()) {
            Structure A = detail::load_structure(ca_a, budget);
            auto r = build_core_approx(A, ca_steps, budget);
            rep.kv("input_hom_homogeneous", r.report.input_hom_homogeneous ? "yes" : "no");
            rep.kv("irreducibles", static_cast<std::uint64_t>(r.report.irreducible_members.size()));
            rep.kv("hp", r.report.hp_verdict.holds() ? "holds" : "not-holds");
            rep.kv("ap", r.report.ap_verdict.holds() ? "holds" : "not-holds");
            rep.kv("age_projects", r.report.age_projects_onto_irreducibles ? "yes" : "no");
            rep.kv("hom_equivalent", r.report.hom_equivalent_to_input ? "yes" : "no");
            rep.kv("age_matches", r.report.age_matches_irreducibles ? "yes" : "no");
            rep.structure("core", r.core);
            code = (r.report.hom_equivalent_to_input && r.report.age_matches_irreducibles) ? 0 : 1;
        }
    } catch (const parse_error& e) {
        return {65, std::string("parse error: ") + e.what() + "\n"};
    } catch (const precondition_error& e) {
        return {64, std::string("usage error: ") + e.what() + "\n"};
    } catch (const resource_error& e) {
        return {2, std::string("resource limit: ") + e.what() + "\n"};
    } catch (const construction_error& e) {
        return {2, std::string("construction aborted: ") + e.what() + "\n"};
    } catch (const invariant_error& e) {
        return {70, std::string("internal invariant violation: ") + e.what() + "\n"};
    } catch (const error& e) {
        return {70, std::string("internal error: ") + e.what() + "\n"};
    }

    std::string text = rep.str();
    if (!output_path.empty()) {
        std::ofstream out(output_path);
        if (!out) return {64, "usage error: cannot write output file '" + output_path + "'\n"};
        out << text;
    }
    return {code, text};
}

} // namespace finrel::cli
