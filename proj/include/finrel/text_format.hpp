#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "finrel/structures.hpp"

namespace finrel {

// The structure text format:
//
//   signature E/2
//   structure K3
//     elements a b c
//     E: (a,b) (b,a) (a,c) (c,a) (b,c) (c,b)
//
// One signature line, then named structure blocks. Tokens may be separated by
// any amount of whitespace; '#' starts a comment. The printer is the single
// source of truth for the byte-exact output the CLI emits.

struct StructureFile {
    Signature signature;
    std::vector<std::pair<std::string, Structure>> structures;

    const Structure& get(const std::string& name) const {
        for (const auto& [n, s] : structures)
            if (n == name) return s;
        throw parse_error("no structure named '" + name + "' in file");
    }
    bool has(const std::string& name) const {
        for (const auto& [n, s] : structures)
            if (n == name) return true;
        return false;
    }
};

namespace detail {

struct Line {
    int number = 0;
    std::vector<std::string> tokens;
};

inline std::vector<Line> tokenize_lines(const std::string& text) {
    std::vector<Line> lines;
    std::istringstream in(text);
    std::string raw;
    int number = 0;
    while (std::getline(in, raw)) {
        ++number;
        auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        Line line;
        line.number = number;
        std::string cur;
        auto flush = [&]() {
            if (!cur.empty()) {
                line.tokens.push_back(cur);
                cur.clear();
            }
        };
        for (char c : raw) {
            if (static_cast<unsigned char>(c) <= ' ') {
                flush();
            } else if (c == '(' || c == ')' || c == ',') {
                flush();
                line.tokens.push_back(std::string(1, c));
            } else if (c == ':') {
                // keep the colon attached as a separate token
                flush();
                line.tokens.push_back(":");
            } else {
                cur.push_back(c);
            }
        }
        flush();
        if (!line.tokens.empty()) lines.push_back(std::move(line));
    }
    return lines;
}

[[noreturn]] inline void fail(int line, const std::string& msg) {
    throw parse_error("line " + std::to_string(line) + ": " + msg);
}

inline std::vector<std::vector<std::string>> parse_tuple_list(const Line& line, std::size_t from,
                                                              int arity) {
    std::vector<std::vector<std::string>> tuples;
    std::size_t i = from;
    while (i < line.tokens.size()) {
        if (line.tokens[i] != "(") fail(line.number, "expected '(' to open a tuple");
        ++i;
        std::vector<std::string> tuple;
        bool expect_element = true;
        while (i < line.tokens.size() && line.tokens[i] != ")") {
            if (line.tokens[i] == ",") {
                if (expect_element) fail(line.number, "unexpected ',' in tuple");
                expect_element = true;
            } else {
                if (!expect_element) fail(line.number, "missing ',' between tuple components");
                tuple.push_back(line.tokens[i]);
                expect_element = false;
            }
            ++i;
        }
        if (i == line.tokens.size()) fail(line.number, "unterminated tuple");
        ++i; // consume ')'
        if (static_cast<int>(tuple.size()) != arity)
            fail(line.number, "tuple of length " + std::to_string(tuple.size()) +
                                  " where arity " + std::to_string(arity) + " was declared");
        tuples.push_back(std::move(tuple));
    }
    return tuples;
}

} // namespace detail

inline StructureFile parse_structures(const std::string& text,
                                      const Budget& budget = Budget::default_budget()) {
    auto lines = detail::tokenize_lines(text);
    if (lines.empty()) throw parse_error("empty input");

    std::size_t at = 0;
    const auto& sig_line = lines[at];
    if (sig_line.tokens[0] != "signature")
        detail::fail(sig_line.number, "expected 'signature' line first");
    std::vector<RelationSymbol> rels;
    for (std::size_t i = 1; i < sig_line.tokens.size(); ++i) {
        const std::string& tok = sig_line.tokens[i];
        auto slash = tok.find('/');
        if (slash == std::string::npos || slash == 0 || slash + 1 >= tok.size())
            detail::fail(sig_line.number, "expected 'name/arity', got '" + tok + "'");
        RelationSymbol r;
        r.name = tok.substr(0, slash);
        try {
            r.arity = std::stoi(tok.substr(slash + 1));
        } catch (const std::exception&) {
            detail::fail(sig_line.number, "bad arity in '" + tok + "'");
        }
        rels.push_back(std::move(r));
    }
    if (rels.empty()) detail::fail(sig_line.number, "signature declares no relations");
    Signature sig;
    try {
        sig = Signature(std::move(rels));
    } catch (const precondition_error& e) {
        detail::fail(sig_line.number, e.what());
    }
    ++at;

    StructureFile file;
    file.signature = sig;
    while (at < lines.size()) {
        const auto& head = lines[at];
        if (head.tokens[0] != "structure" || head.tokens.size() != 2)
            detail::fail(head.number, "expected 'structure <name>'");
        std::string name = head.tokens[1];
        if (file.has(name)) detail::fail(head.number, "duplicate structure name '" + name + "'");
        ++at;
        if (at >= lines.size() || lines[at].tokens[0] != "elements")
            detail::fail(head.number, "structure '" + name + "' is missing its 'elements' line");
        const auto& elem_line = lines[at];
        std::vector<std::string> elements(elem_line.tokens.begin() + 1, elem_line.tokens.end());
        if (elements.empty())
            detail::fail(elem_line.number, "structure '" + name + "' has an empty carrier");
        if (elements.size() > budget.max_elements)
            throw resource_error("structure '" + name + "' exceeds the element budget of " +
                                 std::to_string(budget.max_elements));
        ++at;

        std::map<std::string, std::vector<std::vector<std::string>>> contents;
        std::vector<bool> seen(static_cast<std::size_t>(sig.size()), false);
        while (at < lines.size() && lines[at].tokens.size() >= 2 && lines[at].tokens[1] == ":") {
            const auto& rel_line = lines[at];
            const std::string& rel = rel_line.tokens[0];
            int r = sig.index_of(rel);
            if (r < 0) detail::fail(rel_line.number, "relation '" + rel + "' is not in the signature");
            if (seen[static_cast<std::size_t>(r)])
                detail::fail(rel_line.number, "duplicate content line for relation '" + rel + "'");
            seen[static_cast<std::size_t>(r)] = true;
            contents[rel] = detail::parse_tuple_list(rel_line, 2, sig.at(r).arity);
            ++at;
        }
        for (int r = 0; r < sig.size(); ++r)
            if (!seen[static_cast<std::size_t>(r)])
                detail::fail(head.number, "structure '" + name + "' is missing a content line for '" +
                                              sig.at(r).name + "'");
        try {
            file.structures.emplace_back(name, Structure::build(sig, std::move(elements), contents));
        } catch (const precondition_error& e) {
            detail::fail(head.number, e.what());
        }
    }
    if (file.structures.empty()) throw parse_error("file declares no structures");
    return file;
}

inline StructureFile parse_structures_file(const std::string& path,
                                           const Budget& budget = Budget::default_budget()) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_structures(buf.str(), budget);
    } catch (const parse_error& e) {
        throw parse_error(path + ": " + e.what());
    }
}

inline void print_structure_block(std::ostream& out, const std::string& name, const Structure& S) {
    out << "structure " << name << "\n";
    out << "  elements";
    for (const auto& e : S.elements()) out << ' ' << e;
    out << "\n";
    for (int r = 0; r < S.signature().size(); ++r) {
        out << "  " << S.signature().at(r).name << ":";
        for (const Tuple& t : S.tuples(r)) {
            out << " (";
            for (std::size_t i = 0; i < t.size(); ++i) {
                if (i) out << ',';
                out << S.element(t[i]);
            }
            out << ')';
        }
        out << "\n";
    }
}

inline std::string print_structures(const std::vector<std::pair<std::string, Structure>>& structures) {
    if (structures.empty()) throw precondition_error("nothing to print");
    std::ostringstream out;
    out << "signature " << structures[0].second.signature().to_string() << "\n";
    for (const auto& [name, s] : structures) {
        detail::require_same_signature(structures[0].second, s, "print_structures");
        print_structure_block(out, name, s);
    }
    return out.str();
}

inline std::string print_structure(const std::string& name, const Structure& S) {
    return print_structures({{name, S}});
}

} // namespace finrel
