#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "finrel/budget.hpp"
#include "finrel/errors.hpp"

namespace finrel {

using Tuple = std::vector<int>;

namespace detail {

inline bool valid_relation_name(const std::string& s) {
    if (s.empty()) return false;
    if (s[0] >= '0' && s[0] <= '9') return false;
    for (char c : s) {
        bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                  (c >= '0' && c <= '9') || c == '_';
        if (!ok) return false;
    }
    return true;
}

inline bool valid_element_name(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s) {
        bool bad = c == '(' || c == ')' || c == ',' || c == ':' || c == '#' ||
                   c == '/' || c == '=' || static_cast<unsigned char>(c) <= ' ';
        if (bad) return false;
    }
    return true;
}

} // namespace detail

struct RelationSymbol {
    std::string name;
    int arity = 0;
};

// A relational signature: named relation symbols with arities, no function or
// constant symbols. Relations are kept sorted by name so equal signatures
// compare and print identically.
class Signature {
public:
    Signature() = default;

    explicit Signature(std::vector<RelationSymbol> rels) : rels_(std::move(rels)) {
        std::sort(rels_.begin(), rels_.end(),
                  [](const RelationSymbol& a, const RelationSymbol& b) { return a.name < b.name; });
        for (std::size_t i = 0; i < rels_.size(); ++i) {
            if (!detail::valid_relation_name(rels_[i].name))
                throw precondition_error("invalid relation name '" + rels_[i].name + "'");
            if (rels_[i].arity < 1)
                throw precondition_error("relation '" + rels_[i].name + "' has arity < 1");
            if (i > 0 && rels_[i].name == rels_[i - 1].name)
                throw precondition_error("duplicate relation name '" + rels_[i].name + "'");
        }
    }

    const std::vector<RelationSymbol>& relations() const { return rels_; }
    int size() const { return static_cast<int>(rels_.size()); }
    const RelationSymbol& at(int i) const { return rels_.at(static_cast<std::size_t>(i)); }

    int index_of(const std::string& name) const {
        for (std::size_t i = 0; i < rels_.size(); ++i)
            if (rels_[i].name == name) return static_cast<int>(i);
        return -1;
    }

    bool operator==(const Signature& o) const {
        if (rels_.size() != o.rels_.size()) return false;
        for (std::size_t i = 0; i < rels_.size(); ++i)
            if (rels_[i].name != o.rels_[i].name || rels_[i].arity != o.rels_[i].arity)
                return false;
        return true;
    }
    bool operator!=(const Signature& o) const { return !(*this == o); }

    std::string to_string() const {
        std::ostringstream out;
        for (std::size_t i = 0; i < rels_.size(); ++i) {
            if (i) out << ' ';
            out << rels_[i].name << '/' << rels_[i].arity;
        }
        return out.str();
    }

private:
    std::vector<RelationSymbol> rels_;
};

// A finite relational structure: an ordered carrier of named elements plus an
// extensional tuple set per relation symbol. Tuples hold carrier indices and
// each relation's content is kept sorted, so structurally equal values are
// representation-equal. Instances are immutable after construction.
class Structure {
public:
    Structure() = default;

    Structure(Signature sig, std::vector<std::string> elements,
              std::vector<std::vector<Tuple>> contents)
        : sig_(std::move(sig)), elems_(std::move(elements)), contents_(std::move(contents)) {
        if (contents_.size() != static_cast<std::size_t>(sig_.size()))
            throw precondition_error("structure has contents for " + std::to_string(contents_.size()) +
                                     " relations, signature has " + std::to_string(sig_.size()));
        std::set<std::string> seen;
        for (const auto& e : elems_) {
            if (!detail::valid_element_name(e))
                throw precondition_error("invalid element name '" + e + "'");
            if (!seen.insert(e).second)
                throw precondition_error("duplicate element '" + e + "'");
        }
        const int n = size();
        for (int r = 0; r < sig_.size(); ++r) {
            auto& tuples = contents_[static_cast<std::size_t>(r)];
            for (const Tuple& t : tuples) {
                if (static_cast<int>(t.size()) != sig_.at(r).arity)
                    throw precondition_error("tuple of length " + std::to_string(t.size()) +
                                             " in relation " + sig_.at(r).name + "/" +
                                             std::to_string(sig_.at(r).arity));
                for (int v : t)
                    if (v < 0 || v >= n)
                        throw precondition_error("tuple component out of carrier range in relation " +
                                                 sig_.at(r).name);
            }
            std::sort(tuples.begin(), tuples.end());
            tuples.erase(std::unique(tuples.begin(), tuples.end()), tuples.end());
        }
    }

    // Convenience constructor with element-name tuples.
    static Structure build(Signature sig, std::vector<std::string> elements,
                           const std::map<std::string, std::vector<std::vector<std::string>>>& named) {
        std::vector<std::vector<Tuple>> contents(static_cast<std::size_t>(sig.size()));
        std::map<std::string, int> pos;
        for (std::size_t i = 0; i < elements.size(); ++i) pos[elements[i]] = static_cast<int>(i);
        for (const auto& [rel, tuples] : named) {
            int r = sig.index_of(rel);
            if (r < 0) throw precondition_error("unknown relation '" + rel + "'");
            for (const auto& names : tuples) {
                Tuple t;
                for (const auto& nm : names) {
                    auto it = pos.find(nm);
                    if (it == pos.end())
                        throw precondition_error("element '" + nm + "' is not in the carrier");
                    t.push_back(it->second);
                }
                contents[static_cast<std::size_t>(r)].push_back(std::move(t));
            }
        }
        return Structure(std::move(sig), std::move(elements), std::move(contents));
    }

    const Signature& signature() const { return sig_; }
    int size() const { return static_cast<int>(elems_.size()); }
    const std::vector<std::string>& elements() const { return elems_; }
    const std::string& element(int i) const { return elems_.at(static_cast<std::size_t>(i)); }

    int element_index(const std::string& name) const {
        for (std::size_t i = 0; i < elems_.size(); ++i)
            if (elems_[i] == name) return static_cast<int>(i);
        return -1;
    }

    const std::vector<Tuple>& tuples(int rel) const {
        return contents_.at(static_cast<std::size_t>(rel));
    }

    bool has_tuple(int rel, const Tuple& t) const {
        const auto& ts = contents_.at(static_cast<std::size_t>(rel));
        return std::binary_search(ts.begin(), ts.end(), t);
    }

    std::size_t tuple_count() const {
        std::size_t c = 0;
        for (const auto& ts : contents_) c += ts.size();
        return c;
    }

    // Exact equality: same signature, same carrier names in order, same contents.
    bool operator==(const Structure& o) const {
        return sig_ == o.sig_ && elems_ == o.elems_ && contents_ == o.contents_;
    }
    bool operator!=(const Structure& o) const { return !(*this == o); }

    // Label-free encoding of the relational contents; two structures with the
    // same signature and carrier size get the same code iff their index
    // representations coincide. Used for canonical forms and dedup keys.
    // Tuple counts come before tuples so sparser structures sort first.
    std::string encode() const {
        std::ostringstream out;
        out << size() << '|';
        for (int r = 0; r < sig_.size(); ++r) {
            out << sig_.at(r).name << ':' << tuples(r).size() << ':';
            for (const Tuple& t : tuples(r)) {
                out << '(';
                for (std::size_t i = 0; i < t.size(); ++i) {
                    if (i) out << ',';
                    out << t[i];
                }
                out << ')';
            }
            out << '|';
        }
        return out.str();
    }

private:
    Signature sig_;
    std::vector<std::string> elems_;
    std::vector<std::vector<Tuple>> contents_;
};

// Graph helpers used throughout: a single binary relation E kept symmetric.
inline Signature graph_signature() { return Signature({{"E", 2}}); }

inline Structure graph(std::vector<std::string> vertices,
                       const std::vector<std::pair<std::string, std::string>>& edges) {
    std::vector<std::vector<std::string>> tuples;
    for (const auto& [a, b] : edges) {
        tuples.push_back({a, b});
        tuples.push_back({b, a});
    }
    return Structure::build(graph_signature(), std::move(vertices), {{"E", tuples}});
}

// The substructure of A induced by a subset of its carrier. Element order is
// inherited from A, so the inclusion map is index-monotone.
inline Structure induced_substructure_idx(const Structure& A, std::vector<int> keep) {
    std::sort(keep.begin(), keep.end());
    keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
    std::vector<int> where(static_cast<std::size_t>(A.size()), -1);
    std::vector<std::string> elems;
    for (int v : keep) {
        if (v < 0 || v >= A.size())
            throw precondition_error("induced substructure: index out of range");
        where[static_cast<std::size_t>(v)] = static_cast<int>(elems.size());
        elems.push_back(A.element(v));
    }
    std::vector<std::vector<Tuple>> contents(static_cast<std::size_t>(A.signature().size()));
    for (int r = 0; r < A.signature().size(); ++r) {
        for (const Tuple& t : A.tuples(r)) {
            Tuple mapped;
            mapped.reserve(t.size());
            bool inside = true;
            for (int v : t) {
                int w = where[static_cast<std::size_t>(v)];
                if (w < 0) { inside = false; break; }
                mapped.push_back(w);
            }
            if (inside) contents[static_cast<std::size_t>(r)].push_back(std::move(mapped));
        }
    }
    return Structure(A.signature(), std::move(elems), std::move(contents));
}

inline Structure induced_substructure(const Structure& A, const std::vector<std::string>& keep) {
    std::vector<int> idx;
    for (const auto& name : keep) {
        int i = A.element_index(name);
        if (i < 0) throw precondition_error("element '" + name + "' is not in the carrier");
        idx.push_back(i);
    }
    return induced_substructure_idx(A, std::move(idx));
}

// A partial function between the carriers of two structures. The unit of all
// search: seeds, found maps, counterexamples and retractions are PartialMaps.
// Source and target are held by shared pointer so copies stay cheap.
class PartialMap {
public:
    PartialMap() = default;

    PartialMap(Structure source, Structure target)
        : src_(std::make_shared<Structure>(std::move(source))),
          dst_(std::make_shared<Structure>(std::move(target))),
          img_(static_cast<std::size_t>(src_->size()), -1) {}

    PartialMap(std::shared_ptr<const Structure> source, std::shared_ptr<const Structure> target,
               std::vector<int> image)
        : src_(std::move(source)), dst_(std::move(target)), img_(std::move(image)) {
        if (!src_ || !dst_) throw precondition_error("partial map with null endpoint");
        if (img_.size() != static_cast<std::size_t>(src_->size()))
            throw invariant_error("partial map image vector has wrong length");
        for (int v : img_)
            if (v < -1 || v >= dst_->size())
                throw precondition_error("partial map value out of target carrier");
    }

    PartialMap(Structure source, Structure target,
               const std::vector<std::pair<std::string, std::string>>& pairs)
        : PartialMap(std::move(source), std::move(target)) {
        for (const auto& [from, to] : pairs) {
            int s = src_->element_index(from);
            if (s < 0) throw precondition_error("map key '" + from + "' is not in the source carrier");
            int t = dst_->element_index(to);
            if (t < 0) throw precondition_error("map value '" + to + "' is not in the target carrier");
            if (img_[static_cast<std::size_t>(s)] != -1 && img_[static_cast<std::size_t>(s)] != t)
                throw precondition_error("map assigns '" + from + "' twice");
            img_[static_cast<std::size_t>(s)] = t;
        }
    }

    static PartialMap identity(const Structure& A) {
        PartialMap m(A, A);
        for (int i = 0; i < A.size(); ++i) m.img_[static_cast<std::size_t>(i)] = i;
        return m;
    }

    const Structure& source() const { return *src_; }
    const Structure& target() const { return *dst_; }
    std::shared_ptr<const Structure> source_ptr() const { return src_; }
    std::shared_ptr<const Structure> target_ptr() const { return dst_; }

    const std::vector<int>& image_vector() const { return img_; }
    int image_of(int v) const { return img_.at(static_cast<std::size_t>(v)); }
    bool defined(int v) const { return image_of(v) >= 0; }

    bool total() const {
        for (int v : img_)
            if (v < 0) return false;
        return true;
    }

    int domain_size() const {
        int c = 0;
        for (int v : img_)
            if (v >= 0) ++c;
        return c;
    }

    std::vector<int> domain_indices() const {
        std::vector<int> d;
        for (std::size_t i = 0; i < img_.size(); ++i)
            if (img_[i] >= 0) d.push_back(static_cast<int>(i));
        return d;
    }

    PartialMap with_assignment(int src, int dst) const {
        PartialMap m = *this;
        m.img_.at(static_cast<std::size_t>(src)) = dst;
        return m;
    }

    PartialMap restricted_to(const std::vector<int>& dom) const {
        PartialMap m = *this;
        std::vector<bool> keep(img_.size(), false);
        for (int v : dom) keep.at(static_cast<std::size_t>(v)) = true;
        for (std::size_t i = 0; i < m.img_.size(); ++i)
            if (!keep[i]) m.img_[i] = -1;
        return m;
    }

    // Inverse of a total bijection.
    PartialMap inverse() const {
        if (!total() || src_->size() != dst_->size())
            throw precondition_error("inverse requires a total bijection");
        std::vector<int> inv(static_cast<std::size_t>(dst_->size()), -1);
        for (std::size_t i = 0; i < img_.size(); ++i) {
            if (inv[static_cast<std::size_t>(img_[i])] != -1)
                throw precondition_error("inverse requires an injective map");
            inv[static_cast<std::size_t>(img_[i])] = static_cast<int>(i);
        }
        return PartialMap(dst_, src_, std::move(inv));
    }

    bool operator==(const PartialMap& o) const {
        return *src_ == *o.src_ && *dst_ == *o.dst_ && img_ == o.img_;
    }
    bool operator!=(const PartialMap& o) const { return !(*this == o); }

    std::string to_string() const {
        std::ostringstream out;
        bool first = true;
        for (std::size_t i = 0; i < img_.size(); ++i) {
            if (img_[i] < 0) continue;
            if (!first) out << ' ';
            first = false;
            out << src_->element(static_cast<int>(i)) << "->"
                << dst_->element(img_[i]);
        }
        return out.str();
    }

private:
    std::shared_ptr<const Structure> src_;
    std::shared_ptr<const Structure> dst_;
    std::vector<int> img_;
};

enum class SearchMode { Hom, Mono, Embedding, Iso };

inline std::string to_string(SearchMode m) {
    switch (m) {
        case SearchMode::Hom: return "hom";
        case SearchMode::Mono: return "mono";
        case SearchMode::Embedding: return "embedding";
        case SearchMode::Iso: return "iso";
    }
    return "?";
}

namespace detail {

inline void require_same_signature(const Structure& A, const Structure& B, const char* what) {
    if (A.signature() != B.signature())
        throw precondition_error(std::string(what) + ": signature mismatch between '" +
                                 A.signature().to_string() + "' and '" + B.signature().to_string() + "'");
}

// Relation preservation for a total index map, plus optional reflection over
// the image (tuples of images are in the target only if the preimage tuple is
// in the source).
inline bool preserves_tuples(const Structure& A, const Structure& B, const std::vector<int>& f) {
    Tuple mapped;
    for (int r = 0; r < A.signature().size(); ++r) {
        for (const Tuple& t : A.tuples(r)) {
            mapped.clear();
            for (int v : t) mapped.push_back(f[static_cast<std::size_t>(v)]);
            if (!B.has_tuple(r, mapped)) return false;
        }
    }
    return true;
}

inline bool injective(const std::vector<int>& f, int target_size) {
    std::vector<char> used(static_cast<std::size_t>(target_size), 0);
    for (int v : f) {
        if (used[static_cast<std::size_t>(v)]) return false;
        used[static_cast<std::size_t>(v)] = 1;
    }
    return true;
}

inline bool reflects_tuples(const Structure& A, const Structure& B, const std::vector<int>& f) {
    // f must already be injective. Invert over the image.
    std::vector<int> pre(static_cast<std::size_t>(B.size()), -1);
    for (std::size_t i = 0; i < f.size(); ++i) pre[static_cast<std::size_t>(f[i])] = static_cast<int>(i);
    Tuple back;
    for (int r = 0; r < B.signature().size(); ++r) {
        for (const Tuple& t : B.tuples(r)) {
            back.clear();
            bool in_image = true;
            for (int v : t) {
                int p = pre[static_cast<std::size_t>(v)];
                if (p < 0) { in_image = false; break; }
                back.push_back(p);
            }
            if (in_image && !A.has_tuple(r, back)) return false;
        }
    }
    return true;
}

} // namespace detail

// Decide whether a total map is a homomorphism / monomorphism / embedding /
// isomorphism. All four modes require totality on the source carrier.
inline bool check_map(const PartialMap& m, SearchMode mode) {
    const Structure& A = m.source();
    const Structure& B = m.target();
    detail::require_same_signature(A, B, "check_map");
    if (!m.total())
        throw precondition_error("check_map: map must be total on the source carrier for mode " +
                                 to_string(mode));
    const std::vector<int>& f = m.image_vector();
    if (!detail::preserves_tuples(A, B, f)) return false;
    if (mode == SearchMode::Hom) return true;
    if (!detail::injective(f, B.size())) return false;
    if (mode == SearchMode::Mono) return true;
    if (!detail::reflects_tuples(A, B, f)) return false;
    if (mode == SearchMode::Embedding) return true;
    return A.size() == B.size(); // iso = embedding + surjective
}

// Tagged disjoint union: element x of part i becomes "u<i>_x".
struct DisjointUnion {
    Structure structure;
    std::vector<PartialMap> injections;
};

inline DisjointUnion disjoint_union_with_injections(const std::vector<Structure>& parts) {
    if (parts.empty()) throw precondition_error("disjoint_union: empty part list");
    const Signature& sig = parts[0].signature();
    for (const auto& p : parts) detail::require_same_signature(parts[0], p, "disjoint_union");

    std::vector<std::string> elems;
    std::vector<int> offset;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        offset.push_back(static_cast<int>(elems.size()));
        for (const auto& e : parts[i].elements())
            elems.push_back("u" + std::to_string(i) + "_" + e);
    }
    std::vector<std::vector<Tuple>> contents(static_cast<std::size_t>(sig.size()));
    for (std::size_t i = 0; i < parts.size(); ++i) {
        for (int r = 0; r < sig.size(); ++r) {
            for (const Tuple& t : parts[i].tuples(r)) {
                Tuple shifted;
                for (int v : t) shifted.push_back(v + offset[i]);
                contents[static_cast<std::size_t>(r)].push_back(std::move(shifted));
            }
        }
    }
    Structure u(sig, std::move(elems), std::move(contents));
    auto shared = std::make_shared<Structure>(u);
    DisjointUnion result{std::move(u), {}};
    for (std::size_t i = 0; i < parts.size(); ++i) {
        std::vector<int> img;
        for (int v = 0; v < parts[i].size(); ++v) img.push_back(v + offset[i]);
        result.injections.emplace_back(std::make_shared<Structure>(parts[i]), shared, std::move(img));
    }
    return result;
}

inline Structure disjoint_union(const std::vector<Structure>& parts) {
    return disjoint_union_with_injections(parts).structure;
}

// Quotient by a partition of the carrier. Blocks are named after their least
// member in carrier order; relation contents are pushed through the block
// map, so the returned surjection is a homomorphism by construction.
struct Quotient {
    Structure structure;
    PartialMap projection;
};

inline Quotient quotient(const Structure& A, const std::vector<std::vector<std::string>>& blocks) {
    std::vector<int> block_of(static_cast<std::size_t>(A.size()), -1);
    std::vector<int> least(blocks.size(), -1);
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        if (blocks[b].empty()) throw precondition_error("quotient: empty block");
        for (const auto& name : blocks[b]) {
            int v = A.element_index(name);
            if (v < 0) throw precondition_error("quotient: element '" + name + "' is not in the carrier");
            if (block_of[static_cast<std::size_t>(v)] != -1)
                throw precondition_error("quotient: blocks overlap at '" + name + "'");
            block_of[static_cast<std::size_t>(v)] = static_cast<int>(b);
            if (least[b] < 0 || v < least[b]) least[b] = v;
        }
    }
    for (int v = 0; v < A.size(); ++v)
        if (block_of[static_cast<std::size_t>(v)] < 0)
            throw precondition_error("quotient: element '" + A.element(v) + "' is not covered");

    // Order blocks by least member so singleton partitions reproduce A exactly.
    std::vector<int> order(blocks.size());
    for (std::size_t b = 0; b < blocks.size(); ++b) order[b] = static_cast<int>(b);
    std::sort(order.begin(), order.end(), [&](int x, int y) { return least[static_cast<std::size_t>(x)] < least[static_cast<std::size_t>(y)]; });
    std::vector<int> rank(blocks.size());
    std::vector<std::string> elems;
    for (std::size_t i = 0; i < order.size(); ++i) {
        rank[static_cast<std::size_t>(order[i])] = static_cast<int>(i);
        elems.push_back(A.element(least[static_cast<std::size_t>(order[i])]));
    }
    std::vector<int> proj(static_cast<std::size_t>(A.size()));
    for (int v = 0; v < A.size(); ++v)
        proj[static_cast<std::size_t>(v)] = rank[static_cast<std::size_t>(block_of[static_cast<std::size_t>(v)])];
    std::vector<std::vector<Tuple>> contents(static_cast<std::size_t>(A.signature().size()));
    for (int r = 0; r < A.signature().size(); ++r) {
        for (const Tuple& t : A.tuples(r)) {
            Tuple mapped;
            for (int v : t) mapped.push_back(proj[static_cast<std::size_t>(v)]);
            contents[static_cast<std::size_t>(r)].push_back(std::move(mapped));
        }
    }
    Structure Q(A.signature(), std::move(elems), std::move(contents));
    PartialMap projection(std::make_shared<Structure>(A), std::make_shared<Structure>(Q), std::move(proj));
    return Quotient{std::move(Q), std::move(projection)};
}

inline Quotient quotient_idx(const Structure& A, const std::vector<std::vector<int>>& blocks) {
    std::vector<std::vector<std::string>> named;
    for (const auto& b : blocks) {
        std::vector<std::string> names;
        for (int v : b) names.push_back(A.element(v));
        named.push_back(std::move(names));
    }
    return quotient(A, named);
}

// g after f, defined wherever both legs are.
inline PartialMap compose(const PartialMap& f, const PartialMap& g) {
    if (f.target() != g.source())
        throw precondition_error("compose: target of the first map differs from source of the second");
    std::vector<int> img(static_cast<std::size_t>(f.source().size()), -1);
    for (int v = 0; v < f.source().size(); ++v)
        if (f.defined(v) && g.defined(f.image_of(v)))
            img[static_cast<std::size_t>(v)] = g.image_of(f.image_of(v));
    return PartialMap(f.source_ptr(), g.target_ptr(), std::move(img));
}

// Inclusion of an induced substructure back into its parent, matched by name.
inline PartialMap inclusion_map(const Structure& sub, const Structure& parent) {
    std::vector<int> img;
    for (const auto& e : sub.elements()) {
        int v = parent.element_index(e);
        if (v < 0) throw precondition_error("inclusion: element '" + e + "' missing from parent");
        img.push_back(v);
    }
    return PartialMap(std::make_shared<Structure>(sub), std::make_shared<Structure>(parent), std::move(img));
}

} // namespace finrel
