#include "doctest.h"

#include "catalog.hpp"
#include "oracles.hpp"

#include "finrel/homsearch.hpp"

using namespace finrel;

namespace {

Structure k(int n) { return catalog::complete_graph(n); }
Structure p3() { return finrel::graph({"a", "b", "c"}, {{"a", "b"}, {"b", "c"}}); }

const std::vector<SearchMode> all_modes = {SearchMode::Hom, SearchMode::Mono,
                                           SearchMode::Embedding, SearchMode::Iso};

} // namespace

TEST_CASE("search_map basic examples") {
    SUBCASE("path into edge") {
        SearchResult r = search_map(p3(), k(2), SearchMode::Hom);
        REQUIRE(r.found());
        CHECK(check_map(*r.map, SearchMode::Hom));
    }
    SUBCASE("no 2-coloring of a triangle") {
        CHECK_FALSE(search_map(k(3), k(2), SearchMode::Hom).found());
        CHECK(oracle::count(k(3), k(2), SearchMode::Hom) == 0);
    }
    SUBCASE("identity seed completes to the identity") {
        Structure a = p3();
        SearchResult r = search_map(a, a, SearchMode::Iso, PartialMap::identity(a));
        REQUIRE(r.found());
        CHECK(*r.map == PartialMap::identity(a));
    }
    SUBCASE("found maps extend their seed") {
        Structure a = p3();
        Structure b = k(2);
        PartialMap seed(a, b, {{"b", "v1"}});
        SearchResult r = search_map(a, b, SearchMode::Hom, seed);
        REQUIRE(r.found());
        CHECK(r.map->image_of(a.element_index("b")) == b.element_index("v1"));
    }
    SUBCASE("seed violating the mode is a precondition error") {
        Structure a = k(2);
        PartialMap bad(a, a, {{"v0", "v0"}, {"v1", "v0"}});
        CHECK_THROWS_AS(search_map(a, a, SearchMode::Hom, bad), precondition_error);
        PartialMap noninjective(catalog::empty_graph(2), a,
                                {{"v0", "v0"}, {"v1", "v0"}});
        CHECK_THROWS_AS(search_map(catalog::empty_graph(2), a, SearchMode::Mono, noninjective),
                        precondition_error);
    }
    SUBCASE("signature mismatch") {
        CHECK_THROWS_AS(search_map(k(2), catalog::linear_order(2), SearchMode::Hom),
                        precondition_error);
    }
}

TEST_CASE("count_maps frozen values") {
    CHECK(count_maps(k(2), k(2), SearchMode::Hom) == 2);
    CHECK(count_maps(k(1), k(3), SearchMode::Hom) == 3);
    CHECK(count_maps(k(3), k(3), SearchMode::Iso) == 6);
}

TEST_CASE("solver agrees with brute-force enumeration on small pairs") {
    // A reduced sweep; the acceptance suite runs the full catalog.
    std::vector<Structure> graphs = {k(1), k(2), k(3), p3(), catalog::cycle(4),
                                     catalog::empty_graph(3), catalog::complete_bipartite(1, 3)};
    for (const auto& a : graphs)
        for (const auto& b : graphs)
            for (SearchMode mode : all_modes) {
                std::size_t expected = oracle::count(a, b, mode);
                CHECK(count_maps(a, b, mode) == expected);
                SearchResult r = search_map(a, b, mode);
                CHECK(r.found() == (expected > 0));
                if (r.found()) CHECK(check_map(*r.map, mode));
            }
}

TEST_CASE("mode monotonicity: iso => embedding => mono => hom") {
    for (const auto& ea : catalog::entries())
        for (const auto& eb : catalog::entries()) {
            const Structure& a = ea.structure;
            const Structure& b = eb.structure;
            if (a.signature() != b.signature()) continue;
            if (a.size() > 4 || b.size() > 4) continue;
            bool iso = search_map(a, b, SearchMode::Iso).found();
            bool emb = search_map(a, b, SearchMode::Embedding).found();
            bool mono = search_map(a, b, SearchMode::Mono).found();
            bool hom = search_map(a, b, SearchMode::Hom).found();
            if (iso) CHECK(emb);
            if (emb) CHECK(mono);
            if (mono) CHECK(hom);
        }
}

TEST_CASE("enumerate_maps lists exactly the oracle's maps") {
    std::vector<Structure> graphs = {k(2), p3(), catalog::empty_graph(2)};
    for (const auto& a : graphs)
        for (const auto& b : graphs)
            for (SearchMode mode : all_modes) {
                auto got = enumerate_maps(a, b, mode);
                auto want = oracle::maps(a, b, mode);
                REQUIRE(got.size() == want.size());
                // Same set of assignment vectors, independent of visit order.
                std::vector<std::vector<int>> gv, wv;
                for (const auto& m : got) gv.push_back(m.image_vector());
                for (const auto& m : want) wv.push_back(m.image_vector());
                std::sort(gv.begin(), gv.end());
                std::sort(wv.begin(), wv.end());
                CHECK(gv == wv);
            }
}

TEST_CASE("extend_local") {
    SUBCASE("complete graphs extend any injective sketch") {
        Structure a = k(3);
        PartialMap f(a, a, {{"v0", "v1"}});
        SearchResult r = extend_local(a, f, std::vector<std::string>{"v0", "v1", "v2"});
        REQUIRE(r.found());
        CHECK(check_map(*r.map, SearchMode::Hom));
    }
    SUBCASE("path endpoints onto the center both fold inward") {
        // {a->b, c->b} does extend: send b to either endpoint.
        Structure a = p3();
        PartialMap f(a, a, {{"a", "b"}, {"c", "b"}});
        SearchResult r = extend_local(a, f, std::vector<std::string>{"a", "b", "c"});
        REQUIRE(r.found());
        int image_of_b = r.map->image_of(r.map->source().element_index("b"));
        CHECK((r.map->target().element(image_of_b) == "a" ||
               r.map->target().element(image_of_b) == "c"));
    }
    SUBCASE("pinning one endpoint and shifting the other cannot extend") {
        // {a->a, c->b}: b would need a common neighbor of a and b; P3 has none.
        Structure a = p3();
        PartialMap f(a, a, {{"a", "a"}, {"c", "b"}});
        CHECK_FALSE(extend_local(a, f, std::vector<std::string>{"a", "b", "c"}).found());
    }
    SUBCASE("empty map extends to the identity") {
        Structure a = p3();
        PartialMap f(a, a);
        SearchResult r = extend_local(a, f, std::vector<std::string>{"a", "b", "c"});
        REQUIRE(r.found());
    }
    SUBCASE("goal equal to the domain returns the map itself") {
        for (const auto& e : catalog::entries()) {
            if (e.structure.size() > 3) continue;
            for (const auto& f : oracle::local_maps(e.structure, SearchMode::Hom)) {
                SearchResult r = extend_local(e.structure, f, f.domain_indices());
                REQUIRE(r.found());
                CHECK(r.map->image_vector() == [&] {
                    std::vector<int> v;
                    for (int d : f.domain_indices()) v.push_back(f.image_of(d));
                    return v;
                }());
            }
        }
    }
    SUBCASE("non-local-homomorphism input is a precondition error") {
        Structure a = p3();
        PartialMap f(a, a, {{"a", "a"}, {"b", "c"}}); // edge (a,b) -> non-edge (a,c)
        CHECK_THROWS_AS(extend_local(a, f, std::vector<std::string>{"a", "b", "c"}),
                        precondition_error);
    }
}

TEST_CASE("homogeneity_check") {
    SUBCASE("complete graphs are homomorphism-homogeneous") {
        CHECK(homogeneity_check(k(3), HomogeneityKind::Hom).homogeneous);
    }
    SUBCASE("the path P3 is not; least counterexample is {a->a, c->b}") {
        auto r = homogeneity_check(p3(), HomogeneityKind::Hom);
        REQUIRE_FALSE(r.homogeneous);
        REQUIRE(r.counterexample.has_value());
        const PartialMap& f = *r.counterexample;
        CHECK(f.to_string() == "a->a c->b");
        // And indeed it does not extend.
        CHECK_FALSE(extend_local(p3(), f, std::vector<std::string>{"a", "b", "c"}).found());
    }
    SUBCASE("counterexample is the least in (domain, assignment) order") {
        for (const auto& e : catalog::entries()) {
            if (e.structure.size() > 4) continue;
            auto r = homogeneity_check(e.structure, HomogeneityKind::Hom);
            // Oracle: first local hom (in the same order) that fails to extend.
            std::optional<PartialMap> expected;
            for (const auto& f : oracle::local_maps(e.structure, SearchMode::Hom)) {
                if (!search_map(e.structure, e.structure, SearchMode::Hom, f).found()) {
                    expected = f;
                    break;
                }
            }
            CHECK(r.homogeneous == !expected.has_value());
            if (expected) CHECK(*r.counterexample == *expected);
        }
    }
    SUBCASE("two edges plus an isolated vertex is not homogeneous") {
        Structure g = finrel::graph({"a", "b", "c", "d", "e"}, {{"a", "b"}, {"c", "d"}});
        auto r = homogeneity_check(g, HomogeneityKind::Iso);
        REQUIRE_FALSE(r.homogeneous);
        CHECK(is_local_map(g, *r.counterexample, SearchMode::Iso));
        CHECK_FALSE(search_map(g, g, SearchMode::Iso, *r.counterexample).found());
    }
    SUBCASE("homogeneous catalog: complete graphs, empty graphs, C5") {
        for (int n = 1; n <= 5; ++n) {
            CHECK(homogeneity_check(k(n), HomogeneityKind::Iso).homogeneous);
            CHECK(homogeneity_check(catalog::empty_graph(n), HomogeneityKind::Iso).homogeneous);
        }
        CHECK(homogeneity_check(catalog::cycle(5), HomogeneityKind::Iso).homogeneous);
    }
    SUBCASE("finite linear orders beyond one point are rigid, hence not homogeneous") {
        CHECK(homogeneity_check(catalog::linear_order(1), HomogeneityKind::Iso).homogeneous);
        for (int n = 2; n <= 4; ++n) {
            auto r = homogeneity_check(catalog::linear_order(n), HomogeneityKind::Iso);
            CHECK_FALSE(r.homogeneous);
        }
    }
}

TEST_CASE("hom_equivalent") {
    CHECK(hom_equivalent(p3(), k(2)));
    CHECK_FALSE(hom_equivalent(k(3), k(2)));
    for (const auto& e : catalog::entries())
        if (e.structure.size() <= 4) CHECK(hom_equivalent(e.structure, e.structure));
}

TEST_CASE("search node budget fails loudly") {
    Budget tiny;
    tiny.max_nodes = 3;
    CHECK_THROWS_AS(count_maps(catalog::empty_graph(4), catalog::empty_graph(4), SearchMode::Hom, tiny),
                    resource_error);
}
