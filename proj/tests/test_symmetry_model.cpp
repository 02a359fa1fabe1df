#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <random>
#include <set>
#include <stdexcept>

#include "symrl/relation_graph.hpp"
#include "symrl/transforms.hpp"
#include "test_util.hpp"

using namespace symrl;

namespace {

const TransformSpec& by_name(const std::vector<TransformSpec>& specs, const std::string& name) {
    for (const auto& t : specs)
        if (t.name == name) return t;
    throw std::runtime_error("no transform " + name);
}

std::set<std::pair<int, int>> pair_set(const RelationGraph& g) {
    std::set<std::pair<int, int>> out;
    for (const auto& p : g.pairs) out.insert({p.lo, p.hi});
    return out;
}

std::set<int> single_set(const RelationGraph& g) {
    std::set<int> out;
    for (const auto& s : g.singles) out.insert(s.slot);
    return out;
}

std::set<std::vector<int>> canonical_cycles(const RelationGraph& g) {
    std::set<std::vector<int>> out;
    for (auto c : g.cycles) {
        auto mn = std::min_element(c.begin(), c.end());
        std::rotate(c.begin(), mn, c.end());
        std::vector<int> rev(c.rbegin(), c.rend());
        std::rotate(rev.begin(), std::min_element(rev.begin(), rev.end()), rev.end());
        out.insert(std::min(c, rev));
    }
    return out;
}

}  // namespace

TEST_CASE("triangle state transform matches the hand-computed reflection") {
    const auto specs = triangle_transforms();
    const Vec s = {0.5, -0.2, 0.3, 0.9};
    const Vec fs = apply_state_transform(by_name(specs, "a"), s);
    CHECK(fs == Vec{-0.5, -0.3, 0.2, 0.9});
}

TEST_CASE("identity transform leaves states unchanged") {
    TransformSpec id;
    id.name = "id";
    id.kind = TransformSpec::Kind::rotation;
    id.obs_indices = {0, 1, 2};
    id.obs_multipliers = {1, 1, 1};
    id.act_indices = {0, 1};
    id.act_multipliers = {1, 1};
    validate_transform(id);
    const Vec s = {1.5, -2.0, 0.25};
    CHECK(apply_state_transform(id, s) == s);
}

TEST_CASE("reflections are involutions bit-exactly") {
    const auto specs = triangle_transforms();
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-2, 2);
    for (const auto& t : specs) {
        if (t.kind != TransformSpec::Kind::reflection) continue;
        const Vec s = {u(rng), u(rng), u(rng), u(rng)};
        CHECK(apply_state_transform(t, apply_state_transform(t, s)) == s);
        const Vec a = {u(rng), u(rng), u(rng)};
        CHECK(apply_declared_action_transform(t, apply_declared_action_transform(t, a)) == a);
    }
}

TEST_CASE("rusty declared transform doubles the torque routed to limb 1") {
    const auto rusty = testutil::rusty_triangle_specs();
    const Vec a = {1.0, 0.0, 0.0};
    const Vec ga = apply_declared_action_transform(by_name(rusty, "d"), a);
    CHECK(ga[1] == doctest::Approx(2.0));
}

TEST_CASE("pure reflection of actions is an involution") {
    TransformSpec t;
    t.name = "neg";
    t.kind = TransformSpec::Kind::reflection;
    t.obs_indices = {0};
    t.obs_multipliers = {1};
    t.act_indices = {0, 1};
    t.act_multipliers = {-1, -1};
    validate_transform(t);
    const Vec a = {0.7, -0.4};
    CHECK(apply_declared_action_transform(t, apply_declared_action_transform(t, a)) == a);
}

TEST_CASE("triangle relation graph: three pairs, three singles, one cycle") {
    const auto g = extract_relation_graph(triangle_transforms());
    CHECK(pair_set(g) == std::set<std::pair<int, int>>{{0, 1}, {0, 2}, {1, 2}});
    CHECK(single_set(g) == std::set<int>{0, 1, 2});
    CHECK(canonical_cycles(g).size() == 1);
    CHECK(*canonical_cycles(g).begin() == std::vector<int>{0, 1, 2});
    for (const auto& p : g.pairs) CHECK(p.relations.size() == 4);
}

TEST_CASE("crawler relation graph: twelve pairs and hip singles") {
    const auto g = extract_relation_graph(crawler_transforms());
    CHECK(pair_set(g) == std::set<std::pair<int, int>>{{0, 2},
                                                       {0, 4},
                                                       {0, 6},
                                                       {1, 3},
                                                       {1, 5},
                                                       {1, 7},
                                                       {2, 4},
                                                       {2, 6},
                                                       {3, 5},
                                                       {3, 7},
                                                       {4, 6},
                                                       {5, 7}});
    CHECK(single_set(g) == std::set<int>{0, 2, 4, 6});
    for (const auto& c : g.cycles) CHECK(c.size() >= 3);
    // Hips and knees form two disjoint 4-cliques: 7 undirected cycles each.
    CHECK(g.cycles.size() == 14);
    for (const auto& p : g.pairs) CHECK(!p.cycles.empty());
}

TEST_CASE("identity-only spec yields an empty graph") {
    TransformSpec id;
    id.name = "id";
    id.kind = TransformSpec::Kind::rotation;
    id.obs_indices = {0, 1};
    id.obs_multipliers = {1, 1};
    id.act_indices = {0, 1, 2};
    id.act_multipliers = {1, 1, 1};
    const auto g = extract_relation_graph({id});
    CHECK(g.pairs.empty());
    CHECK(g.singles.empty());
    CHECK(g.cycles.empty());
}

TEST_CASE("graph extraction is order independent") {
    auto specs = testutil::rusty_triangle_specs();
    const auto g1 = extract_relation_graph(specs);
    std::reverse(specs.begin(), specs.end());
    const auto g2 = extract_relation_graph(specs);
    CHECK(pair_set(g1) == pair_set(g2));
    CHECK(single_set(g1) == single_set(g2));
    CHECK(canonical_cycles(g1) == canonical_cycles(g2));
    for (std::size_t p = 0; p < g1.pairs.size(); ++p)
        CHECK(g1.pairs[p].prior_m == doctest::Approx(g2.pairs[p].prior_m).epsilon(1e-12));
}

TEST_CASE("composition at declared initialization reproduces the declared transform") {
    for (const auto& specs : {triangle_transforms(), crawler_transforms()}) {
        const auto g = extract_relation_graph(specs);
        const EstimatorParams nu = initial_estimators(g);
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> u(-2, 2);
        for (int rep = 0; rep < 1000; ++rep) {
            Vec a(g.act_dim);
            for (auto& v : a) v = u(rng);
            const std::size_t j = rep % specs.size();
            const Vec composed = compose_global_estimator(g, nu, static_cast<int>(j), a);
            const Vec declared = apply_declared_action_transform(specs[j], a);
            CHECK(linf_distance(composed, declared) == 0.0);
        }
    }
}

TEST_CASE("composition at rusty initialization matches the declared rusty transforms") {
    const auto rusty = testutil::rusty_triangle_specs();
    const auto g = extract_relation_graph(rusty);
    const EstimatorParams nu = initial_estimators(g);
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(-2, 2);
    for (int rep = 0; rep < 200; ++rep) {
        Vec a = {u(rng), u(rng), u(rng)};
        const std::size_t j = rep % rusty.size();
        const Vec composed = compose_global_estimator(g, nu, static_cast<int>(j), a);
        const Vec declared = apply_declared_action_transform(rusty[j], a);
        CHECK(linf_distance(composed, declared) < 1e-12);
    }
}

TEST_CASE("rusty estimator routes doubled torque through the fitted multiplier") {
    const auto g = extract_relation_graph(triangle_transforms());
    EstimatorParams nu = initial_estimators(g);
    nu.pair[g.pair_index(0, 1)].m = 2.0;  // fitted m_{0->1}
    const int d = 3;                      // transform order: a, b, c, d, e
    const Vec a = {1.0, 0.3, -0.2};
    const Vec ga = compose_global_estimator(g, nu, d, a);
    CHECK(ga[1] == doctest::Approx(2.0));
}

TEST_CASE("cycle consistency of composed rotations") {
    // nu multipliers 2, 1.5, 3 on (0->1), (1->2), (0->2): g_e slot 2 equals
    // g_d(g_d(a)) slot 2 because 3 = 1.5 * 2.
    const auto specs = triangle_transforms();
    const auto g = extract_relation_graph(specs);
    EstimatorParams nu = initial_estimators(g);
    nu.pair[g.pair_index(0, 1)].m = 2.0;
    nu.pair[g.pair_index(1, 2)].m = 1.5;
    nu.pair[g.pair_index(0, 2)].m = 3.0;
    const int d = 3, e = 4;
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-2, 2);
    for (int rep = 0; rep < 100; ++rep) {
        const Vec a = {u(rng), u(rng), u(rng)};
        const Vec once = compose_global_estimator(g, nu, e, a);
        const Vec twice = compose_global_estimator(g, nu, d, compose_global_estimator(g, nu, d, a));
        CHECK(once[2] == doctest::Approx(3.0 * a[0]).epsilon(1e-12));
        CHECK(twice[2] == doctest::Approx(once[2]).epsilon(1e-12));
    }
}

TEST_CASE("cycle identity holds when multipliers are consistent") {
    const auto g = extract_relation_graph(triangle_transforms());
    EstimatorParams nu = initial_estimators(g);
    nu.pair[g.pair_index(0, 1)].m = 2.0;
    nu.pair[g.pair_index(1, 2)].m = 1.5;
    nu.pair[g.pair_index(0, 2)].m = 3.0;  // product around 0->1->2->0 is 1
    std::mt19937_64 rng(19);
    std::uniform_real_distribution<double> u(-3, 3);
    for (int rep = 0; rep < 100; ++rep) {
        const double k = u(rng);
        // traversal order 0 -> 1 -> 2 -> 0
        double v = nu.pair[g.pair_index(0, 1)].m * k;
        v = nu.pair[g.pair_index(1, 2)].m * v;
        v = (v - nu.pair[g.pair_index(0, 2)].b) / nu.pair[g.pair_index(0, 2)].m;
        CHECK(v == doctest::Approx(k).epsilon(1e-10));
    }
}

TEST_CASE("near-singular inverted estimators are rejected") {
    const auto g = extract_relation_graph(triangle_transforms());
    EstimatorParams nu = initial_estimators(g);
    nu.pair[g.pair_index(0, 2)].m = 1e-9;
    const Vec a = {0.5, 0.5, 0.5};
    CHECK_THROWS_AS(compose_global_estimator(g, nu, 3, a), std::domain_error);
}

TEST_CASE("involution_check classifies linear maps") {
    CHECK(involution_check(-1.0, -6.0));
    CHECK(involution_check(1.0, 0.0));
    CHECK_FALSE(involution_check(-2.0, 0.0));
    CHECK_FALSE(involution_check(1.0, 0.5));
}

TEST_CASE("transform files round trip and validate") {
    const auto specs = crawler_transforms();
    const std::string path = "crawler_roundtrip.transforms";
    write_transform_file(path, specs);
    const auto parsed = parse_transform_file(path);
    REQUIRE(parsed.size() == specs.size());
    for (std::size_t j = 0; j < specs.size(); ++j) {
        CHECK(parsed[j].name == specs[j].name);
        CHECK(parsed[j].kind == specs[j].kind);
        CHECK(parsed[j].obs_indices == specs[j].obs_indices);
        CHECK(parsed[j].obs_multipliers == specs[j].obs_multipliers);
        CHECK(parsed[j].act_indices == specs[j].act_indices);
        CHECK(parsed[j].act_multipliers == specs[j].act_multipliers);
    }
    std::remove(path.c_str());
}

TEST_CASE("validation errors name the offending transform and slot") {
    TransformSpec bad;
    bad.name = "broken";
    bad.kind = TransformSpec::Kind::rotation;
    bad.obs_indices = {0, 0};  // not a bijection
    bad.obs_multipliers = {1, 1};
    bad.act_indices = {0};
    bad.act_multipliers = {1};
    try {
        validate_transform(bad);
        FAIL("expected validation to throw");
    } catch (const std::invalid_argument& e) {
        const std::string msg = e.what();
        CHECK(msg.find("broken") != std::string::npos);
        CHECK(msg.find("0") != std::string::npos);
    }

    TransformSpec zero = triangle_transforms()[0];
    zero.act_multipliers[2] = 0.0;
    CHECK_THROWS_AS(validate_transform(zero), std::invalid_argument);
}
