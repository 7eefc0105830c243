#include <doctest.h>

#include <algorithm>
#include <set>

#include "ctic/error.hpp"
#include "ctic/interventions.hpp"
#include "oracles.hpp"

using namespace ctic;

namespace {

DirectedGraph degree_ladder() {
    // out-degrees [4, 3, 2, 1, 0]
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (NodeId u = 0; u < 4; ++u)
        for (NodeId v = u + 1; v < 5; ++v) edges.emplace_back(u, v);
    return DirectedGraph::from_edges(5, std::move(edges));
}

} // namespace

TEST_CASE("resolve_targets boundary fractions") {
    auto g = degree_ladder();
    CHECK(resolve_targets(g, 0.0, TargetStrategy::Random, {}, 1).empty());

    auto all = resolve_targets(g, 1.0, TargetStrategy::Random, {}, 1);
    CHECK(all.size() == 5);

    // with a seed supplied, the seed never enters the target set
    auto minus_seed = resolve_targets(g, 1.0, TargetStrategy::DistanceFromSeed, NodeId{0}, 1);
    CHECK(minus_seed.size() == 4);
    CHECK(std::find(minus_seed.begin(), minus_seed.end(), 0) == minus_seed.end());
}

TEST_CASE("round-half-up target counts") {
    auto g = degree_ladder();
    CHECK(resolve_targets(g, 0.5, TargetStrategy::Random, {}, 1).size() == 3);  // round(2.5)
    CHECK(resolve_targets(g, 0.49, TargetStrategy::Random, {}, 1).size() == 2);
    CHECK(resolve_targets(g, 0.4, TargetStrategy::DegreeDescending, {}, 1) ==
          std::vector<NodeId>{0, 1});
}

TEST_CASE("rankings match an independent sort on random graphs") {
    SplitMix64 rng(31);
    for (int trial = 0; trial < 100; ++trial) {
        auto n = static_cast<NodeId>(2 + rng.next_below(7));
        auto g = DirectedGraph::from_edges(
                     n, oracles::random_edges(n, static_cast<int>(rng.next_below(14)), rng))
                     .with_susceptibility(oracles::random_susceptibilities(n, rng));

        // degree descending, ties by ascending id
        {
            std::vector<NodeId> expect(static_cast<std::size_t>(n));
            for (NodeId v = 0; v < n; ++v) expect[static_cast<std::size_t>(v)] = v;
            std::sort(expect.begin(), expect.end(), [&](NodeId a, NodeId b) {
                if (g.out_degree(a) != g.out_degree(b)) return g.out_degree(a) > g.out_degree(b);
                return a < b;
            });
            CHECK(resolve_targets(g, 1.0, TargetStrategy::DegreeDescending, {}, 0) == expect);
        }
        // susceptibility descending
        {
            std::vector<NodeId> expect(static_cast<std::size_t>(n));
            for (NodeId v = 0; v < n; ++v) expect[static_cast<std::size_t>(v)] = v;
            std::sort(expect.begin(), expect.end(), [&](NodeId a, NodeId b) {
                if (g.susceptibility(a) != g.susceptibility(b))
                    return g.susceptibility(a) > g.susceptibility(b);
                return a < b;
            });
            CHECK(resolve_targets(g, 1.0, TargetStrategy::SusceptibilityDescending, {}, 0) ==
                  expect);
        }
        // distance from seed: ascending distance, unreachable last, seed excluded
        {
            NodeId seed = static_cast<NodeId>(rng.next_below(static_cast<std::uint64_t>(n)));
            auto dist = bfs_distance_from(g, seed);
            std::vector<NodeId> expect;
            for (NodeId v = 0; v < n; ++v)
                if (v != seed) expect.push_back(v);
            auto key = [&](NodeId v) {
                auto d = dist[static_cast<std::size_t>(v)];
                return d == kUnreachable ? oracles::kInf : d;
            };
            std::sort(expect.begin(), expect.end(), [&](NodeId a, NodeId b) {
                if (key(a) != key(b)) return key(a) < key(b);
                return a < b;
            });
            CHECK(resolve_targets(g, 1.0, TargetStrategy::DistanceFromSeed, seed, 0) == expect);
        }
    }
}

TEST_CASE("resolve_targets is deterministic and nested across delta") {
    SplitMix64 rng(37);
    auto g = DirectedGraph::from_edges(40, oracles::random_edges(40, 120, rng))
                 .with_susceptibility(oracles::random_susceptibilities(40, rng));

    for (TargetStrategy strategy :
         {TargetStrategy::Random, TargetStrategy::DegreeDescending,
          TargetStrategy::SusceptibilityDescending, TargetStrategy::DistanceFromSeed}) {
        std::optional<NodeId> seed;
        if (strategy == TargetStrategy::DistanceFromSeed) seed = 0;

        auto once = resolve_targets(g, 0.6, strategy, seed, 777);
        auto again = resolve_targets(g, 0.6, strategy, seed, 777);
        CHECK(once == again);

        auto small = resolve_targets(g, 0.25, strategy, seed, 777);
        std::set<NodeId> large_set(once.begin(), once.end());
        for (NodeId v : small) CHECK(large_set.count(v) == 1);
        // prefix property, not just containment
        for (std::size_t i = 0; i < small.size(); ++i) CHECK(small[i] == once[i]);
    }
}

TEST_CASE("distance strategy requires a seed; delta is range-checked") {
    auto g = degree_ladder();
    CHECK_THROWS_AS(resolve_targets(g, 0.5, TargetStrategy::DistanceFromSeed, {}, 1),
                    ValidationError);
    CHECK_THROWS_AS(resolve_targets(g, 1.5, TargetStrategy::Random, {}, 1), ValidationError);
}

TEST_CASE("effective susceptibility: identity, full suppression, published strengths") {
    InterventionPlan none;
    CHECK(effective_susceptibility(0.7, none, false, false) == 0.7);

    InterventionPlan full;
    full.nudge = NudgeSpec{1.0};
    CHECK(effective_susceptibility(1.0, full, false, false) == 0.0);

    // the three estimated strengths stacked on base 0.5:
    // 0.5 * 0.857 * 0.796 * 0.658
    InterventionPlan all;
    all.nudge = NudgeSpec{0.143};
    all.prebunk = PrebunkSpec{0.204, 1.0, TargetStrategy::Random, 0, false};
    all.contextualize = ContextualizeSpec{0.342, std::nullopt, 0.0};
    CHECK(effective_susceptibility(0.5, all, true, true) ==
          doctest::Approx(0.224434588).epsilon(1e-9));
}

TEST_CASE("stacking is multiplicative: nudge+prebunk equals one combined nudge") {
    // dyadic strengths make the algebraic identity exact in floating point
    const double e1 = 0.5, e2 = 0.25;
    InterventionPlan stacked;
    stacked.nudge = NudgeSpec{e1};
    stacked.prebunk = PrebunkSpec{e2, 1.0, TargetStrategy::Random, 0, false};
    InterventionPlan single;
    single.nudge = NudgeSpec{1.0 - (1.0 - e1) * (1.0 - e2)};

    for (double base : {0.0, 0.125, 0.3, 0.77, 1.0})
        CHECK(effective_susceptibility(base, stacked, true, false) ==
              effective_susceptibility(base, single, false, false));

    // generic strengths agree to rounding error
    SplitMix64 rng(41);
    for (int i = 0; i < 200; ++i) {
        double a = rng.next_unit(), b = rng.next_unit(), base = rng.next_unit();
        InterventionPlan two;
        two.nudge = NudgeSpec{a};
        two.prebunk = PrebunkSpec{b, 1.0, TargetStrategy::Random, 0, false};
        InterventionPlan one;
        one.nudge = NudgeSpec{1.0 - (1.0 - a) * (1.0 - b)};
        CHECK(effective_susceptibility(base, two, true, false) ==
              doctest::Approx(effective_susceptibility(base, one, false, false))
                  .epsilon(1e-14));
    }
}

TEST_CASE("effective susceptibility is non-increasing in every strength") {
    SplitMix64 rng(43);
    for (int i = 0; i < 100; ++i) {
        double base = rng.next_unit();
        double lo = 0.3 * rng.next_unit(), hi = lo + 0.5 * rng.next_unit();
        for (int which = 0; which < 3; ++which) {
            auto plan_with = [&](double eps) {
                InterventionPlan p;
                if (which == 0) p.nudge = NudgeSpec{eps};
                if (which == 1) p.prebunk = PrebunkSpec{eps, 1.0, TargetStrategy::Random, 0, false};
                if (which == 2) p.contextualize = ContextualizeSpec{eps, std::nullopt, 0.0};
                return p;
            };
            CHECK(effective_susceptibility(base, plan_with(hi), true, true) <=
                  effective_susceptibility(base, plan_with(lo), true, true));
        }
    }
}

TEST_CASE("plan validation rejects out-of-range and conflicting settings") {
    InterventionPlan bad;
    bad.nudge = NudgeSpec{1.5};
    CHECK_THROWS_AS(bad.validate(), ValidationError);

    InterventionPlan conflict;
    conflict.contextualize = ContextualizeSpec{0.3, 0.5, 1.0};
    CHECK_THROWS_AS(conflict.validate(), ValidationError);

    InterventionPlan neither;
    neither.contextualize = ContextualizeSpec{0.3, std::nullopt, std::nullopt};
    CHECK_THROWS_AS(neither.validate(), ValidationError);
}
