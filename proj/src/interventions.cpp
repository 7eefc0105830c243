#include "ctic/interventions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ctic/error.hpp"
#include "ctic/rng.hpp"

namespace ctic {

std::string to_string(TargetStrategy s) {
    switch (s) {
        case TargetStrategy::Random: return "random";
        case TargetStrategy::DegreeDescending: return "degree";
        case TargetStrategy::SusceptibilityDescending: return "susceptibility";
        case TargetStrategy::DistanceFromSeed: return "distance";
    }
    return "?";
}

TargetStrategy target_strategy_from_string(const std::string& name) {
    if (name == "random") return TargetStrategy::Random;
    if (name == "degree") return TargetStrategy::DegreeDescending;
    if (name == "susceptibility") return TargetStrategy::SusceptibilityDescending;
    if (name == "distance") return TargetStrategy::DistanceFromSeed;
    throw ValidationError("unknown target strategy: \"" + name +
                          "\" (expected random|degree|susceptibility|distance)");
}

namespace {

void check_unit(double x, const char* what) {
    if (!(x >= 0.0 && x <= 1.0))
        throw ValidationError(std::string(what) + " must lie in [0, 1]");
}

} // namespace

void InterventionPlan::validate() const {
    if (nudge) check_unit(nudge->epsilon, "nudge epsilon");
    if (prebunk) {
        check_unit(prebunk->epsilon, "prebunk epsilon");
        check_unit(prebunk->delta, "prebunk delta");
    }
    if (contextualize) {
        check_unit(contextualize->epsilon, "contextualize epsilon");
        if (contextualize->phi && contextualize->explicit_time)
            throw ValidationError("contextualize: phi and explicit_time are mutually exclusive");
        if (!contextualize->phi && !contextualize->explicit_time)
            throw ValidationError("contextualize: one of phi or explicit_time is required");
        if (contextualize->phi) check_unit(*contextualize->phi, "contextualize phi");
        if (contextualize->explicit_time && !(*contextualize->explicit_time >= 0.0))
            throw ValidationError("contextualize time must be non-negative");
    }
}

std::vector<NodeId> resolve_targets(const DirectedGraph& graph, double delta,
                                    TargetStrategy strategy,
                                    std::optional<NodeId> seed_node,
                                    std::uint64_t rng_seed) {
    if (!(delta >= 0.0 && delta <= 1.0))
        throw ValidationError("target fraction delta must lie in [0, 1]");
    if (strategy == TargetStrategy::DistanceFromSeed && !seed_node)
        throw ValidationError("distance strategy requires a seed node");
    if (seed_node && !graph.valid_node(*seed_node))
        throw ValidationError("seed node out of range");

    const NodeId n = graph.node_count();
    std::vector<NodeId> ranking;
    ranking.reserve(static_cast<std::size_t>(n));
    for (NodeId v = 0; v < n; ++v)
        if (!seed_node || v != *seed_node) ranking.push_back(v);

    switch (strategy) {
        case TargetStrategy::Random: {
            // Full Fisher-Yates shuffle so prefixes are nested across delta.
            SplitMix64 rng(rng_seed);
            for (std::size_t i = ranking.size(); i > 1; --i) {
                std::size_t j = rng.next_below(i);
                std::swap(ranking[i - 1], ranking[j]);
            }
            break;
        }
        case TargetStrategy::DegreeDescending:
            std::stable_sort(ranking.begin(), ranking.end(), [&](NodeId a, NodeId b) {
                return graph.out_degree(a) > graph.out_degree(b);
            });
            break;
        case TargetStrategy::SusceptibilityDescending:
            std::stable_sort(ranking.begin(), ranking.end(), [&](NodeId a, NodeId b) {
                return graph.susceptibility(a) > graph.susceptibility(b);
            });
            break;
        case TargetStrategy::DistanceFromSeed: {
            auto dist = bfs_distance_from(graph, *seed_node);
            auto key = [&](NodeId v) {
                // unreachable nodes rank after every finite distance
                std::int32_t d = dist[static_cast<std::size_t>(v)];
                return d == kUnreachable ? std::numeric_limits<std::int32_t>::max() : d;
            };
            std::stable_sort(ranking.begin(), ranking.end(),
                             [&](NodeId a, NodeId b) { return key(a) < key(b); });
            break;
        }
    }

    // round(delta * N) half-up, capped by the candidate pool
    auto want = static_cast<std::size_t>(std::floor(delta * static_cast<double>(n) + 0.5));
    ranking.resize(std::min(want, ranking.size()));
    return ranking;
}

double effective_susceptibility(double base, const InterventionPlan& plan,
                                bool node_is_prebunk_target,
                                bool time_at_or_after_ctx) {
    if (!(base >= 0.0 && base <= 1.0))
        throw ValidationError("base susceptibility must lie in [0, 1]");
    double s = base;
    if (plan.nudge) s *= 1.0 - plan.nudge->epsilon;
    if (plan.prebunk && node_is_prebunk_target) s *= 1.0 - plan.prebunk->epsilon;
    if (plan.contextualize && time_at_or_after_ctx) s *= 1.0 - plan.contextualize->epsilon;
    return s;
}

} // namespace ctic
