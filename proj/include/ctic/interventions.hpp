#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ctic/graph.hpp"

namespace ctic {

enum class TargetStrategy {
    Random,
    DegreeDescending,
    SusceptibilityDescending,
    DistanceFromSeed,
};

std::string to_string(TargetStrategy s);
TargetStrategy target_strategy_from_string(const std::string& name);

/// Uniform pre-diffusion susceptibility reduction on all nodes.
struct NudgeSpec {
    double epsilon = 0.0;
};

/// Pre-diffusion susceptibility reduction on a delta-fraction of nodes
/// chosen by `strategy`. With the Random strategy the target set is
/// re-drawn per Monte Carlo run from seeds derived from `rng_seed` unless
/// `fix_targets` is set; deterministic rankings are the same either way.
struct PrebunkSpec {
    double epsilon = 0.0;
    double delta = 0.0;
    TargetStrategy strategy = TargetStrategy::Random;
    std::uint64_t rng_seed = 0;
    bool fix_targets = false;
};

/// Mid-diffusion susceptibility reduction applied to not-yet-active nodes
/// from time T onward. Exactly one of `phi` (diffusion stage, resolved to a
/// time against the no-intervention curve) or `explicit_time` (hours) is set.
struct ContextualizeSpec {
    double epsilon = 0.0;
    std::optional<double> phi;
    std::optional<double> explicit_time;
};

struct InterventionPlan {
    std::optional<NudgeSpec> nudge;
    std::optional<PrebunkSpec> prebunk;
    std::optional<ContextualizeSpec> contextualize;

    bool empty() const { return !nudge && !prebunk && !contextualize; }
    void validate() const;
};

/// Ordered target set for a prebunking intervention: the first
/// round(delta * node_count) nodes of the strategy's ranking (capped by the
/// candidate pool). Ties break by ascending node id; when `seed_node` is
/// given it is excluded from the candidates (intervening on the already
/// active source is a no-op in the model). Deterministic in all arguments.
std::vector<NodeId> resolve_targets(const DirectedGraph& graph, double delta,
                                    TargetStrategy strategy,
                                    std::optional<NodeId> seed_node,
                                    std::uint64_t rng_seed);

/// Post-intervention susceptibility of a node:
/// base * (1-e_nud) * (1-e_pre if prebunk target) * (1-e_ctx if t >= T).
double effective_susceptibility(double base, const InterventionPlan& plan,
                                bool node_is_prebunk_target,
                                bool time_at_or_after_ctx);

} // namespace ctic
