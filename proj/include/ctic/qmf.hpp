#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ctic/graph.hpp"
#include "ctic/interventions.hpp"

namespace ctic {

/// Result of the Perron-root computation on the transmission matrix
/// M[v][u] = eta * s_v for every edge u->v (same nonzero spectrum as
/// eta * A * diag(s), since diag(s)A and A diag(s) are similar products).
struct SpectralReport {
    double spectral_radius = 0.0;
    int iterations = 0;
    bool converged = false;
    double residual = 0.0;  // relative residual of the returned estimate
};

/// Power iteration with L2 normalization and a Rayleigh-quotient convergence
/// test. An acyclic transmission support short-circuits to an exact 0
/// (nilpotent matrix); otherwise the iteration runs on the diagonally
/// shifted operator M + cI, which is aperiodic whenever M is irreducible,
/// so directed cycles (eigenvalues spread on a circle) still converge.
/// Non-convergence within max_iter returns the best estimate with
/// converged = false.
SpectralReport spectral_radius(const DirectedGraph& graph, double eta,
                               std::span<const double> susceptibility_override = {},
                               double tol = 1e-8, int max_iter = 10000);

/// Critical nudge strength: with Lambda0 = Lambda_max(A diag(s)), uniform
/// rescaling gives eps* = 1 - 1/(eta * Lambda0). Empty when eta * Lambda0 < 1
/// (already subcritical with no intervention).
std::optional<double> nudge_critical_epsilon(const DirectedGraph& graph, double eta);

/// Critical prebunk strength at coverage delta: bisects eps on
/// Lambda_max(matrix with s_v -> (1-eps) s_v on the resolved target set) = 1.
/// The Perron root is monotone in matrix entries, so bisection is valid.
/// Empty when the graph is already subcritical at eps = 0 or still
/// supercritical at eps = 1 (complete suppression unattainable at this delta).
std::optional<double> prebunk_critical_epsilon(const DirectedGraph& graph, double eta,
                                               double delta, TargetStrategy strategy,
                                               std::optional<NodeId> seed_node,
                                               std::uint64_t rng_seed,
                                               double bisect_tol = 1e-3);

struct CriticalCurve {
    std::vector<double> axis;
    std::vector<std::optional<double>> critical_epsilon;  // empty where unattainable
};

/// eps*(eta) for nudging over an ascending eta grid (closed form per point).
CriticalCurve nudge_critical_curve(const DirectedGraph& graph, std::span<const double> eta_grid);

/// eps*(delta) for prebunking at fixed eta over an ascending delta grid.
CriticalCurve prebunk_critical_curve(const DirectedGraph& graph, double eta,
                                     std::span<const double> delta_grid,
                                     TargetStrategy strategy, std::optional<NodeId> seed_node,
                                     std::uint64_t rng_seed, double bisect_tol = 1e-3);

} // namespace ctic
