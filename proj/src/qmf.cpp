#include "ctic/qmf.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "ctic/error.hpp"
#include "ctic/rng.hpp"

namespace ctic {

namespace {

/// Matvec oracle for M = eta * diag(s) * A, with A the in-adjacency pattern
/// (A[v][u] = 1 iff edge u->v). The 0/1 pattern is built once; different
/// susceptibility vectors reuse it as a diagonal rescale.
class TransmissionOperator {
public:
    explicit TransmissionOperator(const DirectedGraph& graph) : graph_(graph) {
        const NodeId n = graph.node_count();
        std::vector<Eigen::Triplet<double>> triplets;
        triplets.reserve(static_cast<std::size_t>(graph.edge_count()));
        for (NodeId v = 0; v < n; ++v)
            for (NodeId u : graph.in_neighbors(v)) triplets.emplace_back(v, u, 1.0);
        adjacency_.resize(n, n);
        adjacency_.setFromTriplets(triplets.begin(), triplets.end());
    }

    void set_scale(double eta, std::span<const double> susceptibility) {
        const auto n = static_cast<std::size_t>(graph_.node_count());
        if (susceptibility.size() != n)
            throw ValidationError("susceptibility override size does not match node count");
        scale_.resize(static_cast<Eigen::Index>(n));
        for (std::size_t v = 0; v < n; ++v) {
            if (!(susceptibility[v] >= 0.0))
                throw ValidationError("susceptibility must be non-negative");
            scale_[static_cast<Eigen::Index>(v)] = eta * susceptibility[v];
        }
    }

    Eigen::Index size() const { return adjacency_.rows(); }

    Eigen::VectorXd apply(const Eigen::VectorXd& x) const {
        return scale_.cwiseProduct(adjacency_ * x);
    }

    /// Largest row sum of M; bounds the Perron root from above.
    double max_row_sum() const {
        Eigen::VectorXd row_sums = adjacency_ * Eigen::VectorXd::Ones(adjacency_.cols());
        return (scale_.cwiseProduct(row_sums)).maxCoeff();
    }

    /// Kahn's algorithm on the support (edges u->v with scale[v] > 0):
    /// an acyclic support means M is nilpotent and the radius is exactly 0.
    bool support_is_acyclic() const {
        const NodeId n = graph_.node_count();
        std::vector<std::int32_t> indeg(static_cast<std::size_t>(n), 0);
        for (NodeId v = 0; v < n; ++v)
            if (scale_[v] > 0.0) indeg[static_cast<std::size_t>(v)] = graph_.in_degree(v);
        std::deque<NodeId> frontier;
        for (NodeId v = 0; v < n; ++v)
            if (indeg[static_cast<std::size_t>(v)] == 0) frontier.push_back(v);
        std::int64_t removed = 0;
        while (!frontier.empty()) {
            NodeId u = frontier.front();
            frontier.pop_front();
            ++removed;
            for (NodeId v : graph_.out_neighbors(u)) {
                if (scale_[v] <= 0.0) continue;
                if (--indeg[static_cast<std::size_t>(v)] == 0) frontier.push_back(v);
            }
        }
        return removed == n;
    }

private:
    const DirectedGraph& graph_;
    Eigen::SparseMatrix<double, Eigen::RowMajor> adjacency_;
    Eigen::VectorXd scale_;
};

SpectralReport power_iteration(const TransmissionOperator& op, double tol, int max_iter) {
    if (!(tol > 0.0)) throw ValidationError("tolerance must be positive");
    if (max_iter < 1) throw ValidationError("max_iter must be >= 1");

    SpectralReport report;
    const Eigen::Index n = op.size();
    if (n == 0) {
        report.converged = true;
        return report;
    }
    if (op.max_row_sum() <= 0.0 || op.support_is_acyclic()) {
        report.converged = true;
        return report;
    }

    const double shift = 0.5 * op.max_row_sum();

    Eigen::VectorXd x =
        Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(static_cast<double>(n))).normalized();
    SplitMix64 rng(0x51EC7A1ULL);

    double best_lambda = 0.0;
    double best_residual = std::numeric_limits<double>::infinity();
    double checkpoint_residual = std::numeric_limits<double>::infinity();

    for (int k = 1; k <= max_iter; ++k) {
        Eigen::VectorXd y = op.apply(x);
        const double lambda = x.dot(y);                     // Rayleigh quotient of M
        const double residual = (y - lambda * x).norm();    // ||Mx - lambda x||, ||x|| = 1
        const double rel = residual / (lambda + shift);     // denominator >= shift > 0

        report.iterations = k;
        if (rel < best_residual) {
            best_residual = rel;
            best_lambda = lambda;
        }
        if (rel <= tol) {
            report.converged = true;
            break;
        }

        x = (y + shift * x).normalized();

        if (k % 500 == 0) {
            // restart with a perturbed positive vector on stagnation
            if (best_residual > 0.5 * checkpoint_residual) {
                for (Eigen::Index i = 0; i < n; ++i) x[i] += 0.1 * rng.next_unit();
                x.normalize();
            }
            checkpoint_residual = best_residual;
        }
    }

    report.spectral_radius = std::max(0.0, best_lambda);
    report.residual = best_residual;
    return report;
}

} // namespace

SpectralReport spectral_radius(const DirectedGraph& graph, double eta,
                               std::span<const double> susceptibility_override,
                               double tol, int max_iter) {
    if (!(eta >= 0.0)) throw ValidationError("eta must be non-negative");
    TransmissionOperator op(graph);
    op.set_scale(eta, susceptibility_override.empty()
                          ? std::span<const double>(graph.susceptibilities())
                          : susceptibility_override);
    return power_iteration(op, tol, max_iter);
}

std::optional<double> nudge_critical_epsilon(const DirectedGraph& graph, double eta) {
    const double lambda0 = spectral_radius(graph, 1.0).spectral_radius;
    const double r = eta * lambda0;
    if (r < 1.0) return std::nullopt;
    return std::max(0.0, 1.0 - 1.0 / r);
}

std::optional<double> prebunk_critical_epsilon(const DirectedGraph& graph, double eta,
                                               double delta, TargetStrategy strategy,
                                               std::optional<NodeId> seed_node,
                                               std::uint64_t rng_seed, double bisect_tol) {
    if (!(bisect_tol > 0.0)) throw ValidationError("bisect_tol must be positive");

    auto targets = resolve_targets(graph, delta, strategy, seed_node, rng_seed);

    TransmissionOperator op(graph);
    std::vector<double> scaled(graph.susceptibilities());
    auto radius_at = [&](double eps) {
        for (std::size_t i = 0; i < scaled.size(); ++i)
            scaled[i] = graph.susceptibilities()[i];
        for (NodeId v : targets) scaled[static_cast<std::size_t>(v)] *= 1.0 - eps;
        op.set_scale(eta, scaled);
        return power_iteration(op, 1e-10, 10000).spectral_radius;
    };

    const double radius0 = radius_at(0.0);
    if (radius0 < 1.0) return std::nullopt;  // subcritical without intervention
    if (radius0 == 1.0) return 0.0;
    if (radius_at(1.0) > 1.0) return std::nullopt;  // unattainable at this delta

    // The radius moves by at most radius0 over eps in [0, 1], so an
    // eps-interval of bisect_tol / radius0 pins |Lambda - 1| within tol.
    const double eps_tol = std::max(1e-12, bisect_tol / std::max(1.0, radius0));
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 80 && hi - lo > eps_tol; ++i) {
        double mid = 0.5 * (lo + hi);
        (radius_at(mid) >= 1.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

CriticalCurve nudge_critical_curve(const DirectedGraph& graph, std::span<const double> eta_grid) {
    if (eta_grid.empty()) throw ValidationError("eta grid is empty");
    if (!std::is_sorted(eta_grid.begin(), eta_grid.end()))
        throw ValidationError("eta grid must be ascending");

    const double lambda0 = spectral_radius(graph, 1.0).spectral_radius;
    CriticalCurve curve;
    curve.axis.assign(eta_grid.begin(), eta_grid.end());
    curve.critical_epsilon.reserve(eta_grid.size());
    for (double eta : eta_grid) {
        const double r = eta * lambda0;
        if (r < 1.0)
            curve.critical_epsilon.emplace_back(std::nullopt);
        else
            curve.critical_epsilon.emplace_back(std::max(0.0, 1.0 - 1.0 / r));
    }
    return curve;
}

CriticalCurve prebunk_critical_curve(const DirectedGraph& graph, double eta,
                                     std::span<const double> delta_grid,
                                     TargetStrategy strategy, std::optional<NodeId> seed_node,
                                     std::uint64_t rng_seed, double bisect_tol) {
    if (delta_grid.empty()) throw ValidationError("delta grid is empty");
    if (!std::is_sorted(delta_grid.begin(), delta_grid.end()))
        throw ValidationError("delta grid must be ascending");

    CriticalCurve curve;
    curve.axis.assign(delta_grid.begin(), delta_grid.end());
    curve.critical_epsilon.reserve(delta_grid.size());
    for (double delta : delta_grid)
        curve.critical_epsilon.push_back(
            prebunk_critical_epsilon(graph, eta, delta, strategy, seed_node, rng_seed, bisect_tol));
    return curve;
}

} // namespace ctic
