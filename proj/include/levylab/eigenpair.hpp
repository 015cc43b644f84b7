#pragma once

#include "levylab/domain.hpp"
#include "levylab/errors.hpp"
#include "levylab/generator.hpp"
#include "levylab/grid.hpp"
#include "levylab/killed.hpp"
#include "levylab/semigroup.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

namespace levylab {

/// One level of a refinement study.
struct RefinementLevel {
    std::size_t nodes = 0;
    double lambda = 0.0;
};

/// First Dirichlet eigenpair of -L on a grid.
struct EigenPair {
    double lambda = 0.0;
    /// φ₁ on the nodes, normalized so that Σ φ₁(x_j)² h = 1 and positive at the node nearest 0.
    std::vector<double> phi;
    /// Discrete L² norm of Lφ₁ + λ₁φ₁.
    double residual = 0.0;
    std::size_t iterations = 0;
    /// Second eigenvalue (for the spectral gap); 0 when not computed.
    double lambda2 = 0.0;
    std::vector<RefinementLevel> history;
    /// Richardson-extrapolated λ₁ (equals `lambda` without a refinement study).
    double extrapolated = 0.0;
    /// Observed convergence order used by the extrapolation.
    double order = 0.0;
};

inline void to_json(nlohmann::json& j, const RefinementLevel& r) { j = {{"N", r.nodes}, {"lambda1", r.lambda}}; }

inline void to_json(nlohmann::json& j, const EigenPair& e) {
    j = nlohmann::json{{"lambda1", e.lambda},     {"lambda2", e.lambda2}, {"residual", e.residual},
                       {"iterations", e.iterations}, {"refinement", e.history}, {"lambda1_extrapolated", e.extrapolated},
                       {"observed_order", e.order}};
}

struct EigenOptions {
    std::size_t max_iterations = 1000;
    double relative_residual = 1e-8;
    bool second = true;
};

namespace detail {

inline double discrete_norm(const Eigen::VectorXd& v, double cell) { return std::sqrt(v.squaredNorm() * cell); }

inline Eigen::Index central_node(const DiscretizedOperator& op) {
    Eigen::Index best = 0;
    double dist = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < op.size(); ++i) {
        const Point p = op.dimension == 1 ? Point{op.grid.node(static_cast<std::size_t>(i)), 0.0}
                                          : op.grid2.node(static_cast<std::size_t>(i));
        const double r = std::hypot(p[0], p[1]);
        if (r < dist - 1e-14) {
            dist = r;
            best = i;
        }
    }
    return best;
}

inline double cell_volume(const DiscretizedOperator& op) {
    return op.dimension == 1 ? op.grid.h() : op.grid2.h() * op.grid2.h();
}

}  // namespace detail

/// Smallest eigenvalue of -L and its positive eigenvector by inverse iteration.
inline EigenPair first_eigenpair(const DiscretizedOperator& op, const EigenOptions& opt = {}) {
    const Eigen::MatrixXd neg = -op.matrix;
    const Eigen::LLT<Eigen::MatrixXd> llt(neg);
    if (llt.info() != Eigen::Success) throw NumericalError("generator is not negative definite (assembly error)");
    const double cell = detail::cell_volume(op);
    const Eigen::Index n = op.size();

    const auto iterate = [&](Eigen::VectorXd v, const Eigen::VectorXd* deflate, std::size_t& its, double& lambda,
                             double& residual) {
        const auto project = [&](Eigen::VectorXd& w) {
            if (deflate != nullptr) w -= deflate->dot(w) * cell * *deflate;
            w /= detail::discrete_norm(w, cell);
        };
        project(v);
        for (its = 1; its <= opt.max_iterations; ++its) {
            Eigen::VectorXd w = llt.solve(v);
            project(w);
            v = std::move(w);
            lambda = v.dot(neg * v) * cell;
            residual = detail::discrete_norm(op.matrix * v + lambda * v, cell);
            if (residual < opt.relative_residual * lambda) return v;
        }
        throw NumericalError("inverse iteration did not converge");
    };

    EigenPair out;
    Eigen::VectorXd phi = iterate(Eigen::VectorXd::Ones(n), nullptr, out.iterations, out.lambda, out.residual);
    if (phi(detail::central_node(op)) < 0.0) phi = -phi;
    out.phi.assign(phi.data(), phi.data() + n);
    out.extrapolated = out.lambda;
    out.history.push_back({static_cast<std::size_t>(n), out.lambda});

    if (opt.second && op.dimension == 1) {
        Eigen::VectorXd start(n);
        for (Eigen::Index i = 0; i < n; ++i) start(i) = op.grid.node(static_cast<std::size_t>(i));
        std::size_t its = 0;
        double residual = 0.0;
        iterate(start, &phi, its, out.lambda2, residual);
    }
    return out;
}

/// Eigenpair at N with a refinement study over N/2, N and 2N.
///
/// The order p is estimated from the three levels and λ₁ is extrapolated as
/// λ(2N) + (λ(2N) - λ(N)) / (2^p - 1). The returned φ₁ belongs to the grid of size N.
inline EigenPair first_eigenpair(const LevyModel& m, const Domain& dom, const Grid1D& g, const EigenOptions& opt = {}) {
    detail::require_grid(dom, g);
    EigenPair base = first_eigenpair(assemble_generator(m, g), opt);
    base.history.clear();
    EigenOptions quick = opt;
    quick.second = false;
    std::vector<RefinementLevel> levels;
    if (g.n >= 4 && g.n % 2 == 0) levels.push_back({g.n / 2, first_eigenpair(assemble_generator(m, Grid1D(g.a, g.n / 2)), quick).lambda});
    levels.push_back({g.n, base.lambda});
    levels.push_back({2 * g.n, first_eigenpair(assemble_generator(m, Grid1D(g.a, 2 * g.n)), quick).lambda});
    base.history = levels;

    const double fine = levels.back().lambda;
    const double mid = levels[levels.size() - 2].lambda;
    double order = 2.0;
    if (levels.size() == 3) {
        const double d1 = levels[0].lambda - mid;
        const double d2 = mid - fine;
        if (d1 != 0.0 && d2 != 0.0 && d1 / d2 > 1.0) order = std::log2(d1 / d2);
    }
    base.order = order;
    base.extrapolated = fine + (fine - mid) / (std::exp2(order) - 1.0);
    return base;
}

/// Deviation of e^{λ₁t} ψ_t(x) / (φ₁(x) ∫φ₁) from 1, maximized over the nodes, for each t.
struct EigenLimitReport {
    std::vector<double> times;
    std::vector<double> deviation;
    double lambda1 = 0.0;
    double gap = 0.0;
};

inline void to_json(nlohmann::json& j, const EigenLimitReport& r) {
    j = nlohmann::json{{"t", r.times}, {"max_relative_deviation", r.deviation}, {"lambda1", r.lambda1}, {"gap", r.gap}};
}

inline EigenLimitReport eigen_limit_check(const DiscretizedOperator& op, const EigenPair& pair,
                                          const std::vector<double>& times) {
    const auto psi = survival_pde(op, times);
    const double cell = detail::cell_volume(op);
    double mass = 0.0;
    for (double v : pair.phi) mass += v * cell;
    EigenLimitReport rep;
    rep.times = times;
    rep.lambda1 = pair.lambda;
    rep.gap = pair.lambda2 - pair.lambda;
    for (std::size_t k = 0; k < times.size(); ++k) {
        double worst = 0.0;
        for (std::size_t i = 0; i < pair.phi.size(); ++i) {
            const double ratio = std::exp(pair.lambda * times[k]) * psi[k][i] / (pair.phi[i] * mass);
            worst = std::max(worst, std::abs(ratio - 1.0));
        }
        rep.deviation.push_back(worst);
    }
    return rep;
}

inline EigenLimitReport eigen_limit_check(const LevyModel& m, const Domain& dom, const Grid1D& g,
                                          const std::vector<double>& times) {
    detail::require_grid(dom, g);
    const auto op = assemble_generator(m, g);
    return eigen_limit_check(op, first_eigenpair(op), times);
}

}  // namespace levylab
