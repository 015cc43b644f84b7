#pragma once

#include "levylab/domain.hpp"
#include "levylab/errors.hpp"
#include "levylab/generator.hpp"
#include "levylab/grid.hpp"
#include "levylab/killed.hpp"
#include "levylab/semigroup.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace levylab {

/// Global indices of the nodes of U₊ = U ∩ {x > m(U)}.
inline std::vector<std::size_t> plus_node_indices(const Grid1D& g, const SubDomain& u) {
    const NodeRange r = node_range(g, u);
    std::vector<std::size_t> out;
    for (std::size_t j = r.first; j < r.last; ++j) {
        if (g.node(j) > u.m()) out.push_back(j);
    }
    return out;
}

/// The node of U₊ closest to x (the lower one on ties).
inline std::size_t nearest_plus_node(const Grid1D& g, const SubDomain& u, double x) {
    const auto plus = plus_node_indices(g, u);
    if (plus.empty()) throw GridError("U+ contains no grid nodes");
    std::size_t best = plus.front();
    for (std::size_t j : plus) {
        if (std::abs(g.node(j) - x) < std::abs(g.node(best) - x) - 1e-15) best = j;
    }
    return best;
}

/// Difference kernel f_s^U(x, z) on a one-dimensional grid for a fixed U and s.
///
/// f_s^U(x, z) = Σ_{y ∈ U₊} [P_U(s)_{x y} - P_U(s)_{T_U x, y}] · [ν(y - z) - ν(T_U y - z)],
/// where P_U(s) = exp(s L_U) already carries the cell volume h.
class DifferenceKernel {
public:
    DifferenceKernel(const DiscretizedOperator& op_d, const SubDomain& u, double s)
        : grid_(op_d.grid), model_(op_d.model), range_(node_range(op_d.grid, u)), sub_(u), s_(s) {
        if (!(s > 0.0)) throw DomainError("difference kernel requires s > 0");
        if (op_d.dimension != 1) throw ParameterError("difference kernel is implemented for d = 1");
        const auto op_u = restrict_to(op_d, range_);
        kernel_ = nonnegative_expm(op_u.matrix, s);
        plus_ = plus_node_indices(grid_, u);
    }

    /// Nodes of U₊ (global indices).
    [[nodiscard]] const std::vector<std::size_t>& plus_nodes() const { return plus_; }
    [[nodiscard]] const NodeRange& range() const { return range_; }
    [[nodiscard]] const SubDomain& sub() const { return sub_; }
    [[nodiscard]] double s() const { return s_; }

    /// P_U(s)_{x y} - P_U(s)_{T_U x, y} for global node indices x, y ∈ U.
    [[nodiscard]] double difference_density(std::size_t x, std::size_t y) const {
        const auto lx = static_cast<Eigen::Index>(x - range_.first);
        const auto ltx = static_cast<Eigen::Index>(range_.reflect(x) - range_.first);
        const auto ly = static_cast<Eigen::Index>(y - range_.first);
        return kernel_(lx, ly) - kernel_(ltx, ly);
    }

    /// f_s^U(x, z) for x a node of U₊ and z outside the closure of U.
    [[nodiscard]] double operator()(std::size_t x, double z) const {
        if (!range_.contains(x) || !(grid_.node(x) > sub_.m())) throw DomainError("x must be a node of U+");
        if (z >= sub_.l && z <= sub_.r) throw DomainError("z must lie outside the closure of U");
        double acc = 0.0;
        for (std::size_t y : plus_) {
            const double yv = grid_.node(y);
            const double ty = grid_.node(range_.reflect(y));
            const double nu_diff = levy_density(model_, std::abs(yv - z)) - levy_density(model_, std::abs(ty - z));
            if (nu_diff != 0.0) acc += difference_density(x, y) * nu_diff;
        }
        return acc;
    }

private:
    Grid1D grid_;
    LevyModel model_;
    NodeRange range_;
    SubDomain sub_;
    double s_;
    Eigen::MatrixXd kernel_;
    std::vector<std::size_t> plus_;
};

inline double difference_kernel(const LevyModel& m, const Domain& dom, const SubDomain& u, double x, double s, double z,
                                const Grid1D& g) {
    detail::require_grid(dom, g);
    const auto op = assemble_generator(m, g);
    const DifferenceKernel f(op, u, s);
    return f(g.index_of(x), z);
}

/// Both sides of ψ_t^D(x) - ψ_t^D(T_U x) = ∫_{U^c} ∫_0^t f_s^U(x, z) ψ_{t-s}^D(z) ds dz.
struct IdentityResidual {
    double lhs = 0.0;
    double rhs = 0.0;
    double residual = 0.0;
    /// Contribution of L(U) = (-∞, l(U)) to the right-hand side.
    double left_term = 0.0;
    /// Contribution of R(U) = (r(U), ∞) to the right-hand side.
    double right_term = 0.0;
    std::size_t panels = 0;
    std::size_t nodes = 0;
};

/// Evaluates the identity on the grid. The inner z-integral uses the scheme's own jump
/// rates into the nodes of D \ U (points outside D carry ψ = 0), and the time integral
/// uses the trapezoidal rule on `panels` panels.
inline IdentityResidual check_difference_identity(const DiscretizedOperator& op_d, const SubDomain& u, std::size_t x,
                                                  double t, std::size_t panels) {
    if (op_d.dimension != 1) throw ParameterError("difference identity is implemented for d = 1");
    if (!(t > 0.0)) throw DomainError("difference identity requires t > 0");
    if (panels == 0) throw ParameterError("at least one time panel is required");
    const Grid1D& g = op_d.grid;
    const NodeRange range = node_range(g, u);
    if (!range.contains(x) || !(g.node(x) > u.m())) throw DomainError("x must be a node of U+");
    const std::size_t tx = range.reflect(x);

    const SpectralSemigroup sg_d(op_d.matrix);
    const auto op_u = restrict_to(op_d, range);
    const SpectralSemigroup sg_u(op_u.matrix);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(op_d.size());

    IdentityResidual out;
    out.panels = panels;
    out.nodes = g.n;
    const Eigen::VectorXd psi_t = sg_d.apply(t, ones);
    out.lhs = psi_t(static_cast<Eigen::Index>(x)) - psi_t(static_cast<Eigen::Index>(tx));

    const std::vector<std::size_t> plus = plus_node_indices(g, u);
    std::vector<std::size_t> outside;
    for (std::size_t j = 0; j < g.n; ++j) {
        if (!range.contains(j)) outside.push_back(j);
    }
    // K(y, z) = L(y, z) - L(T_U y, z)
    Eigen::MatrixXd k(static_cast<Eigen::Index>(plus.size()), static_cast<Eigen::Index>(outside.size()));
    for (std::size_t p = 0; p < plus.size(); ++p) {
        for (std::size_t q = 0; q < outside.size(); ++q) {
            const auto y = static_cast<Eigen::Index>(plus[p]);
            const auto ty = static_cast<Eigen::Index>(range.reflect(plus[p]));
            const auto z = static_cast<Eigen::Index>(outside[q]);
            k(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q)) = op_d.matrix(y, z) - op_d.matrix(ty, z);
        }
    }
    const auto lx = static_cast<Eigen::Index>(x - range.first);
    const auto ltx = static_cast<Eigen::Index>(tx - range.first);
    const double dt = t / static_cast<double>(panels);
    double left = 0.0;
    double right = 0.0;
    for (std::size_t step = 0; step <= panels; ++step) {
        const double s = dt * static_cast<double>(step);
        const double w = (step == 0 || step == panels) ? 0.5 * dt : dt;
        const Eigen::VectorXd row_x = sg_u.row(lx, s);
        const Eigen::VectorXd row_tx = sg_u.row(ltx, s);
        Eigen::VectorXd d(static_cast<Eigen::Index>(plus.size()));
        for (std::size_t p = 0; p < plus.size(); ++p) {
            const auto ly = static_cast<Eigen::Index>(plus[p] - range.first);
            d(static_cast<Eigen::Index>(p)) = row_x(ly) - row_tx(ly);
        }
        const Eigen::VectorXd psi = (t - s) == 0.0 ? ones : sg_d.apply(t - s, ones);
        const Eigen::VectorXd f = k.transpose() * d;  // f_s(x, z) for z ∈ D \ U nodes
        for (std::size_t q = 0; q < outside.size(); ++q) {
            const double contrib = w * f(static_cast<Eigen::Index>(q)) * psi(static_cast<Eigen::Index>(outside[q]));
            if (outside[q] < range.first) {
                left += contrib;
            } else {
                right += contrib;
            }
        }
    }
    out.left_term = left;
    out.right_term = right;
    out.rhs = left + right;
    out.residual = std::abs(out.lhs - out.rhs);
    return out;
}

inline IdentityResidual check_difference_identity(const LevyModel& m, const Domain& dom, const SubDomain& u, double x,
                                                  double t, const Grid1D& g, std::size_t panels) {
    detail::require_grid(dom, g);
    const auto op = assemble_generator(m, g);
    return check_difference_identity(op, u, g.index_of(x), t, panels);
}

/// Extremes of f_s^U over the positive and negative zones and of the difference density.
struct SignSweep {
    double min_positive_zone = std::numeric_limits<double>::infinity();
    double max_negative_zone = -std::numeric_limits<double>::infinity();
    double min_difference_density = std::numeric_limits<double>::infinity();
    std::size_t positive_evaluations = 0;
    std::size_t negative_evaluations = 0;
};

/// Exterior test points of U: nodes of D \ U plus points outside D out to distance 2a.
inline std::vector<double> exterior_points(const Grid1D& g, const SubDomain& u) {
    std::vector<double> z;
    const NodeRange r = node_range(g, u);
    for (std::size_t j = 0; j < g.n; ++j) {
        if (!r.contains(j)) z.push_back(g.node(j));
    }
    const double h = g.h();
    for (std::size_t k = 0; k < 2 * g.n; ++k) {
        const double off = g.a + (static_cast<double>(k) + 0.5) * h;
        z.push_back(off);
        z.push_back(-off);
    }
    for (double far : {4.0, 8.0, 32.0}) {
        z.push_back(far * g.a);
        z.push_back(-far * g.a);
    }
    std::sort(z.begin(), z.end());
    return z;
}

inline SignSweep sweep_sign_structure(const DifferenceKernel& f, const Grid1D& g) {
    SignSweep out;
    const SubDomain& u = f.sub();
    const auto& plus = f.plus_nodes();
    const auto zs = exterior_points(g, u);
    for (std::size_t x : plus) {
        for (std::size_t y : plus) out.min_difference_density = std::min(out.min_difference_density, f.difference_density(x, y));
        for (double z : zs) {
            const double v = f(x, z);
            const Point zp{z, 0.0};
            if (u.in_positive_zone(zp)) {
                out.min_positive_zone = std::min(out.min_positive_zone, v);
                ++out.positive_evaluations;
            } else if (u.in_negative_zone(zp)) {
                out.max_negative_zone = std::max(out.max_negative_zone, v);
                ++out.negative_evaluations;
            }
        }
    }
    return out;
}

}  // namespace levylab
