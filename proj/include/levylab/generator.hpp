#pragma once

#include "levylab/errors.hpp"
#include "levylab/grid.hpp"
#include "levylab/levy_model.hpp"
#include "levylab/quadrature.hpp"

#include <Eigen/Dense>

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

namespace levylab {

/// Dense symmetric matrix approximating the generator of the process killed on leaving D.
///
/// Rows lose mass to the exterior; the deficit is stored as `killing`, so that
/// L·1 = -killing. `head` is the coefficient of the second-difference rule that
/// replaces the singular part |y| ≤ h of the jump kernel.
struct DiscretizedOperator {
    LevyModel model;
    int dimension = 1;
    Grid1D grid;
    Grid2D grid2;
    Eigen::MatrixXd matrix;
    Eigen::VectorXd killing;
    double head = 0.0;
    std::string closure;

    [[nodiscard]] Eigen::Index size() const { return matrix.rows(); }
};

/// Translation-invariant stencil of the one-dimensional scheme with spacing h.
///
/// tau[0] is the diagonal and tau[k] the rate to the node at distance k h. The far
/// field uses hat-function weights w_k = ∫ hat_k(y) ν(y) dy over y ≥ h, which form a
/// partition of unity, so the full-line stencil annihilates constants exactly.
struct Stencil1D {
    double h = 0.0;
    double head = 0.0;
    std::vector<double> tau;
    /// exit[k] = Σ_{j ≥ k} tau[j] for k ≥ 1 (rate of jumps of k or more cells to one side).
    std::vector<double> exit;
};

inline Stencil1D stencil_1d(const LevyModel& m, double h, std::size_t count) {
    validate(m);
    detail::require_jump_density(m);
    if (m.dimension != 1) throw ParameterError("one-dimensional stencil requires d = 1");
    if (m.kind == ModelKind::TruncatedStable && m.radius < 2.0 * h) {
        throw ResolutionError("grid too coarse: truncation radius below two cells");
    }
    Stencil1D st;
    st.h = h;
    st.head = head_moment(m, h, 2.0) / (h * h);  // C/h² with C = ∫_0^h y² ν(y) dy
    const auto nu = [&](double y) { return detail::density_unchecked(m, y); };
    const auto cell = [&](double lo, double hi, auto&& weight) {
        double top = hi;
        if (m.kind == ModelKind::TruncatedStable) top = std::min(hi, m.radius);
        if (!(top > lo)) return 0.0;
        return quad::gauss_legendre<20>([&](double y) { return weight(y) * nu(y); }, lo, top);
    };
    const double half_tail = 0.5 * tail_mass(m, h);
    st.tau.assign(count, 0.0);
    st.exit.assign(count + 1, 0.0);
    for (std::size_t k = 1; k < count + 1; ++k) {
        const double kd = static_cast<double>(k);
        const double rising = k == 1 ? 0.0
                                     : cell((kd - 1.0) * h, kd * h, [&](double y) { return y / h - (kd - 1.0); });
        const double falling = cell(kd * h, (kd + 1.0) * h, [&](double y) { return kd + 1.0 - y / h; });
        if (k < count) st.tau[k] = rising + falling;
        // Σ_{j ≥ k} hat_j = 1 on [k h, ∞) and rises linearly on [(k-1) h, k h].
        st.exit[k] = (k == 1 ? half_tail : 0.5 * tail_mass(m, kd * h) + rising);
    }
    st.tau[1] += st.head;
    st.exit[1] += st.head;
    st.tau[0] = -2.0 * st.head - 2.0 * half_tail;
    return st;
}

/// Generator of the process on the grid, killed outside (-a, a).
inline DiscretizedOperator assemble_generator(const LevyModel& m, const Grid1D& g) {
    validate(m);
    if (m.dimension != 1) throw ParameterError("one-dimensional grid requires d = 1");
    DiscretizedOperator op;
    op.model = m;
    op.dimension = 1;
    op.grid = g;
    const auto n = static_cast<Eigen::Index>(g.n);
    const double h = g.h();
    op.matrix.setZero(n, n);
    op.killing.setZero(n);
    if (m.kind == ModelKind::BrownianReference) {
        // scale · Δ with antisymmetric ghost values at the two boundary faces.
        const double c = m.scale / (h * h);
        for (Eigen::Index i = 0; i < n; ++i) {
            op.matrix(i, i) = -2.0 * c;
            if (i > 0) op.matrix(i, i - 1) = c;
            if (i + 1 < n) op.matrix(i, i + 1) = c;
        }
        op.matrix(0, 0) -= c;
        op.matrix(n - 1, n - 1) -= c;
        op.killing(0) += 2.0 * c;
        op.killing(n - 1) += 2.0 * c;
        op.head = c;
        op.closure = "reflected_ghost";
        return op;
    }
    const Stencil1D st = stencil_1d(m, h, g.n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) op.matrix(i, j) = st.tau[static_cast<std::size_t>(std::abs(i - j))];
        op.killing(i) = st.exit[static_cast<std::size_t>(i + 1)] + st.exit[static_cast<std::size_t>(n - i)];
    }
    op.head = st.head;
    op.closure = "zero_exterior";
    return op;
}

/// Principal sub-matrix for the nodes of U: the generator of the process killed on leaving U.
inline DiscretizedOperator restrict_to(const DiscretizedOperator& op, const NodeRange& r) {
    if (op.dimension != 1) throw ParameterError("restriction is implemented for d = 1");
    DiscretizedOperator sub = op;
    const auto first = static_cast<Eigen::Index>(r.first);
    const auto len = static_cast<Eigen::Index>(r.size());
    sub.matrix = op.matrix.block(first, first, len, len);
    sub.killing = -sub.matrix.rowwise().sum();
    return sub;
}

/// Generator of the process whose jumps of size |y| ≤ ε are removed (the process the
/// Monte Carlo sampler simulates), for ε below one cell.
///
/// All removed jumps fall inside the head, so only the second-difference coefficient
/// changes: per axis it drops by ∫_{|y|≤ε} y₁² ν(y) dy / (2h²).
inline DiscretizedOperator without_small_jumps(const DiscretizedOperator& op, double eps) {
    if (!(eps > 0.0)) throw DomainError("truncation radius must be positive");
    if (!op.model.pure_jump()) throw UnsupportedModelError("small-jump removal requires a pure jump model");
    const bool planar = op.dimension == 2;
    const double h = planar ? op.grid2.h() : op.grid.h();
    if (!(eps < h)) throw ResolutionError("truncation radius must be below one cell");
    const double moment = planar ? std::numbers::pi * head_moment(op.model, eps, 3.0) : head_moment(op.model, eps, 2.0);
    const double drop = planar ? moment / (2.0 * h * h) : moment / (h * h);
    DiscretizedOperator out = op;
    const Eigen::Index n = op.size();
    for (Eigen::Index i = 0; i < n; ++i) {
        out.matrix(i, i) += (planar ? 4.0 : 2.0) * drop;
        if (!planar) {
            if (i > 0) out.matrix(i, i - 1) -= drop;
            if (i + 1 < n) out.matrix(i, i + 1) -= drop;
            continue;
        }
        const auto n2 = static_cast<Eigen::Index>(op.grid2.n2);
        const Eigen::Index i1 = i / n2;
        const Eigen::Index i2 = i % n2;
        if (i1 > 0) out.matrix(i, i - n2) -= drop;
        if (i1 + 1 < static_cast<Eigen::Index>(op.grid2.n1)) out.matrix(i, i + n2) -= drop;
        if (i2 > 0) out.matrix(i, i - 1) -= drop;
        if (i2 + 1 < n2) out.matrix(i, i + 1) -= drop;
    }
    out.head = op.head - drop;
    out.killing = -out.matrix.rowwise().sum();
    return out;
}

namespace detail {

/// Second moment C = ∫_Q y₁² ν(|y|) dy and exterior mass ν(Q^c) for the square Q = [-h, h]².
struct SquareHead {
    double second_moment = 0.0;
    double outer_mass = 0.0;
};

inline SquareHead square_head(const LevyModel& m, double h) {
    // Polar coordinates; by symmetry only θ ∈ [0, π/4] with ρ(θ) = h / cos θ is needed.
    const auto moment = [&](double theta) { return head_moment(m, h / std::cos(theta), 3.0); };
    const auto corner = [&](double theta) { return shell_mass(m, h, h / std::cos(theta)) / (2.0 * std::numbers::pi); };
    SquareHead out;
    out.second_moment = 4.0 * quad::gauss_legendre<30>(moment, 0.0, std::numbers::pi / 4.0);
    const double corners = 8.0 * quad::gauss_legendre<30>(corner, 0.0, std::numbers::pi / 4.0);
    out.outer_mass = tail_mass(m, h) - corners;
    return out;
}

}  // namespace detail

/// Generator on a tensor grid of a box, killed outside the box.
///
/// The head square [-h, h]² is replaced by the five-point Laplacian with coefficient
/// C/(2h²) per neighbour; jumps landing outside the head square are distributed to
/// lattice points with bilinear hat weights.
inline DiscretizedOperator assemble_generator(const LevyModel& m, const Grid2D& g) {
    validate(m);
    detail::require_jump_density(m);
    if (m.dimension != 2) throw ParameterError("two-dimensional grid requires d = 2");
    const double h = g.h();
    if (m.kind == ModelKind::TruncatedStable && m.radius < 2.0 * h) {
        throw ResolutionError("grid too coarse: truncation radius below two cells");
    }
    const std::size_t reach = std::max(g.n1, g.n2);
    // Integrals of ν against the four bilinear corner functions over lattice squares
    // [i h, (i+1) h] × [j h, (j+1) h], i, j ≥ 0 (other quadrants follow by symmetry).
    const auto& xs = boost::math::quadrature::gauss<double, 10>::abscissa();
    const auto& ws = boost::math::quadrature::gauss<double, 10>::weights();
    std::vector<double> gx;
    std::vector<double> gw;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        for (int s : {-1, 1}) {
            if (i == 0 && s == 1 && xs[0] == 0.0) continue;
            gx.push_back(0.5 + 0.5 * s * xs[i]);
            gw.push_back(0.5 * ws[i]);
        }
    }
    // corner[(i * reach + j) * 4 + c]: c = 0 (lower-left), 1 (lower-right), 2 (upper-left), 3 (upper-right)
    std::vector<double> corner(reach * reach * 4, 0.0);
    for (std::size_t i = 0; i < reach; ++i) {
        for (std::size_t j = 0; j < reach; ++j) {
            if (i == 0 && j == 0) continue;  // inside the head square
            double acc[4] = {0, 0, 0, 0};
            for (std::size_t p = 0; p < gx.size(); ++p) {
                for (std::size_t q = 0; q < gx.size(); ++q) {
                    const double u = gx[p];
                    const double v = gx[q];
                    const double y1 = (static_cast<double>(i) + u) * h;
                    const double y2 = (static_cast<double>(j) + v) * h;
                    const double w = gw[p] * gw[q] * detail::density_unchecked(m, std::hypot(y1, y2)) * h * h;
                    acc[0] += w * (1 - u) * (1 - v);
                    acc[1] += w * u * (1 - v);
                    acc[2] += w * (1 - u) * v;
                    acc[3] += w * u * v;
                }
            }
            for (int c = 0; c < 4; ++c) corner[(i * reach + j) * 4 + c] = acc[c];
        }
    }
    const auto sq = [&](long i, long j, int c) -> double {
        if (i < 0 || j < 0 || i >= static_cast<long>(reach) || j >= static_cast<long>(reach)) return 0.0;
        return corner[(static_cast<std::size_t>(i) * reach + static_cast<std::size_t>(j)) * 4 + c];
    };
    // Hat weight at lattice offset (k1, k2) ≥ 0 from the squares touching it, unfolded by symmetry.
    // A square [i, i+1] × [j, j+1] in the first quadrant stands for its mirror images too.
    const auto hat = [&](long k1, long k2) {
        double w = 0.0;
        for (long di : {-1L, 0L}) {
            for (long dj : {-1L, 0L}) {
                const long i = k1 + di;  // square lower-left corner (can be -1)
                const long j = k2 + dj;
                // corner of square (i, j) at (k1, k2): c = (k1 - i) + 2 (k2 - j)
                int c = static_cast<int>((k1 - i) + 2 * (k2 - j));
                long ii = i;
                long jj = j;
                if (ii < 0) {
                    ii = -ii - 1;
                    c ^= 1;
                }
                if (jj < 0) {
                    jj = -jj - 1;
                    c ^= 2;
                }
                w += sq(ii, jj, c);
            }
        }
        return w;
    };
    const auto head = detail::square_head(m, h);
    const double axis = head.second_moment / (2.0 * h * h);
    std::vector<double> weight(reach * reach, 0.0);
    for (std::size_t k1 = 0; k1 < reach; ++k1) {
        for (std::size_t k2 = 0; k2 < reach; ++k2) {
            weight[k1 * reach + k2] = hat(static_cast<long>(k1), static_cast<long>(k2));
        }
    }
    weight[0] = 0.0;
    weight[1] += axis;
    weight[reach] += axis;
    const double diag = -4.0 * axis - head.outer_mass;

    DiscretizedOperator op;
    op.model = m;
    op.dimension = 2;
    op.grid2 = g;
    const auto n = static_cast<Eigen::Index>(g.size());
    op.matrix.resize(n, n);
    for (std::size_t p = 0; p < g.size(); ++p) {
        const long p1 = static_cast<long>(p / g.n2);
        const long p2 = static_cast<long>(p % g.n2);
        for (std::size_t q = 0; q < g.size(); ++q) {
            const auto d1 = static_cast<std::size_t>(std::labs(p1 - static_cast<long>(q / g.n2)));
            const auto d2 = static_cast<std::size_t>(std::labs(p2 - static_cast<long>(q % g.n2)));
            op.matrix(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q)) =
                p == q ? diag : weight[d1 * reach + d2];
        }
    }
    op.killing = -op.matrix.rowwise().sum();
    op.head = axis;
    op.closure = "zero_exterior";
    return op;
}

}  // namespace levylab
