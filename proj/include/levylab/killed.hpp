#pragma once

#include "levylab/domain.hpp"
#include "levylab/errors.hpp"
#include "levylab/generator.hpp"
#include "levylab/grid.hpp"
#include "levylab/levy_model.hpp"
#include "levylab/semigroup.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <cmath>
#include <vector>

namespace levylab {

inline constexpr double overshoot_tolerance = 1e-9;

namespace detail {

inline std::vector<double> clip_probabilities(const Eigen::VectorXd& v) {
    std::vector<double> out(static_cast<std::size_t>(v.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double x = v(i);
        if (x > 1.0 + overshoot_tolerance || x < -overshoot_tolerance || !std::isfinite(x)) {
            throw NumericalError("survival vector left [0, 1] beyond the overshoot tolerance");
        }
        out[static_cast<std::size_t>(i)] = std::clamp(x, 0.0, 1.0);
    }
    return out;
}

inline Grid1D require_grid(const Domain& dom, const Grid1D& g) {
    if (dom.shape != Domain::Shape::Interval) throw ParameterError("a one-dimensional grid needs an interval domain");
    if (std::abs(dom.a - g.a) > 1e-12 * dom.a) throw ParameterError("grid and domain half-widths differ");
    return g;
}

}  // namespace detail

/// ψ_t on the nodes for several times from one eigendecomposition.
inline std::vector<std::vector<double>> survival_pde(const DiscretizedOperator& op, const std::vector<double>& times) {
    const SpectralSemigroup sg(op.matrix);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(op.size());
    std::vector<std::vector<double>> out;
    for (double t : times) {
        if (!(t >= 0.0)) throw DomainError("survival_pde requires t >= 0");
        out.push_back(detail::clip_probabilities(t == 0.0 ? ones : sg.apply(t, ones)));
    }
    return out;
}

/// ψ_t^D = exp(tL)·1 on the nodes of a one-dimensional grid.
inline std::vector<double> survival_pde(const LevyModel& m, const Domain& dom, double t, const Grid1D& g) {
    if (!(t >= 0.0)) throw DomainError("survival_pde requires t >= 0");
    detail::require_grid(dom, g);
    if (t == 0.0) return std::vector<double>(g.n, 1.0);
    return survival_pde(assemble_generator(m, g), {t}).front();
}

/// ψ_t^D on a two-dimensional tensor grid (uniformization), for several times.
inline std::vector<std::vector<double>> survival_pde(const LevyModel& m, const Domain& dom,
                                                    const std::vector<double>& times, const Grid2D& g) {
    if (dom.shape != Domain::Shape::Box) throw ParameterError("a two-dimensional grid needs a box domain");
    if (std::abs(dom.a - g.a) > 1e-12 * dom.a || std::abs(dom.b - g.b) > 1e-12 * dom.b) {
        throw ParameterError("grid and domain half-widths differ");
    }
    const auto op = assemble_generator(m, g);
    const auto res = uniformized_action(op.matrix, Eigen::VectorXd::Ones(op.size()), times);
    std::vector<std::vector<double>> out;
    for (const auto& v : res) out.push_back(detail::clip_probabilities(v));
    return out;
}

/// P_D(s) with entries ≈ p_D(s, x_i, x_j)·h.
struct KilledKernel {
    double s = 0.0;
    Eigen::MatrixXd matrix;
};

inline KilledKernel killed_kernel(const DiscretizedOperator& op, double s) {
    if (!(s > 0.0)) throw DomainError("killed_kernel requires s > 0");
    return {s, nonnegative_expm(op.matrix, s)};
}

inline KilledKernel killed_kernel(const LevyModel& m, const Domain& dom, double s, const Grid1D& g) {
    detail::require_grid(dom, g);
    return killed_kernel(assemble_generator(m, g), s);
}

/// G = -L⁻¹ with entries ≈ G_D(x_i, x_j)·h; row sums approximate E^x τ_D.
inline Eigen::MatrixXd green_function(const DiscretizedOperator& op) {
    const Eigen::MatrixXd neg = -op.matrix;
    const Eigen::LLT<Eigen::MatrixXd> llt(neg);
    if (llt.info() != Eigen::Success) throw NumericalError("generator is not negative definite (assembly error)");
    return llt.solve(Eigen::MatrixXd::Identity(op.size(), op.size()));
}

inline Eigen::MatrixXd green_function(const LevyModel& m, const Domain& dom, const Grid1D& g) {
    detail::require_grid(dom, g);
    return green_function(assemble_generator(m, g));
}

/// Mean exit times E^{x_i} τ_D on the nodes.
inline std::vector<double> mean_exit_time(const DiscretizedOperator& op) {
    const Eigen::MatrixXd neg = -op.matrix;
    const Eigen::LLT<Eigen::MatrixXd> llt(neg);
    if (llt.info() != Eigen::Success) throw NumericalError("generator is not negative definite (assembly error)");
    const Eigen::VectorXd e = llt.solve(Eigen::VectorXd::Ones(op.size()));
    return {e.data(), e.data() + e.size()};
}

/// Exterior jump density of the one-dimensional scheme.
///
/// For node j the scheme sends jumps to the exterior at total rate killing_j. Landing
/// points farther than half a cell beyond the boundary carry the exact density ν(x_j - z);
/// the remaining rate (the hat-weight ramp and the head ghost) is spread uniformly on
/// the half cell (a, a + h/2) of the same side. The density therefore integrates to
/// killing_j, and Σ_j G_ij killing_j = 1 makes the discrete exit law a probability.
class ExitDensity {
public:
    explicit ExitDensity(const DiscretizedOperator& op) : op_(op) {
        if (op.dimension != 1) throw ParameterError("exit density is implemented for d = 1");
        if (!op.model.pure_jump()) throw UnsupportedModelError("exit density requires a pure jump model");
        const std::size_t n = op.grid.n;
        const double h = op.grid.h();
        const Stencil1D st = stencil_1d(op.model, h, n);
        left_.resize(n);
        right_.resize(n);
        for (std::size_t j = 0; j < n; ++j) {
            left_[j] = st.exit[j + 1] - 0.5 * tail_mass(op.model, static_cast<double>(j + 1) * h);
            right_[j] = st.exit[n - j] - 0.5 * tail_mass(op.model, static_cast<double>(n - j) * h);
        }
    }

    /// Exit rate from node j into the exterior interval (lo, hi) (hi may be infinite).
    [[nodiscard]] double rate_into(std::size_t j, double lo, double hi) const {
        const double a = op_.grid.a;
        const double h = op_.grid.h();
        const double xj = op_.grid.node(j);
        double total = 0.0;
        const auto far = [&](double dist_lo, double dist_hi) {
            // ∫ ν over displacements with |y| ∈ (dist_lo, dist_hi), one side
            if (!(dist_hi > dist_lo)) return 0.0;
            const double upper = std::isinf(dist_hi) ? 0.0 : 0.5 * tail_mass(op_.model, dist_hi);
            return 0.5 * tail_mass(op_.model, dist_lo) - upper;
        };
        // right side
        {
            const double r_lo = std::max(lo, a);
            const double r_hi = hi;
            if (r_hi > r_lo) {
                const double ring_hi = a + 0.5 * h;
                const double overlap = std::max(0.0, std::min(r_hi, ring_hi) - r_lo);
                total += right_[j] * overlap / (0.5 * h);
                const double f_lo = std::max(r_lo, ring_hi);
                if (r_hi > f_lo) total += far(f_lo - xj, r_hi - xj);
            }
        }
        // left side (mirror)
        {
            const double l_lo = std::max(-hi, a);
            const double l_hi = -lo;
            if (l_hi > l_lo) {
                const double ring_hi = a + 0.5 * h;
                const double overlap = std::max(0.0, std::min(l_hi, ring_hi) - l_lo);
                total += left_[j] * overlap / (0.5 * h);
                const double f_lo = std::max(l_lo, ring_hi);
                if (l_hi > f_lo) total += far(f_lo + xj, l_hi + xj);
            }
        }
        return total;
    }

    /// Pointwise density at an exterior point z.
    [[nodiscard]] double density(std::size_t j, double z) const {
        const double a = op_.grid.a;
        const double h = op_.grid.h();
        if (!(std::abs(z) > a)) throw DomainError("exit density requires z outside the closure of D");
        if (std::abs(z) < a + 0.5 * h) return (z > 0 ? right_[j] : left_[j]) / (0.5 * h);
        return levy_density(op_.model, std::abs(op_.grid.node(j) - z));
    }

    [[nodiscard]] const DiscretizedOperator& op() const { return op_; }

private:
    const DiscretizedOperator& op_;
    std::vector<double> left_;
    std::vector<double> right_;
};

/// h_D(x_i, s, z) = Σ_j P_D(s)_{ij} e_j(z), with e_j the scheme's exterior jump density.
inline double exit_kernel(const DiscretizedOperator& op, std::size_t i, double s, double z) {
    if (!(s > 0.0)) throw DomainError("exit_kernel requires s > 0");
    if (!(std::abs(z) > op.grid.a)) throw DomainError("exit_kernel requires z outside the closure of D");
    const SpectralSemigroup sg(op.matrix);
    const Eigen::VectorXd row = sg.row(static_cast<Eigen::Index>(i), s);
    const ExitDensity ed(op);
    double acc = 0.0;
    for (std::size_t j = 0; j < op.grid.n; ++j) acc += row(static_cast<Eigen::Index>(j)) * ed.density(j, z);
    return acc;
}

inline double exit_kernel(const LevyModel& m, const Domain& dom, double x, double s, double z, const Grid1D& g) {
    detail::require_grid(dom, g);
    const auto op = assemble_generator(m, g);
    return exit_kernel(op, g.index_of(x), s, z);
}

/// Precomputed Ikeda–Watanabe quadrature: P^x(τ ∈ (t0, t1), X(τ) ∈ (lo, hi)).
class ExitLaw {
public:
    explicit ExitLaw(const DiscretizedOperator& op) : op_(op), sg_(op.matrix), density_(op_) {}
    ExitLaw(const ExitLaw&) = delete;
    ExitLaw& operator=(const ExitLaw&) = delete;

    [[nodiscard]] double probability(std::size_t i, double t0, double t1, double lo, double hi) const {
        Eigen::VectorXd rates(op_.size());
        for (std::size_t j = 0; j < op_.grid.n; ++j) rates(static_cast<Eigen::Index>(j)) = density_.rate_into(j, lo, hi);
        const Eigen::VectorXd occupation = sg_.apply_integral(t0, t1, unit(i));
        return occupation.dot(rates);
    }

    [[nodiscard]] const DiscretizedOperator& op() const { return op_; }

private:
    [[nodiscard]] Eigen::VectorXd unit(std::size_t i) const {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(op_.size());
        e(static_cast<Eigen::Index>(i)) = 1.0;
        return e;
    }

    DiscretizedOperator op_;
    SpectralSemigroup sg_;
    ExitDensity density_;
};

}  // namespace levylab
