#pragma once

#include "levylab/domain.hpp"
#include "levylab/errors.hpp"

#include <cmath>
#include <cstddef>
#include <vector>

namespace levylab {

/// Cell-centred grid on (-a, a): x_j = -a + (j + 1/2) h with h = 2a/N.
struct Grid1D {
    double a = 1.0;
    std::size_t n = 0;

    Grid1D() = default;
    Grid1D(double half_width, std::size_t count) : a(half_width), n(count) {
        if (!(half_width > 0.0)) throw ParameterError("grid half-width must be positive");
        if (count < 2) throw ParameterError("grid needs at least two nodes");
    }

    [[nodiscard]] double h() const { return 2.0 * a / static_cast<double>(n); }
    [[nodiscard]] double node(std::size_t j) const { return -a + (static_cast<double>(j) + 0.5) * h(); }
    [[nodiscard]] std::vector<double> nodes() const {
        std::vector<double> x(n);
        for (std::size_t j = 0; j < n; ++j) x[j] = node(j);
        return x;
    }

    /// Index of the node at x; throws GridError when x is not a node.
    [[nodiscard]] std::size_t index_of(double x) const {
        const double pos = (x + a) / h() - 0.5;
        const double j = std::round(pos);
        if (std::abs(pos - j) > 1e-9 || j < 0.0 || j >= static_cast<double>(n)) {
            throw GridError("point is not a grid node");
        }
        return static_cast<std::size_t>(j);
    }

    /// Index of the cell face at x (faces are -a + k h, k = 0..N); throws GridError otherwise.
    [[nodiscard]] std::size_t face_of(double x) const {
        const double pos = (x + a) / h();
        const double k = std::round(pos);
        if (std::abs(pos - k) > 1e-9 || k < 0.0 || k > static_cast<double>(n)) {
            throw GridError("sub-domain endpoint is not aligned with a cell face");
        }
        return static_cast<std::size_t>(k);
    }

    /// Linear interpolation of grid values at x, extended by zero to the faces ±a.
    [[nodiscard]] double interpolate(const std::vector<double>& v, double x) const {
        const double pos = (x + a) / h() - 0.5;
        if (pos <= -0.5 || pos >= static_cast<double>(n) - 0.5) return 0.0;
        if (pos < 0.0) return v.front() * (pos + 0.5) / 0.5;
        if (pos > static_cast<double>(n - 1)) return v.back() * (static_cast<double>(n) - 0.5 - pos) / 0.5;
        const auto j = static_cast<std::size_t>(std::floor(pos));
        if (j + 1 >= n) return v.back();
        const double w = pos - static_cast<double>(j);
        return (1.0 - w) * v[j] + w * v[j + 1];
    }
};

/// Node range [first, last) of the cells inside U = (l, r); U's endpoints must be cell faces.
struct NodeRange {
    std::size_t first = 0;
    std::size_t last = 0;

    [[nodiscard]] std::size_t size() const { return last - first; }
    [[nodiscard]] bool contains(std::size_t j) const { return j >= first && j < last; }
    /// Node index of T_U(x_j).
    [[nodiscard]] std::size_t reflect(std::size_t j) const { return first + last - 1 - j; }
};

inline NodeRange node_range(const Grid1D& g, const SubDomain& u) {
    const std::size_t lo = g.face_of(u.l);
    const std::size_t hi = g.face_of(u.r);
    if (hi <= lo) throw GridError("sub-domain contains no cells");
    return {lo, hi};
}

/// Tensor cell-centred grid on (-a, a) × (-b, b) with square cells.
struct Grid2D {
    double a = 1.0;
    double b = 1.0;
    std::size_t n1 = 0;
    std::size_t n2 = 0;

    Grid2D() = default;
    Grid2D(double ha, double hb, std::size_t c1, std::size_t c2) : a(ha), b(hb), n1(c1), n2(c2) {
        if (!(ha > 0.0) || !(hb > 0.0)) throw ParameterError("grid half-widths must be positive");
        if (c1 < 2 || c2 < 2) throw ParameterError("grid needs at least two nodes per axis");
        if (std::abs(2.0 * ha / c1 - 2.0 * hb / c2) > 1e-12 * ha) throw ParameterError("2D grid cells must be square");
    }

    [[nodiscard]] double h() const { return 2.0 * a / static_cast<double>(n1); }
    [[nodiscard]] std::size_t size() const { return n1 * n2; }
    [[nodiscard]] std::size_t index(std::size_t i1, std::size_t i2) const { return i1 * n2 + i2; }
    [[nodiscard]] Point node(std::size_t i1, std::size_t i2) const {
        return {-a + (static_cast<double>(i1) + 0.5) * h(), -b + (static_cast<double>(i2) + 0.5) * h()};
    }
    [[nodiscard]] Point node(std::size_t p) const { return node(p / n2, p % n2); }

    /// Bilinear interpolation extended by zero to the boundary.
    [[nodiscard]] double interpolate(const std::vector<double>& v, const Point& x) const {
        const auto axis = [&](double coord, double half, std::size_t count, std::size_t& j, double& w) -> bool {
            const double pos = (coord + half) / h() - 0.5;
            if (pos <= -0.5 || pos >= static_cast<double>(count) - 0.5) return false;
            if (pos < 0.0) {
                j = 0;
                w = 0.0;
                return true;
            }
            if (pos >= static_cast<double>(count - 1)) {
                j = count - 2;
                w = 1.0;
                return true;
            }
            j = static_cast<std::size_t>(std::floor(pos));
            w = pos - static_cast<double>(j);
            return true;
        };
        std::size_t j1 = 0;
        std::size_t j2 = 0;
        double w1 = 0.0;
        double w2 = 0.0;
        if (!axis(x[0], a, n1, j1, w1) || !axis(x[1], b, n2, j2, w2)) return 0.0;
        const auto at = [&](std::size_t p, std::size_t q) { return v[index(p, q)]; };
        double value = (1 - w1) * (1 - w2) * at(j1, j2) + w1 * (1 - w2) * at(j1 + 1, j2) +
                       (1 - w1) * w2 * at(j1, j2 + 1) + w1 * w2 * at(j1 + 1, j2 + 1);
        // Half-cell layers next to the boundary decay linearly to zero.
        const auto edge = [&](double coord, double half, std::size_t count) {
            const double pos = (coord + half) / h() - 0.5;
            if (pos < 0.0) return (pos + 0.5) / 0.5;
            if (pos > static_cast<double>(count - 1)) return (static_cast<double>(count) - 0.5 - pos) / 0.5;
            return 1.0;
        };
        value *= edge(x[0], a, n1) * edge(x[1], b, n2);
        return value;
    }
};

}  // namespace levylab
