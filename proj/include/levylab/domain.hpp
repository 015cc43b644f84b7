#pragma once

#include "levylab/errors.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <cmath>
#include <string>

namespace levylab {

/// A point in R^1 or R^2. In one dimension the second coordinate is ignored.
using Point = std::array<double, 2>;

/// D = (-a, a) or D = (-a, a) × (-b, b).
struct Domain {
    enum class Shape { Interval, Box };

    Shape shape = Shape::Interval;
    double a = 1.0;
    double b = 0.0;

    static Domain interval(double a) {
        Domain d{Shape::Interval, a, 0.0};
        d.validate();
        return d;
    }
    static Domain box(double a, double b) {
        Domain d{Shape::Box, a, b};
        d.validate();
        return d;
    }

    void validate() const {
        if (!(a > 0.0) || !std::isfinite(a)) throw ParameterError("domain half-width a must be positive");
        if (shape == Shape::Box && (!(b > 0.0) || !std::isfinite(b))) {
            throw ParameterError("domain half-width b must be positive");
        }
    }

    [[nodiscard]] int dimension() const { return shape == Shape::Interval ? 1 : 2; }

    [[nodiscard]] bool contains(const Point& x) const {
        if (!(std::abs(x[0]) < a)) return false;
        return shape == Shape::Interval || std::abs(x[1]) < b;
    }
    [[nodiscard]] bool contains(double x) const { return contains(Point{x, 0.0}); }

    /// Open exterior of the closure of D.
    [[nodiscard]] bool outside_closure(const Point& x) const {
        if (std::abs(x[0]) > a) return true;
        return shape == Shape::Box && std::abs(x[1]) > b;
    }

    bool operator==(const Domain&) const = default;
};

/// U = (l, r) × F with F the cross-section of the ambient domain, together with its
/// midpoint m(U), the halves U₋ = (l, m) × F and U₊ = (m, r) × F, the half-spaces
/// H₋ = {x₁ < m} and H₊ = {x₁ > m}, L(U) = (-∞, l) × F, R(U) = (r, ∞) × F and the
/// reflection T_U through the hyperplane x₁ = m.
struct SubDomain {
    Domain ambient;
    double l = -1.0;
    double r = 1.0;

    SubDomain(const Domain& d, double left, double right) : ambient(d), l(left), r(right) {
        if (!(left < right)) throw ParameterError("sub-domain requires l < r");
        const double slack = 1e-12 * d.a;
        if (left < -d.a - slack || right > d.a + slack) throw ParameterError("sub-domain must lie inside D");
    }

    [[nodiscard]] double m() const { return 0.5 * (l + r); }

    [[nodiscard]] Point reflect(const Point& x) const { return {2.0 * m() - x[0], x[1]}; }
    [[nodiscard]] double reflect(double x) const { return 2.0 * m() - x; }

    [[nodiscard]] bool in_cross_section(const Point& x) const {
        return ambient.shape == Domain::Shape::Interval || std::abs(x[1]) < ambient.b;
    }
    [[nodiscard]] bool contains(const Point& x) const { return x[0] > l && x[0] < r && in_cross_section(x); }
    [[nodiscard]] bool in_plus(const Point& x) const { return x[0] > m() && x[0] < r && in_cross_section(x); }
    [[nodiscard]] bool in_minus(const Point& x) const { return x[0] > l && x[0] < m() && in_cross_section(x); }
    [[nodiscard]] bool in_h_plus(const Point& x) const { return x[0] > m(); }
    [[nodiscard]] bool in_h_minus(const Point& x) const { return x[0] < m(); }
    [[nodiscard]] bool in_left(const Point& x) const { return x[0] < l && in_cross_section(x); }
    [[nodiscard]] bool in_right(const Point& x) const { return x[0] > r && in_cross_section(x); }

    /// z ∈ H₊(U) minus the closure of U₊.
    [[nodiscard]] bool in_positive_zone(const Point& z) const {
        if (!in_h_plus(z)) return false;
        const bool in_closure_plus =
            z[0] >= m() && z[0] <= r &&
            (ambient.shape == Domain::Shape::Interval || std::abs(z[1]) <= ambient.b);
        return !in_closure_plus;
    }
    /// z ∈ H₋(U) minus the closure of U₋.
    [[nodiscard]] bool in_negative_zone(const Point& z) const {
        if (!in_h_minus(z)) return false;
        const bool in_closure_minus =
            z[0] >= l && z[0] <= m() &&
            (ambient.shape == Domain::Shape::Interval || std::abs(z[1]) <= ambient.b);
        return !in_closure_minus;
    }
};

inline void to_json(nlohmann::json& j, const Domain& d) {
    if (d.shape == Domain::Shape::Interval) {
        j = nlohmann::json{{"shape", "interval"}, {"a", d.a}};
    } else {
        j = nlohmann::json{{"shape", "box"}, {"a", d.a}, {"b", d.b}};
    }
}

inline void from_json(const nlohmann::json& j, Domain& d) {
    if (!j.is_object()) throw ValidationError("domain: expected an object");
    const std::string shape = j.at("shape").get<std::string>();
    if (shape == "interval") {
        d = Domain{Domain::Shape::Interval, j.at("a").get<double>(), 0.0};
    } else if (shape == "box") {
        d = Domain{Domain::Shape::Box, j.at("a").get<double>(), j.at("b").get<double>()};
    } else {
        throw ValidationError("domain.shape: unknown shape '" + shape + "'");
    }
}

}  // namespace levylab
