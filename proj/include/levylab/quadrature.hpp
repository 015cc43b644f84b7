#pragma once

#include "levylab/errors.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <cstddef>
#include <vector>

// Thin wrappers over Boost.Math quadrature. Each integrator object is thread_local.
namespace levylab::quad {

inline constexpr double default_tolerance = 1e-13;

/// ∫_0^∞ f(u) du for integrands with exponential or fast algebraic decay.
template <class F>
double half_line(const F& f, double tol = default_tolerance) {
    thread_local boost::math::quadrature::exp_sinh<double> rule;
    double error = 0.0;
    double l1 = 0.0;
    const double value = rule.integrate(f, tol, &error, &l1);
    if (!std::isfinite(value)) {
        throw NumericalError("half-line quadrature produced a non-finite value");
    }
    return value;
}

/// ∫_a^b f with possible integrable endpoint singularities.
template <class F>
double endpoint_singular(const F& f, double a, double b, double tol = default_tolerance) {
    if (!(b > a)) return 0.0;
    thread_local boost::math::quadrature::tanh_sinh<double> rule;
    double error = 0.0;
    double l1 = 0.0;
    const double value = rule.integrate(f, a, b, tol, &error, &l1);
    if (!std::isfinite(value)) {
        throw NumericalError("tanh-sinh quadrature produced a non-finite value");
    }
    return value;
}

/// Adaptive Gauss-Kronrod on a finite interval with a smooth integrand.
template <class F>
double adaptive(const F& f, double a, double b, double tol = default_tolerance) {
    if (!(b > a)) return 0.0;
    double error = 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 15, tol, &error);
}

/// Fixed-order Gauss-Legendre rule.
template <unsigned Points, class F>
double gauss_legendre(const F& f, double a, double b) {
    if (!(b > a)) return 0.0;
    return boost::math::quadrature::gauss<double, Points>::integrate(f, a, b);
}

/// Sum of an oscillating series of panel integrals whose signs alternate and
/// whose magnitudes vary smoothly with the panel index. The partial sums are
/// averaged repeatedly (Euler transform of the tail).
inline double accelerated_sum(const std::vector<double>& terms) {
    if (terms.empty()) return 0.0;
    std::vector<double> partial(terms.size());
    double running = 0.0;
    for (std::size_t k = 0; k < terms.size(); ++k) {
        running += terms[k];
        partial[k] = running;
    }
    for (std::size_t len = partial.size(); len > 1; --len) {
        for (std::size_t k = 0; k + 1 < len; ++k) {
            partial[k] = 0.5 * (partial[k] + partial[k + 1]);
        }
    }
    return partial.front();
}

}  // namespace levylab::quad
