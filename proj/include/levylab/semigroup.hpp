#pragma once

#include "levylab/errors.hpp"
#include "levylab/generator.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <vector>

namespace levylab {

/// exp(tL) through the eigendecomposition of the symmetric generator matrix.
class SpectralSemigroup {
public:
    explicit SpectralSemigroup(const Eigen::MatrixXd& generator) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(generator);
        if (solver.info() != Eigen::Success) throw NumericalError("symmetric eigensolver failed");
        mu_ = solver.eigenvalues();
        v_ = solver.eigenvectors();
    }

    /// Eigenvalues μ_k of L in increasing order (all ≤ 0 for a killed generator).
    [[nodiscard]] const Eigen::VectorXd& eigenvalues() const { return mu_; }
    [[nodiscard]] const Eigen::MatrixXd& eigenvectors() const { return v_; }
    [[nodiscard]] Eigen::Index size() const { return mu_.size(); }

    /// Σ_k g(μ_k) v_k v_kᵀ x.
    template <class G>
    [[nodiscard]] Eigen::VectorXd apply_function(const G& g, const Eigen::VectorXd& x) const {
        Eigen::VectorXd c = v_.transpose() * x;
        for (Eigen::Index k = 0; k < c.size(); ++k) c(k) *= g(mu_(k));
        return v_ * c;
    }

    template <class G>
    [[nodiscard]] Eigen::MatrixXd matrix_function(const G& g) const {
        Eigen::VectorXd d(mu_.size());
        for (Eigen::Index k = 0; k < d.size(); ++k) d(k) = g(mu_(k));
        return v_ * d.asDiagonal() * v_.transpose();
    }

    [[nodiscard]] Eigen::VectorXd apply(double t, const Eigen::VectorXd& x) const {
        return apply_function([t](double mu) { return std::exp(t * mu); }, x);
    }

    /// Row i of exp(tL).
    [[nodiscard]] Eigen::VectorXd row(Eigen::Index i, double t) const {
        Eigen::VectorXd w = v_.row(i).transpose();
        for (Eigen::Index k = 0; k < w.size(); ++k) w(k) *= std::exp(t * mu_(k));
        return v_ * w;
    }

    /// ∫_{t0}^{t1} exp(sL) ds applied to x.
    [[nodiscard]] Eigen::VectorXd apply_integral(double t0, double t1, const Eigen::VectorXd& x) const {
        return apply_function([&](double mu) { return exp_integral(mu, t0, t1); }, x);
    }

    /// ∫_{t0}^{t1} e^{μ s} ds, with t1 = ∞ allowed for μ < 0.
    static double exp_integral(double mu, double t0, double t1) {
        if (std::abs(mu) < 1e-300) return t1 - t0;
        if (std::isinf(t1)) return -std::exp(mu * t0) / mu;
        // e^{μ t0} (e^{μ (t1 - t0)} - 1) / μ, with expm1 for accuracy
        return std::exp(mu * t0) * std::expm1(mu * (t1 - t0)) / mu;
    }

private:
    Eigen::VectorXd mu_;
    Eigen::MatrixXd v_;
};

/// exp(sL) by scaling and squaring with a shifted Taylor series.
///
/// With σ = max_i |L_ii| the matrix A = L + σI is entrywise nonnegative, so every
/// Taylor term of exp(sA/2^j) and every squaring stays nonnegative; the shift e^{-σs}
/// is applied at the scaled level to avoid overflow.
inline Eigen::MatrixXd nonnegative_expm(const Eigen::MatrixXd& generator, double s) {
    if (!(s >= 0.0)) throw DomainError("matrix exponential requires s >= 0");
    const Eigen::Index n = generator.rows();
    if (s == 0.0) return Eigen::MatrixXd::Identity(n, n);
    double sigma = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) sigma = std::max(sigma, -generator(i, i));
    Eigen::MatrixXd a = generator;
    a.diagonal().array() += sigma;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) a(i, j) = std::max(0.0, a(i, j));
    }
    const double norm = a.cwiseAbs().rowwise().sum().maxCoeff() * s;
    int squarings = 0;
    while (norm / std::ldexp(1.0, squarings) > 0.5) ++squarings;
    const double scaled = s / std::ldexp(1.0, squarings);
    a *= scaled;
    Eigen::MatrixXd term = Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd sum = term;
    for (int k = 1; k < 40; ++k) {
        term = (term * a) / static_cast<double>(k);
        sum += term;
        if (term.maxCoeff() < 1e-18 * sum.maxCoeff()) break;
    }
    sum *= std::exp(-sigma * scaled);
    for (int j = 0; j < squarings; ++j) sum = sum * sum;
    return sum;
}

/// exp(tL)·x for several times by uniformization: with Λ ≥ max |L_ii| and P = I + L/Λ ≥ 0,
/// exp(tL) x = Σ_k Poisson(k; Λt) P^k x. Poisson weights are evaluated in log space.
inline std::vector<Eigen::VectorXd> uniformized_action(const Eigen::MatrixXd& generator, const Eigen::VectorXd& x,
                                                       const std::vector<double>& times, double tol = 1e-14) {
    const Eigen::Index n = generator.rows();
    double lambda = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) lambda = std::max(lambda, -generator(i, i));
    lambda = std::max(lambda, 1e-12);
    Eigen::MatrixXd p = generator / lambda;
    p.diagonal().array() += 1.0;
    double t_max = 0.0;
    for (double t : times) {
        if (!(t >= 0.0)) throw DomainError("uniformization requires t >= 0");
        t_max = std::max(t_max, t);
    }
    const double mean_max = lambda * t_max;
    const auto k_max = static_cast<long>(std::ceil(mean_max + 12.0 * std::sqrt(mean_max + 1.0) + 40.0));
    std::vector<Eigen::VectorXd> out(times.size(), Eigen::VectorXd::Zero(n));
    std::vector<double> mass(times.size(), 0.0);
    Eigen::VectorXd v = x;
    for (long k = 0; k <= k_max; ++k) {
        bool done = true;
        for (std::size_t i = 0; i < times.size(); ++i) {
            const double mean = lambda * times[i];
            double w = 0.0;
            if (mean == 0.0) {
                w = k == 0 ? 1.0 : 0.0;
            } else {
                w = std::exp(-mean + static_cast<double>(k) * std::log(mean) - std::lgamma(static_cast<double>(k) + 1.0));
            }
            if (w > 0.0) out[i] += w * v;
            mass[i] += w;
            if (mass[i] < 1.0 - tol || static_cast<double>(k) < mean) done = false;
        }
        if (done) break;
        v = p * v;
    }
    return out;
}

}  // namespace levylab
