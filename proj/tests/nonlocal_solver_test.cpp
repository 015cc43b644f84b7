#include "levylab/difference.hpp"
#include "levylab/eigenpair.hpp"
#include "levylab/generator.hpp"
#include "levylab/killed.hpp"
#include "levylab/semigroup.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>

namespace levylab {

namespace {

/// E^x τ for ψ(ξ) = |ξ|^α on (-1, 1) in closed form.
double stable_mean_exit_time(double alpha, double x) {
    return std::tgamma(0.5) / (std::pow(2.0, alpha) * std::tgamma(1.0 + alpha / 2.0) * std::tgamma((1.0 + alpha) / 2.0)) *
           std::pow(1.0 - x * x, alpha / 2.0);
}

/// P^x(τ > t) for ψ(ξ) = |ξ|² on (-1, 1) by its sine series.
double brownian_survival(double x, double t) {
    double sum = 0.0;
    for (int k = 0; k < 200; ++k) {
        const double m = 2.0 * k + 1.0;
        sum += 4.0 / std::numbers::pi * (k % 2 == 0 ? 1.0 : -1.0) / m *
               std::exp(-m * m * std::numbers::pi * std::numbers::pi * t / 4.0) * std::cos(m * std::numbers::pi * x / 2.0);
    }
    return sum;
}

}  // namespace

TEST(Generator, SymmetricWithConsistentKilling) {
    for (const auto& m : {LevyModel::alpha_stable(0.5), LevyModel::tempered_stable(1.4, 2.0),
                          LevyModel::truncated_stable(1.0, 0.3)}) {
        const auto op = assemble_generator(m, Grid1D(1.0, 64));
        EXPECT_LT((op.matrix - op.matrix.transpose()).cwiseAbs().maxCoeff(), 1e-12);
        const Eigen::VectorXd rows = op.matrix.rowwise().sum() + op.killing;
        EXPECT_LT(rows.cwiseAbs().maxCoeff(), 1e-9 * op.matrix.diagonal().cwiseAbs().maxCoeff());
        EXPECT_GE(op.killing.minCoeff(), 0.0);
        EXPECT_GT(op.killing(0), 0.0);
        for (Eigen::Index i = 0; i < op.size(); ++i) {
            for (Eigen::Index j = 0; j < op.size(); ++j) {
                if (i != j) EXPECT_GE(op.matrix(i, j), 0.0);
            }
        }
    }
}

TEST(Generator, PlanarSymmetric) {
    const auto op = assemble_generator(LevyModel::alpha_stable(1.0, 2), Grid2D(1.0, 0.5, 16, 8));
    EXPECT_EQ(op.size(), 128);
    EXPECT_LT((op.matrix - op.matrix.transpose()).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_GT(op.killing.minCoeff(), 0.0);
}

TEST(Generator, SmallJumpRemovalKeepsRowBalance) {
    const auto op = assemble_generator(LevyModel::alpha_stable(1.5), Grid1D(1.0, 64));
    const auto cut = without_small_jumps(op, 1e-3);
    EXPECT_LT(cut.head, op.head);
    const Eigen::VectorXd rows = cut.matrix.rowwise().sum() + cut.killing;
    EXPECT_LT(rows.cwiseAbs().maxCoeff(), 1e-9);
    const Eigen::Index n = op.size();
    const double drop = op.head - cut.head;
    EXPECT_LT((cut.killing.segment(1, n - 2) - op.killing.segment(1, n - 2)).cwiseAbs().maxCoeff(),
              1e-8 * op.killing.maxCoeff());
    EXPECT_NEAR(op.killing(0) - cut.killing(0), drop, 1e-9 * drop);
    EXPECT_NEAR(op.killing(n - 1) - cut.killing(n - 1), drop, 1e-9 * drop);
    EXPECT_THROW(without_small_jumps(op, 0.1), ResolutionError);
}

TEST(Generator, BrownianIsSecondDifference) {
    const Grid1D g(1.0, 16);
    const auto op = assemble_generator(LevyModel::brownian_reference(), g);
    const double h2 = g.h() * g.h();
    EXPECT_NEAR(op.matrix(5, 5), -2.0 / h2, 1e-12);
    EXPECT_NEAR(op.matrix(5, 6), 1.0 / h2, 1e-12);
    EXPECT_EQ(op.matrix(5, 8), 0.0);
}

TEST(KilledSemigroup, MeanExitTimeMatchesClosedForm) {
    for (double alpha : {0.5, 1.0, 1.5}) {
        const Grid1D g(1.0, 256);
        const auto e = mean_exit_time(assemble_generator(LevyModel::alpha_stable(alpha), g));
        for (double x : {0.0, 0.5}) {
            EXPECT_NEAR(g.interpolate(e, x), stable_mean_exit_time(alpha, x), 2e-3) << "alpha " << alpha << " x " << x;
        }
    }
}

TEST(KilledSemigroup, BrownianSurvivalMatchesSeries) {
    const Grid1D g(1.0, 512);
    const auto psi = survival_pde(LevyModel::brownian_reference(), Domain::interval(1.0), 0.3, g);
    EXPECT_NEAR(g.interpolate(psi, 0.5), brownian_survival(0.5, 0.3), 1e-6);
    EXPECT_NEAR(brownian_survival(0.5, 0.3), 0.429842525373871141336459669757, 1e-14);
}

TEST(KilledSemigroup, SurvivalIsProbabilityAndDecreasing) {
    const auto op = assemble_generator(LevyModel::alpha_stable(1.0), Grid1D(1.0, 128));
    const auto psi = survival_pde(op, {0.0, 0.5, 1.0, 3.0});
    for (double v : psi[0]) EXPECT_EQ(v, 1.0);
    for (std::size_t k = 1; k < psi.size(); ++k) {
        for (std::size_t i = 0; i < psi[k].size(); ++i) {
            EXPECT_GE(psi[k][i], 0.0);
            EXPECT_LE(psi[k][i], psi[k - 1][i]);
        }
    }
}

TEST(KilledSemigroup, CauchyCentreValue) {
    const Grid1D g(1.0, 512);
    const auto psi = survival_pde(LevyModel::alpha_stable(1.0), Domain::interval(1.0), 1.0, g);
    EXPECT_NEAR(g.interpolate(psi, 0.0), 0.38203, 5e-5);
}

TEST(KilledSemigroup, UniformizationMatchesSpectral) {
    const auto op = assemble_generator(LevyModel::alpha_stable(1.2), Grid1D(1.0, 32));
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(op.size());
    const auto uni = uniformized_action(op.matrix, ones, {0.2, 1.0});
    const SpectralSemigroup sg(op.matrix);
    EXPECT_LT((uni[0] - sg.apply(0.2, ones)).cwiseAbs().maxCoeff(), 1e-11);
    EXPECT_LT((uni[1] - sg.apply(1.0, ones)).cwiseAbs().maxCoeff(), 1e-11);
}

TEST(KilledSemigroup, NonnegativeExponential) {
    const auto op = assemble_generator(LevyModel::alpha_stable(1.0), Grid1D(1.0, 32));
    const Eigen::MatrixXd p = nonnegative_expm(op.matrix, 0.3);
    EXPECT_GE(p.minCoeff(), 0.0);
    const SpectralSemigroup sg(op.matrix);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(op.size());
    EXPECT_LT((p * ones - sg.apply(0.3, ones)).cwiseAbs().maxCoeff(), 1e-11);
}

TEST(KilledSemigroup, GreenFunctionRowSumsAreMeanExitTimes) {
    const Grid1D g(1.0, 64);
    const auto op = assemble_generator(LevyModel::alpha_stable(0.8), g);
    const Eigen::MatrixXd green = green_function(op);
    const auto e = mean_exit_time(op);
    for (std::size_t i = 0; i < g.n; ++i) {
        EXPECT_NEAR(green.row(static_cast<Eigen::Index>(i)).sum(), e[i], 1e-10 * e[i]);
    }
}

TEST(ExitLawQuadrature, TotalMassIsOne) {
    const auto op = assemble_generator(LevyModel::alpha_stable(1.0), Grid1D(1.0, 64));
    const ExitLaw law(op);
    const double inf = std::numeric_limits<double>::infinity();
    for (std::size_t i : {0u, 20u, 40u}) {
        EXPECT_NEAR(law.probability(i, 0.0, inf, -inf, inf), 1.0, 1e-10);
        const double right = law.probability(i, 0.0, inf, 1.0, inf);
        const double left = law.probability(i, 0.0, inf, -inf, -1.0);
        EXPECT_NEAR(right + left, 1.0, 1e-10);
    }
}

TEST(ExitLawQuadrature, SymmetricStartSplitsEvenly) {
    const auto op = assemble_generator(LevyModel::alpha_stable(1.5), Grid1D(1.0, 64));
    const ExitLaw law(op);
    const double inf = std::numeric_limits<double>::infinity();
    EXPECT_NEAR(law.probability(31, 0.0, inf, 1.0, inf), law.probability(32, 0.0, inf, -inf, -1.0), 1e-12);
}

TEST(Eigenpair, BrownianMatchesExactEigenvalue) {
    const Grid1D g(1.0, 128);
    const auto op = assemble_generator(LevyModel::brownian_reference(), g);
    const auto pair = first_eigenpair(op);
    const double exact = 4.0 / (g.h() * g.h()) * std::pow(std::sin(std::numbers::pi * g.h() / 4.0), 2);
    EXPECT_NEAR(pair.lambda, exact, 1e-10);
    EXPECT_NEAR(pair.phi[64], std::cos(std::numbers::pi * g.node(64) / 2.0), 1e-4);
}

TEST(Eigenpair, CauchyExtrapolatedEigenvalue) {
    // Reference: the first Dirichlet eigenvalue of the Cauchy process on (-1, 1), 1.1577738836977.
    const auto pair = first_eigenpair(LevyModel::alpha_stable(1.0), Domain::interval(1.0), Grid1D(1.0, 256));
    EXPECT_NEAR(pair.extrapolated, 1.1577738836977, 1e-5);
    EXPECT_EQ(pair.history.size(), 3u);
    EXPECT_GT(pair.lambda2, pair.lambda);
    double sq = 0.0;
    for (double v : pair.phi) sq += v * v * 2.0 / 256.0;
    EXPECT_NEAR(sq, 1.0, 1e-12);
}

TEST(Eigenpair, LimitDeviationShrinks) {
    const auto rep = eigen_limit_check(LevyModel::alpha_stable(1.0), Domain::interval(1.0), Grid1D(1.0, 128), {1.0, 3.0, 5.0});
    EXPECT_GT(rep.deviation[0], rep.deviation[1]);
    EXPECT_GT(rep.deviation[1], rep.deviation[2]);
    EXPECT_LT(rep.deviation[2], 1e-3);
}

TEST(DifferenceKernel, SignStructureOnCoarseGrid) {
    const auto dom = Domain::interval(1.0);
    const Grid1D g(1.0, 64);
    const auto op = assemble_generator(LevyModel::alpha_stable(1.0), g);
    const SubDomain u(dom, -1.0, 0.5);
    const DifferenceKernel f(op, u, 0.5);
    const auto sweep = sweep_sign_structure(f, g);
    EXPECT_GE(sweep.min_positive_zone, -1e-12);
    EXPECT_LE(sweep.max_negative_zone, 1e-12);
    EXPECT_GT(sweep.min_difference_density, 0.0);
    EXPECT_GT(sweep.positive_evaluations, 0u);
}

TEST(DifferenceKernel, RejectsPointsInsideClosure) {
    const auto dom = Domain::interval(1.0);
    const Grid1D g(1.0, 32);
    const auto op = assemble_generator(LevyModel::alpha_stable(1.0), g);
    const SubDomain u(dom, -0.5, 0.5);
    const DifferenceKernel f(op, u, 0.2);
    const std::size_t x = f.plus_nodes().front();
    EXPECT_THROW(static_cast<void>(f(x, 0.25)), DomainError);
    EXPECT_THROW(static_cast<void>(f(0, 0.75)), DomainError);
    EXPECT_NO_THROW(static_cast<void>(f(x, 0.75)));
}

TEST(DifferenceKernel, IdentityResidualDecreases) {
    const auto m = LevyModel::alpha_stable(1.0);
    const SubDomain u(Domain::interval(1.0), -1.0, 0.5);
    const auto at = [&](std::size_t n, std::size_t panels) {
        const Grid1D g(1.0, n);
        return check_difference_identity(assemble_generator(m, g), u, nearest_plus_node(g, u, 0.25), 0.5, panels);
    };
    const auto coarse = at(64, 16);
    const auto fine = at(128, 32);
    EXPECT_LT(fine.residual, 0.6 * coarse.residual);
    EXPECT_LT(fine.residual, 1e-3);
    EXPECT_EQ(fine.left_term, 0.0);
}

}  // namespace levylab
