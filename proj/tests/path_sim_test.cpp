#include "levylab/path_sim.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

namespace levylab {

TEST(PathRng, StreamSeedsAreDistinctAndStable) {
    EXPECT_EQ(stream_seed(1, 0), stream_seed(1, 0));
    EXPECT_NE(stream_seed(1, 0), stream_seed(1, 1));
    EXPECT_NE(stream_seed(1, 0, 1), stream_seed(1, 0, 2));
    EXPECT_GT(PathRng::to_unit(0), 0.0);
    EXPECT_LT(PathRng::to_unit(~0ULL), 1.0);
}

TEST(JumpSampler, JumpsExceedCutoff) {
    const auto m = LevyModel::alpha_stable(1.0);
    const JumpSampler sampler(m, 1e-2);
    PathRng rng(3);
    for (int i = 0; i < 2000; ++i) {
        const Point j = sample_jump(sampler, rng);
        EXPECT_GE(std::hypot(j[0], j[1]), 1e-2 * (1.0 - 1e-12));
    }
}

TEST(JumpSampler, RateIsTailMass) {
    const auto m = LevyModel::tempered_stable(0.8, 1.0);
    EXPECT_NEAR(compound_poisson_rate(m, 0.05), tail_mass(m, 0.05), 1e-12 * tail_mass(m, 0.05));
}

TEST(SurvivalMc, StartOutsideDomainDiesImmediately) {
    const auto est = estimate_survival(LevyModel::alpha_stable(1.0), Domain::interval(1.0), {1.5, 0.0}, 0.5, 100, 1e-2, 1);
    EXPECT_EQ(est.value, 0.0);
}

TEST(SurvivalMc, TimeZeroSurvivesInside) {
    const auto est = estimate_survival(LevyModel::alpha_stable(1.0), Domain::interval(1.0), {0.2, 0.0}, 0.0, 100, 1e-2, 1);
    EXPECT_EQ(est.value, 1.0);
}

TEST(SurvivalMc, SameSeedSameCounts) {
    const auto m = LevyModel::alpha_stable(0.5);
    const auto dom = Domain::interval(1.0);
    const std::vector<Point> pts{{-0.5, 0.0}, {0.0, 0.0}, {0.5, 0.0}};
    const auto a = simulate_survival_profile(m, dom, pts, {0.1, 1.0}, 20000, 1e-3, 11);
    const auto b = simulate_survival_profile(m, dom, pts, {0.1, 1.0}, 20000, 1e-3, 11);
    EXPECT_EQ(a.joint, b.joint);
    const auto c = simulate_survival_profile(m, dom, pts, {0.1, 1.0}, 20000, 1e-3, 12);
    EXPECT_NE(a.joint, c.joint);
}

TEST(SurvivalMc, WorkerCountDoesNotChangeCounts) {
    const auto m = LevyModel::alpha_stable(1.0, 2);
    const auto dom = Domain::box(1.0, 0.5);
    const std::vector<Point> pts{{-0.3, 0.2}, {0.0, 0.2}, {0.6, 0.2}};
    McOptions one;
    one.jobs = 1;
    one.block = 512;
    McOptions three = one;
    three.jobs = 3;
    const auto a = simulate_survival_profile(m, dom, pts, {0.2, 0.6}, 5000, 1e-2, 5, one);
    const auto b = simulate_survival_profile(m, dom, pts, {0.2, 0.6}, 5000, 1e-2, 5, three);
    EXPECT_EQ(a.joint, b.joint);
}

TEST(SurvivalMc, MirroredCouplingIsExactlySymmetric) {
    const auto m = LevyModel::alpha_stable(1.5);
    const std::vector<Point> pts{{-0.6, 0.0}, {0.6, 0.0}};
    const auto p = simulate_survival_profile(m, Domain::interval(1.0), pts, {0.3}, 5000, 1e-2, 2);
    EXPECT_EQ(p.count(0, 0), p.count(0, 1));
}

TEST(SurvivalMc, CountsAreMonotoneInTime) {
    const auto p = simulate_survival_profile(LevyModel::alpha_stable(1.0), Domain::interval(1.0), {{0.0, 0.0}},
                                             {0.1, 0.5, 1.0, 2.0}, 5000, 1e-2, 9);
    for (std::size_t k = 1; k < 4; ++k) EXPECT_LE(p.count(k, 0), p.count(k - 1, 0));
}

TEST(SurvivalMc, CovarianceMatrixIsConsistent) {
    const std::vector<Point> pts{{-0.2, 0.0}, {0.1, 0.0}};
    const auto p = simulate_survival_profile(LevyModel::alpha_stable(1.0), Domain::interval(1.0), pts, {1.0}, 4000, 1e-2, 4);
    EXPECT_NEAR(p.covariance(0, 0, 1), p.covariance(0, 1, 0), 0.0);
    const double var = p.se(0, 0) * p.se(0, 0) + p.se(0, 1) * p.se(0, 1) - 2.0 * p.covariance(0, 0, 1);
    EXPECT_NEAR(p.paired_se(0, 0, 1), std::sqrt(std::max(0.0, var)), 1e-15);
}

TEST(SurvivalMc, CauchyCentreAgreesWithGridValue) {
    // Grid value of P^0(tau > 1) for the Cauchy process on (-1, 1) at N = 512.
    const double reference = 0.38203;
    const auto est = estimate_survival(LevyModel::alpha_stable(1.0), Domain::interval(1.0), {0.0, 0.0}, 1.0, 40000, 1e-3, 21);
    EXPECT_NEAR(est.value, reference, 4.0 * est.se + 2e-3);
}

TEST(SurvivalMc, RejectsBadArguments) {
    const auto m = LevyModel::alpha_stable(1.0);
    EXPECT_THROW(estimate_survival(m, Domain::interval(1.0), {0.0, 0.0}, 1.0, 0, 1e-3, 1), ParameterError);
    EXPECT_THROW(estimate_survival(m, Domain::box(1.0, 1.0), {0.0, 0.0}, 1.0, 10, 1e-3, 1), ParameterError);
    EXPECT_THROW(simulate_survival_profile(m, Domain::interval(1.0), {{0.0, 0.0}}, {1.0, 0.5}, 10, 1e-3, 1),
                 ParameterError);
}

TEST(ExitLawMc, SamplesLieOutsideDomain) {
    const auto s = sample_exit_law(LevyModel::alpha_stable(1.0), Domain::interval(1.0), {0.3, 0.0}, 2000, 1e-2, 8);
    ASSERT_EQ(s.size(), 2000u);
    for (const auto& e : s) {
        EXPECT_GT(e.tau, 0.0);
        EXPECT_GE(std::abs(e.position[0]), 1.0);
    }
    const auto right = empirical_probability(s, [](const ExitSample& e) { return e.position[0] > 0.0; });
    EXPECT_EQ(right.total, 2000u);
    EXPECT_GT(right.value, 0.5);
}

TEST(ExitLawMc, WorkerCountDoesNotChangeSamples) {
    const auto m = LevyModel::alpha_stable(0.7);
    const auto a = sample_exit_law(m, Domain::interval(1.0), {0.0, 0.0}, 3000, 1e-2, 8, 1);
    const auto b = sample_exit_law(m, Domain::interval(1.0), {0.0, 0.0}, 3000, 1e-2, 8, 2);
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].tau, b[i].tau);
        EXPECT_EQ(a[i].position, b[i].position);
    }
}

TEST(ExitLawMc, CsvHeader) {
    const auto s = sample_exit_law(LevyModel::alpha_stable(1.0), Domain::interval(1.0), {0.0, 0.0}, 3, 1e-2, 1);
    std::ostringstream os;
    write_exit_csv(os, s, 1);
    EXPECT_EQ(os.str().rfind("tau,x1\n", 0), 0u);
}

}  // namespace levylab
