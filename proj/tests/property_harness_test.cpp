#include "levylab/harness.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace levylab {

namespace {

ProfileInput tent(const std::vector<double>& xs) {
    ProfileInput in;
    in.x = xs;
    for (double x : xs) in.value.push_back(1.0 - x * x);
    return in;
}

std::vector<double> equally_spaced(double lo, double step, std::size_t n) {
    std::vector<double> xs;
    for (std::size_t i = 0; i < n; ++i) xs.push_back(lo + step * static_cast<double>(i));
    return xs;
}

}  // namespace

TEST(Verdict, Combine) {
    EXPECT_EQ(combine({Verdict::Pass, Verdict::Pass}), Verdict::Pass);
    EXPECT_EQ(combine({Verdict::Pass, Verdict::Inconclusive}), Verdict::Inconclusive);
    EXPECT_EQ(combine({Verdict::Inconclusive, Verdict::Fail}), Verdict::Fail);
    EXPECT_EQ(combine({Verdict::Skipped, Verdict::Pass}), Verdict::Pass);
    EXPECT_EQ(combine({Verdict::Skipped}), Verdict::Skipped);
    EXPECT_EQ(combine({}), Verdict::Fail);
    EXPECT_EQ(verdict_from_string(to_string(Verdict::Inconclusive)), Verdict::Inconclusive);
    EXPECT_THROW(verdict_from_string("ok"), ValidationError);
}

TEST(Ladder, BonferroniThreshold) {
    // Normal quantiles computed with scipy.stats.norm.
    EXPECT_DOUBLE_EQ(bonferroni_z(3.0, 1), 3.0);
    EXPECT_NEAR(bonferroni_z(3.0, 10), 3.6425222758316242, 1e-9);
    EXPECT_NEAR(bonferroni_z(3.0, 32), 3.931639185188862, 1e-9);
}

TEST(CheckMonotone, PassesOnUnimodalProfile) {
    const auto rep = check_monotone(tent(equally_spaced(-0.9, 0.1, 19)), Ladder{0.0, 1e-10});
    EXPECT_EQ(rep.verdict, Verdict::Pass);
    EXPECT_EQ(rep.comparisons, 18u);
    EXPECT_GT(rep.worst_margin, 0.0);
}

TEST(CheckMonotone, FlagsInjectedViolation) {
    auto in = tent(equally_spaced(-0.9, 0.1, 19));
    in.value[15] += 0.2;
    const auto rep = check_monotone(in, Ladder{0.0, 1e-10});
    EXPECT_EQ(rep.verdict, Verdict::Fail);
    EXPECT_EQ(rep.violations, 1u);
}

TEST(CheckMonotone, FloorAbsorbsRoundoff) {
    auto in = tent(equally_spaced(-0.9, 0.1, 19));
    in.value[15] = in.value[14] + 5e-11;
    EXPECT_EQ(check_monotone(in, Ladder{0.0, 1e-10}).verdict, Verdict::Pass);
    EXPECT_EQ(check_monotone(in, Ladder{0.0, 1e-11}).verdict, Verdict::Fail);
}

TEST(CheckMonotone, StatisticalLadder) {
    ProfileInput in;
    in.x = {-0.2, -0.1, 0.0};
    in.value = {0.50, 0.49, 0.60};
    in.covariance = Eigen::MatrixXd::Identity(3, 3) * 1e-6;
    // One decreasing step of 0.01 against a paired SE of sqrt(2)e-3.
    auto rep = check_monotone(in, Ladder{3.0, 0.0});
    EXPECT_EQ(rep.verdict, Verdict::Fail);
    EXPECT_NEAR(rep.worst_z, 0.01 / std::sqrt(2e-6), 1e-9);
    in.value[1] = 0.4956;  // 3.1 paired SE: beyond 3 but inside the Bonferroni band for two comparisons
    rep = check_monotone(in, Ladder{3.0, 0.0});
    EXPECT_EQ(rep.verdict, Verdict::Inconclusive);
    EXPECT_EQ(rep.inconclusive, 1u);
    in.value[1] = 0.497;
    EXPECT_EQ(check_monotone(in, Ladder{3.0, 0.0}).verdict, Verdict::Pass);
}

TEST(CheckMonotone, RejectsUnsortedPoints) {
    ProfileInput in;
    in.x = {0.1, 0.0};
    in.value = {1.0, 1.0};
    EXPECT_THROW(check_monotone(in, Ladder{}), ParameterError);
}

TEST(CheckMidconcave, PassesOnConcaveProfile) {
    const auto rep = check_midconcave(tent(equally_spaced(-0.45, 0.05, 19)), 1.0, Ladder{0.0, 1e-10});
    EXPECT_EQ(rep.verdict, Verdict::Pass);
    EXPECT_EQ(rep.comparisons, 17u);
    EXPECT_NEAR(rep.worst_margin, 2.0 * 0.05 * 0.05, 1e-12);
}

TEST(CheckMidconcave, FlagsConvexKink) {
    ProfileInput in;
    in.x = equally_spaced(-0.45, 0.05, 19);
    for (double x : in.x) in.value.push_back(std::abs(x));
    const auto rep = check_midconcave(in, 1.0, Ladder{0.0, 1e-10});
    EXPECT_EQ(rep.verdict, Verdict::Fail);
    EXPECT_EQ(rep.violations, 1u);
    EXPECT_LT(rep.details["min_margin_across_zero"].get<double>(), 0.0);
}

TEST(CheckMidconcave, RequiresEqualSpacingInsideMiddleHalf) {
    EXPECT_THROW(check_midconcave(tent({-0.2, 0.0, 0.3}), 1.0, Ladder{}), ParameterError);
    EXPECT_THROW(check_midconcave(tent({-0.6, -0.3, 0.0}), 1.0, Ladder{}), ParameterError);
    EXPECT_THROW(check_midconcave(tent({0.0, 0.1}), 1.0, Ladder{}), ParameterError);
}

TEST(CheckMidconcave, MonteCarloProfileInput) {
    const std::vector<Point> pts{{-0.1, 0.0}, {0.0, 0.0}, {0.1, 0.0}};
    const auto prof = simulate_survival_profile(LevyModel::alpha_stable(1.0), Domain::interval(1.0), pts, {0.5}, 4000,
                                                1e-2, 3);
    const auto in = profile_input(prof, 0, {0, 1, 2});
    EXPECT_NEAR(in.contrast_se({{0, -1.0}, {1, 2.0}, {2, -1.0}}),
                prof.contrast_se(0, {{0, -1.0}, {1, 2.0}, {2, -1.0}}), 1e-15);
    const auto rep = check_midconcave(in, 1.0, Ladder{3.0, 0.0});
    EXPECT_EQ(rep.comparisons, 1u);
    EXPECT_NE(rep.verdict, Verdict::Fail);
}

TEST(CheckSignStructure, PassesForCauchy) {
    const auto dom = Domain::interval(1.0);
    const auto op = assemble_generator(LevyModel::alpha_stable(1.0), Grid1D(1.0, 64));
    const auto rep = check_sign_structure(op, {SubDomain(dom, -1.0, 0.5), SubDomain(dom, -0.75, 0.25)}, {0.5}, 1.0);
    EXPECT_EQ(rep.verdict, Verdict::Pass);
    EXPECT_EQ(rep.violations, 0u);
    EXPECT_GT(rep.comparisons, 0u);
}

TEST(CheckBackendAgreement, Tolerance) {
    AgreementPoint p;
    p.t = 1.0;
    p.x = {0.0, 0.0};
    p.mc = 0.40;
    p.se = 0.001;
    p.pde = 0.402;
    p.pde_untruncated = 0.401;
    p.solver_tolerance = 0.0005;
    EXPECT_EQ(check_backend_agreement({p}, Ladder{3.0, 0.0}).verdict, Verdict::Pass);
    p.pde = 0.41;
    EXPECT_EQ(check_backend_agreement({p}, Ladder{3.0, 0.0}).verdict, Verdict::Fail);
    EXPECT_EQ(check_backend_agreement({p}, Ladder{3.0, 0.01}).verdict, Verdict::Pass);
}

TEST(CheckEigenShape, CauchyEigenfunction) {
    const Grid1D g(1.0, 128);
    const auto m = LevyModel::alpha_stable(1.0);
    const auto pair = first_eigenpair(assemble_generator(m, g));
    const auto rep = check_eigen_shape(m, pair, g, 1e-10);
    EXPECT_EQ(rep.verdict, Verdict::Pass);
    EXPECT_GT(rep.details["min_phi"].get<double>(), 0.0);
}

TEST(CheckReport, JsonFields) {
    CheckReport r;
    r.id = "theorem1_monotone";
    r.verdict = Verdict::Pass;
    const nlohmann::json j = r;
    EXPECT_EQ(j["verdict"], "PASS");
    EXPECT_TRUE(j["worst_margin"].is_null());
}

}  // namespace levylab
