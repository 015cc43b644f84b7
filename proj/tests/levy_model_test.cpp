#include "levylab/levy_model.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

namespace levylab {

// Reference values below were computed independently with mpmath at 30 digits.

TEST(LevyModel, StableConstant) {
    EXPECT_NEAR(stable_constant(1.0, 1), 1.0 / std::numbers::pi, 1e-15);
    EXPECT_NEAR(stable_constant(0.5, 1), 0.199471140200716338969973029967, 1e-15);
    EXPECT_NEAR(stable_constant(1.5, 2), 0.171167129690552342925202071994, 1e-15);
}

TEST(LevyModel, StableExponentIsPowerLaw) {
    const auto m = LevyModel::alpha_stable(1.3, 1, 2.0);
    EXPECT_NEAR(char_exponent(m, 3.0), 2.0 * std::pow(3.0, 1.3), 1e-12);
    const auto bm = LevyModel::brownian_reference(1);
    EXPECT_DOUBLE_EQ(char_exponent(bm, 2.0), 4.0);
}

TEST(LevyModel, TemperedExponentByQuadrature) {
    const auto m = LevyModel::tempered_stable(0.7, 2.0);
    EXPECT_NEAR(char_exponent(m, 3.0), 0.597693017954910656838557419545, 1e-10);
}

TEST(LevyModel, TruncatedExponentByQuadrature) {
    const auto m = LevyModel::truncated_stable(1.2, 1.5);
    EXPECT_NEAR(char_exponent(m, 4.0), 4.97151698526795470280514870438, 1e-9);
}

TEST(LevyModel, TailMassOfStableMeasure) {
    EXPECT_NEAR(tail_mass(LevyModel::alpha_stable(1.0), 0.01), 63.661977236758134307553505349, 1e-9);
}

TEST(LevyModel, ShellMassIsDifferenceOfTails) {
    const auto m = LevyModel::tempered_stable(1.1, 0.5);
    EXPECT_NEAR(shell_mass(m, 0.2, 0.7), tail_mass(m, 0.2) - tail_mass(m, 0.7), 1e-9);
}

TEST(TransitionDensity, CauchyClosedForm) {
    const auto m = LevyModel::alpha_stable(1.0);
    for (double x : {0.0, 0.5, 1.7}) {
        const double exact = 2.0 / (std::numbers::pi * (4.0 + x * x));
        EXPECT_NEAR(transition_density(m, 2.0, x), exact, 1e-12) << "x = " << x;
    }
}

TEST(TransitionDensity, PlanarCauchyClosedForm) {
    const auto m = LevyModel::alpha_stable(1.0, 2);
    const double exact = 1.0 / (2.0 * std::numbers::pi * std::pow(1.25, 1.5));
    EXPECT_NEAR(transition_density(m, 1.0, 0.5), exact, 1e-12);
}

TEST(TransitionDensity, StableOneHalf) {
    EXPECT_NEAR(transition_density(LevyModel::alpha_stable(0.5), 1.0, 0.7), 0.124322207730921410713835698241, 1e-7);
}

TEST(TransitionDensity, StableThreeHalves) {
    EXPECT_NEAR(transition_density(LevyModel::alpha_stable(1.5), 0.5, 0.3), 0.419874672067190120753316181409, 1e-9);
    EXPECT_NEAR(transition_density(LevyModel::alpha_stable(1.5, 2), 1.0, 0.4), 0.0886097103822999692152610992172,
                1e-9);
}

TEST(TransitionDensity, RejectsNonpositiveTime) {
    EXPECT_THROW(transition_density(LevyModel::alpha_stable(1.0), 0.0, 0.1), Error);
}

TEST(LevyModel, ValidationRejectsBadParameters) {
    EXPECT_THROW(validate(LevyModel::alpha_stable(2.0)), ParameterError);
    EXPECT_THROW(validate(LevyModel::alpha_stable(0.0)), ParameterError);
    EXPECT_THROW(validate(LevyModel::alpha_stable(1.0, 3)), ParameterError);
    EXPECT_THROW(validate(LevyModel::tempered_stable(1.0, -1.0)), ParameterError);
    EXPECT_NO_THROW(validate(LevyModel::truncated_stable(1.0, 0.5)));
}

TEST(LevyModel, HypothesesOfPureJumpModels) {
    for (const auto& m : {LevyModel::alpha_stable(0.5), LevyModel::tempered_stable(1.2, 3.0),
                          LevyModel::truncated_stable(0.8, 1.0, 2)}) {
        const auto rep = check_hypotheses(m);
        EXPECT_TRUE(rep.ok()) << to_string(m.kind);
        EXPECT_TRUE(rep.pure_jump && rep.unimodal && rep.infinite_measure);
    }
}

TEST(LevyModel, BrownianReferenceViolatesPureJump) {
    const auto rep = check_hypotheses(LevyModel::brownian_reference());
    ASSERT_FALSE(rep.ok());
    EXPECT_NE(rep.violations.front().find("pure jump"), std::string::npos);
}

TEST(LevyModel, BrownianHasNoJumpDensity) {
    EXPECT_THROW(levy_density(LevyModel::brownian_reference(), 1.0), UnsupportedModelError);
}

TEST(LevyModel, LogGrowth) {
    EXPECT_TRUE(check_log_growth(LevyModel::alpha_stable(0.5)).satisfied);
    EXPECT_FALSE(check_log_growth([](double xi) { return std::log1p(xi); }).satisfied);
}

TEST(LevyModel, JsonRoundTrip) {
    const auto m = LevyModel::tempered_stable(0.9, 1.5, 2, 0.5);
    const nlohmann::json j = m;
    EXPECT_EQ(j.get<LevyModel>(), m);
    EXPECT_THROW(nlohmann::json({{"kind", "gamma"}}).get<LevyModel>(), ValidationError);
}

}  // namespace levylab
