#pragma once

#include "levylab/difference.hpp"
#include "levylab/eigenpair.hpp"
#include "levylab/errors.hpp"
#include "levylab/killed.hpp"
#include "levylab/path_sim.hpp"

#include <Eigen/Dense>
#include <boost/math/distributions/normal.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace levylab {

enum class Verdict { Pass, Inconclusive, Fail, Skipped };

inline std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::Pass: return "PASS";
        case Verdict::Inconclusive: return "INCONCLUSIVE";
        case Verdict::Fail: return "FAIL";
        case Verdict::Skipped: return "SKIPPED";
    }
    return "FAIL";
}

inline Verdict verdict_from_string(const std::string& s) {
    if (s == "PASS") return Verdict::Pass;
    if (s == "INCONCLUSIVE") return Verdict::Inconclusive;
    if (s == "FAIL") return Verdict::Fail;
    if (s == "SKIPPED") return Verdict::Skipped;
    throw ValidationError("unknown verdict '" + s + "'");
}

/// Aggregate: any FAIL fails, then any INCONCLUSIVE, and SKIPPED only when everything was skipped.
inline Verdict combine(const std::vector<Verdict>& vs) {
    if (vs.empty()) return Verdict::Fail;
    bool inconclusive = false;
    bool all_skipped = true;
    for (Verdict v : vs) {
        if (v == Verdict::Fail) return Verdict::Fail;
        if (v == Verdict::Inconclusive) inconclusive = true;
        if (v != Verdict::Skipped) all_skipped = false;
    }
    if (all_skipped) return Verdict::Skipped;
    return inconclusive ? Verdict::Inconclusive : Verdict::Pass;
}

/// Outcome of one property check.
struct CheckReport {
    std::string id;
    /// Name of the experiment that produced the report.
    std::string experiment;
    /// Backend, time and other coordinates that distinguish reports with the same id.
    nlohmann::json context = nlohmann::json::object();
    Verdict verdict = Verdict::Fail;
    std::size_t comparisons = 0;
    std::size_t violations = 0;
    std::size_t inconclusive = 0;
    /// Smallest margin (required difference minus its tolerance floor; negative means violated).
    double worst_margin = std::numeric_limits<double>::infinity();
    /// Largest violation in units of its standard error (statistical checks only).
    double worst_z = 0.0;
    std::string reason;
    nlohmann::json details = nlohmann::json::object();
};

inline void to_json(nlohmann::json& j, const CheckReport& r) {
    j = nlohmann::json{{"id", r.id},
                       {"experiment", r.experiment},
                       {"context", r.context},
                       {"verdict", to_string(r.verdict)},
                       {"comparisons", r.comparisons},
                       {"violations", r.violations},
                       {"inconclusive", r.inconclusive},
                       {"worst_margin", std::isfinite(r.worst_margin) ? nlohmann::json(r.worst_margin) : nlohmann::json()},
                       {"worst_z", r.worst_z},
                       {"reason", r.reason},
                       {"details", r.details}};
}

/// Tolerance ladder for statistical comparisons.
struct Ladder {
    /// Per-comparison multiple of the standard error.
    double sigma = 3.0;
    /// Deterministic tolerance added to every comparison.
    double floor = 0.0;
};

/// z-value above which a violation is significant after a Bonferroni correction over m comparisons.
inline double bonferroni_z(double sigma, std::size_t m) {
    if (m <= 1) return sigma;
    const boost::math::normal_distribution<double> unit;
    const double tail = boost::math::cdf(boost::math::complement(unit, sigma)) / static_cast<double>(m);
    return std::max(sigma, boost::math::quantile(boost::math::complement(unit, tail)));
}

namespace detail {

/// Classifies signed margins (≥ 0 means the property holds) and fills the report.
inline void classify(CheckReport& rep, const std::vector<double>& margins, const std::vector<double>& ses,
                     const Ladder& ladder) {
    rep.comparisons = margins.size();
    const double zb = bonferroni_z(ladder.sigma, margins.size());
    for (std::size_t i = 0; i < margins.size(); ++i) {
        const double m = margins[i];
        const double se = ses.empty() ? 0.0 : ses[i];
        rep.worst_margin = std::min(rep.worst_margin, m);
        const double excess = -m - ladder.floor;  // > 0 when beyond the deterministic floor
        if (excess <= ladder.sigma * se) continue;
        if (se > 0.0) rep.worst_z = std::max(rep.worst_z, excess / se);
        if (se > 0.0 && excess <= zb * se) {
            ++rep.inconclusive;
        } else {
            ++rep.violations;
        }
    }
    if (rep.comparisons == 0) {
        rep.verdict = Verdict::Fail;
        rep.reason = "no comparisons were made";
    } else if (rep.violations > 0) {
        rep.verdict = Verdict::Fail;
    } else if (rep.inconclusive > 0) {
        rep.verdict = Verdict::Inconclusive;
        rep.reason = "violations within the Bonferroni-corrected noise band";
    } else {
        rep.verdict = Verdict::Pass;
    }
    rep.details["bonferroni_z"] = zb;
    rep.details["sigma"] = ladder.sigma;
    rep.details["floor"] = ladder.floor;
}

}  // namespace detail

/// Profile values along the e₁ axis with optional estimator covariance.
struct ProfileInput {
    std::vector<double> x;
    std::vector<double> value;
    /// Covariance of the estimates (empty for deterministic profiles).
    Eigen::MatrixXd covariance;

    [[nodiscard]] bool statistical() const { return covariance.size() > 0; }
    [[nodiscard]] double contrast_se(const std::vector<std::pair<std::size_t, double>>& terms) const {
        if (!statistical()) return 0.0;
        double var = 0.0;
        for (const auto& [i, ci] : terms) {
            for (const auto& [j, cj] : terms) {
                var += ci * cj * covariance(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            }
        }
        return std::sqrt(std::max(0.0, var));
    }
};

inline ProfileInput profile_input(const SurvivalProfile& p, std::size_t k, const std::vector<std::size_t>& index) {
    ProfileInput in;
    const auto m = static_cast<Eigen::Index>(index.size());
    in.covariance.resize(m, m);
    for (std::size_t a = 0; a < index.size(); ++a) {
        in.x.push_back(p.points[index[a]][0]);
        in.value.push_back(p.value(k, index[a]));
        for (std::size_t b = 0; b < index.size(); ++b) {
            in.covariance(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = p.covariance(k, index[a], index[b]);
        }
    }
    return in;
}

/// ψ nondecreasing on (-a, 0] and nonincreasing on [0, a) between consecutive points.
inline CheckReport check_monotone(const ProfileInput& in, const Ladder& ladder, std::string id = "monotone") {
    if (in.x.size() != in.value.size()) throw ParameterError("profile points and values differ in length");
    for (std::size_t i = 1; i < in.x.size(); ++i) {
        if (!(in.x[i] > in.x[i - 1])) throw ParameterError("profile points must be sorted along e1");
    }
    CheckReport rep;
    rep.id = std::move(id);
    std::vector<double> margins;
    std::vector<double> ses;
    for (std::size_t i = 0; i + 1 < in.x.size(); ++i) {
        if (in.x[i + 1] <= 0.0) {
            margins.push_back(in.value[i + 1] - in.value[i]);
            ses.push_back(in.contrast_se({{i + 1, 1.0}, {i, -1.0}}));
        } else if (in.x[i] >= 0.0) {
            margins.push_back(in.value[i] - in.value[i + 1]);
            ses.push_back(in.contrast_se({{i, 1.0}, {i + 1, -1.0}}));
        }
    }
    detail::classify(rep, margins, ses, ladder);
    return rep;
}

/// ψ(x'') - ψ(x') ≥ ψ(x''') - ψ(x'') for consecutive equally spaced triples inside (-a/2, a/2).
inline CheckReport check_midconcave(const ProfileInput& in, double a, const Ladder& ladder,
                                    std::string id = "midconcave") {
    if (in.x.size() != in.value.size()) throw ParameterError("profile points and values differ in length");
    if (in.x.size() < 3) throw ParameterError("mid-concavity needs at least three points");
    const double spacing = in.x[1] - in.x[0];
    for (std::size_t i = 1; i < in.x.size(); ++i) {
        const double d = in.x[i] - in.x[i - 1];
        if (!(d > 0.0) || std::abs(d - spacing) > 1e-9 * std::max(1.0, std::abs(spacing))) {
            throw ParameterError("mid-concavity triples must be equally spaced");
        }
    }
    if (!(in.x.front() > -0.5 * a) || !(in.x.back() < 0.5 * a)) {
        throw ParameterError("mid-concavity triples must lie inside (-a/2, a/2)");
    }
    CheckReport rep;
    rep.id = std::move(id);
    std::vector<double> margins;
    std::vector<double> ses;
    double across = std::numeric_limits<double>::quiet_NaN();
    double elsewhere = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 2 < in.x.size(); ++i) {
        const double m = 2.0 * in.value[i + 1] - in.value[i] - in.value[i + 2];
        margins.push_back(m);
        ses.push_back(in.contrast_se({{i, -1.0}, {i + 1, 2.0}, {i + 2, -1.0}}));
        if (in.x[i] < 0.0 && in.x[i + 2] > 0.0) {
            across = std::isnan(across) ? m : std::min(across, m);
        } else {
            elsewhere = std::min(elsewhere, m);
        }
    }
    detail::classify(rep, margins, ses, ladder);
    rep.details["triples"] = margins.size();
    rep.details["spacing"] = spacing;
    rep.details["min_margin_across_zero"] = std::isnan(across) ? nlohmann::json() : nlohmann::json(across);
    rep.details["min_margin_elsewhere"] = std::isfinite(elsewhere) ? nlohmann::json(elsewhere) : nlohmann::json();
    return rep;
}

/// Extremes of the difference kernel over positive and negative zones for several U and s.
inline CheckReport check_sign_structure(const DiscretizedOperator& op_d, const std::vector<SubDomain>& subs,
                                        const std::vector<double>& s_values, double t, double tolerance = 1e-12) {
    CheckReport rep;
    rep.id = "prop31_sign";
    rep.worst_margin = std::numeric_limits<double>::infinity();
    nlohmann::json cases = nlohmann::json::array();
    const double a = op_d.grid.a;
    for (const auto& u : subs) {
        for (double s : s_values) {
            const DifferenceKernel f(op_d, u, s);
            const SignSweep sw = sweep_sign_structure(f, op_d.grid);
            rep.comparisons += sw.positive_evaluations + sw.negative_evaluations + f.plus_nodes().size() * f.plus_nodes().size();
            const double margin = std::min({sw.min_positive_zone, -sw.max_negative_zone, sw.min_difference_density});
            rep.worst_margin = std::min(rep.worst_margin, margin);
            if (sw.min_positive_zone < -tolerance) ++rep.violations;
            if (sw.max_negative_zone > tolerance) ++rep.violations;
            if (sw.min_difference_density < -tolerance) ++rep.violations;
            cases.push_back({{"U", {u.l, u.r}},
                             {"s", s},
                             {"min_positive_zone", sw.min_positive_zone},
                             {"max_negative_zone", sw.max_negative_zone},
                             {"min_difference_density", sw.min_difference_density},
                             {"positive_evaluations", sw.positive_evaluations},
                             {"negative_evaluations", sw.negative_evaluations}});
        }
        if (std::abs(u.l + a) <= 1e-12 * a) {
            // With l(U) = -a no part of D lies left of U, so the left term vanishes identically.
            const std::size_t x = nearest_plus_node(op_d.grid, u, u.r);
            const auto id = check_difference_identity(op_d, u, x, t, 8);
            ++rep.comparisons;
            if (id.left_term != 0.0) ++rep.violations;
            cases.push_back({{"U", {u.l, u.r}}, {"t", t}, {"left_term", id.left_term}});
        }
    }
    rep.details["cases"] = cases;
    rep.details["tolerance"] = tolerance;
    if (rep.comparisons == 0) {
        rep.verdict = Verdict::Fail;
        rep.reason = "no comparisons were made";
    } else {
        rep.verdict = rep.violations == 0 ? Verdict::Pass : Verdict::Fail;
    }
    return rep;
}

/// Identity residuals at a sequence of simultaneous grid and time refinements: the last
/// residual must be below `tolerance` and each refinement must shrink it by `max_ratio`.
inline CheckReport check_identity_refinement(const LevyModel& m, const Domain& dom, const SubDomain& u, double x,
                                             double t, const std::vector<std::pair<std::size_t, std::size_t>>& levels,
                                             double tolerance, double max_ratio) {
    CheckReport rep;
    rep.id = "prop31_identity";
    nlohmann::json rows = nlohmann::json::array();
    std::vector<double> residuals;
    for (const auto& [n, panels] : levels) {
        const Grid1D g(dom.a, n);
        detail::require_grid(dom, g);
        const auto op = assemble_generator(m, g);
        const std::size_t j = nearest_plus_node(g, u, x);
        const auto r = check_difference_identity(op, u, j, t, panels);
        residuals.push_back(r.residual);
        rows.push_back({{"N", n}, {"panels", panels}, {"x", g.node(j)}, {"lhs", r.lhs}, {"rhs", r.rhs},
                        {"residual", r.residual}, {"left_term", r.left_term}, {"right_term", r.right_term}});
    }
    rep.worst_margin = std::numeric_limits<double>::infinity();
    if (!residuals.empty()) {
        ++rep.comparisons;
        rep.worst_margin = tolerance - residuals.back();
        if (residuals.back() >= tolerance) ++rep.violations;
    }
    nlohmann::json ratios = nlohmann::json::array();
    for (std::size_t i = 1; i < residuals.size(); ++i) {
        const double ratio = residuals[i] / residuals[i - 1];
        ratios.push_back(ratio);
        ++rep.comparisons;
        if (!(ratio < max_ratio)) ++rep.violations;
    }
    rep.details["levels"] = rows;
    rep.details["ratios"] = ratios;
    rep.details["tolerance"] = tolerance;
    rep.details["max_ratio"] = max_ratio;
    rep.verdict = rep.comparisons == 0 ? Verdict::Fail : (rep.violations == 0 ? Verdict::Pass : Verdict::Fail);
    if (rep.comparisons == 0) rep.reason = "no comparisons were made";
    return rep;
}

/// One exit-law event {τ ∈ (t0, t1), X(τ) ∈ (lo, hi)}.
struct ExitRectangle {
    double t0 = 0.0;
    double t1 = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    bool operator==(const ExitRectangle&) const = default;
};

/// MC exit-law frequencies against the quadrature of the exit kernel.
inline CheckReport check_ikeda_watanabe(const LevyModel& m, const Domain& dom, double x,
                                        const std::vector<ExitRectangle>& rects, std::uint64_t n, double eps,
                                        std::uint64_t seed, std::size_t nodes, const Ladder& ladder, unsigned jobs = 1) {
    CheckReport rep;
    rep.id = "ikeda_watanabe";
    const Grid1D fine(dom.a, nodes);
    const Grid1D coarse(dom.a, nodes / 2);
    const auto op_f = assemble_generator(m, fine);
    const auto op_c = assemble_generator(m, coarse);
    const ExitLaw law_f(op_f);
    const ExitLaw law_c(op_c);
    const auto samples = sample_exit_law(m, dom, {x, 0.0}, n, eps, seed, jobs);
    const auto quad_at = [&](const ExitLaw& law, const Grid1D& g, const ExitRectangle& r) {
        // linear interpolation in the starting point between the two nearest nodes
        const double pos = (x + g.a) / g.h() - 0.5;
        const auto j = static_cast<std::size_t>(std::clamp(std::floor(pos), 0.0, static_cast<double>(g.n - 2)));
        const double w = std::clamp(pos - static_cast<double>(j), 0.0, 1.0);
        const double p0 = law.probability(j, r.t0, r.t1, r.lo, r.hi);
        const double p1 = law.probability(j + 1, r.t0, r.t1, r.lo, r.hi);
        return (1.0 - w) * p0 + w * p1;
    };
    std::vector<double> margins;
    std::vector<double> ses;
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : rects) {
        const auto mc = empirical_probability(samples, [&](const ExitSample& s) {
            return s.tau > r.t0 && s.tau < r.t1 && s.position[0] > r.lo && s.position[0] < r.hi;
        });
        const double qf = quad_at(law_f, fine, r);
        const double qc = quad_at(law_c, coarse, r);
        const double quad_tol = std::abs(qf - qc);
        margins.push_back(quad_tol - std::abs(mc.value - qf));
        ses.push_back(mc.se);
        rows.push_back({{"A", {r.t0, std::isinf(r.t1) ? nlohmann::json("inf") : nlohmann::json(r.t1)}},
                        {"B", {std::isinf(r.lo) ? nlohmann::json("-inf") : nlohmann::json(r.lo),
                               std::isinf(r.hi) ? nlohmann::json("inf") : nlohmann::json(r.hi)}},
                        {"mc", mc.value},
                        {"mc_se", mc.se},
                        {"quadrature", qf},
                        {"quadrature_coarse", qc},
                        {"quadrature_tolerance", quad_tol}});
    }
    detail::classify(rep, margins, ses, ladder);
    rep.details["rectangles"] = rows;
    rep.details["x"] = x;
    rep.details["n"] = n;
    rep.details["eps"] = eps;
    rep.details["N"] = nodes;
    return rep;
}

/// One point of a Monte Carlo versus grid comparison.
struct AgreementPoint {
    double t = 0.0;
    Point x{0.0, 0.0};
    double mc = 0.0;
    double se = 0.0;
    /// Grid value for the process the sampler simulates (small jumps removed).
    double pde = 0.0;
    /// Refinement estimate of the grid error at this point.
    double solver_tolerance = 0.0;
    /// Grid value for the untruncated process.
    double pde_untruncated = 0.0;
};

/// |mc - pde| ≤ σ·SE + solver tolerance + bias budget at every point.
inline CheckReport check_backend_agreement(const std::vector<AgreementPoint>& pts, const Ladder& ladder,
                                           std::string id = "backend_agreement") {
    CheckReport rep;
    rep.id = std::move(id);
    std::vector<double> margins;
    std::vector<double> ses;
    nlohmann::json rows = nlohmann::json::array();
    double max_bias = 0.0;
    for (const auto& p : pts) {
        margins.push_back(p.solver_tolerance - std::abs(p.mc - p.pde));
        ses.push_back(p.se);
        max_bias = std::max(max_bias, std::abs(p.pde_untruncated - p.pde));
        rows.push_back({{"t", p.t}, {"x", p.x}, {"mc", p.mc}, {"se", p.se}, {"pde", p.pde},
                        {"solver_tolerance", p.solver_tolerance}, {"pde_untruncated", p.pde_untruncated}});
    }
    detail::classify(rep, margins, ses, ladder);
    rep.details["points"] = rows;
    rep.details["max_truncation_bias"] = max_bias;
    return rep;
}

/// Shape check of φ₁: positive, monotone on both half-lines and mid-concave.
inline CheckReport check_eigen_shape(const LevyModel& m, const EigenPair& pair, const Grid1D& g, double tolerance) {
    CheckReport rep;
    rep.id = "corollary1_eigen_shape";
    const auto growth = check_log_growth(m);
    if (!growth.satisfied) {
        rep.verdict = Verdict::Skipped;
        rep.reason = "log-growth condition on the characteristic exponent does not hold";
        return rep;
    }
    ProfileInput all;
    all.x = g.nodes();
    all.value = pair.phi;
    const Ladder det{0.0, tolerance};
    const auto mono = check_monotone(all, det, "eigen_monotone");
    ProfileInput mid;
    for (std::size_t j = 0; j < g.n; ++j) {
        if (std::abs(g.node(j)) < 0.5 * g.a) {
            mid.x.push_back(g.node(j));
            mid.value.push_back(pair.phi[j]);
        }
    }
    const auto conc = check_midconcave(mid, g.a, det, "eigen_midconcave");
    double min_phi = std::numeric_limits<double>::infinity();
    double asym = 0.0;
    for (std::size_t j = 0; j < g.n; ++j) {
        min_phi = std::min(min_phi, pair.phi[j]);
        asym = std::max(asym, std::abs(pair.phi[j] - pair.phi[g.n - 1 - j]));
    }
    rep.comparisons = mono.comparisons + conc.comparisons + 1;
    rep.violations = mono.violations + conc.violations + (min_phi > 0.0 ? 0 : 1);
    rep.worst_margin = std::min(mono.worst_margin, conc.worst_margin);
    rep.verdict = combine({mono.verdict, conc.verdict, min_phi > 0.0 ? Verdict::Pass : Verdict::Fail});
    rep.details = {{"monotone", mono}, {"midconcave", conc}, {"min_phi", min_phi}, {"max_asymmetry", asym},
                   {"lambda1", pair.lambda}, {"residual", pair.residual}};
    return rep;
}

}  // namespace levylab
