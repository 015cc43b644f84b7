#pragma once

#include "levylab/errors.hpp"
#include "levylab/quadrature.hpp"

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

namespace levylab {

enum class ModelKind { AlphaStable, TemperedStable, TruncatedStable, BrownianReference };

inline std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::AlphaStable: return "alpha_stable";
        case ModelKind::TemperedStable: return "tempered_stable";
        case ModelKind::TruncatedStable: return "truncated_stable";
        case ModelKind::BrownianReference: return "brownian_reference";
    }
    return "unknown";
}

inline ModelKind model_kind_from_string(const std::string& name) {
    if (name == "alpha_stable") return ModelKind::AlphaStable;
    if (name == "tempered_stable") return ModelKind::TemperedStable;
    if (name == "truncated_stable") return ModelKind::TruncatedStable;
    if (name == "brownian_reference") return ModelKind::BrownianReference;
    throw ValidationError("model.kind: unknown kind '" + name + "'");
}

/// A symmetric, isotropic unimodal Lévy process in dimension 1 or 2.
///
/// The jump density is ν(r) = scale · c(d,α) · r^{-d-α} · g(r) with g ≡ 1 for the
/// stable kind, g(r) = exp(-θ r) for the tempered kind and g(r) = 1{r < R} for the
/// truncated kind. The constant c(d,α) is chosen so that the stable kind has
/// characteristic exponent scale · |ξ|^α. The Brownian reference has ψ(ξ) = scale · |ξ|²
/// and no jump density; it exists only to validate the deterministic solver.
struct LevyModel {
    ModelKind kind = ModelKind::AlphaStable;
    double alpha = 1.0;
    double theta = 0.0;
    double radius = 0.0;
    int dimension = 1;
    double scale = 1.0;

    static LevyModel alpha_stable(double alpha, int dimension = 1, double scale = 1.0) {
        return {ModelKind::AlphaStable, alpha, 0.0, 0.0, dimension, scale};
    }
    static LevyModel tempered_stable(double alpha, double theta, int dimension = 1, double scale = 1.0) {
        return {ModelKind::TemperedStable, alpha, theta, 0.0, dimension, scale};
    }
    static LevyModel truncated_stable(double alpha, double radius, int dimension = 1, double scale = 1.0) {
        return {ModelKind::TruncatedStable, alpha, 0.0, radius, dimension, scale};
    }
    static LevyModel brownian_reference(int dimension = 1, double scale = 1.0) {
        return {ModelKind::BrownianReference, 2.0, 0.0, 0.0, dimension, scale};
    }

    [[nodiscard]] bool pure_jump() const { return kind != ModelKind::BrownianReference; }

    bool operator==(const LevyModel&) const = default;
};

/// Throws ParameterError when the fields do not describe a valid model.
inline void validate(const LevyModel& m) {
    if (m.dimension != 1 && m.dimension != 2) throw ParameterError("dimension must be 1 or 2");
    if (!(m.scale > 0.0) || !std::isfinite(m.scale)) throw ParameterError("scale must be positive");
    if (m.kind == ModelKind::BrownianReference) return;
    if (!(m.alpha > 0.0 && m.alpha < 2.0)) throw ParameterError("alpha must lie in (0, 2)");
    if (m.kind == ModelKind::TemperedStable && !(m.theta > 0.0 && std::isfinite(m.theta))) {
        throw ParameterError("theta must be positive");
    }
    if (m.kind == ModelKind::TruncatedStable && !(m.radius > 0.0 && std::isfinite(m.radius))) {
        throw ParameterError("radius must be positive");
    }
}

/// c(d,α) = α 2^{α-1} Γ((d+α)/2) / (π^{d/2} Γ(1-α/2)).
inline double stable_constant(double alpha, int dimension) {
    const double d = dimension;
    return alpha * std::pow(2.0, alpha - 1.0) * std::tgamma((d + alpha) / 2.0) /
           (std::pow(std::numbers::pi, d / 2.0) * std::tgamma(1.0 - alpha / 2.0));
}

namespace detail {

/// Surface measure of the sphere of radius r in R^d divided by r^{d-1}.
inline double sphere_factor(int dimension) { return dimension == 1 ? 2.0 : 2.0 * std::numbers::pi; }

inline void require_jump_density(const LevyModel& m) {
    if (!m.pure_jump()) {
        throw UnsupportedModelError("the Brownian reference has no jump density (not a pure jump process)");
    }
}

/// ν(r) without argument checks.
inline double density_unchecked(const LevyModel& m, double r) {
    const double base = m.scale * stable_constant(m.alpha, m.dimension) * std::pow(r, -m.dimension - m.alpha);
    switch (m.kind) {
        case ModelKind::TemperedStable: return base * std::exp(-m.theta * r);
        case ModelKind::TruncatedStable: return r < m.radius ? base : 0.0;
        default: return base;
    }
}

/// ν(r) times the radial surface factor, so that ∫_a^b radial_weight dr = ν({a < |x| < b}).
inline double radial_weight(const LevyModel& m, double r) {
    return density_unchecked(m, r) * sphere_factor(m.dimension) * std::pow(r, m.dimension - 1);
}

/// radial_weight(r) · r^p evaluated without forming r^{-1-α} separately.
inline double radial_weight_power(const LevyModel& m, double r, double p) {
    const double base = m.scale * stable_constant(m.alpha, m.dimension) * sphere_factor(m.dimension) *
                        std::pow(r, p - 1.0 - m.alpha);
    switch (m.kind) {
        case ModelKind::TemperedStable: return base * std::exp(-m.theta * r);
        case ModelKind::TruncatedStable: return r < m.radius ? base : 0.0;
        default: return base;
    }
}

inline double one_minus_j0(double x) {
    if (std::abs(x) < 1e-2) {
        const double q = x * x / 4.0;
        return q * (1.0 - q / 4.0 * (1.0 - q / 9.0));
    }
    return 1.0 - boost::math::cyl_bessel_j(0, x);
}

}  // namespace detail

/// Radial Lévy density ν(r), r > 0.
inline double levy_density(const LevyModel& m, double r) {
    detail::require_jump_density(m);
    if (!(r > 0.0)) throw DomainError("levy_density requires r > 0");
    return detail::density_unchecked(m, r);
}

/// Tail mass ν({|x| > ε}); this is the jump rate of the ε-truncated compound Poisson process.
inline double tail_mass(const LevyModel& m, double eps) {
    detail::require_jump_density(m);
    if (!(eps > 0.0)) throw DomainError("tail mass requires eps > 0");
    const double k = m.scale * stable_constant(m.alpha, m.dimension) * detail::sphere_factor(m.dimension);
    switch (m.kind) {
        case ModelKind::AlphaStable: return k * std::pow(eps, -m.alpha) / m.alpha;
        case ModelKind::TruncatedStable:
            return eps >= m.radius ? 0.0 : k * (std::pow(eps, -m.alpha) - std::pow(m.radius, -m.alpha)) / m.alpha;
        case ModelKind::TemperedStable: {
            // r = ε e^u
            const auto f = [&](double u) {
                return std::exp(-m.alpha * u - m.theta * eps * std::exp(u));
            };
            return k * std::pow(eps, -m.alpha) * quad::half_line(f);
        }
        default: break;
    }
    return 0.0;
}

/// ν({a < |x| < b}) for 0 < a < b.
inline double shell_mass(const LevyModel& m, double a, double b) {
    detail::require_jump_density(m);
    if (!(a > 0.0)) throw DomainError("shell mass requires a > 0");
    if (!(b > a)) return 0.0;
    if (m.kind == ModelKind::TruncatedStable) b = std::min(b, m.radius);
    if (!(b > a)) return 0.0;
    if (b < 4.0 * a) {
        return quad::gauss_legendre<30>([&](double r) { return detail::radial_weight(m, r); }, a, b);
    }
    return tail_mass(m, a) - tail_mass(m, b);
}

/// One-sided radial moment ∫_0^ρ r^p ν(r) dr for p > α (no surface factor).
inline double head_moment(const LevyModel& m, double rho, double power) {
    detail::require_jump_density(m);
    if (!(rho > 0.0)) throw DomainError("head moment requires rho > 0");
    const double expo = power - m.dimension - m.alpha;  // ν r^p ~ r^expo
    if (!(expo > -1.0)) throw DomainError("head moment diverges for this power");
    const double c = m.scale * stable_constant(m.alpha, m.dimension);
    switch (m.kind) {
        case ModelKind::AlphaStable: return c * std::pow(rho, expo + 1.0) / (expo + 1.0);
        case ModelKind::TruncatedStable: {
            const double top = std::min(rho, m.radius);
            return c * std::pow(top, expo + 1.0) / (expo + 1.0);
        }
        case ModelKind::TemperedStable: {
            // r = ρ e^{-u}
            const auto f = [&](double u) {
                return std::exp(-(expo + 1.0) * u - m.theta * rho * std::exp(-u));
            };
            return c * std::pow(rho, expo + 1.0) * quad::half_line(f);
        }
        default: break;
    }
    return 0.0;
}

namespace detail {

/// Zeros of the kernel K(ρ r) beyond `start`: cos in d = 1, J0 in d = 2.
inline std::vector<double> kernel_zeros(int dimension, double rho, double start, std::size_t count) {
    std::vector<double> zeros;
    zeros.reserve(count);
    if (dimension == 1) {
        double k = std::ceil(start * rho / std::numbers::pi - 0.5);
        for (; zeros.size() < count; k += 1.0) {
            const double z = (k + 0.5) * std::numbers::pi / rho;
            if (z > start * (1.0 + 1e-14)) zeros.push_back(z);
        }
    } else {
        // McMahon estimate of the index, then exact zeros.
        int k = std::max(1, static_cast<int>(std::floor(start * rho / std::numbers::pi + 0.25)) - 1);
        while (zeros.size() < count) {
            const double z = boost::math::cyl_bessel_j_zero(0.0, k) / rho;
            if (z > start * (1.0 + 1e-14)) zeros.push_back(z);
            ++k;
        }
    }
    return zeros;
}

inline double kernel(int dimension, double x) {
    return dimension == 1 ? std::cos(x) : boost::math::cyl_bessel_j(0, x);
}

/// ∫_start^stop K(ρ r) w(r) dr with stop = ∞ allowed, for a smooth slowly varying weight w.
template <class W>
double oscillatory_integral(int dimension, double rho, double start, double stop, const W& w) {
    constexpr std::size_t panels = 40;
    const auto zeros = kernel_zeros(dimension, rho, start, panels + 1);
    const auto piece = [&](double a, double b) {
        return quad::gauss_legendre<20>([&](double r) { return kernel(dimension, rho * r) * w(r); }, a, b);
    };
    double head = 0.0;
    double lo = start;
    std::vector<double> terms;
    terms.reserve(panels);
    for (double z : zeros) {
        if (z >= stop) {
            double acc = head + piece(lo, stop);
            for (double t : terms) acc += t;
            return acc;
        }
        if (lo == start) {
            head = piece(lo, z);
        } else {
            terms.push_back(piece(lo, z));
        }
        lo = z;
    }
    if (std::isfinite(stop)) {
        // Remaining finite range: integrate it panel by panel without acceleration.
        double acc = head;
        for (double t : terms) acc += t;
        const double width = zeros.back() - zeros[zeros.size() - 2];
        while (lo < stop) {
            const double hi = std::min(stop, lo + width);
            acc += piece(lo, hi);
            lo = hi;
        }
        return acc;
    }
    return head + quad::accelerated_sum(terms);
}

}  // namespace detail

/// ψ(ξ) = ∫ (1 - cos⟨ξ,x⟩) ν(dx) evaluated by quadrature, for |ξ| = rho.
inline double char_exponent_quadrature(const LevyModel& m, double rho) {
    detail::require_jump_density(m);
    rho = std::abs(rho);
    if (rho == 0.0) return 0.0;
    const int d = m.dimension;
    const double b = d == 1 ? std::numbers::pi / (2.0 * rho) : boost::math::cyl_bessel_j_zero(0.0, 1) / rho;
    const double top = m.kind == ModelKind::TruncatedStable ? std::min(b, m.radius) : b;
    const auto head_integrand = [&](double r) {
        if (!(r > 0.0)) return 0.0;
        const double x = rho * r;
        // (1 - K(x)) / x², kept finite as r → 0 where ν itself overflows.
        double ratio = 0.0;
        if (d == 1) {
            const double s = x < 1e-8 ? 1.0 : std::sin(x / 2.0) / (x / 2.0);
            ratio = 0.5 * s * s;
        } else {
            const double q = x * x / 4.0;
            ratio = x < 1e-2 ? 0.25 * (1.0 - q / 4.0 * (1.0 - q / 9.0)) : detail::one_minus_j0(x) / (x * x);
        }
        return ratio * rho * rho * detail::radial_weight_power(m, r, 2.0);
    };
    const double head = quad::endpoint_singular(head_integrand, 0.0, top, 1e-14);
    if (m.kind == ModelKind::TruncatedStable && m.radius <= b) return head;

    const auto weight = [&](double r) { return detail::radial_weight(m, r); };
    double tail = 0.0;
    if (m.kind == ModelKind::TruncatedStable) {
        const LevyModel ext = LevyModel::alpha_stable(m.alpha, d, m.scale);
        const auto ext_weight = [&](double r) { return detail::radial_weight(ext, r); };
        const double span = m.radius - b;
        if (span * rho < 60.0 * std::numbers::pi) {
            tail = detail::oscillatory_integral(d, rho, b, m.radius, weight);
        } else {
            tail = detail::oscillatory_integral(d, rho, b, INFINITY, ext_weight) -
                   detail::oscillatory_integral(d, rho, m.radius, INFINITY, ext_weight);
        }
        return head + shell_mass(m, b, m.radius) - tail;
    }
    tail = detail::oscillatory_integral(d, rho, b, INFINITY, weight);
    return head + tail_mass(m, b) - tail;
}

/// Characteristic exponent ψ(|ξ|). Closed form for the stable kind and the Brownian
/// reference; quadrature otherwise.
inline double char_exponent(const LevyModel& m, double rho) {
    rho = std::abs(rho);
    if (rho == 0.0) return 0.0;
    switch (m.kind) {
        case ModelKind::AlphaStable: return m.scale * std::pow(rho, m.alpha);
        case ModelKind::BrownianReference: return m.scale * rho * rho;
        default: return char_exponent_quadrature(m, rho);
    }
}

/// Vector argument: ψ depends on |ξ| only.
template <std::size_t D>
double char_exponent(const LevyModel& m, const std::array<double, D>& xi) {
    double s = 0.0;
    for (double v : xi) s += v * v;
    return char_exponent(m, std::sqrt(s));
}

/// Outcome of the growth test lim ψ(ξ)/log|ξ| = ∞ sampled on |ξ| = 2^4 ... 2^20.
struct LogGrowthReport {
    bool satisfied = false;
    double threshold = 0.0;
    std::vector<double> frequencies;
    std::vector<double> ratios;
    std::string diagnostic;
};

inline constexpr double default_log_growth_threshold = 8.0;

/// Growth test for an arbitrary exponent ψ given as a callable of |ξ|.
inline LogGrowthReport check_log_growth(const std::function<double(double)>& psi,
                                        double threshold = default_log_growth_threshold) {
    LogGrowthReport report;
    report.threshold = threshold;
    bool increasing = true;
    for (int k = 4; k <= 20; ++k) {
        const double xi = std::ldexp(1.0, k);
        const double ratio = psi(xi) / std::log(xi);
        if (!report.ratios.empty() && !(ratio > report.ratios.back())) increasing = false;
        report.frequencies.push_back(xi);
        report.ratios.push_back(ratio);
    }
    const double last = report.ratios.back();
    report.satisfied = increasing && last > threshold;
    if (!increasing) {
        report.diagnostic = "psi(xi)/log|xi| is not increasing along the sampled frequencies";
    } else if (!(last > threshold)) {
        report.diagnostic = "psi(xi)/log|xi| stays below the threshold " + std::to_string(threshold);
    } else {
        report.diagnostic = "ok";
    }
    return report;
}

inline LogGrowthReport check_log_growth(const LevyModel& m, double threshold = default_log_growth_threshold) {
    return check_log_growth([&](double xi) { return char_exponent(m, xi); }, threshold);
}

/// Standing hypotheses for a model (pure jump, infinite and integrable unimodal Lévy measure).
struct HypothesisReport {
    bool pure_jump = false;
    bool unimodal = false;
    bool integrable = false;
    bool infinite_measure = false;
    std::vector<std::string> violations;
    [[nodiscard]] bool ok() const { return violations.empty(); }
};

inline HypothesisReport check_hypotheses(const LevyModel& m) {
    validate(m);
    HypothesisReport rep;
    rep.pure_jump = m.pure_jump();
    if (!rep.pure_jump) {
        rep.violations.emplace_back("pure jump: the Brownian reference has a Gaussian component");
        return rep;
    }
    // Unimodality on a geometric grid.
    rep.unimodal = true;
    double prev = INFINITY;
    for (double r = 1e-6; r < 1e4; r *= 1.05) {
        const double v = levy_density(m, r);
        if (!(std::isfinite(v) && v >= 0.0 && v <= prev)) rep.unimodal = false;
        prev = v;
    }
    if (!rep.unimodal) rep.violations.emplace_back("unimodal: nu is not finite, positive and nonincreasing");

    // ∫ min(|x|², 1) ν(dx) by quadrature.
    const double inner = detail::sphere_factor(m.dimension) * head_moment(m, 1.0, m.dimension + 1.0);
    const double outer = tail_mass(m, 1.0);
    rep.integrable = std::isfinite(inner) && std::isfinite(outer);
    if (!rep.integrable) rep.violations.emplace_back("integrability: int min(|x|^2,1) nu(dx) is not finite");

    // Divergence of ν({ε < |x| < 1}) as ε → 0.
    double last = 0.0;
    bool growing = true;
    for (double eps = 1e-1; eps >= 1e-8; eps /= 10.0) {
        const double mass = shell_mass(m, eps, 1.0);
        if (!(mass > 1.5 * last)) growing = false;
        last = mass;
    }
    rep.infinite_measure = growing;
    if (!growing) rep.violations.emplace_back("infinite measure: truncated mass does not diverge");
    return rep;
}

/// Free transition density p_t by Fourier inversion of exp(-t ψ), precomputed for |x| ≤ r_max.
class TransitionDensity {
public:
    TransitionDensity(const LevyModel& m, double t, double r_max) : model_(m), t_(t) {
        validate(m);
        if (!(t > 0.0)) throw DomainError("transition density requires t > 0");
        if (m.kind == ModelKind::BrownianReference) return;
        if (!check_log_growth(m).satisfied) {
            throw UnsupportedModelError("psi fails the log-growth condition; p_t is not guaranteed bounded");
        }
        double cutoff = 1.0;
        while (t * char_exponent(m, cutoff) < 40.0 + std::log1p(cutoff)) cutoff *= 2.0;
        double width = cutoff / 256.0;
        if (r_max > 0.0) width = std::min(width, 2.0 * std::numbers::pi / r_max);
        const auto gl = [&](double a, double b) {
            const auto& rule = boost::math::quadrature::gauss<double, 20>::abscissa();
            const auto& wts = boost::math::quadrature::gauss<double, 20>::weights();
            const double mid = 0.5 * (a + b);
            const double half = 0.5 * (b - a);
            for (std::size_t i = 0; i < rule.size(); ++i) {
                for (int s : {-1, 1}) {
                    if (i == 0 && s == 1 && rule[0] == 0.0) continue;
                    const double xi = mid + s * half * rule[i];
                    nodes_.push_back(xi);
                    weights_.push_back(half * wts[i]);
                }
            }
        };
        // Graded first panel: the integrand has a cusp |ξ|^α at the origin.
        double hi = width;
        for (int k = 0; k < 40; ++k) {
            gl(hi / 2.0, hi);
            hi /= 2.0;
        }
        gl(0.0, hi);
        for (double a = width; a < cutoff; a += width) gl(a, std::min(cutoff, a + width));
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            const double xi = nodes_[i];
            double w = weights_[i] * std::exp(-t * char_exponent(m, xi));
            if (m.dimension == 1) {
                w /= std::numbers::pi;
            } else {
                w *= xi / (2.0 * std::numbers::pi);
            }
            weights_[i] = w;
        }
    }

    /// p_t at distance r = |x| from the origin.
    [[nodiscard]] double operator()(double r) const {
        r = std::abs(r);
        const int d = model_.dimension;
        if (model_.kind == ModelKind::BrownianReference) {
            const double var = 2.0 * model_.scale * t_;
            return std::exp(-r * r / (2.0 * var)) / std::pow(2.0 * std::numbers::pi * var, d / 2.0);
        }
        double s = 0.0;
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            s += weights_[i] * (r == 0.0 ? 1.0 : detail::kernel(d, nodes_[i] * r));
        }
        return std::max(s, 0.0);
    }

    [[nodiscard]] double time() const { return t_; }
    [[nodiscard]] const LevyModel& model() const { return model_; }

private:
    LevyModel model_;
    double t_;
    std::vector<double> nodes_;
    std::vector<double> weights_;
};

/// p_t(x) for a point at distance |x| from the origin.
inline double transition_density(const LevyModel& m, double t, double r) {
    return TransitionDensity(m, t, std::abs(r))(r);
}

template <std::size_t D>
double transition_density(const LevyModel& m, double t, const std::array<double, D>& x) {
    if (static_cast<int>(D) != m.dimension) throw ParameterError("point dimension does not match the model");
    double s = 0.0;
    for (double v : x) s += v * v;
    return transition_density(m, t, std::sqrt(s));
}

inline void to_json(nlohmann::json& j, const LevyModel& m) {
    j = nlohmann::json{{"kind", to_string(m.kind)}, {"alpha", m.alpha}, {"theta", m.theta},
                       {"radius", m.radius},        {"dimension", m.dimension}, {"scale", m.scale}};
}

inline void from_json(const nlohmann::json& j, LevyModel& m) {
    if (!j.is_object()) throw ValidationError("model: expected an object");
    m = LevyModel{};
    m.kind = model_kind_from_string(j.at("kind").get<std::string>());
    if (m.kind == ModelKind::BrownianReference) m.alpha = 2.0;
    if (j.contains("alpha")) m.alpha = j.at("alpha").get<double>();
    if (j.contains("theta")) m.theta = j.at("theta").get<double>();
    if (j.contains("radius")) m.radius = j.at("radius").get<double>();
    if (j.contains("dimension")) m.dimension = j.at("dimension").get<int>();
    if (j.contains("scale")) m.scale = j.at("scale").get<double>();
}

}  // namespace levylab
