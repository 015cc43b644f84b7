#pragma once

#include "levylab/domain.hpp"
#include "levylab/errors.hpp"
#include "levylab/levy_model.hpp"
#include "levylab/quadrature.hpp"
#include "levylab/rng.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <ostream>
#include <thread>
#include <vector>

namespace levylab {

/// Jump rate λ(ε) = ν({|x| > ε}) of the ε-truncated compound Poisson approximation.
inline double compound_poisson_rate(const LevyModel& m, double eps) {
    if (!(eps > 0.0)) throw DomainError("compound_poisson_rate requires eps > 0");
    return tail_mass(m, eps);
}

/// Inverse-CDF sampler for the jump magnitude of the ε-truncated process.
///
/// The tail fraction q(r) = λ(r)/λ(ε) is tabulated on a geometric grid in r, built by
/// accumulating cell masses from the far end. A guide
/// table on the uniform variate gives O(1) expected lookup; within a cell r is
/// interpolated linearly in q. Beyond the last node the stable power law is used.
/// For u ≥ 1/64 the inverse is also tabulated directly on a uniform u-grid.
class JumpSampler {
public:
    JumpSampler(const LevyModel& m, double eps) : model_(m), eps_(eps) {
        validate(m);
        if (!m.pure_jump()) throw UnsupportedModelError("jump sampling requires a pure jump model");
        rate_ = compound_poisson_rate(m, eps);
        if (!(rate_ > 0.0)) throw DomainError("no jumps larger than eps: the truncated jump rate is zero");

        constexpr double target_ratio = 1.002;
        std::size_t cells = 0;
        double log_ratio = std::log(target_ratio);
        if (m.kind == ModelKind::TruncatedStable) {
            const double span = std::log(m.radius / eps);
            cells = static_cast<std::size_t>(std::ceil(span / log_ratio));
            log_ratio = span / static_cast<double>(cells);
        } else {
            cells = static_cast<std::size_t>(std::ceil(17.0 * std::numbers::ln10 / (m.alpha * log_ratio)));
        }
        r_.resize(cells + 1);
        for (std::size_t k = 0; k <= cells; ++k) r_[k] = eps * std::exp(log_ratio * static_cast<double>(k));
        if (m.kind == ModelKind::TruncatedStable) r_.back() = m.radius;

        std::vector<double> tail(cells + 1, 0.0);
        tail[cells] = m.kind == ModelKind::TruncatedStable ? 0.0 : tail_mass(m, r_.back());
        for (std::size_t k = cells; k-- > 0;) {
            const double cell = quad::gauss_legendre<8>([&](double r) { return detail::radial_weight(m, r); },
                                                        r_[k], r_[k + 1]);
            tail[k] = tail[k + 1] + cell;
        }
        q_.resize(cells + 1);
        for (std::size_t k = 0; k <= cells; ++k) q_[k] = tail[k] / tail[0];
        q_[0] = 1.0;

        // guide_[g] = first cell k whose lower tail fraction q_{k+1} is below (g+1)/G.
        guide_.resize(guide_size + 1);
        std::size_t k = 0;
        for (std::size_t g = guide_size; g-- > 0;) {
            const double upper = static_cast<double>(g + 1) / guide_size;
            while (k + 1 < r_.size() && q_[k + 1] >= upper) ++k;
            guide_[g] = static_cast<std::uint32_t>(k);
        }
        guide_[guide_size] = 0;

        // Direct inverse table on a uniform grid in u for the bulk u ≥ 1/64, where r(u) is smooth.
        bulk_.resize(bulk_size + 1);
        for (std::size_t g = bulk_size / 64; g <= bulk_size; ++g) {
            bulk_[g] = g == bulk_size ? eps : search(static_cast<double>(g) / bulk_size);
        }
    }

    [[nodiscard]] double rate() const { return rate_; }
    [[nodiscard]] double eps() const { return eps_; }
    [[nodiscard]] const LevyModel& model() const { return model_; }

    /// Magnitude for the uniform variate u ∈ (0, 1).
    [[nodiscard]] double magnitude_from_uniform(double u) const {
        const double pos = u * bulk_size;
        const auto cell = static_cast<std::size_t>(pos);
        if (cell >= bulk_size / 64 && cell < bulk_size) {
            const double w = pos - static_cast<double>(cell);
            return bulk_[cell] + w * (bulk_[cell + 1] - bulk_[cell]);
        }
        return search(u);
    }

    /// Magnitude from 64 random bits (the top 53 bits form the uniform variate).
    [[nodiscard]] double magnitude(std::uint64_t bits) const { return magnitude_from_uniform(PathRng::to_unit(bits)); }

    /// Tabulated tail fraction q(r) = P(|jump| > r).
    [[nodiscard]] double tail_fraction(double r) const {
        if (r <= eps_) return 1.0;
        if (r >= r_.back()) {
            if (q_.back() <= 0.0) return 0.0;
            return q_.back() * std::pow(r / r_.back(), -model_.alpha);
        }
        const auto it = std::upper_bound(r_.begin(), r_.end(), r);
        const std::size_t k = static_cast<std::size_t>(it - r_.begin()) - 1;
        const double w = (r - r_[k]) / (r_[k + 1] - r_[k]);
        return q_[k] + w * (q_[k + 1] - q_[k]);
    }

private:
    /// Inversion on the geometric r-table.
    [[nodiscard]] double search(double u) const {
        const std::size_t g = std::min<std::size_t>(static_cast<std::size_t>(u * guide_size), guide_size - 1);
        const std::size_t last = r_.size() - 1;
        if (u <= q_[last]) {
            if (q_[last] <= 0.0) return r_[last];
            return r_[last] * std::pow(u / q_[last], -1.0 / model_.alpha);
        }
        // Cells with index in [guide_[g], hi] bracket u.
        std::size_t lo = guide_[g];
        std::size_t hi = g == 0 ? last - 1 : std::min<std::size_t>(last - 1, guide_[g - 1]);
        // Find the first k ≥ lo with q_{k+1} < u.
        while (lo < hi) {
            const std::size_t mid = lo + (hi - lo) / 2;
            if (q_[mid + 1] < u) {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        const double qa = q_[lo];
        const double qb = q_[lo + 1];
        const double w = qa > qb ? (qa - u) / (qa - qb) : 0.0;
        return r_[lo] + w * (r_[lo + 1] - r_[lo]);
    }

    static constexpr std::size_t guide_size = 1 << 16;
    static constexpr std::size_t bulk_size = 1 << 16;
    LevyModel model_;
    double eps_;
    double rate_ = 0.0;
    std::vector<double> r_;
    std::vector<double> q_;
    std::vector<std::uint32_t> guide_;
    std::vector<double> bulk_;
};

/// One jump of the ε-truncated process: magnitude from the table, direction uniform.
inline Point sample_jump(const JumpSampler& sampler, PathRng& rng) {
    const std::uint64_t bits = rng.bits();
    const double r = sampler.magnitude(bits);
    if (sampler.model().dimension == 1) return {(bits & 1U) ? r : -r, 0.0};
    const double phi = 2.0 * std::numbers::pi * rng.uniform();
    return {r * std::cos(phi), r * std::sin(phi)};
}

/// Point estimate of a survival probability with its binomial standard error.
struct SurvivalEstimate {
    Point point{0.0, 0.0};
    double t = 0.0;
    double value = 0.0;
    double se = 0.0;
    std::uint64_t paths = 0;
    double eps = 0.0;
    std::uint64_t seed = 0;
};

inline void to_json(nlohmann::json& j, const SurvivalEstimate& e) {
    j = nlohmann::json{{"x", e.point}, {"t", e.t},     {"value", e.value}, {"se", e.se},
                       {"n", e.paths}, {"eps", e.eps}, {"seed", e.seed}};
}

/// How the paths of one index are shared between starting points.
enum class Coupling {
    /// Every point uses the same jump sequence.
    Shared,
    /// Points with negative first coordinate use the jump sequence reflected in x₁;
    /// mirror-image points in a symmetric domain then have identical indicators.
    Mirrored,
};

inline std::string to_string(Coupling c) { return c == Coupling::Shared ? "shared" : "mirrored"; }

inline Coupling coupling_from_string(const std::string& s) {
    if (s == "shared") return Coupling::Shared;
    if (s == "mirrored") return Coupling::Mirrored;
    throw ValidationError("mc.coupling: unknown coupling '" + s + "'");
}

struct McOptions {
    Coupling coupling = Coupling::Mirrored;
    unsigned jobs = 1;
    std::size_t block = 2048;
};

namespace detail {

inline constexpr std::uint64_t survival_salt = 0x5355525649564131ULL;
inline constexpr std::uint64_t exit_salt = 0x45584954304c4157ULL;

/// Runs `work(begin, end, worker)` over fixed blocks of path indices.
template <class Work>
void for_each_block(std::uint64_t n, std::size_t block, unsigned jobs, Work&& work) {
    const std::uint64_t blocks = (n + block - 1) / block;
    jobs = std::max(1U, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::uint64_t>(blocks, 1))));
    std::atomic<std::uint64_t> next{0};
    const auto run = [&](unsigned worker) {
        for (std::uint64_t b = next++; b < blocks; b = next++) {
            const std::uint64_t begin = b * block;
            work(begin, std::min<std::uint64_t>(n, begin + block), worker);
        }
    };
    if (jobs == 1) {
        run(0);
        return;
    }
    std::vector<std::thread> threads;
    for (unsigned w = 0; w < jobs; ++w) threads.emplace_back(run, w);
    for (auto& t : threads) t.join();
}

}  // namespace detail

/// Integer survival and co-survival counts for a profile of starting points at several times.
class SurvivalProfile {
public:
    std::vector<Point> points;
    std::vector<double> times;
    std::uint64_t paths = 0;
    double eps = 0.0;
    std::uint64_t seed = 0;
    Coupling coupling = Coupling::Mirrored;
    /// joint[k][i * P + j] = number of paths alive at both points i and j at times[k].
    std::vector<std::vector<std::uint64_t>> joint;

    [[nodiscard]] std::size_t size() const { return points.size(); }

    [[nodiscard]] std::uint64_t count(std::size_t k, std::size_t i) const { return joint[k][i * size() + i]; }
    [[nodiscard]] std::uint64_t count(std::size_t k, std::size_t i, std::size_t j) const {
        return joint[k][i * size() + j];
    }

    [[nodiscard]] double value(std::size_t k, std::size_t i) const {
        return paths == 0 ? 0.0 : static_cast<double>(count(k, i)) / static_cast<double>(paths);
    }

    /// Covariance of the estimators at points i and j.
    [[nodiscard]] double covariance(std::size_t k, std::size_t i, std::size_t j) const {
        if (paths == 0) return 0.0;
        const double n = static_cast<double>(paths);
        const double pij = static_cast<double>(count(k, i, j)) / n;
        return (pij - value(k, i) * value(k, j)) / n;
    }

    [[nodiscard]] double se(std::size_t k, std::size_t i) const { return std::sqrt(std::max(0.0, covariance(k, i, i))); }

    /// Standard error of Σ c_i ψ(points[i]) under the coupling.
    [[nodiscard]] double contrast_se(std::size_t k, const std::vector<std::pair<std::size_t, double>>& terms) const {
        double var = 0.0;
        for (const auto& [i, ci] : terms) {
            for (const auto& [j, cj] : terms) var += ci * cj * covariance(k, i, j);
        }
        return std::sqrt(std::max(0.0, var));
    }

    [[nodiscard]] double paired_se(std::size_t k, std::size_t i, std::size_t j) const {
        return contrast_se(k, {{i, 1.0}, {j, -1.0}});
    }

    [[nodiscard]] SurvivalEstimate estimate(std::size_t k, std::size_t i) const {
        return {points[i], times[k], value(k, i), se(k, i), paths, eps, seed};
    }
};

/// Simulates n paths of the ε-truncated process and records, at every time in `times`,
/// which starting points are still inside D. All points use the jump stream of the
/// path index (common random numbers), so co-survival counts are exact integers.
inline SurvivalProfile simulate_survival_profile(const LevyModel& m, const Domain& dom, const std::vector<Point>& points,
                                                 const std::vector<double>& times, std::uint64_t n, double eps,
                                                 std::uint64_t seed, const McOptions& opt = {}) {
    validate(m);
    dom.validate();
    if (n == 0) throw ParameterError("path count n must be positive");
    if (points.empty()) throw ParameterError("profile requires at least one point");
    if (times.empty()) throw ParameterError("profile requires at least one time");
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (!(times[k] >= 0.0) || (k > 0 && !(times[k] > times[k - 1]))) {
            throw ParameterError("times must be nonnegative and strictly increasing");
        }
    }
    if (m.dimension != dom.dimension()) throw ParameterError("model and domain dimensions differ");
    const bool planar = dom.dimension() == 2;
    const double cross = points.front()[1];
    if (planar) {
        for (const auto& p : points) {
            if (p[1] != cross) throw ParameterError("profile points must share the transverse coordinate");
        }
    }

    const JumpSampler sampler(m, eps);
    const double rate = sampler.rate();
    const std::size_t count = points.size();
    const bool mirrored = opt.coupling == Coupling::Mirrored;

    // Order the points by the key that determines survival: x₁, or |x₁| when mirrored.
    std::vector<double> key(count);
    for (std::size_t i = 0; i < count; ++i) key[i] = mirrored ? std::abs(points[i][0]) : points[i][0];
    std::vector<std::size_t> order(count);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return key[x] < key[y]; });
    std::vector<double> sorted_key(count);
    for (std::size_t s = 0; s < count; ++s) sorted_key[s] = key[order[s]];
    const double key_min = sorted_key.front();
    const double key_max = sorted_key.back();
    const double a = dom.a;
    const double b = dom.b;
    const std::size_t width = count + 1;
    const std::size_t nt = times.size();

    // cells[worker][k][lo * width + hi] counts paths whose alive range is [lo, hi).
    const unsigned jobs = std::max(1U, opt.jobs);
    std::vector<std::vector<std::uint64_t>> cells(jobs, std::vector<std::uint64_t>(nt * width * width, 0));

    detail::for_each_block(n, opt.block, jobs, [&](std::uint64_t begin, std::uint64_t end, unsigned worker) {
        auto& local = cells[worker];
        for (std::uint64_t path = begin; path < end; ++path) {
            PathRng rng(stream_seed(seed, path, detail::survival_salt));
            double s1 = 0.0;
            double s2 = 0.0;
            double hi_run = 0.0;
            double lo_run = 0.0;
            bool alive2 = !planar || std::abs(cross) < b;
            bool dead = !alive2;
            double t_prev = 0.0;
            for (std::size_t k = 0; k < nt; ++k) {
                if (!dead) {
                    const std::int64_t jumps = rng.poisson(rate * (times[k] - t_prev));
                    for (std::int64_t j = 0; j < jumps; ++j) {
                        const Point step = sample_jump(sampler, rng);
                        s1 += step[0];
                        hi_run = std::max(hi_run, s1);
                        lo_run = std::min(lo_run, s1);
                        if (planar) {
                            s2 += step[1];
                            if (!(std::abs(cross + s2) < b)) alive2 = false;
                        }
                        if (!alive2 || hi_run - lo_run >= 2.0 * a || a - hi_run <= key_min || -a - lo_run >= key_max) {
                            dead = true;
                            break;
                        }
                    }
                }
                t_prev = times[k];
                if (dead) break;
                // Alive iff -a - lo_run < key < a - hi_run.
                const double lower = -a - lo_run;
                const double upper = a - hi_run;
                const auto lo = static_cast<std::size_t>(
                    std::upper_bound(sorted_key.begin(), sorted_key.end(), lower) - sorted_key.begin());
                const auto hi = static_cast<std::size_t>(
                    std::lower_bound(sorted_key.begin(), sorted_key.end(), upper) - sorted_key.begin());
                if (lo < hi) ++local[k * width * width + lo * width + hi];
            }
        }
    });

    SurvivalProfile out;
    out.points = points;
    out.times = times;
    out.paths = n;
    out.eps = eps;
    out.seed = seed;
    out.coupling = opt.coupling;
    out.joint.assign(nt, std::vector<std::uint64_t>(count * count, 0));
    for (std::size_t k = 0; k < nt; ++k) {
        // c[lo][hi] summed over workers, then J(p, q) = Σ_{lo ≤ p, hi > q} c[lo][hi] for p ≤ q.
        std::vector<std::uint64_t> c(width * width, 0);
        for (const auto& w : cells) {
            for (std::size_t e = 0; e < width * width; ++e) c[e] += w[k * width * width + e];
        }
        // suffix in hi, prefix in lo
        std::vector<std::uint64_t> acc(width * width, 0);
        for (std::size_t lo = 0; lo < width; ++lo) {
            std::uint64_t run = 0;
            for (std::size_t hi = width; hi-- > 0;) {
                run += c[lo * width + hi];
                acc[lo * width + hi] = run + (lo > 0 ? acc[(lo - 1) * width + hi] : 0);
            }
        }
        for (std::size_t p = 0; p < count; ++p) {
            for (std::size_t q = p; q < count; ++q) {
                const std::uint64_t both = acc[p * width + (q + 1)];
                const std::size_t i = order[p];
                const std::size_t j = order[q];
                out.joint[k][i * count + j] = both;
                out.joint[k][j * count + i] = both;
            }
        }
    }
    return out;
}

/// ψ_t^D at several points from one set of coupled paths.
inline std::vector<SurvivalEstimate> estimate_survival_profile(const LevyModel& m, const Domain& dom,
                                                               const std::vector<Point>& points, double t,
                                                               std::uint64_t n, double eps, std::uint64_t seed,
                                                               const McOptions& opt = {}) {
    const auto prof = simulate_survival_profile(m, dom, points, {t}, n, eps, seed, opt);
    std::vector<SurvivalEstimate> out;
    out.reserve(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) out.push_back(prof.estimate(0, i));
    return out;
}

/// ψ_t^D(x) = P^x(τ_D > t) by Monte Carlo.
inline SurvivalEstimate estimate_survival(const LevyModel& m, const Domain& dom, const Point& x, double t,
                                          std::uint64_t n, double eps, std::uint64_t seed, const McOptions& opt = {}) {
    return estimate_survival_profile(m, dom, {x}, t, n, eps, seed, opt).front();
}

/// First exit time and exit position of one path.
struct ExitSample {
    double tau = 0.0;
    Point position{0.0, 0.0};
};

/// n samples of (τ_D, X(τ_D)) for the ε-truncated process started at x. Sample i uses
/// path stream i, so the result does not depend on the number of workers.
inline std::vector<ExitSample> sample_exit_law(const LevyModel& m, const Domain& dom, const Point& x, std::uint64_t n,
                                               double eps, std::uint64_t seed, unsigned jobs = 1) {
    validate(m);
    dom.validate();
    if (n == 0) throw ParameterError("path count n must be positive");
    if (m.dimension != dom.dimension()) throw ParameterError("model and domain dimensions differ");
    if (!dom.contains(x)) throw DomainError("exit law requires a starting point inside D");
    const JumpSampler sampler(m, eps);
    const double rate = sampler.rate();
    std::vector<ExitSample> out(n);
    detail::for_each_block(n, 2048, jobs, [&](std::uint64_t begin, std::uint64_t end, unsigned) {
        for (std::uint64_t path = begin; path < end; ++path) {
            PathRng rng(stream_seed(seed, path, detail::exit_salt));
            double t = 0.0;
            Point pos = x;
            while (dom.contains(pos)) {
                t -= std::log(rng.uniform()) / rate;
                const Point step = sample_jump(sampler, rng);
                pos[0] += step[0];
                pos[1] += step[1];
            }
            out[path] = {t, pos};
        }
    });
    return out;
}

/// Empirical probability with binomial standard error.
struct Proportion {
    double value = 0.0;
    double se = 0.0;
    std::uint64_t hits = 0;
    std::uint64_t total = 0;
};

template <class Pred>
Proportion empirical_probability(const std::vector<ExitSample>& samples, Pred&& pred) {
    Proportion p;
    p.total = samples.size();
    for (const auto& s : samples) {
        if (pred(s)) ++p.hits;
    }
    if (p.total > 0) {
        const double n = static_cast<double>(p.total);
        p.value = static_cast<double>(p.hits) / n;
        p.se = std::sqrt(p.value * (1.0 - p.value) / n);
    }
    return p;
}

/// CSV with columns tau,x1[,x2].
inline void write_exit_csv(std::ostream& os, const std::vector<ExitSample>& samples, int dimension) {
    os << (dimension == 1 ? "tau,x1\n" : "tau,x1,x2\n");
    os.precision(17);
    for (const auto& s : samples) {
        os << s.tau << ',' << s.position[0];
        if (dimension == 2) os << ',' << s.position[1];
        os << '\n';
    }
}

}  // namespace levylab
