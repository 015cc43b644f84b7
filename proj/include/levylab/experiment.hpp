#pragma once

#include "levylab/difference.hpp"
#include "levylab/domain.hpp"
#include "levylab/eigenpair.hpp"
#include "levylab/errors.hpp"
#include "levylab/generator.hpp"
#include "levylab/grid.hpp"
#include "levylab/harness.hpp"
#include "levylab/io.hpp"
#include "levylab/killed.hpp"
#include "levylab/levy_model.hpp"
#include "levylab/path_sim.hpp"
#include "levylab/rng.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iomanip>
#include <numbers>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace levylab {

inline constexpr int schema_version = 1;

struct McSettings {
    std::uint64_t n = 1000000;
    double eps = 1e-3;
    Coupling coupling = Coupling::Mirrored;
    bool operator==(const McSettings&) const = default;
};

struct PdeSettings {
    /// Nodes of the one-dimensional grid, or nodes per axis in two dimensions.
    std::size_t nodes = 512;
    bool operator==(const PdeSettings&) const = default;
};

/// Point layout of a survival profile along e₁.
struct ProfileSettings {
    /// Points for the monotonicity check: `monotone_points` equally spaced on [-extent, extent].
    std::size_t monotone_points = 33;
    double monotone_extent = 0.96;
    /// Equally spaced points forming `concave_triples` consecutive triples centred at 0.
    std::size_t concave_triples = 17;
    double concave_spacing = 0.05;
    /// Transverse offsets x̃ = offset·e₂ (two-dimensional profiles only).
    std::vector<double> offsets{0.0};
    /// Points where the two-dimensional grid solution is compared with the Monte Carlo estimate.
    std::vector<Point> spots;
    bool operator==(const ProfileSettings&) const = default;
};

/// Tolerances used by the checks.
struct Tolerances {
    double sigma = 3.0;
    double pde_profile = 1e-10;
    double sign = 1e-12;
    double identity = 1e-3;
    double identity_ratio = 0.6;
    double eigen_shape = 1e-10;
    double eigen_limit = 1e-3;
    double brownian_lambda = 1e-3;
    double brownian_phi = 1e-3;
    /// Allowance for the bias of the ε-truncated sampler in Monte Carlo versus grid comparisons.
    double bias_budget = 0.0;
    bool operator==(const Tolerances&) const = default;
};

/// One experiment: a task applied to a model on a domain.
struct Experiment {
    std::string name;
    /// survival | profile | sign_structure | difference_identity | exit_law | eigen
    std::string task;
    LevyModel model;
    Domain domain;
    /// mc | pde | both
    std::string backend = "both";
    std::vector<double> times;
    std::vector<Point> points;
    McSettings mc;
    PdeSettings pde;
    ProfileSettings profile;
    /// Sub-domains U = (l, r) × F.
    std::vector<std::array<double, 2>> subdomains;
    std::vector<double> s_values;
    /// (nodes, time panels) refinement levels.
    std::vector<std::array<std::size_t, 2>> levels;
    std::vector<ExitRectangle> rectangles;
    /// Seed of this experiment; 0 derives it from the configuration seed and the experiment index.
    std::uint64_t seed = 0;
    bool operator==(const Experiment&) const = default;
};

struct ExperimentConfig {
    int schema_version = levylab::schema_version;
    std::uint64_t seed = 1;
    unsigned jobs = 1;
    bool validation_mode = false;
    std::string output_dir = "levylab-out";
    Tolerances tolerances;
    std::vector<Experiment> experiments;
    bool operator==(const ExperimentConfig&) const = default;
};

inline const std::vector<std::string>& task_names() {
    static const std::vector<std::string> names{"survival",         "profile", "sign_structure",
                                                "difference_identity", "exit_law", "eigen"};
    return names;
}

// ---------------------------------------------------------------------------------------------
// Serialization

inline void to_json(nlohmann::json& j, const McSettings& s) {
    j = {{"n", s.n}, {"eps", s.eps}, {"coupling", to_string(s.coupling)}};
}
inline void to_json(nlohmann::json& j, const PdeSettings& s) { j = {{"nodes", s.nodes}}; }
inline void to_json(nlohmann::json& j, const ProfileSettings& s) {
    j = {{"monotone_points", s.monotone_points}, {"monotone_extent", s.monotone_extent},
         {"concave_triples", s.concave_triples}, {"concave_spacing", s.concave_spacing},
         {"offsets", s.offsets},                 {"spots", s.spots}};
}
inline void to_json(nlohmann::json& j, const Tolerances& t) {
    j = {{"sigma", t.sigma},
         {"pde_profile", t.pde_profile},
         {"sign", t.sign},
         {"identity", t.identity},
         {"identity_ratio", t.identity_ratio},
         {"eigen_shape", t.eigen_shape},
         {"eigen_limit", t.eigen_limit},
         {"brownian_lambda", t.brownian_lambda},
         {"brownian_phi", t.brownian_phi},
         {"bias_budget", t.bias_budget}};
}
inline void to_json(nlohmann::json& j, const ExitRectangle& r) {
    j = {{"t0", number_to_json(r.t0)}, {"t1", number_to_json(r.t1)}, {"lo", number_to_json(r.lo)},
         {"hi", number_to_json(r.hi)}};
}
inline void to_json(nlohmann::json& j, const Experiment& e) {
    j = {{"name", e.name},
         {"task", e.task},
         {"model", e.model},
         {"domain", e.domain},
         {"backend", e.backend},
         {"times", e.times},
         {"points", e.points},
         {"mc", e.mc},
         {"pde", e.pde},
         {"profile", e.profile},
         {"subdomains", e.subdomains},
         {"s_values", e.s_values},
         {"levels", e.levels},
         {"rectangles", e.rectangles},
         {"seed", e.seed}};
}
inline void to_json(nlohmann::json& j, const ExperimentConfig& c) {
    j = {{"schema_version", c.schema_version},
         {"seed", c.seed},
         {"jobs", c.jobs},
         {"validation_mode", c.validation_mode},
         {"output_dir", c.output_dir},
         {"tolerances", c.tolerances},
         {"experiments", c.experiments}};
}

namespace detail {

/// Reads fields of one JSON object, collecting errors instead of stopping at the first.
class FieldReader {
public:
    FieldReader(const nlohmann::json& j, std::string path, std::vector<std::string>& errors)
        : j_(j), path_(std::move(path)), errors_(errors) {
        if (!j_.is_object()) errors_.push_back(where("") + "expected an object");
    }

    template <class T>
    void read(const std::string& key, T& out) {
        seen_.insert(key);
        if (!j_.is_object() || !j_.contains(key)) return;
        try {
            out = j_.at(key).get<T>();
        } catch (const std::exception& e) {
            errors_.push_back(where(key) + e.what());
        }
    }

    template <class T>
    void require(const std::string& key, T& out) {
        if (j_.is_object() && !j_.contains(key)) errors_.push_back(where(key) + "required field is missing");
        read(key, out);
    }

    template <class F>
    void with(const std::string& key, F&& f) {
        seen_.insert(key);
        if (!j_.is_object() || !j_.contains(key)) return;
        f(j_.at(key), where(key));
    }

    void finish() {
        if (!j_.is_object()) return;
        for (const auto& [key, value] : j_.items()) {
            if (!seen_.count(key)) errors_.push_back(where(key) + "unknown field");
        }
    }

    [[nodiscard]] std::string where(const std::string& key) const {
        return path_ + (key.empty() ? "" : (path_.empty() ? "" : ".") + key) + ": ";
    }

private:
    const nlohmann::json& j_;
    std::string path_;
    std::vector<std::string>& errors_;
    std::set<std::string> seen_;
};

inline std::string field_name(const std::string& where) { return where.substr(0, where.size() - 2); }

inline McSettings parse_mc(const nlohmann::json& j, const std::string& path, std::vector<std::string>& errors) {
    McSettings s;
    FieldReader r(j, path, errors);
    r.read("n", s.n);
    r.read("eps", s.eps);
    r.with("coupling", [&](const nlohmann::json& v, const std::string& w) {
        try {
            s.coupling = coupling_from_string(v.get<std::string>());
        } catch (const std::exception& e) {
            errors.push_back(w + e.what());
        }
    });
    r.finish();
    return s;
}

inline PdeSettings parse_pde(const nlohmann::json& j, const std::string& path, std::vector<std::string>& errors) {
    PdeSettings s;
    FieldReader r(j, path, errors);
    r.read("nodes", s.nodes);
    r.finish();
    return s;
}

inline ProfileSettings parse_profile(const nlohmann::json& j, const std::string& path, std::vector<std::string>& errors) {
    ProfileSettings s;
    FieldReader r(j, path, errors);
    r.read("monotone_points", s.monotone_points);
    r.read("monotone_extent", s.monotone_extent);
    r.read("concave_triples", s.concave_triples);
    r.read("concave_spacing", s.concave_spacing);
    r.read("offsets", s.offsets);
    r.read("spots", s.spots);
    r.finish();
    return s;
}

inline Tolerances parse_tolerances(const nlohmann::json& j, const std::string& path, std::vector<std::string>& errors) {
    Tolerances t;
    FieldReader r(j, path, errors);
    r.read("sigma", t.sigma);
    r.read("pde_profile", t.pde_profile);
    r.read("sign", t.sign);
    r.read("identity", t.identity);
    r.read("identity_ratio", t.identity_ratio);
    r.read("eigen_shape", t.eigen_shape);
    r.read("eigen_limit", t.eigen_limit);
    r.read("brownian_lambda", t.brownian_lambda);
    r.read("brownian_phi", t.brownian_phi);
    r.read("bias_budget", t.bias_budget);
    r.finish();
    return t;
}

inline Experiment parse_experiment(const nlohmann::json& j, const std::string& path, std::vector<std::string>& errors) {
    Experiment e;
    FieldReader r(j, path, errors);
    r.require("name", e.name);
    r.require("task", e.task);
    if (j.is_object() && !j.contains("model")) errors.push_back(r.where("model") + "required field is missing");
    r.with("model", [&](const nlohmann::json& v, const std::string& w) {
        try {
            e.model = v.get<LevyModel>();
        } catch (const std::exception& ex) {
            errors.push_back(w + ex.what());
        }
    });
    if (j.is_object() && !j.contains("domain")) errors.push_back(r.where("domain") + "required field is missing");
    r.with("domain", [&](const nlohmann::json& v, const std::string& w) {
        try {
            e.domain = v.get<Domain>();
        } catch (const std::exception& ex) {
            errors.push_back(w + ex.what());
        }
    });
    r.read("backend", e.backend);
    r.read("times", e.times);
    r.read("points", e.points);
    r.with("mc", [&](const nlohmann::json& v, const std::string& w) { e.mc = parse_mc(v, field_name(w), errors); });
    r.with("pde", [&](const nlohmann::json& v, const std::string& w) { e.pde = parse_pde(v, field_name(w), errors); });
    r.with("profile",
           [&](const nlohmann::json& v, const std::string& w) { e.profile = parse_profile(v, field_name(w), errors); });
    r.read("subdomains", e.subdomains);
    r.read("s_values", e.s_values);
    r.read("levels", e.levels);
    r.with("rectangles", [&](const nlohmann::json& v, const std::string& w) {
        if (!v.is_array()) {
            errors.push_back(w + "expected an array");
            return;
        }
        for (std::size_t i = 0; i < v.size(); ++i) {
            const std::string p = field_name(w) + "[" + std::to_string(i) + "]";
            ExitRectangle rect;
            FieldReader rr(v[i], p, errors);
            const auto num = [&](const std::string& key, double& out) {
                rr.with(key, [&](const nlohmann::json& x, const std::string& wk) {
                    try {
                        out = number_from_json(x);
                    } catch (const std::exception& ex) {
                        errors.push_back(wk + ex.what());
                    }
                });
                if (v[i].is_object() && !v[i].contains(key)) errors.push_back(rr.where(key) + "required field is missing");
            };
            num("t0", rect.t0);
            num("t1", rect.t1);
            num("lo", rect.lo);
            num("hi", rect.hi);
            rr.finish();
            e.rectangles.push_back(rect);
        }
    });
    r.read("seed", e.seed);
    r.finish();
    return e;
}

inline bool safe_name(const std::string& s) {
    if (s.empty()) return false;
    return std::all_of(s.begin(), s.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-'; });
}

inline bool strictly_increasing(const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (!(v[i] > v[i - 1])) return false;
    }
    return true;
}

inline void validate_experiment(const Experiment& e, const std::string& p, bool validation_mode,
                                std::vector<std::string>& errors) {
    const auto err = [&](const std::string& field, const std::string& msg) {
        errors.push_back(p + (field.empty() ? "" : "." + field) + ": " + msg);
    };
    if (!safe_name(e.name)) err("name", "must be nonempty and use only letters, digits, '_' and '-'");
    if (std::find(task_names().begin(), task_names().end(), e.task) == task_names().end()) {
        err("task", "unknown task '" + e.task + "'");
    }
    bool model_ok = true;
    try {
        validate(e.model);
    } catch (const std::exception& ex) {
        err("model", ex.what());
        model_ok = false;
    }
    try {
        e.domain.validate();
    } catch (const std::exception& ex) {
        err("domain", ex.what());
    }
    if (model_ok && e.model.dimension != e.domain.dimension()) err("model.dimension", "does not match the domain");
    if (model_ok) {
        const auto hyp = check_hypotheses(e.model);
        if (!hyp.ok() && !validation_mode) {
            for (const auto& v : hyp.violations) {
                err("model", "hypothesis violated (" + v + "); run refused unless validation_mode is set");
            }
        }
        if (!e.model.pure_jump() && e.task != "eigen" && e.task != "survival") {
            err("model", "the Brownian reference is supported by the eigen and survival tasks only");
        }
    }
    if (e.backend != "mc" && e.backend != "pde" && e.backend != "both") err("backend", "must be mc, pde or both");
    if (e.mc.n == 0) err("mc.n", "must be positive");
    if (!(e.mc.eps > 0.0)) err("mc.eps", "must be positive");
    if (e.pde.nodes < 4 || e.pde.nodes % 2 != 0) err("pde.nodes", "must be an even number of at least 4");
    for (double t : e.times) {
        if (!(t >= 0.0) || !std::isfinite(t)) err("times", "must be finite and nonnegative");
    }
    if (!strictly_increasing(e.times)) err("times", "must be strictly increasing");
    const bool planar = e.domain.dimension() == 2;
    const double a = e.domain.a;
    if (planar && e.task != "survival" && e.task != "profile") err("task", "is implemented for intervals only");
    if (planar && e.pde.nodes % 2 == 0 && std::abs(e.domain.a - e.domain.b) > 1e-12 && e.backend != "mc") {
        // square cells need node counts proportional to the half-widths
        const double ratio = e.domain.b / e.domain.a * static_cast<double>(e.pde.nodes);
        if (std::abs(ratio - std::round(ratio)) > 1e-9) err("pde.nodes", "box grid cannot have square cells");
    }
    if (e.task == "survival") {
        if (e.times.empty()) err("times", "at least one time is required");
        if (e.points.empty()) err("points", "at least one point is required");
    }
    if (e.task == "profile") {
        if (e.times.empty()) err("times", "at least one time is required");
        const auto& s = e.profile;
        if (s.monotone_points < 2) err("profile.monotone_points", "must be at least 2");
        if (!(s.monotone_extent > 0.0 && s.monotone_extent < a)) err("profile.monotone_extent", "must lie in (0, a)");
        if (s.concave_triples < 1) err("profile.concave_triples", "must be at least 1");
        const double half = 0.5 * static_cast<double>(s.concave_triples + 1) * s.concave_spacing;
        if (!(s.concave_spacing > 0.0) || !(half < 0.5 * a)) {
            err("profile.concave_spacing", "triples must fit inside (-a/2, a/2)");
        }
        if (planar) {
            if (s.offsets.empty()) err("profile.offsets", "at least one offset is required");
            for (double o : s.offsets) {
                if (!(std::abs(o) < e.domain.b)) err("profile.offsets", "offsets must lie inside (-b, b)");
            }
            for (const auto& q : s.spots) {
                if (std::find(s.offsets.begin(), s.offsets.end(), q[1]) == s.offsets.end()) {
                    err("profile.spots", "spot points must lie on one of the offset lines");
                }
            }
        }
    }
    if (e.task == "sign_structure" || e.task == "difference_identity") {
        if (e.subdomains.empty()) err("subdomains", "at least one sub-domain is required");
        for (const auto& u : e.subdomains) {
            if (!(u[0] >= -a && u[0] < u[1] && u[1] <= a)) {
                err("subdomains", "sub-domains must satisfy -a <= l < r <= a");
                continue;
            }
            for (std::size_t n : {e.pde.nodes}) {
                try {
                    node_range(Grid1D(a, n), SubDomain(e.domain, u[0], u[1]));
                } catch (const std::exception& ex) {
                    err("subdomains", ex.what());
                }
            }
        }
    }
    if (e.task == "sign_structure") {
        if (e.s_values.empty()) err("s_values", "at least one s is required");
        for (double s : e.s_values) {
            if (!(s > 0.0)) err("s_values", "must be positive");
        }
    }
    if (e.task == "difference_identity") {
        if (e.times.empty() || !(e.times.front() > 0.0)) err("times", "a positive time is required");
        if (e.points.empty()) err("points", "the starting point is required");
        if (e.levels.empty()) err("levels", "at least one refinement level is required");
        for (const auto& l : e.levels) {
            if (l[0] < 4 || l[1] == 0) err("levels", "levels need at least 4 nodes and one time panel");
        }
    }
    if (e.task == "exit_law") {
        if (e.points.empty() || !e.domain.contains(e.points.front())) err("points", "a starting point inside D is required");
        if (e.rectangles.empty()) err("rectangles", "at least one rectangle is required");
        for (const auto& r : e.rectangles) {
            if (!(r.t0 >= 0.0 && r.t1 > r.t0 && r.hi > r.lo)) err("rectangles", "need 0 <= t0 < t1 and lo < hi");
        }
    }
}

}  // namespace detail

namespace detail {

inline void collect_config_errors(const ExperimentConfig& c, std::vector<std::string>& errors) {
    if (c.schema_version != schema_version) {
        errors.push_back("schema_version: unsupported version " + std::to_string(c.schema_version));
    }
    if (c.jobs == 0) errors.push_back("jobs: must be at least 1");
    if (c.output_dir.empty()) errors.push_back("output_dir: must not be empty");
    if (!(c.tolerances.sigma > 0.0)) errors.push_back("tolerances.sigma: must be positive");
    if (!(c.tolerances.bias_budget >= 0.0)) errors.push_back("tolerances.bias_budget: must be nonnegative");
    if (c.experiments.empty()) errors.push_back("experiments: at least one experiment is required");
    std::set<std::string> names;
    for (std::size_t i = 0; i < c.experiments.size(); ++i) {
        const auto& e = c.experiments[i];
        const std::string p = "experiments[" + std::to_string(i) + "]";
        if (!names.insert(e.name).second) errors.push_back(p + ".name: duplicate experiment name '" + e.name + "'");
        detail::validate_experiment(e, p, c.validation_mode, errors);
    }
}

inline void throw_if_errors(const std::vector<std::string>& errors) {
    if (errors.empty()) return;
    std::string msg = "invalid configuration:";
    for (const auto& e : errors) msg += "\n  " + e;
    throw ValidationError(msg);
}

}  // namespace detail

/// Semantic validation; throws ValidationError listing every problem.
inline void validate(const ExperimentConfig& c) {
    std::vector<std::string> errors;
    detail::collect_config_errors(c, errors);
    detail::throw_if_errors(errors);
}

/// Parses a configuration, reporting every offending field at once.
inline ExperimentConfig parse_config(const nlohmann::json& j) {
    std::vector<std::string> errors;
    ExperimentConfig c;
    detail::FieldReader r(j, "", errors);
    r.require("schema_version", c.schema_version);
    r.read("seed", c.seed);
    r.read("jobs", c.jobs);
    r.read("validation_mode", c.validation_mode);
    r.read("output_dir", c.output_dir);
    r.with("tolerances", [&](const nlohmann::json& v, const std::string& w) {
        c.tolerances = detail::parse_tolerances(v, detail::field_name(w), errors);
    });
    r.with("experiments", [&](const nlohmann::json& v, const std::string& w) {
        if (!v.is_array()) {
            errors.push_back(w + "expected an array");
            return;
        }
        for (std::size_t i = 0; i < v.size(); ++i) {
            c.experiments.push_back(detail::parse_experiment(v[i], "experiments[" + std::to_string(i) + "]", errors));
        }
    });
    r.finish();
    detail::collect_config_errors(c, errors);
    detail::throw_if_errors(errors);
    return c;
}

inline void from_json(const nlohmann::json& j, ExperimentConfig& c) { c = parse_config(j); }

inline ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw ValidationError("cannot open configuration file " + path.string());
    nlohmann::json j;
    try {
        is >> j;
    } catch (const std::exception& e) {
        throw ValidationError("configuration file " + path.string() + " is not valid JSON: " + e.what());
    }
    return parse_config(j);
}

/// Hash of the canonical serialization (keys sorted, shortest round-trip numbers).
inline std::string config_hash(const ExperimentConfig& c) { return hex64(fnv1a(nlohmann::json(c).dump())); }

// ---------------------------------------------------------------------------------------------
// Check catalog

struct CheckInfo {
    std::string id;
    std::string task;
    std::string statement;
};

inline const std::vector<CheckInfo>& list_checks() {
    static const std::vector<CheckInfo> catalog{
        {"theorem1_monotone", "profile",
         "x -> P^x(tau_D > t) is nondecreasing on (-a, 0] and nonincreasing on [0, a) for an interval D"},
        {"theorem1_midconcave", "profile",
         "psi(x'') - psi(x') >= psi(x''') - psi(x'') for equally spaced x' < x'' < x''' in (-a/2, a/2)"},
        {"theorem2_monotone", "profile",
         "y -> P^(y e1 + x~)(tau_D > t) is monotone on both half-lines for a box D and transverse offset x~"},
        {"theorem2_midconcave", "profile", "mid-concavity of y -> P^(y e1 + x~)(tau_D > t) for a box D"},
        {"backend_agreement", "profile", "Monte Carlo and grid survival probabilities agree within the tolerance ladder"},
        {"prop31_sign", "sign_structure",
         "the difference kernel f_s^U(x, z) is >= 0 on H+(U) minus cl(U+) and <= 0 on H-(U) minus cl(U-)"},
        {"prop31_identity", "difference_identity",
         "psi_t(x) - psi_t(T_U x) equals the space-time integral of f_s^U(x, z) psi_(t-s)(z) over the exterior of U"},
        {"ikeda_watanabe", "exit_law",
         "P^x(tau_D in A, X(tau_D) in B) equals the integral of the exit kernel h_D over A x B"},
        {"corollary1_eigen_shape", "eigen",
         "the first Dirichlet eigenfunction is positive, symmetric, monotone on both half-lines and mid-concave"},
        {"eigen_limit", "eigen", "exp(lambda_1 t) P^x(tau_D > t) converges to phi_1(x) times the integral of phi_1"},
        {"solver_validation_brownian", "eigen",
         "Brownian reference (validation only): lambda_1 = scale pi^2 / (4 a^2) and phi_1 proportional to cos(pi x / 2a)"},
    };
    return catalog;
}

// ---------------------------------------------------------------------------------------------
// Running

struct RunOptions {
    std::optional<std::string> output_dir;
    std::optional<unsigned> jobs;
    std::optional<std::uint64_t> seed;
    /// Stops after validation.
    bool validate_only = false;
    bool write_files = true;
    std::ostream* log = nullptr;
};

struct ExperimentOutcome {
    std::string name;
    nlohmann::json report;
    std::string csv;
    std::vector<CheckReport> checks;
    /// Wall-clock time of the experiment; reported on the console only, never in the bundle.
    double seconds = 0.0;
};

struct RunResult {
    ExperimentConfig config;
    std::string hash;
    std::vector<ExperimentOutcome> experiments;
    nlohmann::json summary;
    Verdict verdict = Verdict::Pass;

    [[nodiscard]] std::vector<const CheckReport*> find(const std::string& id) const {
        std::vector<const CheckReport*> out;
        for (const auto& e : experiments) {
            for (const auto& c : e.checks) {
                if (c.id == id) out.push_back(&c);
            }
        }
        return out;
    }
    [[nodiscard]] const ExperimentOutcome* experiment(const std::string& name) const {
        for (const auto& e : experiments) {
            if (e.name == name) return &e;
        }
        return nullptr;
    }
};

namespace detail {

inline std::vector<double> linspace(double lo, double hi, std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        v[i] = n == 1 ? 0.5 * (lo + hi)
                      : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    return v;
}

/// Monotone and concave point layouts and the merged, sorted point list.
struct ProfileLayout {
    std::vector<double> xs;
    std::vector<std::size_t> monotone;
    std::vector<std::size_t> concave;
};

inline ProfileLayout profile_layout(const ProfileSettings& s) {
    std::vector<double> mono = linspace(-s.monotone_extent, s.monotone_extent, s.monotone_points);
    std::vector<double> conc;
    const std::size_t count = s.concave_triples + 2;
    for (std::size_t i = 0; i < count; ++i) {
        conc.push_back((static_cast<double>(i) - 0.5 * static_cast<double>(count - 1)) * s.concave_spacing);
    }
    ProfileLayout out;
    std::vector<double> all = mono;
    all.insert(all.end(), conc.begin(), conc.end());
    std::sort(all.begin(), all.end());
    for (double x : all) {
        if (out.xs.empty() || std::abs(x - out.xs.back()) > 1e-12) out.xs.push_back(x);
    }
    const auto index_of = [&](double x) {
        std::size_t best = 0;
        for (std::size_t i = 0; i < out.xs.size(); ++i) {
            if (std::abs(out.xs[i] - x) < std::abs(out.xs[best] - x)) best = i;
        }
        return best;
    };
    for (double x : mono) out.monotone.push_back(index_of(x));
    for (double x : conc) out.concave.push_back(index_of(x));
    return out;
}

inline std::uint64_t experiment_seed(const ExperimentConfig& c, std::size_t index) {
    const auto& e = c.experiments[index];
    return e.seed != 0 ? e.seed : stream_seed(c.seed, index, 0x455850455249u);
}

inline std::string provenance(const std::string& hash, std::uint64_t seed) {
    return "config_hash=" + hash + " seed=" + std::to_string(seed);
}

inline std::string theorem_prefix(const Experiment& e) { return e.domain.dimension() == 1 ? "theorem1" : "theorem2"; }

/// Grid survival values at the given points, for the full process and for the process without
/// jumps below ε, on a grid and on its half-resolution companion.
struct GridSurvival {
    // [time][point]
    std::vector<std::vector<double>> fine;
    std::vector<std::vector<double>> coarse;
    std::vector<std::vector<double>> fine_truncated;
    std::vector<std::vector<double>> coarse_truncated;
    bool truncated = false;
};

inline std::vector<std::vector<double>> sample_1d(const Grid1D& g, const std::vector<std::vector<double>>& psi,
                                                  const std::vector<Point>& pts) {
    std::vector<std::vector<double>> out;
    for (const auto& v : psi) {
        std::vector<double> row;
        for (const auto& p : pts) row.push_back(g.interpolate(v, p[0]));
        out.push_back(row);
    }
    return out;
}

inline std::vector<std::vector<double>> sample_2d(const Grid2D& g, const std::vector<std::vector<double>>& psi,
                                                  const std::vector<Point>& pts) {
    std::vector<std::vector<double>> out;
    for (const auto& v : psi) {
        std::vector<double> row;
        for (const auto& p : pts) row.push_back(g.interpolate(v, p));
        out.push_back(row);
    }
    return out;
}

inline GridSurvival grid_survival(const Experiment& e, const std::vector<Point>& pts, bool with_truncated) {
    GridSurvival out;
    const auto& times = e.times;
    if (e.domain.dimension() == 1) {
        for (std::size_t level = 0; level < 2; ++level) {
            const Grid1D g(e.domain.a, level == 0 ? e.pde.nodes : e.pde.nodes / 2);
            const auto op = assemble_generator(e.model, g);
            auto& plain = level == 0 ? out.fine : out.coarse;
            plain = sample_1d(g, survival_pde(op, times), pts);
            if (with_truncated && e.mc.eps < g.h()) {
                auto& trunc = level == 0 ? out.fine_truncated : out.coarse_truncated;
                trunc = sample_1d(g, survival_pde(without_small_jumps(op, e.mc.eps), times), pts);
            }
        }
    } else {
        const double ratio = e.domain.b / e.domain.a;
        for (std::size_t level = 0; level < 2; ++level) {
            const std::size_t n1 = level == 0 ? e.pde.nodes : e.pde.nodes / 2;
            const auto n2 = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(n1)));
            const Grid2D g(e.domain.a, e.domain.b, n1, n2);
            const auto op = assemble_generator(e.model, g);
            const auto run = [&](const DiscretizedOperator& o) {
                const auto res = uniformized_action(o.matrix, Eigen::VectorXd::Ones(o.size()), times);
                std::vector<std::vector<double>> psi;
                for (const auto& v : res) psi.push_back(clip_probabilities(v));
                return sample_2d(g, psi, pts);
            };
            (level == 0 ? out.fine : out.coarse) = run(op);
            if (with_truncated && e.mc.eps < g.h()) {
                (level == 0 ? out.fine_truncated : out.coarse_truncated) = run(without_small_jumps(op, e.mc.eps));
            }
        }
    }
    out.truncated = !out.fine_truncated.empty() && !out.coarse_truncated.empty();
    return out;
}

inline ExperimentOutcome run_survival(const ExperimentConfig& c, std::size_t index, const std::string& hash) {
    const auto& e = c.experiments[index];
    const std::uint64_t seed = experiment_seed(c, index);
    ExperimentOutcome out;
    out.name = e.name;
    CsvTable csv({"backend", "t", "x1", "x2", "psi", "se", "tol"}, provenance(hash, seed));
    nlohmann::json estimates = nlohmann::json::array();
    if (e.backend != "pde") {
        McOptions opt;
        opt.coupling = e.mc.coupling;
        opt.jobs = c.jobs;
        for (std::size_t k = 0; k < e.times.size(); ++k) {
            for (const auto& p : e.points) {
                SurvivalEstimate est{p, e.times[k], 0.0, 0.0, e.mc.n, e.mc.eps, seed};
                if (e.domain.contains(p)) est = estimate_survival(e.model, e.domain, p, e.times[k], e.mc.n, e.mc.eps, seed, opt);
                nlohmann::json j = est;
                j["backend"] = "mc";
                estimates.push_back(j);
                csv.add({"mc", CsvTable::num(e.times[k]), CsvTable::num(p[0]), CsvTable::num(p[1]), CsvTable::num(est.value),
                         CsvTable::num(est.se), "0"});
            }
        }
    }
    if (e.backend != "mc" && e.model.pure_jump()) {
        const auto grid = grid_survival(e, e.points, false);
        for (std::size_t k = 0; k < e.times.size(); ++k) {
            for (std::size_t i = 0; i < e.points.size(); ++i) {
                const double tol = std::abs(grid.fine[k][i] - grid.coarse[k][i]);
                estimates.push_back({{"backend", "pde"}, {"x", e.points[i]}, {"t", e.times[k]},
                                     {"value", grid.fine[k][i]}, {"solver_tolerance", tol}, {"nodes", e.pde.nodes}});
                csv.add({"pde", CsvTable::num(e.times[k]), CsvTable::num(e.points[i][0]), CsvTable::num(e.points[i][1]),
                         CsvTable::num(grid.fine[k][i]), "0", CsvTable::num(tol)});
            }
        }
    }
    out.report = {{"estimates", estimates}};
    out.csv = csv.str();
    return out;
}

inline ExperimentOutcome run_profile(const ExperimentConfig& c, std::size_t index, const std::string& hash) {
    const auto& e = c.experiments[index];
    const auto& tol = c.tolerances;
    const std::uint64_t seed = experiment_seed(c, index);
    const bool planar = e.domain.dimension() == 2;
    const std::string prefix = theorem_prefix(e);
    const ProfileLayout layout = profile_layout(e.profile);
    ExperimentOutcome out;
    out.name = e.name;
    CsvTable csv({"backend", "t", "x1", "x2", "psi", "se", "tol"}, provenance(hash, seed));
    nlohmann::json mc_json = nlohmann::json::array();
    nlohmann::json pde_json = nlohmann::json::array();
    const std::vector<double> offsets = planar ? e.profile.offsets : std::vector<double>{0.0};
    const Ladder stat{tol.sigma, 0.0};
    const Ladder det{0.0, tol.pde_profile};

    // Monte Carlo profiles, one per offset line, keyed by offset index.
    std::vector<SurvivalProfile> profiles;
    if (e.backend != "pde") {
        McOptions opt;
        opt.coupling = e.mc.coupling;
        opt.jobs = c.jobs;
        for (std::size_t o = 0; o < offsets.size(); ++o) {
            std::vector<Point> pts;
            for (double x : layout.xs) pts.push_back({x, offsets[o]});
            const std::uint64_t s = o == 0 ? seed : stream_seed(seed, o, 0x4f4646534554u);
            profiles.push_back(simulate_survival_profile(e.model, e.domain, pts, e.times, e.mc.n, e.mc.eps, s, opt));
            const auto& p = profiles.back();
            for (std::size_t k = 0; k < e.times.size(); ++k) {
                nlohmann::json values = nlohmann::json::array();
                nlohmann::json ses = nlohmann::json::array();
                for (std::size_t i = 0; i < p.size(); ++i) {
                    values.push_back(p.value(k, i));
                    ses.push_back(p.se(k, i));
                    csv.add({"mc", CsvTable::num(e.times[k]), CsvTable::num(pts[i][0]), CsvTable::num(pts[i][1]),
                             CsvTable::num(p.value(k, i)), CsvTable::num(p.se(k, i)), "0"});
                }
                mc_json.push_back({{"offset", offsets[o]}, {"t", e.times[k]}, {"seed", s}, {"value", values}, {"se", ses},
                                   {"counts", p.joint[k]}});
                const auto with_ctx = [&](CheckReport r) {
                    r.experiment = e.name;
                    r.context = {{"backend", "mc"}, {"t", e.times[k]}, {"n", e.mc.n}, {"eps", e.mc.eps}};
                    if (planar) r.context["offset"] = offsets[o];
                    return r;
                };
                out.checks.push_back(with_ctx(check_monotone(profile_input(p, k, layout.monotone), stat, prefix + "_monotone")));
                out.checks.push_back(with_ctx(
                    check_midconcave(profile_input(p, k, layout.concave), e.domain.a, stat, prefix + "_midconcave")));
            }
        }
    }

    if (e.backend != "mc" && !planar) {
        std::vector<Point> pts;
        for (double x : layout.xs) pts.push_back({x, 0.0});
        const auto grid = grid_survival(e, pts, e.backend == "both");
        for (std::size_t k = 0; k < e.times.size(); ++k) {
            nlohmann::json rows = nlohmann::json::array();
            for (std::size_t i = 0; i < pts.size(); ++i) {
                const double stol = std::abs(grid.fine[k][i] - grid.coarse[k][i]);
                rows.push_back(grid.fine[k][i]);
                csv.add({"pde", CsvTable::num(e.times[k]), CsvTable::num(pts[i][0]), "0", CsvTable::num(grid.fine[k][i]), "0",
                         CsvTable::num(stol)});
            }
            pde_json.push_back({{"t", e.times[k]}, {"nodes", e.pde.nodes}, {"value", rows}});
            const auto pick = [&](const std::vector<std::size_t>& idx) {
                ProfileInput in;
                for (std::size_t i : idx) {
                    in.x.push_back(pts[i][0]);
                    in.value.push_back(grid.fine[k][i]);
                }
                return in;
            };
            const auto with_ctx = [&](CheckReport r) {
                r.experiment = e.name;
                r.context = {{"backend", "pde"}, {"t", e.times[k]}, {"nodes", e.pde.nodes}};
                return r;
            };
            out.checks.push_back(with_ctx(check_monotone(pick(layout.monotone), det, prefix + "_monotone")));
            out.checks.push_back(with_ctx(check_midconcave(pick(layout.concave), e.domain.a, det, prefix + "_midconcave")));
        }
        if (e.backend == "both" && !profiles.empty()) {
            std::vector<AgreementPoint> agree;
            for (std::size_t k = 0; k < e.times.size(); ++k) {
                for (std::size_t i = 0; i < pts.size(); ++i) {
                    AgreementPoint a;
                    a.t = e.times[k];
                    a.x = pts[i];
                    a.mc = profiles[0].value(k, i);
                    a.se = profiles[0].se(k, i);
                    a.pde_untruncated = grid.fine[k][i];
                    if (grid.truncated) {
                        a.pde = grid.fine_truncated[k][i];
                        a.solver_tolerance = std::abs(grid.fine_truncated[k][i] - grid.coarse_truncated[k][i]);
                    } else {
                        a.pde = grid.fine[k][i];
                        a.solver_tolerance = std::abs(grid.fine[k][i] - grid.coarse[k][i]);
                    }
                    agree.push_back(a);
                }
            }
            auto r = check_backend_agreement(agree, Ladder{tol.sigma, tol.bias_budget});
            r.experiment = e.name;
            r.context = {{"nodes", e.pde.nodes}, {"n", e.mc.n}, {"eps", e.mc.eps},
                         {"grid_models_truncation", grid.truncated}};
            out.checks.push_back(r);
        }
    }

    if (e.backend != "mc" && planar && !e.profile.spots.empty()) {
        const auto grid = grid_survival(e, e.profile.spots, e.backend == "both");
        std::vector<AgreementPoint> agree;
        for (std::size_t k = 0; k < e.times.size(); ++k) {
            nlohmann::json rows = nlohmann::json::array();
            for (std::size_t i = 0; i < e.profile.spots.size(); ++i) {
                const Point& q = e.profile.spots[i];
                const double stol = std::abs(grid.fine[k][i] - grid.coarse[k][i]);
                rows.push_back({{"x", q}, {"value", grid.fine[k][i]}, {"solver_tolerance", stol}});
                csv.add({"pde", CsvTable::num(e.times[k]), CsvTable::num(q[0]), CsvTable::num(q[1]),
                         CsvTable::num(grid.fine[k][i]), "0", CsvTable::num(stol)});
                if (profiles.empty()) continue;
                const auto o = static_cast<std::size_t>(std::find(offsets.begin(), offsets.end(), q[1]) - offsets.begin());
                std::size_t best = 0;
                for (std::size_t j = 0; j < layout.xs.size(); ++j) {
                    if (std::abs(layout.xs[j] - q[0]) < std::abs(layout.xs[best] - q[0])) best = j;
                }
                if (std::abs(layout.xs[best] - q[0]) > 1e-12) {
                    throw ValidationError(e.name + ": spot point x1 = " + std::to_string(q[0]) +
                                          " is not a profile point");
                }
                AgreementPoint a;
                a.t = e.times[k];
                a.x = q;
                a.mc = profiles[o].value(k, best);
                a.se = profiles[o].se(k, best);
                a.pde_untruncated = grid.fine[k][i];
                a.pde = grid.truncated ? grid.fine_truncated[k][i] : grid.fine[k][i];
                a.solver_tolerance = grid.truncated ? std::abs(grid.fine_truncated[k][i] - grid.coarse_truncated[k][i])
                                                    : stol;
                agree.push_back(a);
            }
            pde_json.push_back({{"t", e.times[k]}, {"nodes_per_axis", e.pde.nodes}, {"spots", rows}});
        }
        if (!agree.empty()) {
            auto r = check_backend_agreement(agree, Ladder{tol.sigma, tol.bias_budget});
            r.experiment = e.name;
            r.context = {{"nodes_per_axis", e.pde.nodes}, {"n", e.mc.n}, {"eps", e.mc.eps},
                         {"grid_models_truncation", grid.truncated}};
            out.checks.push_back(r);
        }
    }

    out.report = {{"points", layout.xs}, {"mc", mc_json}, {"pde", pde_json}};
    out.csv = csv.str();
    return out;
}

inline ExperimentOutcome run_sign(const ExperimentConfig& c, std::size_t index) {
    const auto& e = c.experiments[index];
    ExperimentOutcome out;
    out.name = e.name;
    const Grid1D g(e.domain.a, e.pde.nodes);
    const auto op = assemble_generator(e.model, g);
    std::vector<SubDomain> subs;
    for (const auto& u : e.subdomains) subs.emplace_back(e.domain, u[0], u[1]);
    const double t = e.times.empty() ? 1.0 : e.times.front();
    auto r = check_sign_structure(op, subs, e.s_values, t, c.tolerances.sign);
    r.experiment = e.name;
    r.context = {{"nodes", e.pde.nodes}};
    out.checks.push_back(r);
    out.report = nlohmann::json::object();
    return out;
}

inline ExperimentOutcome run_identity(const ExperimentConfig& c, std::size_t index) {
    const auto& e = c.experiments[index];
    ExperimentOutcome out;
    out.name = e.name;
    const SubDomain u(e.domain, e.subdomains.front()[0], e.subdomains.front()[1]);
    std::vector<std::pair<std::size_t, std::size_t>> levels;
    for (const auto& l : e.levels) levels.emplace_back(l[0], l[1]);
    auto r = check_identity_refinement(e.model, e.domain, u, e.points.front()[0], e.times.front(), levels,
                                       c.tolerances.identity, c.tolerances.identity_ratio);
    r.experiment = e.name;
    r.context = {{"U", e.subdomains.front()}, {"x", e.points.front()[0]}, {"t", e.times.front()}};
    out.checks.push_back(r);
    out.report = nlohmann::json::object();
    return out;
}

inline ExperimentOutcome run_exit_law(const ExperimentConfig& c, std::size_t index) {
    const auto& e = c.experiments[index];
    const std::uint64_t seed = experiment_seed(c, index);
    ExperimentOutcome out;
    out.name = e.name;
    auto r = check_ikeda_watanabe(e.model, e.domain, e.points.front()[0], e.rectangles, e.mc.n, e.mc.eps, seed,
                                  e.pde.nodes, Ladder{c.tolerances.sigma, c.tolerances.bias_budget}, c.jobs);
    r.experiment = e.name;
    r.context = {{"seed", seed}};
    out.checks.push_back(r);
    out.report = nlohmann::json::object();
    return out;
}

inline ExperimentOutcome run_eigen(const ExperimentConfig& c, std::size_t index, const std::string& hash) {
    const auto& e = c.experiments[index];
    const auto& tol = c.tolerances;
    ExperimentOutcome out;
    out.name = e.name;
    const Grid1D g(e.domain.a, e.pde.nodes);
    const auto op = assemble_generator(e.model, g);
    const EigenPair pair = first_eigenpair(e.model, e.domain, g);
    CsvTable csv({"x", "phi"}, provenance(hash, 0));
    for (std::size_t j = 0; j < g.n; ++j) csv.add({CsvTable::num(g.node(j)), CsvTable::num(pair.phi[j])});
    out.csv = csv.str();
    out.report = {{"eigenpair", pair}, {"phi", pair.phi}};

    if (e.model.pure_jump()) {
        auto shape = check_eigen_shape(e.model, pair, g, tol.eigen_shape);
        shape.experiment = e.name;
        shape.context = {{"nodes", e.pde.nodes}};
        out.checks.push_back(shape);
    }

    if (!e.times.empty() && e.model.pure_jump()) {
        const auto lim = eigen_limit_check(op, pair, e.times);
        CheckReport r;
        r.id = "eigen_limit";
        r.experiment = e.name;
        r.context = {{"nodes", e.pde.nodes}};
        for (std::size_t k = 1; k < lim.deviation.size(); ++k) {
            ++r.comparisons;
            if (lim.deviation[k] > lim.deviation[k - 1]) ++r.violations;
        }
        ++r.comparisons;
        r.worst_margin = tol.eigen_limit - lim.deviation.back();
        if (!(lim.deviation.back() < tol.eigen_limit)) ++r.violations;
        r.verdict = r.violations == 0 ? Verdict::Pass : Verdict::Fail;
        r.details = lim;
        r.details["tolerance"] = tol.eigen_limit;
        out.checks.push_back(r);
    }

    if (e.model.kind == ModelKind::BrownianReference) {
        CheckReport r;
        r.id = "solver_validation_brownian";
        r.experiment = e.name;
        r.context = {{"nodes", e.pde.nodes}, {"outside_hypotheses", true}};
        const double a = e.domain.a;
        const double exact = e.model.scale * std::numbers::pi * std::numbers::pi / (4.0 * a * a);
        const double rel = std::abs(pair.extrapolated - exact) / exact;
        double phi_err = 0.0;
        for (std::size_t j = 0; j < g.n; ++j) {
            const double ref = std::cos(std::numbers::pi * g.node(j) / (2.0 * a)) / std::sqrt(a);
            phi_err = std::max(phi_err, std::abs(pair.phi[j] - ref));
        }
        r.comparisons = 2;
        r.violations = (rel < tol.brownian_lambda ? 0 : 1) + (phi_err < tol.brownian_phi ? 0 : 1);
        r.worst_margin = std::min(tol.brownian_lambda - rel, tol.brownian_phi - phi_err);
        r.verdict = r.violations == 0 ? Verdict::Pass : Verdict::Fail;
        r.details = {{"lambda1_exact", exact},       {"lambda1_extrapolated", pair.extrapolated},
                     {"lambda1_relative_error", rel}, {"phi_max_node_error", phi_err},
                     {"lambda_tolerance", tol.brownian_lambda}, {"phi_tolerance", tol.brownian_phi}};
        out.checks.push_back(r);
    }
    return out;
}

}  // namespace detail

/// Executes every experiment of a configuration and writes the report bundle.
inline RunResult run(ExperimentConfig config, const RunOptions& opt = {}) {
    if (opt.output_dir) config.output_dir = *opt.output_dir;
    if (opt.jobs) config.jobs = *opt.jobs;
    if (opt.seed) config.seed = *opt.seed;
    validate(config);
    RunResult result;
    result.config = config;
    // The hash ignores the output directory and worker count, which do not affect results.
    ExperimentConfig canonical = config;
    canonical.output_dir = "";
    canonical.jobs = 1;
    result.hash = config_hash(canonical);
    if (opt.validate_only) {
        result.summary = {{"config_hash", result.hash}, {"validated", true}};
        return result;
    }

    for (std::size_t i = 0; i < config.experiments.size(); ++i) {
        const auto& e = config.experiments[i];
        if (opt.log) *opt.log << "[" << (i + 1) << "/" << config.experiments.size() << "] " << e.name << " (" << e.task << ")\n" << std::flush;
        const auto start = std::chrono::steady_clock::now();
        ExperimentOutcome o;
        if (e.task == "survival") {
            o = detail::run_survival(config, i, result.hash);
        } else if (e.task == "profile") {
            o = detail::run_profile(config, i, result.hash);
        } else if (e.task == "sign_structure") {
            o = detail::run_sign(config, i);
        } else if (e.task == "difference_identity") {
            o = detail::run_identity(config, i);
        } else if (e.task == "exit_law") {
            o = detail::run_exit_law(config, i);
        } else {
            o = detail::run_eigen(config, i, result.hash);
        }
        o.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (opt.log) {
            std::ostringstream line;
            line << std::fixed << std::setprecision(1) << "    done in " << o.seconds << " s\n";
            *opt.log << line.str() << std::flush;
        }
        const std::uint64_t seed = detail::experiment_seed(config, i);
        nlohmann::json body = o.report;
        o.report = {{"experiment", e.name},  {"task", e.task},     {"config_hash", result.hash},
                    {"seed", seed},          {"model", e.model},   {"domain", e.domain},
                    {"checks", o.checks},    {"results", body}};
        result.experiments.push_back(std::move(o));
    }

    std::vector<Verdict> verdicts;
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& e : result.experiments) {
        for (const auto& c : e.checks) {
            verdicts.push_back(c.verdict);
            checks.push_back({{"id", c.id},
                              {"experiment", c.experiment},
                              {"context", c.context},
                              {"verdict", to_string(c.verdict)},
                              {"comparisons", c.comparisons},
                              {"violations", c.violations},
                              {"inconclusive", c.inconclusive}});
        }
    }
    result.verdict = verdicts.empty() ? Verdict::Pass : combine(verdicts);
    result.summary = {{"config_hash", result.hash},
                      {"seed", config.seed},
                      {"schema_version", config.schema_version},
                      {"verdict", to_string(result.verdict)},
                      {"checks", checks}};

    if (opt.write_files) {
        const std::filesystem::path dir(config.output_dir);
        for (const auto& e : result.experiments) {
            atomic_write(dir / (e.name + ".json"), e.report.dump(2) + "\n");
            if (!e.csv.empty()) atomic_write(dir / (e.name + ".csv"), e.csv);
        }
        atomic_write(dir / "config.json", nlohmann::json(config).dump(2) + "\n");
        atomic_write(dir / "summary.json", result.summary.dump(2) + "\n");
    }
    if (opt.log) {
        auto& os = *opt.log;
        os << std::left << std::setw(28) << "check" << std::setw(30) << "experiment" << std::setw(14) << "verdict"
           << "context\n";
        for (const auto& e : result.experiments) {
            for (const auto& c : e.checks) {
                os << std::left << std::setw(28) << c.id << std::setw(30) << c.experiment << std::setw(14)
                   << to_string(c.verdict) << c.context.dump() << "\n";
            }
        }
        os << "aggregate verdict: " << to_string(result.verdict) << "\n";
    }
    return result;
}

}  // namespace levylab
