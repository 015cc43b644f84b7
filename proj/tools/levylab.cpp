#include "levylab/levylab.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

namespace {

struct ModelArgs {
    std::string kind = "alpha_stable";
    double alpha = 1.0;
    double theta = 1.0;
    double radius = 1.0;
    int dimension = 1;
    double scale = 1.0;

    void add(CLI::App& app) {
        app.add_option("--kind", kind, "alpha_stable, tempered_stable, truncated_stable or brownian_reference")
            ->capture_default_str();
        app.add_option("--alpha", alpha, "stability index")->capture_default_str();
        app.add_option("--theta", theta, "tempering rate")->capture_default_str();
        app.add_option("--radius", radius, "truncation radius")->capture_default_str();
        app.add_option("--scale", scale, "time scale of the generator")->capture_default_str();
    }

    [[nodiscard]] levylab::LevyModel model() const {
        levylab::LevyModel m;
        m.kind = levylab::model_kind_from_string(kind);
        m.alpha = m.kind == levylab::ModelKind::BrownianReference ? 2.0 : alpha;
        m.theta = theta;
        m.radius = radius;
        m.dimension = dimension;
        m.scale = scale;
        levylab::validate(m);
        return m;
    }
};

std::string default_out() {
    const char* env = std::getenv("LEVYLAB_OUT");
    return env != nullptr && *env != '\0' ? env : "";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Survival probabilities of symmetric Lévy processes killed on leaving an interval or a box"};
    app.require_subcommand(1);

    ModelArgs model;
    double t = 1.0;
    double a = 1.0;
    std::vector<double> xs{0.0};
    std::uint64_t seed = 1;
    std::uint64_t n = 100000;
    double eps = 1e-3;
    unsigned jobs = 1;
    std::size_t nodes = 512;

    auto* density = app.add_subcommand("density", "transition density p_t(x) of the free process");
    model.add(*density);
    density->add_option("-t,--time", t, "time")->capture_default_str();
    density->add_option("-x,--x", xs, "evaluation points")->capture_default_str();

    auto* mc = app.add_subcommand("survive-mc", "Monte Carlo estimate of P^x(tau_D > t) on (-a, a)");
    model.add(*mc);
    mc->add_option("-t,--time", t, "time")->capture_default_str();
    mc->add_option("-a,--half-width", a, "half-width of the interval")->capture_default_str();
    mc->add_option("-x,--x", xs, "starting points")->capture_default_str();
    mc->add_option("-n,--paths", n, "number of paths")->capture_default_str();
    mc->add_option("--eps", eps, "small-jump cutoff")->capture_default_str();
    mc->add_option("--seed", seed, "random seed")->capture_default_str();
    mc->add_option("--jobs", jobs, "worker threads")->capture_default_str();

    auto* pde = app.add_subcommand("survive-pde", "grid solution of P^x(tau_D > t) on (-a, a)");
    model.add(*pde);
    pde->add_option("-t,--time", t, "time")->capture_default_str();
    pde->add_option("-a,--half-width", a, "half-width of the interval")->capture_default_str();
    pde->add_option("-x,--x", xs, "evaluation points")->capture_default_str();
    pde->add_option("-N,--nodes", nodes, "grid nodes")->capture_default_str();

    auto* eigen = app.add_subcommand("eigen", "first Dirichlet eigenpair on (-a, a)");
    model.add(*eigen);
    eigen->add_option("-a,--half-width", a, "half-width of the interval")->capture_default_str();
    eigen->add_option("-N,--nodes", nodes, "grid nodes")->capture_default_str();
    bool with_phi = false;
    eigen->add_flag("--phi", with_phi, "include the eigenfunction values");

    auto* check = app.add_subcommand("check", "list the available checks");
    bool list = false;
    check->add_flag("--list", list, "print the check catalog");

    auto* run = app.add_subcommand("run", "run every experiment of a configuration file");
    std::string config_path;
    std::string out_dir = default_out();
    std::uint64_t run_seed = 0;
    unsigned run_jobs = 0;
    bool validate_only = false;
    run->add_option("-c,--config", config_path, "configuration file")->required()->check(CLI::ExistingFile);
    run->add_option("-o,--out", out_dir, "output directory (default: $LEVYLAB_OUT, then the config value)");
    run->add_option("--seed", run_seed, "override the configuration seed");
    run->add_option("--jobs", run_jobs, "override the worker count");
    run->add_flag("--validate-only", validate_only, "validate the configuration and stop");

    CLI11_PARSE(app, argc, argv);

    try {
        if (density->parsed()) {
            const auto m = model.model();
            double r_max = 0.0;
            for (double x : xs) r_max = std::max(r_max, std::abs(x));
            const levylab::TransitionDensity p(m, t, r_max);
            nlohmann::json out = nlohmann::json::array();
            for (double x : xs) out.push_back({{"t", t}, {"x", x}, {"density", p(x)}});
            std::cout << out.dump(2) << "\n";
            return 0;
        }
        if (mc->parsed()) {
            const auto m = model.model();
            std::vector<levylab::Point> pts;
            for (double x : xs) pts.push_back({x, 0.0});
            levylab::McOptions opt;
            opt.jobs = jobs;
            const auto est =
                levylab::estimate_survival_profile(m, levylab::Domain::interval(a), pts, t, n, eps, seed, opt);
            std::cout << nlohmann::json(est).dump(2) << "\n";
            return 0;
        }
        if (pde->parsed()) {
            const auto m = model.model();
            const levylab::Grid1D g(a, nodes);
            const auto psi = levylab::survival_pde(m, levylab::Domain::interval(a), t, g);
            nlohmann::json out = nlohmann::json::array();
            for (double x : xs) out.push_back({{"t", t}, {"x", x}, {"psi", g.interpolate(psi, x)}, {"nodes", nodes}});
            std::cout << out.dump(2) << "\n";
            return 0;
        }
        if (eigen->parsed()) {
            const auto m = model.model();
            const levylab::Grid1D g(a, nodes);
            const auto pair = levylab::first_eigenpair(m, levylab::Domain::interval(a), g);
            nlohmann::json out = pair;
            if (with_phi) out["phi"] = pair.phi;
            std::cout << out.dump(2) << "\n";
            return 0;
        }
        if (check->parsed()) {
            for (const auto& c : levylab::list_checks()) std::cout << c.id << "\t" << c.task << "\t" << c.statement << "\n";
            return 0;
        }
        if (run->parsed()) {
            const auto config = levylab::load_config(config_path);
            levylab::RunOptions opt;
            if (!out_dir.empty()) opt.output_dir = out_dir;
            if (run_seed != 0) opt.seed = run_seed;
            if (run_jobs != 0) opt.jobs = run_jobs;
            opt.validate_only = validate_only;
            opt.log = &std::cout;
            const auto result = levylab::run(config, opt);
            if (validate_only) {
                std::cout << "configuration is valid (config_hash=" << result.hash << ")\n";
                return 0;
            }
            return result.verdict == levylab::Verdict::Fail ? 1 : 0;
        }
    } catch (const levylab::ValidationError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
