#include "levylab/levylab.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

using levylab::CheckReport;
using levylab::RunResult;
using levylab::Verdict;

struct Criterion {
    std::string label;
    bool pass = false;
    std::string detail;
};

std::string read_file(const std::filesystem::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

std::vector<const CheckReport*> of(const RunResult& r, const std::string& id, const std::string& experiment) {
    std::vector<const CheckReport*> out;
    for (const auto* c : r.find(id)) {
        if (c->experiment == experiment) out.push_back(c);
    }
    return out;
}

/// Every report passes and there is at least `expected` of them.
bool all_pass(const std::vector<const CheckReport*>& reports, std::size_t expected, std::ostringstream& why) {
    bool ok = reports.size() == expected;
    if (!ok) why << " expected " << expected << " reports, found " << reports.size() << ";";
    for (const auto* c : reports) {
        if (c->verdict != Verdict::Pass) {
            ok = false;
            why << " " << c->id << " " << c->context.dump() << " " << levylab::to_string(c->verdict) << ";";
        }
    }
    return ok;
}

double seconds_of(const RunResult& r, const std::string& name) {
    const auto* e = r.experiment(name);
    return e == nullptr ? 0.0 : e->seconds;
}

}  // namespace

int main(int argc, char** argv) {
    const std::filesystem::path source = argc > 1 ? argv[1] : LEVYLAB_SOURCE_DIR;
    const std::filesystem::path out = argc > 2 ? argv[2] : std::filesystem::current_path() / "acceptance-out";
    std::filesystem::remove_all(out);

    const auto acceptance = levylab::load_config(source / "configs" / "acceptance.json");
    const auto validation = levylab::load_config(source / "configs" / "solver_validation.json");

    levylab::RunOptions first;
    first.output_dir = (out / "run-a").string();
    first.log = &std::cerr;
    const RunResult a = levylab::run(acceptance, first);

    levylab::RunOptions second;
    second.output_dir = (out / "run-b").string();
    second.jobs = 2;
    second.log = &std::cerr;
    const RunResult b = levylab::run(acceptance, second);

    levylab::RunOptions solver;
    solver.output_dir = (out / "solver-validation").string();
    solver.log = &std::cerr;
    const RunResult v = levylab::run(validation, solver);

    std::vector<Criterion> results;
    const std::vector<std::string> profiles{"profile_alpha05", "profile_alpha10", "profile_alpha15"};

    {
        std::ostringstream why;
        bool ok = true;
        double seconds = 0.0;
        for (const auto& p : profiles) {
            ok = all_pass(of(a, "theorem1_monotone", p), 6, why) && ok;
            seconds += seconds_of(a, p);
        }
        if (!(seconds < 600.0)) {
            ok = false;
            why << " runtime " << seconds << " s;";
        }
        why << " profiles took " << static_cast<int>(seconds) << " s";
        results.push_back({"AC1 monotone profiles, alpha 0.5/1/1.5, grid and Monte Carlo", ok, why.str()});
    }
    {
        std::ostringstream why;
        bool ok = true;
        for (const auto& p : profiles) ok = all_pass(of(a, "theorem1_midconcave", p), 6, why) && ok;
        results.push_back({"AC2 mid-concave profiles, 17 triples, grid and Monte Carlo", ok, why.str()});
    }
    {
        std::ostringstream why;
        const auto reps = of(a, "prop31_sign", "sign_structure_alpha10");
        const bool ok = all_pass(reps, 1, why);
        if (!reps.empty()) why << " comparisons " << reps.front()->comparisons;
        results.push_back({"AC3 difference kernel sign structure, 3 sub-domains, N=256", ok, why.str()});
    }
    {
        std::ostringstream why;
        const auto reps = of(a, "prop31_identity", "difference_identity_alpha10");
        const bool ok = all_pass(reps, 1, why);
        if (!reps.empty()) {
            const auto& levels = reps.front()->details["levels"];
            why << " finest residual " << levels.back()["residual"].get<double>() << ", ratios "
                << reps.front()->details["ratios"].dump();
        }
        results.push_back({"AC4 difference identity residual and refinement ratio", ok, why.str()});
    }
    {
        std::ostringstream why;
        const auto reps = of(a, "ikeda_watanabe", "exit_law_alpha10");
        bool ok = all_pass(reps, 1, why);
        if (!reps.empty() && reps.front()->comparisons != 5) {
            ok = false;
            why << " expected 5 rectangles;";
        }
        results.push_back({"AC5 exit law Monte Carlo versus quadrature, 5 rectangles", ok, why.str()});
    }
    {
        std::ostringstream why;
        const auto reps = of(v, "solver_validation_brownian", "eigen_brownian");
        const bool ok = all_pass(reps, 1, why);
        if (!reps.empty()) {
            why << " lambda rel err " << reps.front()->details["lambda1_relative_error"].get<double>() << ", phi err "
                << reps.front()->details["phi_max_node_error"].get<double>();
        }
        results.push_back({"AC6 Brownian reference eigenpair at N=1024", ok, why.str()});
    }
    {
        std::ostringstream why;
        bool ok = true;
        for (const auto* name : {"eigen_alpha05", "eigen_alpha10", "eigen_alpha15"}) {
            ok = all_pass(of(a, "corollary1_eigen_shape", name), 1, why) && ok;
        }
        const auto lim = of(a, "eigen_limit", "eigen_alpha10");
        ok = all_pass(lim, 1, why) && ok;
        if (!lim.empty()) why << " deviation at t=5 " << lim.front()->details["max_relative_deviation"].back().get<double>();
        results.push_back({"AC7 eigenfunction shape and eigen limit", ok, why.str()});
    }
    {
        std::ostringstream why;
        bool ok = all_pass(of(a, "theorem2_monotone", "profile_box_alpha10"), 3, why);
        ok = all_pass(of(a, "theorem2_midconcave", "profile_box_alpha10"), 3, why) && ok;
        const auto agree = of(a, "backend_agreement", "profile_box_alpha10");
        ok = all_pass(agree, 1, why) && ok;
        if (!agree.empty() && agree.front()->comparisons != 5) {
            ok = false;
            why << " expected 5 spot points;";
        }
        results.push_back({"AC8 box profiles at three offsets and grid agreement", ok, why.str()});
    }
    {
        std::ostringstream why;
        bool ok = a.hash == b.hash;
        std::size_t files = 0;
        for (const auto& entry : std::filesystem::directory_iterator(out / "run-a")) {
            const auto name = entry.path().filename();
            if (name == "config.json") continue;
            ++files;
            if (read_file(entry.path()) != read_file(out / "run-b" / name)) {
                ok = false;
                why << " " << name.string() << " differs;";
            }
        }
        why << " compared " << files << " files (second run with 2 workers)";
        results.push_back({"AC9 byte-identical bundles across two runs", ok, why.str()});
    }

    bool all = true;
    for (const auto& r : results) {
        std::cout << (r.pass ? "PASS" : "FAIL") << "  " << r.label << " |" << r.detail << "\n";
        all = all && r.pass;
    }
    for (const auto& p : profiles) {
        for (const auto* c : of(a, "backend_agreement", p)) {
            std::cout << "info  " << p << " backend agreement " << levylab::to_string(c->verdict)
                      << ", max truncation bias " << c->details["max_truncation_bias"].get<double>() << "\n";
        }
    }
    return all ? 0 : 1;
}
