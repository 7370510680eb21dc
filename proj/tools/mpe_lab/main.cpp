// mpe_lab: runs catalog or user scenarios through the analytic MPE pipeline and its oracle.
// Exit status: 0 all verdicts pass, 1 a tolerance failed, 2 configuration error, 3 solver error.

#include <algorithm>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mpelab/errors.hpp"
#include "mpelab/lab/catalog.hpp"
#include "mpelab/lab/pipeline.hpp"
#include "mpelab/lab/scenario_io.hpp"

namespace {

using mpelab::population::ScenarioSpec;

void list_scenarios(const std::vector<ScenarioSpec>& specs)
{
    for (const auto& s : specs) {
        std::cout << s.id << "  [" << s.section << "]  " << s.mechanism.id << " / " << s.conduct.id << "\n";
        if (!s.description.empty()) std::cout << "    " << s.description << "\n";
        std::cout << "    scores:";
        for (const auto& sc : s.scores) std::cout << " " << sc.id;
        if (s.scores.empty()) std::cout << " (none)";
        std::cout << "\n    functionals:";
        for (const auto& f : s.functionals) std::cout << " " << f;
        std::cout << "\n";
    }
    std::cout << "functionals: mean (expected outcome), quantile[:tau] (outcome quantile, default median), "
                 "gini (Gini coefficient)\n";
}

int run(int argc, char** argv)
{
    CLI::App app{"Marginal policy effects under equilibrium allocation", "mpe_lab"};
    std::vector<std::string> scenarios, scores, functionals, files;
    bool all = false, list = false, oracle_only = false, plots = false;
    std::string oracle_mode = "quadrature", out = "mpe_lab_out";
    long long seed = -1;
    double tol_scale = 1.0, corrupt_tau = 0.0;
    bool quiet = false;

    app.add_option("--scenario", scenarios, "Scenario id (repeatable)");
    app.add_option("--score", scores, "Policy score id (repeatable; default all of the scenario's scores)");
    app.add_option("--functional", functionals, "mean | quantile[:tau] | gini (repeatable)");
    app.add_flag("--all", all, "Run every scenario in the catalog and the scenario files");
    app.add_option("--oracle", oracle_mode, "Finite-difference oracle")
        ->check(CLI::IsMember({"quadrature", "mc", "off"}));
    app.add_option("--out", out, "Output directory");
    app.add_option("--seed", seed, "Base seed: sample, assign and oracle seeds become N, N+1, N+2");
    app.add_option("--tol-scale", tol_scale, "Multiplier on every tolerance")->check(CLI::PositiveNumber);
    app.add_flag("--oracle-only", oracle_only, "Only the oracle: fd values and U(theta) tables");
    app.add_flag("--plots", plots, "Also write U(theta) tables in normal runs");
    app.add_flag("--list", list, "List scenarios, scores and functionals");
    app.add_option("--scenario-file", files, "JSON scenario file (repeatable)")->check(CLI::ExistingFile);
    app.add_flag("--quiet", quiet, "No table on stdout");
    // Test-only: shifts every margin's tau to show that the exit status gates on tolerance.
    app.add_option("--corrupt-tau", corrupt_tau)->group("");

    // "mpe_lab run --scenario ..." and "mpe_lab --scenario ..." are the same command.
    std::vector<std::string> args(argv + 1, argv + argc);
    if (!args.empty() && args.front() == "run") args.erase(args.begin());
    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    std::vector<ScenarioSpec> pool = mpelab::lab::catalog();
    for (const auto& f : files)
        for (auto& s : mpelab::lab::load_scenario_file(f)) {
            const bool clash = std::any_of(pool.begin(), pool.end(), [&](const ScenarioSpec& p) { return p.id == s.id; });
            if (clash) throw mpelab::ConfigError(f + ": scenario id '" + s.id + "' is already defined");
            pool.push_back(std::move(s));
        }

    if (list) {
        list_scenarios(pool);
        return 0;
    }

    std::vector<ScenarioSpec> chosen;
    if (all) {
        chosen = pool;
    } else {
        if (scenarios.empty()) throw mpelab::ConfigError("nothing to run: pass --scenario ID, --all or --list");
        for (const auto& id : scenarios) {
            const auto it = std::find_if(pool.begin(), pool.end(), [&](const ScenarioSpec& p) { return p.id == id; });
            if (it == pool.end()) throw mpelab::ConfigError("unknown scenario '" + id + "' (see --list)");
            chosen.push_back(*it);
        }
    }
    if (!scores.empty()) {
        std::set<std::string> found;
        std::vector<ScenarioSpec> keep;
        for (const auto& s : chosen) {
            bool any = false;
            for (const auto& sc : s.scores)
                if (std::find(scores.begin(), scores.end(), sc.id) != scores.end()) {
                    found.insert(sc.id);
                    any = true;
                }
            if (any || !all) keep.push_back(s);
        }
        for (const auto& id : scores)
            if (!found.count(id)) throw mpelab::ConfigError("unknown score '" + id + "' for the selected scenarios");
        chosen = std::move(keep);
    }
    if (seed >= 0)
        for (auto& s : chosen) {
            s.seeds.sample = static_cast<std::uint64_t>(seed);
            s.seeds.assign = static_cast<std::uint64_t>(seed) + 1;
            s.seeds.oracle = static_cast<std::uint64_t>(seed) + 2;
        }

    mpelab::lab::RunOptions opts;
    opts.scores = scores;
    opts.functionals = functionals;
    opts.oracle_mode = oracle_mode;
    opts.tol.scale = tol_scale;
    opts.oracle_only = oracle_only;
    opts.curves = plots;
    opts.corrupt_tau = corrupt_tau;

    const auto runs = mpelab::lab::run_all(chosen, opts);
    mpelab::lab::write_outputs(out, runs);
    if (!quiet) mpelab::lab::print_table(std::cout, runs);
    const bool ok = mpelab::lab::all_pass(runs);
    if (!ok) std::cerr << "mpe_lab: at least one MPE failed its tolerance\n";
    return ok ? 0 : 1;
}

} // namespace

int main(int argc, char** argv)
{
    try {
        return run(argc, argv);
    } catch (const mpelab::ConfigError& e) {
        std::cerr << "mpe_lab: configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "mpe_lab: solver error: " << e.what() << "\n";
        return 3;
    }
}
