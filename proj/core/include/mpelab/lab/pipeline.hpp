#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "mpelab/oracle/oracle.hpp"
#include "mpelab/population/scenario.hpp"

namespace mpelab::lab {

// The one table of default tolerances. Every row records what was applied.
struct Tolerances {
    double mpe_rel = 1e-3;
    double mpe_abs = 1e-6;       // used when the oracle value is below 1e-3 in magnitude
    double sobolev_rel = 1e-2;   // H1 pairing (Myerson)
    double quantile_rel = 2e-3;
    double gini_rel = 1e-2;
    double mc_se = 3.0;          // mc oracle: allowed multiples of its standard error
    double scale = 1.0;          // --tol-scale
};

struct RunOptions {
    std::vector<std::string> scores;       // empty: all of the scenario's scores
    std::vector<std::string> functionals;  // empty: the scenario's own list
    std::string oracle_mode = "quadrature";  // quadrature | mc | off
    oracle::OracleConfig oracle;
    Tolerances tol;
    bool curves = false;      // U(theta) tables
    bool oracle_only = false; // fd values and U(theta) tables only, no analytic model
    int curve_points = 11;
    double corrupt_tau = 0.0; // test-only offset added to every margin's tau
};

struct MpeRow {
    std::string scenario, score, functional, mechanism;
    std::string status = "ok";  // ok | unsupported | oracle_only
    std::string pairing;
    double analytic = 0.0, direct = 0.0, competition = 0.0, conduct = 0.0;
    std::string oracle_mode;
    double oracle = 0.0, oracle_se = 0.0, oracle_order = 0.0;
    double abs_err = 0.0, rel_err = 0.0;
    double tol_rel = 0.0, tol_abs = 0.0;
    std::string verdict = "n/a";  // pass | fail | n/a
    double runtime_s = 0.0;       // written to timing.csv only
};

struct Series {
    std::string name;                  // file stem
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

struct ScenarioRun {
    std::string scenario, mechanism, rule;
    std::vector<double> c;
    double residual = 0.0;
    std::vector<std::string> warnings;
    std::vector<MpeRow> rows;
    std::vector<Series> series;
    std::vector<std::pair<std::string, double>> extras;  // named scalar diagnostics
    double runtime_s = 0.0;
};

// Runs the analytic pipeline and the oracle on one scenario. Solver failures are rethrown
// with the scenario id prepended.
ScenarioRun run_scenario(const population::ScenarioSpec& spec, const RunOptions& opts);

// Scenarios run in a pool of numerics::worker_count() workers; results keep the input order.
std::vector<ScenarioRun> run_all(const std::vector<population::ScenarioSpec>& specs, const RunOptions& opts);

bool all_pass(const std::vector<ScenarioRun>& runs);

// records.json, summary.csv, summary.txt, timing.csv and plots/<series>.csv under dir, each
// written to a temporary file and renamed into place.
void write_outputs(const std::string& dir, const std::vector<ScenarioRun>& runs);

void print_table(std::ostream& os, const std::vector<ScenarioRun>& runs);

// Writes text to path via a temporary file in the same directory and a rename.
void write_atomic(const std::string& path, const std::string& text);

} // namespace mpelab::lab
