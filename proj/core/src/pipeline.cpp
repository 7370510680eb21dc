#include "mpelab/lab/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "mpelab/errors.hpp"
#include "mpelab/numerics/parallel.hpp"
#include "mpelab/welfare/iv.hpp"
#include "mpelab/welfare/targeting.hpp"

namespace mpelab::lab {

namespace fs = std::filesystem;
using population::ScenarioSpec;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string file_stem(std::string s)
{
    for (char& ch : s)
        if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-' || ch == '.')) ch = '_';
    return s;
}

double base_tolerance(const welfare::FunctionalSpec& f, bool h1, const Tolerances& t)
{
    if (f.kind == "quantile") return t.quantile_rel;
    if (f.kind == "gini") return t.gini_rel;
    return h1 ? t.sobolev_rel : t.mpe_rel;
}

void judge(MpeRow& row, const Tolerances& t)
{
    row.abs_err = std::abs(row.analytic - row.oracle);
    row.rel_err = row.oracle != 0.0 ? row.abs_err / std::abs(row.oracle) : row.abs_err;
    bool ok;
    if (row.oracle_mode == "mc") {
        ok = row.abs_err <= t.mc_se * t.scale * row.oracle_se + row.tol_abs;
    } else if (std::abs(row.oracle) < 1e-3) {
        ok = row.abs_err <= row.tol_abs;
    } else {
        ok = row.rel_err <= row.tol_rel;
    }
    row.verdict = ok ? "pass" : "fail";
}

Series psi_series(const welfare::AnalyticModel& m, const std::string& id)
{
    Series s;
    s.name = "psi__" + id;
    const auto& sp = m.pop->space();
    const auto& psi = m.conduct.psi();
    const int dim = static_cast<int>(m.state.c.size());
    if (psi.space() == clearing::InfluenceFunction::Space::SobolevH1) {
        s.columns = {"r", "psi", "dpsi"};
        const int n = 401;
        for (int i = 0; i < n; ++i) {
            const double r = sp.lo[0] + (sp.hi[0] - sp.lo[0]) * i / (n - 1);
            s.rows.push_back({r, psi.value_1d(r), psi.derivative_1d(r)});
        }
        return s;
    }
    s.columns = {"type", "r1", "r2"};
    for (int l = 0; l < dim; ++l) s.columns.push_back("psi" + std::to_string(l + 1));
    const int n = sp.n_cont == 1 ? 401 : (sp.n_cont == 2 ? 41 : 1);
    Report r;
    for (int t = 0; t < sp.n_types; ++t) {
        r.type = t;
        for (int i = 0; i < n; ++i) {
            r.x[0] = sp.n_cont >= 1 ? sp.lo[0] + (sp.hi[0] - sp.lo[0]) * i / std::max(1, n - 1) : 0.0;
            for (int j = 0; j < (sp.n_cont == 2 ? n : 1); ++j) {
                r.x[1] = sp.n_cont == 2 ? sp.lo[1] + (sp.hi[1] - sp.lo[1]) * j / (n - 1) : 0.0;
                const auto v = psi(r);
                std::vector<double> row{static_cast<double>(t), r.x[0], r.x[1]};
                for (int l = 0; l < dim; ++l) row.push_back(v[l]);
                s.rows.push_back(std::move(row));
            }
        }
    }
    return s;
}

Series u_theta_series(const population::Population& pop, const ScenarioSpec& spec, const std::string& score_id,
                      const welfare::FunctionalSpec& f, const population::PolicyScore& s, const RunOptions& opts,
                      std::size_t dim)
{
    Series cs{"u_theta__" + spec.id + "__" + score_id + "__" + f.id(), {"theta", "U"}, {}};
    for (std::size_t l = 0; l < dim; ++l) cs.columns.push_back("c" + std::to_string(l + 1));
    const double sup = population::score_sup_abs(s, pop.atoms());
    const double hmax = std::min(0.1, sup > 0.0 ? 0.25 / sup : 0.1);
    const int n = std::max(3, opts.curve_points);
    for (int i = 0; i < n; ++i) {
        const double th = -hmax + 2.0 * hmax * i / (n - 1);
        mechanism::Vec c;
        const double u = oracle::welfare_at(pop, f, s, th, opts.oracle, &c);
        std::vector<double> r{th, u};
        for (Eigen::Index l = 0; l < c.size(); ++l) r.push_back(c[l]);
        cs.rows.push_back(std::move(r));
    }
    return cs;
}

oracle::OracleConfig oracle_config(const ScenarioSpec& spec, const welfare::FunctionalSpec& f, const RunOptions& opts,
                                   ScenarioRun& run)
{
    auto cfg = opts.oracle;
    cfg.mode = opts.oracle_mode;
    if (cfg.mode == "mc" && f.kind != "mean") {
        cfg.mode = "quadrature";
        run.warnings.push_back(f.id() + ": the Monte Carlo oracle covers the mean only; quadrature used");
    }
    cfg.mc_samples = spec.mc_samples;
    cfg.seed = spec.seeds.oracle;
    return cfg;
}

bool selected(const RunOptions& opts, const std::string& id)
{
    return opts.scores.empty() || std::find(opts.scores.begin(), opts.scores.end(), id) != opts.scores.end();
}

void run_oracle_only(const population::Population& pop, const ScenarioSpec& spec, const std::string& fid,
                     const RunOptions& opts, ScenarioRun& run)
{
    const auto f = welfare::parse_functional(fid);
    for (const auto& ss : spec.scores) {
        if (!selected(opts, ss.id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        const auto s = population::make_policy_score(ss, spec.policy_law, pop.quadrature().policy_nodes);
        MpeRow row;
        row.scenario = spec.id;
        row.score = ss.id;
        row.functional = f.id();
        row.mechanism = spec.mechanism.id;
        row.status = "oracle_only";
        mechanism::Vec c0;
        oracle::welfare_at(pop, f, s, 0.0, opts.oracle, &c0);
        if (opts.oracle_mode != "off") {
            const auto fd = oracle::fd_mpe(pop, f, s, oracle_config(spec, f, opts, run));
            row.oracle_mode = fd.mode;
            row.oracle = fd.value;
            row.oracle_se = fd.se;
            row.oracle_order = fd.order;
        }
        run.series.push_back(u_theta_series(pop, spec, ss.id, f, s, opts, static_cast<std::size_t>(c0.size())));
        row.runtime_s = seconds_since(t0);
        run.rows.push_back(row);
    }
}

void run_functional(const population::Population& pop, const ScenarioSpec& spec, const std::string& fid,
                    const RunOptions& opts, ScenarioRun& run, bool first)
{
    const auto f = welfare::parse_functional(fid);
    auto m = welfare::build_model(pop, f);
    if (first) {
        run.rule = m->state.rule;
        run.c.assign(m->state.c.data(), m->state.c.data() + m->state.c.size());
        run.residual = m->state.residual;
        run.warnings = m->state.warnings;
    }
    welfare::apply_tau_offset(*m, opts.corrupt_tau);
    if (!m->supports_mpe) {
        MpeRow row;
        row.scenario = spec.id;
        row.score = "-";
        row.functional = f.id();
        row.mechanism = spec.mechanism.id;
        row.status = "unsupported";
        run.rows.push_back(row);
        return;
    }
    if (first) {
        run.series.push_back(psi_series(*m, spec.id));
        const auto family = spec.policy_law.family();
        if (family == population::PolicyLaw::Family::covariate && f.kind == "mean") {
            const auto t = welfare::optimal_targeting(*m, 1.0, 0);
            run.extras.emplace_back("targeting_mpe_optimal", t.mpe_optimal);
            run.extras.emplace_back("targeting_mpe_closed_form", t.mpe_closed_form);
            run.extras.emplace_back("targeting_mpe_ewm", t.mpe_ewm);
            Series s{"cate__" + spec.id, {"x", "cate", "mass", "h_optimal", "h_ewm"}, {}};
            for (std::size_t i = 0; i < t.cate.x.size(); ++i)
                s.rows.push_back({t.cate.x[i], t.cate.cate[i], t.cate.mass[i], t.optimal.h[i], t.ewm.h[i]});
            run.series.push_back(std::move(s));
        }
        if (family == population::PolicyLaw::Family::instrument && f.kind == "mean") {
            const auto ca = welfare::complier_average(*m);
            run.extras.emplace_back("complier_average", ca.value);
            run.extras.emplace_back("wald_psi_oracle", welfare::wald_psi_oracle(*m));
            Series s{"mte__" + spec.id, {"xi", "mte"}, {}};
            for (std::size_t i = 0; i < ca.xi.size(); ++i) s.rows.push_back({ca.xi[i], ca.mte[i]});
            run.series.push_back(std::move(s));
        }
    }

    for (const auto& ss : spec.scores) {
        if (!selected(opts, ss.id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        const auto s = population::make_policy_score(ss, spec.policy_law, pop.quadrature().policy_nodes);
        MpeRow row;
        row.scenario = spec.id;
        row.score = ss.id;
        row.functional = f.id();
        row.mechanism = spec.mechanism.id;
        const bool h1 = m->conduct.is_h1();
        const auto comp = h1 ? welfare::mpe_general(*m, s) : welfare::mpe_covariance(*m, s);
        row.pairing = comp.pairing;
        row.direct = comp.direct;
        row.competition = comp.competition;
        row.conduct = comp.conduct;
        row.analytic = comp.total();
        row.tol_rel = base_tolerance(f, h1, opts.tol) * opts.tol.scale;
        row.tol_abs = opts.tol.mpe_abs * opts.tol.scale;
        if (opts.oracle_mode != "off") {
            const auto fd = oracle::fd_mpe(pop, f, s, oracle_config(spec, f, opts, run));
            row.oracle_mode = fd.mode;
            row.oracle = fd.value;
            row.oracle_se = fd.se;
            row.oracle_order = fd.order;
            judge(row, opts.tol);
        } else {
            row.oracle_mode = "off";
        }
        if (opts.curves) run.series.push_back(u_theta_series(pop, spec, ss.id, f, s, opts, run.c.size()));
        row.runtime_s = seconds_since(t0);
        run.rows.push_back(row);
    }
}

std::string fmt(double v)
{
    if (std::isnan(v)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_series(const Series& s)
{
    std::ostringstream os;
    for (std::size_t i = 0; i < s.columns.size(); ++i) os << (i ? "," : "") << s.columns[i];
    os << "\n";
    for (const auto& r : s.rows) {
        for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << fmt(r[i]);
        os << "\n";
    }
    return os.str();
}

nlohmann::ordered_json row_json(const MpeRow& r)
{
    nlohmann::ordered_json j;
    j["scenario"] = r.scenario;
    j["score"] = r.score;
    j["functional"] = r.functional;
    j["mechanism"] = r.mechanism;
    j["status"] = r.status;
    if (r.status == "oracle_only" && r.oracle_mode != "off") {
        j["oracle_mode"] = r.oracle_mode;
        j["oracle_mpe"] = r.oracle;
        j["oracle_se"] = r.oracle_se;
    }
    if (r.status == "ok") {
        j["pairing"] = r.pairing;
        j["analytic_mpe"] = r.analytic;
        j["components"] = {{"direct", r.direct}, {"competition", r.competition}, {"conduct", r.conduct}};
        j["oracle_mode"] = r.oracle_mode;
        if (r.oracle_mode != "off") {
            j["oracle_mpe"] = r.oracle;
            j["oracle_se"] = r.oracle_se;
            j["oracle_order"] = r.oracle_order;
            j["abs_err"] = r.abs_err;
            j["rel_err"] = r.rel_err;
        }
        j["tolerance"] = {{"rel", r.tol_rel}, {"abs", r.tol_abs}};
    }
    j["verdict"] = r.verdict;
    return j;
}

} // namespace

ScenarioRun run_scenario(const ScenarioSpec& spec, const RunOptions& opts)
{
    const auto t0 = std::chrono::steady_clock::now();
    ScenarioRun run;
    run.scenario = spec.id;
    run.mechanism = spec.mechanism.id;
    try {
        population::validate_scenario(spec);
        const population::Population pop(spec, {});
        const auto& fids = opts.functionals.empty() ? spec.functionals : opts.functionals;
        for (std::size_t i = 0; i < fids.size(); ++i) {
            if (opts.oracle_only)
                run_oracle_only(pop, spec, fids[i], opts, run);
            else
                run_functional(pop, spec, fids[i], opts, run, i == 0);
        }
    } catch (const InfeasibleError& e) {
        throw InfeasibleError(spec.id + ": " + e.what());
    } catch (const ConvergenceError& e) {
        throw ConvergenceError(spec.id + ": " + e.what());
    } catch (const SolverError& e) {
        throw SolverError(spec.id + ": " + e.what());
    } catch (const ConfigError& e) {
        throw ConfigError(spec.id + ": " + e.what());
    }
    run.runtime_s = seconds_since(t0);
    return run;
}

std::vector<ScenarioRun> run_all(const std::vector<ScenarioSpec>& specs, const RunOptions& opts)
{
    std::vector<ScenarioRun> runs(specs.size());
    std::vector<std::exception_ptr> errors(specs.size());
    numerics::parallel_for(specs.size(), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            try {
                runs[i] = run_scenario(specs[i], opts);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    }, numerics::worker_count());
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    return runs;
}

bool all_pass(const std::vector<ScenarioRun>& runs)
{
    for (const auto& r : runs)
        for (const auto& row : r.rows)
            if (row.verdict == "fail") return false;
    return true;
}

void write_atomic(const std::string& path, const std::string& text)
{
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ConfigError(path + ": cannot open for writing");
        out << text;
        out.flush();
        if (!out) throw ConfigError(path + ": write failed");
    }
    fs::rename(tmp, target);
}

void write_outputs(const std::string& dir, const std::vector<ScenarioRun>& runs)
{
    nlohmann::ordered_json records = nlohmann::ordered_json::array();
    std::ostringstream csv, timing;
    csv << "scenario,score,functional,mechanism,status,pairing,analytic_mpe,direct,competition,conduct,"
           "oracle_mode,oracle_mpe,oracle_se,abs_err,rel_err,tol_rel,tol_abs,verdict\n";
    timing << "scenario,score,functional,runtime_s\n";
    for (const auto& run : runs) {
        nlohmann::ordered_json j;
        j["scenario"] = run.scenario;
        j["mechanism"] = run.mechanism;
        j["conduct_rule"] = run.rule;
        j["c"] = run.c;
        j["clearing_residual"] = run.residual;
        j["warnings"] = run.warnings;
        nlohmann::ordered_json extras = nlohmann::ordered_json::object();
        for (const auto& [k, v] : run.extras) extras[k] = v;
        j["diagnostics"] = extras;
        nlohmann::ordered_json rows = nlohmann::ordered_json::array();
        for (const auto& r : run.rows) {
            rows.push_back(row_json(r));
            csv << r.scenario << "," << r.score << "," << r.functional << "," << r.mechanism << "," << r.status << ","
                << r.pairing << "," << fmt(r.analytic) << "," << fmt(r.direct) << "," << fmt(r.competition) << ","
                << fmt(r.conduct) << "," << r.oracle_mode << "," << fmt(r.oracle) << "," << fmt(r.oracle_se) << ","
                << fmt(r.abs_err) << "," << fmt(r.rel_err) << "," << fmt(r.tol_rel) << "," << fmt(r.tol_abs) << ","
                << r.verdict << "\n";
            timing << r.scenario << "," << r.score << "," << r.functional << "," << fmt(r.runtime_s) << "\n";
        }
        j["reports"] = rows;
        records.push_back(j);
        timing << run.scenario << ",*,*," << fmt(run.runtime_s) << "\n";
    }
    const fs::path d(dir);
    write_atomic((d / "records.json").string(), records.dump(2) + "\n");
    write_atomic((d / "summary.csv").string(), csv.str());
    std::ostringstream table;
    print_table(table, runs);
    write_atomic((d / "summary.txt").string(), table.str());
    write_atomic((d / "timing.csv").string(), timing.str());
    for (const auto& run : runs)
        for (const auto& s : run.series) write_atomic((d / "plots" / (file_stem(s.name) + ".csv")).string(), csv_series(s));
}

void print_table(std::ostream& os, const std::vector<ScenarioRun>& runs)
{
    auto cell = [](double v) {
        std::ostringstream s;
        s << std::setprecision(6) << v;
        return s.str();
    };
    os << std::left << std::setw(22) << "scenario" << std::setw(16) << "score" << std::setw(14) << "functional"
       << std::setw(6) << "pair" << std::right << std::setw(14) << "analytic" << std::setw(14) << "oracle"
       << std::setw(12) << "rel_err" << std::setw(10) << "tol" << "  verdict\n";
    for (const auto& run : runs)
        for (const auto& r : run.rows) {
            os << std::left << std::setw(22) << r.scenario << std::setw(16) << r.score << std::setw(14) << r.functional
               << std::setw(6) << r.pairing << std::right;
            if (r.status == "unsupported") {
                os << std::setw(14) << "-" << std::setw(14) << "-" << std::setw(12) << "-" << std::setw(10) << "-"
                   << "  " << r.status << "\n";
                continue;
            }
            if (r.status == "oracle_only") {
                os << std::setw(14) << "-" << std::setw(14) << (r.oracle_mode == "off" ? "-" : cell(r.oracle))
                   << std::setw(12) << "-" << std::setw(10) << "-" << "  " << r.status << "\n";
                continue;
            }
            os << std::setw(14) << cell(r.analytic);
            if (r.oracle_mode == "off") {
                os << std::setw(14) << "-" << std::setw(12) << "-";
            } else {
                os << std::setw(14) << cell(r.oracle) << std::setw(12) << cell(r.rel_err);
            }
            os << std::setw(10) << cell(r.tol_rel) << "  " << r.verdict << "\n";
        }
}

} // namespace mpelab::lab
