#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

namespace fs = std::filesystem;

namespace {

struct Run {
    int status = -1;
    std::string out, err;
};

std::string slurp(const fs::path& p)
{
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name)
{
    const fs::path p = fs::path(testing::TempDir()) / ("mpe_lab_cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

Run run(const std::string& args, const fs::path& dir, const std::string& env = "")
{
    const auto out = dir / "stdout.txt", err = dir / "stderr.txt";
    const std::string cmd = env + " '" + std::string(MPE_LAB_BIN) + "' " + args + " > '" + out.string() + "' 2> '" +
                            err.string() + "'";
    const int raw = std::system(cmd.c_str());
    Run r;
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

std::vector<std::vector<double>> read_csv(const fs::path& p, std::string* header = nullptr)
{
    std::ifstream f(p);
    std::string line;
    std::getline(f, line);
    if (header) *header = line;
    std::vector<std::vector<double>> rows;
    while (std::getline(f, line)) {
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        rows.push_back(row);
    }
    return rows;
}

std::size_t data_rows(const fs::path& csv)
{
    std::ifstream f(csv);
    std::string line;
    std::size_t n = 0;
    while (std::getline(f, line)) ++n;
    return n - 1;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

const char* kInfeasible = R"({"id": "over_capacity", "policy_law": {"family": "bernoulli", "p": 0.5},
  "report_law": {"types": ["no", "yes"], "type_probs": ["0.2"]},
  "outcome_law": {"means": ["0", "1"], "noise": {"family": "none"}},
  "mechanism": {"id": "random_rationing"}, "conduct_rule": {"id": "capacity", "q": [0.9]},
  "scores": [{"id": "shift", "kind": "binary_shift"}]})";

} // namespace

TEST(Cli, SingleRowGoldenRun)
{
    const auto dir = scratch("single");
    const auto r = run("run --scenario price_cutoff --score binary_shift --out '" + (dir / "o").string() + "'", dir);
    EXPECT_EQ(r.status, 0) << r.err;
    EXPECT_EQ(data_rows(dir / "o" / "summary.csv"), 1u);
    EXPECT_NE(r.out.find("price_cutoff"), std::string::npos);
    EXPECT_TRUE(fs::exists(dir / "o" / "records.json"));
    EXPECT_TRUE(fs::exists(dir / "o" / "summary.txt"));
}

TEST(Cli, ConfigurationErrorsExitTwo)
{
    const auto dir = scratch("config");
    write(dir / "bad.json", std::string(kInfeasible).replace(std::string(kInfeasible).find("random_rationing"), 16, "lottery_deluxe"));
    auto r = run("--scenario-file '" + (dir / "bad.json").string() + "' --all", dir);
    EXPECT_EQ(r.status, 2);
    EXPECT_NE(r.err.find("field 'mechanism'"), std::string::npos) << r.err;

    write(dir / "syntax.json", "{\n  \"id\": \"x\",\n  \"mechanism\" {}\n}");
    r = run("--scenario-file '" + (dir / "syntax.json").string() + "' --all", dir);
    EXPECT_EQ(r.status, 2);
    EXPECT_NE(r.err.find("syntax.json:3:"), std::string::npos) << r.err;

    EXPECT_EQ(run("--scenario nope", dir).status, 2);
    EXPECT_EQ(run("--bogus-flag", dir).status, 2);
    EXPECT_EQ(run("--scenario rationing --score nope", dir).status, 2);
    EXPECT_EQ(run("--scenario rationing --oracle sometimes", dir).status, 2);
}

TEST(Cli, SolverFailureExitsThreeNamingScenario)
{
    const auto dir = scratch("solver");
    write(dir / "over.json", kInfeasible);
    const auto r = run("--scenario-file '" + (dir / "over.json").string() + "' --scenario over_capacity --out '" +
                           (dir / "o").string() + "'",
                       dir);
    EXPECT_EQ(r.status, 3);
    EXPECT_NE(r.err.find("over_capacity"), std::string::npos) << r.err;
}

TEST(Cli, CorruptedTauFailsTheGate)
{
    const auto dir = scratch("corrupt");
    const std::string base = "--scenario price_cutoff --quiet --out '" + (dir / "o").string() + "'";
    EXPECT_EQ(run(base, dir).status, 0);
    EXPECT_EQ(run(base + " --corrupt-tau 0.05", dir).status, 1);
}

TEST(Cli, ListingIncludesUserScenarios)
{
    const auto dir = scratch("list");
    auto r = run("--list", dir);
    EXPECT_EQ(r.status, 0);
    for (const char* id : {"rationing", "price_cutoff", "auction_fixed_q", "auction_myerson", "two_school", "ttc_parametric"})
        EXPECT_NE(r.out.find(std::string(id) + "  ["), std::string::npos) << id;
    EXPECT_EQ(r.out.find("over_capacity"), std::string::npos);
    write(dir / "over.json", kInfeasible);
    r = run("--list --scenario-file '" + (dir / "over.json").string() + "'", dir);
    EXPECT_NE(r.out.find("over_capacity  [user]"), std::string::npos);
}

TEST(Cli, DeterministicAcrossRunsAndWorkers)
{
    const auto dir = scratch("determinism");
    const std::string args = "--scenario rationing --scenario price_cutoff --scenario iv_mte --oracle mc --plots --quiet";
    ASSERT_EQ(run(args + " --out '" + (dir / "a").string() + "'", dir, "MPE_LAB_THREADS=1").status, 0);
    ASSERT_EQ(run(args + " --out '" + (dir / "b").string() + "'", dir, "MPE_LAB_THREADS=3").status, 0);
    std::size_t compared = 0;
    for (const auto& e : fs::recursive_directory_iterator(dir / "a")) {
        if (!e.is_regular_file() || e.path().filename() == "timing.csv") continue;
        const auto other = dir / "b" / fs::relative(e.path(), dir / "a");
        EXPECT_EQ(slurp(e.path()), slurp(other)) << e.path();
        ++compared;
    }
    EXPECT_GT(compared, 5u);
}

TEST(Cli, OracleOffSkipsVerdicts)
{
    const auto dir = scratch("off");
    const auto r = run("--scenario two_school --oracle off --out '" + (dir / "o").string() + "'", dir);
    EXPECT_EQ(r.status, 0);
    EXPECT_NE(slurp(dir / "o" / "summary.csv").find(",n/a"), std::string::npos);
}

TEST(Cli, PlotSeries)
{
    const auto dir = scratch("series");
    const auto files = std::string(MPELAB_SCENARIO_DIR) + "/null_auction.json";
    const auto r = run("--scenario-file '" + files + "' --scenario null_auction --scenario auction_myerson --scenario iv_mte "
                       "--plots --quiet --out '" + (dir / "o").string() + "'",
                       dir);
    ASSERT_EQ(r.status, 0) << r.err;
    const auto plots = dir / "o" / "plots";

    const auto u = read_csv(plots / "u_theta__null_auction__shift__mean.csv");
    ASSERT_GT(u.size(), 3u);
    for (const auto& row : u) EXPECT_NEAR(row[1], u[0][1], 1e-12);

    std::string header;
    const auto psi = read_csv(plots / "psi__auction_myerson.csv", &header);
    EXPECT_EQ(header, "r,psi,dpsi");
    double jump = 0;
    for (std::size_t i = 0; i < psi.size(); ++i) {
        for (double v : psi[i]) EXPECT_TRUE(std::isfinite(v));
        if (i > 0) jump = std::max(jump, std::abs(psi[i][2] - psi[i - 1][2]));
    }
    EXPECT_GT(jump, 0.1);

    for (const auto& row : read_csv(plots / "mte__iv_mte.csv")) EXPECT_NEAR(row[1], 1 + row[0], 1e-8);
}
