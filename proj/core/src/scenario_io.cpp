#include "mpelab/lab/scenario_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "mpelab/errors.hpp"
#include "mpelab/mechanism/mechanism.hpp"
#include "mpelab/welfare/functionals.hpp"

namespace mpelab::lab {

using nlohmann::json;
using namespace population;

namespace {

// A JSON object with its dotted path; every key must be consumed or listed as allowed.
class Node {
public:
    Node(const json& j, std::string path, std::string source) : j_(j), path_(std::move(path)), source_(std::move(source))
    {
        if (!j_.is_object()) fail("expected an object");
    }

    [[noreturn]] void fail(const std::string& msg) const
    {
        throw ConfigError(source_ + ": field '" + (path_.empty() ? "<root>" : path_) + "': " + msg);
    }

    void allow(std::initializer_list<const char*> keys) const
    {
        const std::set<std::string> ok(keys.begin(), keys.end());
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!ok.count(it.key())) child_fail(it.key(), "unknown key");
    }

    bool has(const char* key) const { return j_.contains(key); }

    Node obj(const char* key) const
    {
        if (!has(key)) child_fail(key, "missing");
        return Node(j_.at(key), join(key), source_);
    }

    std::vector<Node> objects(const char* key) const
    {
        std::vector<Node> out;
        if (!has(key)) return out;
        const auto& a = j_.at(key);
        if (!a.is_array()) child_fail(key, "expected an array");
        for (std::size_t i = 0; i < a.size(); ++i)
            out.emplace_back(a[i], join(key) + "[" + std::to_string(i) + "]", source_);
        return out;
    }

    std::string str(const char* key, const std::string* fallback = nullptr) const
    {
        if (!has(key)) {
            if (fallback) return *fallback;
            child_fail(key, "missing");
        }
        const auto& v = j_.at(key);
        if (!v.is_string()) child_fail(key, "expected a string");
        return v.get<std::string>();
    }
    std::string str_or(const char* key, std::string fallback) const { return str(key, &fallback); }

    double num(const char* key, const double* fallback = nullptr) const
    {
        if (!has(key)) {
            if (fallback) return *fallback;
            child_fail(key, "missing");
        }
        const auto& v = j_.at(key);
        if (!v.is_number()) child_fail(key, "expected a number");
        return v.get<double>();
    }
    double num_or(const char* key, double fallback) const { return num(key, &fallback); }

    long long integer_or(const char* key, long long fallback) const
    {
        if (!has(key)) return fallback;
        const auto& v = j_.at(key);
        if (!v.is_number_integer()) child_fail(key, "expected an integer");
        return v.get<long long>();
    }

    std::vector<double> nums(const char* key) const
    {
        std::vector<double> out;
        if (!has(key)) return out;
        const auto& a = j_.at(key);
        if (!a.is_array()) child_fail(key, "expected an array of numbers");
        for (const auto& v : a) {
            if (!v.is_number()) child_fail(key, "expected an array of numbers");
            out.push_back(v.get<double>());
        }
        return out;
    }

    std::vector<std::string> strs(const char* key) const
    {
        std::vector<std::string> out;
        if (!has(key)) return out;
        const auto& a = j_.at(key);
        if (!a.is_array()) child_fail(key, "expected an array of strings");
        for (const auto& v : a) {
            if (!v.is_string()) child_fail(key, "expected an array of strings");
            out.push_back(v.get<std::string>());
        }
        return out;
    }

    Polynomial poly(const char* key) const
    {
        const auto text = str(key);
        try {
            return parse_polynomial(text);
        } catch (const ConfigError& e) {
            child_fail(key, e.what());
        }
    }

    std::vector<Polynomial> polys(const char* key) const
    {
        std::vector<Polynomial> out;
        for (const auto& s : strs(key)) {
            try {
                out.push_back(parse_polynomial(s));
            } catch (const ConfigError& e) {
                child_fail(key, e.what());
            }
        }
        return out;
    }

private:
    std::string join(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
    [[noreturn]] void child_fail(const std::string& key, const std::string& msg) const
    {
        throw ConfigError(source_ + ": field '" + join(key) + "': " + msg);
    }

    const json& j_;
    std::string path_;
    std::string source_;
};

// Library errors raised while building a sub-object are re-labelled with its path.
template <class F>
auto at_field(const Node& n, F&& f) -> decltype(f())
{
    try {
        return f();
    } catch (const ConfigError& e) {
        const std::string what = e.what();
        if (what.find(": field '") != std::string::npos) throw;
        n.fail(what);
    }
}

PolicyLaw parse_policy_law(const Node& n)
{
    const auto family = n.str("family");
    return at_field(n, [&] {
        if (family == "bernoulli") {
            n.allow({"family", "p"});
            return PolicyLaw::bernoulli(n.num("p"));
        }
        if (family == "discrete") {
            n.allow({"family", "support", "probs"});
            return PolicyLaw::discrete(n.nums("support"), n.nums("probs"));
        }
        if (family == "truncated_normal") {
            n.allow({"family", "mean", "sd", "lo", "hi"});
            return PolicyLaw::truncated_normal(n.num("mean"), n.num("sd"), n.num("lo"), n.num("hi"));
        }
        if (family == "covariate") {
            n.allow({"family", "x_support", "x_probs", "x_lo", "x_hi", "propensity"});
            return PolicyLaw::covariate(n.nums("x_support"), n.nums("x_probs"), n.num_or("x_lo", 0.0),
                                        n.num_or("x_hi", 1.0), n.poly("propensity"));
        }
        if (family == "instrument") {
            n.allow({"family", "z_prob", "p0", "p1"});
            return PolicyLaw::instrument(n.num("z_prob"), n.num("p0"), n.num("p1"));
        }
        n.fail("unknown policy law family '" + family + "'");
    });
}

CoordinateSpec parse_coordinate(const Node& n)
{
    CoordinateSpec c;
    const auto family = n.str_or("family", "uniform");
    if (family == "uniform") {
        n.allow({"family"});
    } else if (family == "legendre") {
        n.allow({"family", "coef"});
        c.family = CoordinateSpec::Family::legendre;
        c.legendre_coef = n.polys("coef");
        if (c.legendre_coef.empty()) n.fail("legendre coordinate needs coef");
    } else if (family == "truncated_normal") {
        n.allow({"family", "mean", "sd"});
        c.family = CoordinateSpec::Family::truncated_normal;
        c.location = n.poly("mean");
        c.scale = n.num("sd");
    } else if (family == "location_shift") {
        n.allow({"family", "shift", "half_width", "kernel"});
        c.family = CoordinateSpec::Family::location_shift;
        c.location = n.poly("shift");
        c.scale = n.num("half_width");
        c.kernel = at_field(n, [&] { return parse_kernel(n.str_or("kernel", "biweight")); });
    } else {
        n.fail("unknown coordinate family '" + family + "'");
    }
    return c;
}

ReportLaw parse_report_law(const Node& n, const Node* bounds)
{
    n.allow({"types", "continuous", "type_probs", "coordinates"});
    ReportSpace sp;
    sp.type_labels = n.strs("types");
    sp.n_types = sp.type_labels.empty() ? 1 : static_cast<int>(sp.type_labels.size());
    const auto coord_nodes = n.objects("coordinates");
    sp.n_cont = static_cast<int>(n.integer_or("continuous", static_cast<long long>(coord_nodes.size())));
    if (sp.n_cont < 0 || sp.n_cont > 2) n.fail("continuous must be 0, 1 or 2");
    if (bounds) {
        bounds->allow({"lo", "hi"});
        const auto lo = bounds->nums("lo"), hi = bounds->nums("hi");
        if (static_cast<int>(lo.size()) != sp.n_cont || static_cast<int>(hi.size()) != sp.n_cont)
            bounds->fail("one lo/hi entry per continuous report coordinate");
        for (int j = 0; j < sp.n_cont; ++j) {
            sp.lo[static_cast<std::size_t>(j)] = lo[static_cast<std::size_t>(j)];
            sp.hi[static_cast<std::size_t>(j)] = hi[static_cast<std::size_t>(j)];
        }
    }
    std::vector<CoordinateSpec> coords;
    for (const auto& c : coord_nodes) coords.push_back(parse_coordinate(c));
    while (static_cast<int>(coords.size()) < sp.n_cont) coords.emplace_back();
    if (static_cast<int>(coords.size()) != sp.n_cont) n.fail("more coordinates than continuous report dimensions");
    return at_field(n, [&] { return ReportLaw(sp, n.polys("type_probs"), coords); });
}

NoiseLaw parse_noise(const Node& n)
{
    const auto family = n.str("family");
    if (family == "normal") {
        n.allow({"family", "sd"});
        return at_field(n, [&] { return NoiseLaw::normal(n.num("sd")); });
    }
    if (family == "uniform") {
        n.allow({"family", "half_width"});
        return at_field(n, [&] { return NoiseLaw::uniform(n.num("half_width")); });
    }
    if (family == "none") {
        n.allow({"family"});
        return NoiseLaw{};
    }
    n.fail("unknown noise family '" + family + "'");
}

ScoreSpec parse_score(const Node& n)
{
    n.allow({"id", "kind", "variable", "coef", "freq", "phase", "direction", "description"});
    ScoreSpec s;
    s.id = n.str("id");
    s.kind = n.str("kind");
    s.variable = n.str_or("variable", "w");
    s.coef = n.nums("coef");
    s.freq = n.num_or("freq", 1.0);
    s.phase = n.num_or("phase", 0.0);
    if (n.has("direction")) s.direction = n.poly("direction");
    s.description = n.str_or("description", "");
    return s;
}

ReportScoreSpec parse_report_score(const Node& n)
{
    n.allow({"id", "kind", "expr", "coord", "freq", "phase"});
    ReportScoreSpec s;
    s.id = n.str("id");
    s.kind = n.str_or("kind", "polynomial");
    if (s.kind == "polynomial") {
        s.expr = n.poly("expr");
    } else if (s.kind == "cosine") {
        s.coord = static_cast<int>(n.integer_or("coord", 0));
        s.freq = n.num_or("freq", 1.0);
        s.phase = n.num_or("phase", 0.0);
    } else {
        n.fail("unknown report score kind '" + s.kind + "'");
    }
    return s;
}

// The mechanism must exist, accept the report space, and match the conduct rule's dimensions.
void check_market(const ScenarioSpec& s, const Node& mech, const Node& conduct)
{
    const auto m = at_field(mech, [&] {
        auto p = mechanism::make_mechanism(s.mechanism);
        p->check_space(s.report_law.space());
        return p;
    });
    const auto& rule = s.conduct.id;
    const auto dim = static_cast<std::size_t>(m->clearing_dim());
    if (rule == "capacity") {
        if (s.conduct.q.size() != dim)
            conduct.fail("q: " + m->id() + " needs " + std::to_string(dim) + " capacity target(s)");
    } else if (rule == "myerson") {
        if (m->id() != "second_price_auction") conduct.fail("myerson needs the second_price_auction mechanism");
        if (!s.conduct.q.empty()) conduct.fail("q: myerson takes no capacity targets");
    } else if (rule == "ttc_path") {
        if (m->id() != "ttc_parametric") conduct.fail("ttc_path needs the ttc_parametric mechanism");
        if (s.conduct.q.size() != 2) conduct.fail("q: ttc_path needs two school capacities");
    } else {
        conduct.fail("id: unknown conduct rule '" + rule + "' (capacity, myerson, ttc_path)");
    }
    for (double q : s.conduct.q)
        if (!(q > 0.0 && q < 1.0)) conduct.fail("q: capacity targets must lie in (0, 1)");
}

ScenarioSpec parse_one(const Node& n)
{
    n.allow({"id", "description", "section", "policy_law", "report_law", "outcome_law", "mechanism", "conduct_rule",
             "bounds", "seeds", "solver", "scores", "report_scores", "functionals", "mc_samples"});
    ScenarioSpec s;
    s.id = n.str("id");
    s.description = n.str_or("description", "");
    s.section = n.str_or("section", "user");
    s.policy_law = parse_policy_law(n.obj("policy_law"));
    if (n.has("bounds")) {
        const auto b = n.obj("bounds");
        s.report_law = parse_report_law(n.obj("report_law"), &b);
    } else {
        s.report_law = parse_report_law(n.obj("report_law"), nullptr);
    }

    const auto ol = n.obj("outcome_law");
    ol.allow({"means", "noise"});
    auto means = ol.polys("means");
    if (means.empty()) ol.fail("means: one conditional mean per allocation required");
    s.outcome_law = OutcomeLaw(std::move(means), ol.has("noise") ? parse_noise(ol.obj("noise")) : NoiseLaw{});

    const auto mech = n.obj("mechanism");
    mech.allow({"id", "params"});
    s.mechanism.id = mech.str("id");
    if (mech.has("params")) {
        const auto p = mech.obj("params");
        p.allow({"participants"});
        s.mechanism.participants = static_cast<int>(p.integer_or("participants", 2));
    }

    const auto cr = n.obj("conduct_rule");
    cr.allow({"id", "q", "path"});
    s.conduct.id = cr.str("id");
    s.conduct.q = cr.nums("q");
    s.conduct.path = cr.str_or("path", "linear");
    check_market(s, mech, cr);

    if (n.has("seeds")) {
        const auto sd = n.obj("seeds");
        sd.allow({"sample", "assign", "oracle"});
        s.seeds.sample = static_cast<std::uint64_t>(sd.integer_or("sample", 1));
        s.seeds.assign = static_cast<std::uint64_t>(sd.integer_or("assign", 2));
        s.seeds.oracle = static_cast<std::uint64_t>(sd.integer_or("oracle", 3));
    }
    if (n.has("solver")) {
        const auto sv = n.obj("solver");
        sv.allow({"max_iter", "tol", "grid_nodes"});
        s.solver.max_iter = static_cast<int>(sv.integer_or("max_iter", 200));
        s.solver.tol = sv.num_or("tol", 1e-10);
        s.solver.grid_nodes = static_cast<int>(sv.integer_or("grid_nodes", 4096));
    }
    for (const auto& sc : n.objects("scores")) s.scores.push_back(parse_score(sc));
    for (const auto& sc : n.objects("report_scores")) s.report_scores.push_back(parse_report_score(sc));
    if (n.has("functionals")) s.functionals = n.strs("functionals");
    at_field(n, [&] {
        for (const auto& f : s.functionals) welfare::parse_functional(f);
        for (const auto& sc : s.scores) make_policy_score(sc, s.policy_law, 64);
        return 0;
    });
    s.mc_samples = static_cast<std::size_t>(n.integer_or("mc_samples", 100000));
    at_field(n, [&] {
        validate_scenario(s);
        return 0;
    });
    return s;
}

std::string line_col(const std::string& text, std::size_t byte)
{
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return std::to_string(line) + ":" + std::to_string(col);
}

json polys_json(const std::vector<Polynomial>& ps)
{
    json a = json::array();
    for (const auto& p : ps) a.push_back(p.str());
    return a;
}

json policy_json(const PolicyLaw& law)
{
    json j;
    j["family"] = law.family_name();
    switch (law.family()) {
    case PolicyLaw::Family::bernoulli: j["p"] = law.probs()[1]; break;
    case PolicyLaw::Family::discrete:
        j["support"] = law.support();
        j["probs"] = law.probs();
        break;
    case PolicyLaw::Family::truncated_normal:
        j["mean"] = law.normal()->mean();
        j["sd"] = law.normal()->sd();
        j["lo"] = law.normal()->lo();
        j["hi"] = law.normal()->hi();
        break;
    case PolicyLaw::Family::covariate:
        if (law.x_discrete()) {
            j["x_support"] = law.x_support();
            j["x_probs"] = law.x_probs();
        } else {
            j["x_lo"] = law.x_lo();
            j["x_hi"] = law.x_hi();
        }
        j["propensity"] = law.propensity_polynomial().str();
        break;
    case PolicyLaw::Family::instrument:
        j["z_prob"] = law.instrument_prob();
        j["p0"] = law.p_at(0);
        j["p1"] = law.p_at(1);
        break;
    }
    return j;
}

json coordinate_json(const CoordinateSpec& c)
{
    json j;
    switch (c.family) {
    case CoordinateSpec::Family::uniform: j["family"] = "uniform"; break;
    case CoordinateSpec::Family::legendre:
        j["family"] = "legendre";
        j["coef"] = polys_json(c.legendre_coef);
        break;
    case CoordinateSpec::Family::truncated_normal:
        j["family"] = "truncated_normal";
        j["mean"] = c.location.str();
        j["sd"] = c.scale;
        break;
    case CoordinateSpec::Family::location_shift:
        j["family"] = "location_shift";
        j["shift"] = c.location.str();
        j["half_width"] = c.scale;
        j["kernel"] = kernel_name(c.kernel);
        break;
    }
    return j;
}

json noise_json(const NoiseLaw& n)
{
    json j;
    switch (n.family()) {
    case NoiseLaw::Family::none: j["family"] = "none"; break;
    case NoiseLaw::Family::normal:
        j["family"] = "normal";
        j["sd"] = n.scale();
        break;
    case NoiseLaw::Family::uniform:
        j["family"] = "uniform";
        j["half_width"] = n.scale();
        break;
    }
    return j;
}

} // namespace

std::vector<ScenarioSpec> parse_scenarios(const std::string& text, const std::string& source)
{
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        std::string msg = e.what();
        const auto p = msg.find("; last read");
        throw ConfigError(source + ":" + line_col(text, e.byte == 0 ? 0 : e.byte - 1) + ": JSON syntax error" +
                          (p == std::string::npos ? std::string() : msg.substr(p)));
    }
    std::vector<ScenarioSpec> out;
    if (root.is_array()) {
        for (std::size_t i = 0; i < root.size(); ++i)
            out.push_back(parse_one(Node(root[i], "[" + std::to_string(i) + "]", source)));
    } else {
        out.push_back(parse_one(Node(root, "", source)));
    }
    return out;
}

std::vector<ScenarioSpec> load_scenario_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open scenario file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_scenarios(ss.str(), path);
}

std::string scenario_to_json(const ScenarioSpec& s)
{
    json j;
    j["id"] = s.id;
    j["description"] = s.description;
    j["section"] = s.section;
    j["policy_law"] = policy_json(s.policy_law);

    const auto& sp = s.report_law.space();
    json rl;
    if (sp.n_types > 1) {
        json labels = json::array();
        for (int t = 0; t < sp.n_types; ++t)
            labels.push_back(t < static_cast<int>(sp.type_labels.size()) ? sp.type_labels[static_cast<std::size_t>(t)]
                                                                         : "type" + std::to_string(t));
        rl["types"] = labels;
        rl["type_probs"] = polys_json(s.report_law.type_probabilities());
    }
    rl["continuous"] = sp.n_cont;
    json coords = json::array();
    for (const auto& c : s.report_law.coordinates()) coords.push_back(coordinate_json(c));
    rl["coordinates"] = coords;
    j["report_law"] = rl;
    if (sp.n_cont > 0) {
        json lo = json::array(), hi = json::array();
        for (int k = 0; k < sp.n_cont; ++k) {
            lo.push_back(sp.lo[static_cast<std::size_t>(k)]);
            hi.push_back(sp.hi[static_cast<std::size_t>(k)]);
        }
        j["bounds"] = {{"lo", lo}, {"hi", hi}};
    }

    json means = json::array();
    for (int a = 0; a < s.outcome_law.allocations(); ++a) means.push_back(s.outcome_law.mean_polynomial(a).str());
    j["outcome_law"] = {{"means", means}, {"noise", noise_json(s.outcome_law.noise())}};
    j["mechanism"] = {{"id", s.mechanism.id}, {"params", {{"participants", s.mechanism.participants}}}};
    j["conduct_rule"] = {{"id", s.conduct.id}, {"q", s.conduct.q}, {"path", s.conduct.path}};
    j["seeds"] = {{"sample", s.seeds.sample}, {"assign", s.seeds.assign}, {"oracle", s.seeds.oracle}};
    j["solver"] = {{"max_iter", s.solver.max_iter}, {"tol", s.solver.tol}, {"grid_nodes", s.solver.grid_nodes}};

    json scores = json::array();
    for (const auto& sc : s.scores) {
        json o{{"id", sc.id}, {"kind", sc.kind}, {"variable", sc.variable}};
        if (!sc.coef.empty()) o["coef"] = sc.coef;
        if (sc.kind == "cosine") {
            o["freq"] = sc.freq;
            o["phase"] = sc.phase;
        }
        if (!sc.direction.empty()) o["direction"] = sc.direction.str();
        if (!sc.description.empty()) o["description"] = sc.description;
        scores.push_back(o);
    }
    j["scores"] = scores;
    json rscores = json::array();
    for (const auto& sc : s.report_scores) {
        json o{{"id", sc.id}, {"kind", sc.kind}};
        if (sc.kind == "polynomial") {
            o["expr"] = sc.expr.str();
        } else {
            o["coord"] = sc.coord;
            o["freq"] = sc.freq;
            o["phase"] = sc.phase;
        }
        rscores.push_back(o);
    }
    j["report_scores"] = rscores;
    j["functionals"] = s.functionals;
    j["mc_samples"] = s.mc_samples;
    return j.dump(2) + "\n";
}

} // namespace mpelab::lab
