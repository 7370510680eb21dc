#include "mpelab/clearing/ttc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mpelab/errors.hpp"
#include "mpelab/mechanism/catalog_mechanisms.hpp"
#include "mpelab/numerics/rng.hpp"

namespace mpelab::clearing {

using mechanism::TTCParametric;

namespace {

// Cutoffs when school 1 fills first: (c11, c12, c21, c22).
TTCCutoffs school_one_first(double pi1, double q1, double q2, const std::string& path)
{
    const double pi2 = 1.0 - pi1;
    const double slope = pi2 / pi1;
    auto gamma2 = [&](double t) {
        if (path == "linear") return std::max(0.0, 1.0 - slope * t);
        return std::pow(1.0 - t, slope);
    };
    // For the linear path gamma_2 reaches zero at t = pi1 / pi2 when pi2 > pi1.
    const double t_max = path == "linear" ? std::min(1.0, pi1 / pi2) : 1.0;
    auto fill = [&](double t) { return pi1 * (1.0 - (1.0 - t) * gamma2(t)) - q1; };
    numerics::SolverOptions opts;
    opts.tol = 1e-15;
    const double t1 = numerics::solve_bracketed(fill, {}, 0.0, t_max, opts).x;

    TTCCutoffs out;
    out.path = path;
    out.stop_time = t1;
    out.c = Vec::Zero(4);
    const double c11 = 1.0 - t1, c21 = gamma2(t1);
    out.c[TTCParametric::index(1, 1)] = c11;
    out.c[TTCParametric::index(1, 2)] = c11;
    out.c[TTCParametric::index(2, 1)] = c21;
    // Round two: everyone left (V1 < c11, V2 < c21) now points at school 2 and is admitted by V2.
    const double left = q2 - pi2 * (1.0 - c11 * c21);
    double c22 = c11 > 0.0 ? c21 - left / c11 : 0.0;
    if (c22 < 0.0) {
        c22 = 0.0;
        out.flag = true;
    }
    out.c[TTCParametric::index(2, 2)] = c22;
    return out;
}

} // namespace

TTCCutoffs ttc_parametric_cutoffs(double pi1, double q1, double q2, const std::string& path)
{
    if (!(pi1 > 0.0 && pi1 < 1.0)) throw ConfigError("ttc: the preference share pi1 must lie in (0, 1)");
    if (!(q1 > 0.0 && q2 > 0.0)) throw ConfigError("ttc: capacities must be positive");
    if (path != "linear" && path != "trade_balance") throw ConfigError("ttc: unknown path '" + path + "'");
    const double pi2 = 1.0 - pi1;
    if (q1 / pi1 >= 1.0 && q2 / pi2 >= 1.0) {
        TTCCutoffs out;
        out.path = path;
        out.c = Vec::Zero(4);
        out.flag = true;
        return out;
    }
    if (q1 / pi1 <= q2 / pi2) return school_one_first(pi1, q1, q2, path);

    TTCCutoffs sw = school_one_first(pi2, q2, q1, path);
    TTCCutoffs out = sw;
    out.relabelled = true;
    for (int b = 1; b <= 2; ++b)
        for (int a = 1; a <= 2; ++a) out.c[TTCParametric::index(b, a)] = sw.c[TTCParametric::index(3 - b, 3 - a)];
    return out;
}

Vec simulate_ttc_cutoffs(double pi1, double q1, double q2, std::size_t n, std::uint64_t seed)
{
    if (n == 0) throw ConfigError("ttc simulation needs at least one agent");
    std::vector<double> v1(n), v2(n);
    std::vector<int> pref(n);
    for (std::size_t i = 0; i < n; ++i) {
        numerics::CounterRng rng(seed, numerics::stream_id(i, numerics::Purpose::auxiliary));
        pref[i] = rng.uniform() < pi1 ? 1 : 2;
        v1[i] = rng.uniform();
        v2[i] = rng.uniform();
    }
    std::vector<std::size_t> o1(n), o2(n);
    std::iota(o1.begin(), o1.end(), 0);
    std::iota(o2.begin(), o2.end(), 0);
    std::sort(o1.begin(), o1.end(), [&](std::size_t a, std::size_t b) { return v1[a] > v1[b]; });
    std::sort(o2.begin(), o2.end(), [&](std::size_t a, std::size_t b) { return v2[a] > v2[b]; });

    const std::array<std::size_t, 3> seats{0, static_cast<std::size_t>(q1 * static_cast<double>(n)),
                                           static_cast<std::size_t>(q2 * static_cast<double>(n))};
    std::array<std::size_t, 3> filled{0, 0, 0};
    std::vector<char> done(n, 0);
    std::size_t p1 = 0, p2 = 0;
    Vec c = Vec::Zero(4);
    auto open = [&](int s) { return filled[static_cast<std::size_t>(s)] < seats[static_cast<std::size_t>(s)]; };
    auto give = [&](std::size_t i, int s) {
        done[i] = 1;
        ++filled[static_cast<std::size_t>(s)];
    };
    while (open(1) || open(2)) {
        while (p1 < n && done[o1[p1]]) ++p1;
        while (p2 < n && done[o2[p2]]) ++p2;
        if (p1 == n || p2 == n) break;
        const std::size_t i = o1[p1], j = o2[p2];
        if (open(1) && open(2)) {
            if (pref[i] == 1) give(i, 1);
            else if (pref[j] == 2) give(j, 2);
            else {
                give(i, 2);
                give(j, 1);
            }
            for (int s = 1; s <= 2; ++s) {
                if (open(s)) continue;
                // School s just filled while both were open.
                const double own = s == 1 ? v1[i] : v2[j];
                const double other = s == 1 ? v2[j] : v1[i];
                c[TTCParametric::index(s, s)] = own;
                c[TTCParametric::index(s, 3 - s)] = own;
                c[TTCParametric::index(3 - s, s)] = other;
                break;
            }
        } else {
            const int s = open(1) ? 1 : 2;
            const std::size_t k = s == 1 ? i : j;
            give(k, s);
            if (!open(s)) c[TTCParametric::index(s, s)] = s == 1 ? v1[k] : v2[k];
        }
    }
    return c;
}

EquilibriumState solve_ttc_path(const Mechanism& mech, const ReportDistribution& d, const Vec& q, const std::string& path)
{
    if (mech.id() != "ttc_parametric") throw ConfigError("the ttc_path conduct rule needs the ttc_parametric mechanism");
    if (q.size() != 2) throw ConfigError("ttc_path needs two capacities");
    mech.check_space(d.space());
    for (int j = 0; j < 2; ++j)
        for (double x : {0.1, 0.5, 0.9})
            if (std::abs(d.marginal_pdf(j, x) - 1.0) > 1e-10)
                throw ConfigError("ttc_path assumes uniform priorities on [0, 1]");
    const TTCCutoffs cut = ttc_parametric_cutoffs(d.type_mass(0), q[0], q[1], path);
    EquilibriumState st;
    st.rule = "ttc_path";
    st.c = cut.c;
    st.q = q;
    st.stop_time = cut.stop_time;
    st.capacity_flag = cut.flag;
    if (cut.flag) st.warnings.push_back("ttc_path: a school never fills; its cutoff was set to 0");
    const Vec s = aggregate_shares_at(mech, d, st.c);
    st.residual = 0.0;
    for (int b = 0; b < 2; ++b)
        if (!cut.flag || st.c[TTCParametric::index(b + 1, b + 1)] > 0.0) st.residual = std::max(st.residual, std::abs(s[b] - q[b]));
    st.condition = std::numeric_limits<double>::quiet_NaN();
    return st;
}

} // namespace mpelab::clearing
