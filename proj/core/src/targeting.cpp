#include "mpelab/welfare/targeting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "mpelab/errors.hpp"
#include "mpelab/numerics/rng.hpp"

namespace mpelab::welfare {

using population::PolicyLaw;

double Direction::operator()(double xv) const
{
    if (x.empty()) return 0.0;
    if (xv <= x.front()) return h.front();
    if (xv >= x.back()) return h.back();
    const auto it = std::upper_bound(x.begin(), x.end(), xv);
    const auto i = static_cast<std::size_t>(it - x.begin());
    const double t = (xv - x[i - 1]) / (x[i] - x[i - 1]);
    return (1.0 - t) * h[i - 1] + t * h[i];
}

double CateProfile::norm() const
{
    double s = 0.0;
    for (std::size_t i = 0; i < cate.size(); ++i) s += mass[i] * cate[i] * cate[i];
    return std::sqrt(s);
}

namespace {

void require_covariates(const PolicyLaw& law)
{
    if (law.family() != PolicyLaw::Family::covariate)
        throw ConfigError("targeting needs a covariate policy law (W | X Bernoulli)");
}

double legendre(int k, double u)
{
    double p0 = 1.0, p1 = u;
    if (k == 0) return p0;
    for (int n = 1; n < k; ++n) {
        const double p2 = ((2.0 * n + 1.0) * u * p1 - n * p0) / (n + 1.0);
        p0 = p1;
        p1 = p2;
    }
    return p1;
}

Direction scaled_direction(std::string id, const std::vector<double>& x, std::vector<double> h,
                           const std::vector<double>& mass, double cap)
{
    double n2 = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) n2 += mass[i] * h[i] * h[i];
    if (!(n2 > 0.0)) throw DomainError("direction '" + id + "' has zero norm");
    const double k = std::sqrt(cap / n2);
    for (double& v : h) v *= k;
    return {std::move(id), x, std::move(h)};
}

} // namespace

CateProfile cate_psi_oracle(const AnalyticModel& m)
{
    const auto& law = m.pop->spec().policy_law;
    require_covariates(law);
    struct Cell {
        const population::Component* arm[2] = {nullptr, nullptr};
        double mass = 0.0;
    };
    std::map<double, Cell> cells;
    for (const auto& comp : m.pop->components()) {
        auto& cell = cells[comp.point.x];
        cell.arm[comp.point.w != 0.0 ? 1 : 0] = &comp;
    }
    for (const auto& a : m.pop->atoms()) cells[a.point.x].mass += a.weight;

    CateProfile out;
    out.mode = "oracle";
    for (const auto& [x, cell] : cells) {
        if (!cell.arm[0] || !cell.arm[1])
            throw DomainError("CATE needs both treatment arms at every covariate value");
        const double e1 = conditional_psi(m, cell.arm[1]->point, cell.arm[1]->law);
        const double e0 = conditional_psi(m, cell.arm[0]->point, cell.arm[0]->law);
        out.x.push_back(x);
        out.cate.push_back(e1 - e0);
        out.mass.push_back(cell.mass);
    }
    return out;
}

CateProfile cate_psi_estimated(const std::vector<double>& psi_total, const population::AgentTable& agents,
                               const PolicyLaw& law, int bins)
{
    require_covariates(law);
    if (!agents.has_x || psi_total.size() != agents.size()) throw ConfigError("CATE estimation needs x and Psi per agent");
    const std::size_t n = agents.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return agents.policy[a].x < agents.policy[b].x; });

    // Consecutive runs of the sorted order; one per support point for a discrete X.
    std::vector<std::pair<std::size_t, std::size_t>> runs;
    if (law.x_discrete()) {
        std::size_t lo = 0;
        for (std::size_t i = 1; i <= n; ++i)
            if (i == n || agents.policy[order[i]].x != agents.policy[order[lo]].x) {
                runs.emplace_back(lo, i);
                lo = i;
            }
    } else {
        const std::size_t nb = static_cast<std::size_t>(std::max(1, bins));
        for (std::size_t b = 0; b < nb; ++b) runs.emplace_back(b * n / nb, (b + 1) * n / nb);
    }

    CateProfile out;
    out.mode = "estimated";
    auto arm_counts = [&](std::pair<std::size_t, std::size_t> r) {
        std::size_t t = 0;
        for (std::size_t i = r.first; i < r.second; ++i) t += agents.policy[order[i]].w != 0.0;
        return std::pair{t, (r.second - r.first) - t};
    };
    std::vector<std::pair<std::size_t, std::size_t>> merged;
    for (const auto& r : runs) {
        if (!merged.empty()) {
            const auto [t, c] = arm_counts(merged.back());
            if (t < 10 || c < 10) {
                merged.back().second = r.second;
                out.warnings.push_back("CATE bin merged with its right neighbour: too few treated or control agents");
                continue;
            }
        }
        merged.push_back(r);
    }
    if (merged.size() > 1) {
        const auto [t, c] = arm_counts(merged.back());
        if (t < 10 || c < 10) {
            const auto last = merged.back();
            merged.pop_back();
            merged.back().second = last.second;
            out.warnings.push_back("last CATE bin merged with its left neighbour");
        }
    }
    for (const auto& [lo, hi] : merged) {
        double sx = 0.0, s = 0.0, s2 = 0.0;
        const double cnt = static_cast<double>(hi - lo);
        for (std::size_t k = lo; k < hi; ++k) {
            const auto& p = agents.policy[order[k]];
            const double pr = law.propensity(p.x);
            const double v = psi_total[order[k]] * (p.w / pr - (1.0 - p.w) / (1.0 - pr));
            sx += p.x;
            s += v;
            s2 += v * v;
        }
        const double mean = s / cnt;
        out.x.push_back(sx / cnt);
        out.cate.push_back(mean);
        out.se.push_back(cnt > 1 ? std::sqrt(std::max(0.0, s2 / cnt - mean * mean) / (cnt - 1.0)) : 0.0);
        out.mass.push_back(cnt / static_cast<double>(n));
    }
    return out;
}

population::PolicyScore targeting_score(const Direction& h, const PolicyLaw& law)
{
    require_covariates(law);
    return population::PolicyScore(h.id, population::PolicyScore::Kind::smooth,
                                   [h, law](const PolicyPoint& p) {
                                       const double pr = law.propensity(p.x);
                                       return (p.w / pr - (1.0 - p.w) / (1.0 - pr)) * h(p.x);
                                   });
}

std::vector<Direction> random_directions(const PolicyLaw& law, const std::vector<double>& x_atoms,
                                         const std::vector<double>& mass, double cap, int count, std::uint64_t seed)
{
    std::vector<Direction> out;
    for (int j = 0; j < count; ++j) {
        numerics::CounterRng rng(seed, numerics::stream_id(static_cast<std::uint64_t>(j), numerics::Purpose::auxiliary));
        std::vector<double> h(x_atoms.size());
        if (law.x_discrete()) {
            for (double& v : h) v = rng.normal();
        } else {
            double a[5];
            for (double& v : a) v = rng.normal();
            for (std::size_t i = 0; i < x_atoms.size(); ++i) {
                const double u = 2.0 * (x_atoms[i] - law.x_lo()) / (law.x_hi() - law.x_lo()) - 1.0;
                for (int k = 0; k < 5; ++k) h[i] += a[k] * legendre(k, u);
            }
        }
        out.push_back(scaled_direction("random_" + std::to_string(j), x_atoms, std::move(h), mass, cap));
    }
    return out;
}

TargetingResult optimal_targeting(const AnalyticModel& m, double cap, int random_count, std::uint64_t seed)
{
    if (!(cap > 0.0)) throw ConfigError("targeting norm cap must be positive");
    const auto& law = m.pop->spec().policy_law;
    TargetingResult out;
    out.cap = cap;
    out.cate = cate_psi_oracle(m);
    const double norm = out.cate.norm();
    if (!(norm > 1e-12)) throw DomainError("CATE-Psi is zero; the optimal targeting direction is undefined");

    out.optimal = scaled_direction("optimal", out.cate.x, out.cate.cate, out.cate.mass, cap);
    std::vector<double> sign(out.cate.cate.size());
    for (std::size_t i = 0; i < sign.size(); ++i) sign[i] = out.cate.cate[i] > 0.0 ? 1.0 : (out.cate.cate[i] < 0.0 ? -1.0 : 0.0);
    out.ewm = scaled_direction("ewm_sign", out.cate.x, std::move(sign), out.cate.mass, cap);

    auto mpe_of = [&](const Direction& h) { return mpe_covariance(m, targeting_score(h, law)).total(); };
    out.mpe_optimal = mpe_of(out.optimal);
    out.mpe_closed_form = std::sqrt(cap) * norm;
    out.mpe_ewm = mpe_of(out.ewm);
    out.max_random_excess = -std::numeric_limits<double>::infinity();
    for (const auto& h : random_directions(law, out.cate.x, out.cate.mass, cap, random_count, seed)) {
        out.mpe_random.push_back(mpe_of(h));
        out.max_random_excess = std::max(out.max_random_excess, out.mpe_random.back() - out.mpe_optimal);
    }
    return out;
}

} // namespace mpelab::welfare
