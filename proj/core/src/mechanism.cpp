#include "mpelab/mechanism/mechanism.hpp"

#include <algorithm>
#include <sstream>

#include "mpelab/errors.hpp"
#include "mpelab/mechanism/catalog_mechanisms.hpp"

namespace mpelab::mechanism {

void Mechanism::check_clearing(const Vec& c, const population::ReportSpace& space) const
{
    if (c.size() != clearing_dim()) throw DomainError(id() + ": clearing vector has the wrong dimension");
    const Vec lo = lower_bound(space), hi = upper_bound(space);
    for (int l = 0; l < c.size(); ++l) {
        if (!(c[l] >= lo[l] && c[l] <= hi[l])) {
            std::ostringstream os;
            os << id() << ": clearing parameter " << l << " = " << c[l] << " outside [" << lo[l] << ", " << hi[l] << "]";
            throw DomainError(os.str());
        }
    }
}

Vec Mechanism::grad_c_smooth(int, const Report&, const Vec& c, const ReportDistribution&) const
{
    return Vec::Zero(c.size());
}

Alloc Mechanism::allocation(const Report& r, const Vec& c, const ReportDistribution& d) const
{
    Alloc mu{};
    double rest = 1.0;
    for (int a = 1; a < allocations(); ++a) {
        if (eligibility(a, r, c) >= 0.0) {
            mu[static_cast<std::size_t>(a)] = smooth_part(a, r, c, d);
            rest -= mu[static_cast<std::size_t>(a)];
        }
    }
    mu[0] = rest;
    return mu;
}

Mat Mechanism::smooth_jacobian(const Report& r, const Vec& c, const ReportDistribution& d) const
{
    Mat g = Mat::Zero(allocations(), clearing_dim());
    if (!smooth_depends_on_c()) return g;
    for (int a = 1; a < allocations(); ++a) {
        if (eligibility(a, r, c) < 0.0) continue;
        g.row(a) = grad_c_smooth(a, r, c, d).transpose();
        g.row(0) -= g.row(a);
    }
    return g;
}

std::vector<double> Mechanism::breakpoints(int coord, const Vec& c) const
{
    std::vector<double> out;
    for (const auto& cut : cuts())
        if (cut.coord == coord) out.push_back(c[cut.clearing]);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

double Mechanism::kernel_L(int, const Report&, const Report&, const Vec&, const ReportDistribution&) const
{
    return 0.0;
}

double Mechanism::kernel_envelope(const Report&, const Vec&, const ReportDistribution&) const
{
    return 0.0;
}

double Mechanism::competitor_kernel_mean(int, const Report&, const Vec&, const ReportDistribution&) const
{
    return 0.0;
}

Vec Mechanism::conduct_kernel(const Report& r, const Vec& c, const ReportDistribution& d) const
{
    const Alloc mu = allocation(r, c, d);
    Vec k(clearing_dim());
    for (int l = 0; l < clearing_dim(); ++l) k[l] = mu[static_cast<std::size_t>(share_allocation(l))];
    return k;
}

MechanismPtr make_mechanism(const population::MechanismConfig& cfg)
{
    if (cfg.id == "random_rationing") return std::make_shared<RandomRationing>();
    if (cfg.id == "price_cutoff") return std::make_shared<PriceCutoff>();
    if (cfg.id == "second_price_auction") return std::make_shared<SecondPriceAuction>(cfg.participants);
    if (cfg.id == "two_school_da") return std::make_shared<TwoSchoolDA>();
    if (cfg.id == "ttc_parametric") return std::make_shared<TTCParametric>();
    throw ConfigError("unknown mechanism '" + cfg.id + "'");
}

std::vector<std::string> mechanism_ids()
{
    return {"random_rationing", "price_cutoff", "second_price_auction", "two_school_da", "ttc_parametric"};
}

} // namespace mpelab::mechanism
