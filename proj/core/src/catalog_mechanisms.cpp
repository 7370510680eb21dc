#include "mpelab/mechanism/catalog_mechanisms.hpp"

#include <cmath>

#include "mpelab/errors.hpp"

namespace mpelab::mechanism {

namespace {

Vec unit(int dim, int l, double v)
{
    Vec g = Vec::Zero(dim);
    g[l] = v;
    return g;
}

void require(bool ok, const std::string& what)
{
    if (!ok) throw ConfigError(what);
}

} // namespace

// ---- random rationing

void RandomRationing::check_space(const population::ReportSpace& space) const
{
    require(space.n_types == 2 && space.n_cont == 0, "random_rationing needs binary demand reports and no continuous coordinates");
}

double RandomRationing::smooth_part(int, const Report& r, const Vec& c, const ReportDistribution&) const
{
    return r.type == 1 ? c[0] : 0.0;
}

Vec RandomRationing::grad_c_smooth(int, const Report& r, const Vec&, const ReportDistribution&) const
{
    return Vec::Constant(1, r.type == 1 ? 1.0 : 0.0);
}

// ---- price cutoff

void PriceCutoff::check_space(const population::ReportSpace& space) const
{
    require(space.n_cont >= 1, "price_cutoff needs a continuous report coordinate");
}

Vec PriceCutoff::lower_bound(const population::ReportSpace& space) const { return Vec::Constant(1, space.lo[0]); }
Vec PriceCutoff::upper_bound(const population::ReportSpace& space) const { return Vec::Constant(1, space.hi[0]); }

double PriceCutoff::eligibility(int, const Report& r, const Vec& c) const { return r.x[0] - c[0]; }
Vec PriceCutoff::grad_c_eligibility(int, const Report&, const Vec&) const { return Vec::Constant(1, -1.0); }

Vec PriceCutoff::grad_r_eligibility(int, const Report&, const Vec&) const
{
    return Vec::Constant(1, 1.0);
}

// ---- second-price auction

SecondPriceAuction::SecondPriceAuction(int n) : n_(n)
{
    if (n < 2) throw ConfigError("second_price_auction needs at least two participants");
}

std::string SecondPriceAuction::description() const
{
    return "second-price auction, n = " + std::to_string(n_) + ", mu_1 = 1{R >= c} F(R)^(n-1)";
}

void SecondPriceAuction::check_space(const population::ReportSpace& space) const
{
    require(space.n_cont == 1, "second_price_auction needs exactly one continuous coordinate (the bid)");
}

Vec SecondPriceAuction::lower_bound(const population::ReportSpace& space) const { return Vec::Constant(1, space.lo[0]); }
Vec SecondPriceAuction::upper_bound(const population::ReportSpace& space) const { return Vec::Constant(1, space.hi[0]); }

double SecondPriceAuction::smooth_part(int, const Report& r, const Vec&, const ReportDistribution& d) const
{
    return std::pow(d.marginal_cdf(0, r.x[0]), n_ - 1);
}

double SecondPriceAuction::eligibility(int, const Report& r, const Vec& c) const { return r.x[0] - c[0]; }
Vec SecondPriceAuction::grad_c_eligibility(int, const Report&, const Vec&) const { return Vec::Constant(1, -1.0); }
Vec SecondPriceAuction::grad_r_eligibility(int, const Report&, const Vec&) const { return Vec::Constant(1, 1.0); }

double SecondPriceAuction::kernel_envelope(const Report& r, const Vec& c, const ReportDistribution& d) const
{
    if (r.x[0] < c[0]) return 0.0;
    return (n_ - 1) * std::pow(d.marginal_cdf(0, r.x[0]), n_ - 2);
}

double SecondPriceAuction::kernel_L(int a, const Report& r, const Report& rp, const Vec& c, const ReportDistribution& d) const
{
    if (rp.x[0] > r.x[0]) return 0.0;
    const double l = kernel_envelope(r, c, d);
    return a == 1 ? l : -l;
}

double SecondPriceAuction::competitor_kernel_mean(int a, const Report& rp, const Vec& c, const ReportDistribution& d) const
{
    const double m = 1.0 - std::pow(d.marginal_cdf(0, std::max(c[0], rp.x[0])), n_ - 1);
    return a == 1 ? m : -m;
}

Vec SecondPriceAuction::conduct_kernel(const Report& r, const Vec& c, const ReportDistribution& d) const
{
    Report bottom = r;
    bottom.x[0] = d.space().lo[0];
    const double own = allocation(r, c, d)[1];
    return Vec::Constant(1, own + competitor_kernel_mean(1, r, c, d) - competitor_kernel_mean(1, bottom, c, d));
}

// ---- two-school deferred acceptance

const std::vector<std::string>& TwoSchoolDA::type_labels()
{
    static const std::vector<std::string> labels{"1>2>0", "1>0>2", "2>1>0", "2>0>1", "0>1>2", "0>2>1"};
    return labels;
}

const std::vector<std::vector<int>>& TwoSchoolDA::rankings()
{
    static const std::vector<std::vector<int>> r{{1, 2}, {1}, {2, 1}, {2}, {}, {}};
    return r;
}

void TwoSchoolDA::check_space(const population::ReportSpace& space) const
{
    require(space.n_types == 6 && space.n_cont == 2, "two_school_da needs six ranking types and two school scores");
}

Vec TwoSchoolDA::lower_bound(const population::ReportSpace& space) const
{
    return Eigen::Vector2d(space.lo[0], space.lo[1]);
}

Vec TwoSchoolDA::upper_bound(const population::ReportSpace& space) const
{
    return Eigen::Vector2d(space.hi[0], space.hi[1]);
}

Alloc TwoSchoolDA::allocation(const Report& r, const Vec& c, const ReportDistribution&) const
{
    Alloc mu{};
    for (int s : rankings()[static_cast<std::size_t>(r.type)]) {
        if (r.x[static_cast<std::size_t>(s - 1)] >= c[s - 1]) {
            mu[static_cast<std::size_t>(s)] = 1.0;
            return mu;
        }
    }
    mu[0] = 1.0;
    return mu;
}

// phi_a = min(V_a - c_a, c_b - V_b for every school b ranked above a). Returns -1 for
// terms that are not schools (unacceptable a).
int TwoSchoolDA::active_term(int a, const Report& r, const Vec& c, double* value) const
{
    const auto& order = rankings()[static_cast<std::size_t>(r.type)];
    int active = -1;
    double v = -1.0;
    bool found = false;
    for (int s : order) {
        if (s == a) {
            const double t = r.x[static_cast<std::size_t>(a - 1)] - c[a - 1];
            if (!found || t < v) { v = t; active = a; }
            found = true;
            break;
        }
        const double t = c[s - 1] - r.x[static_cast<std::size_t>(s - 1)];
        if (!found || t < v) { v = t; active = -s; }
        found = true;
    }
    bool acceptable = false;
    for (int s : order) acceptable = acceptable || s == a;
    if (!acceptable) { v = -1.0; active = 0; }
    *value = v;
    return active;
}

double TwoSchoolDA::eligibility(int a, const Report& r, const Vec& c) const
{
    double v;
    active_term(a, r, c, &v);
    return v;
}

Vec TwoSchoolDA::grad_c_eligibility(int a, const Report& r, const Vec& c) const
{
    double v;
    const int t = active_term(a, r, c, &v);
    if (t == 0) return Vec::Zero(2);
    return t > 0 ? unit(2, t - 1, -1.0) : unit(2, -t - 1, 1.0);
}

Vec TwoSchoolDA::grad_r_eligibility(int a, const Report& r, const Vec& c) const
{
    double v;
    const int t = active_term(a, r, c, &v);
    if (t == 0) return Vec::Zero(2);
    return t > 0 ? unit(2, t - 1, 1.0) : unit(2, -t - 1, -1.0);
}

// ---- two-school TTC

void TTCParametric::check_space(const population::ReportSpace& space) const
{
    require(space.n_types == 2 && space.n_cont == 2, "ttc_parametric needs two preference types and two priority coordinates");
    for (int j = 0; j < 2; ++j)
        require(space.lo[static_cast<std::size_t>(j)] == 0.0 && space.hi[static_cast<std::size_t>(j)] == 1.0,
                "ttc_parametric priorities live on [0, 1]");
}

bool TTCParametric::in_budget(int school, const Report& r, const Vec& c) const
{
    return r.x[0] >= c[index(1, school)] || r.x[1] >= c[index(2, school)];
}

Alloc TTCParametric::allocation(const Report& r, const Vec& c, const ReportDistribution&) const
{
    Alloc mu{};
    const int first = r.type == 0 ? 1 : 2;
    const int second = 3 - first;
    if (in_budget(first, r, c)) mu[static_cast<std::size_t>(first)] = 1.0;
    else if (in_budget(second, r, c)) mu[static_cast<std::size_t>(second)] = 1.0;
    else mu[0] = 1.0;
    return mu;
}

namespace {

// beta_a = max_b (V_b - c_{b,a}) with the index of the active priority school.
double budget_index(const Report& r, const Vec& c, int a, int* b)
{
    const double t1 = r.x[0] - c[TTCParametric::index(1, a)];
    const double t2 = r.x[1] - c[TTCParametric::index(2, a)];
    *b = t1 >= t2 ? 1 : 2;
    return std::max(t1, t2);
}

} // namespace

double TTCParametric::eligibility(int a, const Report& r, const Vec& c) const
{
    const int first = r.type == 0 ? 1 : 2;
    int b;
    const double own = budget_index(r, c, a, &b);
    if (a == first) return own;
    return std::min(own, -budget_index(r, c, first, &b));
}

Vec TTCParametric::grad_c_eligibility(int a, const Report& r, const Vec& c) const
{
    const int first = r.type == 0 ? 1 : 2;
    int b, bf;
    const double own = budget_index(r, c, a, &b);
    if (a == first || own <= -budget_index(r, c, first, &bf)) return unit(4, index(b, a), -1.0);
    return unit(4, index(bf, first), 1.0);
}

Vec TTCParametric::grad_r_eligibility(int a, const Report& r, const Vec& c) const
{
    const int first = r.type == 0 ? 1 : 2;
    int b, bf;
    const double own = budget_index(r, c, a, &b);
    if (a == first || own <= -budget_index(r, c, first, &bf)) return unit(2, b - 1, 1.0);
    return unit(2, bf - 1, -1.0);
}

} // namespace mpelab::mechanism
