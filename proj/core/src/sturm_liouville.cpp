#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "mpelab/clearing/influence.hpp"
#include "mpelab/errors.hpp"

namespace mpelab::clearing {

namespace {

constexpr std::array<double, 4> kGx{0.0694318442029737, 0.3300094782075719, 0.6699905217924281, 0.9305681557970263};
constexpr std::array<double, 4> kGw{0.1739274225687269, 0.3260725774312731, 0.3260725774312731, 0.1739274225687269};

// Thomas algorithm; the system is symmetric positive definite so no pivoting is needed.
std::vector<double> solve_tridiagonal(std::vector<double> lower, std::vector<double> diag, std::vector<double> upper,
                                      std::vector<double> rhs)
{
    const std::size_t n = diag.size();
    for (std::size_t i = 1; i < n; ++i) {
        const double m = lower[i] / diag[i - 1];
        diag[i] -= m * upper[i - 1];
        rhs[i] -= m * rhs[i - 1];
    }
    std::vector<double> x(n);
    x[n - 1] = rhs[n - 1] / diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = (rhs[i] - upper[i] * x[i + 1]) / diag[i];
    return x;
}

// Legendre polynomial P_k on the support mapped to [-1, 1], with its derivative in x.
ReportScore legendre_score(int k, double lo, double hi)
{
    auto eval = [k, lo, hi](double x, double* dp) {
        const double t = 2.0 * (x - lo) / (hi - lo) - 1.0;
        double p0 = 1.0, p1 = t, d0 = 0.0, d1 = 1.0;
        for (int j = 1; j < k; ++j) {
            const double p2 = ((2 * j + 1) * t * p1 - j * p0) / (j + 1);
            const double d2 = d0 + (2 * j + 1) * p1;
            p0 = p1;
            p1 = p2;
            d0 = d1;
            d1 = d2;
        }
        *dp = d1 * 2.0 / (hi - lo);
        return p1;
    };
    return ReportScore(
        "legendre" + std::to_string(k), [eval](const Report& r) { double d; return eval(r.x[0], &d); },
        [eval](const Report& r, int) { double d; eval(r.x[0], &d); return d; });
}

} // namespace

InfluenceFunction sturm_liouville_representer(const ReportDistribution& d, double c0, int grid_nodes)
{
    const auto& sp = d.space();
    if (sp.n_cont != 1) throw ConfigError("the Sturm-Liouville representer needs a one-dimensional bid");
    if (grid_nodes < 16) throw ConfigError("solver.grid_nodes must be at least 16");
    const double lo = sp.lo[0], hi = sp.hi[0];
    if (!(c0 > lo && c0 < hi)) throw DomainError("the reserve must lie inside the bid support");

    const double fc = d.marginal_pdf(0, c0);
    const double denom = 2.0 * fc + c0 * d.marginal_dpdf(0, c0);
    if (!(std::abs(denom) > 0.0) || !std::isfinite(denom)) throw DomainError("2 f(c0) + c0 f'(c0) vanishes at the reserve");
    const double kappa = -1.0 / denom;

    // Uniform grid with the node nearest c0 moved onto it.
    const std::size_t n = static_cast<std::size_t>(grid_nodes);
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    const std::size_t m = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::lround((c0 - lo) / (hi - lo) * static_cast<double>(n - 1))), 1, n - 2);
    x[m] = c0;

    std::vector<double> lower(n, 0.0), diag(n, 0.0), upper(n, 0.0), rhs(n, 0.0);
    for (std::size_t e = 0; e + 1 < n; ++e) {
        const double h = x[e + 1] - x[e];
        const bool source = e < m;  // element lies in [lo, c0]
        double all = 0.0, alr = 0.0, arr = 0.0, bl = 0.0, br = 0.0;
        for (std::size_t q = 0; q < 4; ++q) {
            const double f = d.marginal_pdf(0, x[e] + h * kGx[q]) * kGw[q] * h;
            const double pl = 1.0 - kGx[q], pr = kGx[q];
            all += f * (pl * pl + 1.0 / (h * h));
            alr += f * (pl * pr - 1.0 / (h * h));
            arr += f * (pr * pr + 1.0 / (h * h));
            if (source) {
                bl += f * pl;
                br += f * pr;
            }
        }
        diag[e] += all;
        diag[e + 1] += arr;
        upper[e] += alr;
        lower[e + 1] += alr;
        rhs[e] += kappa * bl;
        rhs[e + 1] += kappa * br;
    }
    rhs[m] += kappa * c0 * fc;

    const std::vector<double> psi = solve_tridiagonal(lower, diag, upper, rhs);

    double res = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double ai = diag[i] * psi[i] - rhs[i];
        if (i > 0) ai += lower[i] * psi[i - 1];
        if (i + 1 < n) ai += upper[i] * psi[i + 1];
        res = std::max(res, std::abs(ai));
        scale = std::max(scale, std::abs(rhs[i]));
    }

    InfluenceFunction out = InfluenceFunction::h1(x, psi, lo, hi);
    out.linear_residual = scale > 0.0 ? res / scale : res;

    double worst = 0.0;
    const double ref = std::abs(kappa) * (1.0 + c0 * fc);
    for (int k = 1; k <= 5; ++k) {
        const ReportScore s = legendre_score(k, lo, hi);
        const double lhs = out.pairing(d, s)[0];
        const double rhs_k = myerson_ift_functional(d, c0, s);
        worst = std::max(worst, std::abs(lhs - rhs_k) / ref);
    }
    out.defining_property_error = worst;
    if (out.linear_residual > 1e-6 || worst > 1e-4) {
        std::ostringstream os;
        os << "Sturm-Liouville representer is under-resolved on " << grid_nodes << " nodes (defining-property error "
           << worst << ", residual " << out.linear_residual << "); increase solver.grid_nodes";
        throw SolverError(os.str());
    }
    return out;
}

} // namespace mpelab::clearing
