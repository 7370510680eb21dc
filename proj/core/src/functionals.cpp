#include "mpelab/welfare/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mpelab/errors.hpp"
#include "mpelab/numerics/roots.hpp"

namespace mpelab::welfare {

namespace {

constexpr int kTableNodes = 513;
constexpr double kTableHalfWidth = 12.0;  // in outcome standard deviations

double Phi(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }
double phi(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI); }

struct Atom {
    double m;
    double w;
};

// The baseline law of m~(W, A, R) as weighted points on the report grid.
std::vector<Atom> outcome_atoms(const Mechanism& mech, const ReportDistribution& d, const Vec& c,
                                const population::OutcomeLaw& law)
{
    const auto g = mechanism::make_grid(d, &mech, &c);
    const auto& pop = d.population();
    const auto& comps = pop.components();
    const auto& w = d.atom_weights();
    const int na = mech.allocations();
    std::vector<Atom> out;
    mechanism::visit(d, g, [&](const Report& r, double qw, const double* dens) {
        const auto mu = mech.allocation(r, c, d);
        for (std::size_t k = 0; k < comps.size(); ++k) {
            if (dens[k] == 0.0) continue;
            const double wk = d.component_weight(k);
            for (int a = 0; a < na; ++a) {
                const double ma = mu[static_cast<std::size_t>(a)];
                if (ma == 0.0) continue;
                for (std::size_t i : comps[k].atoms) {
                    const double p = qw * dens[k] * ma * w[i] / wk;
                    if (p != 0.0) out.push_back({law.mean(pop.atoms()[i].point, a, r), p});
                }
            }
        }
    });
    return out;
}

double total_mass(const std::vector<Atom>& at)
{
    double s = 0.0;
    for (const auto& a : at) s += a.w;
    return s;
}

// Unnormalised so that it agrees with integrate_welfare on the same grid.
double atoms_first_moment(const std::vector<Atom>& at)
{
    double s = 0.0;
    for (const auto& a : at) s += a.w * a.m;
    return s;
}

double atoms_sd(const std::vector<Atom>& at, double mean, double sigma)
{
    double s = 0.0;
    for (const auto& a : at) s += a.w * (a.m - mean) * (a.m - mean);
    return std::sqrt(s / total_mass(at) + sigma * sigma);
}

double require_normal(const population::OutcomeLaw& law, const std::string& what)
{
    if (law.noise().family() != population::NoiseLaw::Family::normal)
        throw ConfigError(what + " needs normal outcome noise");
    return law.noise().scale();
}

double quantile_of(const std::vector<Atom>& at, double tau, double sigma, double mean, double sd, double* density)
{
    const double mass = total_mass(at);
    auto F = [&](double y) {
        double s = 0.0;
        for (const auto& a : at) s += a.w * Phi((y - a.m) / sigma);
        return s / mass - tau;
    };
    auto f = [&](double y) {
        double s = 0.0;
        for (const auto& a : at) s += a.w * phi((y - a.m) / sigma);
        return s / (mass * sigma);
    };
    numerics::SolverOptions o;
    o.tol = 1e-14;
    const auto res = numerics::solve_bracketed(F, f, mean - 20.0 * sd, mean + 20.0 * sd, o);
    *density = f(res.x);
    if (*density < 1e-6) throw DomainError("outcome density at the quantile is ~0; the quantile functional is ill-posed");
    return res.x;
}

// Values and slopes of fn on `grid`; fn returns (value, slope).
template <class Fn>
void tabulate(const std::vector<double>& grid, std::vector<double>& v, std::vector<double>& dv, Fn&& fn)
{
    v.resize(grid.size());
    dv.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto [a, b] = fn(grid[i]);
        v[i] = a;
        dv[i] = b;
    }
}

double hermite(const std::vector<double>& x, const std::vector<double>& v, const std::vector<double>& dv, double t)
{
    if (t <= x.front()) return v.front() + dv.front() * (t - x.front());
    if (t >= x.back()) return v.back() + dv.back() * (t - x.back());
    const double h = x[1] - x[0];
    const auto i = std::min(static_cast<std::size_t>((t - x.front()) / h), x.size() - 2);
    const double s = (t - x[i]) / h;
    const double s2 = s * s, s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * v[i] + (s3 - 2 * s2 + s) * h * dv[i] + (-2 * s3 + 3 * s2) * v[i + 1] +
           (s3 - s2) * h * dv[i + 1];
}

// Large atom sets are collapsed onto a uniform grid with linear weight splitting, which keeps
// mass and mean; the discarded within-cell variance is O(h^2).
std::vector<Atom> binned(const std::vector<Atom>& at, double lo, double hi)
{
    constexpr std::size_t kMaxAtoms = 4096, kBins = 8192;
    if (at.size() <= kMaxAtoms) return at;
    const double h = (hi - lo) / static_cast<double>(kBins);
    std::vector<double> w(kBins + 1, 0.0);
    std::vector<Atom> out;
    for (const auto& a : at) {
        const double u = (a.m - lo) / h;
        if (u < 0.0 || u >= static_cast<double>(kBins)) {
            out.push_back(a);
            continue;
        }
        const auto i = static_cast<std::size_t>(u);
        const double f = u - static_cast<double>(i);
        w[i] += a.w * (1.0 - f);
        w[i + 1] += a.w * f;
    }
    for (std::size_t i = 0; i <= kBins; ++i)
        if (w[i] != 0.0) out.push_back({lo + h * static_cast<double>(i), w[i]});
    return out;
}

std::vector<double> table_grid(double mean, double sd)
{
    std::vector<double> g(kTableNodes);
    const double lo = mean - kTableHalfWidth * sd, hi = mean + kTableHalfWidth * sd;
    for (int i = 0; i < kTableNodes; ++i) g[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (kTableNodes - 1);
    return g;
}

} // namespace

std::string FunctionalSpec::id() const
{
    if (kind != "quantile") return kind;
    std::ostringstream os;
    os << "quantile:" << tau_q;
    return os.str();
}

FunctionalSpec parse_functional(const std::string& text)
{
    FunctionalSpec f;
    if (text == "mean" || text == "gini") {
        f.kind = text;
        return f;
    }
    if (text.rfind("quantile", 0) == 0) {
        f.kind = "quantile";
        if (text.size() > 8) {
            if (text[8] != ':') throw ConfigError("unknown functional '" + text + "'");
            try {
                std::size_t pos = 0;
                f.tau_q = std::stod(text.substr(9), &pos);
                if (pos != text.size() - 9) throw std::invalid_argument("trailing");
            } catch (const std::exception&) {
                throw ConfigError("bad quantile level in '" + text + "'");
            }
        }
        if (!(f.tau_q > 0.0 && f.tau_q < 1.0)) throw ConfigError("quantile level must lie in (0, 1)");
        return f;
    }
    throw ConfigError("unknown functional '" + text + "' (mean, quantile[:tau], gini)");
}

WelfareFunctional::WelfareFunctional(const FunctionalSpec& spec, const Mechanism& mech, const ReportDistribution& d,
                                     const Vec& c, const population::OutcomeLaw& law, bool pointwise)
    : spec_(spec), law_(&law)
{
    const auto at = outcome_atoms(mech, d, c, law);
    mean_ = atoms_first_moment(at);
    if (spec.kind == "mean") {
        value_ = mean_;
        return;
    }
    sigma_ = require_normal(law, spec.kind);
    const double sd = atoms_sd(at, mean_, sigma_);
    if (spec.kind == "quantile") {
        value_ = quantile_of(at, spec.tau_q, sigma_, mean_, sd, &fq_);
    } else if (spec.kind == "gini") {
        if (!(mean_ > 0.0)) throw DomainError("the Gini functional needs a positive outcome mean");
        const double mass = total_mass(at);
        const double s2 = std::sqrt(2.0) * sigma_;
        grid_ = table_grid(mean_, sd);
        const auto bins = binned(at, grid_.front(), grid_.back());
        tabulate(grid_, b_, db_, [&](double m) {
            double v = 0.0, dv = 0.0;
            for (const auto& a : bins) {
                const double u = m - a.m;
                v += a.w * law.noise().mean_abs_difference(u);
                dv += a.w * (2.0 * Phi(u / s2) - 1.0);
            }
            return std::pair{v / mass, dv / mass};
        });
        if (pointwise) tabulate(grid_, a_, da_, [&](double y) {
            double v = 0.0, dv = 0.0;
            for (const auto& a : bins) {
                const double u = (y - a.m) / sigma_;
                v += a.w * (sigma_ * u * (2.0 * Phi(u) - 1.0) + 2.0 * sigma_ * phi(u));
                dv += a.w * (2.0 * Phi(u) - 1.0);
            }
            return std::pair{v / mass, dv / mass};
        });
        double dsum = 0.0;
        for (const auto& a : at) dsum += a.w * b_table(a.m);
        gini_ = dsum / mass / (2.0 * mean_);
        value_ = gini_;
    } else {
        throw ConfigError("unknown functional '" + spec.kind + "'");
    }
    double e = 0.0;
    for (const auto& a : at) e += a.w * conditional_influence(a.m);
    mean_if_ = e / total_mass(at);
}

double WelfareFunctional::b_table(double m) const { return hermite(grid_, b_, db_, m); }
double WelfareFunctional::a_table(double y) const { return hermite(grid_, a_, da_, y); }

double WelfareFunctional::influence(double y) const
{
    if (spec_.kind == "gini" && a_.empty()) throw ConfigError("pointwise Gini influence was not tabulated");
    if (spec_.kind == "mean") return y - mean_;
    if (spec_.kind == "quantile") return (spec_.tau_q - (y <= value_ ? 1.0 : 0.0)) / fq_;
    return (a_table(y) - gini_ * (y + mean_)) / mean_;
}

double WelfareFunctional::conditional_influence(double m) const
{
    if (spec_.kind == "mean") return m - mean_;
    if (spec_.kind == "quantile") return (spec_.tau_q - Phi((value_ - m) / sigma_)) / fq_;
    return (b_table(m) - gini_ * (m + mean_)) / mean_;
}

mechanism::OutcomeFieldPtr WelfareFunctional::field(const ReportDistribution& d, const std::vector<double>* lambda) const
{
    if (spec_.kind == "mean") return std::make_shared<mechanism::PolynomialField>(d, *law_, lambda);
    return std::make_shared<mechanism::TransformField>(
        d, *law_, [this](double m) { return conditional_influence(m); }, lambda);
}

double functional_value(const FunctionalSpec& spec, const Mechanism& mech, const ReportDistribution& d, const Vec& c,
                        const population::OutcomeLaw& law)
{
    if (spec.kind == "mean") {
        const auto g = mechanism::make_grid(d, &mech, &c);
        return mechanism::integrate_welfare(d, g, mech, c, mechanism::PolynomialField(d, law));
    }
    return WelfareFunctional(spec, mech, d, c, law, false).value();
}

} // namespace mpelab::welfare
