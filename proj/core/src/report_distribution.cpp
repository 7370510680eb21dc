#include "mpelab/mechanism/report_distribution.hpp"

#include <algorithm>
#include <cmath>

#include "mpelab/errors.hpp"
#include "mpelab/numerics/quadrature.hpp"
#include "mpelab/numerics/roots.hpp"

namespace mpelab::mechanism {

using population::LegendreDensity;
using population::UniformDensity;

ReportDistribution::ReportDistribution(const Population& pop, std::vector<double> atom_weights)
    : pop_(&pop), atom_weights_(std::move(atom_weights))
{
    if (atom_weights_.size() != pop.atoms().size()) throw ConfigError("report distribution: weight vector size mismatch");
    const auto& comps = pop.components();
    comp_weight_.assign(comps.size(), 0.0);
    for (std::size_t k = 0; k < comps.size(); ++k)
        for (std::size_t i : comps[k].atoms) comp_weight_[k] += atom_weights_[i];

    if (space().n_cont == 1) {
        std::vector<double> coef;
        bool ok = true;
        double total = 0.0;
        for (std::size_t k = 0; k < comps.size() && ok; ++k) {
            const auto* d = comps[k].law.coords[0].get();
            std::vector<double> kc;
            if (const auto* l = dynamic_cast<const LegendreDensity*>(d)) {
                kc = l->coefficients();
            } else if (!dynamic_cast<const UniformDensity*>(d)) {
                ok = false;
                break;
            }
            if (kc.size() > coef.size()) coef.resize(kc.size(), 0.0);
            for (std::size_t j = 0; j < kc.size(); ++j) coef[j] += comp_weight_[k] * kc[j];
            total += comp_weight_[k];
        }
        if (ok && total > 0.0) {
            for (double& c : coef) c /= total;
            pooled_ = std::make_shared<LegendreDensity>(space().lo[0], space().hi[0], coef);
            const int nt = space().n_types;
            pooled_type_.assign(static_cast<std::size_t>(nt), nullptr);
            pooled_type_mass_.assign(static_cast<std::size_t>(nt), 0.0);
            for (int t = 0; t < nt; ++t) {
                std::vector<double> tc;
                double mass = 0.0;
                for (std::size_t k = 0; k < comps.size(); ++k) {
                    const double w = comp_weight_[k] * comps[k].law.type_probs[static_cast<std::size_t>(t)];
                    std::vector<double> kc;
                    if (const auto* l = dynamic_cast<const LegendreDensity*>(comps[k].law.coords[0].get())) kc = l->coefficients();
                    if (kc.size() > tc.size()) tc.resize(kc.size(), 0.0);
                    for (std::size_t j = 0; j < kc.size(); ++j) tc[j] += w * kc[j];
                    mass += w;
                }
                if (!(mass > 0.0)) continue;
                for (double& c : tc) c /= mass;
                pooled_type_[static_cast<std::size_t>(t)] = std::make_shared<LegendreDensity>(space().lo[0], space().hi[0], tc);
                pooled_type_mass_[static_cast<std::size_t>(t)] = mass;
            }
        }
    }
}

double ReportDistribution::untilted_joint(const Report& r) const
{
    if (!pooled_type_.empty()) {
        const auto t = static_cast<std::size_t>(r.type);
        return pooled_type_[t] ? pooled_type_mass_[t] * pooled_type_[t]->pdf(r.x[0]) : 0.0;
    }
    double s = 0.0;
    for (std::size_t k = 0; k < comp_weight_.size(); ++k) s += comp_weight_[k] * law(k).pdf(r);
    return s;
}

double ReportDistribution::untilted_joint_dx(const Report& r) const
{
    if (!pooled_type_.empty()) {
        const auto t = static_cast<std::size_t>(r.type);
        return pooled_type_[t] ? pooled_type_mass_[t] * pooled_type_[t]->dpdf(r.x[0]) : 0.0;
    }
    double s = 0.0;
    for (std::size_t k = 0; k < comp_weight_.size(); ++k) s += comp_weight_[k] * law(k).dpdf(r, 0);
    return s;
}

ReportDistribution ReportDistribution::tilted(const ReportScore& s, double theta) const
{
    ReportDistribution out = *this;
    out.tilt_ = s;
    out.tilt_theta_ = s.is_zero() ? 0.0 : theta;
    return out;
}

double ReportDistribution::density(std::size_t k, const Report& r) const
{
    return comp_weight_[k] * law(k).pdf(r) * tilt_factor(r);
}

double ReportDistribution::pdf(const Report& r) const
{
    return untilted_joint(r) * tilt_factor(r);
}

double ReportDistribution::type_mass(int t) const
{
    if (is_tilted()) {
        if (space().n_cont != 0) throw DomainError("type_mass under a tilt is only available for purely discrete reports");
        Report r;
        r.type = t;
        return pdf(r);
    }
    double s = 0.0;
    for (std::size_t k = 0; k < comp_weight_.size(); ++k) s += comp_weight_[k] * law(k).type_probs[static_cast<std::size_t>(t)];
    return s;
}

double ReportDistribution::marginal_pdf(int coord, double x) const
{
    const auto& sp = space();
    if (coord >= sp.n_cont) throw DomainError("marginal_pdf: no such coordinate");
    if (!is_tilted()) {
        if (pooled_) return pooled_->pdf(x);
        double s = 0.0;
        for (std::size_t k = 0; k < comp_weight_.size(); ++k) s += comp_weight_[k] * law(k).coords[static_cast<std::size_t>(coord)]->pdf(x);
        return s;
    }
    if (sp.n_cont != 1) throw DomainError("tilted marginals are only available for one continuous coordinate");
    double s = 0.0;
    Report r;
    r.x[0] = x;
    for (int t = 0; t < sp.n_types; ++t) {
        r.type = t;
        s += pdf(r);
    }
    return s;
}

double ReportDistribution::marginal_dpdf(int coord, double x) const
{
    const auto& sp = space();
    if (coord >= sp.n_cont) throw DomainError("marginal_dpdf: no such coordinate");
    double base = 0.0;
    if (pooled_) {
        base = pooled_->dpdf(x);
    } else {
        for (std::size_t k = 0; k < comp_weight_.size(); ++k) base += comp_weight_[k] * law(k).coords[static_cast<std::size_t>(coord)]->dpdf(x);
    }
    if (!is_tilted()) return base;
    if (sp.n_cont != 1) throw DomainError("tilted marginals are only available for one continuous coordinate");
    // d/dx sum_t [p_t f(x) (1 + theta s(t, x))]
    double s = 0.0;
    Report r;
    r.x[0] = x;
    for (int t = 0; t < sp.n_types; ++t) {
        r.type = t;
        const double ft = untilted_joint(r), dft = untilted_joint_dx(r);
        s += dft * (1.0 + tilt_theta_ * tilt_(r)) + ft * tilt_theta_ * tilt_.derivative(r, 0);
    }
    return s;
}

double ReportDistribution::tilted_cdf_correction(int coord, double x) const
{
    const auto& sp = space();
    if (sp.n_cont != 1) throw DomainError("tilted marginals are only available for one continuous coordinate");
    const double lo = sp.lo[static_cast<std::size_t>(coord)];
    if (x <= lo) return 0.0;
    auto bps = kinks(coord);
    for (double k : tilt_.kinks()) bps.push_back(k);
    bps = numerics::interior_breakpoints(lo, x, bps);
    auto integrand = [&](double v) {
        Report r;
        r.x[0] = v;
        double s = 0.0;
        for (int t = 0; t < sp.n_types; ++t) {
            r.type = t;
            s += untilted_joint(r) * tilt_(r);
        }
        return s;
    };
    double total = 0.0, a = lo;
    bps.push_back(x);
    for (double b : bps) {
        total += numerics::gauss_legendre_panels(integrand, a, b, 4);
        a = b;
    }
    return tilt_theta_ * total;
}

double ReportDistribution::marginal_cdf(int coord, double x) const
{
    const auto& sp = space();
    if (coord >= sp.n_cont) throw DomainError("marginal_cdf: no such coordinate");
    double base = 0.0;
    if (pooled_) {
        base = pooled_->cdf(x);
    } else {
        for (std::size_t k = 0; k < comp_weight_.size(); ++k)
            base += comp_weight_[k] * law(k).coords[static_cast<std::size_t>(coord)]->cdf(x);
    }
    if (!is_tilted()) return base;
    return base + tilted_cdf_correction(coord, x);
}

double ReportDistribution::marginal_quantile(int coord, double u) const
{
    const double lo = space().lo[static_cast<std::size_t>(coord)], hi = space().hi[static_cast<std::size_t>(coord)];
    if (u <= 0.0) return lo;
    if (u >= 1.0) return hi;
    auto f = [&](double x) { return marginal_cdf(coord, x) - u; };
    auto df = [&](double x) { return marginal_pdf(coord, x); };
    numerics::SolverOptions opts;
    opts.tol = 1e-15;
    return numerics::solve_bracketed(f, df, lo, hi, opts).x;
}

std::vector<double> ReportDistribution::kinks(int coord) const
{
    std::vector<double> out;
    if (pooled_) return out;
    for (std::size_t k = 0; k < comp_weight_.size(); ++k)
        for (double v : law(k).coords[static_cast<std::size_t>(coord)]->kinks()) out.push_back(v);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<double> ReportDistribution::component_mass(const std::vector<double>& lambda) const
{
    const auto& comps = pop_->components();
    std::vector<double> m(comps.size(), 0.0);
    for (std::size_t k = 0; k < comps.size(); ++k)
        for (std::size_t i : comps[k].atoms) m[k] += atom_weights_[i] * lambda[i];
    return m;
}

} // namespace mpelab::mechanism
