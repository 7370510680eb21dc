#include "mpelab/population/report_law.hpp"

#include <cmath>

#include "mpelab/errors.hpp"

namespace mpelab::population {

namespace {

// Report-law parameters may depend on (w, x) only.
bool policy_side(const Polynomial& p)
{
    for (Var v : {Var::z, Var::xi, Var::r1, Var::r2, Var::t})
        if (p.depends_on(v)) return false;
    return true;
}

} // namespace

double ConditionalReportLaw::pdf(const Report& r) const
{
    const double pt = type_probs.empty() ? 1.0 : type_probs[static_cast<std::size_t>(r.type)];
    if (pt == 0.0) return 0.0;
    return pt * cont_pdf(r);
}

double ConditionalReportLaw::cont_pdf(const Report& r) const
{
    double v = 1.0;
    for (std::size_t j = 0; j < coords.size(); ++j) v *= coords[j]->pdf(r.x[j]);
    return v;
}

double ConditionalReportLaw::dpdf(const Report& r, int coord) const
{
    const double pt = type_probs.empty() ? 1.0 : type_probs[static_cast<std::size_t>(r.type)];
    double v = pt;
    for (std::size_t j = 0; j < coords.size(); ++j)
        v *= (static_cast<int>(j) == coord) ? coords[j]->dpdf(r.x[j]) : coords[j]->pdf(r.x[j]);
    return v;
}

ReportLaw::ReportLaw(ReportSpace space, std::vector<Polynomial> type_prob, std::vector<CoordinateSpec> coords)
    : space_(std::move(space)), type_prob_(std::move(type_prob)), coords_(std::move(coords))
{
    if (space_.n_types < 1) throw ConfigError("report law needs at least one type");
    if (static_cast<int>(type_prob_.size()) != space_.n_types - 1)
        throw ConfigError("report law: expected " + std::to_string(space_.n_types - 1) + " type probability entries");
    if (static_cast<int>(coords_.size()) != space_.n_cont)
        throw ConfigError("report law: number of continuous coordinates does not match the bounds");
    if (space_.n_cont > 2) throw ConfigError("report law: at most two continuous coordinates are supported");
    for (const auto& p : type_prob_)
        if (!policy_side(p))
            throw ConfigError("report law: type probabilities may depend on (w, x) only");
    for (const auto& c : coords_) {
        for (const auto& k : c.legendre_coef)
            if (!policy_side(k))
                throw ConfigError("report law: density parameters may depend on (w, x) only");
        if (!policy_side(c.location))
            throw ConfigError("report law: density parameters may depend on (w, x) only");
    }
}

ConditionalReportLaw ReportLaw::at(const PolicyPoint& p) const
{
    ConditionalReportLaw law;
    if (space_.n_types > 1) {
        double rest = 1.0;
        for (const auto& poly : type_prob_) {
            const double v = poly.eval(p);
            if (v < -1e-12 || v > 1.0 + 1e-12) throw ConfigError("report law: type probability outside [0,1]");
            law.type_probs.push_back(std::max(0.0, v));
            rest -= v;
        }
        if (rest < -1e-10) throw ConfigError("report law: type probabilities exceed one");
        law.type_probs.push_back(std::max(0.0, rest));
    } else {
        law.type_probs = {1.0};
    }
    for (int j = 0; j < space_.n_cont; ++j) {
        const auto& c = coords_[static_cast<std::size_t>(j)];
        const double lo = space_.lo[static_cast<std::size_t>(j)], hi = space_.hi[static_cast<std::size_t>(j)];
        switch (c.family) {
        case CoordinateSpec::Family::uniform:
            law.coords.push_back(std::make_shared<UniformDensity>(lo, hi));
            break;
        case CoordinateSpec::Family::legendre: {
            std::vector<double> k;
            for (const auto& poly : c.legendre_coef) k.push_back(poly.eval(p));
            law.coords.push_back(std::make_shared<LegendreDensity>(lo, hi, std::move(k)));
            break;
        }
        case CoordinateSpec::Family::truncated_normal:
            law.coords.push_back(std::make_shared<TruncatedNormalDensity>(c.location.eval(p), c.scale, lo, hi));
            break;
        case CoordinateSpec::Family::location_shift:
            law.coords.push_back(std::make_shared<LocationShiftDensity>(c.kernel, c.location.eval(p), c.scale, lo, hi));
            break;
        }
    }
    return law;
}

Report ReportLaw::sample(const PolicyPoint& p, double u_type, double u1, double u2) const
{
    return sample(at(p), u_type, u1, u2);
}

Report ReportLaw::sample(const ConditionalReportLaw& law, double u_type, double u1, double u2) const
{
    Report r;
    double acc = 0.0;
    r.type = static_cast<int>(law.type_probs.size()) - 1;
    for (std::size_t t = 0; t < law.type_probs.size(); ++t) {
        acc += law.type_probs[t];
        if (u_type < acc) { r.type = static_cast<int>(t); break; }
    }
    if (space_.n_cont >= 1) r.x[0] = law.coords[0]->quantile(u1);
    if (space_.n_cont >= 2) r.x[1] = law.coords[1]->quantile(u2);
    return r;
}

bool ReportLaw::policy_invariant() const
{
    auto inv = [](const Polynomial& p) { return !p.depends_on(Var::w) && !p.depends_on(Var::x); };
    for (const auto& p : type_prob_)
        if (!inv(p)) return false;
    for (const auto& c : coords_) {
        for (const auto& k : c.legendre_coef)
            if (!inv(k)) return false;
        if (!inv(c.location)) return false;
    }
    return true;
}

} // namespace mpelab::population
