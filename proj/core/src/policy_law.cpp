#include "mpelab/population/policy_law.hpp"

#include <cmath>
#include <numeric>

#include "mpelab/errors.hpp"
#include "mpelab/numerics/quadrature.hpp"

namespace mpelab::population {

namespace {

void check_probs(const std::vector<double>& probs, const char* what)
{
    double total = 0.0;
    for (double p : probs) {
        if (!(p >= 0.0)) throw ConfigError(std::string(what) + ": negative probability");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-10) throw ConfigError(std::string(what) + ": probabilities must sum to 1");
}

std::size_t pick(const std::vector<double>& probs, double u)
{
    double acc = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        acc += probs[i];
        if (u < acc) return i;
    }
    return probs.size() - 1;
}

} // namespace

PolicyLaw PolicyLaw::bernoulli(double p)
{
    if (!(p > 0.0 && p < 1.0)) throw ConfigError("bernoulli policy law needs p in (0,1)");
    PolicyLaw law;
    law.family_ = Family::bernoulli;
    law.support_ = {0.0, 1.0};
    law.probs_ = {1.0 - p, p};
    return law;
}

PolicyLaw PolicyLaw::discrete(std::vector<double> support, std::vector<double> probs)
{
    if (support.empty() || support.size() != probs.size())
        throw ConfigError("discrete policy law: support and probs must be non-empty and of equal length");
    check_probs(probs, "discrete policy law");
    PolicyLaw law;
    law.family_ = Family::discrete;
    law.support_ = std::move(support);
    law.probs_ = std::move(probs);
    return law;
}

PolicyLaw PolicyLaw::truncated_normal(double mean, double sd, double lo, double hi)
{
    PolicyLaw law;
    law.family_ = Family::truncated_normal;
    law.normal_ = std::make_shared<TruncatedNormalDensity>(mean, sd, lo, hi);
    return law;
}

PolicyLaw PolicyLaw::covariate(std::vector<double> x_support, std::vector<double> x_probs,
                               double x_lo, double x_hi, Polynomial propensity)
{
    PolicyLaw law;
    law.family_ = Family::covariate;
    if (!x_support.empty()) {
        if (x_support.size() != x_probs.size()) throw ConfigError("covariate law: support/probs length mismatch");
        check_probs(x_probs, "covariate law");
    } else if (!(x_hi > x_lo)) {
        throw ConfigError("covariate law: uniform covariate needs lo < hi");
    }
    for (auto& t : propensity.terms())
        for (int v = 0; v < kVarCount; ++v)
            if (v != static_cast<int>(Var::x) && t.power[v] != 0)
                throw ConfigError("covariate law: propensity may depend on x only");
    law.x_support_ = std::move(x_support);
    law.x_probs_ = std::move(x_probs);
    law.x_lo_ = x_lo;
    law.x_hi_ = x_hi;
    law.propensity_ = std::move(propensity);
    auto check = [&](double x) {
        const double p = law.propensity(x);
        if (!(p > 0.0 && p < 1.0)) throw ConfigError("covariate law: propensity must lie in (0,1)");
    };
    if (law.x_discrete()) {
        for (double x : law.x_support_) check(x);
    } else {
        for (int i = 0; i <= 200; ++i) check(x_lo + (x_hi - x_lo) * i / 200.0);
    }
    return law;
}

PolicyLaw PolicyLaw::instrument(double z_prob, double p0, double p1)
{
    if (!(z_prob > 0.0 && z_prob < 1.0)) throw ConfigError("instrument law needs z_prob in (0,1)");
    if (!(p0 >= 0.0 && p0 <= 1.0 && p1 >= 0.0 && p1 <= 1.0)) throw ConfigError("instrument law needs p0, p1 in [0,1]");
    PolicyLaw law;
    law.family_ = Family::instrument;
    law.z_prob_ = z_prob;
    law.p0_ = p0;
    law.p1_ = p1;
    return law;
}

std::string PolicyLaw::family_name() const
{
    switch (family_) {
    case Family::bernoulli: return "bernoulli";
    case Family::discrete: return "discrete";
    case Family::truncated_normal: return "truncated_normal";
    case Family::covariate: return "covariate";
    case Family::instrument: return "instrument";
    }
    return "unknown";
}

double PolicyLaw::w_lo() const
{
    if (w_discrete()) return *std::min_element(support_.begin(), support_.end());
    if (normal_) return normal_->lo();
    return 0.0;
}

double PolicyLaw::w_hi() const
{
    if (w_discrete()) return *std::max_element(support_.begin(), support_.end());
    if (normal_) return normal_->hi();
    return 1.0;
}

double PolicyLaw::propensity(double x) const
{
    PolicyPoint p;
    p.x = x;
    return propensity_.eval(p);
}

std::vector<PolicyAtom> PolicyLaw::atoms(int nodes) const
{
    std::vector<PolicyAtom> out;
    switch (family_) {
    case Family::bernoulli:
    case Family::discrete:
        for (std::size_t i = 0; i < support_.size(); ++i) {
            PolicyAtom a;
            a.point.w = support_[i];
            a.weight = probs_[i];
            out.push_back(a);
        }
        break;
    case Family::truncated_normal: {
        numerics::CompositeRule rule(normal_->lo(), normal_->hi(), nodes);
        for (std::size_t i = 0; i < rule.size(); ++i) {
            PolicyAtom a;
            a.point.w = rule.nodes()[i];
            a.weight = rule.weights()[i] * normal_->pdf(a.point.w);
            out.push_back(a);
        }
        break;
    }
    case Family::covariate: {
        auto push = [&](double x, double px) {
            const double p = propensity(x);
            PolicyAtom a0, a1;
            a0.point.x = a1.point.x = x;
            a0.point.w = 0.0;
            a1.point.w = 1.0;
            a0.weight = px * (1.0 - p);
            a1.weight = px * p;
            out.push_back(a0);
            out.push_back(a1);
        };
        if (x_discrete()) {
            for (std::size_t i = 0; i < x_support_.size(); ++i) push(x_support_[i], x_probs_[i]);
        } else {
            numerics::CompositeRule rule(x_lo_, x_hi_, nodes);
            for (std::size_t i = 0; i < rule.size(); ++i)
                push(rule.nodes()[i], rule.weights()[i] / (x_hi_ - x_lo_));
        }
        break;
    }
    case Family::instrument:
        for (int z = 0; z <= 1; ++z) {
            const double pz = z ? z_prob_ : 1.0 - z_prob_;
            const double cut = p_at(z);
            // W = 1 on xi < p(z), W = 0 above; each piece gets its own rule.
            const std::pair<double, double> pieces[2] = {{0.0, cut}, {cut, 1.0}};
            for (int k = 0; k < 2; ++k) {
                const auto [a, b] = pieces[k];
                if (!(b > a)) continue;
                numerics::CompositeRule rule(a, b, std::max(numerics::CompositeRule::kOrder,
                                                            static_cast<int>(nodes * (b - a))));
                for (std::size_t i = 0; i < rule.size(); ++i) {
                    PolicyAtom at;
                    at.point.z = z;
                    at.point.xi = rule.nodes()[i];
                    at.point.w = k == 0 ? 1.0 : 0.0;
                    at.weight = pz * rule.weights()[i];
                    out.push_back(at);
                }
            }
        }
        break;
    }
    return out;
}

PolicyPoint PolicyLaw::sample(numerics::CounterRng& rng) const
{
    PolicyPoint p;
    switch (family_) {
    case Family::bernoulli:
    case Family::discrete:
        p.w = support_[pick(probs_, rng.uniform())];
        break;
    case Family::truncated_normal:
        p.w = normal_->quantile(rng.uniform());
        break;
    case Family::covariate: {
        const double ux = rng.uniform();
        p.x = x_discrete() ? x_support_[pick(x_probs_, ux)] : x_lo_ + ux * (x_hi_ - x_lo_);
        p.w = rng.uniform() < propensity(p.x) ? 1.0 : 0.0;
        break;
    }
    case Family::instrument:
        p.z = rng.uniform() < z_prob_ ? 1.0 : 0.0;
        p.xi = rng.uniform();
        p.w = p_at(static_cast<int>(p.z)) > p.xi ? 1.0 : 0.0;
        break;
    }
    return p;
}

} // namespace mpelab::population
