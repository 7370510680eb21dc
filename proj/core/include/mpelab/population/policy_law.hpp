#pragma once

#include <memory>
#include <string>
#include <vector>

#include "mpelab/numerics/rng.hpp"
#include "mpelab/population/density.hpp"
#include "mpelab/population/polynomial.hpp"
#include "mpelab/population/types.hpp"

namespace mpelab::population {

struct PolicyAtom {
    PolicyPoint point;
    double weight = 0.0;
};

// Baseline law of the policy-side variables. Discrete laws are represented exactly by
// their atoms; continuous ones by Gauss-Legendre atoms aligned with any jump points.
class PolicyLaw {
public:
    enum class Family { bernoulli, discrete, truncated_normal, covariate, instrument };

    static PolicyLaw bernoulli(double p);
    static PolicyLaw discrete(std::vector<double> support, std::vector<double> probs);
    static PolicyLaw truncated_normal(double mean, double sd, double lo, double hi);
    // X discrete (support/probs) or uniform on [x_lo, x_hi] when support is empty; W | X ~ Bernoulli(propensity(x)).
    static PolicyLaw covariate(std::vector<double> x_support, std::vector<double> x_probs,
                               double x_lo, double x_hi, Polynomial propensity);
    // Z ~ Bernoulli(z_prob), xi ~ U(0,1), W = 1{p(Z) > xi} with p(0) = p0, p(1) = p1.
    static PolicyLaw instrument(double z_prob, double p0, double p1);

    Family family() const { return family_; }
    std::string family_name() const;

    // Quadrature atoms; `nodes` sets the resolution for continuous components.
    std::vector<PolicyAtom> atoms(int nodes) const;

    PolicyPoint sample(numerics::CounterRng& rng) const;

    // Support of W for the discrete families (bernoulli/discrete); empty otherwise.
    const std::vector<double>& support() const { return support_; }
    const std::vector<double>& probs() const { return probs_; }
    bool w_discrete() const { return family_ == Family::bernoulli || family_ == Family::discrete; }
    bool w_continuous() const { return family_ == Family::truncated_normal; }
    double w_lo() const;
    double w_hi() const;

    double propensity(double x) const;
    const Polynomial& propensity_polynomial() const { return propensity_; }
    double instrument_prob() const { return z_prob_; }
    double p_at(int z) const { return z ? p1_ : p0_; }
    bool x_discrete() const { return !x_support_.empty(); }
    const std::vector<double>& x_support() const { return x_support_; }
    const std::vector<double>& x_probs() const { return x_probs_; }
    double x_lo() const { return x_lo_; }
    double x_hi() const { return x_hi_; }
    const TruncatedNormalDensity* normal() const { return normal_.get(); }

private:
    Family family_ = Family::bernoulli;
    std::vector<double> support_, probs_;
    std::shared_ptr<const TruncatedNormalDensity> normal_;
    std::vector<double> x_support_, x_probs_;
    double x_lo_ = 0.0, x_hi_ = 1.0;
    Polynomial propensity_;
    double z_prob_ = 0.5, p0_ = 0.0, p1_ = 0.0;
};

} // namespace mpelab::population
