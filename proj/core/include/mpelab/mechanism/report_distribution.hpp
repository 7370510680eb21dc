#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "mpelab/population/density.hpp"
#include "mpelab/population/scenario.hpp"
#include "mpelab/population/score.hpp"

namespace mpelab::mechanism {

using population::Population;
using population::ReportScore;

// The population-wide report distribution: a mixture of the component laws with weights
// induced by the current policy-atom weights, optionally tilted by (1 + theta s_R(r)).
class ReportDistribution {
public:
    ReportDistribution(const Population& pop, std::vector<double> atom_weights);
    explicit ReportDistribution(const Population& pop) : ReportDistribution(pop, pop.baseline_weights()) {}

    ReportDistribution tilted(const ReportScore& s, double theta) const;

    const Population& population() const { return *pop_; }
    const population::ReportSpace& space() const { return pop_->space(); }
    const std::vector<double>& atom_weights() const { return atom_weights_; }
    std::size_t components() const { return comp_weight_.size(); }
    double component_weight(std::size_t k) const { return comp_weight_[k]; }
    const population::ConditionalReportLaw& law(std::size_t k) const { return pop_->components()[k].law; }
    bool is_tilted() const { return tilt_theta_ != 0.0; }
    const ReportScore& tilt() const { return tilt_; }
    double tilt_theta() const { return tilt_theta_; }
    double tilt_factor(const Report& r) const { return is_tilted() ? 1.0 + tilt_theta_ * tilt_(r) : 1.0; }

    // Joint density (type mass times continuous density) contributed by component k.
    double density(std::size_t k, const Report& r) const;
    double pdf(const Report& r) const;
    double type_mass(int t) const;

    // Marginal law of continuous coordinate `coord`, pooled over types and components.
    double marginal_pdf(int coord, double x) const;
    double marginal_cdf(int coord, double x) const;
    double marginal_dpdf(int coord, double x) const;
    double marginal_quantile(int coord, double u) const;

    std::vector<double> kinks(int coord) const;

    // Mass per component of an atom-level multiplier: sum over atoms of weight * lambda.
    std::vector<double> component_mass(const std::vector<double>& lambda) const;

private:
    double tilted_cdf_correction(int coord, double x) const;
    // sum_k W_k p_k(type) f_k(x) without the tilt.
    double untilted_joint(const Report& r) const;
    double untilted_joint_dx(const Report& r) const;

    const Population* pop_;
    std::vector<double> atom_weights_;
    std::vector<double> comp_weight_;
    // Exact pooled marginal when every component is a Legendre (or uniform) law on one interval.
    std::shared_ptr<const population::LegendreDensity> pooled_;
    // The same pooling per report type, with the type's total mass.
    std::vector<std::shared_ptr<const population::LegendreDensity>> pooled_type_;
    std::vector<double> pooled_type_mass_;
    ReportScore tilt_;
    double tilt_theta_ = 0.0;
};

} // namespace mpelab::mechanism
