#pragma once

#include <memory>
#include <string>
#include <vector>

#include "mpelab/mechanism/integrate.hpp"
#include "mpelab/mechanism/mechanism.hpp"

namespace mpelab::welfare {

using mechanism::Mechanism;
using mechanism::ReportDistribution;
using mechanism::Vec;

struct FunctionalSpec {
    std::string kind = "mean";  // mean | quantile | gini
    double tau_q = 0.5;
    std::string id() const;
};

// "mean", "gini", "quantile" (median) or "quantile:0.25".
FunctionalSpec parse_functional(const std::string& text);

// A welfare functional of the outcome distribution Y = m~(W, A, R) + e at (d, c), with its
// influence function. Quantile and Gini need normal outcome noise; pointwise = false skips
// the table behind influence(y) for the Gini.
class WelfareFunctional {
public:
    WelfareFunctional(const FunctionalSpec& spec, const Mechanism& mech, const ReportDistribution& d, const Vec& c,
                      const population::OutcomeLaw& law, bool pointwise = true);

    const FunctionalSpec& spec() const { return spec_; }
    double value() const { return value_; }
    double mean() const { return mean_; }
    double density_at_quantile() const { return fq_; }

    double influence(double y) const;
    // E[IF(m + e)] over the outcome noise.
    double conditional_influence(double m) const;
    // E[IF(Y)] under the baseline; zero up to quadrature.
    double mean_influence() const { return mean_if_; }

    // Field for the analytic pipeline: m~ itself for the mean, the conditional influence otherwise.
    mechanism::OutcomeFieldPtr field(const ReportDistribution& d, const std::vector<double>* lambda = nullptr) const;

private:
    double b_table(double m) const;   // E|m + e - Y|
    double a_table(double y) const;   // E|y - Y|

    FunctionalSpec spec_;
    const population::OutcomeLaw* law_;
    double sigma_ = 0.0;
    double value_ = 0.0, mean_ = 0.0, fq_ = 0.0, mean_if_ = 0.0;
    double gini_ = 0.0;
    std::vector<double> grid_, b_, db_, a_, da_;
};

// The statistic alone, e.g. for the finite-difference oracle.
double functional_value(const FunctionalSpec& spec, const Mechanism& mech, const ReportDistribution& d, const Vec& c,
                        const population::OutcomeLaw& law);

} // namespace mpelab::welfare
