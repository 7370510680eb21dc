#pragma once

#include <array>
#include <string>
#include <vector>

#include "mpelab/population/density.hpp"
#include "mpelab/population/polynomial.hpp"
#include "mpelab/population/types.hpp"

namespace mpelab::population {

struct ReportSpace {
    int n_types = 1;
    int n_cont = 0;
    std::array<double, 2> lo{0.0, 0.0};
    std::array<double, 2> hi{1.0, 1.0};
    std::vector<std::string> type_labels;
};

// R | policy point: type label and continuous coordinates, independent given the point.
struct ConditionalReportLaw {
    std::vector<double> type_probs;
    std::vector<DensityPtr> coords;

    double pdf(const Report& r) const;
    // Density of the continuous coordinates only (no type mass).
    double cont_pdf(const Report& r) const;
    // Derivative of pdf in continuous coordinate `coord`.
    double dpdf(const Report& r, int coord) const;
};

struct CoordinateSpec {
    enum class Family { uniform, legendre, truncated_normal, location_shift };
    Family family = Family::uniform;
    std::vector<Polynomial> legendre_coef;  // k_1, k_2, ... as functions of (w, x)
    Polynomial location;                    // mean (truncated normal) or shift (location shift)
    double scale = 0.0;                     // sd or kernel half-width
    Kernel kernel = Kernel::biweight;
};

// Conditional report law as a function of the policy point.
class ReportLaw {
public:
    ReportLaw() = default;
    ReportLaw(ReportSpace space, std::vector<Polynomial> type_prob, std::vector<CoordinateSpec> coords);

    const ReportSpace& space() const { return space_; }
    ConditionalReportLaw at(const PolicyPoint& p) const;
    Report sample(const PolicyPoint& p, double u_type, double u1, double u2) const;
    // As sample, from a law already evaluated at the agent's policy point.
    Report sample(const ConditionalReportLaw& law, double u_type, double u1, double u2) const;
    // True when the law does not vary with the policy point.
    bool policy_invariant() const;
    const std::vector<CoordinateSpec>& coordinates() const { return coords_; }
    const std::vector<Polynomial>& type_probabilities() const { return type_prob_; }

private:
    ReportSpace space_;
    std::vector<Polynomial> type_prob_;  // n_types - 1 entries; the last type takes the remainder
    std::vector<CoordinateSpec> coords_;
};

} // namespace mpelab::population
