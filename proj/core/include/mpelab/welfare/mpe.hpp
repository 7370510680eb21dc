#pragma once

#include <memory>
#include <string>
#include <vector>

#include "mpelab/clearing/equilibrium.hpp"
#include "mpelab/clearing/influence.hpp"
#include "mpelab/externality/gamma.hpp"
#include "mpelab/externality/psi.hpp"
#include "mpelab/externality/welfare_gradient.hpp"
#include "mpelab/mechanism/integrate.hpp"
#include "mpelab/population/sampling.hpp"
#include "mpelab/population/scenario.hpp"
#include "mpelab/welfare/functionals.hpp"

namespace mpelab::welfare {

// Everything the oracle-mode MPE needs at the baseline equilibrium. Holds references into
// itself, hence neither copyable nor movable; use build_model.
struct AnalyticModel {
    AnalyticModel() = default;
    AnalyticModel(const AnalyticModel&) = delete;
    AnalyticModel& operator=(const AnalyticModel&) = delete;

    const population::Population* pop = nullptr;
    mechanism::MechanismPtr mech;
    std::unique_ptr<ReportDistribution> d;
    clearing::EquilibriumState state;
    mechanism::ReportGrid grid;
    std::unique_ptr<WelfareFunctional> functional;
    mechanism::OutcomeFieldPtr field;
    bool supports_mpe = false;  // false for mechanisms without a welfare gradient (TTC)
    externality::WelfareGradient gradient;
    externality::CompetitionGamma gamma;
    externality::ConductTerm conduct;

    // Field for E[Y lambda(W) | k, a, r], with Y replaced by the functional's conditional influence.
    mechanism::OutcomeFieldPtr weighted_field(const std::vector<double>& lambda) const;
    std::vector<double> score_values(const population::PolicyScore& s) const;
};

// Solves the equilibrium and builds gradient, gamma and the conduct representer. `pop` must outlive the model.
std::shared_ptr<AnalyticModel> build_model(const population::Population& pop,
                                                 const FunctionalSpec& functional = {});

// Test-only: adds delta to every margin's tau and rebuilds the gradient and conduct term, so
// that the CI gate can be shown to trip.
void apply_tau_offset(AnalyticModel& m, double delta);

numerics::SolverOptions solver_options(const population::SolverConfig& cfg);

struct MpeComponents {
    double direct = 0.0;       // E[Y s_W]
    double competition = 0.0;  // E[gamma(R) s_W]
    double conduct = 0.0;      // E[Psi_conduct s_W], or the H1 pairing
    std::string pairing = "L2";
    double se = 0.0;           // sample modes only
    double total() const { return direct + competition + conduct; }
};

// E[Psi s_W] by quadrature. Throws ConfigError when the conduct term has no L2 representer.
MpeComponents mpe_covariance(const AnalyticModel& m, const population::PolicyScore& s);

// As mpe_covariance, with the conduct term written as grad . <psi, s_R> in the representer's
// own space, s_R the induced report score. Works for the H1 representer too.
MpeComponents mpe_general(const AnalyticModel& m, const population::PolicyScore& s);

// Conduct derivative c'[s_R] = <psi, s_R>.
mechanism::Vec conduct_derivative(const AnalyticModel& m, const population::ReportScore& s_r);

// E[Psi_total | policy point p] with R ~ law at the baseline equilibrium. L2 conduct terms only.
double conditional_psi(const AnalyticModel& m, const PolicyPoint& p, const population::ConditionalReportLaw& law);

// Sample analogue mean(Psi_i s_W(W_i)), split by component, with the standard error of the total.
MpeComponents mpe_sample(const externality::PsiDecomposition& psi, const population::AgentTable& agents,
                         const population::PolicyScore& s);

} // namespace mpelab::welfare
