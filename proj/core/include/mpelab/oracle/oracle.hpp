#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mpelab/welfare/mpe.hpp"

namespace mpelab::oracle {

using mechanism::ReportDistribution;
using mechanism::Vec;
using population::Population;
using welfare::AnalyticModel;
using welfare::FunctionalSpec;

struct OracleConfig {
    std::string mode = "quadrature";  // quadrature | mc
    std::vector<double> steps{1e-2, 5e-3, 2.5e-3};
    std::size_t mc_samples = 100000;
    std::uint64_t seed = 3;
    bool coupling = true;             // mc: the same allocation and noise streams at +h and -h
    double solve_tol = 1e-13;
};

struct FdResult {
    std::string mode;
    double value = 0.0;
    double se = 0.0;              // mc only
    double error_estimate = 0.0;  // |last Richardson value - previous one|
    double order = 0.0;           // observed convergence order of the central differences
    bool exact = false;           // differences agree to roundoff, so no order can be measured
    bool order_ok = true;         // order in [1.9, 2.1] or exact
    std::vector<double> steps;
    std::vector<double> central;  // central difference per step
};

// Welfare functional along theta -> f_W (1 + theta s_W), re-solving the equilibrium. c_out receives c(theta).
double welfare_at(const Population& pop, const FunctionalSpec& f, const population::PolicyScore& s, double theta,
                  const OracleConfig& cfg = {}, Vec* c_out = nullptr);

// d/dtheta of welfare_at at zero: central differences with Richardson extrapolation, or the
// coupled Monte Carlo estimate in mc mode.
FdResult fd_mpe(const Population& pop, const FunctionalSpec& f, const population::PolicyScore& s,
                const OracleConfig& cfg = {});

struct FdVector {
    Vec value;
    Vec error_estimate;
};

// Central differences of the fixed-population welfare in c at the model's equilibrium.
FdVector fd_gradient_c(const AnalyticModel& m, double rel_step = 1e-4);

// dc/dtheta along the report tilt (1 + theta s_R) dP.
FdVector fd_conduct_derivative(const AnalyticModel& m, const population::ReportScore& s_r, const OracleConfig& cfg = {});

// d/dtheta of U(c0, P_theta) with the outcome composition frozen at P_0 and only the mechanism's
// smooth part seeing P_theta: the competition term.
FdResult fd_partial_competition(const AnalyticModel& m, const population::PolicyScore& s, const OracleConfig& cfg = {});

// Richardson extrapolation of central differences g(h) = (f(h) - f(-h)) / 2h over the given steps.
FdResult richardson(const std::function<double(double)>& f, const std::vector<double>& steps, double scale);

} // namespace mpelab::oracle
