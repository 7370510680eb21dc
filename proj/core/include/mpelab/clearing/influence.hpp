#pragma once

#include <array>
#include <functional>
#include <memory>
#include <vector>

#include "mpelab/clearing/equilibrium.hpp"

namespace mpelab::clearing {

using population::ReportScore;

// Representer of c'[s_R]. In L2, c'[s] = E[psi(R) s(R)]. In the weighted Sobolev space H1,
// c'[s] = integral (psi s + psi' s') f over the bid support.
class InfluenceFunction {
public:
    enum class Space { L2, SobolevH1 };

    InfluenceFunction() = default;

    // `breaks` are the points per continuous coordinate where psi jumps.
    static InfluenceFunction l2(std::function<Vec(const Report&)> eval, int dim,
                                std::array<std::vector<double>, 2> breaks = {});
    static InfluenceFunction h1(std::vector<double> nodes, std::vector<double> values, double lo, double hi);

    Space space() const { return space_; }
    int dim() const { return dim_; }
    Vec operator()(const Report& r) const;

    // H1 only: the piecewise-linear solution on its grid.
    double value_1d(double x) const;
    double derivative_1d(double x) const;
    const std::vector<double>& nodes() const { return nodes_; }
    const std::vector<double>& values() const { return values_; }

    // The inner product of the representer's space with the report score under d.
    Vec pairing(const ReportDistribution& d, const ReportScore& s) const;

    // Set by sturm_liouville_representer.
    double linear_residual = 0.0;
    double defining_property_error = 0.0;

private:
    Space space_ = Space::L2;
    int dim_ = 0;
    std::function<Vec(const Report&)> eval_;
    std::array<std::vector<double>, 2> breaks_;
    std::vector<double> nodes_, values_;
    double lo_ = 0.0, hi_ = 1.0;
};

// psi(r) = -J^{-1} k(r) with k the mechanism's conduct kernel: mu_share itself, plus the
// competitor term for the auction. mech and d must outlive the result.
InfluenceFunction influence_function_L2(const EquilibriumState& state, const Mechanism& mech, const ReportDistribution& d);

// Linear functional c'[s] = -K (E[s 1{R <= c0}] + c0 f(c0) s(c0)), K = 1 / (2 f(c0) + c0 f'(c0)):
// the implicit-function derivative of the Myerson reserve.
double myerson_ift_functional(const ReportDistribution& d, double c0, const ReportScore& s);

// H1 representer of the Myerson functional: psi f - (psi' f)' = kappa (1{r <= c0} f + c0 f(c0) delta_c0),
// kappa = -K, natural boundary conditions. Piecewise-linear finite elements with a node at c0.
// Throws SolverError when the defining property fails on five smooth test scores.
InfluenceFunction sturm_liouville_representer(const ReportDistribution& d, double c0, int grid_nodes = 4096);

} // namespace mpelab::clearing
