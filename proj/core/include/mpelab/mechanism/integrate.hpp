#pragma once

#include <array>
#include <functional>
#include <memory>
#include <vector>

#include "mpelab/mechanism/mechanism.hpp"
#include "mpelab/numerics/quadrature.hpp"
#include "mpelab/population/polynomial.hpp"

namespace mpelab::mechanism {

// Tensor quadrature over the report space: every type crossed with composite
// Gauss-Legendre rules on the continuous coordinates.
struct ReportGrid {
    int n_types = 1;
    int n_cont = 0;
    std::array<numerics::CompositeRule, 2> axes;
};

// Panels are aligned with the mechanism's cuts at c, the report densities' kinks and `extra`.
ReportGrid make_grid(const ReportDistribution& d, const Mechanism* mech, const Vec* c,
                     const std::array<std::vector<double>, 2>& extra = {});

// Calls f(r, qw, dens) at every node, with dens[k] the joint density of component k at r.
template <class F>
void visit(const ReportDistribution& d, const ReportGrid& g, F&& f)
{
    const std::size_t nk = d.components();
    std::vector<double> dens(nk), base(nk);
    Report r;
    if (g.n_cont == 0) {
        for (int t = 0; t < g.n_types; ++t) {
            r.type = t;
            const double tilt = d.tilt_factor(r);
            for (std::size_t k = 0; k < nk; ++k)
                dens[k] = d.component_weight(k) * d.law(k).type_probs[static_cast<std::size_t>(t)] * tilt;
            f(r, 1.0, dens.data());
        }
        return;
    }
    if (g.n_cont == 1) {
        const auto& ax = g.axes[0];
        for (std::size_t i = 0; i < ax.size(); ++i) {
            r.x[0] = ax.nodes()[i];
            for (std::size_t k = 0; k < nk; ++k) base[k] = d.component_weight(k) * d.law(k).coords[0]->pdf(r.x[0]);
            for (int t = 0; t < g.n_types; ++t) {
                r.type = t;
                const double tilt = d.tilt_factor(r);
                for (std::size_t k = 0; k < nk; ++k)
                    dens[k] = base[k] * d.law(k).type_probs[static_cast<std::size_t>(t)] * tilt;
                f(r, ax.weights()[i], dens.data());
            }
        }
        return;
    }
    const auto& a0 = g.axes[0];
    const auto& a1 = g.axes[1];
    std::vector<double> f0(nk * a0.size()), f1(nk * a1.size());
    for (std::size_t k = 0; k < nk; ++k) {
        for (std::size_t i = 0; i < a0.size(); ++i) f0[k * a0.size() + i] = d.law(k).coords[0]->pdf(a0.nodes()[i]);
        for (std::size_t j = 0; j < a1.size(); ++j) f1[k * a1.size() + j] = d.law(k).coords[1]->pdf(a1.nodes()[j]);
    }
    for (std::size_t i = 0; i < a0.size(); ++i) {
        r.x[0] = a0.nodes()[i];
        for (std::size_t j = 0; j < a1.size(); ++j) {
            r.x[1] = a1.nodes()[j];
            const double qw = a0.weights()[i] * a1.weights()[j];
            for (std::size_t k = 0; k < nk; ++k)
                base[k] = d.component_weight(k) * f0[k * a0.size() + i] * f1[k * a1.size() + j];
            for (int t = 0; t < g.n_types; ++t) {
                r.type = t;
                const double tilt = d.tilt_factor(r);
                for (std::size_t k = 0; k < nk; ++k)
                    dens[k] = base[k] * d.law(k).type_probs[static_cast<std::size_t>(t)] * tilt;
                f(r, qw, dens.data());
            }
        }
    }
}

// Calls f(r, qw * p(r)) with p the joint density of one conditional report law.
template <class F>
void visit_law(const population::ConditionalReportLaw& law, const ReportGrid& g, F&& f)
{
    Report r;
    auto types = [&](double qw) {
        for (int t = 0; t < g.n_types; ++t) {
            const double p = law.type_probs[static_cast<std::size_t>(t)];
            if (p == 0.0) continue;
            r.type = t;
            f(r, qw * p);
        }
    };
    if (g.n_cont == 0) {
        types(1.0);
        return;
    }
    const auto& a0 = g.axes[0];
    if (g.n_cont == 1) {
        for (std::size_t i = 0; i < a0.size(); ++i) {
            r.x[0] = a0.nodes()[i];
            const double p = law.coords[0]->pdf(r.x[0]);
            if (p != 0.0) types(a0.weights()[i] * p);
        }
        return;
    }
    const auto& a1 = g.axes[1];
    for (std::size_t i = 0; i < a0.size(); ++i) {
        r.x[0] = a0.nodes()[i];
        const double p0 = law.coords[0]->pdf(r.x[0]);
        if (p0 == 0.0) continue;
        for (std::size_t j = 0; j < a1.size(); ++j) {
            r.x[1] = a1.nodes()[j];
            const double p = p0 * law.coords[1]->pdf(r.x[1]);
            if (p != 0.0) types(a0.weights()[i] * a1.weights()[j] * p);
        }
    }
}

// Per-component conditional expectation of an allocation-specific outcome:
// value(k, a, r) = sum_{i in k} w_i lambda_i g_i(a, r) / sum_{i in k} w_i.
class OutcomeField {
public:
    virtual ~OutcomeField() = default;
    virtual int allocations() const = 0;
    virtual double value(std::size_t k, int a, const Report& r) const = 0;
};

using OutcomeFieldPtr = std::shared_ptr<const OutcomeField>;

// Conditional means m~ collapsed to polynomials in the report per component; lambda
// (one entry per atom) multiplies each atom, e.g. by the policy score.
class PolynomialField final : public OutcomeField {
public:
    PolynomialField(const ReportDistribution& d, const population::OutcomeLaw& law,
                    const std::vector<double>* lambda = nullptr);
    int allocations() const override { return static_cast<int>(polys_.empty() ? 0 : polys_[0].size()); }
    double value(std::size_t k, int a, const Report& r) const override
    {
        return polys_[k][static_cast<std::size_t>(a)].eval(r);
    }
    double d_report(std::size_t k, int a, int coord, const Report& r) const
    {
        return polys_[k][static_cast<std::size_t>(a)].d_report(coord, r);
    }

private:
    std::vector<std::vector<population::ReportPolynomial>> polys_;
};

// E[g(m~ + e) | atom] supplied as a function of the conditional mean, averaged over the atoms of each component.
class TransformField final : public OutcomeField {
public:
    TransformField(const ReportDistribution& d, const population::OutcomeLaw& law,
                   std::function<double(double)> g, const std::vector<double>* lambda = nullptr);
    int allocations() const override { return law_->allocations(); }
    double value(std::size_t k, int a, const Report& r) const override;

private:
    const population::Population* pop_;
    const population::OutcomeLaw* law_;
    std::function<double(double)> g_;
    std::vector<std::vector<std::pair<std::size_t, double>>> members_;  // (atom, normalised weight * lambda)
};

class IndicatorField final : public OutcomeField {
public:
    IndicatorField(int allocations, int target) : n_(allocations), target_(target) {}
    int allocations() const override { return n_; }
    double value(std::size_t, int a, const Report&) const override { return a == target_ ? 1.0 : 0.0; }

private:
    int n_, target_;
};

// sum_a integral field(a, r) mu_a(r, c, P) dP(r). `mech_dist` is the distribution the
// mechanism sees, which differs from d only in partial (frozen-population) derivatives.
double integrate_welfare(const ReportDistribution& d, const ReportGrid& g, const Mechanism& mech, const Vec& c,
                         const OutcomeField& field, const ReportDistribution* mech_dist = nullptr);

Vec aggregate_shares(const ReportDistribution& d, const ReportGrid& g, const Mechanism& mech, const Vec& c);

// integral of fn(r) sum_k mass_k / W_k dens_k(r): E[fn(R) lambda] when mass = component_mass(lambda).
double report_moment(const ReportDistribution& d, const ReportGrid& g, const std::function<double(const Report&)>& fn,
                     const std::vector<double>& mass);

struct FaceSegment {
    int type = 0;
    int coord = 0;
    int clearing = 0;
    int a_plus = 0;     // allocation gaining probability on the eligible side of the cut
    int a_minus = 0;    // allocation losing it
    double density = 0.0;  // boundary density mass
    double jump = 0.0;     // integral of the field jump against the boundary density
    double share_jump = 0.0;  // integral of the jump in mu_{a_plus} against the boundary density
    double mean_jump() const { return density > 0.0 ? jump / density : 0.0; }
};

struct CDerivative {
    Vec boundary;
    Vec inframarginal;
    std::vector<FaceSegment> segments;
    Vec total() const { return boundary + inframarginal; }
};

// Derivative in c of integrate_welfare: moving-face terms -integral [G(x+) - G(x-)] dP over each
// cut plus the smooth (inframarginal) part.
CDerivative c_derivative(const ReportDistribution& d, const ReportGrid& g, const Mechanism& mech, const Vec& c,
                         const OutcomeField& field);

// Analytic Jacobian of the aggregate shares in c.
Mat share_jacobian(const ReportDistribution& d, const ReportGrid& g, const Mechanism& mech, const Vec& c);

// r -> E[s_W(W) | R = r] under d.
ReportScore induced_report_score(const ReportDistribution& d, const population::PolicyScore& s);

// Centred report score built from its scenario entry.
ReportScore make_report_score(const population::ReportScoreSpec& spec, const ReportDistribution& d);

// Five smooth report scores used when a scenario names none.
std::vector<population::ReportScoreSpec> default_report_scores(const population::ReportSpace& space);

} // namespace mpelab::mechanism
