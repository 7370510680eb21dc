#pragma once

#include <array>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mpelab/mechanism/report_distribution.hpp"
#include "mpelab/population/scenario.hpp"

namespace mpelab::mechanism {

constexpr int kMaxAllocations = 4;
using Alloc = std::array<double, kMaxAllocations>;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Allocations change across x[coord] = c[clearing]; the side x >= c is the eligible one.
struct Cut {
    int coord;
    int clearing;
};

// mu_a(r, c, P) = h_a(r, c, P) 1{phi_a(r, c) >= 0} for a >= 1; a = 0 is the outside
// option and absorbs the residual mass.
class Mechanism {
public:
    virtual ~Mechanism() = default;

    virtual std::string id() const = 0;
    virtual std::string description() const = 0;
    virtual int allocations() const = 0;
    virtual int clearing_dim() const = 0;
    virtual void check_space(const population::ReportSpace& space) const = 0;
    virtual Vec lower_bound(const population::ReportSpace& space) const = 0;
    virtual Vec upper_bound(const population::ReportSpace& space) const = 0;
    // Throws DomainError when c lies outside the admissible region.
    void check_clearing(const Vec& c, const population::ReportSpace& space) const;

    virtual double smooth_part(int a, const Report& r, const Vec& c, const ReportDistribution& d) const = 0;
    virtual double eligibility(int a, const Report& r, const Vec& c) const = 0;
    virtual Vec grad_c_smooth(int a, const Report& r, const Vec& c, const ReportDistribution& d) const;
    virtual Vec grad_c_eligibility(int a, const Report& r, const Vec& c) const = 0;
    virtual Vec grad_r_eligibility(int a, const Report& r, const Vec& c) const = 0;

    virtual Alloc allocation(const Report& r, const Vec& c, const ReportDistribution& d) const;
    // d mu_a / d c holding the eligibility indicators fixed; rows are allocations.
    Mat smooth_jacobian(const Report& r, const Vec& c, const ReportDistribution& d) const;
    virtual bool smooth_depends_on_c() const { return false; }

    virtual std::vector<Cut> cuts() const = 0;
    // Breakpoints in coordinate `coord` at which the allocation may jump.
    std::vector<double> breakpoints(int coord, const Vec& c) const;

    // Functional derivative of h_a in the report distribution. Only the auction has one;
    // there L_1(r, r') = envelope(r) 1{r'_0 <= r_0} and L_0 = -L_1.
    virtual bool smooth_depends_on_distribution() const { return false; }
    virtual double kernel_L(int a, const Report& r, const Report& rp, const Vec& c, const ReportDistribution& d) const;
    virtual double kernel_envelope(const Report& r, const Vec& c, const ReportDistribution& d) const;
    // integral of L_a(r, r') dP(r).
    virtual double competitor_kernel_mean(int a, const Report& rp, const Vec& c, const ReportDistribution& d) const;

    // Allocation whose aggregate share the clearing coordinate l controls.
    virtual int share_allocation(int l) const { return l + 1; }
    // Representer k(r) of the derivative of the aggregate shares along report tilts,
    // normalised to vanish at the bottom of the report support.
    virtual Vec conduct_kernel(const Report& r, const Vec& c, const ReportDistribution& d) const;
    // False for mechanisms whose welfare gradient is outside the implemented face calculus.
    virtual bool supports_gradient() const { return true; }
};

using MechanismPtr = std::shared_ptr<const Mechanism>;

MechanismPtr make_mechanism(const population::MechanismConfig& cfg);
std::vector<std::string> mechanism_ids();

} // namespace mpelab::mechanism
