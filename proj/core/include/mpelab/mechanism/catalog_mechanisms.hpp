#pragma once

#include <string>
#include <vector>

#include "mpelab/mechanism/mechanism.hpp"

namespace mpelab::mechanism {

// Report type 1 demands the good; each demander receives it with probability c.
class RandomRationing final : public Mechanism {
public:
    std::string id() const override { return "random_rationing"; }
    std::string description() const override { return "lottery among demanders, mu_1 = c 1{R = 1}"; }
    int allocations() const override { return 2; }
    int clearing_dim() const override { return 1; }
    void check_space(const population::ReportSpace& space) const override;
    Vec lower_bound(const population::ReportSpace&) const override { return Vec::Zero(1); }
    Vec upper_bound(const population::ReportSpace&) const override { return Vec::Ones(1); }
    double smooth_part(int a, const Report& r, const Vec& c, const ReportDistribution& d) const override;
    double eligibility(int, const Report&, const Vec&) const override { return 0.0; }
    Vec grad_c_smooth(int a, const Report& r, const Vec& c, const ReportDistribution& d) const override;
    Vec grad_c_eligibility(int, const Report&, const Vec&) const override { return Vec::Zero(1); }
    Vec grad_r_eligibility(int, const Report&, const Vec&) const override { return Vec(); }
    bool smooth_depends_on_c() const override { return true; }
    std::vector<Cut> cuts() const override { return {}; }
};

// Deterministic allocation above a price cutoff on the first continuous coordinate.
class PriceCutoff final : public Mechanism {
public:
    std::string id() const override { return "price_cutoff"; }
    std::string description() const override { return "mu_1 = 1{R >= c}"; }
    int allocations() const override { return 2; }
    int clearing_dim() const override { return 1; }
    void check_space(const population::ReportSpace& space) const override;
    Vec lower_bound(const population::ReportSpace& space) const override;
    Vec upper_bound(const population::ReportSpace& space) const override;
    double smooth_part(int, const Report&, const Vec&, const ReportDistribution&) const override { return 1.0; }
    double eligibility(int a, const Report& r, const Vec& c) const override;
    Vec grad_c_eligibility(int a, const Report& r, const Vec& c) const override;
    Vec grad_r_eligibility(int a, const Report& r, const Vec& c) const override;
    std::vector<Cut> cuts() const override { return {{0, 0}}; }
};

// Second-price auction among n i.i.d. bidders with reserve c; the agent wins when it
// clears the reserve and outbids the n - 1 competitors.
class SecondPriceAuction final : public Mechanism {
public:
    explicit SecondPriceAuction(int n);
    std::string id() const override { return "second_price_auction"; }
    std::string description() const override;
    int participants() const { return n_; }
    int allocations() const override { return 2; }
    int clearing_dim() const override { return 1; }
    void check_space(const population::ReportSpace& space) const override;
    Vec lower_bound(const population::ReportSpace& space) const override;
    Vec upper_bound(const population::ReportSpace& space) const override;
    double smooth_part(int a, const Report& r, const Vec& c, const ReportDistribution& d) const override;
    double eligibility(int a, const Report& r, const Vec& c) const override;
    Vec grad_c_eligibility(int a, const Report& r, const Vec& c) const override;
    Vec grad_r_eligibility(int a, const Report& r, const Vec& c) const override;
    std::vector<Cut> cuts() const override { return {{0, 0}}; }
    bool smooth_depends_on_distribution() const override { return true; }
    double kernel_L(int a, const Report& r, const Report& rp, const Vec& c, const ReportDistribution& d) const override;
    double kernel_envelope(const Report& r, const Vec& c, const ReportDistribution& d) const override;
    double competitor_kernel_mean(int a, const Report& rp, const Vec& c, const ReportDistribution& d) const override;
    Vec conduct_kernel(const Report& r, const Vec& c, const ReportDistribution& d) const override;

private:
    int n_;
};

// Two-school deferred acceptance in the continuum: the agent goes to the most preferred
// acceptable school whose cutoff its score clears. Types are the six strict rankings of {0, 1, 2}.
class TwoSchoolDA final : public Mechanism {
public:
    static const std::vector<std::string>& type_labels();
    // Acceptable schools in preference order for each type.
    static const std::vector<std::vector<int>>& rankings();

    std::string id() const override { return "two_school_da"; }
    std::string description() const override { return "continuum deferred acceptance with score cutoffs (c_1, c_2)"; }
    int allocations() const override { return 3; }
    int clearing_dim() const override { return 2; }
    void check_space(const population::ReportSpace& space) const override;
    Vec lower_bound(const population::ReportSpace& space) const override;
    Vec upper_bound(const population::ReportSpace& space) const override;
    double smooth_part(int, const Report&, const Vec&, const ReportDistribution&) const override { return 1.0; }
    double eligibility(int a, const Report& r, const Vec& c) const override;
    Vec grad_c_eligibility(int a, const Report& r, const Vec& c) const override;
    Vec grad_r_eligibility(int a, const Report& r, const Vec& c) const override;
    Alloc allocation(const Report& r, const Vec& c, const ReportDistribution& d) const override;
    std::vector<Cut> cuts() const override { return {{0, 0}, {1, 1}}; }

private:
    // Index of the argument attaining the min in the composed eligibility index.
    int active_term(int a, const Report& r, const Vec& c, double* value) const;
};

// Two-school top trading cycles with uniform priorities. Clearing vector (c11, c12, c21, c22)
// with c_{b,a} the priority at school b that admits to school a.
class TTCParametric final : public Mechanism {
public:
    static int index(int priority_school, int destination) { return 2 * (priority_school - 1) + (destination - 1); }

    std::string id() const override { return "ttc_parametric"; }
    std::string description() const override { return "two-school TTC via budget sets {a : exists b, V_b >= c_{b,a}}"; }
    int allocations() const override { return 3; }
    int clearing_dim() const override { return 4; }
    void check_space(const population::ReportSpace& space) const override;
    Vec lower_bound(const population::ReportSpace&) const override { return Vec::Zero(4); }
    Vec upper_bound(const population::ReportSpace&) const override { return Vec::Ones(4); }
    double smooth_part(int, const Report&, const Vec&, const ReportDistribution&) const override { return 1.0; }
    double eligibility(int a, const Report& r, const Vec& c) const override;
    Vec grad_c_eligibility(int a, const Report& r, const Vec& c) const override;
    Vec grad_r_eligibility(int a, const Report& r, const Vec& c) const override;
    Alloc allocation(const Report& r, const Vec& c, const ReportDistribution& d) const override;
    std::vector<Cut> cuts() const override { return {{0, 0}, {0, 1}, {1, 2}, {1, 3}}; }
    int share_allocation(int l) const override { return l % 2 + 1; }
    bool supports_gradient() const override { return false; }

    bool in_budget(int school, const Report& r, const Vec& c) const;
};

} // namespace mpelab::mechanism
