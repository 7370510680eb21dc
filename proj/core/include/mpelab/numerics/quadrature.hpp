#pragma once

#include <functional>
#include <vector>

namespace mpelab::numerics {

struct QuadratureConfig {
    int nodes_1d = 2048;  // total nodes per continuous dimension
    int nodes_2d = 512;   // per-axis nodes for tensor rules on two-dimensional report spaces
    int policy_nodes = 256;  // atoms for continuous policy-side variables (W, X)
};

// Composite Gauss-Legendre rule on [lo, hi]. Panels are aligned with the supplied
// breakpoints so that integrands with jumps or kinks there are integrated to full order.
class CompositeRule {
public:
    static constexpr int kOrder = 20;

    CompositeRule() = default;
    CompositeRule(double lo, double hi, int total_nodes, const std::vector<double>& breakpoints = {});

    const std::vector<double>& nodes() const { return nodes_; }
    const std::vector<double>& weights() const { return weights_; }
    std::size_t size() const { return nodes_.size(); }
    double lo() const { return lo_; }
    double hi() const { return hi_; }

    double integrate(const std::function<double(double)>& f) const;

private:
    double lo_ = 0.0;
    double hi_ = 0.0;
    std::vector<double> nodes_;
    std::vector<double> weights_;
};

// Fixed order-20 Gauss-Legendre on [a, b]; the building block of CompositeRule.
double gauss_legendre(const std::function<double(double)>& f, double a, double b);

// Gauss-Legendre over [a, b] split into `panels` equal pieces.
double gauss_legendre_panels(const std::function<double(double)>& f, double a, double b, int panels);

// Sorted breakpoints strictly inside (lo, hi), duplicates removed.
std::vector<double> interior_breakpoints(double lo, double hi, std::vector<double> points);

} // namespace mpelab::numerics
