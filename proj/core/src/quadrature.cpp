#include "mpelab/numerics/quadrature.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss.hpp>

#include "mpelab/errors.hpp"

namespace mpelab::numerics {

namespace {

using Gauss = boost::math::quadrature::gauss<double, CompositeRule::kOrder>;

// Full symmetric node/weight set on [-1, 1].
struct ReferenceRule {
    std::vector<double> x;
    std::vector<double> w;
    ReferenceRule()
    {
        const auto& a = Gauss::abscissa();
        const auto& wt = Gauss::weights();
        for (std::size_t i = a.size(); i-- > 0;) {
            if (a[i] == 0.0) continue;
            x.push_back(-a[i]);
            w.push_back(wt[i]);
        }
        for (std::size_t i = 0; i < a.size(); ++i) {
            x.push_back(a[i]);
            w.push_back(wt[i]);
        }
    }
};

const ReferenceRule& reference()
{
    static const ReferenceRule rule;
    return rule;
}

void append_panel(double a, double b, std::vector<double>& nodes, std::vector<double>& weights)
{
    const auto& ref = reference();
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    for (std::size_t i = 0; i < ref.x.size(); ++i) {
        nodes.push_back(mid + half * ref.x[i]);
        weights.push_back(half * ref.w[i]);
    }
}

} // namespace

std::vector<double> interior_breakpoints(double lo, double hi, std::vector<double> points)
{
    std::vector<double> out;
    for (double p : points)
        if (p > lo && p < hi) out.push_back(p);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

CompositeRule::CompositeRule(double lo, double hi, int total_nodes, const std::vector<double>& breakpoints)
    : lo_(lo), hi_(hi)
{
    if (!(hi > lo)) throw DomainError("quadrature interval must have positive length");
    if (total_nodes < kOrder) total_nodes = kOrder;
    std::vector<double> edges{lo};
    for (double b : interior_breakpoints(lo, hi, breakpoints)) edges.push_back(b);
    edges.push_back(hi);

    const int total_panels = std::max<int>(total_nodes / kOrder, static_cast<int>(edges.size()) - 1);
    const double length = hi - lo;
    nodes_.reserve(static_cast<std::size_t>(total_panels + edges.size()) * kOrder);
    weights_.reserve(nodes_.capacity());
    for (std::size_t s = 0; s + 1 < edges.size(); ++s) {
        const double a = edges[s], b = edges[s + 1];
        const int panels = std::max(1, static_cast<int>(std::lround(total_panels * (b - a) / length)));
        const double step = (b - a) / panels;
        for (int p = 0; p < panels; ++p) {
            const double pa = a + p * step;
            const double pb = (p + 1 == panels) ? b : a + (p + 1) * step;
            append_panel(pa, pb, nodes_, weights_);
        }
    }
}

double CompositeRule::integrate(const std::function<double(double)>& f) const
{
    double s = 0.0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) s += weights_[i] * f(nodes_[i]);
    return s;
}

double gauss_legendre(const std::function<double(double)>& f, double a, double b)
{
    if (b == a) return 0.0;
    const auto& ref = reference();
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double s = 0.0;
    for (std::size_t i = 0; i < ref.x.size(); ++i) s += ref.w[i] * f(mid + half * ref.x[i]);
    return half * s;
}

double gauss_legendre_panels(const std::function<double(double)>& f, double a, double b, int panels)
{
    if (panels < 1) panels = 1;
    const double step = (b - a) / panels;
    double s = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double pa = a + p * step;
        const double pb = (p + 1 == panels) ? b : a + (p + 1) * step;
        s += gauss_legendre(f, pa, pb);
    }
    return s;
}

} // namespace mpelab::numerics
