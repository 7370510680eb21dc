#include "mpelab/clearing/influence.hpp"

#include <algorithm>
#include <array>

#include "mpelab/errors.hpp"

namespace mpelab::clearing {

InfluenceFunction InfluenceFunction::l2(std::function<Vec(const Report&)> eval, int dim,
                                        std::array<std::vector<double>, 2> breaks)
{
    InfluenceFunction f;
    f.space_ = Space::L2;
    f.dim_ = dim;
    f.eval_ = std::move(eval);
    f.breaks_ = std::move(breaks);
    return f;
}

InfluenceFunction InfluenceFunction::h1(std::vector<double> nodes, std::vector<double> values, double lo, double hi)
{
    InfluenceFunction f;
    f.space_ = Space::SobolevH1;
    f.dim_ = 1;
    f.nodes_ = std::move(nodes);
    f.values_ = std::move(values);
    f.lo_ = lo;
    f.hi_ = hi;
    return f;
}

Vec InfluenceFunction::operator()(const Report& r) const
{
    if (space_ == Space::L2) return eval_(r);
    return Vec::Constant(1, value_1d(r.x[0]));
}

namespace {

std::size_t element_of(const std::vector<double>& nodes, double x)
{
    const auto it = std::upper_bound(nodes.begin(), nodes.end(), x);
    const std::size_t i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - nodes.begin(), 1));
    return std::min(i, nodes.size() - 1) - 1;
}

} // namespace

double InfluenceFunction::value_1d(double x) const
{
    if (space_ != Space::SobolevH1) throw DomainError("value_1d is defined for the H1 representer only");
    x = std::clamp(x, lo_, hi_);
    const std::size_t e = element_of(nodes_, x);
    const double t = (x - nodes_[e]) / (nodes_[e + 1] - nodes_[e]);
    return (1.0 - t) * values_[e] + t * values_[e + 1];
}

double InfluenceFunction::derivative_1d(double x) const
{
    if (space_ != Space::SobolevH1) throw DomainError("derivative_1d is defined for the H1 representer only");
    const std::size_t e = element_of(nodes_, std::clamp(x, lo_, hi_));
    return (values_[e + 1] - values_[e]) / (nodes_[e + 1] - nodes_[e]);
}

Vec InfluenceFunction::pairing(const ReportDistribution& d, const ReportScore& s) const
{
    Vec out = Vec::Zero(dim_);
    if (s.is_zero()) return out;
    if (space_ == Space::L2) {
        const auto grid = mechanism::make_grid(d, nullptr, nullptr, breaks_);
        const std::size_t nk = d.components();
        mechanism::visit(d, grid, [&](const Report& r, double qw, const double* dens) {
            double p = 0.0;
            for (std::size_t k = 0; k < nk; ++k) p += dens[k];
            if (p != 0.0) out += (qw * p * s(r)) * eval_(r);
        });
        return out;
    }
    if (!s.has_derivative()) throw ConfigError("the H1 pairing needs a report score with a derivative");
    // Gauss-Legendre, 4 points per element: psi is linear on each element.
    static const std::array<double, 4> gx{0.0694318442029737, 0.3300094782075719, 0.6699905217924281, 0.9305681557970263};
    static const std::array<double, 4> gw{0.1739274225687269, 0.3260725774312731, 0.3260725774312731, 0.1739274225687269};
    double total = 0.0;
    for (std::size_t e = 0; e + 1 < nodes_.size(); ++e) {
        const double h = nodes_[e + 1] - nodes_[e];
        const double slope = (values_[e + 1] - values_[e]) / h;
        for (std::size_t q = 0; q < 4; ++q) {
            Report r;
            r.x[0] = nodes_[e] + h * gx[q];
            const double psi = values_[e] + slope * h * gx[q];
            total += gw[q] * h * d.marginal_pdf(0, r.x[0]) * (psi * s(r) + slope * s.derivative(r, 0));
        }
    }
    out[0] = total;
    return out;
}

InfluenceFunction influence_function_L2(const EquilibriumState& state, const Mechanism& mech, const ReportDistribution& d)
{
    if (state.rule != "capacity") throw ConfigError("the L2 influence function applies to capacity rules");
    Eigen::FullPivLU<Mat> lu(state.jacobian);
    if (!lu.isInvertible()) throw SolverError(mech.id() + ": clearing Jacobian is singular");
    const Mat jinv = lu.inverse();
    const Vec c = state.c;
    std::array<std::vector<double>, 2> breaks;
    for (int j = 0; j < d.space().n_cont; ++j) breaks[static_cast<std::size_t>(j)] = mech.breakpoints(j, c);
    const Mechanism* m = &mech;
    const ReportDistribution* dist = &d;
    return InfluenceFunction::l2([jinv, c, m, dist](const Report& r) { return (-jinv * m->conduct_kernel(r, c, *dist)).eval(); },
                                 mech.clearing_dim(), std::move(breaks));
}

} // namespace mpelab::clearing
