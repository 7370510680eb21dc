#include <cmath>
#include <sstream>

#include "mpelab/clearing/equilibrium.hpp"
#include "mpelab/clearing/influence.hpp"
#include "mpelab/errors.hpp"

namespace mpelab::clearing {

EquilibriumState solve_myerson_reserve(const ReportDistribution& d, const numerics::SolverOptions& opts)
{
    const auto& sp = d.space();
    if (sp.n_cont != 1) throw ConfigError("myerson reserve needs a one-dimensional bid");
    const double lo = sp.lo[0], hi = sp.hi[0];
    auto foc = [&](double c) { return c * d.marginal_pdf(0, c) - (1.0 - d.marginal_cdf(0, c)); };
    auto dfoc = [&](double c) { return 2.0 * d.marginal_pdf(0, c) + c * d.marginal_dpdf(0, c); };

    EquilibriumState st;
    st.rule = "myerson";
    const auto brackets = numerics::sign_change_brackets(foc, lo, hi, 512);
    if (brackets.empty()) throw InfeasibleError("myerson reserve: the first-order condition has no root on the bid support");
    if (brackets.size() > 1) {
        std::ostringstream os;
        os << "myerson reserve: " << brackets.size() << " roots of the first-order condition; the leftmost is used";
        st.warnings.push_back(os.str());
    }
    const auto [a, b] = brackets.front();
    const numerics::RootResult root = numerics::solve_bracketed(foc, dfoc, a, b, opts);
    st.c = Vec::Constant(1, root.x);
    st.iterations = root.iterations;
    st.residual = std::abs(foc(root.x));
    st.jacobian = Mat::Constant(1, 1, -dfoc(root.x));
    st.condition = 1.0;
    if (st.jacobian(0, 0) == 0.0) throw SolverError("myerson reserve: 2 f(c) + c f'(c) vanishes at the root");
    if (st.residual > opts.tol)
        throw ConvergenceError("myerson reserve: residual " + std::to_string(st.residual) + " above tolerance");
    return st;
}

double myerson_ift_functional(const ReportDistribution& d, double c0, const ReportScore& s)
{
    if (s.is_zero()) return 0.0;
    const double f = d.marginal_pdf(0, c0);
    const double k = 1.0 / (2.0 * f + c0 * d.marginal_dpdf(0, c0));
    const std::array<std::vector<double>, 2> extra{std::vector<double>{c0}, {}};
    const auto grid = mechanism::make_grid(d, nullptr, nullptr, extra);
    std::vector<double> w(d.components());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = d.component_weight(i);
    const double below =
        mechanism::report_moment(d, grid, [&](const Report& r) { return r.x[0] <= c0 ? s(r) : 0.0; }, w);
    Report at;
    at.x[0] = c0;
    return -k * (below + c0 * f * s(at));
}

} // namespace mpelab::clearing
