#include "mpelab/clearing/equilibrium.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "mpelab/clearing/ttc.hpp"
#include "mpelab/errors.hpp"

namespace mpelab::clearing {

using mechanism::make_grid;

Vec aggregate_shares_at(const Mechanism& mech, const ReportDistribution& d, const Vec& c)
{
    return mechanism::aggregate_shares(d, make_grid(d, &mech, &c), mech, c);
}

double condition_number(const Mat& m)
{
    if (m.size() == 0) return std::numeric_limits<double>::infinity();
    Eigen::JacobiSVD<Mat> svd(m);
    const auto& s = svd.singularValues();
    const double smin = s[s.size() - 1];
    return smin > 0.0 ? s[0] / smin : std::numeric_limits<double>::infinity();
}

namespace {

Mat jacobian_at(const Mechanism& mech, const ReportDistribution& d, const Vec& c)
{
    return mechanism::share_jacobian(d, make_grid(d, &mech, &c), mech, c);
}

void finish(EquilibriumState& st, const Mechanism& mech, const ReportDistribution& d)
{
    st.residual = (aggregate_shares_at(mech, d, st.c) - st.q).cwiseAbs().maxCoeff();
    st.jacobian = jacobian_at(mech, d, st.c);
    st.condition = condition_number(st.jacobian);
    if (!(st.condition <= 1e8)) {
        std::ostringstream os;
        os << mech.id() << ": clearing Jacobian is singular or ill-conditioned (condition " << st.condition << ")";
        throw SolverError(os.str());
    }
}

} // namespace

EquilibriumState solve_capacity_clearing(const Mechanism& mech, const ReportDistribution& d, const Vec& q,
                                         const numerics::SolverOptions& opts)
{
    const int dim = mech.clearing_dim();
    if (q.size() != dim)
        throw ConfigError(mech.id() + ": capacity rule needs " + std::to_string(dim) + " targets, got " +
                          std::to_string(q.size()));
    for (int l = 0; l < dim; ++l)
        if (!(q[l] > 0.0 && q[l] < 1.0)) throw ConfigError("capacity targets must lie in (0, 1)");
    mech.check_space(d.space());

    EquilibriumState st;
    st.rule = "capacity";
    st.q = q;
    const Vec lo = mech.lower_bound(d.space()), hi = mech.upper_bound(d.space());

    if (dim == 1) {
        auto f = [&](double c) { return aggregate_shares_at(mech, d, Vec::Constant(1, c))[0] - q[0]; };
        auto df = [&](double c) { return jacobian_at(mech, d, Vec::Constant(1, c))(0, 0); };
        numerics::RootResult root;
        try {
            root = numerics::solve_bracketed(f, df, lo[0], hi[0], opts);
        } catch (const InfeasibleError& e) {
            throw InfeasibleError(mech.id() + ": capacity " + std::to_string(q[0]) +
                                  " cannot be met inside the admissible region (" + e.what() + ")");
        }
        st.c = Vec::Constant(1, root.x);
        st.iterations = root.iterations;
    } else {
        auto F = [&](const Vec& c) { return (aggregate_shares_at(mech, d, c) - q).eval(); };
        auto J = [&](const Vec& c) { return jacobian_at(mech, d, c); };
        const numerics::NewtonResult res = numerics::damped_newton(F, J, 0.5 * (lo + hi), lo, hi, opts);
        st.c = res.x;
        st.iterations = res.iterations;
    }
    finish(st, mech, d);
    if (st.residual > opts.tol)
        throw ConvergenceError(mech.id() + ": capacity residual " + std::to_string(st.residual) + " above tolerance");
    return st;
}

EquilibriumState solve_equilibrium(const Mechanism& mech, const ReportDistribution& d,
                                   const population::ConductConfig& conduct, const numerics::SolverOptions& opts)
{
    if (conduct.id == "capacity")
        return solve_capacity_clearing(mech, d, Eigen::Map<const Vec>(conduct.q.data(), static_cast<Eigen::Index>(conduct.q.size())), opts);
    if (conduct.id == "myerson") {
        if (mech.id() != "second_price_auction") throw ConfigError("the myerson conduct rule needs the second_price_auction mechanism");
        return solve_myerson_reserve(d, opts);
    }
    if (conduct.id == "ttc_path")
        return solve_ttc_path(mech, d, Eigen::Map<const Vec>(conduct.q.data(), static_cast<Eigen::Index>(conduct.q.size())), conduct.path);
    throw ConfigError("unknown conduct rule '" + conduct.id + "'");
}

Mat clearing_jacobian_fd(const Mechanism& mech, const ReportDistribution& d, const Vec& c0, double rel_step)
{
    const int dim = mech.clearing_dim();
    const Vec lo = mech.lower_bound(d.space()), hi = mech.upper_bound(d.space());
    Mat j(dim, dim);
    for (int m = 0; m < dim; ++m) {
        const double h = rel_step * (hi[m] - lo[m]);
        Vec up = c0, dn = c0;
        up[m] += h;
        dn[m] -= h;
        j.col(m) = (aggregate_shares_at(mech, d, up) - aggregate_shares_at(mech, d, dn)) / (2.0 * h);
    }
    return j;
}

} // namespace mpelab::clearing
