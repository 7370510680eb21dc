#include "mpelab/numerics/roots.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/tools/toms748_solve.hpp>

#include "mpelab/errors.hpp"

namespace mpelab::numerics {

RootResult solve_bracketed(const std::function<double(double)>& f,
                           const std::function<double(double)>& df,
                           double a, double b, const SolverOptions& opts)
{
    double fa = f(a), fb = f(b);
    if (fa == 0.0) return {a, 0.0, 0};
    if (fb == 0.0) return {b, 0.0, 0};
    if ((fa > 0) == (fb > 0)) {
        std::ostringstream os;
        os << "no sign change on [" << a << ", " << b << "] (f = " << fa << ", " << fb << ")";
        throw InfeasibleError(os.str());
    }

    if (!df) {
        std::uintmax_t iters = static_cast<std::uintmax_t>(opts.max_iter);
        auto tol = [](double l, double r) { return std::abs(r - l) <= 4 * std::numeric_limits<double>::epsilon() * std::abs(l); };
        auto [l, r] = boost::math::tools::toms748_solve(f, a, b, fa, fb, tol, iters);
        const double fl = std::abs(f(l)), fr = std::abs(f(r));
        const double x = fl <= fr ? l : r;
        return {x, std::min(fl, fr), static_cast<int>(iters)};
    }

    // Orient so that f(lo) < 0 < f(hi).
    double lo = a, hi = b;
    if (fa > 0) std::swap(lo, hi);
    double x = 0.5 * (a + b);
    double fx = f(x);
    double best_x = x, best_f = std::abs(fx);
    int it = 0;
    for (; it < opts.max_iter; ++it) {
        if (std::abs(fx) <= 0.1 * opts.tol) break;
        if (fx < 0) lo = x; else hi = x;
        const double d = df(x);
        double next = (d != 0.0 && std::isfinite(d)) ? x - fx / d : std::numeric_limits<double>::quiet_NaN();
        const double left = std::min(lo, hi), right = std::max(lo, hi);
        if (!(next > left && next < right)) next = 0.5 * (lo + hi);
        if (next == x) break;
        x = next;
        fx = f(x);
        if (std::abs(fx) < best_f) { best_f = std::abs(fx); best_x = x; }
        if (std::abs(hi - lo) <= 4 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x))) break;
    }
    return {best_x, best_f, it};
}

std::vector<std::pair<double, double>> sign_change_brackets(const std::function<double(double)>& f,
                                                            double a, double b, int n)
{
    std::vector<std::pair<double, double>> out;
    double x0 = a, f0 = f(a);
    for (int i = 1; i <= n; ++i) {
        const double x1 = (i == n) ? b : a + (b - a) * i / n;
        const double f1 = f(x1);
        if (f0 == 0.0 || (f0 < 0) != (f1 < 0)) {
            if (f0 != 0.0 || out.empty() || out.back().second != x0) out.emplace_back(x0, x1);
        }
        x0 = x1;
        f0 = f1;
    }
    return out;
}

NewtonResult damped_newton(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& F,
                           const std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>& J,
                           Eigen::VectorXd x, const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                           const SolverOptions& opts)
{
    auto clamp = [&](Eigen::VectorXd v) {
        return v.cwiseMax(lower).cwiseMin(upper).eval();
    };
    x = clamp(x);
    Eigen::VectorXd fx = F(x);
    double res = fx.cwiseAbs().maxCoeff();
    for (int it = 0; it < opts.max_iter; ++it) {
        if (res <= 0.1 * opts.tol) return {x, res, it};
        const Eigen::MatrixXd jac = J(x);
        Eigen::FullPivLU<Eigen::MatrixXd> lu(jac);
        if (!lu.isInvertible()) throw ConvergenceError("singular Jacobian in damped Newton");
        const Eigen::VectorXd step = lu.solve(fx);
        double lambda = 1.0;
        bool improved = false;
        for (int h = 0; h <= opts.max_halvings; ++h) {
            const Eigen::VectorXd trial = clamp(x - lambda * step);
            const Eigen::VectorXd ft = F(trial);
            const double rt = ft.cwiseAbs().maxCoeff();
            if (rt < res) {
                x = trial;
                fx = ft;
                res = rt;
                improved = true;
                break;
            }
            lambda *= 0.5;
        }
        if (!improved) {
            if (res <= opts.tol) return {x, res, it};
            throw ConvergenceError("damped Newton stalled with residual " + std::to_string(res));
        }
    }
    if (res <= opts.tol) return {x, res, opts.max_iter};
    throw ConvergenceError("damped Newton did not converge after " + std::to_string(opts.max_iter) +
                           " iterations (residual " + std::to_string(res) + ")");
}

} // namespace mpelab::numerics
