#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace mpelab::numerics {

struct SolverOptions {
    int max_iter = 200;
    double tol = 1e-10;     // residual tolerance
    int max_halvings = 30;  // step halvings per Newton iteration
};

struct RootResult {
    double x = 0.0;
    double residual = 0.0;
    int iterations = 0;
};

// Newton's method safeguarded by bisection on a bracket with a sign change.
// `df` may be empty, in which case TOMS 748 is used instead.
RootResult solve_bracketed(const std::function<double(double)>& f,
                           const std::function<double(double)>& df,
                           double a, double b, const SolverOptions& opts = {});

// Sub-intervals of [a, b] (out of `n` equal cells) on which f changes sign, left to right.
std::vector<std::pair<double, double>> sign_change_brackets(const std::function<double(double)>& f,
                                                            double a, double b, int n);

struct NewtonResult {
    Eigen::VectorXd x;
    double residual = 0.0;
    int iterations = 0;
};

// Damped Newton for F(x) = 0 with an analytic Jacobian. Steps are halved while the
// residual max-norm does not decrease; iterates are clamped to [lower, upper].
NewtonResult damped_newton(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& F,
                           const std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>& J,
                           Eigen::VectorXd x0, const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                           const SolverOptions& opts = {});

} // namespace mpelab::numerics
