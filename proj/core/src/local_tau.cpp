#include "mpelab/externality/local_tau.hpp"

#include <cmath>
#include <limits>

#include "mpelab/errors.hpp"

namespace mpelab::externality {

LocalTau local_tau_oracle(const WelfareGradient& grad, std::size_t margin)
{
    if (margin >= grad.margins.size()) throw ConfigError("local_tau: no margin " + std::to_string(margin));
    LocalTau t;
    t.mode = "oracle";
    t.tau = grad.margins[margin].tau;
    return t;
}

namespace {

struct SideFit {
    double intercept_y = 0.0, intercept_d = 0.0;
    Eigen::Matrix2d bread;  // (X'KX)^{-1}
    std::vector<double> x, k, y, d;
};

SideFit fit_side(std::vector<double> x, std::vector<double> k, std::vector<double> y, std::vector<double> d)
{
    Eigen::Matrix2d xtx = Eigen::Matrix2d::Zero();
    Eigen::Vector2d xty = Eigen::Vector2d::Zero(), xtd = Eigen::Vector2d::Zero();
    for (std::size_t i = 0; i < x.size(); ++i) {
        const Eigen::Vector2d z(1.0, x[i]);
        xtx += k[i] * z * z.transpose();
        xty += k[i] * y[i] * z;
        xtd += k[i] * d[i] * z;
    }
    SideFit f;
    f.bread = xtx.inverse();
    f.intercept_y = (f.bread * xty)[0];
    f.intercept_d = (f.bread * xtd)[0];
    f.x = std::move(x);
    f.k = std::move(k);
    f.y = std::move(y);
    f.d = std::move(d);
    return f;
}

// Heteroskedasticity-robust variance of the intercept of u on (1, x).
double intercept_variance(const SideFit& f, const std::vector<double>& u)
{
    Eigen::Vector2d beta = Eigen::Vector2d::Zero();
    Eigen::Vector2d xtu = Eigen::Vector2d::Zero();
    for (std::size_t i = 0; i < f.x.size(); ++i) xtu += f.k[i] * u[i] * Eigen::Vector2d(1.0, f.x[i]);
    beta = f.bread * xtu;
    Eigen::Matrix2d meat = Eigen::Matrix2d::Zero();
    for (std::size_t i = 0; i < f.x.size(); ++i) {
        const Eigen::Vector2d z(1.0, f.x[i]);
        const double e = u[i] - z.dot(beta);
        meat += (f.k[i] * f.k[i] * e * e) * z * z.transpose();
    }
    return (f.bread * meat * f.bread)(0, 0);
}

} // namespace

LocalTau local_tau_estimated(const population::AgentTable& agents, const Mechanism& mech, const ReportDistribution& d,
                             const Vec& c, const Margin& margin, double bandwidth_scale)
{
    if (!agents.assigned()) throw ConfigError("local_tau: agents have no allocations");
    const std::size_t j = static_cast<std::size_t>(margin.coord);
    const double at = c[margin.clearing];
    const int na = mech.allocations();

    // Agents whose report, moved onto the cut, would cross this margin.
    std::vector<double> run, y, dd;
    for (std::size_t i = 0; i < agents.size(); ++i) {
        Report up = agents.report[i];
        up.x[j] = at;
        Report down = up;
        down.x[j] = std::nextafter(at, -std::numeric_limits<double>::infinity());
        const auto mu_up = mech.allocation(up, c, d), mu_down = mech.allocation(down, c, d);
        int gain = 0, loss = 0;
        for (int a = 1; a < na; ++a) {
            const std::size_t s = static_cast<std::size_t>(a);
            if (mu_up[s] - mu_down[s] > mu_up[static_cast<std::size_t>(gain)] - mu_down[static_cast<std::size_t>(gain)]) gain = a;
            if (mu_up[s] - mu_down[s] < mu_up[static_cast<std::size_t>(loss)] - mu_down[static_cast<std::size_t>(loss)]) loss = a;
        }
        if (gain != margin.a_plus || loss != margin.a_minus || gain == loss) continue;
        run.push_back(agents.report[i].x[j] - at);
        y.push_back(agents.y[i]);
        dd.push_back(agents.a[i] == margin.a_plus ? 1.0 : 0.0);
    }
    const std::size_t n = run.size();
    if (n < 100) throw EstimationError("local_tau: only " + std::to_string(n) + " agents on this margin");
    double mean = 0.0, sq = 0.0;
    for (double r : run) mean += r;
    mean /= static_cast<double>(n);
    for (double r : run) sq += (r - mean) * (r - mean);
    const double sd = std::sqrt(sq / static_cast<double>(n - 1));
    const double h = bandwidth_scale * 1.06 * sd * std::pow(static_cast<double>(n), -0.2);

    std::vector<double> xs[2], ks[2], ys[2], ds[2];
    for (std::size_t i = 0; i < n; ++i) {
        const double u = std::abs(run[i]) / h;
        if (u >= 1.0) continue;
        const int side = run[i] >= 0.0 ? 1 : 0;
        xs[side].push_back(run[i]);
        ks[side].push_back(1.0 - u);
        ys[side].push_back(y[i]);
        ds[side].push_back(dd[i]);
    }
    LocalTau t;
    t.mode = "estimated";
    t.bandwidth = h;
    t.n_minus = xs[0].size();
    t.n_plus = xs[1].size();
    if (t.n_minus < 50 || t.n_plus < 50)
        throw EstimationError("local_tau: fewer than 50 observations inside the bandwidth (" + std::to_string(t.n_minus) +
                              " below, " + std::to_string(t.n_plus) + " above)");
    const SideFit lo = fit_side(xs[0], ks[0], ys[0], ds[0]);
    const SideFit hi = fit_side(xs[1], ks[1], ys[1], ds[1]);
    const double gap_y = hi.intercept_y - lo.intercept_y;
    const double gap_d = hi.intercept_d - lo.intercept_d;
    if (!(std::abs(gap_d) > 1e-3)) throw EstimationError("local_tau: no first-stage jump in the allocation at the margin");
    t.tau = gap_y / gap_d;
    // Delta method: the ratio's error is the intercept gap of y - tau d, divided by the first stage.
    double var = 0.0;
    for (const SideFit* f : {&lo, &hi}) {
        std::vector<double> u(f->x.size());
        for (std::size_t i = 0; i < u.size(); ++i) u[i] = f->y[i] - t.tau * f->d[i];
        var += intercept_variance(*f, u);
    }
    t.se = std::sqrt(var) / std::abs(gap_d);
    return t;
}

} // namespace mpelab::externality
