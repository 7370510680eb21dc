#include "mpelab/mechanism/integrate.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <tuple>

#include "mpelab/errors.hpp"

namespace mpelab::mechanism {

ReportGrid make_grid(const ReportDistribution& d, const Mechanism* mech, const Vec* c,
                     const std::array<std::vector<double>, 2>& extra)
{
    const auto& sp = d.space();
    ReportGrid g;
    g.n_types = sp.n_types;
    g.n_cont = sp.n_cont;
    const auto& quad = d.population().quadrature();
    const int nodes = sp.n_cont == 2 ? quad.nodes_2d : quad.nodes_1d;
    for (int j = 0; j < sp.n_cont; ++j) {
        std::vector<double> bps = d.kinks(j);
        if (mech && c)
            for (double b : mech->breakpoints(j, *c)) bps.push_back(b);
        if (j == 0 && d.is_tilted())
            for (double b : d.tilt().kinks()) bps.push_back(b);
        for (double b : extra[static_cast<std::size_t>(j)]) bps.push_back(b);
        g.axes[static_cast<std::size_t>(j)] =
            numerics::CompositeRule(sp.lo[static_cast<std::size_t>(j)], sp.hi[static_cast<std::size_t>(j)], nodes, bps);
    }
    return g;
}

PolynomialField::PolynomialField(const ReportDistribution& d, const population::OutcomeLaw& law,
                                 const std::vector<double>* lambda)
{
    const auto& pop = d.population();
    const auto& comps = pop.components();
    const auto& w = d.atom_weights();
    polys_.resize(comps.size());
    for (std::size_t k = 0; k < comps.size(); ++k) {
        polys_[k].resize(static_cast<std::size_t>(law.allocations()));
        const double wk = d.component_weight(k);
        if (wk == 0.0) continue;
        for (std::size_t i : comps[k].atoms) {
            const double s = w[i] * (lambda ? (*lambda)[i] : 1.0) / wk;
            if (s == 0.0) continue;
            for (int a = 0; a < law.allocations(); ++a)
                polys_[k][static_cast<std::size_t>(a)].add(law.mean_polynomial(a), pop.atoms()[i].point, s);
        }
    }
}

TransformField::TransformField(const ReportDistribution& d, const population::OutcomeLaw& law,
                               std::function<double(double)> g, const std::vector<double>* lambda)
    : pop_(&d.population()), law_(&law), g_(std::move(g))
{
    const auto& comps = pop_->components();
    const auto& w = d.atom_weights();
    members_.resize(comps.size());
    for (std::size_t k = 0; k < comps.size(); ++k) {
        const double wk = d.component_weight(k);
        if (wk == 0.0) continue;
        for (std::size_t i : comps[k].atoms) {
            const double s = w[i] * (lambda ? (*lambda)[i] : 1.0) / wk;
            if (s != 0.0) members_[k].emplace_back(i, s);
        }
    }
}

double TransformField::value(std::size_t k, int a, const Report& r) const
{
    double v = 0.0;
    for (const auto& [i, s] : members_[k]) v += s * g_(law_->mean(pop_->atoms()[i].point, a, r));
    return v;
}

double integrate_welfare(const ReportDistribution& d, const ReportGrid& g, const Mechanism& mech, const Vec& c,
                         const OutcomeField& field, const ReportDistribution* mech_dist)
{
    const ReportDistribution& md = mech_dist ? *mech_dist : d;
    const std::size_t nk = d.components();
    const int na = mech.allocations();
    double total = 0.0;
    visit(d, g, [&](const Report& r, double qw, const double* dens) {
        const Alloc mu = mech.allocation(r, c, md);
        double s = 0.0;
        for (int a = 0; a < na; ++a) {
            const double m = mu[static_cast<std::size_t>(a)];
            if (m == 0.0) continue;
            double v = 0.0;
            for (std::size_t k = 0; k < nk; ++k)
                if (dens[k] != 0.0) v += dens[k] * field.value(k, a, r);
            s += m * v;
        }
        total += qw * s;
    });
    return total;
}

Vec aggregate_shares(const ReportDistribution& d, const ReportGrid& g, const Mechanism& mech, const Vec& c)
{
    const int dim = mech.clearing_dim();
    const std::size_t nk = d.components();
    Vec s = Vec::Zero(dim);
    visit(d, g, [&](const Report& r, double qw, const double* dens) {
        double p = 0.0;
        for (std::size_t k = 0; k < nk; ++k) p += dens[k];
        if (p == 0.0) return;
        const Alloc mu = mech.allocation(r, c, d);
        for (int l = 0; l < dim; ++l) s[l] += qw * p * mu[static_cast<std::size_t>(mech.share_allocation(l))];
    });
    return s;
}

double report_moment(const ReportDistribution& d, const ReportGrid& g, const std::function<double(const Report&)>& fn,
                     const std::vector<double>& mass)
{
    const std::size_t nk = d.components();
    std::vector<double> ratio(nk, 0.0);
    for (std::size_t k = 0; k < nk; ++k)
        if (d.component_weight(k) != 0.0) ratio[k] = mass[k] / d.component_weight(k);
    double total = 0.0;
    visit(d, g, [&](const Report& r, double qw, const double* dens) {
        double p = 0.0;
        for (std::size_t k = 0; k < nk; ++k) p += dens[k] * ratio[k];
        if (p != 0.0) total += qw * p * fn(r);
    });
    return total;
}

namespace {

// Allocations gaining and losing the most probability across a cut.
std::pair<int, int> transition(const Alloc& up, const Alloc& down, int na)
{
    int gain = 0, loss = 0;
    for (int a = 1; a < na; ++a) {
        const std::size_t i = static_cast<std::size_t>(a);
        if (up[i] - down[i] > up[static_cast<std::size_t>(gain)] - down[static_cast<std::size_t>(gain)]) gain = a;
        if (up[i] - down[i] < up[static_cast<std::size_t>(loss)] - down[static_cast<std::size_t>(loss)]) loss = a;
    }
    return {gain, loss};
}

} // namespace

CDerivative c_derivative(const ReportDistribution& d, const ReportGrid& g, const Mechanism& mech, const Vec& c,
                         const OutcomeField& field)
{
    const int dim = mech.clearing_dim();
    const int na = mech.allocations();
    const std::size_t nk = d.components();
    CDerivative out;
    out.boundary = Vec::Zero(dim);
    out.inframarginal = Vec::Zero(dim);

    std::map<std::tuple<int, int, int, int, int>, FaceSegment> segs;
    std::vector<double> dens(nk);
    for (const auto& cut : mech.cuts()) {
        const std::size_t j = static_cast<std::size_t>(cut.coord);
        const double at = c[cut.clearing];
        // Nodes of the face: the remaining continuous coordinate, or a single point in one dimension.
        std::vector<double> xs{0.0}, ws{1.0};
        const int other = g.n_cont == 2 ? 1 - cut.coord : -1;
        if (other >= 0) {
            xs = g.axes[static_cast<std::size_t>(other)].nodes();
            ws = g.axes[static_cast<std::size_t>(other)].weights();
        }
        for (int t = 0; t < g.n_types; ++t) {
            for (std::size_t n = 0; n < xs.size(); ++n) {
                Report up;
                up.type = t;
                up.x[j] = at;
                if (other >= 0) up.x[static_cast<std::size_t>(other)] = xs[n];
                Report down = up;
                down.x[j] = std::nextafter(at, -std::numeric_limits<double>::infinity());
                const Alloc mu_up = mech.allocation(up, c, d);
                const Alloc mu_down = mech.allocation(down, c, d);
                bool same = true;
                for (int a = 0; a < na; ++a) same = same && mu_up[static_cast<std::size_t>(a)] == mu_down[static_cast<std::size_t>(a)];
                if (same) continue;
                double p = 0.0, jump = 0.0;
                for (std::size_t k = 0; k < nk; ++k) {
                    dens[k] = d.density(k, up);
                    if (dens[k] == 0.0) continue;
                    p += dens[k];
                    double v = 0.0;
                    for (int a = 0; a < na; ++a) {
                        const double dm = mu_up[static_cast<std::size_t>(a)] - mu_down[static_cast<std::size_t>(a)];
                        if (dm != 0.0) v += field.value(k, a, up) * dm;
                    }
                    jump += dens[k] * v;
                }
                out.boundary[cut.clearing] -= ws[n] * jump;
                const auto [ap, am] = transition(mu_up, mu_down, na);
                auto& s = segs[{t, cut.coord, cut.clearing, ap, am}];
                s.type = t;
                s.coord = cut.coord;
                s.clearing = cut.clearing;
                s.a_plus = ap;
                s.a_minus = am;
                s.density += ws[n] * p;
                s.jump += ws[n] * jump;
                s.share_jump += ws[n] * p * (mu_up[static_cast<std::size_t>(ap)] - mu_down[static_cast<std::size_t>(ap)]);
            }
        }
    }
    for (auto& [key, s] : segs) out.segments.push_back(s);

    if (mech.smooth_depends_on_c()) {
        visit(d, g, [&](const Report& r, double qw, const double* dn) {
            const Mat sj = mech.smooth_jacobian(r, c, d);
            for (int a = 0; a < na; ++a) {
                if (sj.row(a).isZero()) continue;
                double v = 0.0;
                for (std::size_t k = 0; k < nk; ++k)
                    if (dn[k] != 0.0) v += dn[k] * field.value(k, a, r);
                out.inframarginal += qw * v * sj.row(a).transpose();
            }
        });
    }
    return out;
}

Mat share_jacobian(const ReportDistribution& d, const ReportGrid& g, const Mechanism& mech, const Vec& c)
{
    const int dim = mech.clearing_dim();
    Mat j(dim, dim);
    for (int l = 0; l < dim; ++l) {
        IndicatorField f(mech.allocations(), mech.share_allocation(l));
        j.row(l) = c_derivative(d, g, mech, c, f).total().transpose();
    }
    return j;
}

ReportScore induced_report_score(const ReportDistribution& d, const population::PolicyScore& s)
{
    struct Data {
        std::vector<double> weight, mean;
        std::vector<population::ConditionalReportLaw> laws;
    };
    auto data = std::make_shared<Data>();
    const auto& pop = d.population();
    const auto mass = d.component_mass(pop.score_values(s));
    bool all_zero = true;
    for (std::size_t k = 0; k < d.components(); ++k) {
        const double wk = d.component_weight(k);
        if (wk == 0.0) continue;
        data->weight.push_back(wk);
        data->mean.push_back(mass[k] / wk);
        data->laws.push_back(d.law(k));
        all_zero = all_zero && std::abs(mass[k] / wk) < 1e-14;
    }
    if (all_zero) return ReportScore();
    auto eval = [data](const Report& r) {
        double num = 0.0, den = 0.0;
        for (std::size_t k = 0; k < data->weight.size(); ++k) {
            const double f = data->weight[k] * data->laws[k].pdf(r);
            num += data->mean[k] * f;
            den += f;
        }
        if (!(den > 0.0)) throw DomainError("induced report score: report density is zero at the requested report");
        return num / den;
    };
    auto deriv = [data](const Report& r, int coord) {
        double num = 0.0, den = 0.0, dnum = 0.0, dden = 0.0;
        for (std::size_t k = 0; k < data->weight.size(); ++k) {
            const double f = data->weight[k] * data->laws[k].pdf(r);
            const double df = data->weight[k] * data->laws[k].dpdf(r, coord);
            num += data->mean[k] * f;
            den += f;
            dnum += data->mean[k] * df;
            dden += df;
        }
        if (!(den > 0.0)) throw DomainError("induced report score: report density is zero at the requested report");
        return (dnum * den - num * dden) / (den * den);
    };
    return ReportScore("induced:" + s.id(), eval, deriv, d.space().n_cont > 0 ? d.kinks(0) : std::vector<double>{});
}

ReportScore make_report_score(const population::ReportScoreSpec& spec, const ReportDistribution& d)
{
    std::function<double(const Report&)> raw;
    std::function<double(const Report&, int)> draw;
    if (spec.kind == "polynomial") {
        if (!spec.expr.report_only()) throw ConfigError("report score '" + spec.id + "' may depend on (r1, r2, t) only");
        const auto e = spec.expr;
        raw = [e](const Report& r) { return e.eval(PolicyPoint{}, r); };
        draw = [e](const Report& r, int coord) { return e.d_report(coord, PolicyPoint{}, r.x[0], r.x[1], r.type); };
    } else if (spec.kind == "cosine") {
        if (spec.coord < 0 || spec.coord >= d.space().n_cont) throw ConfigError("report score '" + spec.id + "': no such coordinate");
        const int j = spec.coord;
        const double fr = spec.freq, ph = spec.phase;
        raw = [=](const Report& r) { return std::cos(fr * r.x[static_cast<std::size_t>(j)] + ph); };
        draw = [=](const Report& r, int coord) { return coord == j ? -fr * std::sin(fr * r.x[static_cast<std::size_t>(j)] + ph) : 0.0; };
    } else {
        throw ConfigError("report score '" + spec.id + "': unknown kind '" + spec.kind + "'");
    }
    const auto grid = make_grid(d, nullptr, nullptr);
    std::vector<double> w(d.components());
    for (std::size_t k = 0; k < w.size(); ++k) w[k] = d.component_weight(k);
    const double mean = report_moment(d, grid, raw, w);
    return ReportScore(spec.id, [raw, mean](const Report& r) { return raw(r) - mean; }, draw);
}

std::vector<population::ReportScoreSpec> default_report_scores(const population::ReportSpace& space)
{
    using population::Monomial;
    using population::Polynomial;
    using population::ReportScoreSpec;
    auto mono = [](double coef, int p1, int p2, int pt) {
        Monomial m;
        m.coef = coef;
        m.power[4] = p1;
        m.power[5] = p2;
        m.power[6] = pt;
        return m;
    };
    auto poly = [&](std::string id, std::vector<Monomial> t) {
        ReportScoreSpec s;
        s.id = std::move(id);
        s.expr = Polynomial(std::move(t));
        return s;
    };
    auto cosine = [&](std::string id, int coord, double cycles, double phase) {
        ReportScoreSpec s;
        s.id = std::move(id);
        s.kind = "cosine";
        s.coord = coord;
        const double lo = space.lo[static_cast<std::size_t>(coord)], hi = space.hi[static_cast<std::size_t>(coord)];
        s.freq = cycles * M_PI / (hi - lo);
        s.phase = phase - s.freq * lo;
        return s;
    };
    std::vector<ReportScoreSpec> out;
    if (space.n_cont == 0) {
        for (int k = 1; k <= 5; ++k) out.push_back(poly("type_power" + std::to_string(k), {mono(1.0, 0, 0, k)}));
    } else if (space.n_cont == 1) {
        out.push_back(poly("linear", {mono(1.0, 1, 0, 0)}));
        out.push_back(poly("quadratic", {mono(1.0, 2, 0, 0)}));
        out.push_back(cosine("cosine", 0, 1.0, 0.0));
        out.push_back(poly("cubic", {mono(1.0, 3, 0, 0), mono(-0.5, 1, 0, 0)}));
        out.push_back(cosine("sine2", 0, 2.0, -M_PI / 2));
    } else {
        out.push_back(poly("score1", {mono(1.0, 1, 0, 0)}));
        out.push_back(poly("score2", {mono(1.0, 0, 1, 0)}));
        out.push_back(poly("interaction", {mono(1.0, 1, 1, 0)}));
        out.push_back(poly("quadratic_mix", {mono(1.0, 2, 0, 0), mono(0.5, 0, 1, 0)}));
        out.push_back(cosine("cosine2", 1, 1.0, 0.0));
    }
    return out;
}

} // namespace mpelab::mechanism
