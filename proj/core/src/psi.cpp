#include "mpelab/externality/psi.hpp"

#include <iomanip>

#include "mpelab/errors.hpp"

namespace mpelab::externality {

ConductTerm::ConductTerm(Vec grad, InfluenceFunction psi, const Mechanism& mech, const EquilibriumState& state)
    : grad_(std::move(grad)), psi_(std::move(psi))
{
    if (psi_.dim() != grad_.size()) throw ConfigError("conduct term: gradient and influence function dimensions differ");
    realized_ = !is_h1() && !mech.smooth_depends_on_distribution() && state.rule == "capacity";
    if (realized_) {
        Eigen::FullPivLU<Mat> lu(state.jacobian);
        v_ = lu.inverse().transpose() * grad_;
        for (int l = 0; l < mech.clearing_dim(); ++l) share_alloc_.push_back(mech.share_allocation(l));
    }
}

double ConductTerm::operator()(const Report& r) const
{
    if (is_h1()) throw ConfigError("the conduct term has an H1 representer; it enters through the Sobolev pairing, not per report");
    return grad_.dot(psi_(r));
}

double ConductTerm::realized(const Report& r, int a) const
{
    if (!realized_) return (*this)(r);
    double s = 0.0;
    for (std::size_t l = 0; l < share_alloc_.size(); ++l)
        if (share_alloc_[l] == a) s -= v_[static_cast<Eigen::Index>(l)];
    return s;
}

void PsiDecomposition::write_csv(std::ostream& os) const
{
    os << "agent,y,gamma,psi_conduct,psi_fixed,psi_total\n";
    os << std::setprecision(17);
    for (std::size_t i = 0; i < size(); ++i)
        os << i << ',' << y[i] << ',' << gamma[i] << ',' << psi_conduct[i] << ',' << psi_fixed[i] << ',' << psi_total[i] << '\n';
}

PsiDecomposition build_psi(const population::AgentTable& agents, const CompetitionGamma& gamma, const ConductTerm& conduct,
                           const std::string& mode)
{
    if (!agents.assigned()) throw ConfigError("build_psi needs assigned agents");
    PsiDecomposition p;
    p.mode = mode;
    p.conduct_h1 = conduct.is_h1();
    const std::size_t n = agents.size();
    p.y = agents.y;
    p.gamma.resize(n);
    p.psi_conduct.assign(n, 0.0);
    p.psi_fixed.resize(n);
    p.psi_total.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        p.gamma[i] = gamma(agents.report[i]);
        if (!p.conduct_h1) p.psi_conduct[i] = conduct.realized(agents.report[i], agents.a[i]);
        p.psi_fixed[i] = p.y[i] + p.gamma[i];
        p.psi_total[i] = p.psi_fixed[i] + p.psi_conduct[i];
    }
    return p;
}

} // namespace mpelab::externality
