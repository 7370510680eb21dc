#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "mpelab/clearing/influence.hpp"
#include "mpelab/externality/gamma.hpp"
#include "mpelab/externality/welfare_gradient.hpp"

namespace mpelab::externality {

using clearing::InfluenceFunction;

// Psi_conduct = nabla_c U . psi. In H1 the pair (nabla_c U, psi) is kept for the Sobolev pairing.
class ConductTerm {
public:
    ConductTerm() = default;
    ConductTerm(Vec grad, InfluenceFunction psi, const Mechanism& mech, const EquilibriumState& state);

    bool is_h1() const { return psi_.space() == InfluenceFunction::Space::SobolevH1; }
    const Vec& grad() const { return grad_; }
    const InfluenceFunction& psi() const { return psi_; }
    // L2 only; throws ConfigError for an H1 representer.
    double operator()(const Report& r) const;
    // Agent-level value: -v . e_A with v = (J^{-1})' grad when the conduct kernel is the
    // allocation itself, so the column uses the realised allocation; operator() otherwise.
    double realized(const Report& r, int a) const;
    bool uses_realized_allocation() const { return realized_; }

private:
    Vec grad_;
    InfluenceFunction psi_;
    bool realized_ = false;
    Vec v_;                     // (J^{-1})' grad
    std::vector<int> share_alloc_;
};

struct PsiDecomposition {
    std::string mode = "oracle";  // oracle | estimated
    bool conduct_h1 = false;      // psi_conduct left at zero; the conduct term needs the Sobolev pairing
    std::vector<double> y, gamma, psi_conduct, psi_fixed, psi_total;

    std::size_t size() const { return y.size(); }
    void write_csv(std::ostream& os) const;
};

PsiDecomposition build_psi(const population::AgentTable& agents, const CompetitionGamma& gamma, const ConductTerm& conduct,
                           const std::string& mode = "oracle");

} // namespace mpelab::externality
