#pragma once

#include <functional>
#include <string>
#include <vector>

#include "mpelab/population/policy_law.hpp"
#include "mpelab/population/polynomial.hpp"
#include "mpelab/population/types.hpp"

namespace mpelab::population {

// Declarative score, as written in a scenario file.
struct ScoreSpec {
    std::string id;
    std::string kind;          // binary_shift | polynomial | cosine | tabulated | targeting | zero
    std::string variable = "w";  // w or z
    std::vector<double> coef;  // polynomial: coefficients of v, v^2, ...; tabulated: values per support point
    double freq = 1.0;         // cosine
    double phase = 0.0;        // cosine
    Polynomial direction;      // targeting: h(x)
    std::string description;
};

// Direction of reform of the policy law: w -> s_W(w), mean zero under the baseline.
class PolicyScore {
public:
    enum class Kind { binary_shift, tabulated, smooth };

    PolicyScore() = default;
    PolicyScore(std::string id, Kind kind, std::function<double(const PolicyPoint&)> f,
                std::function<double(const PolicyPoint&)> df = {});

    const std::string& id() const { return id_; }
    Kind kind() const { return kind_; }
    double operator()(const PolicyPoint& p) const { return f_(p); }
    bool has_derivative() const { return static_cast<bool>(df_); }
    double derivative(const PolicyPoint& p) const;

    PolicyScore scaled(double s) const;

private:
    std::string id_;
    Kind kind_ = Kind::smooth;
    std::function<double(const PolicyPoint&)> f_;
    std::function<double(const PolicyPoint&)> df_;
};

// Builds a centred score; `nodes` is the quadrature resolution used for centring constants.
PolicyScore make_policy_score(const ScoreSpec& spec, const PolicyLaw& law, int nodes);

double score_mean(const PolicyScore& s, const std::vector<PolicyAtom>& atoms);
double score_second_moment(const PolicyScore& s, const std::vector<PolicyAtom>& atoms);
double score_sup_abs(const PolicyScore& s, const std::vector<PolicyAtom>& atoms);

// Atoms of the perturbed law f_W (1 + theta s_W). Throws PathError when positivity fails.
std::vector<PolicyAtom> perturbed_policy_atoms(const std::vector<PolicyAtom>& atoms, const PolicyScore& s, double theta);

// Exact perturbed law for the discrete families.
PolicyLaw perturbed_policy_density(const PolicyLaw& law, const PolicyScore& s, double theta);

// Direction of reform of the report law: r -> s_R(r).
class ReportScore {
public:
    ReportScore() = default;
    ReportScore(std::string id, std::function<double(const Report&)> f,
                std::function<double(const Report&, int)> df = {}, std::vector<double> kinks = {});

    const std::string& id() const { return id_; }
    double operator()(const Report& r) const { return f_ ? f_(r) : 0.0; }
    bool has_derivative() const { return static_cast<bool>(df_); }
    double derivative(const Report& r, int coord) const;
    bool is_zero() const { return !f_; }
    // Points of the first continuous coordinate where the score is not smooth.
    const std::vector<double>& kinks() const { return kinks_; }

private:
    std::string id_;
    std::function<double(const Report&)> f_;
    std::function<double(const Report&, int)> df_;
    std::vector<double> kinks_;
};

} // namespace mpelab::population
