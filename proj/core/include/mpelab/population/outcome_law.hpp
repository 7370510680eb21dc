#pragma once

#include <vector>

#include "mpelab/population/density.hpp"
#include "mpelab/population/polynomial.hpp"
#include "mpelab/population/types.hpp"

namespace mpelab::population {

// Y(w, a) = m~(w, a, r) + e with e independent of everything else.
class OutcomeLaw {
public:
    OutcomeLaw() = default;
    OutcomeLaw(std::vector<Polynomial> mean_by_allocation, NoiseLaw noise);

    double mean(const PolicyPoint& p, int a, const Report& r) const
    {
        return means_[static_cast<std::size_t>(a)].eval(p, r);
    }
    int allocations() const { return static_cast<int>(means_.size()); }
    const NoiseLaw& noise() const { return noise_; }
    const Polynomial& mean_polynomial(int a) const { return means_[static_cast<std::size_t>(a)]; }

    // Adds `delta` to m~(., a, .): used to build counterfactual scenarios in tests.
    OutcomeLaw shifted(int a, double delta) const;

private:
    std::vector<Polynomial> means_;
    NoiseLaw noise_;
};

} // namespace mpelab::population
