#pragma once

#include <array>

namespace mpelab {

// All policy-side variables an agent can carry. Only `w` is the policy proper;
// x is a covariate, z an instrument and xi the latent resistance of a selection model.
struct PolicyPoint {
    double w = 0.0;
    double x = 0.0;
    double z = 0.0;
    double xi = 0.0;
};

// A report: a discrete label (demand indicator, preference ranking) plus up to two
// continuous coordinates (bid, school scores). Unused coordinates stay at zero.
struct Report {
    int type = 0;
    std::array<double, 2> x{0.0, 0.0};
};

} // namespace mpelab
