#include "mpelab/population/density.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/legendre.hpp>

#include "mpelab/errors.hpp"
#include "mpelab/numerics/roots.hpp"

namespace mpelab::population {

namespace {

const boost::math::normal_distribution<double> kStdNormal(0.0, 1.0);

double phi(double z) { return boost::math::pdf(kStdNormal, z); }
double Phi(double z) { return boost::math::cdf(kStdNormal, z); }

} // namespace

double Density::quantile(double u) const
{
    if (u <= 0.0) return lo();
    if (u >= 1.0) return hi();
    auto f = [&](double x) { return cdf(x) - u; };
    auto df = [&](double x) { return pdf(x); };
    numerics::SolverOptions opts;
    opts.tol = 1e-14;
    return numerics::solve_bracketed(f, df, lo(), hi(), opts).x;
}

UniformDensity::UniformDensity(double lo, double hi) : lo_(lo), hi_(hi)
{
    if (!(hi > lo)) throw ConfigError("uniform density needs lo < hi");
}

double UniformDensity::pdf(double x) const { return (x < lo_ || x > hi_) ? 0.0 : 1.0 / (hi_ - lo_); }

double UniformDensity::cdf(double x) const { return std::clamp((x - lo_) / (hi_ - lo_), 0.0, 1.0); }

LegendreDensity::LegendreDensity(double lo, double hi, std::vector<double> coef)
    : lo_(lo), hi_(hi), coef_(std::move(coef))
{
    if (!(hi > lo)) throw ConfigError("legendre density needs lo < hi");
    // Strictly positive inside; a zero is tolerated at the ends only (e.g. f(r) = 2r).
    for (int i = 0; i <= 512; ++i) {
        const double t = -1.0 + 2.0 * i / 512.0;
        double v = 1.0;
        for (std::size_t j = 0; j < coef_.size(); ++j)
            v += coef_[j] * boost::math::legendre_p(static_cast<int>(j + 1), t);
        const bool end = i == 0 || i == 512;
        if (end ? v < -1e-12 : v <= 1e-6)
            throw ConfigError("legendre density coefficients give a non-positive density");
    }
}

double LegendreDensity::pdf(double x) const
{
    if (x < lo_ || x > hi_) return 0.0;
    const double t = to_t(x);
    double v = 1.0;
    for (std::size_t j = 0; j < coef_.size(); ++j)
        v += coef_[j] * boost::math::legendre_p(static_cast<int>(j + 1), t);
    return v / (hi_ - lo_);
}

double LegendreDensity::cdf(double x) const
{
    if (x <= lo_) return 0.0;
    if (x >= hi_) return 1.0;
    const double t = to_t(x);
    // int_{-1}^t P_j = (P_{j+1}(t) - P_{j-1}(t)) / (2j + 1)
    double v = t + 1.0;
    for (std::size_t j = 0; j < coef_.size(); ++j) {
        const int n = static_cast<int>(j + 1);
        v += coef_[j] * (boost::math::legendre_p(n + 1, t) - boost::math::legendre_p(n - 1, t)) / (2.0 * n + 1.0);
    }
    return std::clamp(0.5 * v, 0.0, 1.0);
}

double LegendreDensity::dpdf(double x) const
{
    if (x < lo_ || x > hi_) return 0.0;
    const double t = to_t(x);
    double v = 0.0;
    for (std::size_t j = 0; j < coef_.size(); ++j)
        v += coef_[j] * boost::math::legendre_p_prime(static_cast<int>(j + 1), t);
    const double len = hi_ - lo_;
    return v * 2.0 / (len * len);
}

TruncatedNormalDensity::TruncatedNormalDensity(double mean, double sd, double lo, double hi)
    : mean_(mean), sd_(sd), lo_(lo), hi_(hi)
{
    if (!(sd > 0.0)) throw ConfigError("truncated normal needs sd > 0");
    if (!(hi > lo)) throw ConfigError("truncated normal needs lo < hi");
    plo_ = Phi((lo - mean) / sd);
    mass_ = Phi((hi - mean) / sd) - plo_;
    if (!(mass_ > 1e-12)) throw ConfigError("truncated normal interval carries no mass");
}

double TruncatedNormalDensity::pdf(double x) const
{
    if (x < lo_ || x > hi_) return 0.0;
    return phi((x - mean_) / sd_) / (sd_ * mass_);
}

double TruncatedNormalDensity::cdf(double x) const
{
    if (x <= lo_) return 0.0;
    if (x >= hi_) return 1.0;
    return std::clamp((Phi((x - mean_) / sd_) - plo_) / mass_, 0.0, 1.0);
}

double TruncatedNormalDensity::dpdf(double x) const
{
    if (x < lo_ || x > hi_) return 0.0;
    const double z = (x - mean_) / sd_;
    return -z * phi(z) / (sd_ * sd_ * mass_);
}

double TruncatedNormalDensity::quantile(double u) const
{
    const double p = std::clamp(plo_ + u * mass_, 1e-300, 1.0 - 1e-16);
    return std::clamp(mean_ + sd_ * boost::math::quantile(kStdNormal, p), lo_, hi_);
}

Kernel parse_kernel(const std::string& name)
{
    if (name == "uniform") return Kernel::uniform;
    if (name == "triangular") return Kernel::triangular;
    if (name == "epanechnikov") return Kernel::epanechnikov;
    if (name == "biweight") return Kernel::biweight;
    throw ConfigError("unknown noise kernel '" + name + "'");
}

std::string kernel_name(Kernel k)
{
    switch (k) {
    case Kernel::uniform: return "uniform";
    case Kernel::triangular: return "triangular";
    case Kernel::epanechnikov: return "epanechnikov";
    case Kernel::biweight: return "biweight";
    }
    return "unknown";
}

LocationShiftDensity::LocationShiftDensity(Kernel kernel, double shift, double half_width, double lo, double hi)
    : kernel_(kernel), shift_(shift), h_(half_width), lo_(lo), hi_(hi)
{
    if (!(half_width > 0.0)) throw ConfigError("location-shift noise needs half_width > 0");
    if (!(hi > lo)) throw ConfigError("location-shift density needs lo < hi");
    cdf_lo_ = kcdf((lo - shift) / half_width);
    mass_ = kcdf((hi - shift) / half_width) - cdf_lo_;
    if (!(mass_ > 1e-12)) throw ConfigError("location-shift density has no mass inside the report bounds");
}

double LocationShiftDensity::kpdf(double e) const
{
    if (e < -1.0 || e > 1.0) return 0.0;
    switch (kernel_) {
    case Kernel::uniform: return 0.5;
    case Kernel::triangular: return 1.0 - std::abs(e);
    case Kernel::epanechnikov: return 0.75 * (1.0 - e * e);
    case Kernel::biweight: { const double s = 1.0 - e * e; return 15.0 / 16.0 * s * s; }
    }
    return 0.0;
}

double LocationShiftDensity::kcdf(double e) const
{
    if (e <= -1.0) return 0.0;
    if (e >= 1.0) return 1.0;
    switch (kernel_) {
    case Kernel::uniform: return 0.5 * (e + 1.0);
    case Kernel::triangular: return e < 0 ? 0.5 * (1 + e) * (1 + e) : 1.0 - 0.5 * (1 - e) * (1 - e);
    case Kernel::epanechnikov: return 0.5 + 0.75 * (e - e * e * e / 3.0);
    case Kernel::biweight: {
        const double e3 = e * e * e;
        return 0.5 + 15.0 / 16.0 * (e - 2.0 * e3 / 3.0 + e3 * e * e / 5.0);
    }
    }
    return 0.0;
}

double LocationShiftDensity::kdpdf(double e) const
{
    if (e < -1.0 || e > 1.0) return 0.0;
    switch (kernel_) {
    case Kernel::uniform: return 0.0;
    case Kernel::triangular: return e < 0 ? 1.0 : (e > 0 ? -1.0 : 0.0);
    case Kernel::epanechnikov: return -1.5 * e;
    case Kernel::biweight: return -3.75 * e * (1.0 - e * e);
    }
    return 0.0;
}

double LocationShiftDensity::pdf(double x) const
{
    if (x < lo_ || x > hi_) return 0.0;
    return kpdf((x - shift_) / h_) / (h_ * mass_);
}

double LocationShiftDensity::cdf(double x) const
{
    if (x <= lo_) return 0.0;
    if (x >= hi_) return 1.0;
    return std::clamp((kcdf((x - shift_) / h_) - cdf_lo_) / mass_, 0.0, 1.0);
}

double LocationShiftDensity::dpdf(double x) const
{
    if (x < lo_ || x > hi_) return 0.0;
    return kdpdf((x - shift_) / h_) / (h_ * h_ * mass_);
}

std::vector<double> LocationShiftDensity::kinks() const
{
    std::vector<double> k{shift_ - h_, shift_ + h_};
    if (kernel_ == Kernel::triangular) k.push_back(shift_);
    return k;
}

NoiseLaw NoiseLaw::normal(double sd)
{
    if (sd < 0.0) throw ConfigError("noise sd must be non-negative");
    NoiseLaw n;
    n.family_ = sd > 0.0 ? Family::normal : Family::none;
    n.scale_ = sd;
    return n;
}

NoiseLaw NoiseLaw::uniform(double half_width)
{
    if (half_width < 0.0) throw ConfigError("noise half_width must be non-negative");
    NoiseLaw n;
    n.family_ = half_width > 0.0 ? Family::uniform : Family::none;
    n.scale_ = half_width;
    return n;
}

double NoiseLaw::sd() const
{
    switch (family_) {
    case Family::none: return 0.0;
    case Family::normal: return scale_;
    case Family::uniform: return scale_ / std::sqrt(3.0);
    }
    return 0.0;
}

double NoiseLaw::pdf(double e) const
{
    switch (family_) {
    case Family::none: throw DomainError("degenerate noise law has no density");
    case Family::normal: return phi(e / scale_) / scale_;
    case Family::uniform: return std::abs(e) <= scale_ ? 0.5 / scale_ : 0.0;
    }
    return 0.0;
}

double NoiseLaw::cdf(double e) const
{
    switch (family_) {
    case Family::none: return e >= 0.0 ? 1.0 : 0.0;
    case Family::normal: return Phi(e / scale_);
    case Family::uniform: return std::clamp(0.5 * (e / scale_ + 1.0), 0.0, 1.0);
    }
    return 0.0;
}

double NoiseLaw::quantile(double u) const
{
    switch (family_) {
    case Family::none: return 0.0;
    case Family::normal: return scale_ * boost::math::quantile(kStdNormal, u);
    case Family::uniform: return scale_ * (2.0 * u - 1.0);
    }
    return 0.0;
}

double NoiseLaw::mean_abs_difference(double d) const
{
    switch (family_) {
    case Family::none: return std::abs(d);
    case Family::normal: {
        const double s = std::sqrt(2.0) * scale_;
        return d * (1.0 - 2.0 * Phi(-d / s)) + 2.0 * s * phi(d / s);
    }
    case Family::uniform: {
        // e - e' is triangular on [-a, a] with a = 2h.
        const double a = 2.0 * scale_;
        const double u = std::abs(d);
        if (u >= a) return u;
        return u + (a - u) * (a - u) * (a - u) / (3.0 * a * a);
    }
    }
    return 0.0;
}

double NoiseLaw::effective_half_width() const
{
    switch (family_) {
    case Family::none: return 0.0;
    case Family::normal: return 9.0 * scale_;
    case Family::uniform: return scale_;
    }
    return 0.0;
}

} // namespace mpelab::population
