#pragma once

#include <memory>
#include <string>
#include <vector>

namespace mpelab::population {

// One-dimensional density on a bounded interval.
class Density {
public:
    virtual ~Density() = default;

    virtual double lo() const = 0;
    virtual double hi() const = 0;
    virtual double pdf(double x) const = 0;
    virtual double cdf(double x) const = 0;
    virtual double dpdf(double x) const = 0;
    virtual double quantile(double u) const;
    // Points where the density is not smooth; quadrature panels are aligned with them.
    virtual std::vector<double> kinks() const { return {}; }
    virtual std::string family() const = 0;
};

using DensityPtr = std::shared_ptr<const Density>;

class UniformDensity final : public Density {
public:
    UniformDensity(double lo, double hi);
    double lo() const override { return lo_; }
    double hi() const override { return hi_; }
    double pdf(double x) const override;
    double cdf(double x) const override;
    double dpdf(double) const override { return 0.0; }
    double quantile(double u) const override { return lo_ + u * (hi_ - lo_); }
    std::string family() const override { return "uniform"; }

private:
    double lo_, hi_;
};

// (1 + sum_j k_j P_j(t)) / (hi - lo) with t the affine map of [lo, hi] onto [-1, 1] and
// P_j the Legendre polynomials. Every coefficient vector integrates to one; positivity
// is checked at construction.
class LegendreDensity final : public Density {
public:
    LegendreDensity(double lo, double hi, std::vector<double> coef);
    double lo() const override { return lo_; }
    double hi() const override { return hi_; }
    double pdf(double x) const override;
    double cdf(double x) const override;
    double dpdf(double x) const override;
    std::string family() const override { return "legendre"; }
    const std::vector<double>& coefficients() const { return coef_; }

private:
    double to_t(double x) const { return 2.0 * (x - lo_) / (hi_ - lo_) - 1.0; }
    double lo_, hi_;
    std::vector<double> coef_;
};

class TruncatedNormalDensity final : public Density {
public:
    TruncatedNormalDensity(double mean, double sd, double lo, double hi);
    double lo() const override { return lo_; }
    double hi() const override { return hi_; }
    double pdf(double x) const override;
    double cdf(double x) const override;
    double dpdf(double x) const override;
    double quantile(double u) const override;
    std::string family() const override { return "truncated_normal"; }
    double mean() const { return mean_; }
    double sd() const { return sd_; }

private:
    double mean_, sd_, lo_, hi_;
    double plo_, mass_;
};

enum class Kernel { uniform, triangular, epanechnikov, biweight };

Kernel parse_kernel(const std::string& name);
std::string kernel_name(Kernel k);

// shift + half_width * e with e drawn from a compact kernel on [-1, 1], truncated to
// [lo, hi] and renormalised.
class LocationShiftDensity final : public Density {
public:
    LocationShiftDensity(Kernel kernel, double shift, double half_width, double lo, double hi);
    double lo() const override { return lo_; }
    double hi() const override { return hi_; }
    double pdf(double x) const override;
    double cdf(double x) const override;
    double dpdf(double x) const override;
    std::vector<double> kinks() const override;
    std::string family() const override { return "location_shift"; }

private:
    double kpdf(double e) const;
    double kcdf(double e) const;
    double kdpdf(double e) const;
    Kernel kernel_;
    double shift_, h_, lo_, hi_;
    double cdf_lo_, mass_;
};

// Mean-zero additive outcome noise.
class NoiseLaw {
public:
    enum class Family { none, normal, uniform };
    NoiseLaw() = default;
    static NoiseLaw normal(double sd);
    static NoiseLaw uniform(double half_width);

    Family family() const { return family_; }
    double scale() const { return scale_; }
    double sd() const;
    double pdf(double e) const;
    double cdf(double e) const;
    double quantile(double u) const;
    // E|d + e - e'| for independent copies e, e' of the noise.
    double mean_abs_difference(double d) const;
    // Half-width of an interval carrying all but ~1e-16 of the mass.
    double effective_half_width() const;

private:
    Family family_ = Family::none;
    double scale_ = 0.0;
};

} // namespace mpelab::population
