#pragma once

#include <array>
#include <string>
#include <vector>

#include "mpelab/population/types.hpp"

namespace mpelab::population {

// t is the discrete report label; r1, r2 the continuous report coordinates.
enum class Var { w = 0, x, z, xi, r1, r2, t };
constexpr int kVarCount = 7;

const char* var_name(Var v);

struct Monomial {
    double coef = 0.0;
    std::array<int, kVarCount> power{};
};

// Finite sum of monomials in (w, x, z, xi, r1, r2, t). Used for conditional outcome means,
// report-law parameters and closed-form scores.
class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(std::vector<Monomial> terms) : terms_(std::move(terms)) {}
    static Polynomial constant(double c);

    double eval(const PolicyPoint& p, double r1 = 0.0, double r2 = 0.0, double t = 0.0) const;
    double eval(const PolicyPoint& p, const Report& r) const { return eval(p, r.x[0], r.x[1], r.type); }
    // Partial derivative in r1 (coordinate 0) or r2 (coordinate 1).
    double d_report(int coord, const PolicyPoint& p, double r1, double r2, double t = 0.0) const;
    // Only report variables may appear.
    bool report_only() const;
    bool depends_on(Var v) const;
    bool empty() const { return terms_.empty(); }
    const std::vector<Monomial>& terms() const { return terms_; }

    Polynomial& operator+=(const Polynomial& o);
    Polynomial scaled(double s) const;
    // Like terms merged, zero terms dropped.
    Polynomial simplified() const;
    // Human-readable form accepted by parse_polynomial.
    std::string str() const;

private:
    std::vector<Monomial> terms_;
};

Polynomial operator+(const Polynomial& a, const Polynomial& b);
Polynomial operator*(const Polynomial& a, const Polynomial& b);

// Parses expressions such as "0.5 + 0.4*w + (1 - r)^2 * t". Variables: w, x, z, xi, r1, r2, t;
// r is an alias for r1. Throws ConfigError on malformed input.
Polynomial parse_polynomial(const std::string& text);

// Polynomial in (r1, r2, t) alone, with like terms merged. Produced by fixing the policy
// variables of a Polynomial and used in the inner loops of report-space quadrature.
class ReportPolynomial {
public:
    struct Term {
        double coef;
        int p1, p2, pt;
    };

    ReportPolynomial() = default;
    // Adds scale * poly(p, .) to this polynomial.
    void add(const Polynomial& poly, const PolicyPoint& p, double scale);
    void scale(double s);
    double eval(const Report& r) const;
    double d_report(int coord, const Report& r) const;
    const std::vector<Term>& terms() const { return terms_; }

private:
    std::vector<Term> terms_;
};

} // namespace mpelab::population
