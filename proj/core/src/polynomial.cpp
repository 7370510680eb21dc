#include "mpelab/population/polynomial.hpp"

#include <cctype>
#include <cmath>
#include <map>
#include <sstream>

#include "mpelab/errors.hpp"

namespace mpelab::population {

namespace {

double ipow(double b, int e)
{
    double r = 1.0;
    for (int i = 0; i < e; ++i) r *= b;
    return r;
}

} // namespace

const char* var_name(Var v)
{
    static const char* names[] = {"w", "x", "z", "xi", "r1", "r2", "t"};
    return names[static_cast<int>(v)];
}

Polynomial Polynomial::constant(double c)
{
    Monomial m;
    m.coef = c;
    return Polynomial({m});
}

double Polynomial::eval(const PolicyPoint& p, double r1, double r2, double t) const
{
    const std::array<double, kVarCount> v{p.w, p.x, p.z, p.xi, r1, r2, t};
    double s = 0.0;
    for (const auto& t : terms_) {
        double m = t.coef;
        for (int i = 0; i < kVarCount; ++i)
            if (t.power[i]) m *= ipow(v[i], t.power[i]);
        s += m;
    }
    return s;
}

double Polynomial::d_report(int coord, const PolicyPoint& p, double r1, double r2, double t) const
{
    const int k = 4 + coord;
    const std::array<double, kVarCount> v{p.w, p.x, p.z, p.xi, r1, r2, t};
    double s = 0.0;
    for (const auto& t : terms_) {
        if (t.power[k] == 0) continue;
        double m = t.coef * t.power[k];
        for (int i = 0; i < kVarCount; ++i) {
            const int e = (i == k) ? t.power[i] - 1 : t.power[i];
            if (e) m *= ipow(v[i], e);
        }
        s += m;
    }
    return s;
}

bool Polynomial::depends_on(Var v) const
{
    for (const auto& t : terms_)
        if (t.coef != 0.0 && t.power[static_cast<int>(v)] != 0) return true;
    return false;
}

bool Polynomial::report_only() const
{
    return !depends_on(Var::w) && !depends_on(Var::x) && !depends_on(Var::z) && !depends_on(Var::xi);
}

Polynomial& Polynomial::operator+=(const Polynomial& o)
{
    terms_.insert(terms_.end(), o.terms_.begin(), o.terms_.end());
    return *this;
}

Polynomial Polynomial::scaled(double s) const
{
    Polynomial out = *this;
    for (auto& t : out.terms_) t.coef *= s;
    return out;
}

Polynomial Polynomial::simplified() const
{
    std::map<std::array<int, kVarCount>, double> acc;
    for (const auto& t : terms_) acc[t.power] += t.coef;
    std::vector<Monomial> out;
    for (const auto& [pw, c] : acc)
        if (c != 0.0) out.push_back({c, pw});
    return Polynomial(std::move(out));
}

std::string Polynomial::str() const
{
    const Polynomial p = simplified();
    if (p.terms_.empty()) return "0";
    std::ostringstream os;
    os.precision(17);
    bool first = true;
    for (const auto& t : p.terms_) {
        os << (first ? "" : " + ") << t.coef;
        for (int i = 0; i < kVarCount; ++i) {
            if (!t.power[i]) continue;
            os << "*" << var_name(static_cast<Var>(i));
            if (t.power[i] > 1) os << "^" << t.power[i];
        }
        first = false;
    }
    return os.str();
}

Polynomial operator+(const Polynomial& a, const Polynomial& b)
{
    Polynomial out = a;
    out += b;
    return out.simplified();
}

Polynomial operator*(const Polynomial& a, const Polynomial& b)
{
    std::vector<Monomial> out;
    for (const auto& x : a.terms())
        for (const auto& y : b.terms()) {
            Monomial m;
            m.coef = x.coef * y.coef;
            for (int i = 0; i < kVarCount; ++i) m.power[i] = x.power[i] + y.power[i];
            out.push_back(m);
        }
    return Polynomial(std::move(out)).simplified();
}

namespace {

class Parser {
public:
    explicit Parser(const std::string& s) : s_(s) {}

    Polynomial parse()
    {
        Polynomial p = expr();
        skip();
        if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
        return p;
    }

private:
    [[noreturn]] void fail(const std::string& why) const
    {
        throw ConfigError("cannot parse polynomial \"" + s_ + "\" at position " + std::to_string(pos_) + ": " + why);
    }
    void skip()
    {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool eat(char c)
    {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    Polynomial expr()
    {
        Polynomial p = term();
        for (;;) {
            if (eat('+')) p = p + term();
            else if (eat('-')) p = p + term().scaled(-1.0);
            else return p;
        }
    }
    Polynomial term()
    {
        Polynomial p = factor();
        while (eat('*')) p = p * factor();
        return p;
    }
    Polynomial factor()
    {
        if (eat('-')) return factor().scaled(-1.0);
        if (eat('+')) return factor();
        Polynomial b = base();
        if (eat('^')) {
            skip();
            const std::size_t start = pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            if (start == pos_) fail("expected a non-negative integer exponent");
            const int e = std::stoi(s_.substr(start, pos_ - start));
            Polynomial out = Polynomial::constant(1.0);
            for (int i = 0; i < e; ++i) out = out * b;
            return out;
        }
        return b;
    }
    Polynomial base()
    {
        skip();
        if (pos_ >= s_.size()) fail("unexpected end of input");
        if (eat('(')) {
            Polynomial p = expr();
            if (!eat(')')) fail("expected ')'");
            return p;
        }
        const char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            std::size_t used = 0;
            const double v = std::stod(s_.substr(pos_), &used);
            pos_ += used;
            return Polynomial::constant(v);
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            const std::size_t start = pos_;
            while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            std::string name = s_.substr(start, pos_ - start);
            if (name == "r") name = "r1";
            for (int i = 0; i < kVarCount; ++i)
                if (name == var_name(static_cast<Var>(i))) {
                    Monomial m;
                    m.coef = 1.0;
                    m.power[i] = 1;
                    return Polynomial({m});
                }
            pos_ = start;
            fail("unknown variable '" + name + "'");
        }
        fail("unexpected '" + std::string(1, c) + "'");
    }

    const std::string& s_;
    std::size_t pos_ = 0;
};

} // namespace

Polynomial parse_polynomial(const std::string& text)
{
    return Parser(text).parse();
}

void ReportPolynomial::add(const Polynomial& poly, const PolicyPoint& p, double scale)
{
    const double v[4] = {p.w, p.x, p.z, p.xi};
    for (const auto& t : poly.terms()) {
        double c = scale * t.coef;
        for (int i = 0; i < 4; ++i)
            if (t.power[i]) c *= ipow(v[i], t.power[i]);
        if (c == 0.0) continue;
        const int p1 = t.power[4], p2 = t.power[5], pt = t.power[6];
        bool merged = false;
        for (auto& u : terms_) {
            if (u.p1 == p1 && u.p2 == p2 && u.pt == pt) {
                u.coef += c;
                merged = true;
                break;
            }
        }
        if (!merged) terms_.push_back({c, p1, p2, pt});
    }
}

void ReportPolynomial::scale(double s)
{
    for (auto& t : terms_) t.coef *= s;
}

double ReportPolynomial::eval(const Report& r) const
{
    double s = 0.0;
    const double t = r.type;
    for (const auto& u : terms_) {
        double m = u.coef;
        if (u.p1) m *= ipow(r.x[0], u.p1);
        if (u.p2) m *= ipow(r.x[1], u.p2);
        if (u.pt) m *= ipow(t, u.pt);
        s += m;
    }
    return s;
}

double ReportPolynomial::d_report(int coord, const Report& r) const
{
    double s = 0.0;
    const double t = r.type;
    for (const auto& u : terms_) {
        const int e = coord == 0 ? u.p1 : u.p2;
        if (e == 0) continue;
        double m = u.coef * e;
        const int e1 = coord == 0 ? u.p1 - 1 : u.p1;
        const int e2 = coord == 1 ? u.p2 - 1 : u.p2;
        if (e1) m *= ipow(r.x[0], e1);
        if (e2) m *= ipow(r.x[1], e2);
        if (u.pt) m *= ipow(t, u.pt);
        s += m;
    }
    return s;
}

} // namespace mpelab::population
