#include "gwpt/series.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace gwpt {

EpsScalar operator/(const EpsScalar& a, const EpsScalar& b) {
    if (b.std_part.is_zero())
        throw SeriesError("EpsScalar division: standard part of divisor is zero");
    // 1/(c + eps d) = 1/c - eps d/c^2.
    TRat inv_std = TRat(Rational(1)) / b.std_part;
    EpsScalar inv{inv_std, -b.eps_part * inv_std * inv_std};
    return a * inv;
}

std::string print_trat(const TRat& f) {
    auto print_poly = [](const Poly<Rational>& p) -> std::string {
        if (p.is_zero())
            return "0";
        std::ostringstream os;
        bool first = true;
        for (int i = p.degree(); i >= 0; i--) {
            Rational c = p.coeff(i);
            if (c == 0)
                continue;
            if (first) {
                if (c < 0) {
                    os << "-";
                    c = -c;
                }
            } else {
                os << (c < 0 ? "-" : "+");
                if (c < 0)
                    c = -c;
            }
            if (i == 0 || c != 1)
                os << c;
            if (i >= 1) {
                os << "t";
                if (i > 1)
                    os << "^" << i;
            }
            first = false;
        }
        return os.str();
    };
    if (f.den().degree() == 0 && f.den().coeff(0) == 1)
        return print_poly(f.num());
    return print_poly(f.num()) + "|" + print_poly(f.den());
}

namespace {

Poly<Rational> parse_tpoly(const std::string& text) {
    // Terms like "3t^2", "-t", "1/2*t", "5", joined by '+'/'-'.
    Poly<Rational> out;
    size_t pos = 0;
    auto fail = [&] { throw SeriesError("malformed t-polynomial: '" + text + "'"); };
    while (pos < text.size()) {
        Rational sign(1);
        while (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
            if (text[pos] == '-')
                sign = -sign;
            pos++;
        }
        if (pos >= text.size())
            fail();
        Rational coeff(1);
        bool have_coeff = false;
        size_t start = pos;
        while (pos < text.size() &&
               (isdigit(static_cast<unsigned char>(text[pos])) || text[pos] == '/'))
            pos++;
        if (pos > start) {
            coeff = parse_rational(text.substr(start, pos - start));
            have_coeff = true;
        }
        if (pos < text.size() && text[pos] == '*')
            pos++;
        int exp = 0;
        if (pos < text.size() && text[pos] == 't') {
            pos++;
            exp = 1;
            if (pos < text.size() && text[pos] == '^') {
                pos++;
                size_t es = pos;
                while (pos < text.size() && isdigit(static_cast<unsigned char>(text[pos])))
                    pos++;
                if (es == pos)
                    fail();
                exp = std::stoi(text.substr(es, pos - es));
            }
        } else if (!have_coeff) {
            fail();
        }
        out = out + Poly<Rational>::monomial(sign * coeff, exp);
    }
    return out;
}

} // namespace

TRat parse_trat(const std::string& text) {
    size_t bar = text.find('|');
    if (bar == std::string::npos)
        return TRat(parse_tpoly(text), Poly<Rational>(Rational(1)));
    return TRat(parse_tpoly(text.substr(0, bar)), parse_tpoly(text.substr(bar + 1)));
}

std::string EpsScalar::to_string() const {
    if (is_zero())
        return "0";
    std::string s;
    if (!std_part.is_zero())
        s = print_trat(std_part);
    if (!eps_part.is_zero()) {
        if (!s.empty())
            s += " + ";
        s += "eps*(" + print_trat(eps_part) + ")";
    }
    return s;
}

LaurentSeries LaurentSeries::monomial(SeriesVar var, int exp, EpsScalar c, int trunc) {
    LaurentSeries s(var, trunc);
    s.set_coeff(exp, std::move(c));
    return s;
}

LaurentSeries LaurentSeries::constant(SeriesVar var, EpsScalar c) {
    return monomial(var, 0, std::move(c));
}

int LaurentSeries::lowest_exponent() const {
    if (coeffs_.empty())
        throw SeriesError("lowest_exponent of zero series");
    return coeffs_.begin()->first;
}

EpsScalar LaurentSeries::coeff(int exp) const {
    if (exp > trunc_)
        throw SeriesError("coefficient beyond truncation order requested");
    auto it = coeffs_.find(exp);
    return it == coeffs_.end() ? EpsScalar() : it->second;
}

void LaurentSeries::set_coeff(int exp, EpsScalar c) {
    if (trunc_ != kExactOrder && exp > trunc_)
        return;
    if (c.is_zero())
        coeffs_.erase(exp);
    else
        coeffs_[exp] = std::move(c);
}

bool LaurentSeries::is_t_free() const {
    for (const auto& [e, c] : coeffs_)
        if (!(c.std_part.is_constant() && c.eps_part.is_constant()))
            return false;
    return true;
}

bool LaurentSeries::is_eps_free() const {
    for (const auto& [e, c] : coeffs_)
        if (!c.eps_part.is_zero())
            return false;
    return true;
}

void LaurentSeries::prune() {
    for (auto it = coeffs_.begin(); it != coeffs_.end();) {
        if (it->second.is_zero() || (trunc_ != kExactOrder && it->first > trunc_))
            it = coeffs_.erase(it);
        else
            ++it;
    }
}

static void check_same_var(const LaurentSeries& a, const LaurentSeries& b) {
    if (a.var() != b.var())
        throw SeriesError("series variable mismatch");
}

LaurentSeries operator+(const LaurentSeries& a, const LaurentSeries& b) {
    check_same_var(a, b);
    LaurentSeries out(a.var(), std::min(a.trunc_, b.trunc_));
    out.coeffs_ = a.coeffs_;
    for (const auto& [e, c] : b.coeffs_) {
        auto it = out.coeffs_.find(e);
        if (it == out.coeffs_.end())
            out.coeffs_[e] = c;
        else
            it->second = it->second + c;
    }
    out.prune();
    return out;
}

LaurentSeries operator-(const LaurentSeries& a, const LaurentSeries& b) {
    return a + (-b);
}

LaurentSeries LaurentSeries::operator-() const {
    LaurentSeries out(var_, trunc_);
    for (const auto& [e, c] : coeffs_)
        out.coeffs_[e] = -c;
    return out;
}

LaurentSeries operator*(const LaurentSeries& a, const LaurentSeries& b) {
    check_same_var(a, b);
    if (a.is_zero() || b.is_zero()) {
        // A zero factor that is exact gives an exact zero; otherwise the
        // product is known only up to the pessimistic joint order.
        if (a.is_exact() && a.is_zero())
            return LaurentSeries(a.var());
        if (b.is_exact() && b.is_zero())
            return LaurentSeries(a.var());
        return LaurentSeries(a.var(), std::min(a.trunc_, b.trunc_));
    }
    long trunc = kExactOrder;
    if (!a.is_exact())
        trunc = std::min(trunc, static_cast<long>(a.trunc_) + b.lowest_exponent());
    if (!b.is_exact())
        trunc = std::min(trunc, static_cast<long>(b.trunc_) + a.lowest_exponent());
    LaurentSeries out(a.var(), static_cast<int>(std::min<long>(trunc, kExactOrder)));
    for (const auto& [e1, c1] : a.coeffs_)
        for (const auto& [e2, c2] : b.coeffs_) {
            long e = static_cast<long>(e1) + e2;
            if (e > out.trunc_)
                continue;
            auto it = out.coeffs_.find(static_cast<int>(e));
            if (it == out.coeffs_.end())
                out.coeffs_[static_cast<int>(e)] = c1 * c2;
            else
                it->second = it->second + c1 * c2;
        }
    out.prune();
    return out;
}

LaurentSeries operator*(const EpsScalar& c, const LaurentSeries& a) {
    LaurentSeries out(a.var(), a.trunc_);
    for (const auto& [e, x] : a.coeffs_)
        out.coeffs_[e] = c * x;
    out.prune();
    return out;
}

LaurentSeries LaurentSeries::exponent_scale(int k) const {
    if (k < 1)
        throw SeriesError("exponent_scale: k must be >= 1");
    int trunc =
        is_exact() ? kExactOrder
                   : static_cast<int>(std::min<long>(static_cast<long>(trunc_) * k + (k - 1),
                                                     kExactOrder));
    LaurentSeries out(var_, trunc);
    for (const auto& [e, c] : coeffs_)
        out.coeffs_[e * k] = c;
    return out;
}

LaurentSeries LaurentSeries::argument_scale(int k) const {
    LaurentSeries out(var_, trunc_);
    for (const auto& [e, c] : coeffs_)
        out.coeffs_[e] = EpsScalar(rational_pow(Rational(k), e)) * c;
    out.prune();
    return out;
}

bool equal_to_truncation(const LaurentSeries& a, const LaurentSeries& b) {
    if (a.var() != b.var())
        return false;
    int trunc = std::min(a.truncation(), b.truncation());
    for (const auto& [e, c] : a.coeffs())
        if (e <= trunc && !(b.coeff(e) == c))
            return false;
    for (const auto& [e, c] : b.coeffs())
        if (e <= trunc && !(a.coeff(e) == c))
            return false;
    return true;
}

std::string LaurentSeries::to_string() const {
    std::ostringstream os;
    if (coeffs_.empty())
        os << "0";
    bool first = true;
    for (const auto& [e, c] : coeffs_) {
        if (!first)
            os << " + ";
        os << "(" << c.to_string() << ")";
        if (e != 0)
            os << "*" << var_name(var_) << "^" << e;
        first = false;
    }
    if (trunc_ != kExactOrder)
        os << " + O(" << var_name(var_) << "^" << (trunc_ + 1) << ")";
    return os.str();
}

PRational::PRational(Poly<TRat> num, Poly<TRat> den, int shift)
    : num_(std::move(num)), den_(std::move(den)), shift_(shift) {
    if (den_.is_zero())
        throw SeriesError("PRational: zero denominator");
    normalize();
}

void PRational::normalize() {
    if (num_.is_zero()) {
        den_ = Poly<TRat>(TRat(Rational(1)));
        shift_ = 0;
        return;
    }
    int vn = num_.valuation();
    int vd = den_.valuation();
    auto shift_down = [](const Poly<TRat>& p, int v) {
        std::vector<TRat> c(p.coeffs().begin() + v, p.coeffs().end());
        return Poly<TRat>(std::move(c));
    };
    if (vn > 0) {
        num_ = shift_down(num_, vn);
        shift_ += vn;
    }
    if (vd > 0) {
        den_ = shift_down(den_, vd);
        shift_ -= vd;
    }
    Poly<TRat> g = Poly<TRat>::gcd(num_, den_);
    if (g.degree() > 0) {
        num_ = num_ / g;
        den_ = den_ / g;
    }
    TRat lead = den_.leading();
    if (!(lead == TRat(Rational(1)))) {
        TRat inv = TRat(Rational(1)) / lead;
        num_ = inv * num_;
        den_ = inv * den_;
    }
}

PRational PRational::from_rational(const Rational& q) {
    return PRational(Poly<TRat>(TRat(q)), Poly<TRat>(TRat(Rational(1))));
}

PRational PRational::variable() {
    return PRational(Poly<TRat>(TRat(Rational(1))), Poly<TRat>(TRat(Rational(1))), 1);
}

PRational operator+(const PRational& a, const PRational& b) {
    if (a.is_zero())
        return b;
    if (b.is_zero())
        return a;
    int s = std::min(a.shift_, b.shift_);
    Poly<TRat> pa = Poly<TRat>::monomial(TRat(Rational(1)), a.shift_ - s);
    Poly<TRat> pb = Poly<TRat>::monomial(TRat(Rational(1)), b.shift_ - s);
    return PRational(pa * a.num_ * b.den_ + pb * b.num_ * a.den_, a.den_ * b.den_, s);
}

PRational operator-(const PRational& a, const PRational& b) { return a + (-b); }

PRational PRational::operator-() const {
    PRational out = *this;
    out.num_ = -out.num_;
    return out;
}

PRational operator*(const PRational& a, const PRational& b) {
    return PRational(a.num_ * b.num_, a.den_ * b.den_, a.shift_ + b.shift_);
}

PRational operator/(const PRational& a, const PRational& b) {
    if (b.is_zero())
        throw SeriesError("PRational: division by zero");
    return PRational(a.num_ * b.den_, a.den_ * b.num_, a.shift_ - b.shift_);
}

std::string PRational::to_string() const {
    if (num_.is_zero())
        return "0";
    auto print_p_poly = [](const Poly<TRat>& p) -> std::string {
        std::ostringstream os;
        bool first = true;
        for (int i = 0; i <= p.degree(); i++) {
            TRat c = p.coeff(i);
            if (c.is_zero())
                continue;
            bool neg = false;
            if (c.den().degree() == 0 && c.num().degree() == 0) {
                Rational v = c.num().coeff(0) / c.den().coeff(0);
                if (v < 0) {
                    neg = true;
                    c = -c;
                }
            }
            if (first)
                os << (neg ? "-" : "");
            else
                os << (neg ? " - " : " + ");
            bool unit_coeff = c == TRat(Rational(1));
            if (!unit_coeff || i == 0) {
                std::string cs = print_trat(c);
                if (cs.find_first_of("+-|") != std::string::npos &&
                    !(cs.size() > 0 && cs.find_first_of("+-", 1) == std::string::npos &&
                      cs[0] != '|'))
                    os << "(" << cs << ")";
                else
                    os << cs;
                if (i > 0)
                    os << "*";
            }
            if (i == 1)
                os << "p";
            else if (i > 1)
                os << "p^" << i;
            first = false;
        }
        return os.str();
    };

    // Factored display for denominators of the form (1-p)^k * p-power.
    Poly<TRat> den = den_;
    int ones = 0;
    Poly<TRat> one_minus_p(std::vector<TRat>{TRat(Rational(1)), TRat(Rational(-1))});
    Poly<TRat> p_minus_one(std::vector<TRat>{TRat(Rational(-1)), TRat(Rational(1))});
    while (den.degree() >= 1 && (den % p_minus_one).is_zero()) {
        den = den / p_minus_one;
        ones++;
    }
    // den_ is monic, so den_ == p_minus_one^ones * den; fold the sign of
    // (p-1)^k = (-1)^k (1-p)^k into the remaining constant.
    Poly<TRat> num = num_;
    if (ones % 2 == 1)
        num = -num;
    std::ostringstream os;
    std::string ns = print_p_poly(num);
    bool num_simple = ns.find_first_of("+- ") == std::string::npos ||
                      (ns.size() > 1 && ns[0] == '-' &&
                       ns.find_first_of("+- ", 1) == std::string::npos);
    std::string shift_str;
    if (shift_ != 0) {
        shift_str = shift_ == 1 ? "p" : "p^" + std::to_string(shift_);
    }
    bool den_trivial = den.degree() == 0 && den.coeff(0) == TRat(Rational(1)) && ones == 0;
    if (den_trivial && shift_ == 0)
        return ns;
    if (!shift_str.empty()) {
        os << shift_str;
        if (!(num.degree() == 0 && num.coeff(0) == TRat(Rational(1))))
            os << "*" << (num_simple ? ns : "(" + ns + ")");
    } else {
        os << (num_simple ? ns : "(" + ns + ")");
    }
    if (!den_trivial) {
        os << "/";
        std::string ds;
        if (ones > 0) {
            ds = "(1-p)";
            if (ones > 1)
                ds += "^" + std::to_string(ones);
            if (den.degree() > 0)
                ds += "/(" + print_p_poly(den) + ")";
            else if (!(den.coeff(0) == TRat(Rational(1))))
                ds += "/(" + print_trat(den.coeff(0)) + ")";
        } else {
            ds = "(" + print_p_poly(den) + ")";
        }
        os << ds;
    }
    return os.str();
}

LaurentSeries expand(const PRational& rf, int lo, int hi) {
    if (hi < lo)
        throw SeriesError("expand: hi < lo");
    LaurentSeries out(SeriesVar::P, hi);
    if (rf.is_zero())
        return out;
    // After normalization den(0) != 0; series-divide num by den.
    int order = hi - rf.shift();
    if (order < 0)
        return out;
    const Poly<TRat>& num = rf.num();
    const Poly<TRat>& den = rf.den();
    TRat d0 = den.coeff(0);
    std::vector<TRat> q(static_cast<size_t>(order) + 1, TRat());
    for (int k = 0; k <= order; k++) {
        TRat acc = num.coeff(k);
        for (int j = std::max(0, k - den.degree()); j < k; j++)
            acc = acc - q[j] * den.coeff(k - j);
        q[k] = acc / d0;
    }
    for (int k = 0; k <= order; k++) {
        int e = k + rf.shift();
        if (e >= lo && e <= hi)
            out.set_coeff(e, EpsScalar(q[k], TRat()));
    }
    return out;
}

LaurentSeries p_to_z(const LaurentSeries& s, int order) {
    if (s.var() != SeriesVar::P)
        throw SeriesError("p_to_z: input must be a series in p");
    if (!s.is_exact())
        throw SeriesError("p_to_z: truncated p-series cannot determine z-coefficients; "
                          "use the rational-function form");
    LaurentSeries out(SeriesVar::Z, order);
    // p^m -> e^{mz}: coefficient of z^k is sum_m c_m m^k / k!.
    Rational kfact(1);
    for (int k = 0; k <= order; k++) {
        if (k > 0)
            kfact *= k;
        EpsScalar acc;
        for (const auto& [m, c] : s.coeffs()) {
            Rational mk = rational_pow(Rational(m), k);
            if (mk == 0 && !(k == 0))
                continue;
            acc = acc + EpsScalar(mk / kfact) * c;
        }
        out.set_coeff(k, acc);
    }
    return out;
}

namespace {

// Power series in z with TRat coefficients, truncated; helper for p_to_z.
struct ZSeries {
    std::vector<TRat> c; // c[k] = coefficient of z^k
    explicit ZSeries(int order) : c(static_cast<size_t>(order) + 1, TRat()) {}
    int order() const { return static_cast<int>(c.size()) - 1; }
};

ZSeries zs_mul(const ZSeries& a, const ZSeries& b) {
    ZSeries out(std::min(a.order(), b.order()));
    for (int i = 0; i <= out.order(); i++)
        for (int j = 0; i + j <= out.order() && j <= b.order(); j++) {
            if (i > a.order())
                break;
            out.c[i + j] = out.c[i + j] + a.c[i] * b.c[j];
        }
    return out;
}

ZSeries zs_inv(const ZSeries& a) {
    if (a.c[0].is_zero())
        throw SeriesError("series inverse: vanishing constant term");
    ZSeries out(a.order());
    TRat inv0 = TRat(Rational(1)) / a.c[0];
    out.c[0] = inv0;
    for (int k = 1; k <= a.order(); k++) {
        TRat acc;
        for (int j = 1; j <= k && j <= a.order(); j++)
            acc = acc + a.c[j] * out.c[k - j];
        out.c[k] = -acc * inv0;
    }
    return out;
}

// u(z) = 1 - e^z truncated at z^order.
ZSeries zs_one_minus_ez(int order) {
    ZSeries u(order);
    Rational kfact(1);
    for (int k = 1; k <= order; k++) {
        kfact *= k;
        u.c[k] = TRat(-Rational(1) / kfact);
    }
    return u;
}

ZSeries zs_eval_poly(const Poly<TRat>& p, const ZSeries& x) {
    ZSeries acc(x.order());
    for (int i = p.degree(); i >= 0; i--) {
        acc = zs_mul(acc, x);
        acc.c[0] = acc.c[0] + p.coeff(i);
    }
    return acc;
}

} // namespace

LaurentSeries p_to_z(const PRational& rf, int order) {
    if (rf.is_zero())
        return LaurentSeries(SeriesVar::Z, order);
    // Fold the p-power shift into polynomials.
    Poly<TRat> num = rf.num();
    Poly<TRat> den = rf.den();
    if (rf.shift() >= 0)
        num = num * Poly<TRat>::monomial(TRat(Rational(1)), rf.shift());
    else
        den = den * Poly<TRat>::monomial(TRat(Rational(1)), -rf.shift());

    // Split off the (p-1)-power of the denominator.
    Poly<TRat> p_minus_one(std::vector<TRat>{TRat(Rational(-1)), TRat(Rational(1))});
    int k = 0;
    Poly<TRat> d1 = den;
    while (d1.degree() >= 1 && (d1 % p_minus_one).is_zero()) {
        d1 = d1 / p_minus_one;
        k++;
    }
    if (d1.degree() >= 0 && d1.eval(TRat(Rational(1))).is_zero())
        throw SeriesError("p_to_z: denominator vanishes at p=1 beyond polynomial order");

    // Work in u = 1 - p around u = 0 (p = 1): den = (p-1)^k d1 = (-u)^k d1.
    auto substitute_u = [](const Poly<TRat>& p) {
        // p(1 - u) as a polynomial in u.
        Poly<TRat> result;
        Poly<TRat> one_minus_u(std::vector<TRat>{TRat(Rational(1)), TRat(Rational(-1))});
        for (int i = p.degree(); i >= 0; i--)
            result = result * one_minus_u + Poly<TRat>(p.coeff(i));
        return result;
    };
    Poly<TRat> num_u = substitute_u(num);
    Poly<TRat> d1_u = substitute_u(d1);

    // Taylor coefficients c_0..c_{k-1} of num_u/d1_u around u=0.
    std::vector<TRat> taylor(static_cast<size_t>(std::max(k, 0)), TRat());
    TRat d10 = d1_u.coeff(0);
    for (int j = 0; j < k; j++) {
        TRat acc = num_u.coeff(j);
        for (int i = 0; i < j; i++)
            acc = acc - taylor[i] * d1_u.coeff(j - i);
        taylor[j] = acc / d10;
    }
    // Regular part: (num_u - sum_j taylor_j u^j d1_u) / u^k, a polynomial.
    Poly<TRat> sing;
    for (int j = 0; j < k; j++)
        sing = sing + Poly<TRat>::monomial(taylor[j], j);
    Poly<TRat> reg_num = num_u - sing * d1_u;
    std::vector<TRat> reg_coeffs;
    for (int i = k; i <= reg_num.degree(); i++)
        reg_coeffs.push_back(reg_num.coeff(i));
    Poly<TRat> g(std::move(reg_coeffs));

    // f = (-1)^k [ sum_j taylor_j u^{j-k} + g(u)/d1_u(u) ], u = 1 - e^z.
    int work_order = order + k; // enough z-terms to survive division by z^k
    ZSeries u = zs_one_minus_ez(work_order);
    // u = -z*h(z) with h(z) = (e^z - 1)/z, h(0) = 1;
    // powers u^{j-k} = (-1)^{j-k} z^{j-k} h^{j-k}.
    ZSeries h(work_order);
    {
        Rational kfact(1);
        for (int i = 0; i <= work_order; i++) {
            kfact *= (i + 1);
            h.c[i] = TRat(Rational(1) / kfact);
        }
    }
    ZSeries hinv = zs_inv(h);

    LaurentSeries out(SeriesVar::Z, order);
    int sign_k = parity_sign(k);
    // Singular part.
    for (int j = 0; j < k; j++) {
        if (taylor[j].is_zero())
            continue;
        int pow = j - k; // negative
        // u^pow = (-1)^pow z^pow h^pow
        ZSeries hp(work_order);
        hp.c[0] = TRat(Rational(1));
        for (int i = 0; i < -pow; i++)
            hp = zs_mul(hp, hinv);
        int sgn = parity_sign(pow) * sign_k;
        for (int i = 0; i <= work_order; i++) {
            int e = i + pow;
            if (e > order)
                break;
            TRat v = taylor[j] * hp.c[i] * TRat(Rational(sgn));
            if (!v.is_zero())
                out.set_coeff(e, out.coeff(e) + EpsScalar(v, TRat()));
        }
    }
    // Regular part g(u)/d1_u(u) evaluated at u(z).
    if (!g.is_zero() || true) {
        ZSeries gu = zs_eval_poly(g, u);
        ZSeries du = zs_eval_poly(d1_u, u);
        ZSeries reg = zs_mul(gu, zs_inv(du));
        for (int e = 0; e <= order; e++) {
            TRat v = reg.c[e] * TRat(Rational(sign_k));
            if (!v.is_zero())
                out.set_coeff(e, out.coeff(e) + EpsScalar(v, TRat()));
        }
    }
    return out;
}

std::optional<PRational> detect_rational(const LaurentSeries& s, int max_deg) {
    if (s.var() != SeriesVar::P)
        throw SeriesError("detect_rational: input must be a series in p");
    if (!s.is_eps_free() || !s.is_t_free())
        throw SeriesError("detect_rational: t- or eps-dependent coefficients; "
                          "joint reconstruction is out of scope");
    if (max_deg < 0)
        throw SeriesError("detect_rational: max_deg must be nonnegative");
    if (s.is_zero()) {
        if (!s.is_exact() && s.truncation() < 2 * max_deg)
            throw SeriesError("detect_rational: insufficient known coefficients");
        return PRational();
    }
    int lo = s.lowest_exponent();
    int hi_known;
    if (s.is_exact()) {
        int hi_stored = s.coeffs().rbegin()->first;
        hi_known = std::max(hi_stored, lo + 2 * max_deg);
    } else {
        hi_known = s.truncation();
    }
    long count = static_cast<long>(hi_known) - lo + 1;
    if (count < 2L * max_deg + 1)
        throw SeriesError("detect_rational: insufficient known coefficients (" +
                          std::to_string(count) + " known, need " +
                          std::to_string(2 * max_deg + 1) + ")");

    std::vector<Rational> a;
    for (int e = lo; e <= hi_known; e++) {
        auto it = s.coeffs().find(e);
        a.push_back(it == s.coeffs().end() ? Rational(0)
                                           : it->second.std_part.constant_value());
    }

    // Pade approximant of order [max_deg / max_deg] from the first
    // 2*max_deg+1 terms, by the extended Euclidean algorithm on
    // (x^K, sum a_j x^j): stop at the first remainder of degree <= max_deg.
    int K = 2 * max_deg + 1;
    QPoly r0 = QPoly::monomial(Rational(1), K);
    QPoly r1(std::vector<Rational>(a.begin(), a.begin() + K));
    QPoly v0, v1(Rational(1));
    while (!r1.is_zero() && r1.degree() > max_deg) {
        QPoly q, rem;
        QPoly::divmod(r0, r1, q, rem);
        QPoly vnext = v0 - q * v1;
        r0 = std::move(r1);
        r1 = std::move(rem);
        v0 = std::move(v1);
        v1 = std::move(vnext);
    }
    if (r1.is_zero() && v1.is_zero())
        return std::nullopt;
    if (v1.degree() > max_deg || v1.is_zero())
        return std::nullopt;
    if (v1.coeff(0) == 0)
        return std::nullopt; // denominator must be a unit at p=0

    auto lift = [](const QPoly& p) {
        std::vector<TRat> c;
        for (int i = 0; i <= p.degree(); i++)
            c.emplace_back(p.coeff(i));
        return Poly<TRat>(std::move(c));
    };
    PRational candidate(lift(r1), lift(v1), lo);

    // Never guess: the candidate must reproduce every supplied coefficient.
    LaurentSeries check = expand(candidate, lo, hi_known);
    for (int e = lo; e <= hi_known; e++) {
        Rational expect = a[static_cast<size_t>(e - lo)];
        EpsScalar got = check.coeff(e);
        if (!(got.eps_part.is_zero() && got.std_part == TRat(expect)))
            return std::nullopt;
    }
    if (s.is_exact()) {
        // All higher coefficients of an exact input are known zeros.
        int probe = hi_known + 2 * max_deg + 2;
        LaurentSeries tail = expand(candidate, hi_known + 1, probe);
        if (!tail.is_zero())
            return std::nullopt;
    }
    return candidate;
}

void write_series(std::ostream& os, const LaurentSeries& s) {
    os << "var=" << var_name(s.var());
    if (s.is_exact())
        os << " trunc=exact";
    else
        os << " trunc=" << s.truncation();
    os << "\n";
    for (const auto& [e, c] : s.coeffs())
        os << e << " " << print_trat(c.std_part) << " " << print_trat(c.eps_part) << "\n";
}

LaurentSeries read_series(std::istream& is) {
    std::string header;
    if (!std::getline(is, header))
        throw SeriesError("series file: missing header");
    std::istringstream hs(header);
    std::string tok;
    SeriesVar var = SeriesVar::P;
    int trunc = kExactOrder;
    bool have_var = false;
    while (hs >> tok) {
        if (tok.rfind("var=", 0) == 0) {
            std::string v = tok.substr(4);
            if (v == "p")
                var = SeriesVar::P;
            else if (v == "z")
                var = SeriesVar::Z;
            else
                throw SeriesError("series file: unknown variable '" + v + "'");
            have_var = true;
        } else if (tok.rfind("trunc=", 0) == 0) {
            std::string v = tok.substr(6);
            trunc = v == "exact" ? kExactOrder : std::stoi(v);
        } else {
            throw SeriesError("series file: unexpected header token '" + tok + "'");
        }
    }
    if (!have_var)
        throw SeriesError("series file: header must declare var=p|z");
    LaurentSeries out(var, trunc);
    std::string line;
    int lineno = 1;
    while (std::getline(is, line)) {
        lineno++;
        std::istringstream ls(line);
        std::string es, ss, eps;
        if (!(ls >> es))
            continue;
        if (!(ls >> ss >> eps))
            throw SeriesError("series file line " + std::to_string(lineno) +
                              ": expected 'exponent std eps'");
        out.set_coeff(std::stoi(es), EpsScalar(parse_trat(ss), parse_trat(eps)));
    }
    return out;
}

LaurentSeries read_series_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw SeriesError("cannot open series file '" + path + "'");
    return read_series(in);
}

} // namespace gwpt
