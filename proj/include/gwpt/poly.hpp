#pragma once

#include "gwpt/rational.hpp"

#include <algorithm>
#include <cassert>
#include <string>
#include <vector>

namespace gwpt {

// Dense univariate polynomial over a field K.
// Coefficient i is the coefficient of x^i; trailing zeros are trimmed.
template <typename K>
class Poly {
  public:
    Poly() = default;
    explicit Poly(K c) {
        if (!(c == K(0)))
            coeffs_.push_back(std::move(c));
    }
    explicit Poly(std::vector<K> coeffs) : coeffs_(std::move(coeffs)) { trim(); }

    static Poly monomial(K c, int deg) {
        if (c == K(0))
            return Poly();
        std::vector<K> v(deg + 1, K(0));
        v[deg] = std::move(c);
        return Poly(std::move(v));
    }

    bool is_zero() const { return coeffs_.empty(); }
    int degree() const { return static_cast<int>(coeffs_.size()) - 1; } // -1 for zero
    const std::vector<K>& coeffs() const { return coeffs_; }

    K coeff(int i) const {
        if (i < 0 || i >= static_cast<int>(coeffs_.size()))
            return K(0);
        return coeffs_[i];
    }

    K leading() const {
        assert(!coeffs_.empty());
        return coeffs_.back();
    }

    K eval(const K& x) const {
        K acc(0);
        for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it)
            acc = acc * x + *it;
        return acc;
    }

    friend Poly operator+(const Poly& a, const Poly& b) {
        std::vector<K> v(std::max(a.coeffs_.size(), b.coeffs_.size()), K(0));
        for (size_t i = 0; i < a.coeffs_.size(); i++)
            v[i] = a.coeffs_[i];
        for (size_t i = 0; i < b.coeffs_.size(); i++)
            v[i] = v[i] + b.coeffs_[i];
        return Poly(std::move(v));
    }
    friend Poly operator-(const Poly& a, const Poly& b) {
        std::vector<K> v(std::max(a.coeffs_.size(), b.coeffs_.size()), K(0));
        for (size_t i = 0; i < a.coeffs_.size(); i++)
            v[i] = a.coeffs_[i];
        for (size_t i = 0; i < b.coeffs_.size(); i++)
            v[i] = v[i] - b.coeffs_[i];
        return Poly(std::move(v));
    }
    friend Poly operator*(const Poly& a, const Poly& b) {
        if (a.is_zero() || b.is_zero())
            return Poly();
        std::vector<K> v(a.coeffs_.size() + b.coeffs_.size() - 1, K(0));
        for (size_t i = 0; i < a.coeffs_.size(); i++)
            for (size_t j = 0; j < b.coeffs_.size(); j++)
                v[i + j] = v[i + j] + a.coeffs_[i] * b.coeffs_[j];
        return Poly(std::move(v));
    }
    friend Poly operator*(const K& c, const Poly& p) {
        if (c == K(0))
            return Poly();
        std::vector<K> v = p.coeffs_;
        for (auto& x : v)
            x = c * x;
        return Poly(std::move(v));
    }
    Poly operator-() const { return K(-1) * *this; }

    friend bool operator==(const Poly& a, const Poly& b) { return a.coeffs_ == b.coeffs_; }
    friend auto operator<=>(const Poly& a, const Poly& b) = default;

    // Euclidean division; requires b nonzero.
    static void divmod(const Poly& a, const Poly& b, Poly& q, Poly& r) {
        assert(!b.is_zero());
        q = Poly();
        r = a;
        K inv_lead = K(1) / b.leading();
        while (!r.is_zero() && r.degree() >= b.degree()) {
            K c = r.leading() * inv_lead;
            int d = r.degree() - b.degree();
            Poly term = monomial(c, d);
            q = q + term;
            r = r - term * b;
        }
    }

    friend Poly operator/(const Poly& a, const Poly& b) {
        Poly q, r;
        divmod(a, b, q, r);
        return q;
    }
    friend Poly operator%(const Poly& a, const Poly& b) {
        Poly q, r;
        divmod(a, b, q, r);
        return r;
    }

    static Poly gcd(Poly a, Poly b) {
        while (!b.is_zero()) {
            Poly r = a % b;
            a = std::move(b);
            b = std::move(r);
        }
        if (!a.is_zero())
            a = (K(1) / a.leading()) * a; // monic
        return a;
    }

    Poly derivative() const {
        if (coeffs_.size() <= 1)
            return Poly();
        std::vector<K> v(coeffs_.size() - 1);
        for (size_t i = 1; i < coeffs_.size(); i++)
            v[i - 1] = K(static_cast<long>(i)) * coeffs_[i];
        return Poly(std::move(v));
    }

    // p(x) -> p(x + c)
    Poly shift(const K& c) const {
        Poly result;
        Poly x_plus_c(std::vector<K>{c, K(1)});
        for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it)
            result = result * x_plus_c + Poly(*it);
        return result;
    }

    // Order of vanishing at x = 0 (lowest nonzero exponent); degree+1 == 0 case excluded.
    int valuation() const {
        for (size_t i = 0; i < coeffs_.size(); i++)
            if (!(coeffs_[i] == K(0)))
                return static_cast<int>(i);
        return -1;
    }

  private:
    void trim() {
        while (!coeffs_.empty() && coeffs_.back() == K(0))
            coeffs_.pop_back();
    }
    std::vector<K> coeffs_;
};

// Rational function num/den over a field K, kept in canonical form:
// gcd(num, den) = 1 and den monic.
template <typename K>
class RatFun {
  public:
    RatFun() : num_(), den_(Poly<K>(K(1))) {}
    explicit RatFun(K c) : num_(Poly<K>(std::move(c))), den_(Poly<K>(K(1))) {}
    RatFun(Poly<K> num, Poly<K> den) : num_(std::move(num)), den_(std::move(den)) {
        if (den_.is_zero())
            throw std::domain_error("RatFun: zero denominator");
        normalize();
    }

    static RatFun variable() { return RatFun(Poly<K>::monomial(K(1), 1), Poly<K>(K(1))); }

    const Poly<K>& num() const { return num_; }
    const Poly<K>& den() const { return den_; }
    bool is_zero() const { return num_.is_zero(); }
    bool is_constant() const { return num_.degree() <= 0 && den_.degree() == 0; }

    K constant_value() const {
        if (!is_constant())
            throw std::domain_error("RatFun: not a constant");
        if (num_.is_zero())
            return K(0);
        return num_.coeff(0) / den_.coeff(0);
    }

    friend RatFun operator+(const RatFun& a, const RatFun& b) {
        return RatFun(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
    }
    friend RatFun operator-(const RatFun& a, const RatFun& b) {
        return RatFun(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
    }
    friend RatFun operator*(const RatFun& a, const RatFun& b) {
        return RatFun(a.num_ * b.num_, a.den_ * b.den_);
    }
    friend RatFun operator/(const RatFun& a, const RatFun& b) {
        if (b.is_zero())
            throw std::domain_error("RatFun: division by zero");
        return RatFun(a.num_ * b.den_, a.den_ * b.num_);
    }
    RatFun operator-() const { return RatFun(-num_, den_); }

    friend bool operator==(const RatFun& a, const RatFun& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend auto operator<=>(const RatFun& a, const RatFun& b) = default;

  private:
    void normalize() {
        if (num_.is_zero()) {
            den_ = Poly<K>(K(1));
            return;
        }
        Poly<K> g = Poly<K>::gcd(num_, den_);
        if (g.degree() > 0) {
            num_ = num_ / g;
            den_ = den_ / g;
        }
        K lead = den_.leading();
        if (!(lead == K(1))) {
            K inv = K(1) / lead;
            num_ = inv * num_;
            den_ = inv * den_;
        }
    }
    Poly<K> num_;
    Poly<K> den_;
};

using QPoly = Poly<Rational>;
using QRatFun = RatFun<Rational>;

} // namespace gwpt
