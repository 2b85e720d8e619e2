#pragma once

#include "gwpt/poly.hpp"

#include <iosfwd>
#include <limits>
#include <map>
#include <optional>
#include <string>

namespace gwpt {

// Rational function in the equivariant parameter t.
using TRat = RatFun<Rational>;

// Coefficient ring Q(t)[eps]/(eps^2): standard part + eps part.
struct EpsScalar {
    TRat std_part;
    TRat eps_part;

    EpsScalar() = default;
    explicit EpsScalar(Rational q) : std_part(TRat(std::move(q))) {}
    EpsScalar(TRat s, TRat e) : std_part(std::move(s)), eps_part(std::move(e)) {}

    static EpsScalar eps() { return EpsScalar(TRat(), TRat(Rational(1))); }
    static EpsScalar t() { return EpsScalar(TRat::variable(), TRat()); }

    bool is_zero() const { return std_part.is_zero() && eps_part.is_zero(); }
    bool is_rational() const {
        return std_part.is_constant() && eps_part.is_zero();
    }
    Rational rational_value() const { return std_part.constant_value(); }

    friend EpsScalar operator+(const EpsScalar& a, const EpsScalar& b) {
        return {a.std_part + b.std_part, a.eps_part + b.eps_part};
    }
    friend EpsScalar operator-(const EpsScalar& a, const EpsScalar& b) {
        return {a.std_part - b.std_part, a.eps_part - b.eps_part};
    }
    friend EpsScalar operator*(const EpsScalar& a, const EpsScalar& b) {
        // (a + eps b)(c + eps d) = ac + eps(ad + bc); eps^2 = 0.
        return {a.std_part * b.std_part, a.std_part * b.eps_part + a.eps_part * b.std_part};
    }
    EpsScalar operator-() const { return {-std_part, -eps_part}; }

    // Division requires an invertible standard part.
    friend EpsScalar operator/(const EpsScalar& a, const EpsScalar& b);

    friend bool operator==(const EpsScalar&, const EpsScalar&) = default;

    std::string to_string() const;
};

enum class SeriesVar { P, Z };

inline const char* var_name(SeriesVar v) { return v == SeriesVar::P ? "p" : "z"; }

constexpr int kExactOrder = std::numeric_limits<int>::max();

// Formal Laurent series with explicit truncation bookkeeping: coefficients
// of exponents above `trunc` are unknown. A series with trunc == kExactOrder
// is an exact Laurent polynomial.
class LaurentSeries {
  public:
    explicit LaurentSeries(SeriesVar var = SeriesVar::P, int trunc = kExactOrder)
        : var_(var), trunc_(trunc) {}

    static LaurentSeries monomial(SeriesVar var, int exp, EpsScalar c,
                                  int trunc = kExactOrder);
    static LaurentSeries constant(SeriesVar var, EpsScalar c);
    static LaurentSeries zero(SeriesVar var) { return LaurentSeries(var); }

    SeriesVar var() const { return var_; }
    int truncation() const { return trunc_; }
    bool is_exact() const { return trunc_ == kExactOrder; }
    bool is_zero() const { return coeffs_.empty(); }
    const std::map<int, EpsScalar>& coeffs() const { return coeffs_; }

    int lowest_exponent() const; // throws if zero
    EpsScalar coeff(int exp) const;
    void set_coeff(int exp, EpsScalar c);

    bool is_t_free() const;
    bool is_eps_free() const;

    friend LaurentSeries operator+(const LaurentSeries& a, const LaurentSeries& b);
    friend LaurentSeries operator-(const LaurentSeries& a, const LaurentSeries& b);
    friend LaurentSeries operator*(const LaurentSeries& a, const LaurentSeries& b);
    friend LaurentSeries operator*(const EpsScalar& c, const LaurentSeries& a);
    LaurentSeries operator-() const;

    // Substitution var -> var^k (k >= 1); exponent map.
    LaurentSeries exponent_scale(int k) const;
    // Substitution z -> k z: coefficient of z^e scaled by k^e.
    LaurentSeries argument_scale(int k) const;

    // Equality compares up to the joint truncation order.
    friend bool equal_to_truncation(const LaurentSeries& a, const LaurentSeries& b);
    friend bool operator==(const LaurentSeries&, const LaurentSeries&) = default;

    std::string to_string() const;

  private:
    void prune();
    SeriesVar var_;
    int trunc_;
    std::map<int, EpsScalar> coeffs_;
};

struct SeriesError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Rational function in p over Q(t) (the standard part of the coefficient
// ring), canonical: gcd removed, denominator monic. Laurent numerators are
// carried as a power-of-p shift.
class PRational {
  public:
    PRational() : shift_(0) {}
    PRational(Poly<TRat> num, Poly<TRat> den, int shift = 0);

    static PRational from_rational(const Rational& q);
    static PRational variable(); // p

    const Poly<TRat>& num() const { return num_; }
    const Poly<TRat>& den() const { return den_; }
    int shift() const { return shift_; }
    bool is_zero() const { return num_.is_zero(); }

    friend PRational operator+(const PRational& a, const PRational& b);
    friend PRational operator-(const PRational& a, const PRational& b);
    friend PRational operator*(const PRational& a, const PRational& b);
    friend PRational operator/(const PRational& a, const PRational& b);
    PRational operator-() const;

    friend bool operator==(const PRational&, const PRational&) = default;

    std::string to_string() const;

  private:
    void normalize();
    Poly<TRat> num_;
    Poly<TRat> den_;
    int shift_; // overall factor p^shift
};

// Laurent expansion of rf around p = 0 on the exponent window [lo, hi].
LaurentSeries expand(const PRational& rf, int lo, int hi);

// Variable change p = e^z on an exact Laurent polynomial, truncated at
// z^order. Errors if the input is inexact.
LaurentSeries p_to_z(const LaurentSeries& s, int order);

// Variable change p = e^z on a rational function; partial fractions at p = 1
// handle denominators vanishing there.
LaurentSeries p_to_z(const PRational& rf, int order);

// Minimal rational reconstruction: finds num/den of degree <= max_deg whose
// expansion reproduces every known coefficient of s, or nullopt.
// Requires at least 2*max_deg + 1 known consecutive coefficients and t- and
// eps-free input.
std::optional<PRational> detect_rational(const LaurentSeries& s, int max_deg);

// Series file format:
//   var=p trunc=12
//   <exponent> <std> <eps>
// where each scalar is "a/b" or "poly|poly" in t.
void write_series(std::ostream& os, const LaurentSeries& s);
LaurentSeries read_series(std::istream& is);
LaurentSeries read_series_file(const std::string& path);

std::string print_trat(const TRat& f);
TRat parse_trat(const std::string& text);

} // namespace gwpt
