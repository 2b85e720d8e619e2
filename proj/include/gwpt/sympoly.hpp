#pragma once

#include "gwpt/rational.hpp"

#include <compare>
#include <map>
#include <string>
#include <vector>

namespace gwpt {

// Interned opaque symbols (K-matrix entries, Chern-class placeholders,
// geometric tokens). Append-only store, safe for concurrent insertion.
using AtomId = int;

AtomId intern_atom(const std::string& name);
const std::string& atom_name(AtomId id);

// Product of atoms with positive integer exponents, sorted by id.
struct AtomMonomial {
    std::vector<std::pair<AtomId, int>> factors;

    bool is_one() const { return factors.empty(); }
    void multiply(AtomId id, int exp = 1);
    void multiply(const AtomMonomial& other);

    friend bool operator==(const AtomMonomial&, const AtomMonomial&) = default;
    friend auto operator<=>(const AtomMonomial&, const AtomMonomial&) = default;

    std::string to_string() const;
};

// Laurent polynomial in z over Q[atoms]: finitely many monomials
// z^e * (atom product) with rational coefficients.
class SymPoly {
  public:
    struct Key {
        int z_exp = 0;
        AtomMonomial atoms;
        friend bool operator==(const Key&, const Key&) = default;
        friend auto operator<=>(const Key&, const Key&) = default;
    };

    SymPoly() = default;
    explicit SymPoly(Rational c);
    static SymPoly z_power(int e, Rational c = Rational(1));
    static SymPoly atom(AtomId id, Rational c = Rational(1));
    static SymPoly monomial(int z_exp, AtomMonomial atoms, Rational c);

    bool is_zero() const { return terms_.empty(); }
    bool is_one() const;
    const std::map<Key, Rational>& terms() const { return terms_; }
    bool is_single_monomial() const { return terms_.size() == 1; }

    void add_term(Key key, const Rational& c);

    friend SymPoly operator+(const SymPoly& a, const SymPoly& b);
    friend SymPoly operator-(const SymPoly& a, const SymPoly& b);
    friend SymPoly operator*(const SymPoly& a, const SymPoly& b);
    friend SymPoly operator*(const Rational& c, const SymPoly& a);
    SymPoly operator-() const;

    // Multiplication by z^e (exact in the Laurent ring).
    SymPoly z_shift(int e) const;
    // Substitution z -> k z.
    SymPoly z_scale(int k) const;

    // Highest/lowest z exponent over all terms; requires nonzero.
    int z_degree() const;
    int z_valuation() const;
    bool atom_free() const;

    friend bool operator==(const SymPoly&, const SymPoly&) = default;

    std::string to_string(const char* var = "z") const;

  private:
    std::map<Key, Rational> terms_;
};

} // namespace gwpt
