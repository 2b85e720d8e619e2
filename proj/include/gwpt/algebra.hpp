#pragma once

#include "gwpt/rational.hpp"

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

namespace gwpt {

class FrobeniusAlgebra;
using AlgebraPtr = std::shared_ptr<const FrobeniusAlgebra>;

// A cohomology class, stored as a coefficient vector over the algebra basis.
class GradedClass {
  public:
    GradedClass() = default;
    GradedClass(AlgebraPtr alg, std::vector<Rational> coeffs);

    static GradedClass basis_element(AlgebraPtr alg, int index);
    static GradedClass zero(AlgebraPtr alg);

    const AlgebraPtr& algebra() const { return alg_; }
    const std::vector<Rational>& coeffs() const { return coeffs_; }
    const Rational& coeff(int i) const { return coeffs_[i]; }
    bool is_zero() const;

    // Degree of a homogeneous class; -1 for 0; throws for mixed classes.
    int degree() const;
    bool is_homogeneous() const;

    friend GradedClass operator+(const GradedClass& a, const GradedClass& b);
    friend GradedClass operator-(const GradedClass& a, const GradedClass& b);
    friend GradedClass operator*(const Rational& c, const GradedClass& a);
    GradedClass operator-() const { return Rational(-1) * *this; }

    friend bool operator==(const GradedClass& a, const GradedClass& b);

    std::string to_string() const;

  private:
    AlgebraPtr alg_;
    std::vector<Rational> coeffs_;
};

struct ValidationReport {
    struct Violation {
        std::string identity; // which invariant failed
        std::string witness;  // basis tuple witnessing the failure
    };
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
    std::string to_string() const;
};

// Finite graded Frobenius ring over Q, modeling the even cohomology of a
// surface: degrees 0, 2, 4; top degree 4; nondegenerate Poincare pairing.
class FrobeniusAlgebra : public std::enable_shared_from_this<FrobeniusAlgebra> {
  public:
    struct BasisElement {
        std::string name;
        int degree = 0;
    };

    // cup_table[i][j] is the coefficient vector of e_i * e_j.
    FrobeniusAlgebra(std::string name, std::vector<BasisElement> basis,
                     std::vector<std::vector<Rational>> pairing,
                     std::vector<std::vector<std::vector<Rational>>> cup_table, int unit_index);

    const std::string& name() const { return name_; }
    int size() const { return static_cast<int>(basis_.size()); }
    const std::vector<BasisElement>& basis() const { return basis_; }
    const BasisElement& basis_element_info(int i) const { return basis_[i]; }
    int unit_index() const { return unit_index_; }
    int basis_index(const std::string& name) const; // -1 if not found
    const Rational& pairing_entry(int i, int j) const { return pairing_[i][j]; }

    GradedClass basis_class(int i) const;
    GradedClass unit() const { return basis_class(unit_index_); }

    GradedClass cup(const GradedClass& a, const GradedClass& b) const;
    Rational pair(const GradedClass& a, const GradedClass& b) const;

    // Pairs (phi_i, phi_i^vee) with pair(phi_i, phi_j^vee) = delta_ij; the
    // i-th entry has phi_i = e_i. Throws if the pairing is degenerate.
    std::vector<std::pair<GradedClass, GradedClass>> kunneth_diagonal() const;

    // Dual basis vector of e_i (the phi_i^vee above).
    GradedClass dual_basis_class(int i) const;

    ValidationReport validate() const;

    std::string to_string() const;

  private:
    void ensure_dual() const;

    std::string name_;
    std::vector<BasisElement> basis_;
    std::vector<std::vector<Rational>> pairing_;
    std::vector<std::vector<std::vector<Rational>>> cup_;
    int unit_index_;
    mutable std::vector<std::vector<Rational>> dual_; // columns of pairing^{-1}
    mutable bool dual_computed_ = false;
};

struct AlgebraError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Preset registry: "toy", "K3-truncation", "P2", "elliptic-even".
AlgebraPtr preset_algebra(const std::string& name);
std::vector<std::string> preset_algebra_names();

// Preset file format:
//   algebra <name>
//   basis
//     <name> <degree>
//   pairing
//     <name> <name> <p/q>
//   cup
//     <name> <name> -> <p/q>*<name> [+ <p/q>*<name> ...]
// Unlisted pairing entries are 0; cup with the unit is implied.
AlgebraPtr parse_algebra(std::istream& in);
AlgebraPtr load_algebra_file(const std::string& path);

// Resolves a preset name against GWPT_PRESET_PATH (directories with
// <name>.preset files), falling back to the built-in registry.
AlgebraPtr resolve_algebra(const std::string& name);

} // namespace gwpt
