#pragma once

#include "gwpt/algebra.hpp"
#include "gwpt/combinat.hpp"
#include "gwpt/sympoly.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace gwpt {

struct DescendError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RepeatedDiagonalError : DescendError {
    using DescendError::DescendError;
};

// One glued cluster of markings: the indices are identified by small
// relative diagonals; the cluster carries a basis weight (pulled back via
// its first index) and a monomial of opaque cohomology factors.
struct MarkGroup {
    std::vector<int> indices; // sorted, 1-based
    int weight = 0;           // basis index into the ambient algebra
    AtomMonomial atoms;

    friend bool operator==(const MarkGroup&, const MarkGroup&) = default;
    friend auto operator<=>(const MarkGroup&, const MarkGroup&) = default;
};

// Normal form of a marked-class descendent monomial: descendent exponents
// tau_{k_i} per marking and a partition of the markings into groups.
struct DescMonomial {
    std::vector<int> taus;         // k_i >= 0, one per marking
    std::vector<MarkGroup> groups; // disjoint, covering 1..r, sorted by least index

    int markings() const { return static_cast<int>(taus.size()); }
    // |alpha| with alpha_i = k_i + 1.
    int alpha_size() const;
    Partition alpha() const;
    bool is_pullback() const; // all groups singleton

    void canonicalize();
    friend bool operator==(const DescMonomial&, const DescMonomial&) = default;
    friend auto operator<=>(const DescMonomial&, const DescMonomial&) = default;
};

// Formal sum of monomials with SymPoly coefficients over a fixed algebra.
class DescExpr {
  public:
    DescExpr() = default;
    explicit DescExpr(AlgebraPtr alg) : alg_(std::move(alg)) {}

    const AlgebraPtr& algebra() const { return alg_; }
    const std::map<DescMonomial, SymPoly>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    void add_term(DescMonomial m, const SymPoly& c);

    friend DescExpr operator+(const DescExpr& a, const DescExpr& b);
    friend DescExpr operator-(const DescExpr& a, const DescExpr& b);
    friend DescExpr operator*(const SymPoly& c, const DescExpr& a);

    friend bool operator==(const DescExpr&, const DescExpr&) = default;

    std::string to_string() const;

  private:
    AlgebraPtr alg_;
    std::map<DescMonomial, SymPoly> terms_;
};

// Universal GW/PT correspondence matrix. Entries are Laurent polynomials in
// z over polynomials in opaque atoms:
//   - 0 whenever |alpha| < |alphat| (basic vanishing),
//   - delta_{alpha,alphat} * delta_{l(alpha),1} * z^{l-|alpha|} on equal size,
//   - the interned atom K[alpha;alphat] otherwise, unless user-supplied.
class KMatrix {
  public:
    enum class ChernContext { AbsoluteTangent, LogTangent };

    SymPoly entry(const Partition& alpha, const Partition& alphat) const;
    void set_entry(const Partition& alpha, const Partition& alphat, SymPoly value);

    static std::string atom_label(const Partition& alpha, const Partition& alphat);

  private:
    std::map<std::pair<Partition, Partition>, SymPoly> overrides_;
};

// Helpers to build monomials; class weights are expanded multilinearly over
// the basis, so the result is an expression in general.
DescExpr pullback_monomial(const AlgebraPtr& alg, const std::vector<int>& taus,
                           const std::vector<GradedClass>& classes);
DescExpr monomial_expr(const AlgebraPtr& alg, DescMonomial m);

// Multiplies a small relative diagonal joining `indices` into the class,
// merging the touched groups (cup of weights, product of atoms). Throws
// RepeatedDiagonalError if the indices are already glued. The cup product
// may expand over the basis, hence an expression is returned.
DescExpr multiply_diagonal(const AlgebraPtr& alg, const DescMonomial& m,
                           const std::vector<int>& indices);

// Standard correspondence transformation (pullback classes).
DescExpr transform(const AlgebraPtr& alg, const DescMonomial& m, const KMatrix& K,
                   KMatrix::ChernContext ctx = KMatrix::ChernContext::LogTangent);

// Generalized transformation for arbitrary marked classes.
DescExpr transform_general(const AlgebraPtr& alg, const DescMonomial& m, const KMatrix& K,
                           KMatrix::ChernContext ctx = KMatrix::ChernContext::LogTangent);
DescExpr transform_general(const DescExpr& e, const KMatrix& K,
                           KMatrix::ChernContext ctx = KMatrix::ChernContext::LogTangent);

// Triangular inversion: invert(transform(m)) == m, by induction on |alpha|.
DescExpr invert(const DescExpr& e, const KMatrix& K,
                KMatrix::ChernContext ctx = KMatrix::ChernContext::LogTangent);

// Higher-descendent expansion: each tuple a_i of length l contributes l
// markings glued into one group weighted by delta_i.
DescExpr higher_expand(const AlgebraPtr& alg, const std::vector<std::vector<int>>& tuples,
                       const std::vector<GradedClass>& classes);

// Text grammar: "tau1(B) tau0(p) * Drel(1,2)"; print/parse round-trips.
std::string print_monomial(const AlgebraPtr& alg, const DescMonomial& m);
std::string print_expr(const DescExpr& e);
DescExpr parse_monomial(const AlgebraPtr& alg, const std::string& text);

} // namespace gwpt
