#pragma once

#include "gwpt/algebra.hpp"
#include "gwpt/combinat.hpp"

#include <map>
#include <string>
#include <vector>

namespace gwpt {

// Cohomology-weighted partition with arbitrary class weights (input form).
struct WeightedPartition {
    std::vector<std::pair<int, GradedClass>> pairs; // (part, weight)

    int size() const {
        int s = 0;
        for (const auto& [m, w] : pairs)
            s += m;
        return s;
    }
    int length() const { return static_cast<int>(pairs.size()); }
};

// Canonical basis-weighted partition: (part, basis index) pairs sorted by
// part descending then basis index ascending. Keys of FockState.
struct BasisPartition {
    LabeledPartition pairs;

    int size() const {
        int s = 0;
        for (const auto& [m, w] : pairs)
            s += m;
        return s;
    }
    int length() const { return static_cast<int>(pairs.size()); }
    Partition underlying() const {
        Partition p;
        for (const auto& [m, w] : pairs)
            p.push_back(m);
        return p;
    }
    void canonicalize() { canonicalize_labeled(pairs); }

    friend bool operator==(const BasisPartition&, const BasisPartition&) = default;
    friend auto operator<=>(const BasisPartition&, const BasisPartition&) = default;
};

// Finite linear combination of canonical basis-weighted partitions of one
// fixed size, i.e. a class in H*(S^[n]) written in the Nakajima basis.
class FockState {
  public:
    FockState() = default;
    FockState(AlgebraPtr alg, int size) : alg_(std::move(alg)), size_(size) {}

    const AlgebraPtr& algebra() const { return alg_; }
    int size() const { return size_; }
    const std::map<BasisPartition, Rational>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    void add_term(BasisPartition bp, const Rational& c);

    friend FockState operator+(const FockState& a, const FockState& b);
    friend FockState operator*(const Rational& c, const FockState& a);

    friend bool operator==(const FockState&, const FockState&) = default;

    std::string to_string() const;

  private:
    AlgebraPtr alg_;
    int size_ = 0;
    std::map<BasisPartition, Rational> terms_;
};

struct FockError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Sign convention for the Nakajima oracle, fixed once by calibration against
// the closed-form pairing (see tests). The contraction picked up when an
// annihilation operator of index m passes its matching creation operator is
//   adjoint_sign(m) * move_sign(m) * m * pair(a, b),
// with move_sign(m) = -s1*(-1)^(m-1) and
// adjoint_sign(m) = s2 * ((-1)^m if alternating_adjoint else 1).
struct NakajimaConvention {
    int s1 = 1;
    int s2 = -1;
    bool alternating_adjoint = false;

    Rational contraction(int m) const {
        int move_sign = -s1 * parity_sign(m - 1);
        int adj = s2 * (alternating_adjoint ? parity_sign(m) : 1);
        return Rational(adj * move_sign * m);
    }
};

inline constexpr NakajimaConvention kFrozenConvention{};

// The state (1/prod lambda_i) prod q_{lambda_i}(delta_i) |0>, expanded
// multilinearly into canonical basis-weighted partitions.
FockState partition_class(AlgebraPtr alg, const WeightedPartition& lambda);

FockState basis_state(AlgebraPtr alg, const BasisPartition& bp);

// Fock inner product by normal ordering (the commutator oracle).
Rational nakajima_pair(const FockState& mu, const FockState& nu,
                       const NakajimaConvention& conv = kFrozenConvention);

// Closed form <mu, nu^vee> for mu B-weighted and nu weighted by dual-basis
// indices: delta_{mu,nu} * (-1)^(n + l(mu)) * |Aut(mu)| / prod(mu_i).
Rational pairing_closed_form(const BasisPartition& mu, const BasisPartition& nu_dual_indexed);

// Replaces dual-basis indices by the actual dual classes and expands.
FockState dual_relabel_state(AlgebraPtr alg, const BasisPartition& nu_dual_indexed);

// All canonical B-weighted partitions of n.
std::vector<BasisPartition> basis_partitions(const AlgebraPtr& alg, int n);

struct DiagonalTerm {
    BasisPartition mu;      // B-weighted
    BasisPartition mu_dual; // same labels, read as dual-basis indices
    Rational coefficient;   // (-1)^(n - l(mu)) * prod(mu_i) / |Aut(mu)|
};

// Kunneth decomposition of the diagonal of S^[n] in the Nakajima basis.
std::vector<DiagonalTerm> hilb_diagonal(int n, const AlgebraPtr& alg);

struct ProjectorReport {
    struct Failure {
        BasisPartition nu;
        std::string detail;
    };
    std::vector<Failure> failures;
    int checked = 0;
    bool ok() const { return failures.empty(); }
};

// Checks that hilb_diagonal(n) acts as the identity on every B-weighted
// partition of n under the Fock pairing.
ProjectorReport verify_projector(int n, const AlgebraPtr& alg);
ProjectorReport verify_projector_with(const std::vector<DiagonalTerm>& diagonal, int n,
                                      const AlgebraPtr& alg);

// Text form "1/2 q2(p) q1(B) |0>"; parse/print round-trip.
std::string print_state(const FockState& s);
FockState parse_state(AlgebraPtr alg, const std::string& text);

} // namespace gwpt
