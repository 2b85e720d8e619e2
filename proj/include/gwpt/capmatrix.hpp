#pragma once

#include "gwpt/fock.hpp"
#include "gwpt/sympoly.hpp"

#include <string>
#include <vector>

namespace gwpt {

// The relative cap matrix Z(lambda | tau[mu]) over B-weighted partitions of
// d, encoded through its structural constraints:
//   - rows are B-weighted partitions lambda, columns are dual-weighted mu;
//   - the entry vanishes when l(lambda) < l(mu), or when l is equal and
//     l+(lambda) > l+(mu);
//   - on equal-rank pairs the entry vanishes off the matching diagonal and
//     evaluates to |Aut(lambda)| * prod_i (1/lambda_i!) * prod pair(delta,gamma)
//     there (each part contributing <(k,delta)|tau_{k-1}(gamma)> = 1/k! int);
//   - all remaining entries are free symbolic atoms.
class CapMatrix {
  public:
    enum class EntryKind { Zero, Evaluation, Symbolic };

    CapMatrix(AlgebraPtr alg, int d);

    int size() const { return static_cast<int>(index_.size()); }
    const std::vector<BasisPartition>& index() const { return index_; }
    EntryKind kind(int row, int col) const;
    Rational evaluation(int row, int col) const; // Evaluation entries only
    std::string atom_label(int row, int col) const;

  private:
    AlgebraPtr alg_;
    int d_;
    std::vector<BasisPartition> index_;
};

struct CapMatrixReport {
    bool block_triangular = false;
    bool diagonal_nonzero = false;
    bool determinant_matches = false;
    Rational diagonal_product;
    std::vector<std::string> notes;
    bool ok() const { return block_triangular && diagonal_nonzero && determinant_matches; }
};

// Verifies the block-triangular structure and that the determinant is the
// product of the diagonal evaluations for every substitution of the free
// atoms (checked on `substitutions` random rational substitutions).
CapMatrixReport check_cap_matrix(const AlgebraPtr& alg, int d, int substitutions = 5,
                                 unsigned seed = 2024);

} // namespace gwpt
