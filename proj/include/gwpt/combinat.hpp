#pragma once

#include "gwpt/rational.hpp"

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

namespace gwpt {

// Integer partition with parts weakly decreasing.
using Partition = std::vector<int>;

inline int partition_size(const Partition& p) {
    int s = 0;
    for (int x : p)
        s += x;
    return s;
}
inline int partition_length(const Partition& p) { return static_cast<int>(p.size()); }

// Number of parts > 1.
inline int partition_length_plus(const Partition& p) {
    int s = 0;
    for (int x : p)
        if (x > 1)
            s++;
    return s;
}

// All partitions of n in reverse-lexicographic order, starting with (n).
std::vector<Partition> integer_partitions(int n);

// Partitions of every m in [0, n]; index 0 holds the empty partition.
std::vector<std::vector<Partition>> integer_partitions_table(int n);

struct SetPartition {
    // Disjoint nonempty blocks covering {1..r}; canonical order: within a
    // block ascending, blocks sorted by least element.
    std::vector<std::vector<int>> blocks;

    int ground_size() const;
    void canonicalize();
    friend bool operator==(const SetPartition&, const SetPartition&) = default;
    std::string to_string() const;
};

std::vector<SetPartition> set_partitions(int r);

uint64_t bell_number(int r);

// Abstract weighted partition: pairs (part, weight label). The canonical
// order is part descending, then label ascending.
using LabeledPartition = std::vector<std::pair<int, int>>;

void canonicalize_labeled(LabeledPartition& lp);

// Order of the subgroup of S_l fixing the list of (part, label) pairs:
// the product of factorials of the multiplicities of identical pairs.
Integer aut_order(const LabeledPartition& lp);

// Brute-force stabilizer order over all of S_l; test oracle for aut_order.
Integer aut_order_bruteforce(const LabeledPartition& lp);

enum class CapOrder { Less, EqualRank, Greater };

// Ordering on underlying partitions of equal size used for the cap matrix:
// lambda < mu if l(lambda) < l(mu), or l equal and l+(lambda) > l+(mu).
// Pairs with equal (l, l+) are incomparable ("equal-rank").
CapOrder cap_order_cmp(const Partition& lambda, const Partition& mu);

struct CombinatError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

} // namespace gwpt
