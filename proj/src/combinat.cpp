#include "gwpt/combinat.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>

namespace gwpt {

std::vector<Partition> integer_partitions(int n) {
    if (n <= 0)
        throw CombinatError("integer_partitions: n must be positive");
    std::vector<Partition> out;
    Partition cur;
    // Recursive descent emits reverse-lexicographic order directly.
    auto rec = [&](auto&& self, int rest, int max_part) -> void {
        if (rest == 0) {
            out.push_back(cur);
            return;
        }
        for (int part = std::min(rest, max_part); part >= 1; part--) {
            cur.push_back(part);
            self(self, rest - part, part);
            cur.pop_back();
        }
    };
    rec(rec, n, n);
    return out;
}

std::vector<std::vector<Partition>> integer_partitions_table(int n) {
    std::vector<std::vector<Partition>> table(n + 1);
    table[0] = {Partition{}};
    for (int m = 1; m <= n; m++)
        table[m] = integer_partitions(m);
    return table;
}

int SetPartition::ground_size() const {
    int n = 0;
    for (const auto& b : blocks)
        n += static_cast<int>(b.size());
    return n;
}

void SetPartition::canonicalize() {
    for (auto& b : blocks)
        std::sort(b.begin(), b.end());
    std::sort(blocks.begin(), blocks.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
}

std::string SetPartition::to_string() const {
    std::ostringstream os;
    os << "{";
    for (size_t i = 0; i < blocks.size(); i++) {
        if (i)
            os << "|";
        for (size_t j = 0; j < blocks[i].size(); j++) {
            if (j)
                os << ",";
            os << blocks[i][j];
        }
    }
    os << "}";
    return os.str();
}

std::vector<SetPartition> set_partitions(int r) {
    if (r <= 0)
        throw CombinatError("set_partitions: r must be positive");
    // Restricted growth strings: element i goes into an existing block or
    // opens a new one. Produces canonical order directly.
    std::vector<SetPartition> out;
    SetPartition cur;
    auto rec = [&](auto&& self, int i) -> void {
        if (i > r) {
            out.push_back(cur);
            return;
        }
        size_t nblocks = cur.blocks.size();
        for (size_t k = 0; k < nblocks; k++) {
            cur.blocks[k].push_back(i);
            self(self, i + 1);
            cur.blocks[k].pop_back();
        }
        cur.blocks.push_back({i});
        self(self, i + 1);
        cur.blocks.pop_back();
    };
    rec(rec, 1);
    return out;
}

uint64_t bell_number(int r) {
    // Bell triangle.
    std::vector<uint64_t> row{1};
    for (int i = 1; i <= r; i++) {
        std::vector<uint64_t> next;
        next.push_back(row.back());
        for (uint64_t x : row)
            next.push_back(next.back() + x);
        row = std::move(next);
    }
    return row.front();
}

void canonicalize_labeled(LabeledPartition& lp) {
    std::sort(lp.begin(), lp.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first)
            return a.first > b.first;
        return a.second < b.second;
    });
}

Integer aut_order(const LabeledPartition& lp) {
    std::map<std::pair<int, int>, int> mult;
    for (const auto& pw : lp)
        mult[pw]++;
    Integer acc(1);
    for (const auto& [pw, m] : mult)
        for (int k = 2; k <= m; k++)
            acc *= k;
    return acc;
}

Integer aut_order_bruteforce(const LabeledPartition& lp) {
    int l = static_cast<int>(lp.size());
    std::vector<int> perm(l);
    std::iota(perm.begin(), perm.end(), 0);
    Integer count(0);
    do {
        bool fixes = true;
        for (int i = 0; i < l && fixes; i++)
            fixes = lp[perm[i]] == lp[i];
        if (fixes)
            count++;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return count;
}

CapOrder cap_order_cmp(const Partition& lambda, const Partition& mu) {
    if (partition_size(lambda) != partition_size(mu))
        throw CombinatError("cap_order_cmp: partitions of different size");
    int ll = partition_length(lambda), lm = partition_length(mu);
    if (ll != lm)
        return ll < lm ? CapOrder::Less : CapOrder::Greater;
    int pl = partition_length_plus(lambda), pm = partition_length_plus(mu);
    if (pl != pm)
        return pl > pm ? CapOrder::Less : CapOrder::Greater;
    return CapOrder::EqualRank;
}

} // namespace gwpt
