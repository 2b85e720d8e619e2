#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "gwpt/combinat.hpp"

#include <random>
#include <set>

using namespace gwpt;

TEST_CASE("integer partitions: counts and order") {
    CHECK(integer_partitions(1) == std::vector<Partition>{{1}});
    CHECK(integer_partitions(4).size() == 5);
    // Brute-force cross-check of p(8) = 22 by enumerating weakly decreasing
    // sequences directly.
    int count = 0;
    std::vector<int> cur;
    auto rec = [&](auto&& self, int rest, int max_part) -> void {
        if (rest == 0) {
            count++;
            return;
        }
        for (int x = 1; x <= std::min(rest, max_part); x++) {
            cur.push_back(x);
            self(self, rest - x, x);
            cur.pop_back();
        }
    };
    rec(rec, 8, 8);
    CHECK(count == 22);
    CHECK(integer_partitions(8).size() == 22);

    auto ps = integer_partitions(5);
    CHECK(ps.front() == Partition{5});
    CHECK(ps.back() == Partition{1, 1, 1, 1, 1});
    // Reverse-lexicographic: each partition strictly precedes the next.
    for (size_t i = 0; i + 1 < ps.size(); i++)
        CHECK(ps[i] > ps[i + 1]);
    for (const auto& p : ps)
        for (size_t i = 0; i + 1 < p.size(); i++)
            CHECK(p[i] >= p[i + 1]);
    CHECK_THROWS_AS(integer_partitions(0), CombinatError);
}

TEST_CASE("set partitions match Bell numbers") {
    CHECK(set_partitions(1).size() == 1);
    CHECK(set_partitions(3).size() == 5);
    // Brute-force cross-check for r=5: enumerate functions {1..5} -> {1..5}
    // whose images are restricted-growth strings.
    {
        int r = 5, count = 0;
        std::vector<int> label(r);
        auto rec = [&](auto&& self, int i, int maxl) -> void {
            if (i == r) {
                count++;
                return;
            }
            for (int l = 0; l <= maxl + 1 && l < r; l++) {
                label[i] = l;
                self(self, i + 1, std::max(maxl, l));
            }
        };
        rec(rec, 0, -1);
        CHECK(count == 52);
        CHECK(set_partitions(5).size() == 52);
    }
    for (int r = 1; r <= 8; r++)
        CHECK(set_partitions(r).size() == bell_number(r));
    CHECK_THROWS_AS(set_partitions(0), CombinatError);

    // Canonical form and disjoint-cover invariants.
    for (const auto& sp : set_partitions(4)) {
        std::set<int> seen;
        for (const auto& b : sp.blocks) {
            CHECK_FALSE(b.empty());
            for (int x : b)
                CHECK(seen.insert(x).second);
        }
        CHECK(seen == std::set<int>{1, 2, 3, 4});
        for (size_t i = 0; i + 1 < sp.blocks.size(); i++)
            CHECK(sp.blocks[i].front() < sp.blocks[i + 1].front());
    }
}

TEST_CASE("aut_order basics and brute force") {
    CHECK(aut_order({{1, 0}, {1, 0}}) == 2);
    CHECK(aut_order({{2, 0}, {1, 0}}) == 1);
    // {(1,g),(1,g),(1,d),(2,g),(2,g)} -> 2! * 1 * 2! = 4
    CHECK(aut_order({{1, 0}, {1, 0}, {1, 1}, {2, 0}, {2, 0}}) == 4);

    std::mt19937 rng(7);
    for (int it = 0; it < 200; it++) {
        int l = 1 + static_cast<int>(rng() % 6);
        LabeledPartition lp;
        for (int i = 0; i < l; i++)
            lp.emplace_back(1 + static_cast<int>(rng() % 3), static_cast<int>(rng() % 2));
        canonicalize_labeled(lp);
        Integer fast = aut_order(lp);
        CHECK(fast == aut_order_bruteforce(lp));
        // aut divides l!
        Integer lfact(1);
        for (int k = 2; k <= l; k++)
            lfact *= k;
        CHECK(lfact % fast == 0);
    }
}

TEST_CASE("cap order") {
    CHECK(cap_order_cmp({2}, {1, 1}) == CapOrder::Less);
    CHECK(cap_order_cmp({1, 1}, {2}) == CapOrder::Greater);
    CHECK(cap_order_cmp({2, 1}, {2, 1}) == CapOrder::EqualRank);
    // |lambda| = 3: (2,1) < (1,1,1).
    CHECK(cap_order_cmp({2, 1}, {1, 1, 1}) == CapOrder::Less);
    CHECK_THROWS_AS(cap_order_cmp({2}, {3}), CombinatError);

    // Strict weak ordering: transitivity on random triples of partitions of n.
    std::mt19937 rng(11);
    for (int n = 2; n <= 8; n++) {
        auto ps = integer_partitions(n);
        for (int it = 0; it < 200; it++) {
            const auto& a = ps[rng() % ps.size()];
            const auto& b = ps[rng() % ps.size()];
            const auto& c = ps[rng() % ps.size()];
            auto lt = [](const Partition& x, const Partition& y) {
                return cap_order_cmp(x, y) == CapOrder::Less;
            };
            if (lt(a, b) && lt(b, c))
                CHECK(lt(a, c));
            // Incomparability (equal-rank) must be transitive as well.
            auto eq = [](const Partition& x, const Partition& y) {
                return cap_order_cmp(x, y) == CapOrder::EqualRank;
            };
            if (eq(a, b) && eq(b, c))
                CHECK(eq(a, c));
            // Antisymmetry.
            if (lt(a, b))
                CHECK(cap_order_cmp(b, a) == CapOrder::Greater);
        }
    }
}
