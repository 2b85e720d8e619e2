#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "gwpt/fock.hpp"

#include <random>

using namespace gwpt;

namespace {

WeightedPartition wp(AlgebraPtr alg, std::vector<std::pair<int, std::string>> pairs) {
    WeightedPartition out;
    for (auto& [m, name] : pairs)
        out.pairs.emplace_back(m, alg->basis_class(alg->basis_index(name)));
    return out;
}

BasisPartition bp(const AlgebraPtr& alg, std::vector<std::pair<int, std::string>> pairs) {
    BasisPartition out;
    for (auto& [m, name] : pairs)
        out.pairs.emplace_back(m, alg->basis_index(name));
    out.canonicalize();
    return out;
}

} // namespace

TEST_CASE("sign calibration selects the frozen convention") {
    // The convention family: (s1, s2) in {+-1}^2, with and without the
    // alternating (-1)^m factor in the adjoint. The closed-form pairing is
    // the calibration anchor; exactly the conventions whose effective
    // contraction is (-1)^(m-1) * m * pair survive, and the frozen choice
    // must be among them.
    auto alg = preset_algebra("toy");
    std::vector<NakajimaConvention> passing;
    for (int s1 : {1, -1})
        for (int s2 : {1, -1})
            for (bool alt : {false, true}) {
                NakajimaConvention conv{s1, s2, alt};
                bool ok = true;
                for (int n = 1; n <= 3 && ok; n++) {
                    auto parts = basis_partitions(alg, n);
                    for (const auto& mu : parts)
                        for (const auto& nu : parts) {
                            Rational closed = pairing_closed_form(mu, nu);
                            Rational prod(1);
                            for (auto& [m, w] : mu.pairs)
                                prod *= m;
                            Rational prod_nu(1);
                            for (auto& [m, w] : nu.pairs)
                                prod_nu *= m;
                            // partition_class carries 1/prod factors; the
                            // closed form is stated for the classes.
                            FockState a = Rational(1) / prod * basis_state(alg, mu);
                            FockState b = Rational(1) / prod_nu * dual_relabel_state(alg, nu);
                            if (nakajima_pair(a, b, conv) != closed) {
                                ok = false;
                                break;
                            }
                        }
                }
                if (ok)
                    passing.push_back(conv);
            }
    REQUIRE_FALSE(passing.empty());
    bool frozen_passes = false;
    for (const auto& conv : passing) {
        CHECK_FALSE(conv.alternating_adjoint);
        CHECK(conv.s1 * conv.s2 == -1);
        if (conv.s1 == kFrozenConvention.s1 && conv.s2 == kFrozenConvention.s2 &&
            conv.alternating_adjoint == kFrozenConvention.alternating_adjoint)
            frozen_passes = true;
    }
    CHECK(frozen_passes);
}

TEST_CASE("partition_class normalization and multilinearity") {
    auto alg = preset_algebra("toy");
    auto one = alg->unit();
    auto p = alg->basis_class(alg->basis_index("p"));

    FockState s = partition_class(alg, wp(alg, {{2, "p"}}));
    REQUIRE(s.terms().size() == 1);
    CHECK(s.terms().begin()->second == Rational(1, 2));

    FockState u = partition_class(alg, wp(alg, {{1, "1"}}));
    REQUIRE(u.terms().size() == 1);
    CHECK(u.terms().begin()->second == Rational(1));

    // Weight sums split the state.
    WeightedPartition mixed;
    mixed.pairs.emplace_back(1, one + p);
    FockState split = partition_class(alg, mixed);
    CHECK(split == partition_class(alg, wp(alg, {{1, "1"}})) +
                       partition_class(alg, wp(alg, {{1, "p"}})));
}

TEST_CASE("nakajima_pair examples") {
    auto alg = preset_algebra("toy");
    // <q1(p)1, q1(1)1> = pair(p, 1) = 1 (m = 1 is convention independent).
    CHECK(nakajima_pair(basis_state(alg, bp(alg, {{1, "p"}})),
                        basis_state(alg, bp(alg, {{1, "1"}}))) == Rational(1));

    // <q1(g)q1(g)1, q1(d)q1(d)1> = 2 pair(g,d)^2; brute-force over the two
    // matchings with g = 1, d = p gives 2 * 1 = 2.
    CHECK(nakajima_pair(basis_state(alg, bp(alg, {{1, "1"}, {1, "1"}})),
                        basis_state(alg, bp(alg, {{1, "p"}, {1, "p"}}))) == Rational(2));

    // <partition_class({(2,1)}), partition_class({(2,p)})> = -1/2.
    CHECK(nakajima_pair(partition_class(alg, wp(alg, {{2, "1"}})),
                        partition_class(alg, wp(alg, {{2, "p"}}))) == Rational(-1, 2));

    CHECK_THROWS_AS(nakajima_pair(basis_state(alg, bp(alg, {{1, "p"}})),
                                  basis_state(alg, bp(alg, {{2, "p"}}))),
                    FockError);
}

TEST_CASE("pairing closed form examples") {
    auto alg = preset_algebra("toy");
    // mu = {(2,1)}, nu = {(2,p)} with p dual-indexed as 1^vee: delta holds
    // when read as dual labels matching mu's labels.
    CHECK(pairing_closed_form(bp(alg, {{2, "1"}}), bp(alg, {{2, "1"}})) == Rational(-1, 2));
    CHECK(pairing_closed_form(bp(alg, {{1, "1"}}), bp(alg, {{1, "1"}})) == Rational(1));
    CHECK(pairing_closed_form(bp(alg, {{2, "1"}}), bp(alg, {{1, "p"}, {1, "p"}})) ==
          Rational(0));
}

TEST_CASE("closed form equals oracle on all pairs up to size 4") {
    for (const auto& name : {"toy", "K3-truncation"}) {
        auto alg = preset_algebra(name);
        for (int n = 1; n <= 4; n++) {
            if (std::string(name) == "K3-truncation" && n > 3)
                continue; // covered at acceptance level; keep unit test fast
            auto parts = basis_partitions(alg, n);
            for (const auto& mu : parts)
                for (const auto& nu : parts) {
                    Rational prod_mu(1), prod_nu(1);
                    for (auto& [m, w] : mu.pairs)
                        prod_mu *= m;
                    for (auto& [m, w] : nu.pairs)
                        prod_nu *= m;
                    Rational oracle = nakajima_pair(
                        Rational(1) / prod_mu * basis_state(alg, mu),
                        Rational(1) / prod_nu * dual_relabel_state(alg, nu));
                    CHECK(oracle == pairing_closed_form(mu, nu));
                }
        }
    }
}

TEST_CASE("hilb diagonal coefficients and counts") {
    auto alg = preset_algebra("toy");
    auto d1 = hilb_diagonal(1, alg);
    CHECK(d1.size() == 2);
    for (const auto& term : d1)
        CHECK(term.coefficient == Rational(1));

    // Canonical multiset enumeration: (2,w) gives 2 entries, (1,1) weighted
    // multisets give 3, so 5 canonical summands for n=2. (Enumerating
    // weightings as ordered lists would give 6; the |Aut| coefficient below
    // absorbs exactly that difference.)
    auto d2 = hilb_diagonal(2, alg);
    CHECK(d2.size() == 5);
    for (const auto& term : d2) {
        if (term.mu.pairs == LabeledPartition{{2, 0}} ||
            term.mu.pairs == LabeledPartition{{2, 1}})
            CHECK(term.coefficient == Rational(-2));
        if (term.mu.pairs == LabeledPartition{{1, 0}, {1, 0}})
            CHECK(term.coefficient == Rational(1, 2));
        if (term.mu.pairs == LabeledPartition{{1, 0}, {1, 1}})
            CHECK(term.coefficient == Rational(1));
    }
}

TEST_CASE("projector identity") {
    for (const auto& name : {"toy", "K3-truncation"}) {
        auto alg = preset_algebra(name);
        int maxn = std::string(name) == "toy" ? 4 : 3;
        for (int n = 1; n <= maxn; n++) {
            auto report = verify_projector(n, alg);
            CHECK(report.ok());
            CHECK(report.checked == static_cast<int>(basis_partitions(alg, n).size()));
        }
    }
}

TEST_CASE("projector fails with corrupted sign") {
    auto alg = preset_algebra("toy");
    auto diag = hilb_diagonal(2, alg);
    for (auto& term : diag)
        if (parity_sign(2 - term.mu.length()) < 0)
            term.coefficient = -term.coefficient; // drop the (-1)^(n-l) sign
    auto report = verify_projector_with(diag, 2, alg);
    CHECK_FALSE(report.ok());
    CHECK_FALSE(report.failures.empty());
}

TEST_CASE("pairing symmetry on even cohomology") {
    auto alg = preset_algebra("K3-truncation");
    std::mt19937 rng(3);
    auto parts = basis_partitions(alg, 3);
    for (int it = 0; it < 50; it++) {
        const auto& a = parts[rng() % parts.size()];
        const auto& b = parts[rng() % parts.size()];
        CHECK(nakajima_pair(basis_state(alg, a), basis_state(alg, b)) ==
              nakajima_pair(basis_state(alg, b), basis_state(alg, a)));
    }
}

TEST_CASE("state print/parse round trip") {
    auto alg = preset_algebra("K3-truncation");
    FockState s(alg, 3);
    s.add_term(bp(alg, {{2, "p"}, {1, "B"}}), Rational(1, 2));
    s.add_term(bp(alg, {{3, "F"}}), Rational(-2));
    std::string text = print_state(s);
    CHECK(parse_state(alg, text) == s);

    // Canonical rendering: "1/2 q2(p) q1(B) |0>".
    FockState single(alg, 3);
    single.add_term(bp(alg, {{2, "p"}, {1, "B"}}), Rational(1, 2));
    CHECK(print_state(single) == "1/2 q2(p) q1(B) |0>");

    std::mt19937 rng(17);
    for (int it = 0; it < 100; it++) {
        FockState t(alg, 4);
        auto parts = basis_partitions(alg, 4);
        for (int j = 0; j < 3; j++) {
            Rational c(static_cast<long>(rng() % 7) - 3, 1 + static_cast<long>(rng() % 4));
            t.add_term(parts[rng() % parts.size()], c);
        }
        if (t.is_zero())
            continue;
        CHECK(parse_state(alg, print_state(t)) == t);
    }
}
