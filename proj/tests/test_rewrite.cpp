#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "gwpt/rewrite.hpp"

#include <random>
#include <set>

using namespace gwpt;

namespace {

Bracket simple_bracket(const std::string& geom_name, Theory th, ClassMode mode,
                       std::vector<int> surf, int d, int genus, int n_div,
                       std::vector<int> taus = {}) {
    Bracket b;
    b.theory = th;
    b.mode = mode;
    b.geom = make_geometry(geom_name, genus, n_div);
    b.cls = {std::move(surf), d, 1};
    BasisPartition unit_part;
    for (int i = 0; i < d; i++)
        unit_part.pairs.emplace_back(1, b.geom.surface->unit_index());
    unit_part.canonicalize();
    for (int i = 0; i < n_div; i++)
        b.rel.push_back(RelSlot::make(unit_part));
    b.interior.taus = taus;
    for (size_t i = 0; i < taus.size(); i++)
        b.interior.groups.push_back(
            {{static_cast<int>(i) + 1}, b.geom.surface->basis_index("p"), {}});
    b.interior.canonicalize();
    b.validate();
    return b;
}

} // namespace

TEST_CASE("geometry arithmetic") {
    Geometry k3 = make_geometry("K3xC", 2, 1);
    CHECK(d_beta(k3, {{1, 1}, 3, 1}) == 3 * (2 - 2 * 2)); // d(2-2g), K3 has c1 = 0
    CHECK(divisor_degree(k3, {{1, 1}, 3, 1}) == 3);

    Geometry p2 = make_geometry("P2xC", 0, 1);
    CHECK(d_beta(p2, {{2}, 1, 1}) == 2 * 3 + 1 * 2); // int_beta c1(T_S) + d(2-2g)

    CHECK_THROWS_AS(make_geometry("nope"), RewriteError);
}

TEST_CASE("bracket validation and printing") {
    Bracket b = simple_bracket("K3xC", Theory::PT, ClassMode::Red, {1, 1}, 1, 0, 1);
    CHECK(b.to_string() == "Z[PT,red]{K3xC}_(B+F,1)(q1(1) |0> || tau())");

    Bracket bad = b;
    bad.rel[0] = RelSlot::make(BasisPartition{{{2, 0}}}); // size 2 != d = 1
    CHECK_THROWS_AS(bad.validate(), RewriteError);
}

TEST_CASE("degenerate: trivial split is the identity") {
    Bracket b = simple_bracket("toyxC", Theory::PT, ClassMode::Full, {0}, 1, 0, 0);
    Expression e = degenerate(b, TrivialSplit{});
    CHECK(e == Expression::single(b));
    Bracket with_div = simple_bracket("toyxC", Theory::PT, ClassMode::Full, {0}, 1, 0, 1);
    CHECK_THROWS_AS(degenerate(with_div, TrivialSplit{}), RewriteError);
}

TEST_CASE("degenerate: separating node, full mode, d=1") {
    // N=1, r=0, d=1 over the toy basis: each curve split contributes the two
    // Kunneth terms of Hilb^1, every factor staying in full mode.
    Bracket b = simple_bracket("toyxC", Theory::PT, ClassMode::Full, {1}, 1, 0, 1);
    NodeSeparating split{0, 0, {1}};
    Expression e = degenerate(b, split);
    // 2 curve splits (A = A+0 = 0+A) x 2 Kunneth terms.
    CHECK(e.term_count() == 4);
    for (const auto& [t, c] : e.terms()) {
        REQUIRE(t.brackets.size() == 2);
        for (const auto& fb : t.brackets)
            CHECK(fb.mode == ClassMode::Full);
        // class adds up and the node slots balance.
        CHECK(t.brackets[0].cls.surf[0] + t.brackets[1].cls.surf[0] == 1);
        CHECK(t.brackets[0].cls.fiber == 1);
        CHECK(t.brackets[1].cls.fiber == 1);
    }
}

TEST_CASE("degenerate: Kunneth factor size for d=2") {
    // Canonical multiset enumeration of B-weighted partitions of 2 over the
    // 2-element toy basis gives 5 diagonal summands; the two factors of each
    // product commute, so mirror pairs merge and 3 canonical terms remain:
    //   {(2,1)} (x) {(2,p)}            -2 twice -> -4
    //   {(1,1),(1,1)} (x) {(1,p),(1,p)} 1/2 twice -> 1
    //   {(1,1),(1,p)} self-dual                  -> 1
    Bracket b = simple_bracket("toyxC", Theory::PT, ClassMode::Full, {0}, 2, 0, 0);
    NodeSeparating split{0, 0, {}};
    Expression e = degenerate(b, split);
    REQUIRE(e.term_count() == 3);
    std::multiset<Rational> coeffs;
    for (const auto& [t, c] : e.terms())
        coeffs.insert(c.coeff(0).rational_value());
    CHECK(coeffs == std::multiset<Rational>{Rational(-4), Rational(1), Rational(1)});
}

TEST_CASE("degenerate: reduced mode gives the Leibniz expansion") {
    Bracket b = simple_bracket("toyxC", Theory::PT, ClassMode::Red, {1}, 1, 0, 0);
    NodeSeparating split{0, 0, {}};
    Expression e = degenerate(b, split);
    // red (x) vir forces the vir side to carry beta = 0; the two Leibniz
    // orders merge with the mirrored Kunneth labels, coefficient 2 each.
    CHECK(e.term_count() == 2);
    for (const auto& [t, c] : e.terms()) {
        CHECK(c.coeff(0).rational_value() == Rational(2));
        REQUIRE(t.brackets.size() == 2);
        int reds = 0;
        for (const auto& fb : t.brackets) {
            if (fb.mode == ClassMode::Red) {
                reds++;
                CHECK(fb.cls.surf[0] == 1);
            } else {
                CHECK(fb.mode == ClassMode::Vir);
                CHECK(fb.cls.surf_zero());
            }
        }
        CHECK(reds == 1);
    }
}

TEST_CASE("degenerate: nonseparating node trades genus for two markers") {
    Bracket b = simple_bracket("toyxC", Theory::PT, ClassMode::Red, {1}, 1, 1, 0);
    Expression e = degenerate(b, NodeNonseparating{});
    CHECK_FALSE(e.is_zero());
    for (const auto& [t, c] : e.terms()) {
        REQUIRE(t.brackets.size() == 1);
        CHECK(t.brackets[0].geom.genus == 0);
        CHECK(t.brackets[0].geom.n_div == 2);
        CHECK(t.brackets[0].cls == b.cls);
    }
    CHECK_THROWS_AS(degenerate(simple_bracket("toyxC", Theory::PT, ClassMode::Red, {1}, 1, 0, 0),
                               NodeNonseparating{}),
                    RewriteError);
}

TEST_CASE("epsilon split: product rule") {
    // (a + eps b)(c + eps d): vir part ac, red part ad + bc, realized on two
    // full-mode bracket factors with eps-free coefficients.
    Bracket b1 = simple_bracket("toyxC", Theory::PT, ClassMode::Full, {1}, 1, 0, 0);
    Bracket b2 = simple_bracket("toyxC", Theory::PT, ClassMode::Full, {0}, 1, 0, 0);
    Term t;
    t.brackets = {b1, b2};
    Expression e(SeriesVar::P);
    e.add_term(t, LaurentSeries::constant(SeriesVar::P, EpsScalar(Rational(1))));
    auto [vir, red] = epsilon_split(e);
    // vir part: both factors vir; b1 has beta != 0, so it is pruned to zero.
    CHECK(vir.is_zero());
    // red part: exactly the Leibniz terms that survive pruning: red(b1)*vir(b2).
    CHECK(red.term_count() == 1);
    const auto& [rt, rc] = *red.terms().begin();
    int reds = 0;
    for (const auto& fb : rt.brackets)
        if (fb.mode == ClassMode::Red)
            reds++;
    CHECK(reds == 1);

    // Pure-vir input: red part zero.
    Bracket v = simple_bracket("toyxC", Theory::PT, ClassMode::Vir, {0}, 1, 0, 0);
    auto [vv, rr] = epsilon_split(Expression::single(v));
    CHECK(vv == Expression::single(v));
    CHECK(rr.is_zero());
}

TEST_CASE("full-mode degeneration splits into the vir and red formulas") {
    for (int d = 1; d <= 2; d++) {
        for (int beta = 0; beta <= 1; beta++) {
            Bracket full = simple_bracket("toyxC", Theory::PT, ClassMode::Full, {beta}, d, 0, 1);
            NodeSeparating split{0, 0, {1}};
            auto [vir, red] = epsilon_split(degenerate(full, split));

            Bracket bvir = full;
            bvir.mode = ClassMode::Vir;
            Bracket bred = full;
            bred.mode = ClassMode::Red;
            Expression vir_direct = bvir.is_zero_bracket() ? Expression(SeriesVar::P)
                                                           : degenerate(bvir, split);
            Expression red_direct = degenerate(bred, split);
            CHECK(vir == vir_direct);
            CHECK(red == red_direct);
        }
    }
}

TEST_CASE("rigidify") {
    Bracket rub;
    rub.theory = Theory::PT;
    rub.mode = ClassMode::Vir;
    rub.geom = make_geometry("rubber-toy");
    rub.cls = {{0}, 1, 1};
    BasisPartition bp;
    bp.pairs = {{1, rub.geom.surface->unit_index()}};
    rub.rel = {RelSlot::make(bp), RelSlot::make(bp)};
    rub.interior.taus = {0};
    rub.interior.groups = {{{1}, rub.geom.surface->basis_index("p"), {}}};

    Bracket rigid = rigidify(rub);
    CHECK_FALSE(rigid.geom.rubber);
    CHECK(rigid.geom.family == "P");
    bool has_d0 = false;
    for (const auto& [id, e] : rigid.interior.groups[0].atoms.factors)
        if (atom_name(id) == "[D0]")
            has_d0 = true;
    CHECK(has_d0);
    CHECK_THROWS_AS(rigidify(rigid), RewriteError); // no longer rubber

    Bracket r0 = rub;
    r0.interior = DescMonomial{};
    CHECK_THROWS_AS(rigidify(r0), RewriteError); // r = 0
}

TEST_CASE("split_diagonal") {
    // r=2, gamma = Drel_{12}: absolute-diagonal terms minus rubber terms
    // with both markings forced onto the rubber.
    Bracket b = simple_bracket("toyxC", Theory::PT, ClassMode::Vir, {0}, 1, 0, 1);
    b.interior.taus = {0, 0};
    b.interior.groups = {{{1, 2}, b.geom.surface->unit_index(), {}}};
    b.interior.canonicalize();

    Expression e = split_diagonal(b);
    CHECK_FALSE(e.is_zero());
    int abs_terms = 0, rubber_terms = 0;
    for (const auto& [t, c] : e.terms()) {
        if (t.brackets.size() == 1) {
            abs_terms++;
            CHECK(t.brackets[0].geom.family == "SxC");
        } else {
            rubber_terms++;
            REQUIRE(t.brackets.size() == 2);
            bool has_rubber = false;
            for (const auto& fb : t.brackets) {
                if (fb.geom.rubber) {
                    has_rubber = true;
                    // both original markings live on the rubber factor
                    CHECK(fb.interior.markings() == 2);
                }
            }
            CHECK(has_rubber);
            // the correction enters with a minus sign
            bool negative = false;
            for (const auto& [exp, x] : c.coeffs())
                if (x.std_part.num().coeff(0) < 0)
                    negative = true;
            CHECK(negative);
        }
    }
    CHECK(abs_terms > 0);
    CHECK(rubber_terms > 0);

    // No diagonal factor: error.
    Bracket pb = simple_bracket("toyxC", Theory::PT, ClassMode::Vir, {0}, 1, 0, 1, {0, 0});
    CHECK_THROWS_AS(split_diagonal(pb), RewriteError);
}

TEST_CASE("multiple cover formulas") {
    Bracket pt = simple_bracket("K3xC", Theory::PT, ClassMode::Red, {1, 0}, 1, 0, 1);
    CHECK(mcf_pt(pt, 1) == Expression::single(pt));
    Expression e2 = mcf_pt(pt, 2);
    CHECK(e2.term_count() == 2);
    bool saw_k2 = false;
    for (const auto& [t, c] : e2.terms())
        if (t.brackets[0].cls.cover_k == 2) {
            saw_k2 = true;
            CHECK(t.brackets[0].arg_scale == 2);
        }
    CHECK(saw_k2);
    Expression e3 = mcf_pt(pt, 3);
    CHECK(e3.term_count() == 2); // k in {1, 3}

    Bracket gw = pt;
    gw.theory = Theory::GW;
    CHECK(mcf_gw(gw, 2).term_count() == 2);
    CHECK_THROWS_AS(mcf_pt(gw, 2), RewriteError);
    CHECK_THROWS_AS(mcf_gw(pt, 2), RewriteError);
    Bracket vir = pt;
    vir.mode = ClassMode::Vir;
    CHECK_THROWS_AS(mcf_pt(vir, 2), RewriteError);
}

TEST_CASE("mcf compatibility") {
    for (int div = 1; div <= 3; div++) {
        Derivation d = verify_mcf_compat(div);
        CHECK_FALSE(d.steps.empty());
        if (div == 2)
            CHECK(d.steps.size() == 4);
    }
}

TEST_CASE("reduce_to_cap terminal and small cases") {
    // (0,1) is already terminal.
    Bracket cap = simple_bracket("K3xC", Theory::PT, ClassMode::Red, {1, 0}, 1, 0, 1);
    ReduceResult r0 = reduce_to_cap(cap);
    CHECK(r0.derivation.steps.empty());
    CHECK(r0.expr == Expression::single(cap));

    // (1,0): one genus step to (0,2), then one inversion step to (0,1).
    Bracket g1 = simple_bracket("K3xC", Theory::PT, ClassMode::Red, {1, 0}, 1, 1, 0);
    ReduceResult r1 = reduce_to_cap(g1);
    REQUIRE(r1.derivation.steps.size() == 2);
    CHECK(r1.derivation.steps[0].rule == "genus-node");
    CHECK(r1.derivation.steps[1].rule == "cap-invert");
    for (const auto& [before, after] : r1.measures)
        CHECK(after < before);
    // All surviving reduced brackets are caps.
    for (const auto& [t, c] : r1.expr.terms())
        for (const auto& fb : t.brackets)
            if (fb.geom.family == "SxC" && fb.mode == ClassMode::Red)
                CHECK((fb.geom.genus == 0 && fb.geom.n_div <= 1));
}

TEST_CASE("reduce_to_cap random instances terminate with decreasing measure") {
    std::mt19937 rng(99);
    for (int it = 0; it < 25; it++) {
        int g = static_cast<int>(rng() % 4);
        int n = static_cast<int>(rng() % 3) + (g == 0 ? 1 : 0);
        int d = 1 + static_cast<int>(rng() % 3);
        Bracket b = simple_bracket("K3xC", Theory::PT, ClassMode::Red,
                                   {static_cast<int>(rng() % 2), static_cast<int>(rng() % 2)},
                                   d, g, n);
        ReduceResult r = reduce_to_cap(b);
        for (const auto& [before, after] : r.measures)
            CHECK(after < before);
        for (const auto& [t, c] : r.expr.terms())
            for (const auto& fb : t.brackets)
                if (fb.geom.family == "SxC" && fb.mode != ClassMode::Vir)
                    CHECK((fb.geom.genus == 0 && fb.geom.n_div <= 1));
        // Derivations replay deterministically.
        ReduceResult again = reduce_to_cap(b);
        CHECK(again.derivation.to_records() == r.derivation.to_records());
    }
}

TEST_CASE("capped_assemble") {
    Expression c2 = capped_assemble("V", "R", 2, 2, 2);
    CHECK(c2.term_count() == 3); // 1 + 2 summands
    Expression just_v = capped_assemble("V", "", 2, 2, 2);
    CHECK(just_v.term_count() == 1);
    Expression nothing = capped_assemble("", "R", 2, 2, 2);
    CHECK(nothing.is_zero());
    CHECK_THROWS_AS(capped_assemble("V", "R", 1, 2, 2), RewriteError);
}

TEST_CASE("comparison_simplify") {
    Bracket pb = simple_bracket("toyxC", Theory::PT, ClassMode::Vir, {0}, 1, 0, 1, {0, 1});
    Bracket simplified = comparison_simplify(pb);
    CHECK(simplified.std_desc);
    CHECK(comparison_unsimplify(simplified) == pb);

    Bracket diag = pb;
    diag.interior.groups = {{{1, 2}, pb.geom.surface->unit_index(), {}}};
    diag.interior.canonicalize();
    CHECK_THROWS_AS(comparison_simplify(diag), RewriteError);

    Bracket r0 = simple_bracket("toyxC", Theory::PT, ClassMode::Vir, {0}, 1, 0, 1);
    CHECK(comparison_simplify(r0) == r0);
}

TEST_CASE("prefactor identities") {
    PrefactorReport report = check_prefactors(1000);
    CHECK(report.ok());
    CHECK(report.samples == 1000);
}

TEST_CASE("correspondence compatible with degeneration") {
    KMatrix K;
    // r=1, tau0: trivially equal.
    {
        Bracket b = simple_bracket("P2xC", Theory::GW, ClassMode::Vir, {1}, 1, 0, 0, {0});
        CHECK_NOTHROW(verify_correspondence_compat(b, NodeSeparating{0, 0, {}}, K));
    }
    // r=1, tau1: the K[(2);(1)] atoms must line up across routes.
    {
        Bracket b = simple_bracket("P2xC", Theory::GW, ClassMode::Vir, {1}, 1, 0, 0, {1});
        CHECK_NOTHROW(verify_correspondence_compat(b, NodeSeparating{0, 0, {}}, K));
    }
    // r=2, tau0 tau0, d=1.
    {
        Bracket b = simple_bracket("P2xC", Theory::GW, ClassMode::Vir, {1}, 1, 0, 0, {0, 0});
        CHECK_NOTHROW(verify_correspondence_compat(b, NodeSeparating{0, 0, {}}, K));
    }
    // Bounds are enforced.
    {
        Bracket b =
            simple_bracket("P2xC", Theory::GW, ClassMode::Vir, {1}, 1, 0, 0, {1, 1, 1, 1});
        CHECK_THROWS_AS(verify_correspondence_compat(b, NodeSeparating{0, 0, {}}, K),
                        RewriteError);
    }
}

TEST_CASE("cross-side relative diagonals restrict to zero") {
    // A two-marking group is never split across the two sides of a
    // degeneration: every output term keeps it whole on one factor.
    Bracket b = simple_bracket("toyxC", Theory::PT, ClassMode::Vir, {0}, 1, 0, 1);
    b.interior.taus = {0, 0, 1};
    b.interior.groups = {{{1, 2}, b.geom.surface->unit_index(), {}},
                         {{3}, b.geom.surface->basis_index("p"), {}}};
    b.interior.canonicalize();
    Expression e = degenerate(b, NodeSeparating{0, 0, {1}});
    CHECK_FALSE(e.is_zero());
    int whole_group_terms = 0;
    for (const auto& [t, c] : e.terms()) {
        for (const auto& fb : t.brackets)
            for (const auto& g : fb.interior.groups)
                if (g.indices.size() == 2)
                    whole_group_terms++;
        // the three markings distribute as 2+1 or 3+0, never 1+2 split of
        // the glued pair
        int m1 = t.brackets[0].interior.markings();
        int m2 = t.brackets[1].interior.markings();
        CHECK(m1 + m2 == 3);
        CHECK((m1 != 1 || m2 != 2) == (m1 == 0 || m1 == 2 || m1 == 3));
    }
    CHECK(whole_group_terms == e.term_count());
}

TEST_CASE("degenerate: normal cone") {
    Bracket b = simple_bracket("toyxC", Theory::PT, ClassMode::Vir, {0}, 1, 1, 1, {0});
    Expression e = degenerate(b, NormalCone{0});
    CHECK_FALSE(e.is_zero());
    for (const auto& [t, c] : e.terms()) {
        REQUIRE(t.brackets.size() == 2);
        // one factor keeps the (S x C) geometry and genus, the other is the
        // rigid bundle (P, D_{0,inf}) carrying the old relative insertion.
        const Bracket* sxc = nullptr;
        const Bracket* bundle = nullptr;
        for (const auto& fb : t.brackets) {
            if (fb.geom.family == "SxC")
                sxc = &fb;
            if (fb.geom.family == "P")
                bundle = &fb;
        }
        REQUIRE(sxc != nullptr);
        REQUIRE(bundle != nullptr);
        CHECK(sxc->geom.genus == 1);
        CHECK(bundle->rel.size() == 2);
        CHECK(bundle->rel[1].kind == RelSlot::Kind::Partition); // the old lambda
    }
    CHECK_THROWS_AS(degenerate(b, NormalCone{3}), RewriteError);
}

TEST_CASE("degenerate: symbolic K3 surface split") {
    Bracket b = simple_bracket("K3xC", Theory::PT, ClassMode::Red, {1, 0}, 1, 0, 1, {0});
    Expression e = degenerate(b, K3SurfaceSplit{});
    CHECK_FALSE(e.is_zero());
    for (const auto& [t, c] : e.terms()) {
        REQUIRE(t.brackets.size() == 2);
        for (const auto& fb : t.brackets) {
            CHECK(fb.geom.family == "opaque");
            // the new divisor E x C carries a shared symbolic Kunneth sum
            CHECK(fb.rel.back().kind == RelSlot::Kind::KunnethHalf);
        }
        CHECK(t.brackets[0].rel.back().kunneth_id == t.brackets[1].rel.back().kunneth_id);
        CHECK_FALSE(t.scalars.is_one()); // unexpanded class-sum token
    }
    Bracket plain = simple_bracket("P2xC", Theory::PT, ClassMode::Vir, {0}, 1, 0, 1);
    CHECK_THROWS_AS(degenerate(plain, K3SurfaceSplit{}), RewriteError);
}

TEST_CASE("correspondence compatibility with mixed descendents and a divisor") {
    // Exercises the marking renumbering across sides: distinct tau indices
    // and a relative component pushed to side 2.
    KMatrix K;
    Bracket b = simple_bracket("P2xC", Theory::GW, ClassMode::Vir, {1}, 1, 0, 1, {0, 1});
    CHECK_NOTHROW(verify_correspondence_compat(b, NodeSeparating{0, 0, {2}}, K));
    Bracket b2 = simple_bracket("P2xC", Theory::GW, ClassMode::Vir, {1}, 1, 0, 1, {1, 0});
    CHECK_NOTHROW(verify_correspondence_compat(b2, NodeSeparating{0, 0, {1}}, K));
}

TEST_CASE("split_diagonal peels one pair off a larger diagonal group") {
    Bracket b = simple_bracket("toyxC", Theory::PT, ClassMode::Vir, {0}, 1, 0, 1);
    b.interior.taus = {0, 0, 0};
    b.interior.groups = {{{1, 2, 3}, b.geom.surface->unit_index(), {}}};
    b.interior.canonicalize();
    Expression e = split_diagonal(b);
    CHECK_FALSE(e.is_zero());
    for (const auto& [t, c] : e.terms()) {
        if (t.brackets.size() == 1) {
            // absolute term: markings 1,3 stay glued, marking 2 peels off
            const auto& groups = t.brackets[0].interior.groups;
            REQUIRE(groups.size() == 2);
            CHECK(groups[0].indices == std::vector<int>{1, 3});
            CHECK(groups[1].indices == std::vector<int>{2});
        } else {
            // rubber correction: all three markings land on the rubber side
            for (const auto& fb : t.brackets)
                if (fb.geom.rubber)
                    CHECK(fb.interior.markings() == 3);
        }
    }
}

TEST_CASE("rule applications balance class and marking bookkeeping") {
    std::mt19937 rng(2718);
    for (int it = 0; it < 30; it++) {
        int r = static_cast<int>(rng() % 3);
        int n_div = static_cast<int>(rng() % 3);
        std::vector<int> taus;
        for (int i = 0; i < r; i++)
            taus.push_back(static_cast<int>(rng() % 2));
        Bracket b = simple_bracket("toyxC", Theory::PT, ClassMode::Full,
                                   {static_cast<int>(rng() % 3)}, 1 + static_cast<int>(rng() % 2),
                                   0, n_div, taus);
        std::vector<int> sides(n_div);
        for (auto& s : sides)
            s = 1 + static_cast<int>(rng() % 2);
        Expression e = degenerate(b, NodeSeparating{0, 0, sides});
        for (const auto& [t, c] : e.terms()) {
            REQUIRE(t.brackets.size() == 2);
            // curve class adds up
            CHECK(t.brackets[0].cls.surf[0] + t.brackets[1].cls.surf[0] == b.cls.surf[0]);
            // markings distribute
            CHECK(t.brackets[0].interior.markings() + t.brackets[1].interior.markings() == r);
            // each factor validates (slot sizes match divisor degrees)
            CHECK_NOTHROW(t.brackets[0].validate());
            CHECK_NOTHROW(t.brackets[1].validate());
            // the original relative insertions are all accounted for
            CHECK(t.brackets[0].rel.size() + t.brackets[1].rel.size() ==
                  static_cast<size_t>(n_div) + 2);
        }
    }
}
