#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "gwpt/algebra.hpp"

#include <sstream>

using namespace gwpt;

TEST_CASE("toy preset structure") {
    auto alg = preset_algebra("toy");
    CHECK(alg->size() == 2);
    int one = alg->basis_index("1");
    int p = alg->basis_index("p");
    REQUIRE(one >= 0);
    REQUIRE(p >= 0);
    CHECK(alg->pair(alg->basis_class(one), alg->basis_class(p)) == Rational(1));
    CHECK(alg->pair(alg->basis_class(one), alg->basis_class(one)) == Rational(0));
    CHECK(alg->cup(alg->basis_class(p), alg->basis_class(p)).is_zero());
    CHECK(alg->validate().ok());
}

TEST_CASE("K3-truncation cup and pairing") {
    auto alg = preset_algebra("K3-truncation");
    auto B = alg->basis_class(alg->basis_index("B"));
    auto F = alg->basis_class(alg->basis_index("F"));
    auto p = alg->basis_class(alg->basis_index("p"));
    auto one = alg->unit();

    // On a surface the cup of two degree-2 classes is (a.b) p.
    CHECK(alg->cup(B, F) == p);
    CHECK(alg->cup(B, B) == Rational(-2) * p);
    CHECK(alg->cup(F, F).is_zero());
    CHECK(alg->cup(one, B) == B);
    CHECK(alg->pair(B, B) == Rational(-2));
    CHECK(alg->pair(B, F) == Rational(1));
    CHECK(alg->pair(one, p) == Rational(1));
    CHECK(alg->validate().ok());
}

TEST_CASE("pair(B,B) recomputed from preset file text") {
    // Independent Gram-matrix route: write the preset out as a file, reparse,
    // and compare entries.
    std::string text = "algebra k3t\n"
                       "basis\n 1 0\n B 2\n F 2\n p 4\n"
                       "pairing\n 1 p 1\n B B -2\n B F 1\n"
                       "cup\n B B -> -2*p\n B F -> p\n F F -> 0\n B p -> 0\n F p -> 0\n p p -> 0\n";
    std::istringstream in(text);
    auto alg = parse_algebra(in);
    auto ref = preset_algebra("K3-truncation");
    for (int i = 0; i < 4; i++)
        for (int j = 0; j < 4; j++)
            CHECK(alg->pairing_entry(i, j) ==
                  ref->pairing_entry(ref->basis_index(alg->basis_element_info(i).name),
                                     ref->basis_index(alg->basis_element_info(j).name)));
    CHECK(alg->validate().ok());
}

TEST_CASE("kunneth diagonal reproducing property") {
    for (const auto& name : preset_algebra_names()) {
        auto alg = preset_algebra(name);
        auto pairs = alg->kunneth_diagonal();
        REQUIRE(static_cast<int>(pairs.size()) == alg->size());
        for (int i = 0; i < alg->size(); i++)
            for (int j = 0; j < alg->size(); j++)
                CHECK(alg->pair(pairs[i].first, pairs[j].second) ==
                      (i == j ? Rational(1) : Rational(0)));
        // sum_i phi_i * pair(phi_i^vee, nu) = nu on every basis class.
        for (int k = 0; k < alg->size(); k++) {
            GradedClass nu = alg->basis_class(k);
            GradedClass acc = GradedClass::zero(alg);
            for (const auto& [phi, phi_dual] : pairs)
                acc = acc + alg->pair(phi_dual, nu) * phi;
            CHECK(acc == nu);
        }
    }
}

TEST_CASE("toy kunneth diagonal is hyperbolic pair") {
    auto alg = preset_algebra("toy");
    auto pairs = alg->kunneth_diagonal();
    auto one = alg->unit();
    auto p = alg->basis_class(alg->basis_index("p"));
    REQUIRE(pairs.size() == 2);
    CHECK(pairs[0].first == one);
    CHECK(pairs[0].second == p);
    CHECK(pairs[1].first == p);
    CHECK(pairs[1].second == one);
}

TEST_CASE("trace of the diagonal is the algebra dimension") {
    for (const auto& name : preset_algebra_names()) {
        auto alg = preset_algebra(name);
        Rational dim(0);
        auto pairs = alg->kunneth_diagonal();
        for (int i = 0; i < alg->size(); i++)
            dim += alg->pair(pairs[i].first, pairs[i].second);
        CHECK(dim == Rational(alg->size()));
    }
}

TEST_CASE("frobenius identity on all basis triples") {
    for (const auto& name : preset_algebra_names()) {
        auto alg = preset_algebra(name);
        for (int i = 0; i < alg->size(); i++)
            for (int j = 0; j < alg->size(); j++)
                for (int k = 0; k < alg->size(); k++) {
                    auto a = alg->basis_class(i), b = alg->basis_class(j),
                         c = alg->basis_class(k);
                    CHECK(alg->pair(alg->cup(a, b), c) == alg->pair(a, alg->cup(b, c)));
                }
    }
}

TEST_CASE("validate flags corrupted presets") {
    // Zeroed pairing row: nondegeneracy violation.
    {
        std::string text = "algebra bad\nbasis\n 1 0\n p 4\npairing\n";
        std::istringstream in(text);
        auto alg = parse_algebra(in);
        auto report = alg->validate();
        CHECK_FALSE(report.ok());
        bool found = false;
        for (const auto& v : report.violations)
            if (v.identity.find("nondegeneracy") != std::string::npos)
                found = true;
        CHECK(found);
    }
    // Asymmetric cup table: commutativity violation.
    {
        std::vector<FrobeniusAlgebra::BasisElement> basis{{"1", 0}, {"B", 2}, {"F", 2}, {"p", 4}};
        std::vector<std::vector<Rational>> pairing(4, std::vector<Rational>(4, Rational(0)));
        pairing[0][3] = pairing[3][0] = 1;
        pairing[1][2] = pairing[2][1] = 1;
        std::vector<std::vector<std::vector<Rational>>> cup(
            4, std::vector<std::vector<Rational>>(4, std::vector<Rational>(4, Rational(0))));
        for (int i = 0; i < 4; i++) {
            cup[0][i][i] = 1;
            cup[i][0][i] = 1;
        }
        cup[1][2][3] = 1; // B*F = p but F*B = 0
        auto alg = std::make_shared<FrobeniusAlgebra>("bad2", basis, pairing, cup, 0);
        auto report = alg->validate();
        CHECK_FALSE(report.ok());
        bool found = false;
        for (const auto& v : report.violations)
            if (v.identity.find("commutativity") != std::string::npos)
                found = true;
        CHECK(found);
    }
}

TEST_CASE("parser rejects bad presets") {
    {
        std::string text = "algebra nounit\nbasis\n B 2\npairing\n B B 1\n";
        std::istringstream in(text);
        CHECK_THROWS_AS(parse_algebra(in), AlgebraError);
    }
    {
        std::string text = "algebra odd\nbasis\n 1 0\n a 3\n";
        std::istringstream in(text);
        CHECK_THROWS_AS(parse_algebra(in), AlgebraError);
    }
}

TEST_CASE("mismatched algebras rejected") {
    auto a1 = preset_algebra("toy");
    auto a2 = preset_algebra("P2");
    CHECK_THROWS_AS(a1->cup(a1->unit(), a2->unit()), AlgebraError);
    CHECK_THROWS_AS(a1->pair(a1->unit(), a2->unit()), AlgebraError);
}

TEST_CASE("shipped preset files load, validate, and match the built-ins") {
    for (const auto& name : preset_algebra_names()) {
        auto from_file = load_algebra_file(std::string(GWPT_DATA_DIR) + "/" + name + ".preset");
        auto builtin = preset_algebra(name);
        CHECK(from_file->validate().ok());
        REQUIRE(from_file->size() == builtin->size());
        for (int i = 0; i < builtin->size(); i++)
            for (int j = 0; j < builtin->size(); j++) {
                int fi = from_file->basis_index(builtin->basis_element_info(i).name);
                int fj = from_file->basis_index(builtin->basis_element_info(j).name);
                REQUIRE(fi >= 0);
                REQUIRE(fj >= 0);
                CHECK(from_file->pairing_entry(fi, fj) == builtin->pairing_entry(i, j));
                CHECK(from_file->cup(from_file->basis_class(fi), from_file->basis_class(fj))
                          .coeffs() ==
                      builtin->cup(builtin->basis_class(i), builtin->basis_class(j)).coeffs());
            }
    }
}

TEST_CASE("GWPT_PRESET_PATH resolution") {
    setenv("GWPT_PRESET_PATH", GWPT_DATA_DIR, 1);
    auto alg = resolve_algebra("K3-truncation");
    CHECK(alg->validate().ok());
    CHECK(alg->basis_index("B") >= 0);
    unsetenv("GWPT_PRESET_PATH");
}

TEST_CASE("conflicting pairing entries are rejected") {
    std::string text = "algebra bad\nbasis\n 1 0\n B 2\n F 2\n p 4\n"
                       "pairing\n 1 p 1\n B F 1\n F B 2\n";
    std::istringstream in(text);
    CHECK_THROWS_AS(parse_algebra(in), AlgebraError);
}
