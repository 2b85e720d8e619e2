#include "gwpt/acceptance.hpp"

#include "gwpt/capmatrix.hpp"
#include "gwpt/parser.hpp"
#include "gwpt/rewrite.hpp"

#include <chrono>
#include <ostream>
#include <random>
#include <sstream>
#include <atomic>
#include <thread>

namespace gwpt {

namespace {

using Criterion = std::function<bool(std::string&)>;

// All tau exponent tuples of length r with sum (k_i + 1) <= max_size.
std::vector<std::vector<int>> tau_tuples(int r, int max_size) {
    std::vector<std::vector<int>> out{{}};
    for (int i = 0; i < r; i++) {
        std::vector<std::vector<int>> next;
        for (const auto& prefix : out) {
            int used = 0;
            for (int k : prefix)
                used += k + 1;
            for (int k = 0; used + (k + 1) + (r - i - 1) <= max_size; k++) {
                auto ext = prefix;
                ext.push_back(k);
                next.push_back(std::move(ext));
            }
        }
        out = std::move(next);
    }
    return out;
}

bool criterion_projector(std::string& detail) {
    auto t0 = std::chrono::steady_clock::now();
    for (const char* preset : {"toy", "K3-truncation"}) {
        auto alg = preset_algebra(preset);
        for (int n = 1; n <= 4; n++) {
            auto report = verify_projector(n, alg);
            if (!report.ok()) {
                detail = std::string(preset) + " n=" + std::to_string(n) + ": " +
                         std::to_string(report.failures.size()) + " failures";
                return false;
            }
        }
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::ostringstream os;
    os << "exact identity on both presets, n <= 4, " << secs << "s";
    detail = os.str();
    return secs < 60.0;
}

bool criterion_pairing(std::string& detail) {
    long checked = 0;
    for (const char* preset : {"toy", "K3-truncation"}) {
        auto alg = preset_algebra(preset);
        for (int n = 1; n <= 4; n++) {
            auto parts = basis_partitions(alg, n);
            for (const auto& mu : parts)
                for (const auto& nu : parts) {
                    Rational pm(1), pn(1);
                    for (auto& [m, w] : mu.pairs)
                        pm *= m;
                    for (auto& [m, w] : nu.pairs)
                        pn *= m;
                    Rational oracle =
                        nakajima_pair(Rational(1) / pm * basis_state(alg, mu),
                                      Rational(1) / pn * dual_relabel_state(alg, nu));
                    if (oracle != pairing_closed_form(mu, nu)) {
                        detail = std::string(preset) + ": mismatch at n=" + std::to_string(n);
                        return false;
                    }
                    checked++;
                }
        }
    }
    detail = std::to_string(checked) + " pairs, exact agreement after calibration";
    return true;
}

bool criterion_triangularity(std::string& detail) {
    auto alg = preset_algebra("toy");
    KMatrix K;
    long checked = 0;
    for (int r = 1; r <= 3; r++) {
        for (const auto& taus : tau_tuples(r, 6)) {
            // every weight assignment over the toy basis
            for (int wmask = 0; wmask < (1 << r); wmask++) {
                DescMonomial m;
                m.taus = taus;
                for (int i = 0; i < r; i++)
                    m.groups.push_back({{i + 1}, (wmask >> i) & 1, {}});
                m.canonicalize();
                DescExpr round = invert(transform(alg, m, K), K);
                if (!(round == monomial_expr(alg, m))) {
                    detail = "failure at " + print_monomial(alg, m);
                    return false;
                }
                checked++;
            }
        }
    }
    detail = std::to_string(checked) + " monomials, exact term-multiset identity";
    return true;
}

bool criterion_generalized(std::string& detail) {
    auto alg = preset_algebra("K3-truncation");
    KMatrix K;
    long checked = 0;
    for (int r = 1; r <= 3; r++) {
        for (const auto& taus : tau_tuples(r, 4)) {
            // shifted weight patterns over the 4-element basis
            for (int shift = 0; shift < alg->size(); shift++) {
                DescMonomial m;
                m.taus = taus;
                for (int i = 0; i < r; i++)
                    m.groups.push_back({{i + 1}, (i * 2 + 1 + shift) % alg->size(), {}});
                m.canonicalize();
                if (!(transform_general(alg, m, K) == transform(alg, m, K))) {
                    detail = "mismatch at " + print_monomial(alg, m);
                    return false;
                }
                checked++;
            }
        }
    }
    detail = std::to_string(checked) + " pullback monomials, exact agreement";
    return true;
}

bool criterion_rationality(std::string& detail) {
    // detect_rational . expand = id on random numerator/denominator pairs.
    std::mt19937 rng(77);
    for (int it = 0; it < 60; it++) {
        int dn = static_cast<int>(rng() % 7), dd = static_cast<int>(rng() % 7);
        std::vector<TRat> nc(dn + 1), dc(dd + 1);
        for (auto& x : nc)
            x = TRat(Rational(static_cast<long>(rng() % 9) - 4));
        for (auto& x : dc)
            x = TRat(Rational(static_cast<long>(rng() % 9) - 4));
        dc[0] = TRat(Rational(1 + static_cast<long>(rng() % 3)));
        Poly<TRat> num(nc), den(dc);
        if (num.is_zero())
            num = Poly<TRat>(TRat(Rational(1)));
        PRational f(num, den, static_cast<int>(rng() % 3) - 1);
        auto rec = detect_rational(expand(f, f.shift() - 1, f.shift() + 16), 6);
        if (!rec || !(*rec == f)) {
            detail = "round trip failed for " + f.to_string();
            return false;
        }
    }
    // p - 2 + 1/p expands to z^2 + z^4/12 + z^6/360 through z^8; the oracle
    // expands e^z - 2 + e^{-z} termwise.
    LaurentSeries s(SeriesVar::P);
    s.set_coeff(1, EpsScalar(Rational(1)));
    s.set_coeff(0, EpsScalar(Rational(-2)));
    s.set_coeff(-1, EpsScalar(Rational(1)));
    LaurentSeries zs = p_to_z(s, 8);
    Rational kfact(1);
    for (int k = 0; k <= 8; k++) {
        if (k > 0)
            kfact *= k;
        Rational expect = (Rational(1) + Rational(parity_sign(k))) / kfact;
        if (k == 0)
            expect -= 2;
        if (!(zs.coeff(k) == EpsScalar(expect))) {
            detail = "p_to_z mismatch at z^" + std::to_string(k);
            return false;
        }
    }
    detail = "60 random rational round trips and the sinh-square expansion, exact";
    return true;
}

// The two displayed vir/red degeneration formulas, built directly.
bool criterion_epsilon(std::string& detail) {
    for (int d = 1; d <= 2; d++) {
        for (int beta = 0; beta <= 1; beta++) {
            for (int r = 0; r <= 1; r++) {
                Bracket full;
                full.theory = Theory::PT;
                full.mode = ClassMode::Full;
                full.geom = make_geometry("toyxC", 0, 1);
                full.cls = {{beta}, d, 1};
                BasisPartition unit_part;
                for (int i = 0; i < d; i++)
                    unit_part.pairs.emplace_back(1, full.geom.surface->unit_index());
                unit_part.canonicalize();
                full.rel = {RelSlot::make(unit_part)};
                for (int i = 0; i < r; i++) {
                    full.interior.taus.push_back(i);
                    full.interior.groups.push_back(
                        {{i + 1}, full.geom.surface->basis_index("p"), {}});
                }
                full.interior.canonicalize();
                NodeSeparating split{0, 0, {1}};
                auto [vir, red] = epsilon_split(degenerate(full, split));

                // Direct construction of the two displayed formulas:
                // non-reduced: vir (x) vir with beta = 0 on both sides;
                // reduced: red_beta (x) vir_0 + vir_0 (x) red_beta.
                auto assemble = [&](ClassMode m1, ClassMode m2, const std::vector<int>& b1,
                                    const std::vector<int>& b2) {
                    Expression acc(SeriesVar::P);
                    for (const auto& isplit_mask : {0, 1}) {
                        if (r == 0 && isplit_mask == 1)
                            continue;
                        for (const DiagonalTerm& term :
                             hilb_diagonal(d, full.geom.surface)) {
                            FockState dual =
                                dual_relabel_state(full.geom.surface, term.mu_dual);
                            for (const auto& [nu, c] : dual.terms()) {
                                Bracket f1 = full, f2 = full;
                                f1.mode = m1;
                                f2.mode = m2;
                                f1.cls = {b1, d, 1};
                                f2.cls = {b2, d, 1};
                                f1.interior = DescMonomial{};
                                f2.interior = DescMonomial{};
                                if (r == 1) {
                                    auto& target = isplit_mask == 0 ? f1 : f2;
                                    target.interior.taus = {0};
                                    target.interior.groups = {
                                        {{1}, full.geom.surface->basis_index("p"), {}}};
                                }
                                f1.rel = {full.rel[0], RelSlot::make(term.mu)};
                                f2.rel = {RelSlot::make(nu)};
                                // side 1 keeps the original relative point,
                                // side 2 receives only the node.
                                f1.geom.n_div = 2;
                                f2.geom.n_div = 1;
                                Term t;
                                t.brackets = {f1, f2};
                                acc.add_term(t, LaurentSeries::constant(
                                                    SeriesVar::P,
                                                    EpsScalar(term.coefficient * c)));
                            }
                        }
                    }
                    return acc;
                };
                std::vector<int> zero{0}, bvec{beta};
                Expression vir_oracle =
                    beta == 0 ? assemble(ClassMode::Vir, ClassMode::Vir, zero, zero)
                              : Expression(SeriesVar::P);
                Expression red_oracle =
                    assemble(ClassMode::Red, ClassMode::Vir, bvec, zero) +
                    assemble(ClassMode::Vir, ClassMode::Red, zero, bvec);
                if (!(vir == vir_oracle)) {
                    detail = "vir formula mismatch at d=" + std::to_string(d) +
                             " beta=" + std::to_string(beta) + " r=" + std::to_string(r);
                    return false;
                }
                if (!(red == red_oracle)) {
                    detail = "red formula mismatch at d=" + std::to_string(d) +
                             " beta=" + std::to_string(beta) + " r=" + std::to_string(r);
                    return false;
                }
            }
        }
    }
    detail = "vir and red expansions match the direct construction, d <= 2";
    return true;
}

bool criterion_prefactors(std::string& detail) {
    PrefactorReport report = check_prefactors(10000);
    std::ostringstream os;
    os << report.samples << " tuples, " << report.mismatches << " violations";
    detail = os.str();
    return report.ok();
}

bool criterion_mcf(std::string& detail) {
    for (int div = 1; div <= 3; div++) {
        Derivation d = verify_mcf_compat(div);
        if (div == 2 && d.steps.size() != 4) {
            detail = "divisibility 2 derivation has " + std::to_string(d.steps.size()) +
                     " steps, expected 4";
            return false;
        }
    }
    detail = "p^k and kz substitutions commute with p = e^z for div <= 3";
    return true;
}

bool criterion_reduction(std::string& detail) {
    std::mt19937 rng(4242);
    int steps_total = 0;
    for (int it = 0; it < 100; it++) {
        int g = static_cast<int>(rng() % 4);
        int n = static_cast<int>(rng() % 3) + (g == 0 ? 1 : 0);
        int d = 1 + static_cast<int>(rng() % 3);
        Bracket b;
        b.theory = Theory::PT;
        b.mode = ClassMode::Red;
        b.geom = make_geometry("K3xC", g, n);
        b.cls = {{static_cast<int>(rng() % 2), static_cast<int>(rng() % 2)}, d, 1};
        BasisPartition part;
        for (int i = 0; i < d; i++)
            part.pairs.emplace_back(1, b.geom.surface->unit_index());
        part.canonicalize();
        for (int i = 0; i < n; i++)
            b.rel.push_back(RelSlot::make(part));
        ReduceResult r = reduce_to_cap(b);
        for (const auto& [before, after] : r.measures)
            if (!(after < before)) {
                detail = "measure increase at instance " + std::to_string(it);
                return false;
            }
        for (const auto& [t, c] : r.expr.terms())
            for (const auto& fb : t.brackets)
                if (fb.geom.family == "SxC" && fb.mode != ClassMode::Vir &&
                    !(fb.geom.genus == 0 && fb.geom.n_div <= 1)) {
                    detail = "non-terminal bracket survived at instance " + std::to_string(it);
                    return false;
                }
        ReduceResult replayed = reduce_to_cap(b);
        if (replayed.derivation.to_records() != r.derivation.to_records()) {
            detail = "derivation replay differs at instance " + std::to_string(it);
            return false;
        }
        steps_total += static_cast<int>(r.derivation.steps.size());
    }
    detail = "100 instances, " + std::to_string(steps_total) +
             " steps, strictly decreasing (g,N), bit-exact replay";
    return true;
}

bool criterion_capmatrix(std::string& detail) {
    auto alg = preset_algebra("toy");
    for (int d = 1; d <= 3; d++) {
        CapMatrixReport report = check_cap_matrix(alg, d, 5);
        if (!report.ok()) {
            detail = "d=" + std::to_string(d) + ": structure or determinant check failed";
            for (const auto& n : report.notes)
                detail += "; " + n;
            return false;
        }
    }
    detail = "block-triangular with unit-multiple determinant for d <= 3";
    return true;
}

bool criterion_parser(std::string& detail, const CliRunner& cli) {
    for (unsigned seed = 1; seed <= 1000; seed++) {
        Bracket b = random_bracket(seed);
        std::string text = b.to_string();
        Bracket back = parse_bracket(text);
        if (!(back == b)) {
            detail = "round trip failed at seed " + std::to_string(seed) + ": " + text;
            return false;
        }
        if (back.to_string() != text) {
            detail = "print instability at seed " + std::to_string(seed);
            return false;
        }
    }
    // Malformed input carries a position.
    try {
        parse_bracket("Z[XX,red]{K3xC}_(B,1)( || tau())");
        detail = "malformed theory tag accepted";
        return false;
    } catch (const ParseError& e) {
        if (e.caret_diagnostic().find('^') == std::string::npos) {
            detail = "caret diagnostic missing";
            return false;
        }
    }
    if (cli) {
        if (cli({"verify-projector", "--n", "2", "--preset", "toy"}) != 0) {
            detail = "exit contract: success case returned nonzero";
            return false;
        }
        if (cli({"validate-algebra", "--preset", "no-such-preset"}) != 2) {
            detail = "exit contract: usage error did not return 2";
            return false;
        }
        if (cli({"degenerate", "--bracket", "Z[QQ,red]{K3xC}_(B,1)( || tau())", "--split",
                 "trivial"}) != 2) {
            detail = "exit contract: parse error did not return 2";
            return false;
        }
        if (cli({"--no-such-flag"}) != 2) {
            detail = "exit contract: unknown flag did not return 2";
            return false;
        }
    }
    detail = "1000 brackets round-tripped" + std::string(cli ? ", exit codes honored" : "");
    return true;
}

} // namespace

std::vector<AcceptanceResult> run_acceptance(std::ostream& out, int jobs, const CliRunner& cli,
                                             bool records) {
    struct Entry {
        int id;
        const char* name;
        Criterion fn;
    };
    std::vector<Entry> entries = {
        {1, "hilb-diagonal projector", criterion_projector},
        {2, "pairing lemma", criterion_pairing},
        {3, "correspondence triangularity", criterion_triangularity},
        {4, "generalized vs standard transformation", criterion_generalized},
        {5, "rationality round trip", criterion_rationality},
        {6, "epsilon calculus", criterion_epsilon},
        {7, "prefactor identities", criterion_prefactors},
        {8, "multiple cover compatibility", criterion_mcf},
        {9, "reduction scheme", criterion_reduction},
        {10, "cap-matrix structure", criterion_capmatrix},
        {11, "parser/printer fuzz",
         [&cli](std::string& d) { return criterion_parser(d, cli); }},
    };

    std::vector<AcceptanceResult> results(entries.size());
    auto run_one = [&](size_t i) {
        auto t0 = std::chrono::steady_clock::now();
        std::string detail;
        bool ok = false;
        try {
            ok = entries[i].fn(detail);
        } catch (const std::exception& e) {
            ok = false;
            detail = std::string("exception: ") + e.what();
        }
        results[i] = {entries[i].id, entries[i].name, ok, detail,
                      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                          .count()};
    };

    if (jobs <= 1) {
        for (size_t i = 0; i < entries.size(); i++)
            run_one(i);
    } else {
        std::vector<std::thread> pool;
        std::atomic<size_t> next{0};
        for (int j = 0; j < jobs; j++)
            pool.emplace_back([&] {
                for (size_t i = next++; i < entries.size(); i = next++)
                    run_one(i);
            });
        for (auto& th : pool)
            th.join();
    }

    for (const auto& r : results) {
        if (records)
            out << "criterion " << r.id << ": status=" << (r.passed ? "pass" : "fail")
                << " name=\"" << r.name << "\" detail=\"" << r.detail << "\"\n";
        else
            out << (r.passed ? "PASS" : "FAIL") << "  [" << r.id << "] " << r.name << " - "
                << r.detail << "\n";
    }
    return results;
}

bool all_passed(const std::vector<AcceptanceResult>& results) {
    for (const auto& r : results)
        if (!r.passed)
            return false;
    return true;
}

} // namespace gwpt
