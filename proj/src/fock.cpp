#include "gwpt/fock.hpp"

#include <algorithm>
#include <sstream>

namespace gwpt {

void FockState::add_term(BasisPartition bp, const Rational& c) {
    if (c == 0)
        return;
    if (bp.size() != size_)
        throw FockError("FockState: summand size mismatch");
    bp.canonicalize();
    auto it = terms_.find(bp);
    if (it == terms_.end()) {
        terms_.emplace(std::move(bp), c);
    } else {
        it->second += c;
        if (it->second == 0)
            terms_.erase(it);
    }
}

FockState operator+(const FockState& a, const FockState& b) {
    if (a.alg_.get() != b.alg_.get() || a.size_ != b.size_)
        throw FockError("FockState addition: size or algebra mismatch");
    FockState out = a;
    for (const auto& [bp, c] : b.terms_)
        out.add_term(bp, c);
    return out;
}

FockState operator*(const Rational& c, const FockState& a) {
    FockState out(a.alg_, a.size_);
    if (c == 0)
        return out;
    for (const auto& [bp, x] : a.terms_)
        out.terms_.emplace(bp, c * x);
    return out;
}

std::string FockState::to_string() const { return print_state(*this); }

FockState basis_state(AlgebraPtr alg, const BasisPartition& bp) {
    FockState s(alg, bp.size());
    s.add_term(bp, Rational(1));
    return s;
}

FockState partition_class(AlgebraPtr alg, const WeightedPartition& lambda) {
    int n = lambda.size();
    Rational norm(1);
    for (const auto& [m, w] : lambda.pairs) {
        if (m < 1)
            throw FockError("partition_class: parts must be >= 1");
        norm /= m;
    }
    FockState out(alg, n);
    // Multilinear expansion of the weights over the basis.
    std::vector<std::pair<BasisPartition, Rational>> partial{{BasisPartition{}, norm}};
    for (const auto& [m, w] : lambda.pairs) {
        if (w.algebra().get() != alg.get())
            throw FockError("partition_class: weight from a different algebra");
        std::vector<std::pair<BasisPartition, Rational>> next;
        for (const auto& [bp, c] : partial)
            for (int i = 0; i < alg->size(); i++) {
                if (w.coeff(i) == 0)
                    continue;
                BasisPartition ext = bp;
                ext.pairs.emplace_back(m, i);
                next.emplace_back(std::move(ext), c * w.coeff(i));
            }
        partial = std::move(next);
    }
    for (auto& [bp, c] : partial)
        out.add_term(std::move(bp), c);
    return out;
}

namespace {

// <prod q_{mu_i}(a_i) 1, prod q_{nu_j}(b_j) 1> by moving annihilation
// operators right: sum over matchings of equal parts, each contributing the
// convention's contraction times the weight pairing.
Rational monomial_pair(const FrobeniusAlgebra& alg, const NakajimaConvention& conv,
                       std::vector<std::pair<int, GradedClass>> bra,
                       std::vector<std::pair<int, GradedClass>> ket) {
    if (bra.empty())
        return ket.empty() ? Rational(1) : Rational(0);
    auto [m, a] = bra.back();
    bra.pop_back();
    Rational acc(0);
    for (size_t j = 0; j < ket.size(); j++) {
        if (ket[j].first != m)
            continue;
        Rational c = conv.contraction(m) * alg.pair(a, ket[j].second);
        if (c == 0)
            continue;
        std::vector<std::pair<int, GradedClass>> rest = ket;
        rest.erase(rest.begin() + static_cast<long>(j));
        acc += c * monomial_pair(alg, conv, bra, rest);
    }
    return acc;
}

std::vector<std::pair<int, GradedClass>> to_monomial(const AlgebraPtr& alg,
                                                     const BasisPartition& bp) {
    std::vector<std::pair<int, GradedClass>> ops;
    for (const auto& [m, w] : bp.pairs)
        ops.emplace_back(m, alg->basis_class(w));
    return ops;
}

} // namespace

Rational nakajima_pair(const FockState& mu, const FockState& nu, const NakajimaConvention& conv) {
    if (mu.algebra().get() != nu.algebra().get())
        throw FockError("nakajima_pair: algebra mismatch");
    if (mu.size() != nu.size())
        throw FockError("nakajima_pair: size mismatch");
    const auto& alg = *mu.algebra();
    Rational acc(0);
    for (const auto& [bp1, c1] : mu.terms()) {
        // Fast reject: underlying partitions must match for a nonzero product.
        for (const auto& [bp2, c2] : nu.terms()) {
            if (bp1.underlying() != bp2.underlying())
                continue;
            acc += c1 * c2 *
                   monomial_pair(alg, conv, to_monomial(mu.algebra(), bp1),
                                 to_monomial(nu.algebra(), bp2));
        }
    }
    return acc;
}

Rational pairing_closed_form(const BasisPartition& mu, const BasisPartition& nu_dual_indexed) {
    if (mu.size() != nu_dual_indexed.size())
        throw FockError("pairing_closed_form: size mismatch");
    BasisPartition a = mu, b = nu_dual_indexed;
    a.canonicalize();
    b.canonicalize();
    if (!(a == b))
        return Rational(0);
    int n = a.size(), l = a.length();
    Rational prod(1);
    for (const auto& [m, w] : a.pairs)
        prod *= m;
    return Rational(parity_sign(n + l)) * Rational(aut_order(a.pairs)) / prod;
}

FockState dual_relabel_state(AlgebraPtr alg, const BasisPartition& nu_dual_indexed) {
    WeightedPartition wp;
    for (const auto& [m, w] : nu_dual_indexed.pairs)
        wp.pairs.emplace_back(m, alg->dual_basis_class(w));
    // No 1/prod normalization here: the relabel acts on the monomial itself.
    int n = nu_dual_indexed.size();
    FockState out(alg, n);
    std::vector<std::pair<BasisPartition, Rational>> partial{{BasisPartition{}, Rational(1)}};
    for (const auto& [m, w] : wp.pairs) {
        std::vector<std::pair<BasisPartition, Rational>> next;
        for (const auto& [bp, c] : partial)
            for (int i = 0; i < alg->size(); i++) {
                if (w.coeff(i) == 0)
                    continue;
                BasisPartition ext = bp;
                ext.pairs.emplace_back(m, i);
                next.emplace_back(std::move(ext), c * w.coeff(i));
            }
        partial = std::move(next);
    }
    for (auto& [bp, c] : partial)
        out.add_term(std::move(bp), c);
    return out;
}

std::vector<BasisPartition> basis_partitions(const AlgebraPtr& alg, int n) {
    std::vector<BasisPartition> out;
    int b = alg->size();
    for (const Partition& p : integer_partitions(n)) {
        // Weight assignments up to Aut: canonical means for equal parts the
        // label sequence is non-decreasing.
        std::vector<int> labels(p.size(), 0);
        auto rec = [&](auto&& self, size_t i) -> void {
            if (i == p.size()) {
                BasisPartition bp;
                for (size_t k = 0; k < p.size(); k++)
                    bp.pairs.emplace_back(p[k], labels[k]);
                bp.canonicalize();
                out.push_back(std::move(bp));
                return;
            }
            int lo = (i > 0 && p[i] == p[i - 1]) ? labels[i - 1] : 0;
            for (int w = lo; w < b; w++) {
                labels[i] = w;
                self(self, i + 1);
            }
        };
        rec(rec, 0);
    }
    return out;
}

std::vector<DiagonalTerm> hilb_diagonal(int n, const AlgebraPtr& alg) {
    if (n < 1)
        throw FockError("hilb_diagonal: n must be positive");
    std::vector<DiagonalTerm> out;
    for (const BasisPartition& mu : basis_partitions(alg, n)) {
        Rational prod(1);
        for (const auto& [m, w] : mu.pairs)
            prod *= m;
        Rational coeff = Rational(parity_sign(n - mu.length())) * prod / Rational(aut_order(mu.pairs));
        out.push_back({mu, mu, coeff});
    }
    return out;
}

namespace {

Rational parts_product(const BasisPartition& bp) {
    Rational prod(1);
    for (const auto& [m, w] : bp.pairs)
        prod *= m;
    return prod;
}

} // namespace

ProjectorReport verify_projector_with(const std::vector<DiagonalTerm>& diagonal, int n,
                                      const AlgebraPtr& alg) {
    ProjectorReport report;
    for (const BasisPartition& nu : basis_partitions(alg, n)) {
        // All states are the associated classes, which carry the
        // 1/prod(parts) normalization of the Nakajima monomial.
        FockState nu_state = Rational(1) / parts_product(nu) * basis_state(alg, nu);
        // sum_mu coeff(mu) * mu * <mu^vee, nu> must reproduce nu.
        FockState acc(alg, n);
        for (const DiagonalTerm& term : diagonal) {
            FockState mu_state =
                Rational(1) / parts_product(term.mu) * basis_state(alg, term.mu);
            FockState mu_dual_state =
                Rational(1) / parts_product(term.mu_dual) * dual_relabel_state(alg, term.mu_dual);
            Rational inner = nakajima_pair(mu_dual_state, nu_state);
            if (inner == 0)
                continue;
            acc = acc + (term.coefficient * inner) * mu_state;
        }
        report.checked++;
        if (!(acc == nu_state)) {
            std::ostringstream os;
            os << "projector image " << acc.to_string() << " != " << nu_state.to_string();
            report.failures.push_back({nu, os.str()});
        }
    }
    return report;
}

ProjectorReport verify_projector(int n, const AlgebraPtr& alg) {
    return verify_projector_with(hilb_diagonal(n, alg), n, alg);
}

std::string print_state(const FockState& s) {
    if (s.is_zero())
        return "0";
    const auto& alg = *s.algebra();
    std::ostringstream os;
    bool first = true;
    for (const auto& [bp, c] : s.terms()) {
        Rational coeff = c;
        if (first) {
            if (coeff < 0) {
                os << "- ";
                coeff = -coeff;
            }
        } else {
            os << (coeff < 0 ? " - " : " + ");
            if (coeff < 0)
                coeff = -coeff;
        }
        if (coeff != 1)
            os << coeff << " ";
        for (const auto& [m, w] : bp.pairs)
            os << "q" << m << "(" << alg.basis_element_info(w).name << ") ";
        os << "|0>";
        first = false;
    }
    return os.str();
}

FockState parse_state(AlgebraPtr alg, const std::string& text) {
    // Grammar: term (('+'|'-') term)* ; term := [coeff] ('q'INT '(' name ')')* '|0>'
    size_t pos = 0;
    auto skip_ws = [&] {
        while (pos < text.size() && isspace(static_cast<unsigned char>(text[pos])))
            pos++;
    };
    auto fail = [&](const std::string& msg) {
        throw FockError("parse_state at position " + std::to_string(pos) + ": " + msg);
    };

    skip_ws();
    if (pos < text.size() && text[pos] == '0' && pos + 1 == text.size())
        fail("states must have explicit size; '0' alone is not parseable");

    FockState out;
    bool have_size = false;
    bool first_term = true;
    while (pos < text.size()) {
        skip_ws();
        if (pos >= text.size())
            break;
        Rational sign(1);
        if (!first_term) {
            if (text[pos] == '+')
                pos++;
            else if (text[pos] == '-') {
                sign = -1;
                pos++;
            } else
                fail("expected '+' or '-'");
            skip_ws();
        } else if (text[pos] == '-') {
            sign = -1;
            pos++;
            skip_ws();
        }
        // Optional rational coefficient.
        Rational coeff(1);
        if (pos < text.size() && (isdigit(static_cast<unsigned char>(text[pos])))) {
            size_t start = pos;
            while (pos < text.size() &&
                   (isdigit(static_cast<unsigned char>(text[pos])) || text[pos] == '/'))
                pos++;
            coeff = parse_rational(text.substr(start, pos - start));
        }
        BasisPartition bp;
        while (true) {
            skip_ws();
            if (pos < text.size() && text[pos] == 'q') {
                pos++;
                size_t start = pos;
                while (pos < text.size() && isdigit(static_cast<unsigned char>(text[pos])))
                    pos++;
                if (start == pos)
                    fail("expected part after 'q'");
                int part = std::stoi(text.substr(start, pos - start));
                skip_ws();
                if (pos >= text.size() || text[pos] != '(')
                    fail("expected '('");
                pos++;
                size_t name_start = pos;
                while (pos < text.size() && text[pos] != ')')
                    pos++;
                if (pos >= text.size())
                    fail("unterminated weight name");
                std::string name = text.substr(name_start, pos - name_start);
                pos++;
                int idx = alg->basis_index(name);
                if (idx < 0)
                    fail("unknown basis element '" + name + "'");
                bp.pairs.emplace_back(part, idx);
            } else if (pos + 2 < text.size() + 1 && text.compare(pos, 3, "|0>") == 0) {
                pos += 3;
                break;
            } else {
                fail("expected 'q<m>(<name>)' or '|0>'");
            }
        }
        int n = bp.size();
        if (!have_size) {
            out = FockState(alg, n);
            have_size = true;
        }
        out.add_term(std::move(bp), sign * coeff);
        first_term = false;
        skip_ws();
    }
    if (!have_size)
        throw FockError("parse_state: empty input");
    return out;
}

} // namespace gwpt
