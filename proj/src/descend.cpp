#include "gwpt/descend.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <sstream>

namespace gwpt {

int DescMonomial::alpha_size() const {
    int s = 0;
    for (int k : taus)
        s += k + 1;
    return s;
}

Partition DescMonomial::alpha() const {
    Partition a;
    for (int k : taus)
        a.push_back(k + 1);
    std::sort(a.begin(), a.end(), std::greater<int>());
    return a;
}

bool DescMonomial::is_pullback() const {
    for (const auto& g : groups)
        if (g.indices.size() > 1)
            return false;
    return true;
}

void DescMonomial::canonicalize() {
    for (auto& g : groups)
        std::sort(g.indices.begin(), g.indices.end());
    std::sort(groups.begin(), groups.end(), [](const MarkGroup& a, const MarkGroup& b) {
        return a.indices.front() < b.indices.front();
    });
    std::vector<int> seen;
    for (const auto& g : groups) {
        if (g.indices.empty())
            throw DescendError("empty group in marked class");
        for (int i : g.indices)
            seen.push_back(i);
    }
    std::sort(seen.begin(), seen.end());
    for (size_t i = 0; i < seen.size(); i++)
        if (seen[i] != static_cast<int>(i) + 1)
            throw DescendError("groups do not partition the marking set");
    if (seen.size() != taus.size())
        throw DescendError("marking count of class does not match descendent count");
}

void DescExpr::add_term(DescMonomial m, const SymPoly& c) {
    if (c.is_zero())
        return;
    m.canonicalize();
    auto it = terms_.find(m);
    if (it == terms_.end()) {
        terms_.emplace(std::move(m), c);
    } else {
        it->second = it->second + c;
        if (it->second.is_zero())
            terms_.erase(it);
    }
}

DescExpr operator+(const DescExpr& a, const DescExpr& b) {
    DescExpr out = a;
    if (!out.alg_ && b.alg_)
        out.alg_ = b.alg_;
    for (const auto& [m, c] : b.terms_)
        out.add_term(m, c);
    return out;
}

DescExpr operator-(const DescExpr& a, const DescExpr& b) {
    DescExpr out = a;
    if (!out.alg_ && b.alg_)
        out.alg_ = b.alg_;
    for (const auto& [m, c] : b.terms_)
        out.add_term(m, -c);
    return out;
}

DescExpr operator*(const SymPoly& c, const DescExpr& a) {
    DescExpr out(a.alg_);
    for (const auto& [m, x] : a.terms_)
        out.add_term(m, c * x);
    return out;
}

std::string DescExpr::to_string() const { return print_expr(*this); }

std::string KMatrix::atom_label(const Partition& alpha, const Partition& alphat) {
    std::ostringstream os;
    os << "K[";
    for (size_t i = 0; i < alpha.size(); i++)
        os << (i ? "," : "") << alpha[i];
    os << ";";
    for (size_t i = 0; i < alphat.size(); i++)
        os << (i ? "," : "") << alphat[i];
    os << "]";
    return os.str();
}

SymPoly KMatrix::entry(const Partition& alpha, const Partition& alphat) const {
    Partition a = alpha, at = alphat;
    std::sort(a.begin(), a.end(), std::greater<int>());
    std::sort(at.begin(), at.end(), std::greater<int>());
    auto it = overrides_.find({a, at});
    if (it != overrides_.end())
        return it->second;
    int sa = partition_size(a), sat = partition_size(at);
    if (sa < sat)
        return SymPoly(); // basic vanishing
    if (sa == sat) {
        if (a == at && partition_length(a) == 1)
            return SymPoly::z_power(partition_length(a) - sa);
        return SymPoly();
    }
    return SymPoly::atom(intern_atom(atom_label(a, at)));
}

void KMatrix::set_entry(const Partition& alpha, const Partition& alphat, SymPoly value) {
    Partition a = alpha, at = alphat;
    std::sort(a.begin(), a.end(), std::greater<int>());
    std::sort(at.begin(), at.end(), std::greater<int>());
    if (partition_size(a) < partition_size(at) && !value.is_zero())
        throw DescendError("KMatrix: cannot override the basic vanishing");
    overrides_[{a, at}] = std::move(value);
}

namespace {

// The c_i specialization is a context flag on the transformation: generic
// c1,c2,c3 atoms in K entries are renamed per context at application time.
SymPoly apply_context(const SymPoly& p, KMatrix::ChernContext ctx) {
    static const AtomId generic[3] = {intern_atom("c1"), intern_atom("c2"), intern_atom("c3")};
    const char* suffix = ctx == KMatrix::ChernContext::LogTangent ? "@logTX" : "@TX";
    SymPoly out;
    for (const auto& [key, c] : p.terms()) {
        SymPoly::Key nk{key.z_exp, {}};
        for (const auto& [id, e] : key.atoms.factors) {
            bool mapped = false;
            for (int i = 0; i < 3; i++)
                if (id == generic[i]) {
                    nk.atoms.multiply(
                        intern_atom("c" + std::to_string(i + 1) + suffix), e);
                    mapped = true;
                    break;
                }
            if (!mapped)
                nk.atoms.multiply(id, e);
        }
        out.add_term(std::move(nk), c);
    }
    return out;
}

struct BlockOption {
    Partition alphat;
    int weight;         // basis index
    AtomMonomial atoms; // group atoms
    SymPoly coeff;      // z-power and rational factor (atom-free by splitting)
};

// Expands entry * (class expansion) into flat options.
void expand_block_options(const AlgebraPtr& alg, const SymPoly& entry,
                          const GradedClass& weight, const AtomMonomial& base_atoms,
                          const Partition& alphat, std::vector<BlockOption>& out) {
    for (const auto& [key, c] : entry.terms())
        for (int b = 0; b < alg->size(); b++) {
            if (weight.coeff(b) == 0)
                continue;
            BlockOption opt;
            opt.alphat = alphat;
            opt.weight = b;
            opt.atoms = base_atoms;
            opt.atoms.multiply(key.atoms);
            opt.coeff = SymPoly::z_power(key.z_exp, c * weight.coeff(b));
            out.push_back(std::move(opt));
        }
}

} // namespace

DescExpr monomial_expr(const AlgebraPtr& alg, DescMonomial m) {
    DescExpr e(alg);
    e.add_term(std::move(m), SymPoly(Rational(1)));
    return e;
}

DescExpr pullback_monomial(const AlgebraPtr& alg, const std::vector<int>& taus,
                           const std::vector<GradedClass>& classes) {
    if (taus.size() != classes.size())
        throw DescendError("pullback_monomial: tau/class count mismatch");
    DescExpr out(alg);
    std::vector<std::pair<DescMonomial, Rational>> partial;
    DescMonomial base;
    base.taus = taus;
    partial.emplace_back(base, Rational(1));
    for (size_t i = 0; i < classes.size(); i++) {
        std::vector<std::pair<DescMonomial, Rational>> next;
        for (const auto& [m, c] : partial)
            for (int b = 0; b < alg->size(); b++) {
                if (classes[i].coeff(b) == 0)
                    continue;
                DescMonomial ext = m;
                ext.groups.push_back({{static_cast<int>(i) + 1}, b, {}});
                next.emplace_back(std::move(ext), c * classes[i].coeff(b));
            }
        partial = std::move(next);
    }
    for (auto& [m, c] : partial)
        out.add_term(std::move(m), SymPoly(c));
    return out;
}

DescExpr multiply_diagonal(const AlgebraPtr& alg, const DescMonomial& m,
                           const std::vector<int>& indices) {
    if (indices.size() < 2)
        throw DescendError("multiply_diagonal: need at least two indices");
    // Locate the groups touched by the diagonal.
    std::vector<size_t> touched;
    for (size_t gi = 0; gi < m.groups.size(); gi++)
        for (int i : indices)
            if (std::find(m.groups[gi].indices.begin(), m.groups[gi].indices.end(), i) !=
                m.groups[gi].indices.end()) {
                if (touched.empty() || touched.back() != gi)
                    touched.push_back(gi);
                break;
            }
    if (touched.size() <= 1)
        throw RepeatedDiagonalError("repeated diagonal factor on an already-merged set");
    MarkGroup merged;
    GradedClass w = alg->unit();
    for (size_t gi : touched) {
        const MarkGroup& g = m.groups[gi];
        merged.indices.insert(merged.indices.end(), g.indices.begin(), g.indices.end());
        merged.atoms.multiply(g.atoms);
        w = alg->cup(w, alg->basis_class(g.weight));
    }
    std::sort(merged.indices.begin(), merged.indices.end());
    DescExpr out(alg);
    for (int b = 0; b < alg->size(); b++) {
        if (w.coeff(b) == 0)
            continue;
        DescMonomial key;
        key.taus = m.taus;
        for (size_t gi = 0; gi < m.groups.size(); gi++)
            if (std::find(touched.begin(), touched.end(), gi) == touched.end())
                key.groups.push_back(m.groups[gi]);
        MarkGroup mg = merged;
        mg.weight = b;
        key.groups.push_back(std::move(mg));
        out.add_term(std::move(key), SymPoly(w.coeff(b)));
    }
    return out;
}

DescExpr transform(const AlgebraPtr& alg, const DescMonomial& m, const KMatrix& K,
                   KMatrix::ChernContext ctx) {
    if (!m.is_pullback())
        throw DescendError("transform: class must be a product of pullbacks");
    int r = m.markings();
    DescExpr out(alg);
    if (r == 0) {
        out.add_term(m, SymPoly(Rational(1)));
        return out;
    }
    // weight/atoms per marking (groups are singletons).
    std::vector<int> weight_of(r + 1);
    std::vector<AtomMonomial> atoms_of(r + 1);
    for (const auto& g : m.groups) {
        weight_of[g.indices[0]] = g.weight;
        atoms_of[g.indices[0]] = g.atoms;
    }

    auto ptable = integer_partitions_table(m.alpha_size());

    for (const SetPartition& P : set_partitions(r)) {
        // Options per block.
        std::vector<std::vector<BlockOption>> options;
        bool dead = false;
        for (const auto& T : P.blocks) {
            Partition alpha_T;
            GradedClass w = alg->unit();
            AtomMonomial atoms;
            for (int i : T) {
                alpha_T.push_back(m.taus[i - 1] + 1);
                w = alg->cup(w, alg->basis_class(weight_of[i]));
                atoms.multiply(atoms_of[i]);
            }
            std::sort(alpha_T.begin(), alpha_T.end(), std::greater<int>());
            std::vector<BlockOption> opts;
            if (!w.is_zero()) {
                int sz = partition_size(alpha_T);
                for (int s = 1; s <= sz; s++)
                    for (const Partition& at : ptable[s]) {
                        SymPoly entry = apply_context(K.entry(alpha_T, at), ctx);
                        if (entry.is_zero())
                            continue;
                        expand_block_options(alg, entry, w, atoms, at, opts);
                    }
            }
            if (opts.empty()) {
                dead = true;
                break;
            }
            options.push_back(std::move(opts));
        }
        if (dead)
            continue;
        // Cartesian product over blocks.
        std::vector<size_t> pick(options.size(), 0);
        while (true) {
            DescMonomial key;
            SymPoly coeff(Rational(1));
            int next_index = 1;
            for (size_t b = 0; b < options.size(); b++) {
                const BlockOption& opt = options[b][pick[b]];
                MarkGroup g;
                for (int part : opt.alphat) {
                    key.taus.push_back(part - 1);
                    g.indices.push_back(next_index++);
                }
                g.weight = opt.weight;
                g.atoms = opt.atoms;
                key.groups.push_back(std::move(g));
                coeff = coeff * opt.coeff;
            }
            out.add_term(std::move(key), coeff);
            size_t b = 0;
            while (b < options.size() && ++pick[b] == options[b].size()) {
                pick[b] = 0;
                b++;
            }
            if (b == options.size())
                break;
        }
    }
    return out;
}

namespace {

struct Cluster {
    std::vector<int> fresh; // surviving output markings (pre-renumbering ids)
    GradedClass weight;
    AtomMonomial atoms;
};

} // namespace

DescExpr transform_general(const AlgebraPtr& alg, const DescMonomial& m, const KMatrix& K,
                           KMatrix::ChernContext ctx) {
    int r = m.markings();
    DescExpr out(alg);
    if (r == 0) {
        out.add_term(m, SymPoly(Rational(1)));
        return out;
    }
    auto ptable = integer_partitions_table(m.alpha_size());

    for (const SetPartition& P : set_partitions(r)) {
        int nblocks = static_cast<int>(P.blocks.size());
        // Per-block candidates: a target partition alphahat_T together with
        // one monomial of the K entry (entries split multilinearly).
        struct HatOption {
            Partition alphat;
            AtomMonomial atoms;
            int z_exp;
            Rational coeff;
        };
        std::vector<Partition> alpha_T(nblocks);
        std::vector<std::vector<HatOption>> candidates(nblocks);
        bool dead = false;
        for (int b = 0; b < nblocks && !dead; b++) {
            for (int i : P.blocks[b])
                alpha_T[b].push_back(m.taus[i - 1] + 1);
            std::sort(alpha_T[b].begin(), alpha_T[b].end(), std::greater<int>());
            int sz = partition_size(alpha_T[b]);
            for (int s = 1; s <= sz; s++)
                for (const Partition& at : ptable[s]) {
                    SymPoly entry = apply_context(K.entry(alpha_T[b], at), ctx);
                    for (const auto& [key, c] : entry.terms())
                        candidates[b].push_back({at, key.atoms, key.z_exp, c});
                }
            if (candidates[b].empty())
                dead = true;
        }
        if (dead)
            continue;

        std::vector<size_t> pick(nblocks, 0);
        while (true) {
            // Assemble the cycle contraction for this (P, alphahat) choice.
            // Nodes: original markings 1..r, then fresh markings per block.
            int total_fresh = 0;
            std::vector<int> fresh_base(nblocks);
            for (int b = 0; b < nblocks; b++) {
                fresh_base[b] = r + 1 + total_fresh;
                total_fresh += partition_length(candidates[b][pick[b]].alphat);
            }
            int n_nodes = r + total_fresh;
            std::vector<int> parent(n_nodes + 1);
            std::iota(parent.begin(), parent.end(), 0);
            auto find = [&](int x) {
                while (parent[x] != x)
                    x = parent[x] = parent[parent[x]];
                return x;
            };
            auto unite = [&](int a, int b2) { parent[find(a)] = find(b2); };

            for (const auto& g : m.groups)
                for (size_t i = 1; i < g.indices.size(); i++)
                    unite(g.indices[0], g.indices[i]);
            for (int b = 0; b < nblocks; b++) {
                int anchor = P.blocks[b].front();
                for (int i : P.blocks[b])
                    unite(anchor, i);
                int l = partition_length(candidates[b][pick[b]].alphat);
                for (int j = 0; j < l; j++)
                    unite(anchor, fresh_base[b] + j);
            }

            // Collect clusters: weights cup together, atoms multiply.
            std::map<int, Cluster> clusters;
            auto cluster_of = [&](int node) -> Cluster& {
                int root = find(node);
                auto it = clusters.find(root);
                if (it == clusters.end())
                    it = clusters.emplace(root, Cluster{{}, alg->unit(), {}}).first;
                return it->second;
            };
            for (const auto& g : m.groups) {
                Cluster& cl = cluster_of(g.indices[0]);
                cl.weight = alg->cup(cl.weight, alg->basis_class(g.weight));
                cl.atoms.multiply(g.atoms);
            }
            // K-entry atom parts sit on the block's cluster; the z-powers
            // and rational factors are global.
            int z_total = 0;
            Rational coeff_total(1);
            for (int b = 0; b < nblocks; b++) {
                const HatOption& opt = candidates[b][pick[b]];
                cluster_of(P.blocks[b].front()).atoms.multiply(opt.atoms);
                z_total += opt.z_exp;
                coeff_total *= opt.coeff;
                int l = partition_length(opt.alphat);
                Cluster& cl = cluster_of(P.blocks[b].front());
                for (int j = 0; j < l; j++)
                    cl.fresh.push_back(fresh_base[b] + j);
            }
            // Renumber fresh markings consecutively (block order).
            std::vector<int> renumber(n_nodes + 1, 0);
            int next_id = 1;
            std::vector<int> tau_out;
            for (int b = 0; b < nblocks; b++) {
                const Partition& at = candidates[b][pick[b]].alphat;
                for (int j = 0; j < partition_length(at); j++) {
                    renumber[fresh_base[b] + j] = next_id++;
                    tau_out.push_back(at[j] - 1);
                }
            }
            // Expand cluster weights over the basis (cartesian).
            std::vector<Cluster*> clist;
            for (auto& [root, cl] : clusters)
                clist.push_back(&cl);
            std::vector<std::vector<std::pair<int, Rational>>> weight_opts;
            bool any_zero = false;
            for (Cluster* cl : clist) {
                std::vector<std::pair<int, Rational>> opts;
                for (int bb = 0; bb < alg->size(); bb++)
                    if (cl->weight.coeff(bb) != 0)
                        opts.emplace_back(bb, cl->weight.coeff(bb));
                if (opts.empty())
                    any_zero = true;
                weight_opts.push_back(std::move(opts));
            }
            if (!any_zero) {
                std::vector<size_t> wpick(clist.size(), 0);
                while (true) {
                    DescMonomial key;
                    key.taus = tau_out;
                    Rational cw = coeff_total;
                    for (size_t ci = 0; ci < clist.size(); ci++) {
                        MarkGroup g;
                        for (int f : clist[ci]->fresh)
                            g.indices.push_back(renumber[f]);
                        std::sort(g.indices.begin(), g.indices.end());
                        g.weight = weight_opts[ci][wpick[ci]].first;
                        cw *= weight_opts[ci][wpick[ci]].second;
                        g.atoms = clist[ci]->atoms;
                        key.groups.push_back(std::move(g));
                    }
                    out.add_term(std::move(key), SymPoly::z_power(z_total, cw));
                    size_t ci = 0;
                    while (ci < clist.size() && ++wpick[ci] == weight_opts[ci].size()) {
                        wpick[ci] = 0;
                        ci++;
                    }
                    if (ci == clist.size())
                        break;
                }
            }
            int b = 0;
            while (b < nblocks && ++pick[b] == candidates[b].size()) {
                pick[b] = 0;
                b++;
            }
            if (b == nblocks)
                break;
        }
    }
    return out;
}

DescExpr transform_general(const DescExpr& e, const KMatrix& K, KMatrix::ChernContext ctx) {
    DescExpr out(e.algebra());
    for (const auto& [m, c] : e.terms())
        out = out + c * transform_general(e.algebra(), m, K, ctx);
    return out;
}

DescExpr invert(const DescExpr& e, const KMatrix& K, KMatrix::ChernContext ctx) {
    DescExpr result(e.algebra());
    DescExpr work = e;
    int guard = -1;
    while (!work.is_zero()) {
        int max_size = 0;
        for (const auto& [m, c] : work.terms())
            max_size = std::max(max_size, m.alpha_size());
        if (guard >= 0 && max_size >= guard)
            throw DescendError("invert: leading term failed to cancel");
        guard = max_size;
        // Leading terms: divide by the unitriangular head z^(l - |alpha|).
        DescExpr subtract(e.algebra());
        for (const auto& [m, c] : work.terms()) {
            if (m.alpha_size() != max_size)
                continue;
            SymPoly contribution = c.z_shift(m.alpha_size() - m.markings());
            result.add_term(m, contribution);
            subtract = subtract + contribution * transform_general(e.algebra(), m, K, ctx);
        }
        work = work - subtract;
    }
    return result;
}

DescExpr higher_expand(const AlgebraPtr& alg, const std::vector<std::vector<int>>& tuples,
                       const std::vector<GradedClass>& classes) {
    if (tuples.size() != classes.size())
        throw DescendError("higher_expand: tuple/class count mismatch");
    for (const auto& t : tuples)
        if (t.empty())
            throw DescendError("higher_expand: tuples must be nonempty");
    DescExpr out(alg);
    std::vector<std::pair<DescMonomial, Rational>> partial;
    partial.emplace_back(DescMonomial{}, Rational(1));
    int next_index = 1;
    for (size_t i = 0; i < tuples.size(); i++) {
        std::vector<int> indices;
        for (int a : tuples[i]) {
            if (a < 0)
                throw DescendError("higher_expand: descendent indices must be >= 0");
            indices.push_back(next_index++);
        }
        std::vector<std::pair<DescMonomial, Rational>> next;
        for (const auto& [m, c] : partial)
            for (int b = 0; b < alg->size(); b++) {
                if (classes[i].coeff(b) == 0)
                    continue;
                DescMonomial ext = m;
                for (int a : tuples[i])
                    ext.taus.push_back(a);
                ext.groups.push_back({indices, b, {}});
                next.emplace_back(std::move(ext), c * classes[i].coeff(b));
            }
        partial = std::move(next);
    }
    for (auto& [m, c] : partial)
        out.add_term(std::move(m), SymPoly(c));
    return out;
}

std::string print_monomial(const AlgebraPtr& alg, const DescMonomial& m) {
    std::ostringstream os;
    std::vector<std::string> weights(m.taus.size() + 1, "1");
    for (const auto& g : m.groups) {
        std::string w = alg->basis_element_info(g.weight).name;
        if (!g.atoms.is_one())
            w += "*" + g.atoms.to_string();
        weights[g.indices.front()] = w;
    }
    for (size_t i = 0; i < m.taus.size(); i++) {
        if (i)
            os << " ";
        os << "tau" << m.taus[i] << "(" << weights[i + 1] << ")";
    }
    if (m.taus.empty())
        os << "tau()";
    for (const auto& g : m.groups) {
        if (g.indices.size() < 2)
            continue;
        os << " * Drel(";
        for (size_t j = 0; j < g.indices.size(); j++)
            os << (j ? "," : "") << g.indices[j];
        os << ")";
    }
    return os.str();
}

std::string print_expr(const DescExpr& e) {
    if (e.is_zero())
        return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [m, c] : e.terms()) {
        if (!first)
            os << " + ";
        os << "(" << c.to_string() << ") " << print_monomial(e.algebra(), m);
        first = false;
    }
    return os.str();
}

DescExpr parse_monomial(const AlgebraPtr& alg, const std::string& text) {
    size_t pos = 0;
    auto skip_ws = [&] {
        while (pos < text.size() && isspace(static_cast<unsigned char>(text[pos])))
            pos++;
    };
    auto fail = [&](const std::string& msg) {
        throw DescendError("parse_monomial at position " + std::to_string(pos) + ": " + msg);
    };

    std::vector<int> taus;
    std::vector<std::string> weight_texts;
    std::vector<std::vector<int>> diagonals;

    skip_ws();
    while (pos < text.size()) {
        skip_ws();
        if (pos >= text.size())
            break;
        if (text[pos] == '*') {
            pos++;
            skip_ws();
        }
        if (text.compare(pos, 4, "Drel") == 0) {
            pos += 4;
            skip_ws();
            if (pos >= text.size() || text[pos] != '(')
                fail("expected '(' after Drel");
            pos++;
            std::vector<int> idx;
            while (true) {
                skip_ws();
                size_t start = pos;
                while (pos < text.size() && isdigit(static_cast<unsigned char>(text[pos])))
                    pos++;
                if (start == pos)
                    fail("expected marking index");
                idx.push_back(std::stoi(text.substr(start, pos - start)));
                skip_ws();
                if (pos < text.size() && text[pos] == ',') {
                    pos++;
                    continue;
                }
                if (pos < text.size() && text[pos] == ')') {
                    pos++;
                    break;
                }
                fail("expected ',' or ')'");
            }
            if (idx.size() < 2)
                fail("Drel needs at least two indices");
            diagonals.push_back(std::move(idx));
        } else if (text.compare(pos, 3, "tau") == 0) {
            pos += 3;
            size_t start = pos;
            while (pos < text.size() && isdigit(static_cast<unsigned char>(text[pos])))
                pos++;
            if (pos == start) {
                // "tau()": the empty monomial
                if (text.compare(pos, 2, "()") == 0) {
                    pos += 2;
                    continue;
                }
                fail("expected descendent index after 'tau'");
            }
            taus.push_back(std::stoi(text.substr(start, pos - start)));
            skip_ws();
            if (pos >= text.size() || text[pos] != '(')
                fail("expected '('");
            pos++;
            size_t wstart = pos;
            int depth = 1;
            while (pos < text.size() && depth > 0) {
                if (text[pos] == '(')
                    depth++;
                else if (text[pos] == ')')
                    depth--;
                if (depth > 0)
                    pos++;
            }
            if (depth != 0)
                fail("unterminated weight");
            weight_texts.push_back(text.substr(wstart, pos - wstart));
            pos++;
        } else {
            fail("expected 'tau<k>(...)' or 'Drel(...)'");
        }
    }

    int r = static_cast<int>(taus.size());
    DescMonomial m;
    m.taus = taus;
    std::vector<MarkGroup> singleton(r);
    for (int i = 0; i < r; i++) {
        MarkGroup g;
        g.indices = {i + 1};
        // Weight text: factors separated by '*' or '.'; basis names or
        // atoms (with optional ^ exponent).
        std::string w = weight_texts[i];
        g.weight = alg->unit_index();
        size_t p2 = 0;
        while (p2 < w.size()) {
            size_t star = w.find_first_of("*.", p2);
            std::string factor =
                w.substr(p2, star == std::string::npos ? std::string::npos : star - p2);
            // trim
            while (!factor.empty() && isspace(static_cast<unsigned char>(factor.front())))
                factor.erase(factor.begin());
            while (!factor.empty() && isspace(static_cast<unsigned char>(factor.back())))
                factor.pop_back();
            if (factor.empty())
                throw DescendError("empty weight factor");
            int exp = 1;
            size_t caret = factor.rfind('^');
            if (caret != std::string::npos &&
                factor.find_first_not_of("0123456789", caret + 1) == std::string::npos &&
                caret + 1 < factor.size()) {
                exp = std::stoi(factor.substr(caret + 1));
                factor = factor.substr(0, caret);
            }
            int bi = alg->basis_index(factor);
            if (bi >= 0 && exp == 1) {
                GradedClass cur = alg->basis_class(g.weight);
                GradedClass nw = alg->cup(cur, alg->basis_class(bi));
                // products of basis elements stay monomial in the shipped
                // presets; reject otherwise
                int nz = -1;
                bool monomial = true;
                Rational scale(0);
                for (int bb = 0; bb < alg->size(); bb++)
                    if (nw.coeff(bb) != 0) {
                        if (nz != -1)
                            monomial = false;
                        nz = bb;
                        scale = nw.coeff(bb);
                    }
                if (!monomial || (nz != -1 && scale != 1))
                    throw DescendError("weight products must stay monomial in the grammar");
                if (nz == -1)
                    throw DescendError("weight product vanishes");
                g.weight = nz;
            } else {
                g.atoms.multiply(intern_atom(factor), exp);
            }
            if (star == std::string::npos)
                break;
            p2 = star + 1;
        }
        singleton[i] = std::move(g);
    }
    m.groups = std::move(singleton);
    m.canonicalize();
    DescExpr e = monomial_expr(alg, m);
    for (const auto& idx : diagonals) {
        DescExpr next(alg);
        for (const auto& [mm, cc] : e.terms())
            next = next + cc * multiply_diagonal(alg, mm, idx);
        e = next;
    }
    return e;
}

} // namespace gwpt
