#include "gwpt/parser.hpp"

#include <cctype>
#include <cstring>
#include <random>
#include <sstream>

namespace gwpt {

std::string ParseError::caret_diagnostic() const {
    std::ostringstream os;
    os << input << "\n";
    for (size_t i = 0; i < position; i++)
        os << ' ';
    os << "^ " << what();
    return os.str();
}

namespace {

struct Cursor {
    const std::string& text;
    size_t pos = 0;

    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos, text); }
    bool eof() const { return pos >= text.size(); }
    char peek() const { return eof() ? '\0' : text[pos]; }
    void skip_ws() {
        while (!eof() && isspace(static_cast<unsigned char>(text[pos])))
            pos++;
    }
    void expect(const std::string& token) {
        skip_ws();
        if (text.compare(pos, token.size(), token) != 0)
            fail("expected '" + token + "'");
        pos += token.size();
    }
    bool try_consume(const std::string& token) {
        skip_ws();
        if (text.compare(pos, token.size(), token) == 0) {
            pos += token.size();
            return true;
        }
        return false;
    }
    int integer() {
        skip_ws();
        size_t start = pos;
        if (!eof() && (text[pos] == '-' || text[pos] == '+'))
            pos++;
        while (!eof() && isdigit(static_cast<unsigned char>(text[pos])))
            pos++;
        if (pos == start || (pos == start + 1 && !isdigit(static_cast<unsigned char>(text[start]))))
            fail("expected integer");
        return std::stoi(text.substr(start, pos - start));
    }
    std::string ident(const char* extra = "") {
        skip_ws();
        size_t start = pos;
        auto ok = [&](char c) {
            return isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' ||
                   strchr(extra, c) != nullptr;
        };
        while (!eof() && ok(text[pos]))
            pos++;
        if (pos == start)
            fail("expected identifier");
        return text.substr(start, pos - start);
    }
    // Consumes up to (not including) the next occurrence of any delimiter at
    // depth 0; tracks (), [] nesting. The delimiter test runs before bracket
    // accounting so a closing paren ending the region is not swallowed.
    std::string until_top_level(const std::vector<std::string>& delims) {
        skip_ws();
        size_t start = pos;
        int depth = 0;
        while (!eof()) {
            if (depth == 0) {
                bool hit = false;
                for (const auto& d : delims)
                    if (text.compare(pos, d.size(), d) == 0)
                        hit = true;
                if (hit)
                    break;
            }
            char c = text[pos];
            if (c == '(' || c == '[') {
                depth++;
            } else if (c == ')' || c == ']') {
                if (depth == 0)
                    break;
                depth--;
            }
            pos++;
        }
        return text.substr(start, pos - start);
    }
};

std::string trim(std::string s) {
    while (!s.empty() && isspace(static_cast<unsigned char>(s.front())))
        s.erase(s.begin());
    while (!s.empty() && isspace(static_cast<unsigned char>(s.back())))
        s.pop_back();
    return s;
}

RelSlot parse_relslot(Cursor& cur, const Geometry& geom) {
    cur.skip_ws();
    if (cur.peek() == '@') {
        cur.pos++;
        size_t start = cur.pos;
        int depth = 0;
        while (!cur.eof()) {
            char c = cur.text[cur.pos];
            if (c == '(')
                depth++;
            else if (c == ')') {
                if (depth == 0)
                    break;
                depth--;
            } else if (depth == 0 && (c == '|' || c == ' '))
                break;
            cur.pos++;
        }
        std::string name = cur.text.substr(start, cur.pos - start);
        if (name.empty())
            cur.fail("expected opaque slot name after '@'");
        return RelSlot::opaque(name, 0);
    }
    if (cur.peek() == '#') {
        cur.expect("#K");
        int id = cur.integer();
        cur.expect(".");
        int side = cur.integer();
        return RelSlot::kunneth(id, side, 0);
    }
    BasisPartition bp;
    while (true) {
        cur.skip_ws();
        if (cur.try_consume("|0>"))
            break;
        if (cur.peek() != 'q')
            cur.fail("expected 'q<m>(<weight>)' or '|0>'");
        cur.pos++;
        int part = cur.integer();
        cur.expect("(");
        std::string name = cur.ident();
        cur.expect(")");
        int idx = geom.surface->basis_index(name);
        if (idx < 0)
            cur.fail("unknown basis element '" + name + "'");
        bp.pairs.emplace_back(part, idx);
    }
    return RelSlot::make(std::move(bp));
}

} // namespace

Bracket parse_bracket(const std::string& text) {
    Cursor cur{text};
    Bracket b;
    cur.expect("Z");
    b.std_desc = cur.try_consume("*");
    cur.expect("[");
    std::string theory = cur.ident();
    if (theory == "PT")
        b.theory = Theory::PT;
    else if (theory == "GW")
        b.theory = Theory::GW;
    else
        cur.fail("theory must be GW or PT");
    cur.expect(",");
    std::string mode = cur.ident();
    if (mode == "vir")
        b.mode = ClassMode::Vir;
    else if (mode == "red")
        b.mode = ClassMode::Red;
    else if (mode == "full")
        b.mode = ClassMode::Full;
    else
        cur.fail("mode must be vir, red or full");
    cur.expect("]");
    cur.expect("{");
    std::string geom_name;
    {
        size_t start = cur.pos;
        while (!cur.eof() && cur.text[cur.pos] != '}' && cur.text[cur.pos] != ':')
            cur.pos++;
        geom_name = trim(cur.text.substr(start, cur.pos - start));
    }
    int genus = 0;
    if (cur.try_consume(":")) {
        cur.expect("g=");
        genus = cur.integer();
    }
    cur.expect("}");
    try {
        b.geom = make_geometry(geom_name, genus, 0);
    } catch (const RewriteError& e) {
        cur.fail(e.what());
    }
    cur.expect("_");
    cur.expect("(");
    // curve class: optional 'phiK:' prefix, then a sum over generators, ',' d.
    b.cls.surf.assign(b.geom.gens.size(), 0);
    cur.skip_ws();
    if (cur.text.compare(cur.pos, 3, "phi") == 0 &&
        isdigit(static_cast<unsigned char>(cur.text[cur.pos + 3]))) {
        cur.pos += 3;
        b.cls.cover_k = cur.integer();
        cur.expect(":");
    }
    while (true) {
        cur.skip_ws();
        int sign = 1;
        if (cur.try_consume("-"))
            sign = -1;
        else
            cur.try_consume("+");
        cur.skip_ws();
        int coeff = 1;
        bool have_digits = false;
        if (isdigit(static_cast<unsigned char>(cur.peek()))) {
            coeff = cur.integer();
            have_digits = true;
        }
        cur.skip_ws();
        if (cur.peek() == ',') {
            // only a literal "0" may stand alone (the zero surface class)
            if (!have_digits || coeff != 0)
                cur.fail("expected a curve-class generator or 0");
            break;
        }
        std::string gen = cur.ident();
        int gi = -1;
        for (size_t i = 0; i < b.geom.gens.size(); i++)
            if (b.geom.gens[i] == gen)
                gi = static_cast<int>(i);
        if (gi < 0)
            cur.fail("unknown curve-class generator '" + gen + "'");
        b.cls.surf[gi] += sign * coeff;
        cur.skip_ws();
        if (cur.peek() == ',')
            break;
    }
    cur.expect(",");
    b.cls.fiber = cur.integer();
    cur.expect(")");
    cur.expect("(");
    // relative insertions up to ' || '.
    cur.skip_ws();
    std::vector<RelSlot> slots;
    if (!cur.try_consume("||")) {
        while (true) {
            slots.push_back(parse_relslot(cur, b.geom));
            cur.skip_ws();
            if (cur.try_consume("||"))
                break;
            cur.expect("|");
        }
    }
    b.rel = std::move(slots);
    // interior monomial up to ' || ' or ')'.
    std::string mono_text = cur.until_top_level({"||", ")"});
    try {
        DescExpr e = parse_monomial(b.geom.surface, trim(mono_text));
        if (e.terms().size() != 1 || !(e.terms().begin()->second == SymPoly(Rational(1))))
            cur.fail("interior insertion must be a single monomial with unit coefficient");
        b.interior = e.terms().begin()->first;
    } catch (const DescendError& e) {
        cur.fail(e.what());
    }
    if (cur.try_consume("||")) {
        std::string bag = trim(cur.until_top_level({")"}));
        size_t p = 0;
        while (p < bag.size()) {
            size_t star = bag.find('*', p);
            std::string factor =
                trim(bag.substr(p, star == std::string::npos ? std::string::npos : star - p));
            int exp = 1;
            size_t caret = factor.rfind('^');
            if (caret != std::string::npos &&
                factor.find_first_not_of("0123456789", caret + 1) == std::string::npos &&
                caret + 1 < factor.size()) {
                exp = std::stoi(factor.substr(caret + 1));
                factor = factor.substr(0, caret);
            }
            if (factor.empty())
                cur.fail("empty atom in bag");
            b.atom_bag.multiply(intern_atom(factor), exp);
            if (star == std::string::npos)
                break;
            p = star + 1;
        }
    }
    cur.expect(")");
    cur.skip_ws();
    if (cur.try_consume("@")) {
        if (b.theory == Theory::PT) {
            cur.expect("p^");
            b.arg_scale = cur.integer();
        } else {
            b.arg_scale = cur.integer();
            cur.expect("z");
        }
    }
    cur.skip_ws();
    if (!cur.eof())
        cur.fail("trailing input after bracket");

    // Fix up slot counts and sizes against the geometry.
    if (b.geom.family == "SxC") {
        b.geom.n_div = static_cast<int>(b.rel.size());
    } else if (static_cast<int>(b.rel.size()) != b.geom.n_div) {
        cur.fail("geometry expects " + std::to_string(b.geom.n_div) + " relative insertions");
    }
    int d = divisor_degree(b.geom, b.cls);
    for (auto& s : b.rel)
        if (s.kind != RelSlot::Kind::Partition)
            s.size = d;
    try {
        b.validate();
    } catch (const RewriteError& e) {
        cur.fail(e.what());
    }
    return b;
}

Bracket random_bracket(unsigned seed) {
    std::mt19937 rng(seed);
    auto pick = [&](int n) { return static_cast<int>(rng() % static_cast<unsigned>(n)); };
    static const char* geoms[] = {"K3xC", "toyxC", "P2xC"};
    int genus = pick(3);
    Bracket b;
    b.theory = pick(2) ? Theory::PT : Theory::GW;
    b.mode = static_cast<ClassMode>(pick(3));
    b.geom = make_geometry(geoms[pick(3)], genus, 0);
    int d = 1 + pick(2);
    b.cls.surf.assign(b.geom.gens.size(), 0);
    for (auto& x : b.cls.surf)
        x = pick(3);
    b.cls.fiber = d;
    if (b.mode == ClassMode::Red && b.theory == Theory::PT && pick(2))
        b.cls.cover_k = 1 + pick(2), b.arg_scale = b.cls.cover_k;
    int n_div = pick(3);
    b.geom.n_div = n_div;
    auto parts = basis_partitions(b.geom.surface, d);
    for (int i = 0; i < n_div; i++) {
        int kind = pick(3);
        if (kind == 0)
            b.rel.push_back(RelSlot::make(parts[pick(static_cast<int>(parts.size()))]));
        else if (kind == 1)
            b.rel.push_back(RelSlot::opaque("sym" + std::to_string(pick(5)), d));
        else
            b.rel.push_back(RelSlot::kunneth(1 + pick(3), 1 + pick(2), d));
    }
    int r = pick(3);
    for (int i = 0; i < r; i++) {
        b.interior.taus.push_back(pick(3));
        MarkGroup g;
        g.indices = {i + 1};
        g.weight = pick(b.geom.surface->size());
        if (pick(3) == 0)
            g.atoms.multiply(intern_atom("K[2;1]"));
        b.interior.groups.push_back(std::move(g));
    }
    // Occasionally glue two markings.
    if (r >= 2 && pick(2)) {
        b.interior.groups[0].indices = {1, 2};
        GradedClass w = b.geom.surface->cup(
            b.geom.surface->basis_class(b.interior.groups[0].weight),
            b.geom.surface->basis_class(b.interior.groups[1].weight));
        int nz = -1;
        for (int bb = 0; bb < b.geom.surface->size(); bb++)
            if (w.coeff(bb) != 0 && nz == -1 && w.coeff(bb) == 1)
                nz = bb;
        if (nz >= 0) {
            b.interior.groups[0].weight = nz;
            b.interior.groups.erase(b.interior.groups.begin() + 1);
        } else {
            b.interior.groups[0].indices = {1};
        }
    }
    if (pick(4) == 0)
        b.atom_bag.multiply(intern_atom("tau[nu1]"));
    b.interior.canonicalize();
    b.validate();
    return b;
}

} // namespace gwpt
