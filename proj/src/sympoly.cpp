#include "gwpt/sympoly.hpp"

#include <algorithm>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace gwpt {

namespace {

struct AtomTable {
    std::mutex mutex;
    std::vector<std::string> names;
    std::unordered_map<std::string, AtomId> index;
};

AtomTable& atom_table() {
    static AtomTable table;
    return table;
}

} // namespace

AtomId intern_atom(const std::string& name) {
    auto& table = atom_table();
    std::lock_guard<std::mutex> lock(table.mutex);
    auto it = table.index.find(name);
    if (it != table.index.end())
        return it->second;
    AtomId id = static_cast<AtomId>(table.names.size());
    table.names.push_back(name);
    table.index.emplace(name, id);
    return id;
}

const std::string& atom_name(AtomId id) {
    auto& table = atom_table();
    std::lock_guard<std::mutex> lock(table.mutex);
    return table.names.at(static_cast<size_t>(id));
}

void AtomMonomial::multiply(AtomId id, int exp) {
    if (exp == 0)
        return;
    auto it = std::lower_bound(factors.begin(), factors.end(), id,
                               [](const auto& f, AtomId v) { return f.first < v; });
    if (it != factors.end() && it->first == id) {
        it->second += exp;
        if (it->second == 0)
            factors.erase(it);
    } else {
        factors.insert(it, {id, exp});
    }
}

void AtomMonomial::multiply(const AtomMonomial& other) {
    for (const auto& [id, e] : other.factors)
        multiply(id, e);
}

std::string AtomMonomial::to_string() const {
    std::ostringstream os;
    bool first = true;
    for (const auto& [id, e] : factors) {
        if (!first)
            os << "*";
        os << atom_name(id);
        if (e != 1)
            os << "^" << e;
        first = false;
    }
    return os.str();
}

SymPoly::SymPoly(Rational c) {
    if (c != 0)
        terms_.emplace(Key{}, std::move(c));
}

SymPoly SymPoly::z_power(int e, Rational c) {
    SymPoly p;
    if (c != 0)
        p.terms_.emplace(Key{e, {}}, std::move(c));
    return p;
}

SymPoly SymPoly::atom(AtomId id, Rational c) {
    SymPoly p;
    if (c != 0) {
        AtomMonomial m;
        m.multiply(id);
        p.terms_.emplace(Key{0, std::move(m)}, std::move(c));
    }
    return p;
}

SymPoly SymPoly::monomial(int z_exp, AtomMonomial atoms, Rational c) {
    SymPoly p;
    if (c != 0)
        p.terms_.emplace(Key{z_exp, std::move(atoms)}, std::move(c));
    return p;
}

bool SymPoly::is_one() const {
    return terms_.size() == 1 && terms_.begin()->first == Key{} &&
           terms_.begin()->second == 1;
}

void SymPoly::add_term(Key key, const Rational& c) {
    if (c == 0)
        return;
    auto it = terms_.find(key);
    if (it == terms_.end()) {
        terms_.emplace(std::move(key), c);
    } else {
        it->second += c;
        if (it->second == 0)
            terms_.erase(it);
    }
}

SymPoly operator+(const SymPoly& a, const SymPoly& b) {
    SymPoly out = a;
    for (const auto& [k, c] : b.terms_)
        out.add_term(k, c);
    return out;
}

SymPoly operator-(const SymPoly& a, const SymPoly& b) {
    SymPoly out = a;
    for (const auto& [k, c] : b.terms_)
        out.add_term(k, -c);
    return out;
}

SymPoly SymPoly::operator-() const {
    SymPoly out;
    for (const auto& [k, c] : terms_)
        out.terms_.emplace(k, -c);
    return out;
}

SymPoly operator*(const SymPoly& a, const SymPoly& b) {
    SymPoly out;
    for (const auto& [ka, ca] : a.terms_)
        for (const auto& [kb, cb] : b.terms_) {
            SymPoly::Key key{ka.z_exp + kb.z_exp, ka.atoms};
            key.atoms.multiply(kb.atoms);
            out.add_term(std::move(key), ca * cb);
        }
    return out;
}

SymPoly operator*(const Rational& c, const SymPoly& a) {
    SymPoly out;
    if (c == 0)
        return out;
    for (const auto& [k, x] : a.terms_)
        out.terms_.emplace(k, c * x);
    return out;
}

SymPoly SymPoly::z_shift(int e) const {
    SymPoly out;
    for (const auto& [k, c] : terms_)
        out.terms_.emplace(Key{k.z_exp + e, k.atoms}, c);
    return out;
}

SymPoly SymPoly::z_scale(int k) const {
    SymPoly out;
    for (const auto& [key, c] : terms_)
        out.add_term(key, c * rational_pow(Rational(k), key.z_exp));
    return out;
}

int SymPoly::z_degree() const {
    if (terms_.empty())
        throw std::domain_error("z_degree of zero SymPoly");
    int d = terms_.begin()->first.z_exp;
    for (const auto& [k, c] : terms_)
        d = std::max(d, k.z_exp);
    return d;
}

int SymPoly::z_valuation() const {
    if (terms_.empty())
        throw std::domain_error("z_valuation of zero SymPoly");
    int d = terms_.begin()->first.z_exp;
    for (const auto& [k, c] : terms_)
        d = std::min(d, k.z_exp);
    return d;
}

bool SymPoly::atom_free() const {
    for (const auto& [k, c] : terms_)
        if (!k.atoms.is_one())
            return false;
    return true;
}

std::string SymPoly::to_string(const char* var) const {
    if (terms_.empty())
        return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [k, c] : terms_) {
        Rational coeff = c;
        if (first) {
            if (coeff < 0) {
                os << "-";
                coeff = -coeff;
            }
        } else {
            os << (coeff < 0 ? " - " : " + ");
            if (coeff < 0)
                coeff = -coeff;
        }
        bool printed = false;
        if (coeff != 1 || (k.atoms.is_one() && k.z_exp == 0)) {
            os << coeff;
            printed = true;
        }
        if (k.z_exp != 0) {
            if (printed)
                os << "*";
            os << var;
            if (k.z_exp != 1)
                os << "^" << k.z_exp;
            printed = true;
        }
        if (!k.atoms.is_one()) {
            if (printed)
                os << "*";
            os << k.atoms.to_string();
        }
        first = false;
    }
    return os.str();
}

} // namespace gwpt
