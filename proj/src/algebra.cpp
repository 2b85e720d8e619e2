#include "gwpt/algebra.hpp"

#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

namespace gwpt {

Rational parse_rational(const std::string& text) {
    auto bad = [&] { throw std::invalid_argument("malformed rational: '" + text + "'"); };
    if (text.empty())
        bad();
    size_t slash = text.find('/');
    try {
        if (slash == std::string::npos)
            return Rational(Integer(text));
        Integer num(text.substr(0, slash));
        Integer den(text.substr(slash + 1));
        if (den == 0)
            bad();
        return Rational(num, den);
    } catch (const std::exception&) {
        bad();
    }
    return Rational(0);
}

std::string to_string(const Rational& q) {
    std::ostringstream os;
    os << q;
    return os.str();
}

GradedClass::GradedClass(AlgebraPtr alg, std::vector<Rational> coeffs)
    : alg_(std::move(alg)), coeffs_(std::move(coeffs)) {
    if (static_cast<int>(coeffs_.size()) != alg_->size())
        throw AlgebraError("GradedClass: coefficient vector length mismatch");
}

GradedClass GradedClass::basis_element(AlgebraPtr alg, int index) {
    std::vector<Rational> v(alg->size(), Rational(0));
    v.at(index) = 1;
    return GradedClass(std::move(alg), std::move(v));
}

GradedClass GradedClass::zero(AlgebraPtr alg) {
    std::vector<Rational> v(alg->size(), Rational(0));
    return GradedClass(std::move(alg), std::move(v));
}

bool GradedClass::is_zero() const {
    for (const auto& c : coeffs_)
        if (c != 0)
            return false;
    return true;
}

bool GradedClass::is_homogeneous() const {
    int deg = -1;
    for (size_t i = 0; i < coeffs_.size(); i++) {
        if (coeffs_[i] == 0)
            continue;
        int d = alg_->basis_element_info(static_cast<int>(i)).degree;
        if (deg == -1)
            deg = d;
        else if (deg != d)
            return false;
    }
    return true;
}

int GradedClass::degree() const {
    int deg = -1;
    for (size_t i = 0; i < coeffs_.size(); i++) {
        if (coeffs_[i] == 0)
            continue;
        int d = alg_->basis_element_info(static_cast<int>(i)).degree;
        if (deg == -1)
            deg = d;
        else if (deg != d)
            throw AlgebraError("degree() on a mixed class");
    }
    return deg;
}

static void check_same_algebra(const GradedClass& a, const GradedClass& b) {
    if (a.algebra().get() != b.algebra().get())
        throw AlgebraError("operands belong to different algebras");
}

GradedClass operator+(const GradedClass& a, const GradedClass& b) {
    check_same_algebra(a, b);
    std::vector<Rational> v = a.coeffs();
    for (size_t i = 0; i < v.size(); i++)
        v[i] += b.coeffs()[i];
    return GradedClass(a.algebra(), std::move(v));
}

GradedClass operator-(const GradedClass& a, const GradedClass& b) {
    check_same_algebra(a, b);
    std::vector<Rational> v = a.coeffs();
    for (size_t i = 0; i < v.size(); i++)
        v[i] -= b.coeffs()[i];
    return GradedClass(a.algebra(), std::move(v));
}

GradedClass operator*(const Rational& c, const GradedClass& a) {
    std::vector<Rational> v = a.coeffs();
    for (auto& x : v)
        x *= c;
    return GradedClass(a.algebra(), std::move(v));
}

bool operator==(const GradedClass& a, const GradedClass& b) {
    return a.algebra().get() == b.algebra().get() && a.coeffs() == b.coeffs();
}

std::string GradedClass::to_string() const {
    std::ostringstream os;
    bool first = true;
    for (size_t i = 0; i < coeffs_.size(); i++) {
        if (coeffs_[i] == 0)
            continue;
        if (!first)
            os << " + ";
        if (coeffs_[i] != 1)
            os << coeffs_[i] << "*";
        os << alg_->basis_element_info(static_cast<int>(i)).name;
        first = false;
    }
    if (first)
        os << "0";
    return os.str();
}

std::string ValidationReport::to_string() const {
    if (ok())
        return "ok";
    std::ostringstream os;
    for (const auto& v : violations)
        os << v.identity << " at " << v.witness << "\n";
    return os.str();
}

FrobeniusAlgebra::FrobeniusAlgebra(std::string name, std::vector<BasisElement> basis,
                                   std::vector<std::vector<Rational>> pairing,
                                   std::vector<std::vector<std::vector<Rational>>> cup_table,
                                   int unit_index)
    : name_(std::move(name)), basis_(std::move(basis)), pairing_(std::move(pairing)),
      cup_(std::move(cup_table)), unit_index_(unit_index) {
    size_t n = basis_.size();
    if (pairing_.size() != n || cup_.size() != n)
        throw AlgebraError("algebra tables have inconsistent sizes");
    for (const auto& row : pairing_)
        if (row.size() != n)
            throw AlgebraError("pairing matrix is not square");
    for (const auto& row : cup_) {
        if (row.size() != n)
            throw AlgebraError("cup table is not square");
        for (const auto& vec : row)
            if (vec.size() != n)
                throw AlgebraError("cup table entry has wrong length");
    }
    if (unit_index_ < 0 || unit_index_ >= static_cast<int>(n))
        throw AlgebraError("missing unit element");
    for (const auto& b : basis_)
        if (b.degree % 2 != 0)
            throw AlgebraError("odd-degree basis element '" + b.name +
                               "' rejected (even cohomology only)");
}

int FrobeniusAlgebra::basis_index(const std::string& name) const {
    for (size_t i = 0; i < basis_.size(); i++)
        if (basis_[i].name == name)
            return static_cast<int>(i);
    return -1;
}

GradedClass FrobeniusAlgebra::basis_class(int i) const {
    return GradedClass::basis_element(shared_from_this(), i);
}

GradedClass FrobeniusAlgebra::cup(const GradedClass& a, const GradedClass& b) const {
    check_same_algebra(a, b);
    if (a.algebra().get() != this)
        throw AlgebraError("cup: operands belong to a different algebra");
    std::vector<Rational> out(size(), Rational(0));
    for (int i = 0; i < size(); i++) {
        if (a.coeff(i) == 0)
            continue;
        for (int j = 0; j < size(); j++) {
            if (b.coeff(j) == 0)
                continue;
            Rational c = a.coeff(i) * b.coeff(j);
            for (int k = 0; k < size(); k++)
                out[k] += c * cup_[i][j][k];
        }
    }
    return GradedClass(shared_from_this(), std::move(out));
}

Rational FrobeniusAlgebra::pair(const GradedClass& a, const GradedClass& b) const {
    check_same_algebra(a, b);
    if (a.algebra().get() != this)
        throw AlgebraError("pair: operands belong to a different algebra");
    Rational acc(0);
    for (int i = 0; i < size(); i++) {
        if (a.coeff(i) == 0)
            continue;
        for (int j = 0; j < size(); j++)
            if (b.coeff(j) != 0)
                acc += a.coeff(i) * b.coeff(j) * pairing_[i][j];
    }
    return acc;
}

void FrobeniusAlgebra::ensure_dual() const {
    if (dual_computed_)
        return;
    // Gauss-Jordan inversion of the Gram matrix, exact over Q.
    int n = size();
    std::vector<std::vector<Rational>> m = pairing_;
    std::vector<std::vector<Rational>> inv(n, std::vector<Rational>(n, Rational(0)));
    for (int i = 0; i < n; i++)
        inv[i][i] = 1;
    for (int col = 0; col < n; col++) {
        int pivot = -1;
        for (int row = col; row < n; row++)
            if (m[row][col] != 0) {
                pivot = row;
                break;
            }
        if (pivot == -1)
            throw AlgebraError("degenerate pairing: no dual basis");
        std::swap(m[pivot], m[col]);
        std::swap(inv[pivot], inv[col]);
        Rational p = m[col][col];
        for (int j = 0; j < n; j++) {
            m[col][j] /= p;
            inv[col][j] /= p;
        }
        for (int row = 0; row < n; row++) {
            if (row == col || m[row][col] == 0)
                continue;
            Rational f = m[row][col];
            for (int j = 0; j < n; j++) {
                m[row][j] -= f * m[col][j];
                inv[row][j] -= f * inv[col][j];
            }
        }
    }
    dual_ = std::move(inv);
    dual_computed_ = true;
}

GradedClass FrobeniusAlgebra::dual_basis_class(int i) const {
    ensure_dual();
    // phi_i^vee = sum_k (G^{-1})_{ik} e_k, so that pair(e_i, phi_j^vee) = delta_ij.
    std::vector<Rational> v(size());
    for (int k = 0; k < size(); k++)
        v[k] = dual_[i][k];
    return GradedClass(shared_from_this(), std::move(v));
}

std::vector<std::pair<GradedClass, GradedClass>> FrobeniusAlgebra::kunneth_diagonal() const {
    ensure_dual();
    std::vector<std::pair<GradedClass, GradedClass>> out;
    out.reserve(size());
    for (int i = 0; i < size(); i++)
        out.emplace_back(basis_class(i), dual_basis_class(i));
    return out;
}

ValidationReport FrobeniusAlgebra::validate() const {
    ValidationReport report;
    int n = size();
    auto witness = [&](std::initializer_list<int> idx) {
        std::string s = "(";
        bool first = true;
        for (int i : idx) {
            if (!first)
                s += ",";
            s += basis_[i].name;
            first = false;
        }
        return s + ")";
    };

    // Nondegeneracy via exact determinant (fraction-free would also do).
    {
        std::vector<std::vector<Rational>> m = pairing_;
        Rational det(1);
        bool singular = false;
        for (int col = 0; col < n && !singular; col++) {
            int pivot = -1;
            for (int row = col; row < n; row++)
                if (m[row][col] != 0) {
                    pivot = row;
                    break;
                }
            if (pivot == -1) {
                singular = true;
                break;
            }
            if (pivot != col) {
                std::swap(m[pivot], m[col]);
                det = -det;
            }
            det *= m[col][col];
            for (int row = col + 1; row < n; row++) {
                if (m[row][col] == 0)
                    continue;
                Rational f = m[row][col] / m[col][col];
                for (int j = col; j < n; j++)
                    m[row][j] -= f * m[col][j];
            }
        }
        if (singular || det == 0)
            report.violations.push_back({"pairing nondegeneracy (det = 0)", "(pairing)"});
    }

    const int top_degree = 4;
    for (int i = 0; i < n; i++)
        for (int j = 0; j < n; j++) {
            if (pairing_[i][j] != pairing_[j][i])
                report.violations.push_back({"pairing symmetry", witness({i, j})});
            if (pairing_[i][j] != 0 && basis_[i].degree + basis_[j].degree != top_degree)
                report.violations.push_back({"pairing degree (deg a + deg b != 4)", witness({i, j})});
        }

    auto cup_classes = [&](int i, int j) {
        return GradedClass(shared_from_this(), cup_[i][j]);
    };
    for (int i = 0; i < n; i++) {
        if (!(cup_classes(unit_index_, i) == basis_class(i)))
            report.violations.push_back({"unit law", witness({i})});
        for (int j = 0; j < n; j++) {
            if (!(cup_classes(i, j) == cup_classes(j, i)))
                report.violations.push_back({"cup commutativity", witness({i, j})});
            GradedClass cij = cup_classes(i, j);
            if (!cij.is_zero() && basis_[i].degree + basis_[j].degree > top_degree)
                report.violations.push_back({"cup exceeds top degree", witness({i, j})});
            for (int k = 0; k < n; k++) {
                if (!(cup(cup_classes(i, j), basis_class(k)) ==
                      cup(basis_class(i), cup_classes(j, k))))
                    report.violations.push_back({"cup associativity", witness({i, j, k})});
                if (pair(cup_classes(i, j), basis_class(k)) !=
                    pair(basis_class(i), cup_classes(j, k)))
                    report.violations.push_back({"Frobenius condition", witness({i, j, k})});
            }
        }
    }
    return report;
}

std::string FrobeniusAlgebra::to_string() const {
    std::ostringstream os;
    os << "algebra " << name_ << " [";
    for (int i = 0; i < size(); i++) {
        if (i)
            os << ", ";
        os << basis_[i].name << ":" << basis_[i].degree;
    }
    os << "]";
    return os.str();
}

namespace {

struct AlgebraBuilder {
    std::string name;
    std::vector<FrobeniusAlgebra::BasisElement> basis;
    std::map<std::string, int> index;
    std::vector<std::vector<Rational>> pairing;
    std::vector<std::vector<bool>> pairing_given;
    std::vector<std::vector<std::vector<Rational>>> cup;
    std::vector<std::vector<bool>> cup_given;

    void add_basis(const std::string& n, int degree) {
        if (index.count(n))
            throw AlgebraError("duplicate basis element '" + n + "'");
        index[n] = static_cast<int>(basis.size());
        basis.push_back({n, degree});
    }

    void finish_basis() {
        size_t n = basis.size();
        pairing.assign(n, std::vector<Rational>(n, Rational(0)));
        pairing_given.assign(n, std::vector<bool>(n, false));
        cup.assign(n, std::vector<std::vector<Rational>>(n, std::vector<Rational>(n, Rational(0))));
        cup_given.assign(n, std::vector<bool>(n, false));
    }

    int idx(const std::string& n) const {
        auto it = index.find(n);
        if (it == index.end())
            throw AlgebraError("unknown basis element '" + n + "'");
        return it->second;
    }

    AlgebraPtr build() {
        int unit = -1;
        for (size_t i = 0; i < basis.size(); i++)
            if (basis[i].degree == 0) {
                if (unit != -1)
                    throw AlgebraError("two degree-0 elements; unit must be unique");
                unit = static_cast<int>(i);
            }
        if (unit == -1)
            throw AlgebraError("preset has no unit (degree-0 element)");
        for (size_t i = 0; i < basis.size(); i++)
            for (size_t j = 0; j < basis.size(); j++)
                if (pairing[i][j] != pairing[j][i])
                    throw AlgebraError("pairing is not symmetric");
        size_t n = basis.size();
        // Unit cup rule and degree-forced zeros are implied.
        for (size_t i = 0; i < n; i++) {
            cup[unit][i][i] = 1;
            cup[i][unit][i] = 1;
            cup_given[unit][i] = cup_given[i][unit] = true;
        }
        for (size_t i = 0; i < n; i++)
            for (size_t j = 0; j < n; j++)
                if (!cup_given[i][j] && basis[i].degree + basis[j].degree > 4)
                    cup_given[i][j] = true; // stays zero
        return std::make_shared<FrobeniusAlgebra>(name, basis, pairing, cup, unit);
    }
};

AlgebraPtr build_surface_preset(const std::string& name,
                                const std::vector<std::pair<std::string, int>>& gens,
                                const std::vector<std::vector<Rational>>& deg2_gram) {
    // Surface presets: unit "1", the listed degree-2 generators, point class "p".
    // Degree-2 cup products are forced by the intersection lattice:
    // a*b = (a.b) p; pair(1,p) = 1; pair(a,b) = a.b.
    AlgebraBuilder b;
    b.name = name;
    b.add_basis("1", 0);
    for (const auto& [n, d] : gens)
        b.add_basis(n, d);
    b.add_basis("p", 4);
    b.finish_basis();
    int unit = b.idx("1"), point = b.idx("p");
    b.pairing[unit][point] = b.pairing[point][unit] = 1;
    for (size_t i = 0; i < gens.size(); i++)
        for (size_t j = 0; j < gens.size(); j++) {
            int bi = b.idx(gens[i].first), bj = b.idx(gens[j].first);
            b.pairing[bi][bj] = deg2_gram[i][j];
            b.cup[bi][bj][point] = deg2_gram[i][j];
            b.cup_given[bi][bj] = true;
        }
    return b.build();
}

} // namespace

AlgebraPtr preset_algebra(const std::string& name) {
    if (name == "toy")
        return build_surface_preset("toy", {}, {});
    if (name == "K3-truncation") {
        // Section/fiber sublattice of an elliptic K3: B.B = -2, B.F = 1, F.F = 0.
        return build_surface_preset("K3-truncation", {{"B", 2}, {"F", 2}},
                                    {{Rational(-2), Rational(1)}, {Rational(1), Rational(0)}});
    }
    if (name == "P2")
        return build_surface_preset("P2", {{"H", 2}}, {{Rational(1)}});
    if (name == "elliptic-even")
        return build_surface_preset("elliptic-even", {}, {});
    throw AlgebraError("unknown preset '" + name + "'");
}

std::vector<std::string> preset_algebra_names() {
    return {"toy", "K3-truncation", "P2", "elliptic-even"};
}

AlgebraPtr parse_algebra(std::istream& in) {
    AlgebraBuilder b;
    enum class Section { None, Basis, Pairing, Cup } section = Section::None;
    std::string line;
    int lineno = 0;
    bool basis_done = false;
    auto fail = [&](const std::string& msg) {
        throw AlgebraError("preset line " + std::to_string(lineno) + ": " + msg);
    };
    while (std::getline(in, line)) {
        lineno++;
        size_t hash = line.find('#');
        if (hash != std::string::npos)
            line = line.substr(0, hash);
        std::istringstream ls(line);
        std::string tok;
        if (!(ls >> tok))
            continue;
        if (tok == "algebra") {
            if (!(ls >> b.name))
                fail("missing algebra name");
        } else if (tok == "basis") {
            section = Section::Basis;
        } else if (tok == "pairing" || tok == "cup") {
            if (!basis_done) {
                b.finish_basis();
                basis_done = true;
            }
            section = tok == "pairing" ? Section::Pairing : Section::Cup;
        } else if (section == Section::Basis) {
            int degree;
            if (!(ls >> degree))
                fail("expected '<name> <degree>'");
            if (degree % 2 != 0)
                fail("odd cohomology degree rejected");
            b.add_basis(tok, degree);
        } else if (section == Section::Pairing) {
            std::string other, value;
            if (!(ls >> other >> value))
                fail("expected '<name> <name> <p/q>'");
            Rational q = parse_rational(value);
            int i = b.idx(tok), j = b.idx(other);
            if ((b.pairing_given[i][j] && b.pairing[i][j] != q) ||
                (b.pairing_given[j][i] && b.pairing[j][i] != q))
                fail("non-symmetric pairing: conflicting entries for (" + tok + "," + other + ")");
            b.pairing[i][j] = q;
            b.pairing[j][i] = q;
            b.pairing_given[i][j] = b.pairing_given[j][i] = true;
        } else if (section == Section::Cup) {
            std::string other, arrow;
            if (!(ls >> other >> arrow) || arrow != "->")
                fail("expected '<name> <name> -> <terms>'");
            int i = b.idx(tok), j = b.idx(other);
            std::vector<Rational> vec(b.basis.size(), Rational(0));
            std::string term;
            bool any = false;
            while (ls >> term) {
                if (term == "+")
                    continue;
                if (term == "0") {
                    any = true;
                    continue;
                }
                size_t star = term.find('*');
                Rational c(1);
                std::string bn = term;
                if (star != std::string::npos) {
                    c = parse_rational(term.substr(0, star));
                    bn = term.substr(star + 1);
                }
                vec[b.idx(bn)] += c;
                any = true;
            }
            if (!any)
                fail("empty cup product right-hand side");
            b.cup[i][j] = vec;
            b.cup[j][i] = vec;
            b.cup_given[i][j] = b.cup_given[j][i] = true;
        } else {
            fail("unexpected token '" + tok + "'");
        }
    }
    if (!basis_done)
        b.finish_basis();
    if (b.name.empty())
        fail("missing 'algebra <name>' header");
    return b.build();
}

AlgebraPtr load_algebra_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw AlgebraError("cannot open preset file '" + path + "'");
    return parse_algebra(in);
}

AlgebraPtr resolve_algebra(const std::string& name) {
    if (const char* env = std::getenv("GWPT_PRESET_PATH")) {
        std::string paths(env);
        size_t pos = 0;
        while (pos <= paths.size()) {
            size_t colon = paths.find(':', pos);
            std::string dir = paths.substr(pos, colon == std::string::npos ? colon : colon - pos);
            if (!dir.empty()) {
                std::string file = dir + "/" + name + ".preset";
                std::ifstream probe(file);
                if (probe)
                    return load_algebra_file(file);
            }
            if (colon == std::string::npos)
                break;
            pos = colon + 1;
        }
    }
    return preset_algebra(name);
}

} // namespace gwpt
