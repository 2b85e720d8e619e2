#pragma once

#include "gwpt/descend.hpp"
#include "gwpt/fock.hpp"
#include "gwpt/series.hpp"

#include <functional>
#include <map>
#include <string>
#include <variant>
#include <vector>

namespace gwpt {

struct RewriteError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Theory { GW, PT };
enum class ClassMode { Vir, Red, Full };

inline SeriesVar theory_var(Theory t) { return t == Theory::PT ? SeriesVar::P : SeriesVar::Z; }

// A relative geometry instance. Families:
//   "SxC"    — (S x C, S_z): genus g base curve, n_div relative fibers
//   "rubber" — (P(N+O), D_0 u D_inf)^~ over the surface, two slots
//   "P"      — the same bundle, rigidified (non-rubber)
//   "opaque" — named leaf geometry (symbolic degeneration outputs)
struct Geometry {
    std::string family;
    std::string name; // display / registry name
    AlgebraPtr surface;
    int genus = 0;
    int n_div = 0;
    bool rubber = false;
    bool k3_reduced = false;
    bool equivariant = false;
    std::vector<std::string> gens; // surface curve-class generators
    std::vector<int> c1_surface;   // int_gen c1(T_S)
    std::vector<int> normal_c1;    // int_gen c1(N_{D/X})

    auto key() const {
        return std::tie(family, name, genus, n_div, rubber, k3_reduced, equivariant, gens);
    }
    friend bool operator==(const Geometry& a, const Geometry& b) { return a.key() == b.key(); }
    friend bool operator<(const Geometry& a, const Geometry& b) { return a.key() < b.key(); }
    std::string to_string() const;
};

// Geometry presets: "K3xC", "toyxC", "P2xC", "cap-toy", "cap-K3",
// "rubber-toy", "rubber-K3".
Geometry make_geometry(const std::string& name, int genus = 0, int n_div = 1);

// Curve class (beta, d) over the geometry's surface lattice, with an
// optional multiple-cover tag: cover_k > 1 reads the surface part as
// phi_k(beta / k) for the registered isometry phi_k.
struct CurveClass {
    std::vector<int> surf;
    int fiber = 0;  // d
    int cover_k = 1;

    bool surf_zero() const {
        for (int x : surf)
            if (x)
                return false;
        return true;
    }
    friend bool operator==(const CurveClass&, const CurveClass&) = default;
    friend auto operator<=>(const CurveClass&, const CurveClass&) = default;
};

int d_beta(const Geometry& g, const CurveClass& c);     // int_beta c1(T_X)
int divisor_degree(const Geometry& g, const CurveClass& c); // beta . D per component

// Relative insertion at one divisor component.
struct RelSlot {
    enum class Kind { Partition, Opaque, KunnethHalf };
    Kind kind = Kind::Opaque;
    BasisPartition partition; // Kind::Partition (B-weighted, canonical)
    std::string name;         // Kind::Opaque
    int kunneth_id = 0;       // Kind::KunnethHalf: shared symbolic sum id
    int side = 0;             //   ... and which tensor factor (1 or 2)
    int size = 0;

    static RelSlot make(BasisPartition bp);
    static RelSlot opaque(std::string name, int size);
    static RelSlot kunneth(int id, int side, int size);

    auto key() const { return std::tie(kind, partition.pairs, name, kunneth_id, side, size); }
    friend bool operator==(const RelSlot& a, const RelSlot& b) { return a.key() == b.key(); }
    friend bool operator<(const RelSlot& a, const RelSlot& b) { return a.key() < b.key(); }
    std::string to_string(const AlgebraPtr& alg) const;
};

// One partition-function symbol Z[theory,mode]{geom}_(class)(rel || interior).
struct Bracket {
    Theory theory = Theory::PT;
    ClassMode mode = ClassMode::Vir;
    Geometry geom;
    CurveClass cls;
    std::vector<RelSlot> rel;
    DescMonomial interior;
    AtomMonomial atom_bag; // opaque insertions: Psi tokens, tau[nu] sums, ...
    int arg_scale = 1;     // series argument substitution p->p^k or z->kz
    bool std_desc = false; // comparison_simplify toggles marked bookkeeping

    // A k3-reduced bracket with vir mode and nonzero surface class is zero.
    bool is_zero_bracket() const {
        return geom.k3_reduced && mode == ClassMode::Vir && !cls.surf_zero();
    }
    void validate() const; // slot sizes vs divisor degrees, slot count

    auto key() const {
        return std::make_tuple(static_cast<int>(theory), static_cast<int>(mode), geom.key(),
                               cls.surf, cls.fiber, cls.cover_k, rel, interior, atom_bag,
                               arg_scale, std_desc);
    }
    friend bool operator==(const Bracket& a, const Bracket& b) { return a.key() == b.key(); }
    friend bool operator<(const Bracket& a, const Bracket& b) { return a.key() < b.key(); }
    std::string to_string() const;
};

// Product of bracket factors and opaque scalar symbols.
struct Term {
    std::vector<Bracket> brackets;
    AtomMonomial scalars;

    void canonicalize() { std::sort(brackets.begin(), brackets.end()); }
    auto key() const {
        std::vector<decltype(std::declval<Bracket>().key())> bk;
        for (const auto& b : brackets)
            bk.push_back(b.key());
        return std::make_tuple(std::move(bk), scalars);
    }
    friend bool operator==(const Term& a, const Term& b) { return a.key() == b.key(); }
    friend bool operator<(const Term& a, const Term& b) { return a.key() < b.key(); }
};

class Expression {
  public:
    explicit Expression(SeriesVar var = SeriesVar::P) : var_(var) {}
    static Expression single(Bracket b, LaurentSeries coeff);
    static Expression single(Bracket b);

    SeriesVar var() const { return var_; }
    const std::map<Term, LaurentSeries>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    int term_count() const { return static_cast<int>(terms_.size()); }

    void add_term(Term t, const LaurentSeries& coeff);

    friend Expression operator+(const Expression& a, const Expression& b);
    friend Expression operator-(const Expression& a, const Expression& b);
    friend Expression operator*(const Expression& a, const Expression& b); // term products
    Expression scaled(const EpsScalar& c) const;

    friend bool operator==(const Expression&, const Expression&) = default;

    std::string to_string() const;

  private:
    SeriesVar var_;
    std::map<Term, LaurentSeries> terms_;
};

// Replayable trace: rule applications with deterministic re-execution.
struct DerivationStep {
    std::string rule;
    std::string target; // printed form of the rewritten subterm
    std::string args;
    std::string output; // printed form of the full expression after the step
};

struct Derivation {
    std::string root; // printed form of the initial expression
    std::vector<DerivationStep> steps;
    std::string to_records() const;
};

// Degeneration descriptors.
struct NodeSeparating {
    int g1 = 0, g2 = 0;
    std::vector<int> side_of_component; // per divisor component: 1 or 2
};
struct NodeNonseparating {};
struct TrivialSplit {};
struct NormalCone {
    int component = 0; // 0-based divisor component index
};
struct K3SurfaceSplit {}; // S ~> R1 u_E R2, symbolic output
using Degeneration =
    std::variant<NodeSeparating, NodeNonseparating, TrivialSplit, NormalCone, K3SurfaceSplit>;

// --- Rules -----------------------------------------------------------------

// Degeneration formula: sum over curve-class splittings, interior marking
// splittings, and the Kunneth decomposition of the diagonal of S^[d].
// In full mode over a k3-reduced geometry the dual-number coefficients track
// vir/red; red mode expands to the Leibniz sum directly.
// With eager_kunneth = false the diagonal stays a symbolic indexed sum
// (paired KunnethHalf slots); kunneth_seq seeds the sum ids.
Expression degenerate(const Bracket& b, const Degeneration& split, bool eager_kunneth = true,
                      int* kunneth_seq = nullptr);

// Splitting of a relative diagonal factor in the interior insertion
// (single relative component geometries).
Expression split_diagonal(const Bracket& b);

// Rubber bracket -> rigid bracket over (P, D_{0,inf}) with pi_1^*(D_0)
// cupped into the first marking.
Bracket rigidify(const Bracket& b);

// Separate dual-number components: (vir part, red part).
std::pair<Expression, Expression> epsilon_split(const Expression& e);

// Multiple cover formulas; div = divisibility of the curve class.
Expression mcf_pt(const Bracket& b, int div);
Expression mcf_gw(const Bracket& b, int div);

// Checks that p -> p^k and z -> kz commute with p = e^z on the mcf outputs;
// returns the replayable trace. Throws on mismatch.
Derivation verify_mcf_compat(int div);

// Reduction of (S x C, S_z) brackets to caps (S x P1, S_infty); the inverse
// cap matrix stays symbolic. The (g, N) measure decreases lexicographically
// at every step (asserted).
struct ReduceResult {
    Expression expr;
    Derivation derivation;
    std::vector<std::pair<std::pair<int, int>, std::pair<int, int>>> measures; // per step
};
ReduceResult reduce_to_cap(const Bracket& b);

// Capped assembly C = V(lam|rho|tau) + sum_i V(phi_i|rho|tau) R(lam,phi_i^vee|0|..)
// over a symbolic Kunneth list of the declared length.
Expression capped_assemble(const std::string& v_label, const std::string& r_label,
                           int lambda_size, int d, int kunneth_len);

// Marked bracket with pure pullback interior <-> standard descendent bracket.
Bracket comparison_simplify(const Bracket& b);
Bracket comparison_unsimplify(const Bracket& b);

// Prefactor identity checks (degeneration, splitting, diagonal-sign),
// sampled over random integer tuples.
struct PrefactorReport {
    int samples = 0;
    int mismatches = 0;
    std::vector<std::string> details;
    bool ok() const { return mismatches == 0; }
};
PrefactorReport check_prefactors(int samples, unsigned seed = 12345);

// transform-then-degenerate vs degenerate-then-transform on pullback
// classes; throws RewriteError when bounds are exceeded, returns the trace.
Derivation verify_correspondence_compat(const Bracket& b, const Degeneration& split,
                                        const KMatrix& K);

// Deterministic re-execution of a derivation produced by this engine;
// returns false if any step's output fails to reproduce bit-exactly.
bool replay(const Derivation& d, const std::function<Expression(int step)>& reexecute);

} // namespace gwpt
