#ifndef MONO_PREPARED_HPP
#define MONO_PREPARED_HPP

#include <mono/series.hpp>
#include <mono/toric.hpp>
#include <mono/valgroup.hpp>

#include <map>
#include <tuple>
#include <vector>

namespace mono {

// One of the ten transformation types.  A single struct with a tag keeps
// serialization and replay straightforward; unused fields stay empty.
struct Transformation {
    int type = 0;             // 1..10
    std::size_t mbar = 0;     // the distinguished index, where applicable

    TransformSeq xseq{0};     // type 2: r slots; types 4, 9: r+1 slots (slot r = target)
    TransformSeq yseq{0};     // types 1, 2, 9: s slots; types 4, 6: s+1 slots (slot s = target)

    TruncatedSeries series;   // types 3, 10: phi over x-vars; 5: F over y-vars; 8: gamma over y-vars
    QVec exps;                // type 8: the exponents c_1..c_s

    // normal-form data of the translated move (types 4, 6, 9)
    QMat ymat;                // (b_ij) s x s
    QVec yvec;                // (b_j)
    FieldElem alpha;          // translation constant
    Rat lambda_exp = 1;       // type 9: exponent on the unit in eq. (37)

    std::size_t swap_i = 0, swap_j = 0;   // type 7 (1-based y indices)

    // assigned value of a renamed coordinate, flagged when the monomial
    // valuation model cannot derive it
    GroupValue new_weight;
    bool has_new_weight = false;
    bool weight_flagged = false;

    // bookkeeping for jumps of the type: after the main effect, absorb
    // x_{r+l+1} into the identified block (promote_l) or into the monomial
    // block as a fresh row of C (promote_r, reindexing the x-variables)
    bool promote_l = false;
    bool promote_r = false;

    // post-state type, filled in by apply for the certificate
    long post_s = -1, post_r = -1, post_l = -1;
};

// The prepared-pair state of Eq. (5): r monomial relations in s
// independent variables, l identifications x_{r+i} = y_{s+i}, and an
// explicit y-series for every remaining x-variable.
class PreparedPair {
public:
    std::size_t n = 0, m = 0, s = 0, r = 0, l = 0;
    IMat C;                                      // r x s, natural entries
    std::map<std::size_t, TruncatedSeries> xseries;   // key: 1-based x index in (r+l, m]
    WeightAssignment weights;                    // for y_1..y_n
    FieldPtr field;
    Rat trunc = 0;
    std::vector<Transformation> log;

    // checks every invariant; returns (s, r, l)
    std::tuple<std::size_t, std::size_t, std::size_t> validate() const;

    // y-values of the x-variables 1..r (derived, never stored)
    std::vector<GroupValue> x_values() const;
    GroupValue x_value(std::size_t i) const;     // 1-based, i <= r+l

    // the pullback of x_i as a series in y (monomial for i <= r, variable
    // for identified indices, stored series otherwise)
    TruncatedSeries x_image(std::size_t i) const;

    // substitute x-variable images into a series over m x-variables
    TruncatedSeries pull_to_y(const TruncatedSeries& xser) const;

    PreparedPair with_field(const FieldPtr& f) const;
};

// canonical-keyed Eq. (6) decomposition
struct ClassDecomposition {
    IMat lattice;   // HNF basis of (Q^r C) cap Z^s
    std::vector<std::pair<IVec, TruncatedSeries>> components;

    const TruncatedSeries* component(const IVec& key) const;
};

IVec class_key(const PreparedPair& p, const IMat& lattice, const IVec& alpha);
IMat saturation_lattice(const PreparedPair& p);
ClassDecomposition decompose(const TruncatedSeries& g, const PreparedPair& p);
bool is_algebraic(const TruncatedSeries& g, const PreparedPair& p);

// apply one transformation, returning the new pair (validated, logged)
PreparedPair apply(const PreparedPair& p, Transformation t);

// rewrite of the old y-variables in terms of the new ones under t
Substitution y_rewrite(const PreparedPair& p, const Transformation& t);
// rewrite of the old x-variables in terms of the new ones under t
Substitution x_rewrite(const PreparedPair& p, const Transformation& t);

// GMT data on the x-side to be lifted to a full transformation
struct GmtData {
    std::size_t target = 0;   // 0: SGMT in x_1..x_r; else 1-based index r+mbar
    TransformSeq xseq{0};     // r slots, or r+1 slots with the target last
    FieldElem alpha;          // residue for a translated endpoint (types 4)
    bool has_alpha = false;
    GroupValue new_weight;    // assigned value of the renamed variable (type 4)
    bool has_new_weight = false;
};

// companion y-side construction of Lemmas 22 / 23 / 35
Transformation lift_gmt(const PreparedPair& p, const GmtData& gmt);

// Lemma-6 normal form of a raw GMT in s+1 variables
struct RawGmt {
    IMat matrix;                    // (s+1) x (s+1), natural entries, det != 0
    std::vector<FieldElem> alphas;  // one per variable slot
};
struct NormalizedGmt {
    std::vector<std::size_t> perm;  // applied column reindexing (old slot of new position)
    QMat bmat;                      // s x s
    QVec bvec;
    FieldElem alpha;                // single translation, on the last slot
    Rat lambda;
};
NormalizedGmt normalize_gmt(const std::vector<GroupValue>& values, const RawGmt& raw,
                            const FieldPtr& field, const SquarefreeBasis& basis);

} // namespace mono

#endif
