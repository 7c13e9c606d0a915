#ifndef MONO_TORIC_HPP
#define MONO_TORIC_HPP

#include <mono/matrix.hpp>
#include <mono/valgroup.hpp>

#include <cstddef>
#include <vector>

namespace mono {

// Finite set of exponent vectors generating a monomial ideal, kept as a
// minimal generating set (pairwise incomparable under componentwise <=).
class MonomialIdeal {
public:
    MonomialIdeal(std::size_t nvars, std::vector<QVec> generators);

    std::size_t nvars() const { return nvars_; }
    const std::vector<QVec>& generators() const { return gens_; }
    bool is_principal() const { return gens_.size() <= 1; }

    void minimalize();

private:
    std::size_t nvars_;
    std::vector<QVec> gens_;
};

// Blow-up of the coordinate subvariety Z(x_i, x_j) followed by selection
// of the chart in which the divider variable is `chart` (one of i, j).
// In the chart of x_i:  x_i = x_i', x_j = x_i' * x_j'.
struct ElementaryBlowup {
    std::size_t i, j, chart;
};

// Ordered product of elementary blow-ups with its cumulative unimodular
// exponent matrix A (old variables as monomials in new ones).
class TransformSeq {
public:
    explicit TransformSeq(std::size_t nvars) : nvars_(nvars) {}

    std::size_t nvars() const { return nvars_; }
    const std::vector<ElementaryBlowup>& steps() const { return steps_; }
    bool empty() const { return steps_.empty(); }
    std::size_t size() const { return steps_.size(); }

    void push(const ElementaryBlowup& b);
    void append(const TransformSeq& other);

    IMat matrix() const;
    Int det() const;

    // monomial exponent vector in old coordinates -> new coordinates
    QVec transform_exponent(QVec e) const;
    // values of the new coordinate variables from the old ones
    std::vector<GroupValue> transform_values(std::vector<GroupValue> w) const;

private:
    std::size_t nvars_;
    std::vector<ElementaryBlowup> steps_;
};

struct PerronResult {
    TransformSeq seq;
    std::vector<GroupValue> final_values;
    // the dependent slot ends with value zero; its residue must be
    // requested from the series layer by the caller
    bool residue_request = true;
};

// Lemma-25 engine: given strictly positive rationally independent values
// w_1..w_s and a dependent w_{s+1} >= 0 with the explicit rational
// dependence w_{s+1} = sum dependence[i] * w_i, produce a composition of
// elementary blow-ups after which the first s values stay positive and
// the last becomes zero.
PerronResult perron(const std::vector<GroupValue>& w, const QVec& dependence,
                    const SquarefreeBasis& basis);

struct PrincipalizeResult {
    TransformSeq seq;
    QVec gen;   // transform of the minimal-value generator
};

// Lemma-21 engine: monomial SGMT after which the ideal is principal.
// Chart selection divides by the variable of smaller value.
PrincipalizeResult principalize(const MonomialIdeal& ideal,
                                const std::vector<GroupValue>& weights,
                                const SquarefreeBasis& basis);

struct MakeNonnegResult {
    TransformSeq seq;
    QVec b_new;   // componentwise nonnegative transform of b
};

// Lemma-26 engine: make a Laurent monomial exponent vector nonnegative,
// assuming its pullback exponent b*C is already componentwise >= 0.
MakeNonnegResult make_nonneg(const QVec& b, const QMat& c,
                             const std::vector<GroupValue>& x_weights,
                             const SquarefreeBasis& basis);

struct ModuleGenerators {
    std::vector<IVec> h_gens;    // Hilbert basis of {v in Z^r : vC >= 0}
    std::vector<QVec> i_gens;    // semigroup generators of G cap cone
    std::vector<QVec> m_gens;    // module generators of M_Lambda over H
    Int d;                       // common denominator of all coordinates
};

// Gordan-lemma computation for the module M_Lambda = P_Lambda cap G.
ModuleGenerators module_generators(const IMat& c, const IVec& lambda);

} // namespace mono

#endif
