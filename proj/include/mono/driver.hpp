#ifndef MONO_DRIVER_HPP
#define MONO_DRIVER_HPP

#include <mono/prepared.hpp>

#include <optional>
#include <vector>

namespace mono {

// Final shape of the morphism: every x-variable is either a plain
// monomial in the y-variables or is identified with one of them.
struct MonomialForm {
    struct Entry {
        bool identified = false;
        std::size_t yindex = 0;   // 1-based, when identified
        QVec exponents;           // over the n y-variables, otherwise
        FieldElem coefficient;    // unit constant absorbed into the chart
    };
    std::vector<Entry> entries;                // one per x-variable
    std::vector<Transformation> certificate;
    std::size_t s = 0, r = 0, l = 0;
};

struct XScope {
    std::size_t t;   // series lives in x_1..x_t, r <= t <= r+l
};
struct YScope {
    std::size_t t;   // series lives in y_1..y_t, s+l <= t <= n
};

struct MonomializeResult {
    PreparedPair pair;
    bool increased = false;       // bailed out early with a strictly larger type
    QVec d;                       // exponent vector of the monomial part
    TruncatedSeries unit;         // unit cofactor, in the final coordinates
    TruncatedSeries transformed;  // the image of g in the final coordinates
};

MonomializeResult monomialize_series(const PreparedPair& p, const TruncatedSeries& g,
                                     XScope scope);
MonomializeResult monomialize_series(const PreparedPair& p, const TruncatedSeries& g,
                                     YScope scope);

enum class TailKind { Zero, Monomial, MonomialTimesVar };

struct SplitResult {
    PreparedPair pair;
    bool increased = false;
    TruncatedSeries algebraic_part;
    TailKind tail = TailKind::Zero;
    QVec tail_monomial;        // y-exponents
    std::size_t tail_var = 0;  // 1-based y-index for the Lemma-5 shape
};

SplitResult split_algebraic(const PreparedPair& p, const TruncatedSeries& g, std::size_t t);

enum class StepProgress { TypeIncreased, Finalized };

struct StepResult {
    PreparedPair pair;
    StepProgress progress;
    std::size_t finalized_index = 0;   // x-index that became a pure monomial
};

// one strict-progress pass on the first unfinished x-variable
StepResult step(const PreparedPair& p);

struct RunResult {
    PreparedPair pair;
    MonomialForm form;
};

// iterate step until every x-variable is monomial or identified
RunResult run(const PreparedPair& p, long max_steps = 0);

// no nonzero polynomial of total degree <= degree_bound in the presented
// x-images maps to zero modulo degree (degree_bound * max-order + 1)
bool check_injectivity(const PreparedPair& p, long degree_bound);

// replay a certificate by raw substitution; returns true or throws
// VerifyFailed with the first failing stage
bool verify(const PreparedPair& p0, const std::vector<Transformation>& cert);

MonomialForm monomial_form_of(const PreparedPair& p);

} // namespace mono

#endif
