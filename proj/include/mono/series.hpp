#ifndef MONO_SERIES_HPP
#define MONO_SERIES_HPP

#include <mono/cyclotomic.hpp>
#include <mono/matrix.hpp>
#include <mono/rational.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace mono {

// Multivariate power series with exponents in (1/D) * N^nvars and
// coefficients in a cyclotomic field, truncated at a total-degree bound.
// Terms of total degree >= trunc are discarded everywhere, so all
// arithmetic is exact modulo degree trunc.
class TruncatedSeries {
public:
    using TermMap = std::map<QVec, FieldElem>;

    TruncatedSeries() = default;
    TruncatedSeries(std::size_t nvars, FieldPtr field, Rat trunc);

    static TruncatedSeries zero(std::size_t nvars, FieldPtr field, Rat trunc);
    static TruncatedSeries constant(std::size_t nvars, FieldPtr field, Rat trunc,
                                    const FieldElem& c);
    static TruncatedSeries monomial(std::size_t nvars, FieldPtr field, Rat trunc,
                                    const QVec& exps, const FieldElem& c);
    static TruncatedSeries variable(std::size_t nvars, FieldPtr field, Rat trunc,
                                    std::size_t idx);

    std::size_t nvars() const { return nvars_; }
    const FieldPtr& field() const { return field_; }
    const Rat& trunc() const { return trunc_; }
    const TermMap& terms() const { return terms_; }
    Int denom() const;   // lcm of exponent denominators

    bool is_zero() const { return terms_.empty(); }
    // minimal total degree in the support; nullopt for the zero series
    std::optional<Rat> ord() const;
    bool is_unit() const;
    FieldElem constant_term() const;
    FieldElem coeff(const QVec& e) const;

    void set_term(const QVec& e, const FieldElem& c);
    void add_term(const QVec& e, const FieldElem& c);

    TruncatedSeries operator+(const TruncatedSeries& o) const;
    TruncatedSeries operator-(const TruncatedSeries& o) const;
    TruncatedSeries operator-() const;
    TruncatedSeries operator*(const TruncatedSeries& o) const;
    TruncatedSeries scaled(const FieldElem& c) const;
    TruncatedSeries scaled_rat(const Rat& r) const;

    bool equals(const TruncatedSeries& o) const;

    // series with the same coefficients over a larger field
    TruncatedSeries promoted(const FieldPtr& f) const;
    // tighter (or equal) truncation bound
    TruncatedSeries truncated(const Rat& bound) const;

    TruncatedSeries derivative(std::size_t var) const;
    // coefficient of var^k as a series in the remaining variables
    // (returned with the same nvars, exponent of var forced to zero)
    TruncatedSeries coeff_in_var(std::size_t var, const Rat& k) const;
    // substitute 0 for every variable except var
    TruncatedSeries restrict_to_var(std::size_t var) const;
    // substitute 0 for var
    TruncatedSeries set_var_zero(std::size_t var) const;
    // largest k with var^k dividing the series (0 for the zero series)
    Rat var_multiplicity(std::size_t var) const;
    // divide by the monomial x^e; throws unless every exponent dominates e
    TruncatedSeries divide_monomial(const QVec& e) const;

    std::string to_string(const std::vector<std::string>& names = {}) const;

private:
    void check_compatible(const TruncatedSeries& o) const;

    std::size_t nvars_ = 0;
    FieldPtr field_;
    Rat trunc_ = 0;
    TermMap terms_;
};

// One variable's image under a substitution: either a GMT-shaped product
// of translated variable powers, or a declared translation plus a series
// of order >= 1.
struct SubstFactor {
    std::size_t var;
    Rat exp;
    FieldElem alpha;   // zero for a plain monomial factor
};

class Assignment {
public:
    enum class Kind { Product, Series };

    static Assignment product(std::vector<SubstFactor> factors);
    static Assignment series(TruncatedSeries body);                     // no translation
    static Assignment series(FieldElem translation, TruncatedSeries body);

    Kind kind() const { return kind_; }
    const std::vector<SubstFactor>& factors() const { return factors_; }
    const TruncatedSeries& body() const { return body_; }
    const FieldElem& translation() const { return translation_; }
    bool has_translation() const { return has_translation_; }

private:
    Kind kind_ = Kind::Series;
    std::vector<SubstFactor> factors_;
    TruncatedSeries body_;
    FieldElem translation_;
    bool has_translation_ = false;
};

// Per-variable assignments mapping series on nvars_in variables into
// series on nvars_out variables.
class Substitution {
public:
    Substitution(std::size_t nvars_in, std::size_t nvars_out, FieldPtr field, Rat trunc);

    static Substitution identity(std::size_t nvars, FieldPtr field, Rat trunc);

    void set(std::size_t var, Assignment a);
    bool assigned(std::size_t var) const;
    const Assignment& at(std::size_t var) const;

    std::size_t nvars_in() const { return nvars_in_; }
    std::size_t nvars_out() const { return nvars_out_; }
    const FieldPtr& field() const { return field_; }
    const Rat& trunc() const { return trunc_; }

private:
    std::size_t nvars_in_, nvars_out_;
    FieldPtr field_;
    Rat trunc_;
    std::vector<std::optional<Assignment>> assignments_;
};

TruncatedSeries substitute(const TruncatedSeries& g, const Substitution& sigma);

// u^lambda for a unit series u, by binomial expansion
TruncatedSeries unit_pow(const TruncatedSeries& u, const Rat& lambda);

// multiplicative inverse of a unit series
TruncatedSeries unit_inverse(const TruncatedSeries& u);

// order of F(0, ..., 0, x_var); nullopt is the infinity marker
std::optional<Rat> ord_in_last(const TruncatedSeries& f, std::size_t var);

struct TschirnhausResult {
    TruncatedSeries phi;    // series in the other variables, order >= 1
    TruncatedSeries fbar;   // F with var replaced by var + phi
};

// change of the distinguished variable killing the degree-(t-1) coefficient
TschirnhausResult tschirnhaus(const TruncatedSeries& f, std::size_t var, long t);

FieldElem residue(const TruncatedSeries& u);

} // namespace mono

#endif
