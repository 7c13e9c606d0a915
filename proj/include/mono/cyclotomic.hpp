#ifndef MONO_CYCLOTOMIC_HPP
#define MONO_CYCLOTOMIC_HPP

#include <mono/rational.hpp>
#include <mono/matrix.hpp>

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace mono {

// Element of Q(zeta_m) as a rational coordinate vector in the power basis
// of the m-th cyclotomic polynomial.  Elements are plain data; arithmetic
// goes through the owning CycloField.
struct FieldElem {
    QVec c;
    bool operator==(const FieldElem& o) const { return c == o.c; }
};

class CycloField;
using FieldPtr = std::shared_ptr<const CycloField>;

class CycloField : public std::enable_shared_from_this<CycloField> {
public:
    // moduli are required to be divisible by 4 so that i = zeta_4 exists
    static FieldPtr make(long modulus);

    long modulus() const { return m_; }
    std::size_t degree() const { return phi_; }

    FieldElem zero() const;
    FieldElem one() const;
    FieldElem from_rat(const Rat& r) const;
    FieldElem zeta_pow(long j) const;   // zeta_m^j, j arbitrary integer

    bool is_zero(const FieldElem& a) const;
    std::optional<Rat> as_rational(const FieldElem& a) const;

    FieldElem add(const FieldElem& a, const FieldElem& b) const;
    FieldElem sub(const FieldElem& a, const FieldElem& b) const;
    FieldElem neg(const FieldElem& a) const;
    FieldElem mul(const FieldElem& a, const FieldElem& b) const;
    FieldElem mul_rat(const FieldElem& a, const Rat& r) const;
    FieldElem inv(const FieldElem& a) const;

    // c = rho * zeta_m^j with rho a positive rational, when possible
    std::optional<std::pair<Rat, long>> unit_normal(const FieldElem& a) const;

    // c^e for rational e; throws FieldExtensionRequired (with the modulus
    // that would work) when the result leaves Q(zeta_m)
    FieldElem pow_rational(const FieldElem& a, const Rat& e) const;

    // embed an element of a subfield Q(zeta_sub) (sub->modulus() | m_)
    FieldElem embed(const CycloField& sub, const FieldElem& a) const;

    std::string to_string(const FieldElem& a) const;

private:
    explicit CycloField(long m);

    QVec reduce(QVec poly) const;   // modulo the cyclotomic polynomial

    long m_;
    std::size_t phi_;
    QVec minpoly_;   // monic, degree phi_, coefficient list low to high
};

// smallest common field containing both
FieldPtr join_fields(const FieldPtr& a, const FieldPtr& b);

} // namespace mono

#endif
