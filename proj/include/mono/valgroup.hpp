#ifndef MONO_VALGROUP_HPP
#define MONO_VALGROUP_HPP

#include <mono/matrix.hpp>
#include <mono/rational.hpp>

#include <compare>
#include <optional>
#include <vector>

namespace mono {

// Fixed list of squarefree integers whose square roots, together with 1,
// span the coefficient space of value-group levels.  basis[0] is always 1.
class SquarefreeBasis {
public:
    explicit SquarefreeBasis(std::size_t k);
    explicit SquarefreeBasis(std::vector<long> entries);

    std::size_t size() const { return entries_.size(); }
    long entry(std::size_t j) const { return entries_[j]; }
    const std::vector<long>& entries() const { return entries_; }

private:
    std::vector<long> entries_;
};

// An exact real number of the form sum_j coords[j] * sqrt(basis[j]).
// Zero iff all coordinates vanish; the sign of a nonzero combination is
// decided by dyadic interval refinement.
class IrrComb {
public:
    IrrComb() = default;
    explicit IrrComb(QVec coords) : coords_(std::move(coords)) {}

    static IrrComb zero(std::size_t k) { return IrrComb(QVec(k, Rat(0))); }

    const QVec& coords() const { return coords_; }
    std::size_t dim() const { return coords_.size(); }
    bool is_zero() const;

    IrrComb operator+(const IrrComb& o) const;
    IrrComb operator-(const IrrComb& o) const;
    IrrComb operator-() const;
    IrrComb scaled(const Rat& f) const;

    bool operator==(const IrrComb& o) const { return coords_ == o.coords_; }

private:
    QVec coords_;
};

int sign(const IrrComb& a, const SquarefreeBasis& basis);

enum class Ordering { Less, Equal, Greater };

// Element of a totally ordered abelian group of finite rank d: a tuple of
// d level values compared lexicographically.
class GroupValue {
public:
    GroupValue() = default;
    explicit GroupValue(std::vector<IrrComb> levels) : levels_(std::move(levels)) {}

    static GroupValue zero(std::size_t rank, std::size_t k);

    std::size_t rank() const { return levels_.size(); }
    const IrrComb& level(std::size_t i) const { return levels_[i]; }
    const std::vector<IrrComb>& levels() const { return levels_; }
    bool is_zero() const;

    GroupValue operator+(const GroupValue& o) const;
    GroupValue operator-(const GroupValue& o) const;
    GroupValue scaled(const Rat& f) const;

    bool operator==(const GroupValue& o) const { return levels_ == o.levels_; }

    // flat coordinate vector, length rank * k
    QVec flatten() const;

private:
    std::vector<IrrComb> levels_;
};

Ordering compare(const GroupValue& a, const GroupValue& b, const SquarefreeBasis& basis);

inline bool value_positive(const GroupValue& v, const SquarefreeBasis& basis) {
    return compare(v, GroupValue::zero(v.rank(), v.levels().empty() ? 0 : v.level(0).dim()), basis) == Ordering::Greater;
}

// Nonzero rational vector lambda with sum lambda_i * values[i] = 0, if the
// values admit one.
std::optional<QVec> rational_relation(const std::vector<GroupValue>& values);

// Weights for the y-variables of a prepared pair: the first s are
// rationally independent, every later one depends rationally on them.
class WeightAssignment {
public:
    WeightAssignment() = default;
    WeightAssignment(SquarefreeBasis basis, std::size_t s, std::vector<GroupValue> weights);

    std::size_t nvars() const { return weights_.size(); }
    std::size_t s() const { return s_; }
    const SquarefreeBasis& basis() const { return basis_; }
    const GroupValue& weight(std::size_t j) const { return weights_[j]; }
    const std::vector<GroupValue>& weights() const { return weights_; }

    // rational coefficients of weight(j) over weights 0..s-1, for j >= s
    const QVec& dependence(std::size_t j) const;

    void set_weight(std::size_t j, GroupValue w);
    void swap_weights(std::size_t i, std::size_t j);

    // checks positivity, independence of the first s, dependence of the rest
    void check() const;

private:
    void recompute_dependence();

    SquarefreeBasis basis_{std::size_t(1)};
    std::size_t s_ = 0;
    std::vector<GroupValue> weights_;
    std::vector<QVec> dependence_;   // indexed j - s
};

// value of the monomial with exponent vector e under w
GroupValue monomial_value(const WeightAssignment& w, const QVec& e);
GroupValue monomial_value(const std::vector<GroupValue>& weights, const QVec& e);

} // namespace mono

#endif
