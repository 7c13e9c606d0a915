#include <mono/valgroup.hpp>
#include <mono/error.hpp>

#include <algorithm>

namespace mono {

namespace {

bool squarefree(long n) {
    for (long p = 2; p * p <= n; ++p)
        if (n % (p * p) == 0) return false;
    return true;
}

// integer square root
Int isqrt(const Int& n) {
    if (n < 0) throw error(ErrorCode::Internal, "isqrt of negative");
    if (n < 2) return n;
    Int x = n, y = (x + 1) / 2;
    while (y < x) {
        x = y;
        y = (x + n / x) / 2;
    }
    return x;
}

} // namespace

SquarefreeBasis::SquarefreeBasis(std::size_t k) {
    entries_.push_back(1);
    long c = 2;
    while (entries_.size() < k) {
        if (squarefree(c)) entries_.push_back(c);
        ++c;
    }
}

SquarefreeBasis::SquarefreeBasis(std::vector<long> entries) : entries_(std::move(entries)) {
    if (entries_.empty() || entries_[0] != 1)
        throw error(ErrorCode::Internal, "squarefree basis must start with 1");
    for (std::size_t j = 1; j < entries_.size(); ++j) {
        if (entries_[j] <= 1 || !squarefree(entries_[j]))
            throw error(ErrorCode::Internal, "basis entry not squarefree > 1");
        for (std::size_t i = 1; i < j; ++i)
            if (entries_[i] == entries_[j])
                throw error(ErrorCode::Internal, "duplicate basis entry");
    }
}

bool IrrComb::is_zero() const {
    return std::all_of(coords_.begin(), coords_.end(), [](const Rat& c) { return c == 0; });
}

IrrComb IrrComb::operator+(const IrrComb& o) const {
    QVec c(coords_);
    for (std::size_t j = 0; j < c.size(); ++j) c[j] += o.coords_[j];
    return IrrComb(std::move(c));
}

IrrComb IrrComb::operator-(const IrrComb& o) const {
    QVec c(coords_);
    for (std::size_t j = 0; j < c.size(); ++j) c[j] -= o.coords_[j];
    return IrrComb(std::move(c));
}

IrrComb IrrComb::operator-() const {
    QVec c(coords_);
    for (auto& x : c) x = -x;
    return IrrComb(std::move(c));
}

IrrComb IrrComb::scaled(const Rat& f) const {
    QVec c(coords_);
    for (auto& x : c) x *= f;
    return IrrComb(std::move(c));
}

// Exact sign.  Zero is decided coordinatewise (square roots of distinct
// squarefree integers are linearly independent over Q); otherwise we
// enclose each sqrt in a dyadic interval and refine until the sum of
// intervals excludes zero.  A nonzero combination is bounded away from
// zero, so this terminates.
int sign(const IrrComb& a, const SquarefreeBasis& basis) {
    if (a.dim() != basis.size())
        throw error(ErrorCode::RankMismatch, "combination/basis size mismatch");
    if (a.is_zero()) return 0;

    for (unsigned prec = 8;; prec *= 2) {
        if (prec > 1u << 20)
            throw error(ErrorCode::Internal, "sign refinement runaway");
        Int scale = Int(1) << prec;
        Rat lo(0), hi(0);
        for (std::size_t j = 0; j < a.dim(); ++j) {
            const Rat& c = a.coords()[j];
            if (c == 0) continue;
            // sqrt(d) in [s/2^p, (s+1)/2^p] with s = isqrt(d * 4^p)
            Int s = isqrt(Int(basis.entry(j)) * scale * scale);
            Rat rlo(s, scale), rhi(s + 1, scale);
            if (c > 0) {
                lo += c * rlo;
                hi += c * rhi;
            } else {
                lo += c * rhi;
                hi += c * rlo;
            }
        }
        if (lo > 0) return 1;
        if (hi < 0) return -1;
    }
}

GroupValue GroupValue::zero(std::size_t rank, std::size_t k) {
    return GroupValue(std::vector<IrrComb>(rank, IrrComb::zero(k)));
}

bool GroupValue::is_zero() const {
    return std::all_of(levels_.begin(), levels_.end(), [](const IrrComb& l) { return l.is_zero(); });
}

GroupValue GroupValue::operator+(const GroupValue& o) const {
    if (rank() != o.rank()) throw error(ErrorCode::RankMismatch, "value rank mismatch");
    std::vector<IrrComb> l;
    l.reserve(levels_.size());
    for (std::size_t i = 0; i < levels_.size(); ++i) l.push_back(levels_[i] + o.levels_[i]);
    return GroupValue(std::move(l));
}

GroupValue GroupValue::operator-(const GroupValue& o) const {
    if (rank() != o.rank()) throw error(ErrorCode::RankMismatch, "value rank mismatch");
    std::vector<IrrComb> l;
    l.reserve(levels_.size());
    for (std::size_t i = 0; i < levels_.size(); ++i) l.push_back(levels_[i] - o.levels_[i]);
    return GroupValue(std::move(l));
}

GroupValue GroupValue::scaled(const Rat& f) const {
    std::vector<IrrComb> l;
    l.reserve(levels_.size());
    for (const auto& lev : levels_) l.push_back(lev.scaled(f));
    return GroupValue(std::move(l));
}

QVec GroupValue::flatten() const {
    QVec v;
    for (const auto& lev : levels_)
        v.insert(v.end(), lev.coords().begin(), lev.coords().end());
    return v;
}

Ordering compare(const GroupValue& a, const GroupValue& b, const SquarefreeBasis& basis) {
    if (a.rank() != b.rank())
        throw error(ErrorCode::RankMismatch, "comparing values of different rank");
    for (std::size_t i = 0; i < a.rank(); ++i) {
        int s = sign(a.level(i) - b.level(i), basis);
        if (s > 0) return Ordering::Greater;
        if (s < 0) return Ordering::Less;
    }
    return Ordering::Equal;
}

std::optional<QVec> rational_relation(const std::vector<GroupValue>& values) {
    if (values.empty()) return std::nullopt;
    QMat rows;
    for (const auto& v : values) {
        if (v.rank() != values.front().rank())
            throw error(ErrorCode::RankMismatch, "relation over mixed ranks");
        rows.push_back(v.flatten());
    }
    return left_kernel_vector(rows);
}

WeightAssignment::WeightAssignment(SquarefreeBasis basis, std::size_t s,
                                   std::vector<GroupValue> weights)
    : basis_(std::move(basis)), s_(s), weights_(std::move(weights)) {
    recompute_dependence();
}

const QVec& WeightAssignment::dependence(std::size_t j) const {
    if (j < s_ || j >= weights_.size())
        throw error(ErrorCode::Internal, "dependence index out of range");
    return dependence_[j - s_];
}

void WeightAssignment::set_weight(std::size_t j, GroupValue w) {
    weights_[j] = std::move(w);
    recompute_dependence();
}

void WeightAssignment::swap_weights(std::size_t i, std::size_t j) {
    std::swap(weights_[i], weights_[j]);
    recompute_dependence();
}

void WeightAssignment::recompute_dependence() {
    dependence_.clear();
    if (weights_.size() < s_) return;
    QMat rows;
    for (std::size_t i = 0; i < s_; ++i) rows.push_back(weights_[i].flatten());
    for (std::size_t j = s_; j < weights_.size(); ++j) {
        auto sol = solve_left(rows, weights_[j].flatten());
        if (!sol) {
            dependence_.emplace_back();   // genuinely independent; check() rejects
            continue;
        }
        dependence_.push_back(*sol);
    }
}

void WeightAssignment::check() const {
    for (std::size_t j = 0; j < weights_.size(); ++j)
        if (!value_positive(weights_[j], basis_))
            throw error(ErrorCode::InvalidPreparedForm,
                        "weight " + std::to_string(j + 1) + " is not strictly positive");
    std::vector<GroupValue> head(weights_.begin(), weights_.begin() + s_);
    if (!head.empty() && rational_relation(head))
        throw error(ErrorCode::NotIndependent,
                    "weights 1.." + std::to_string(s_) + " admit a rational relation");
    for (std::size_t j = s_; j < weights_.size(); ++j)
        if (dependence_[j - s_].empty())
            throw error(ErrorCode::NotDependent,
                        "weight " + std::to_string(j + 1) +
                        " is rationally independent of the first " + std::to_string(s_));
}

GroupValue monomial_value(const std::vector<GroupValue>& weights, const QVec& e) {
    if (e.size() != weights.size())
        throw error(ErrorCode::RankMismatch, "exponent length != variable count");
    if (weights.empty()) throw error(ErrorCode::Internal, "no weights");
    GroupValue acc = GroupValue::zero(weights[0].rank(), weights[0].level(0).dim());
    for (std::size_t j = 0; j < e.size(); ++j) {
        if (e[j] == 0) continue;
        acc = acc + weights[j].scaled(e[j]);
    }
    return acc;
}

GroupValue monomial_value(const WeightAssignment& w, const QVec& e) {
    return monomial_value(w.weights(), e);
}

} // namespace mono
