#include <mono/prepared.hpp>
#include <mono/error.hpp>

#include <algorithm>
#include <sstream>

namespace mono {

namespace {

QVec irow(const IMat& m, std::size_t i) {
    QVec v;
    for (const auto& x : m[i]) v.push_back(Rat(x));
    return v;
}

bool natural_entries(const QMat& m) {
    for (const auto& row : m)
        for (const auto& x : row)
            if (!is_integer(x) || x < 0) return false;
    return true;
}

IMat qmat_to_imat(const QMat& m) {
    IMat out(m.size());
    for (std::size_t i = 0; i < m.size(); ++i)
        for (const auto& x : m[i]) {
            if (!is_integer(x))
                throw error(ErrorCode::Internal, "expected integer matrix");
            out[i].push_back(num(x));
        }
    return out;
}

} // namespace

std::tuple<std::size_t, std::size_t, std::size_t> PreparedPair::validate() const {
    auto fail = [](const std::string& clause) -> void {
        throw error(ErrorCode::InvalidPreparedForm, clause);
    };
    if (n == 0 || m == 0) fail("variable counts must be positive");
    if (s > n || r > m) fail("type exceeds variable counts");
    if (s + l > n) fail("s + l exceeds n");
    if (r + l > m) fail("r + l exceeds m");
    if (r > s) fail("r exceeds s, so C cannot have rank r");
    if (C.size() != r) fail("C must have r rows");
    for (const auto& row : C) {
        if (row.size() != s) fail("C must have s columns");
        for (const auto& e : row)
            if (e < 0) fail("C must have natural entries");
    }
    if (r > 0 && qmat_rank(imat_to_q(C)) != r) fail("rank C = r fails");
    if (weights.nvars() != n) fail("weight count differs from n");
    if (weights.s() != s) fail("weight assignment s differs from pair s");
    try {
        weights.check();
    } catch (const EngineError& e) {
        fail(std::string("weights: ") + e.what());
    }
    for (std::size_t i = r + l + 1; i <= m; ++i)
        if (!xseries.count(i)) fail("missing x-series for x_" + std::to_string(i));
    for (const auto& [i, ser] : xseries) {
        if (i <= r + l || i > m) fail("x-series index out of range");
        if (ser.nvars() != n) fail("x-series arity differs from n");
        if (auto o = ser.ord(); o && *o < 1) fail("x-series must have order >= 1");
        if (ser.denom() != 1) fail("x-series may not carry fractional exponents");
    }
    return {s, r, l};
}

std::vector<GroupValue> PreparedPair::x_values() const {
    std::vector<GroupValue> vals;
    for (std::size_t i = 0; i < r; ++i) {
        QVec e(n, Rat(0));
        for (std::size_t j = 0; j < s; ++j) e[j] = Rat(C[i][j]);
        vals.push_back(monomial_value(weights, e));
    }
    return vals;
}

GroupValue PreparedPair::x_value(std::size_t i) const {
    if (i == 0 || i > r + l)
        throw error(ErrorCode::Internal, "x_value: index must lie in 1..r+l");
    if (i <= r) {
        QVec e(n, Rat(0));
        for (std::size_t j = 0; j < s; ++j) e[j] = Rat(C[i - 1][j]);
        return monomial_value(weights, e);
    }
    return weights.weight(s + (i - r) - 1);
}

TruncatedSeries PreparedPair::x_image(std::size_t i) const {
    if (i == 0 || i > m)
        throw error(ErrorCode::Internal, "x_image: index out of range");
    if (i <= r) {
        QVec e(n, Rat(0));
        for (std::size_t j = 0; j < s; ++j) e[j] = Rat(C[i - 1][j]);
        return TruncatedSeries::monomial(n, field, trunc, e, field->one());
    }
    if (i <= r + l)
        return TruncatedSeries::variable(n, field, trunc, s + (i - r) - 1);
    return xseries.at(i);
}

TruncatedSeries PreparedPair::pull_to_y(const TruncatedSeries& xser) const {
    if (xser.nvars() != m)
        throw error(ErrorCode::Internal, "pull_to_y expects a series over the m x-variables");
    Substitution sub(m, n, field, trunc);
    for (std::size_t i = 1; i <= m; ++i) {
        if (i <= r) {
            std::vector<SubstFactor> factors;
            for (std::size_t j = 0; j < s; ++j)
                if (C[i - 1][j] != 0)
                    factors.push_back(SubstFactor{j, Rat(C[i - 1][j]), field->zero()});
            if (factors.empty())
                factors.push_back(SubstFactor{0, Rat(0), field->zero()});
            sub.set(i - 1, Assignment::product(std::move(factors)));
        } else if (i <= r + l) {
            sub.set(i - 1, Assignment::product(
                               {SubstFactor{s + (i - r) - 1, Rat(1), field->zero()}}));
        } else {
            sub.set(i - 1, Assignment::series(xseries.at(i)));
        }
    }
    return substitute(xser, sub);
}

PreparedPair PreparedPair::with_field(const FieldPtr& f) const {
    PreparedPair q = *this;
    q.field = f;
    for (auto& [i, ser] : q.xseries) ser = ser.promoted(f);
    return q;
}

// ---------------------------------------------------------------------
// decomposition

IMat saturation_lattice(const PreparedPair& p) {
    // (Q^r C) cap Z^s: primitive basis via the Smith form of C
    if (p.r == 0) return IMat{};
    auto snf = smith_normal_form(p.C);
    // rows of V^{-1}?  U C V = D  =>  row space of C = row space of D V^{-1}.
    // The first r rows of V^{-1} span the saturation.  V is unimodular, so
    // invert exactly over Q and read the integer rows.
    auto vinv = qmat_inverse(imat_to_q(snf.v));
    if (!vinv) throw error(ErrorCode::Internal, "V not invertible");
    IMat rows;
    for (std::size_t i = 0; i < p.r; ++i) {
        IVec row;
        for (const auto& x : (*vinv)[i]) {
            if (!is_integer(x)) throw error(ErrorCode::Internal, "V^{-1} not integral");
            row.push_back(num(x));
        }
        rows.push_back(row);
    }
    return hnf_rows(rows);
}

IVec class_key(const PreparedPair&, const IMat& lattice, const IVec& alpha) {
    return hnf_reduce(lattice, alpha);
}

const TruncatedSeries* ClassDecomposition::component(const IVec& key) const {
    for (const auto& [k, h] : components)
        if (k == key) return &h;
    return nullptr;
}

ClassDecomposition decompose(const TruncatedSeries& g, const PreparedPair& p) {
    for (const auto& [e, c] : g.terms())
        for (std::size_t j = p.s + p.l; j < p.n; ++j)
            if (e[j] != 0)
                throw error(ErrorCode::Internal,
                            "decompose: series must involve only y_1..y_{s+l}");
    ClassDecomposition out;
    out.lattice = saturation_lattice(p);
    for (const auto& [e, c] : g.terms()) {
        IVec alpha;
        for (std::size_t j = 0; j < p.s; ++j) {
            if (!is_integer(e[j]))
                throw error(ErrorCode::NotRepresentable,
                            "decompose: fractional exponent in the first s variables");
            alpha.push_back(num(e[j]));
        }
        IVec key = hnf_reduce(out.lattice, alpha);
        TruncatedSeries* slot = nullptr;
        for (auto& [k, h] : out.components)
            if (k == key) { slot = &h; break; }
        if (!slot) {
            out.components.emplace_back(key,
                                        TruncatedSeries::zero(p.n, g.field(), g.trunc()));
            slot = &out.components.back().second;
        }
        slot->add_term(e, c);
    }
    std::sort(out.components.begin(), out.components.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    return out;
}

bool is_algebraic(const TruncatedSeries& g, const PreparedPair& p) {
    QMat cq = imat_to_q(p.C);
    for (const auto& [e, c] : g.terms()) {
        for (std::size_t j = p.s + p.l; j < p.n; ++j)
            if (e[j] != 0)
                throw error(ErrorCode::Internal,
                            "is_algebraic: series must involve only y_1..y_{s+l}");
        QMat stacked = cq;
        QVec row(p.s, Rat(0));
        for (std::size_t j = 0; j < p.s; ++j) row[j] = e[j];
        stacked.push_back(row);
        if (qmat_rank(stacked) != p.r) return false;
    }
    return true;
}

// ---------------------------------------------------------------------
// apply

namespace {

// substitution sending each of the first k old y-variables to the
// monomial given by the rows of B (an SGMT matrix over those variables)
Substitution monomial_y_subst(const PreparedPair& p, const IMat& b, std::size_t k) {
    Substitution sub = Substitution::identity(p.n, p.field, p.trunc);
    for (std::size_t i = 0; i < k; ++i) {
        std::vector<SubstFactor> factors;
        for (std::size_t j = 0; j < k; ++j)
            if (b[i][j] != 0)
                factors.push_back(SubstFactor{j, Rat(b[i][j]), p.field->zero()});
        if (factors.empty()) factors.push_back(SubstFactor{0, Rat(0), p.field->zero()});
        sub.set(i, Assignment::product(std::move(factors)));
    }
    return sub;
}

void apply_y_subst(PreparedPair& p, const Substitution& sub) {
    for (auto& [i, ser] : p.xseries) ser = substitute(ser, sub);
}

// min-support value of a series under the current weights, used for the
// flagged assignment of renamed coordinates
GroupValue min_support_value(const PreparedPair& p, const TruncatedSeries& f) {
    const auto& basis = p.weights.basis();
    bool have = false;
    GroupValue best;
    for (const auto& [e, c] : f.terms()) {
        GroupValue v = monomial_value(p.weights, e);
        if (!have || compare(v, best, basis) == Ordering::Less) {
            best = v;
            have = true;
        }
    }
    if (!have)
        throw error(ErrorCode::TruncationExhausted,
                    "renamed coordinate has no surviving terms below the truncation bound");
    return best;
}

void update_weights_from_seq(PreparedPair& p, const TransformSeq& seq, std::size_t count,
                             std::size_t extra_slot /* n means none */) {
    // seq acts on slots 0..count-1 (plus possibly slot count = extra)
    std::vector<GroupValue> w;
    for (std::size_t i = 0; i < count; ++i) w.push_back(p.weights.weight(i));
    if (extra_slot < p.n) w.push_back(p.weights.weight(extra_slot));
    w = seq.transform_values(std::move(w));
    std::vector<GroupValue> all = p.weights.weights();
    for (std::size_t i = 0; i < count; ++i) all[i] = w[i];
    if (extra_slot < p.n) all[extra_slot] = w[count];
    p.weights = WeightAssignment(p.weights.basis(), p.s, std::move(all));
}

void set_weight_slot(PreparedPair& p, std::size_t slot, const GroupValue& w) {
    std::vector<GroupValue> all = p.weights.weights();
    all[slot] = w;
    p.weights = WeightAssignment(p.weights.basis(), p.s, std::move(all));
}

void check_type_monotone(const PreparedPair& before, const PreparedPair& after) {
    if (after.s < before.s || after.r < before.r ||
        after.r + after.l < before.r + before.l)
        throw error(ErrorCode::InvalidTransformation,
                    "transformation decreased the type (s, r, l)");
}

void update_c(PreparedPair& p, const QMat& a_inv_c_b) {
    if (!natural_entries(a_inv_c_b))
        throw error(ErrorCode::InvalidTransformation,
                    "transformed exponent matrix is not natural");
    p.C = qmat_to_imat(a_inv_c_b);
}

} // namespace


Substitution y_rewrite(const PreparedPair& p, const Transformation& t) {
    switch (t.type) {
    case 1:
    case 2:
    case 9:
        return monomial_y_subst(p, t.yseq.matrix(), p.s);
    case 3: {
        TruncatedSeries phi_y = p.pull_to_y(t.series);
        std::size_t slot = p.s + t.mbar - 1;
        Substitution sub = Substitution::identity(p.n, p.field, p.trunc);
        TruncatedSeries body =
            TruncatedSeries::variable(p.n, p.field, p.trunc, slot) + phi_y;
        sub.set(slot, Assignment::series(body));
        return sub;
    }
    case 4:
    case 6: {
        Substitution sub = Substitution::identity(p.n, p.field, p.trunc);
        for (std::size_t i = 0; i < p.s; ++i) {
            std::vector<SubstFactor> factors;
            for (std::size_t j = 0; j < p.s; ++j)
                if (t.ymat[i][j] != 0)
                    factors.push_back(SubstFactor{j, t.ymat[i][j], p.field->zero()});
            if (factors.empty())
                factors.push_back(SubstFactor{0, Rat(0), p.field->zero()});
            sub.set(i, Assignment::product(std::move(factors)));
        }
        std::size_t slot = p.s + t.mbar - 1;
        std::vector<SubstFactor> tf;
        for (std::size_t j = 0; j < p.s; ++j)
            if (t.yvec[j] != 0) tf.push_back(SubstFactor{j, t.yvec[j], p.field->zero()});
        tf.push_back(SubstFactor{slot, Rat(1), t.alpha});
        sub.set(slot, Assignment::product(std::move(tf)));
        return sub;
    }
    case 5: {
        // invert y_{s+mbar}(1) = F: solve F(y, w) = t for the old variable w
        // as a series in the others and the new variable t.  The new t lives
        // in the same slot, so only occurrences inside F are substituted.
        std::size_t slot = p.s + t.mbar - 1;
        const TruncatedSeries& f = t.series;
        TruncatedSeries t_series =
            TruncatedSeries::variable(p.n, f.field(), p.trunc, slot);
        TruncatedSeries fd = f.derivative(slot);
        TruncatedSeries g0 = TruncatedSeries::zero(p.n, f.field(), p.trunc);
        for (int iter = 0;; ++iter) {
            if (iter > 64)
                throw error(ErrorCode::IterationLimit, "type 5 inversion runaway");
            Substitution sub = Substitution::identity(p.n, f.field(), p.trunc);
            sub.set(slot, Assignment::series(g0));
            TruncatedSeries hv = substitute(f, sub) - t_series;
            if (hv.is_zero()) break;
            TruncatedSeries hdv = substitute(fd, sub);
            if (!hdv.is_unit())
                throw error(ErrorCode::InvalidTransformation,
                            "type 5 implicit derivative is not a unit");
            g0 = g0 - hv * unit_inverse(hdv);
        }
        Substitution sub = Substitution::identity(p.n, p.field, p.trunc);
        sub.set(slot, Assignment::series(g0.promoted(p.field)));
        return sub;
    }
    case 7: {
        std::size_t a = t.swap_i - 1, b = t.swap_j - 1;
        Substitution sub = Substitution::identity(p.n, p.field, p.trunc);
        sub.set(a, Assignment::product({SubstFactor{b, Rat(1), p.field->zero()}}));
        sub.set(b, Assignment::product({SubstFactor{a, Rat(1), p.field->zero()}}));
        return sub;
    }
    case 8: {
        // New coordinates are y_i(1) = y_i * gamma^{-c_i}; the old variables
        // rewrite as y_i = y_i(1) * gamma~^{c_i} with gamma~ the unit in the
        // new coordinates, found by fixed-point iteration.
        const TruncatedSeries& gamma = t.series;
        TruncatedSeries gt = gamma;
        for (int iter = 0;; ++iter) {
            if (iter > 64)
                throw error(ErrorCode::IterationLimit, "type 8 unit rewrite runaway");
            Substitution sub = Substitution::identity(p.n, p.field, p.trunc);
            bool trivial = true;
            for (std::size_t i = 0; i < p.s; ++i) {
                if (t.exps[i] == 0) continue;
                trivial = false;
                TruncatedSeries body =
                    TruncatedSeries::variable(p.n, p.field, p.trunc, i) *
                    unit_pow(gt, t.exps[i]);
                sub.set(i, Assignment::series(body));
            }
            if (trivial) break;
            TruncatedSeries next = substitute(gamma, sub);
            if (next.equals(gt)) break;
            gt = next;
        }
        Substitution sub = Substitution::identity(p.n, p.field, p.trunc);
        for (std::size_t i = 0; i < p.s; ++i) {
            if (t.exps[i] == 0) continue;
            TruncatedSeries body =
                TruncatedSeries::variable(p.n, p.field, p.trunc, i) *
                unit_pow(gt, t.exps[i]);
            sub.set(i, Assignment::series(body));
        }
        return sub;
    }
    default:
        return Substitution::identity(p.n, p.field, p.trunc);
    }
}

Substitution x_rewrite(const PreparedPair& p, const Transformation& t) {
    Substitution sub = Substitution::identity(p.m, p.field, p.trunc);
    switch (t.type) {
    case 2: {
        IMat a = t.xseq.matrix();
        for (std::size_t i = 0; i < p.r; ++i) {
            std::vector<SubstFactor> factors;
            for (std::size_t j = 0; j < p.r; ++j)
                if (a[i][j] != 0)
                    factors.push_back(SubstFactor{j, Rat(a[i][j]), p.field->zero()});
            if (factors.empty())
                factors.push_back(SubstFactor{0, Rat(0), p.field->zero()});
            sub.set(i, Assignment::product(std::move(factors)));
        }
        return sub;
    }
    case 3:
    case 10: {
        std::size_t slot = p.r + t.mbar - 1;
        TruncatedSeries body =
            TruncatedSeries::variable(p.m, p.field, p.trunc, slot) + t.series;
        sub.set(slot, Assignment::series(body));
        return sub;
    }
    case 4:
    case 9: {
        IMat afull = t.xseq.matrix();
        for (std::size_t i = 0; i < p.r; ++i) {
            std::vector<SubstFactor> factors;
            for (std::size_t j = 0; j < p.r; ++j)
                if (afull[i][j] != 0)
                    factors.push_back(SubstFactor{j, Rat(afull[i][j]), p.field->zero()});
            if (factors.empty())
                factors.push_back(SubstFactor{0, Rat(0), p.field->zero()});
            sub.set(i, Assignment::product(std::move(factors)));
        }
        std::size_t slot = p.r + t.mbar - 1;
        std::vector<SubstFactor> tf;
        for (std::size_t j = 0; j < p.r; ++j)
            if (afull[p.r][j] != 0)
                tf.push_back(SubstFactor{j, Rat(afull[p.r][j]), p.field->zero()});
        tf.push_back(SubstFactor{slot, Rat(1), t.alpha});
        sub.set(slot, Assignment::product(std::move(tf)));
        return sub;
    }
    default:
        return sub;
    }
}

PreparedPair apply(const PreparedPair& p, Transformation t) {
    p.validate();
    PreparedPair q = p;

    switch (t.type) {
    case 1: {
        if (t.yseq.nvars() != p.s)
            throw error(ErrorCode::InvalidTransformation, "type 1 needs an SGMT over s slots");
        IMat b = t.yseq.matrix();
        update_c(q, qmat_mul(imat_to_q(p.C), imat_to_q(b)));
        update_weights_from_seq(q, t.yseq, p.s, p.n);
        apply_y_subst(q, y_rewrite(p, t));
        break;
    }
    case 2: {
        if (t.xseq.nvars() != p.r || t.yseq.nvars() != p.s)
            throw error(ErrorCode::InvalidTransformation, "type 2 slot counts are wrong");
        IMat a = t.xseq.matrix();
        IMat b = t.yseq.matrix();
        auto ainv = qmat_inverse(imat_to_q(a));
        if (!ainv)
            throw error(ErrorCode::InvalidTransformation, "type 2 x-matrix is singular");
        update_c(q, qmat_mul(qmat_mul(*ainv, imat_to_q(p.C)), imat_to_q(b)));
        update_weights_from_seq(q, t.yseq, p.s, p.n);
        apply_y_subst(q, y_rewrite(p, t));
        break;
    }
    case 3: {
        if (t.mbar < 1 || t.mbar > p.l)
            throw error(ErrorCode::InvalidTransformation, "type 3 needs 1 <= mbar <= l");
        for (const auto& [e, c] : t.series.terms())
            for (std::size_t i = p.r + t.mbar - 1; i < p.m; ++i)
                if (e[i] != 0)
                    throw error(ErrorCode::InvalidTransformation,
                                "type 3 phi uses a forbidden x-variable");
        TruncatedSeries phi_y = p.pull_to_y(t.series);
        if (auto o = phi_y.ord(); o && *o < 1)
            throw error(ErrorCode::InvalidTransformation, "type 3 phi must have order >= 1");
        std::size_t slot = p.s + t.mbar - 1;
        apply_y_subst(q, y_rewrite(p, t));
        GroupValue w = t.has_new_weight
                           ? t.new_weight
                           : min_support_value(p, p.x_image(p.r + t.mbar) - phi_y);
        t.weight_flagged = !t.has_new_weight;
        set_weight_slot(q, slot, w);
        break;
    }
    case 4: {
        if (t.mbar < 1 || t.mbar > p.l)
            throw error(ErrorCode::InvalidTransformation, "type 4 needs 1 <= mbar <= l");
        if (t.ymat.size() != p.s || t.yvec.size() != p.s)
            throw error(ErrorCode::InvalidTransformation, "type 4 normal form has wrong shape");
        if (p.field->is_zero(t.alpha))
            throw error(ErrorCode::InvalidTransformation, "type 4 requires alpha != 0");
        if (t.xseq.nvars() != p.r + 1)
            throw error(ErrorCode::InvalidTransformation, "type 4 x-side needs r+1 slots");
        IMat afull = t.xseq.matrix();
        QMat amat(p.r, QVec(p.r, Rat(0)));
        for (std::size_t i = 0; i < p.r; ++i)
            for (std::size_t j = 0; j < p.r; ++j) amat[i][j] = Rat(afull[i][j]);
        auto ainv = qmat_inverse(amat);
        if (!ainv)
            throw error(ErrorCode::InvalidTransformation, "type 4 x-matrix is singular");
        update_c(q, qmat_mul(qmat_mul(*ainv, imat_to_q(p.C)), t.ymat));
        QVec avec(p.r, Rat(0));
        for (std::size_t j = 0; j < p.r; ++j) avec[j] = Rat(afull[p.r][j]);
        QVec match = qvec_mat(avec, imat_to_q(q.C));
        if (match != t.yvec)
            throw error(ErrorCode::InvalidTransformation,
                        "type 4 monomial matching a*C(1) = b fails");
        {
            auto binv = qmat_inverse(t.ymat);
            if (!binv)
                throw error(ErrorCode::InvalidTransformation, "type 4 y-matrix singular");
            std::vector<GroupValue> all = p.weights.weights();
            std::vector<GroupValue> neww(p.s, GroupValue{});
            for (std::size_t i = 0; i < p.s; ++i) {
                GroupValue acc = GroupValue::zero(all[0].rank(), all[0].level(0).dim());
                for (std::size_t j = 0; j < p.s; ++j)
                    if ((*binv)[i][j] != 0) acc = acc + all[j].scaled((*binv)[i][j]);
                neww[i] = acc;
            }
            for (std::size_t i = 0; i < p.s; ++i) all[i] = neww[i];
            q.weights = WeightAssignment(p.weights.basis(), p.s, std::move(all));
        }
        apply_y_subst(q, y_rewrite(p, t));
        if (!t.has_new_weight)
            throw error(ErrorCode::InvalidTransformation,
                        "type 4 must assign a value to the renamed coordinate");
        set_weight_slot(q, p.s + t.mbar - 1, t.new_weight);
        break;
    }
    case 5: {
        if (t.mbar <= p.l || p.s + t.mbar > p.n)
            throw error(ErrorCode::InvalidTransformation, "type 5 needs l < mbar <= n-s");
        std::size_t slot = p.s + t.mbar - 1;
        const TruncatedSeries& f = t.series;
        if (f.nvars() != p.n)
            throw error(ErrorCode::InvalidTransformation, "type 5 F arity mismatch");
        for (const auto& [e, c] : f.terms())
            for (std::size_t j = slot + 1; j < p.n; ++j)
                if (e[j] != 0)
                    throw error(ErrorCode::InvalidTransformation,
                                "type 5 F may only use y_1..y_{s+mbar}");
        auto o = ord_in_last(f, slot);
        if (!o || *o != 1)
            throw error(ErrorCode::InvalidTransformation,
                        "type 5 needs ord F(0,...,0,y_{s+mbar}) = 1");
        apply_y_subst(q, y_rewrite(p, t));
        GroupValue w = t.has_new_weight ? t.new_weight : min_support_value(p, f);
        t.weight_flagged = !t.has_new_weight;
        set_weight_slot(q, slot, w);
        break;
    }
    case 6: {
        if (t.mbar <= p.l || p.s + t.mbar > p.n)
            throw error(ErrorCode::InvalidTransformation, "type 6 needs l < mbar <= n-s");
        if (t.ymat.size() != p.s || t.yvec.size() != p.s)
            throw error(ErrorCode::InvalidTransformation, "type 6 normal form has wrong shape");
        update_c(q, qmat_mul(imat_to_q(p.C), t.ymat));
        {
            auto binv = qmat_inverse(t.ymat);
            if (!binv)
                throw error(ErrorCode::InvalidTransformation, "type 6 y-matrix singular");
            std::vector<GroupValue> all = p.weights.weights();
            std::vector<GroupValue> neww(p.s, GroupValue{});
            for (std::size_t i = 0; i < p.s; ++i) {
                GroupValue acc = GroupValue::zero(all[0].rank(), all[0].level(0).dim());
                for (std::size_t j = 0; j < p.s; ++j)
                    if ((*binv)[i][j] != 0) acc = acc + all[j].scaled((*binv)[i][j]);
                neww[i] = acc;
            }
            for (std::size_t i = 0; i < p.s; ++i) all[i] = neww[i];
            q.weights = WeightAssignment(p.weights.basis(), p.s, std::move(all));
        }
        apply_y_subst(q, y_rewrite(p, t));
        if (!t.has_new_weight)
            throw error(ErrorCode::InvalidTransformation,
                        "type 6 must assign a value to the renamed coordinate");
        set_weight_slot(q, p.s + t.mbar - 1, t.new_weight);
        break;
    }
    case 7: {
        if (t.swap_i <= p.s + p.l || t.swap_j <= t.swap_i || t.swap_j > p.n)
            throw error(ErrorCode::InvalidTransformation,
                        "type 7 swaps two distinct y-variables above s+l");
        apply_y_subst(q, y_rewrite(p, t));
        q.weights.swap_weights(t.swap_i - 1, t.swap_j - 1);
        break;
    }
    case 8: {
        if (t.exps.size() != p.s)
            throw error(ErrorCode::InvalidTransformation, "type 8 needs s exponents");
        const TruncatedSeries& gamma = t.series;
        if (gamma.nvars() != p.n || !gamma.is_unit())
            throw error(ErrorCode::InvalidTransformation, "type 8 gamma must be a unit in y");
        for (std::size_t i = 0; i < p.r; ++i) {
            Rat acc(0);
            for (std::size_t j = 0; j < p.s; ++j) acc += Rat(p.C[i][j]) * t.exps[j];
            if (acc != 0)
                throw error(ErrorCode::InvalidTransformation,
                            "type 8 exponents do not annihilate the rows of C");
        }
        apply_y_subst(q, y_rewrite(p, t));
        break;
    }
    case 9: {
        if (t.mbar <= p.l || p.r + t.mbar > p.m)
            throw error(ErrorCode::InvalidTransformation, "type 9 needs l < mbar <= m-r");
        if (t.xseq.nvars() != p.r + 1 || t.yseq.nvars() != p.s)
            throw error(ErrorCode::InvalidTransformation, "type 9 slot counts are wrong");
        std::size_t xi = p.r + t.mbar;
        const TruncatedSeries& sser = p.xseries.at(xi);
        QVec crow(p.n, Rat(0));
        for (std::size_t j = 0; j < p.n; ++j) crow[j] = sser.var_multiplicity(j);
        TruncatedSeries u = sser.divide_monomial(crow);
        if (!u.is_unit())
            throw error(ErrorCode::InvalidTransformation,
                        "type 9 premise fails: series is not monomial times unit");
        for (std::size_t j = p.s; j < p.n; ++j)
            if (crow[j] != 0)
                throw error(ErrorCode::InvalidTransformation,
                            "type 9 monomial part must live in y_1..y_s");
        IMat afull = t.xseq.matrix();
        IMat b = t.yseq.matrix();
        auto ainv = qmat_inverse(imat_to_q(afull));
        if (!ainv) throw error(ErrorCode::InvalidTransformation, "type 9 x-matrix singular");
        QMat stacked(p.r + 1, QVec(p.s, Rat(0)));
        for (std::size_t i = 0; i < p.r; ++i)
            for (std::size_t j = 0; j < p.s; ++j) stacked[i][j] = Rat(p.C[i][j]);
        for (std::size_t j = 0; j < p.s; ++j) stacked[p.r][j] = crow[j];
        QMat rows = qmat_mul(qmat_mul(*ainv, stacked), imat_to_q(b));
        QMat newc(p.r);
        for (std::size_t i = 0; i < p.r; ++i) newc[i] = rows[i];
        update_c(q, newc);
        update_weights_from_seq(q, t.yseq, p.s, p.n);
        Substitution sub = y_rewrite(p, t);
        apply_y_subst(q, sub);
        // eq. (37): the new series for x_{r+mbar} is u^{lambda e} - alpha
        TruncatedSeries u_new = substitute(u, sub);
        TruncatedSeries powered = unit_pow(u_new, t.lambda_exp);
        FieldElem alpha = powered.constant_term();
        if (!p.field->is_zero(t.alpha) && !(alpha == t.alpha))
            throw error(ErrorCode::InvalidTransformation,
                        "type 9 recorded alpha disagrees with the unit residue");
        TruncatedSeries newser =
            powered - TruncatedSeries::constant(p.n, powered.field(), p.trunc, alpha);
        q.xseries.erase(xi);
        q.xseries.emplace(xi, newser.promoted(p.field));
        // the translated factor carries no monomial: d_{r+1,j} = 0
        for (const auto& x : rows[p.r])
            if (x != 0)
                throw error(ErrorCode::InvalidTransformation,
                            "type 9: translated factor is not monomial-free");
        // monomial matching: a * C(1) = crow * B
        QVec avec(p.r, Rat(0));
        for (std::size_t j = 0; j < p.r; ++j) avec[j] = Rat(afull[p.r][j]);
        QVec lhs = qvec_mat(avec, imat_to_q(q.C));
        QVec crow_s(p.s, Rat(0));
        for (std::size_t j = 0; j < p.s; ++j) crow_s[j] = crow[j];
        QVec rhs = qvec_mat(crow_s, imat_to_q(b));
        if (lhs != rhs)
            throw error(ErrorCode::InvalidTransformation,
                        "type 9 monomial matching a*C(1) = crow*B fails");
        break;
    }
    case 10: {
        if (t.mbar <= p.l || p.r + t.mbar > p.m)
            throw error(ErrorCode::InvalidTransformation, "type 10 needs l < mbar <= m-r");
        for (const auto& [e, c] : t.series.terms())
            for (std::size_t i = p.r + t.mbar - 1; i < p.m; ++i)
                if (e[i] != 0)
                    throw error(ErrorCode::InvalidTransformation,
                                "type 10 phi uses a forbidden x-variable");
        TruncatedSeries phi_y = p.pull_to_y(t.series);
        std::size_t xi = p.r + t.mbar;
        TruncatedSeries updated = p.xseries.at(xi) - phi_y;
        q.xseries.erase(xi);
        q.xseries.emplace(xi, updated);
        break;
    }
    default:
        throw error(ErrorCode::InvalidTransformation,
                    "unknown transformation type " + std::to_string(t.type));
    }

    if (t.promote_l) {
        std::size_t xi = q.r + q.l + 1;
        auto it = q.xseries.find(xi);
        if (it == q.xseries.end())
            throw error(ErrorCode::InvalidTransformation, "promote_l: no series to promote");
        QVec want(q.n, Rat(0));
        want[q.s + q.l] = 1;
        TruncatedSeries expect =
            TruncatedSeries::monomial(q.n, q.field, q.trunc, want, q.field->one());
        if (!it->second.equals(expect))
            throw error(ErrorCode::InvalidTransformation,
                        "promote_l: series is not exactly the next y-variable");
        q.xseries.erase(it);
        q.l += 1;
    }
    if (t.promote_r) {
        std::size_t xi = q.r + q.l + 1;
        auto it = q.xseries.find(xi);
        if (it == q.xseries.end())
            throw error(ErrorCode::InvalidTransformation, "promote_r: no series to promote");
        const TruncatedSeries& ser = it->second;
        if (ser.terms().size() != 1)
            throw error(ErrorCode::InvalidTransformation, "promote_r: series is not a monomial");
        const auto& [e, coeff] = *ser.terms().begin();
        if (!(coeff == q.field->one()))
            throw error(ErrorCode::InvalidTransformation,
                        "promote_r: monomial coefficient must be 1");
        IVec row;
        for (std::size_t j = 0; j < q.n; ++j) {
            if (j < q.s) {
                if (!is_integer(e[j]) || e[j] < 0)
                    throw error(ErrorCode::InvalidTransformation,
                                "promote_r: exponent not natural");
                row.push_back(num(e[j]));
            } else if (e[j] != 0) {
                throw error(ErrorCode::InvalidTransformation,
                            "promote_r: monomial leaves y_1..y_s");
            }
        }
        QMat stacked = imat_to_q(q.C);
        QVec qrow;
        for (const auto& x : row) qrow.push_back(Rat(x));
        stacked.push_back(qrow);
        if (qmat_rank(stacked) != q.r + 1)
            throw error(ErrorCode::InvalidTransformation,
                        "promote_r: monomial is algebraic over the current rows");
        // reindex: the promoted variable becomes x_{r+1}; identified block
        // and remaining series shift up by one
        std::map<std::size_t, TruncatedSeries> moved;
        for (auto& [i, ser2] : q.xseries)
            if (i != xi) moved.emplace(i, std::move(ser2));
        q.xseries = std::move(moved);
        q.C.push_back(row);
        q.r += 1;
    }

    q.validate();
    check_type_monotone(p, q);
    t.post_s = (long)q.s;
    t.post_r = (long)q.r;
    t.post_l = (long)q.l;
    q.log.push_back(std::move(t));
    return q;
}

// ---------------------------------------------------------------------
// Lemma 6 normalization

NormalizedGmt normalize_gmt(const std::vector<GroupValue>& values, const RawGmt& raw,
                            const FieldPtr& field, const SquarefreeBasis& basis) {
    const std::size_t s1 = raw.matrix.size();
    if (s1 < 2 || values.size() != s1)
        throw error(ErrorCode::Internal, "normalize_gmt shape mismatch");
    const std::size_t s = s1 - 1;
    {
        std::vector<GroupValue> head(values.begin(), values.begin() + s);
        if (rational_relation(head))
            throw error(ErrorCode::NotIndependent, "x_1..x_s must be independent");
        if (!rational_relation(values))
            throw error(ErrorCode::NotDependent, "x_1..x_{s+1} must be dependent");
    }
    std::vector<std::size_t> translated;
    for (std::size_t j = 0; j < s1; ++j)
        if (!field->is_zero(raw.alphas[j])) translated.push_back(j);
    if (translated.empty())
        throw error(ErrorCode::NotApplicable, "raw GMT is monomial; nothing to normalize");
    if (translated.size() > 1)
        throw error(ErrorCode::InvalidTransformation,
                    "only one translated column is realizable along the valuation");

    // reindex columns so the translated one comes last
    std::vector<std::size_t> perm;
    for (std::size_t j = 0; j < s1; ++j)
        if (j != translated[0]) perm.push_back(j);
    perm.push_back(translated[0]);

    QMat a(s1, QVec(s1, Rat(0)));
    for (std::size_t i = 0; i < s1; ++i)
        for (std::size_t j = 0; j < s1; ++j) a[i][j] = Rat(raw.matrix[i][perm[j]]);

    // lambda_vec solves A_s lambda = a_{.,s+1}
    QMat as(s, QVec(s, Rat(0)));
    QVec rhs(s, Rat(0));
    for (std::size_t i = 0; i < s; ++i) {
        for (std::size_t j = 0; j < s; ++j) as[i][j] = a[i][j];
        rhs[i] = a[i][s];
    }
    auto asinv = qmat_inverse(as);
    if (!asinv)
        throw error(ErrorCode::InvalidTransformation,
                    "untranslated block of the GMT is singular");
    QVec lambda_vec = qmat_vec(*asinv, rhs);
    Rat lambda = a[s][s];
    for (std::size_t j = 0; j < s; ++j) lambda -= a[s][j] * lambda_vec[j];
    if (lambda == 0)
        throw error(ErrorCode::InvalidTransformation, "GMT normal form has lambda = 0");

    NormalizedGmt out;
    out.perm = perm;
    out.bmat = as;
    out.bvec = QVec(s, Rat(0));
    for (std::size_t j = 0; j < s; ++j) out.bvec[j] = a[s][j];
    out.lambda = lambda;
    out.alpha = field->pow_rational(raw.alphas[translated[0]], lambda);
    (void)basis;
    return out;
}

// ---------------------------------------------------------------------
// Lemma 22 / 23 / 35 lifts

namespace {

// monomial y-side SGMT making every row of `rows` componentwise nonnegative
TransformSeq clear_rows(const PreparedPair& p, QMat rows) {
    TransformSeq yseq(p.s);
    std::vector<GroupValue> yw(p.weights.weights().begin(),
                               p.weights.weights().begin() + p.s);
    const auto& basis = p.weights.basis();
    for (int guard = 0;; ++guard) {
        if (guard > 256)
            throw error(ErrorCode::IterationLimit, "row clearing did not stabilize");
        std::size_t bad = rows.size();
        for (std::size_t i = 0; i < rows.size() && bad == rows.size(); ++i)
            for (const auto& x : rows[i])
                if (x < 0) { bad = i; break; }
        if (bad == rows.size()) break;
        auto res = make_nonneg(rows[bad], qmat_identity(p.s), yw, basis);
        yseq.append(res.seq);
        yw = res.seq.transform_values(std::move(yw));
        for (auto& row : rows) row = res.seq.transform_exponent(row);
    }
    return yseq;
}

} // namespace

Transformation lift_gmt(const PreparedPair& p, const GmtData& gmt) {
    p.validate();
    const auto& basis = p.weights.basis();

    if (gmt.target == 0) {
        // Lemma 22: monomial SGMT in x_1..x_r lifts to a type 2
        if (gmt.xseq.nvars() != p.r)
            throw error(ErrorCode::InvalidTransformation, "x-side SGMT needs r slots");
        IMat a = gmt.xseq.matrix();
        auto ainv = qmat_inverse(imat_to_q(a));
        if (!ainv) throw error(ErrorCode::InvalidTransformation, "x-side matrix singular");
        QMat rows = qmat_mul(*ainv, imat_to_q(p.C));
        Transformation t;
        t.type = 2;
        t.xseq = gmt.xseq;
        t.yseq = clear_rows(p, rows);
        return t;
    }

    if (gmt.target <= p.r || gmt.target > p.m)
        throw error(ErrorCode::InvalidTransformation, "lift target out of range");
    std::size_t mbar = gmt.target - p.r;
    if (gmt.xseq.nvars() != p.r + 1)
        throw error(ErrorCode::InvalidTransformation, "x-side SGMT needs r+1 slots");

    if (mbar <= p.l) {
        // Lemma 23: companion SGMT in y_1..y_s, y_{s+mbar} with matching alpha
        if (!gmt.has_alpha)
            throw error(ErrorCode::InvalidTransformation,
                        "type 4 lift needs the residue of the translated endpoint");
        // run the y-side Euclid on the matching values
        std::vector<GroupValue> w;
        for (std::size_t i = 0; i < p.s; ++i) w.push_back(p.weights.weight(i));
        w.push_back(p.weights.weight(p.s + mbar - 1));
        auto pr = perron(w, p.weights.dependence(p.s + mbar - 1), basis);
        IMat bfull = pr.seq.matrix();
        Transformation t;
        t.type = 4;
        t.mbar = mbar;
        t.xseq = gmt.xseq;
        t.yseq = pr.seq;
        t.ymat = QMat(p.s, QVec(p.s, Rat(0)));
        for (std::size_t i = 0; i < p.s; ++i)
            for (std::size_t j = 0; j < p.s; ++j) t.ymat[i][j] = Rat(bfull[i][j]);
        t.yvec = QVec(p.s, Rat(0));
        for (std::size_t j = 0; j < p.s; ++j) t.yvec[j] = Rat(bfull[p.s][j]);
        t.alpha = gmt.alpha;
        if (!gmt.has_new_weight)
            throw error(ErrorCode::InvalidTransformation,
                        "type 4 lift needs an assigned value for the renamed coordinate");
        t.new_weight = gmt.new_weight;
        t.has_new_weight = true;
        t.weight_flagged = true;
        // the exponent matching a*C(1) = b is re-checked inside apply
        return t;
    }

    // Lemma 35: mbar > l, series target must be monomial times unit
    const TruncatedSeries& sser = p.xseries.at(gmt.target);
    QVec crow(p.n, Rat(0));
    for (std::size_t j = 0; j < p.n; ++j) crow[j] = sser.var_multiplicity(j);
    TruncatedSeries u = sser.divide_monomial(crow);
    if (!u.is_unit())
        throw error(ErrorCode::InvalidTransformation,
                    "type 9 lift premise: x-series is not monomial times unit");
    IMat afull = gmt.xseq.matrix();
    auto ainv = qmat_inverse(imat_to_q(afull));
    if (!ainv) throw error(ErrorCode::InvalidTransformation, "x-side matrix singular");
    QMat stacked(p.r + 1, QVec(p.s, Rat(0)));
    for (std::size_t i = 0; i < p.r; ++i)
        for (std::size_t j = 0; j < p.s; ++j) stacked[i][j] = Rat(p.C[i][j]);
    for (std::size_t j = 0; j < p.s; ++j) stacked[p.r][j] = crow[j];
    QMat rows = qmat_mul(*ainv, stacked);
    QMat first_r(rows.begin(), rows.begin() + p.r);
    Transformation t;
    t.type = 9;
    t.mbar = mbar;
    t.xseq = gmt.xseq;
    t.yseq = clear_rows(p, first_r);
    // lambda * e_{r+1,r+1} is identically 1 for a Lemma-6 normalized SGMT
    t.lambda_exp = 1;
    t.alpha = residue(u);
    return t;
}

} // namespace mono
