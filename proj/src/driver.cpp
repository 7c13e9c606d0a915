#include <mono/driver.hpp>
#include <mono/error.hpp>

#include <algorithm>
#include <functional>
#include <set>

namespace mono {

namespace {

// Working state for one engine operation: the evolving pair plus every
// series that must be rewritten whenever a transformation is applied.
struct Ctx {
    PreparedPair p;
    std::vector<TruncatedSeries> ytrack;
    std::vector<TruncatedSeries> xtrack;
    bool increased = false;
    long budget;
    std::size_t s0, r0, rl0;

    explicit Ctx(PreparedPair pp, long budget_ = 64)
        : p(std::move(pp)), budget(budget_), s0(p.s), r0(p.r), rl0(p.r + p.l) {}

    void tick(const char* where) {
        if (--budget < 0) throw error(ErrorCode::IterationLimit, where);
    }

    std::size_t push_y(TruncatedSeries g) {
        ytrack.push_back(std::move(g));
        return ytrack.size() - 1;
    }
    std::size_t push_x(TruncatedSeries g) {
        xtrack.push_back(std::move(g));
        return xtrack.size() - 1;
    }

    void apply_t(Transformation t) {
        Substitution ysub = y_rewrite(p, t);
        Substitution xsub = x_rewrite(p, t);
        bool relabel_x = t.promote_r;
        std::size_t old_r = p.r, old_l = p.l;
        PreparedPair q = apply(p, std::move(t));
        for (auto& g : ytrack) g = substitute(g, ysub);
        for (auto& g : xtrack) g = substitute(g, xsub);
        if (relabel_x) {
            // promoted slot r+l moves to slot r; the identified block shifts up
            Substitution perm(q.m, q.m, q.field, q.trunc);
            for (std::size_t k = 0; k < q.m; ++k) {
                std::size_t img = k;
                if (k == old_r + old_l) img = old_r;
                else if (k >= old_r && k < old_r + old_l) img = k + 1;
                perm.set(k, Assignment::product({SubstFactor{img, Rat(1), q.field->zero()}}));
            }
            for (auto& g : xtrack) g = substitute(g, perm);
        }
        p = std::move(q);
        if (p.s > s0 || p.r > r0 || p.r + p.l > rl0) increased = true;
    }
};

struct MonUnit {
    QVec mono;
    TruncatedSeries unit;
};

std::optional<MonUnit> as_monomial_unit(const TruncatedSeries& g) {
    if (g.is_zero()) return std::nullopt;
    QVec mono(g.nvars(), Rat(0));
    for (std::size_t j = 0; j < g.nvars(); ++j) mono[j] = g.var_multiplicity(j);
    TruncatedSeries u = g.divide_monomial(mono);
    if (!u.is_unit()) return std::nullopt;
    return MonUnit{std::move(mono), std::move(u)};
}

bool supported_below(const QVec& e, std::size_t k) {
    for (std::size_t j = k; j < e.size(); ++j)
        if (e[j] != 0) return false;
    return true;
}

// exponent row lies in the rational row space of C
bool row_algebraic(const PreparedPair& p, const QVec& first_s) {
    QMat stacked = imat_to_q(p.C);
    stacked.push_back(first_s);
    return qmat_rank(stacked) == p.r;
}

// ------------------------------------------------------------------
// Lemma Prop1: x-scope monomialization

void monomialize_x(Ctx& ctx, std::size_t idx, std::size_t t);

// ensure every distinguished-variable coefficient of xtrack[idx] is an
// x-monomial times unit, via one recursive product-trick call
bool x_coeffs_monomialized(Ctx& ctx, std::size_t idx, std::size_t slot, std::size_t t) {
    const TruncatedSeries& g = ctx.xtrack[idx];
    std::set<Rat> degrees;
    for (const auto& [e, c] : g.terms()) degrees.insert(e[slot]);
    TruncatedSeries prod =
        TruncatedSeries::constant(ctx.p.m, g.field(), g.trunc(), g.field()->one());
    bool all_good = true;
    for (const Rat& k : degrees) {
        TruncatedSeries sigma = g.coeff_in_var(slot, k);
        if (sigma.is_zero()) continue;
        auto mu = as_monomial_unit(sigma);
        if (!mu || !supported_below(mu->mono, ctx.p.r)) all_good = false;
        prod = prod * sigma;
    }
    if (all_good) return true;
    std::size_t tmp = ctx.push_x(std::move(prod));
    monomialize_x(ctx, tmp, t);
    return false;
}

void monomialize_x(Ctx& ctx, std::size_t idx, std::size_t t) {
    if (ctx.increased) return;
    const std::size_t m = ctx.p.m;
    if (t < ctx.p.r || t > ctx.p.r + ctx.p.l)
        throw error(ErrorCode::Internal, "x-scope level out of range");

    for (;;) {
        ctx.tick("x-scope monomialization");
        if (ctx.increased) return;
        const PreparedPair& p = ctx.p;
        TruncatedSeries g = ctx.xtrack[idx];
        if (g.is_zero())
            throw error(ErrorCode::TruncationExhausted,
                        "x-scope series vanished below the truncation bound");
        for (const auto& [e, c] : g.terms())
            if (!supported_below(e, t))
                throw error(ErrorCode::Internal, "series leaves its declared x-scope");

        if (t <= p.r) {
            // base case: principalize the ideal of support monomials
            std::vector<QVec> gens;
            for (const auto& [e, c] : g.terms()) {
                QVec a(p.r, Rat(0));
                for (std::size_t j = 0; j < p.r; ++j) a[j] = e[j];
                gens.push_back(a);
            }
            MonomialIdeal ideal(p.r, gens);
            if (ideal.is_principal()) return;
            auto pr = principalize(ideal, p.x_values(), p.weights.basis());
            GmtData gmt;
            gmt.xseq = pr.seq;
            ctx.apply_t(lift_gmt(p, gmt));
            continue;
        }

        // descent in the distinguished variable x_t
        std::size_t slot = t - 1;
        if (!x_coeffs_monomialized(ctx, idx, slot, t - 1)) continue;

        // principalize the coefficient monomials
        g = ctx.xtrack[idx];
        std::vector<QVec> gens;
        for (const auto& [e, c] : g.terms()) {
            // drop the x_t part; the rest is dominated by its sigma's monomial
            QVec a(p.r, Rat(0));
            for (std::size_t j = 0; j < p.r; ++j) a[j] = e[j];
            bool dup = false;
            for (const auto& h : gens)
                if (h == a) { dup = true; break; }
            if (!dup) gens.push_back(a);
        }
        MonomialIdeal ideal(p.r, gens);
        if (!ideal.is_principal()) {
            auto pr = principalize(ideal, p.x_values(), p.weights.basis());
            GmtData gmt;
            gmt.xseq = pr.seq;
            ctx.apply_t(lift_gmt(p, gmt));
            continue;
        }

        g = ctx.xtrack[idx];
        QVec a(m, Rat(0));
        for (std::size_t j = 0; j < p.r; ++j) a[j] = g.var_multiplicity(j);
        TruncatedSeries f = g.divide_monomial(a);
        auto h_ord = ord_in_last(f, slot);
        if (!h_ord)
            throw error(ErrorCode::Internal, "coefficient ideal left no distinguished term");
        if (*h_ord == 0) return;
        if (!is_integer(*h_ord))
            throw error(ErrorCode::Internal, "fractional distinguished order");
        long h = (long)num(*h_ord);

        // Tschirnhaus (type 3) in x_t
        auto ts = tschirnhaus(f, slot, h);
        if (!ts.phi.is_zero()) {
            Transformation t3;
            t3.type = 3;
            t3.mbar = t - p.r;
            t3.series = ts.phi;
            ctx.apply_t(std::move(t3));
            if (ctx.increased) return;
            if (!x_coeffs_monomialized(ctx, idx, slot, t - 1)) continue;
        }

        // the descent now needs a translated move on an identified variable,
        // whose residue the monomial valuation cannot supply
        std::vector<GroupValue> vals = ctx.p.x_values();
        vals.push_back(ctx.p.x_value(t));
        if (!rational_relation(vals))
            throw error(ErrorCode::NotApplicable,
                        "x-scope descent reached the independent case (Lemma 51); the "
                        "required type-6 residue is not derivable from a monomial valuation");
        throw error(ErrorCode::NotApplicable,
                    "x-scope descent requires a type-4 translation on an identified "
                    "variable; its residue is not derivable from a monomial valuation");
    }
}

// ------------------------------------------------------------------
// Lemma 2 / Lemma 4: y-scope monomialization

struct YMonoOut {
    QVec d;   // exponents over the first s variables (padded to n)
};

void monomialize_y(Ctx& ctx, std::size_t idx, std::size_t t);

bool y_coeffs_monomialized(Ctx& ctx, std::size_t idx, std::size_t slot, std::size_t t,
                           bool include_zero) {
    const TruncatedSeries& g = ctx.ytrack[idx];
    std::set<Rat> degrees;
    for (const auto& [e, c] : g.terms()) degrees.insert(e[slot]);
    TruncatedSeries prod =
        TruncatedSeries::constant(ctx.p.n, g.field(), g.trunc(), g.field()->one());
    bool all_good = true;
    for (const Rat& k : degrees) {
        if (!include_zero && k == 0) continue;
        TruncatedSeries sigma = g.coeff_in_var(slot, k);
        if (sigma.is_zero()) continue;
        auto mu = as_monomial_unit(sigma);
        if (!mu || !supported_below(mu->mono, ctx.p.s)) all_good = false;
        prod = prod * sigma;
    }
    if (all_good) return true;
    std::size_t tmp = ctx.push_y(std::move(prod));
    monomialize_y(ctx, tmp, t);
    return false;
}

// galois-averaging route of Lemma 2: bring the classes of ytrack[idx] into
// monomial-times-unit form through the x-side machinery
void lemma2_galois(Ctx& ctx, std::size_t idx) {
    const PreparedPair& p = ctx.p;
    TruncatedSeries g = ctx.ytrack[idx];
    auto dec = decompose(g, p);

    // x-representation of every class: solve v C = alpha - Lambda per term
    for (;;) {
        ctx.tick("lemma 2 x-representation");
        bool clean = true;
        const PreparedPair& q = ctx.p;
        g = ctx.ytrack[idx];
        dec = decompose(g, q);
        QMat cq = imat_to_q(q.C);
        for (const auto& [key, comp] : dec.components) {
            for (const auto& [e, c] : comp.terms()) {
                QVec alpha(q.s, Rat(0));
                for (std::size_t j = 0; j < q.s; ++j) alpha[j] = e[j];
                QVec lam(q.s, Rat(0));
                for (std::size_t j = 0; j < q.s; ++j) lam[j] = alpha[j] - Rat(key[j]);
                auto v = solve_left(cq, lam);
                if (!v)
                    throw error(ErrorCode::Internal, "class member left its own class");
                bool neg = std::any_of(v->begin(), v->end(),
                                       [](const Rat& x) { return x < 0; });
                if (neg) {
                    auto mn = make_nonneg(*v, cq, q.x_values(), q.weights.basis());
                    GmtData gmt;
                    gmt.xseq = mn.seq;
                    ctx.apply_t(lift_gmt(q, gmt));
                    clean = false;
                    break;
                }
            }
            if (!clean) break;
        }
        if (clean) break;
        if (ctx.increased) return;
    }
    if (ctx.increased) return;

    // common denominator d of the x-exponents, then the twisted product
    const PreparedPair& q = ctx.p;
    g = ctx.ytrack[idx];
    dec = decompose(g, q);
    QMat cq = imat_to_q(q.C);
    Int dcom = 1;
    std::vector<TruncatedSeries> deltas;   // x-space, fractional exponents
    for (const auto& [key, comp] : dec.components) {
        TruncatedSeries delta =
            TruncatedSeries::zero(q.m, comp.field(), comp.trunc());
        for (const auto& [e, c] : comp.terms()) {
            QVec lam(q.s, Rat(0));
            for (std::size_t j = 0; j < q.s; ++j) lam[j] = e[j] - Rat(key[j]);
            auto v = solve_left(cq, lam);
            if (!v) throw error(ErrorCode::Internal, "lost the class representation");
            QVec xe(q.m, Rat(0));
            for (std::size_t j = 0; j < q.r; ++j) {
                xe[j] = (*v)[j];
                dcom = lcm_int(dcom, den((*v)[j]));
            }
            for (std::size_t i = 0; i < q.l; ++i) xe[q.r + i] = e[q.s + i];
            delta.add_term(xe, c);
        }
        deltas.push_back(std::move(delta));
    }
    long d = (long)dcom;
    if (d == 1) {
        // already integral; the product of the deltas is plain x-scope input
        TruncatedSeries f =
            TruncatedSeries::constant(q.m, q.field, q.trunc, q.field->one());
        for (const auto& del : deltas) f = f * del;
        std::size_t fi = ctx.push_x(std::move(f));
        monomialize_x(ctx, fi, q.r + q.l);
        return;
    }
    long need = (long)lcm_int(Int(q.field->modulus()), Int(4) * d);
    if (need != q.field->modulus()) {
        FieldPtr bigger = CycloField::make(need);
        ctx.p = ctx.p.with_field(bigger);
        for (auto& tr : ctx.ytrack) tr = tr.promoted(bigger);
        for (auto& tr : ctx.xtrack) tr = tr.promoted(bigger);
    }
    const FieldPtr& fld = ctx.p.field;
    long zeta_step = fld->modulus() / d;
    TruncatedSeries f =
        TruncatedSeries::constant(q.m, fld, q.trunc, fld->one());
    for (const auto& del0 : deltas) {
        TruncatedSeries del = del0.promoted(fld);
        // product over all twist tuples (i_1..i_r) in [d]^r
        std::vector<long> tw(ctx.p.r, 0);
        for (;;) {
            TruncatedSeries twisted = TruncatedSeries::zero(q.m, fld, q.trunc);
            for (const auto& [e, c] : del.terms()) {
                long rot = 0;
                for (std::size_t j = 0; j < ctx.p.r; ++j) {
                    Rat de = e[j] * d;
                    if (!is_integer(de))
                        throw error(ErrorCode::Internal, "denominator exceeded its lcm");
                    rot += (long)(num(de) % d) * tw[j];
                }
                twisted.add_term(e, fld->mul(c, fld->zeta_pow(zeta_step * rot)));
            }
            f = f * twisted;
            std::size_t pos = 0;
            while (pos < tw.size() && ++tw[pos] == d) tw[pos++] = 0;
            if (pos == tw.size()) break;
        }
    }
    for (const auto& [e, c] : f.terms())
        for (std::size_t j = 0; j < ctx.p.r; ++j)
            if (!is_integer(e[j]))
                throw error(ErrorCode::Internal, "galois product kept fractional exponents");
    std::size_t fi = ctx.push_x(std::move(f));
    monomialize_x(ctx, fi, ctx.p.r + ctx.p.l);
}

void monomialize_y(Ctx& ctx, std::size_t idx, std::size_t t) {
    if (ctx.increased) return;
    const std::size_t n = ctx.p.n;
    if (t < ctx.p.s + ctx.p.l) t = ctx.p.s + ctx.p.l;
    if (t > n) throw error(ErrorCode::Internal, "y-scope level out of range");

    for (;;) {
        ctx.tick("y-scope monomialization");
        if (ctx.increased) return;
        const PreparedPair& p = ctx.p;
        TruncatedSeries g = ctx.ytrack[idx];
        if (g.is_zero())
            throw error(ErrorCode::TruncationExhausted,
                        "y-scope series vanished below the truncation bound");
        for (const auto& [e, c] : g.terms())
            if (!supported_below(e, t))
                throw error(ErrorCode::Internal, "series leaves its declared y-scope");

        if (t <= p.s + p.l) {
            // Lemma 2
            auto dec = decompose(g, p);
            bool all_mu = true;
            for (const auto& [key, comp] : dec.components) {
                auto mu = as_monomial_unit(comp);
                if (!mu || !supported_below(mu->mono, p.s)) { all_mu = false; break; }
            }
            if (!all_mu) {
                lemma2_galois(ctx, idx);
                if (ctx.increased) return;
                continue;
            }
            std::vector<QVec> gens;
            for (const auto& [key, comp] : dec.components) {
                QVec mono(p.s, Rat(0));
                for (std::size_t j = 0; j < p.s; ++j) mono[j] = comp.var_multiplicity(j);
                gens.push_back(mono);
            }
            MonomialIdeal ideal(p.s, gens);
            if (!ideal.is_principal()) {
                std::vector<GroupValue> yw(p.weights.weights().begin(),
                                           p.weights.weights().begin() + p.s);
                auto pr = principalize(ideal, yw, p.weights.basis());
                Transformation t1;
                t1.type = 1;
                t1.yseq = pr.seq;
                ctx.apply_t(std::move(t1));
                continue;
            }
            return;
        }

        // Lemma 4: descent in y_t
        std::size_t slot = t - 1;
        if (!y_coeffs_monomialized(ctx, idx, slot, t - 1, true)) continue;

        g = ctx.ytrack[idx];
        std::vector<QVec> gens;
        for (const auto& [e, c] : g.terms()) {
            QVec a(p.s, Rat(0));
            for (std::size_t j = 0; j < p.s; ++j) a[j] = e[j];
            bool dup = false;
            for (const auto& hh : gens)
                if (hh == a) { dup = true; break; }
            if (!dup) gens.push_back(a);
        }
        MonomialIdeal ideal(p.s, gens);
        if (!ideal.is_principal()) {
            std::vector<GroupValue> yw(p.weights.weights().begin(),
                                       p.weights.weights().begin() + p.s);
            auto pr = principalize(ideal, yw, p.weights.basis());
            Transformation t1;
            t1.type = 1;
            t1.yseq = pr.seq;
            ctx.apply_t(std::move(t1));
            continue;
        }

        g = ctx.ytrack[idx];
        QVec a(n, Rat(0));
        for (std::size_t j = 0; j < p.s; ++j) a[j] = g.var_multiplicity(j);
        TruncatedSeries gbar = g.divide_monomial(a);
        auto h_ord = ord_in_last(gbar, slot);
        if (!h_ord)
            throw error(ErrorCode::Internal, "principal coefficient ideal left no pure term");
        if (*h_ord == 0) return;
        throw error(ErrorCode::NotApplicable,
                    "y-scope descent requires a type-6 translation; its residue is not "
                    "derivable from a monomial valuation");
    }
}

// d and unit extraction once a track is y-monomial times unit
std::pair<QVec, TruncatedSeries> extract_y_monomial(Ctx& ctx, std::size_t idx) {
    const PreparedPair& p = ctx.p;
    TruncatedSeries g = ctx.ytrack[idx];
    QVec d(p.n, Rat(0));
    for (std::size_t j = 0; j < p.n; ++j) d[j] = g.var_multiplicity(j);
    TruncatedSeries u = g.divide_monomial(d);
    if (!u.is_unit())
        throw error(ErrorCode::Internal, "monomialized series is not monomial times unit");
    return {std::move(d), std::move(u)};
}

// ------------------------------------------------------------------
// Lemma 3 / Lemma 5

struct SplitOut {
    std::size_t p_idx;     // ytrack index of the algebraic part
    TailKind tail = TailKind::Zero;
    QVec tail_monomial;
    std::size_t tail_var = 0;   // 1-based y-index
};

SplitOut split_impl(Ctx& ctx, std::size_t idx, std::size_t t);

SplitOut lemma3(Ctx& ctx, std::size_t idx) {
    const PreparedPair& p0 = ctx.p;
    TruncatedSeries g = ctx.ytrack[idx];
    auto dec = decompose(g, p0);
    IVec zero_key(p0.s, Int(0));
    TruncatedSeries h0 = TruncatedSeries::zero(p0.n, g.field(), g.trunc());
    if (const TruncatedSeries* c = dec.component(zero_key)) h0 = *c;
    std::size_t p_idx = ctx.push_y(h0);
    TruncatedSeries gp = g - h0;
    if (gp.is_zero()) {
        SplitOut out;
        out.p_idx = p_idx;
        out.tail = TailKind::Zero;
        return out;
    }
    std::size_t gp_idx = ctx.push_y(std::move(gp));
    monomialize_y(ctx, gp_idx, ctx.p.s + ctx.p.l);
    if (ctx.increased) return SplitOut{p_idx, TailKind::Zero, {}, 0};
    auto [d, u] = extract_y_monomial(ctx, gp_idx);

    // absorb the unit by a type 8 so the tail becomes a bare monomial
    const PreparedPair& p = ctx.p;
    bool unit_trivial = u.equals(
        TruncatedSeries::constant(p.n, u.field(), u.trunc(), u.field()->one()));
    if (!unit_trivial) {
        QMat sys = imat_to_q(p.C);
        QVec dd(p.s, Rat(0));
        for (std::size_t j = 0; j < p.s; ++j) dd[j] = d[j];
        sys.push_back(dd);
        QVec rhs(p.r + 1, Rat(0));
        rhs[p.r] = -1;
        auto e = solve_right(sys, rhs);
        if (!e)
            throw error(ErrorCode::InvalidPreparedForm,
                        "type 8 exponent system infeasible: the monomial tail is algebraic");
        Transformation t8;
        t8.type = 8;
        t8.exps = *e;
        t8.series = u;
        ctx.apply_t(std::move(t8));
        if (ctx.increased) return SplitOut{p_idx, TailKind::Zero, {}, 0};
        // the tail must now be the bare monomial
        TruncatedSeries want = TruncatedSeries::monomial(
            ctx.p.n, ctx.ytrack[gp_idx].field(), ctx.p.trunc, d,
            ctx.ytrack[gp_idx].field()->one());
        if (!ctx.ytrack[gp_idx].equals(want))
            throw error(ErrorCode::Internal, "type 8 failed to strip the unit");
    }
    SplitOut out;
    out.p_idx = p_idx;
    out.tail = TailKind::Monomial;
    out.tail_monomial = d;
    return out;
}

SplitOut lemma5(Ctx& ctx, std::size_t idx, std::size_t t) {
    const std::size_t n = ctx.p.n;
    for (;;) {
        ctx.tick("lemma 5 descent");
        if (ctx.increased) return SplitOut{ctx.push_y(ctx.ytrack[idx]), TailKind::Zero, {}, 0};
        const PreparedPair& p = ctx.p;
        TruncatedSeries g = ctx.ytrack[idx];
        // delegate when the series already lives below the split level
        bool below = true;
        for (const auto& [e, c] : g.terms())
            if (!supported_below(e, p.s + p.l)) { below = false; break; }
        if (below) return lemma3(ctx, idx);
        std::size_t slot = t - 1;
        bool uses_t = false;
        for (const auto& [e, c] : g.terms())
            if (e[slot] != 0) { uses_t = true; break; }
        if (!uses_t) return split_impl(ctx, idx, t - 1);

        // positive-degree coefficients to monomial-times-unit form
        if (!y_coeffs_monomialized(ctx, idx, slot, t - 1, false)) continue;
        if (ctx.increased) return SplitOut{ctx.push_y(ctx.ytrack[idx]), TailKind::Zero, {}, 0};

        // split the constant coefficient one level down
        g = ctx.ytrack[idx];
        TruncatedSeries sigma0 = g.coeff_in_var(slot, 0);
        std::size_t s0_idx = ctx.push_y(sigma0);
        SplitOut inner = split_impl(ctx, s0_idx, t - 1);
        if (ctx.increased) return SplitOut{inner.p_idx, TailKind::Zero, {}, 0};

        // rest = g - P0 = y^dvec * gbar
        g = ctx.ytrack[idx];
        TruncatedSeries p0ser = ctx.ytrack[inner.p_idx];
        TruncatedSeries rest = g - p0ser;
        if (rest.is_zero()) {
            SplitOut out;
            out.p_idx = inner.p_idx;
            out.tail = TailKind::Zero;
            return out;
        }
        QVec dvec(n, Rat(0));
        for (std::size_t j = 0; j < p.s; ++j) dvec[j] = rest.var_multiplicity(j);
        TruncatedSeries gbar = rest.divide_monomial(dvec);

        // endgame: an order-one direction becomes the new variable
        auto try_rename = [&](std::size_t vslot) -> bool {
            auto o = ord_in_last(gbar, vslot);
            return o && *o == 1;
        };
        std::size_t rename_slot = slot;
        if (!try_rename(slot)) {
            // look for the y_{t-1} direction of the paper's first case
            if (t >= 2 && t - 2 >= p.s + p.l && try_rename(t - 2)) {
                Transformation t7;
                t7.type = 7;
                t7.swap_i = t - 1;
                t7.swap_j = t;
                ctx.apply_t(std::move(t7));
                if (ctx.increased) return SplitOut{inner.p_idx, TailKind::Zero, {}, 0};
                g = ctx.ytrack[idx];
                p0ser = ctx.ytrack[inner.p_idx];
                rest = g - p0ser;
                dvec = QVec(n, Rat(0));
                for (std::size_t j = 0; j < ctx.p.s; ++j) dvec[j] = rest.var_multiplicity(j);
                gbar = rest.divide_monomial(dvec);
                if (!try_rename(slot))
                    throw error(ErrorCode::Internal, "swap did not expose an order-one direction");
            } else {
                auto o = ord_in_last(gbar, slot);
                if (!o)
                    throw error(ErrorCode::NotApplicable,
                                "Lemma 5 endgame found no distinguished direction");
                throw error(ErrorCode::NotApplicable,
                            "Lemma 5 descent at order " + rat_to_string(*o) +
                            " requires a type-6 translation; its residue is not derivable "
                            "from a monomial valuation");
            }
            rename_slot = slot;
        }

        Transformation t5;
        t5.type = 5;
        t5.mbar = t - ctx.p.s;
        t5.series = gbar;
        ctx.apply_t(std::move(t5));
        if (ctx.increased) return SplitOut{inner.p_idx, TailKind::Zero, {}, 0};
        (void)rename_slot;

        SplitOut out;
        out.p_idx = inner.p_idx;
        out.tail = TailKind::MonomialTimesVar;
        out.tail_monomial = dvec;
        out.tail_var = t;
        return out;
    }
}

SplitOut split_impl(Ctx& ctx, std::size_t idx, std::size_t t) {
    if (t <= ctx.p.s + ctx.p.l) return lemma3(ctx, idx);
    return lemma5(ctx, idx, t);
}

std::size_t highest_y_var(const TruncatedSeries& g) {
    std::size_t top = 0;
    for (const auto& [e, c] : g.terms())
        for (std::size_t j = 0; j < e.size(); ++j)
            if (e[j] != 0) top = std::max(top, j + 1);
    return top;
}

} // namespace

// ------------------------------------------------------------------
// public operations

MonomializeResult monomialize_series(const PreparedPair& p, const TruncatedSeries& g,
                                     XScope scope) {
    p.validate();
    Ctx ctx(p);
    std::size_t idx = ctx.push_x(g);
    monomialize_x(ctx, idx, scope.t);
    MonomializeResult out{ctx.p, ctx.increased, {}, TruncatedSeries{}, ctx.xtrack[idx]};
    if (!ctx.increased) {
        TruncatedSeries cur = ctx.xtrack[idx];
        QVec d(ctx.p.m, Rat(0));
        for (std::size_t j = 0; j < ctx.p.m; ++j) d[j] = cur.var_multiplicity(j);
        out.d = d;
        out.unit = cur.divide_monomial(d);
        if (!out.unit.is_unit())
            throw error(ErrorCode::Internal, "x-scope result is not monomial times unit");
    }
    return out;
}

MonomializeResult monomialize_series(const PreparedPair& p, const TruncatedSeries& g,
                                     YScope scope) {
    p.validate();
    Ctx ctx(p);
    std::size_t idx = ctx.push_y(g);
    monomialize_y(ctx, idx, scope.t);
    MonomializeResult out{ctx.p, ctx.increased, {}, TruncatedSeries{}, ctx.ytrack[idx]};
    if (!ctx.increased) {
        auto [d, u] = extract_y_monomial(ctx, idx);
        out.d = d;
        out.unit = u;
    }
    return out;
}

SplitResult split_algebraic(const PreparedPair& p, const TruncatedSeries& g, std::size_t t) {
    p.validate();
    Ctx ctx(p);
    std::size_t idx = ctx.push_y(g);
    SplitOut so = split_impl(ctx, idx, t);
    SplitResult out;
    out.pair = ctx.p;
    out.increased = ctx.increased;
    if (!ctx.increased) {
        out.algebraic_part = ctx.ytrack[so.p_idx];
        out.tail = so.tail;
        out.tail_monomial = so.tail_monomial;
        out.tail_var = so.tail_var;
        if (!out.algebraic_part.is_zero() && !is_algebraic(out.algebraic_part, ctx.p))
            throw error(ErrorCode::Internal, "split produced a non-algebraic P part");
    }
    return out;
}

namespace {

// ------------------------------------------------------------------
// step internals

// single-monomial handling: promote into the identified or monomial block,
// or report the index as finalized
std::optional<StepResult> try_single_monomial(Ctx& ctx, std::size_t target) {
    const PreparedPair& p = ctx.p;
    const TruncatedSeries& sser = p.xseries.at(target);
    if (sser.terms().size() != 1) return std::nullopt;
    auto [e, coeff] = *sser.terms().begin();
    bool coeff_one = (coeff == p.field->one());

    // exactly the next free y-variable: grow the identified block
    QVec want(p.n, Rat(0));
    std::size_t next_slot = p.s + p.l;
    if (coeff_one && next_slot < p.n) {
        // a swap may be needed to move the variable into position s+l+1
        std::size_t hot = p.n;
        for (std::size_t j = next_slot; j < p.n; ++j) {
            QVec uv(p.n, Rat(0));
            uv[j] = 1;
            if (e == uv) { hot = j; break; }
        }
        if (hot < p.n) {
            if (hot != next_slot) {
                Transformation t7;
                t7.type = 7;
                t7.swap_i = next_slot + 1;
                t7.swap_j = hot + 1;
                ctx.apply_t(std::move(t7));
            }
            Transformation t5;
            t5.type = 5;
            t5.mbar = ctx.p.l + 1;
            t5.series = TruncatedSeries::variable(ctx.p.n, ctx.p.field, ctx.p.trunc, next_slot);
            t5.promote_l = true;
            ctx.apply_t(std::move(t5));
            return StepResult{ctx.p, StepProgress::TypeIncreased, 0};
        }
    }
    (void)want;

    // a fresh monomial relation: grow the monomial block when the rank grows
    bool integral_first_s = true;
    for (std::size_t j = 0; j < p.n; ++j) {
        if (j < p.s) {
            if (!is_integer(e[j])) integral_first_s = false;
        } else if (e[j] != 0) {
            integral_first_s = false;
        }
    }
    if (coeff_one && integral_first_s) {
        QVec first_s(p.s, Rat(0));
        for (std::size_t j = 0; j < p.s; ++j) first_s[j] = e[j];
        if (!row_algebraic(p, first_s)) {
            QMat sys = imat_to_q(p.C);
            sys.push_back(first_s);
            QVec rhs(p.r + 1, Rat(0));
            rhs[p.r] = -1;
            auto ee = solve_right(sys, rhs);
            if (!ee)
                throw error(ErrorCode::Internal, "rank grew but the type-8 system failed");
            Transformation t8;
            t8.type = 8;
            t8.exps = *ee;
            t8.series = TruncatedSeries::constant(p.n, p.field, p.trunc, p.field->one());
            t8.promote_r = true;
            ctx.apply_t(std::move(t8));
            return StepResult{ctx.p, StepProgress::TypeIncreased, 0};
        }
    }

    // nothing structural left: the coordinate is a pure monomial chart entry
    return StepResult{ctx.p, StepProgress::Finalized, target};
}

bool single_monomial(const TruncatedSeries& s) { return s.terms().size() == 1; }

// one full progress pass on x_{target}
StepResult step_on(Ctx& ctx, std::size_t target) {
    for (;;) {
        ctx.tick("step");
        const PreparedPair& p = ctx.p;
        const TruncatedSeries& sser = p.xseries.at(target);
        if (sser.is_zero())
            throw error(ErrorCode::TruncationExhausted,
                        "x-series vanished below the truncation bound");

        if (auto done = try_single_monomial(ctx, target)) return *done;
        if (ctx.increased) return StepResult{ctx.p, StepProgress::TypeIncreased, 0};

        // monomial-times-unit: the Lemma 35 route (type 9), or a unit strip
        if (auto mu = as_monomial_unit(sser); mu && supported_below(mu->mono, p.s)) {
            QVec first_s(p.s, Rat(0));
            for (std::size_t j = 0; j < p.s; ++j) first_s[j] = mu->mono[j];
            if (!row_algebraic(p, first_s)) {
                // strip the unit by a type 8, then the next pass promotes r
                QMat sys = imat_to_q(p.C);
                sys.push_back(first_s);
                QVec rhs(p.r + 1, Rat(0));
                rhs[p.r] = -1;
                auto ee = solve_right(sys, rhs);
                if (!ee)
                    throw error(ErrorCode::Internal, "non-algebraic row without a type-8 solution");
                Transformation t8;
                t8.type = 8;
                t8.exps = *ee;
                t8.series = mu->unit;
                ctx.apply_t(std::move(t8));
                if (ctx.increased) return StepResult{ctx.p, StepProgress::TypeIncreased, 0};
                continue;
            }
            // dependent case (eq. (31)-(33)): type 9 from the x-side Euclid
            GroupValue sval = monomial_value(p.weights, mu->mono);
            std::vector<GroupValue> w = p.x_values();
            QMat flat;
            for (const auto& v : w) flat.push_back(v.flatten());
            auto dep = solve_left(flat, sval.flatten());
            if (!dep)
                throw error(ErrorCode::Internal,
                            "algebraic monomial value escaped the x-value span");
            w.push_back(sval);
            auto pr = perron(w, *dep, p.weights.basis());
            GmtData gmt;
            gmt.target = target;
            gmt.xseq = pr.seq;
            ctx.apply_t(lift_gmt(p, gmt));
            if (ctx.increased) return StepResult{ctx.p, StepProgress::TypeIncreased, 0};
            continue;
        }

        // general case: bring the series to the (15)/(16) shape
        std::size_t t_high = std::max(highest_y_var(sser), p.s + p.l);
        std::size_t gidx = ctx.push_y(sser);
        SplitOut so = split_impl(ctx, gidx, t_high);
        if (ctx.increased) return StepResult{ctx.p, StepProgress::TypeIncreased, 0};
        // sanity: the split worked on the same germ the pair carries
        if (!ctx.ytrack[gidx].equals(ctx.p.xseries.at(target)))
            throw error(ErrorCode::Internal, "split lost track of the target series");

        TruncatedSeries pser = ctx.ytrack[so.p_idx];
        if (pser.is_zero()) continue;   // pure tail shapes re-enter the cases above

        // x-representation of the algebraic part
        for (;;) {
            ctx.tick("step x-representation");
            const PreparedPair& q = ctx.p;
            pser = ctx.ytrack[so.p_idx];
            QMat cq = imat_to_q(q.C);
            bool fixed = false;
            Int dcom = 1;
            for (const auto& [e, c] : pser.terms()) {
                QVec alpha(q.s, Rat(0));
                for (std::size_t j = 0; j < q.s; ++j) alpha[j] = e[j];
                auto v = solve_left(cq, alpha);
                if (!v)
                    throw error(ErrorCode::Internal, "algebraic part is not algebraic");
                bool neg = std::any_of(v->begin(), v->end(),
                                       [](const Rat& x) { return x < 0; });
                if (neg) {
                    auto mn = make_nonneg(*v, cq, q.x_values(), q.weights.basis());
                    GmtData g2;
                    g2.xseq = mn.seq;
                    ctx.apply_t(lift_gmt(q, g2));
                    fixed = true;
                    break;
                }
                for (const auto& x : *v) dcom = lcm_int(dcom, den(x));
            }
            if (ctx.increased) return StepResult{ctx.p, StepProgress::TypeIncreased, 0};
            if (fixed) continue;

            if (dcom == 1) {
                // exact x-series: remove P by a type 10
                const PreparedPair& q2 = ctx.p;
                QMat cq2 = imat_to_q(q2.C);
                TruncatedSeries phi = TruncatedSeries::zero(q2.m, pser.field(), q2.trunc);
                for (const auto& [e, c] : pser.terms()) {
                    QVec alpha(q2.s, Rat(0));
                    for (std::size_t j = 0; j < q2.s; ++j) alpha[j] = e[j];
                    QVec v = *solve_left(cq2, alpha);
                    QVec xe(q2.m, Rat(0));
                    for (std::size_t j = 0; j < q2.r; ++j) xe[j] = v[j];
                    for (std::size_t i = 0; i < q2.l; ++i) xe[q2.r + i] = e[q2.s + i];
                    phi.add_term(xe, c);
                }
                Transformation t10;
                t10.type = 10;
                t10.mbar = target - q2.r;
                t10.series = phi;
                ctx.apply_t(std::move(t10));
                break;
            }

            // fractional representation: monomialize through the y-route,
            // driving the series into the monomial-times-unit case above
            std::size_t si = ctx.push_y(ctx.p.xseries.at(target));
            monomialize_y(ctx, si, std::max(highest_y_var(ctx.ytrack[si]), ctx.p.s + ctx.p.l));
            if (ctx.increased) return StepResult{ctx.p, StepProgress::TypeIncreased, 0};
            break;
        }
        if (ctx.increased) return StepResult{ctx.p, StepProgress::TypeIncreased, 0};
    }
}

} // namespace

StepResult step(const PreparedPair& p) {
    p.validate();
    // first unfinished x-variable: not a single monomial, or still promotable
    std::size_t target = 0;
    for (std::size_t i = p.r + p.l + 1; i <= p.m && target == 0; ++i) {
        const TruncatedSeries& s = p.xseries.at(i);
        if (!single_monomial(s)) {
            target = i;
            break;
        }
        Ctx probe(p);
        if (auto res = try_single_monomial(probe, i);
            !res || res->progress == StepProgress::TypeIncreased) {
            target = i;
            break;
        }
    }
    if (target == 0)
        throw error(ErrorCode::NotApplicable,
                    "nothing to do: every x-variable is monomial or identified");
    Ctx ctx(p, 64);
    return step_on(ctx, target);
}

RunResult run(const PreparedPair& p0, long max_steps) {
    PreparedPair cur = p0;
    cur.validate();
    if (max_steps <= 0)
        max_steps = (long)((cur.n + 1) * (cur.m + 1) * (cur.m + 1));
    for (long iter = 0;; ++iter) {
        if (iter >= max_steps)
            throw error(ErrorCode::IterationLimit, "run exceeded its outer step budget");
        try {
            StepResult res = step(cur);
            cur = res.pair;
        } catch (const EngineError& e) {
            if (e.code() == ErrorCode::NotApplicable) break;   // nothing left to do
            throw;
        }
    }
    RunResult out;
    out.form = monomial_form_of(cur);
    out.form.certificate = cur.log;
    out.pair = std::move(cur);
    return out;
}

MonomialForm monomial_form_of(const PreparedPair& p) {
    MonomialForm form;
    form.s = p.s;
    form.r = p.r;
    form.l = p.l;
    QMat rows;
    for (std::size_t i = 1; i <= p.m; ++i) {
        MonomialForm::Entry ent;
        if (i <= p.r) {
            ent.exponents = QVec(p.n, Rat(0));
            for (std::size_t j = 0; j < p.s; ++j) ent.exponents[j] = Rat(p.C[i - 1][j]);
            ent.coefficient = p.field->one();
        } else if (i <= p.r + p.l) {
            ent.identified = true;
            ent.yindex = p.s + (i - p.r);
            ent.exponents = QVec(p.n, Rat(0));
            ent.exponents[ent.yindex - 1] = 1;
            ent.coefficient = p.field->one();
        } else {
            const TruncatedSeries& s = p.xseries.at(i);
            if (s.terms().size() != 1)
                throw error(ErrorCode::InvalidPreparedForm,
                            "x_" + std::to_string(i) + " is not monomial");
            auto [e, c] = *s.terms().begin();
            ent.exponents = e;
            ent.coefficient = c;
        }
        rows.push_back(ent.exponents);
        form.entries.push_back(std::move(ent));
    }
    if (qmat_rank(rows) != p.m)
        throw error(ErrorCode::InvalidPreparedForm,
                    "final exponent matrix does not have rank m");
    return form;
}

bool check_injectivity(const PreparedPair& p, long degree_bound) {
    p.validate();
    // working truncation: degree_bound * max-order + 1
    Rat maxord(1);
    for (std::size_t i = 1; i <= p.m; ++i) {
        TruncatedSeries im = p.x_image(i);
        if (auto o = im.ord(); o && *o > maxord) maxord = *o;
    }
    Rat working = Rat(degree_bound) * maxord + 1;
    PreparedPair q = p;
    // single-monomial series are exact data, so the bound may be raised
    // freely; general series cap the usable precision at the stored trunc
    bool exact = true;
    for (std::size_t i = p.r + p.l + 1; i <= p.m; ++i)
        if (p.xseries.at(i).terms().size() > 1) exact = false;
    q.trunc = exact ? working : std::min(p.trunc, working);
    q.trunc = std::max(q.trunc, Rat(1));

    std::vector<TruncatedSeries> images;
    for (std::size_t i = 1; i <= p.m; ++i) {
        if (i > p.r + p.l && p.xseries.at(i).terms().size() == 1) {
            auto [e, c] = *p.xseries.at(i).terms().begin();
            images.push_back(TruncatedSeries::monomial(p.n, q.field, q.trunc, e, c));
        } else if (i > p.r + p.l) {
            images.push_back(p.xseries.at(i).truncated(q.trunc));
        } else {
            images.push_back(q.x_image(i));
        }
    }

    // multi-indices |a| <= degree_bound over the m images
    std::vector<QVec> expos;
    QVec cur(p.m, Rat(0));
    std::function<void(std::size_t, long)> enumerate = [&](std::size_t pos, long left) {
        if (pos == p.m) {
            expos.push_back(cur);
            return;
        }
        for (long k = 0; k <= left; ++k) {
            cur[pos] = k;
            enumerate(pos + 1, left - k);
        }
        cur[pos] = 0;
    };
    enumerate(0, degree_bound);

    const FieldPtr& fld = q.field;
    std::size_t phi = fld->degree();
    std::vector<TruncatedSeries> images_of;
    for (const auto& a : expos) {
        TruncatedSeries acc =
            TruncatedSeries::constant(p.n, fld, q.trunc, fld->one());
        for (std::size_t i = 0; i < p.m; ++i) {
            if (a[i] == 0) continue;
            long k = (long)num(a[i]);
            for (long j = 0; j < k; ++j) acc = acc * images[i];
        }
        images_of.push_back(std::move(acc));
    }
    // collect the y-support union
    std::vector<QVec> support;
    for (const auto& im : images_of)
        for (const auto& [e, c] : im.terms())
            if (std::find(support.begin(), support.end(), e) == support.end())
                support.push_back(e);
    std::sort(support.begin(), support.end());

    // rows: one unknown (a, gamma) per field-basis power; columns (e, beta)
    QMat sys;
    for (std::size_t ai = 0; ai < images_of.size(); ++ai) {
        for (std::size_t gamma = 0; gamma < phi; ++gamma) {
            QVec row;
            row.reserve(support.size() * phi);
            FieldElem zg = fld->zeta_pow((long)gamma);
            for (const auto& e : support) {
                FieldElem c = images_of[ai].coeff(e);
                FieldElem prod = fld->mul(zg, c);
                for (std::size_t beta = 0; beta < phi; ++beta) row.push_back(prod.c[beta]);
            }
            sys.push_back(std::move(row));
        }
    }
    return !left_kernel_vector(sys).has_value();
}

bool verify(const PreparedPair& p0, const std::vector<Transformation>& cert) {
    PreparedPair cur = p0;
    cur.log.clear();
    try {
        cur.validate();
    } catch (const EngineError& e) {
        throw VerifyFailed(0, std::string("initial pair invalid: ") + e.what());
    }
    for (std::size_t stage = 0; stage < cert.size(); ++stage) {
        const Transformation& t = cert[stage];
        try {
            Substitution ysub = y_rewrite(cur, t);
            Substitution xsub = x_rewrite(cur, t);
            std::vector<TruncatedSeries> pres;
            for (std::size_t i = 1; i <= cur.m; ++i) pres.push_back(cur.x_image(i));
            PreparedPair next = apply(cur, t);
            // raw-substitution consistency: the old germ of x_i, rewritten to
            // the new y-coordinates, must equal the image of its new x-form
            for (std::size_t i = 1; i <= cur.m; ++i) {
                TruncatedSeries xi =
                    TruncatedSeries::variable(cur.m, cur.field, cur.trunc, i - 1);
                TruncatedSeries in_new_x = substitute(xi, xsub);
                TruncatedSeries rhs = next.pull_to_y(in_new_x);
                TruncatedSeries lhs = substitute(pres[i - 1], ysub);
                if (!lhs.equals(rhs))
                    throw error(ErrorCode::VerifyFailed,
                                "substitution replay mismatch on x_" + std::to_string(i));
            }
            if (t.post_s >= 0 &&
                ((long)next.s != t.post_s || (long)next.r != t.post_r ||
                 (long)next.l != t.post_l))
                throw error(ErrorCode::VerifyFailed, "recorded post-state type differs");
            if (next.s < cur.s || next.r < cur.r || next.r + next.l < cur.r + cur.l)
                throw error(ErrorCode::VerifyFailed, "type decreased");
            cur = std::move(next);
        } catch (const EngineError& e) {
            throw VerifyFailed((int)stage + 1,
                               "stage " + std::to_string(stage + 1) + ": " + e.what());
        }
    }
    return true;
}

} // namespace mono
