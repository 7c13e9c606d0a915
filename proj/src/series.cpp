#include <mono/series.hpp>
#include <mono/error.hpp>

#include <algorithm>
#include <sstream>

namespace mono {

namespace {

Rat total_degree(const QVec& e) {
    Rat d(0);
    for (const auto& x : e) d += x;
    return d;
}

} // namespace

TruncatedSeries::TruncatedSeries(std::size_t nvars, FieldPtr field, Rat trunc)
    : nvars_(nvars), field_(std::move(field)), trunc_(std::move(trunc)) {}

TruncatedSeries TruncatedSeries::zero(std::size_t nvars, FieldPtr field, Rat trunc) {
    return TruncatedSeries(nvars, std::move(field), std::move(trunc));
}

TruncatedSeries TruncatedSeries::constant(std::size_t nvars, FieldPtr field, Rat trunc,
                                          const FieldElem& c) {
    TruncatedSeries s(nvars, field, trunc);
    s.set_term(QVec(nvars, Rat(0)), c);
    return s;
}

TruncatedSeries TruncatedSeries::monomial(std::size_t nvars, FieldPtr field, Rat trunc,
                                          const QVec& exps, const FieldElem& c) {
    TruncatedSeries s(nvars, field, trunc);
    s.set_term(exps, c);
    return s;
}

TruncatedSeries TruncatedSeries::variable(std::size_t nvars, FieldPtr field, Rat trunc,
                                          std::size_t idx) {
    QVec e(nvars, Rat(0));
    e[idx] = 1;
    FieldElem one = field->one();
    return monomial(nvars, std::move(field), std::move(trunc), e, one);
}

Int TruncatedSeries::denom() const {
    Int d = 1;
    for (const auto& [e, c] : terms_)
        for (const auto& x : e) d = lcm_int(d, den(x));
    return d;
}

std::optional<Rat> TruncatedSeries::ord() const {
    std::optional<Rat> best;
    for (const auto& [e, c] : terms_) {
        Rat d = total_degree(e);
        if (!best || d < *best) best = d;
    }
    return best;
}

bool TruncatedSeries::is_unit() const {
    auto o = ord();
    return o && *o == 0;
}

FieldElem TruncatedSeries::constant_term() const {
    return coeff(QVec(nvars_, Rat(0)));
}

FieldElem TruncatedSeries::coeff(const QVec& e) const {
    auto it = terms_.find(e);
    if (it == terms_.end()) return field_->zero();
    return it->second;
}

void TruncatedSeries::set_term(const QVec& e, const FieldElem& c) {
    if (e.size() != nvars_)
        throw error(ErrorCode::Internal, "term exponent arity mismatch");
    for (const auto& x : e)
        if (x < 0) throw error(ErrorCode::NotRepresentable, "negative exponent in series term");
    if (total_degree(e) >= trunc_) return;
    if (field_->is_zero(c))
        terms_.erase(e);
    else
        terms_[e] = c;
}

void TruncatedSeries::add_term(const QVec& e, const FieldElem& c) {
    auto it = terms_.find(e);
    if (it == terms_.end()) {
        set_term(e, c);
        return;
    }
    FieldElem s = field_->add(it->second, c);
    if (field_->is_zero(s))
        terms_.erase(it);
    else
        it->second = s;
}

void TruncatedSeries::check_compatible(const TruncatedSeries& o) const {
    if (nvars_ != o.nvars_)
        throw error(ErrorCode::Internal, "series arity mismatch");
    if (field_->modulus() != o.field_->modulus())
        throw error(ErrorCode::Internal, "series field mismatch; promote first");
}

TruncatedSeries TruncatedSeries::operator+(const TruncatedSeries& o) const {
    if (field_->modulus() != o.field_->modulus()) {
        FieldPtr f = join_fields(field_, o.field_);
        return promoted(f) + o.promoted(f);
    }
    check_compatible(o);
    TruncatedSeries r = *this;
    r.trunc_ = std::min(trunc_, o.trunc_);
    // re-truncate if the bound tightened
    if (r.trunc_ != trunc_) r = truncated(r.trunc_);
    for (const auto& [e, c] : o.terms_) {
        if (total_degree(e) >= r.trunc_) continue;
        r.add_term(e, c);
    }
    return r;
}

TruncatedSeries TruncatedSeries::operator-(const TruncatedSeries& o) const {
    return *this + (-o);
}

TruncatedSeries TruncatedSeries::operator-() const {
    TruncatedSeries r = *this;
    for (auto& [e, c] : r.terms_) c = field_->neg(c);
    return r;
}

TruncatedSeries TruncatedSeries::operator*(const TruncatedSeries& o) const {
    if (field_->modulus() != o.field_->modulus()) {
        FieldPtr f = join_fields(field_, o.field_);
        return promoted(f) * o.promoted(f);
    }
    check_compatible(o);
    TruncatedSeries r(nvars_, field_, std::min(trunc_, o.trunc_));
    for (const auto& [e1, c1] : terms_) {
        Rat d1 = total_degree(e1);
        if (d1 >= r.trunc_) continue;
        for (const auto& [e2, c2] : o.terms_) {
            if (d1 + total_degree(e2) >= r.trunc_) continue;
            QVec e(e1);
            for (std::size_t i = 0; i < nvars_; ++i) e[i] += e2[i];
            r.add_term(e, field_->mul(c1, c2));
        }
    }
    return r;
}

TruncatedSeries TruncatedSeries::scaled(const FieldElem& c) const {
    TruncatedSeries r(nvars_, field_, trunc_);
    if (field_->is_zero(c)) return r;
    for (const auto& [e, x] : terms_) r.terms_[e] = field_->mul(x, c);
    return r;
}

TruncatedSeries TruncatedSeries::scaled_rat(const Rat& f) const {
    return scaled(field_->from_rat(f));
}

bool TruncatedSeries::equals(const TruncatedSeries& o) const {
    if (field_->modulus() != o.field_->modulus()) {
        FieldPtr f = join_fields(field_, o.field_);
        return promoted(f).equals(o.promoted(f));
    }
    return nvars_ == o.nvars_ && terms_ == o.terms_;
}

TruncatedSeries TruncatedSeries::promoted(const FieldPtr& f) const {
    if (f->modulus() == field_->modulus()) return *this;
    TruncatedSeries r(nvars_, f, trunc_);
    for (const auto& [e, c] : terms_) r.terms_[e] = f->embed(*field_, c);
    return r;
}

TruncatedSeries TruncatedSeries::truncated(const Rat& bound) const {
    TruncatedSeries r(nvars_, field_, std::min(bound, trunc_));
    for (const auto& [e, c] : terms_)
        if (total_degree(e) < r.trunc_) r.terms_[e] = c;
    return r;
}

TruncatedSeries TruncatedSeries::derivative(std::size_t var) const {
    TruncatedSeries r(nvars_, field_, trunc_);
    for (const auto& [e, c] : terms_) {
        if (e[var] == 0) continue;
        QVec d(e);
        Rat k = d[var];
        d[var] -= 1;
        r.add_term(d, field_->mul_rat(c, k));
    }
    return r;
}

TruncatedSeries TruncatedSeries::coeff_in_var(std::size_t var, const Rat& k) const {
    TruncatedSeries r(nvars_, field_, trunc_);
    for (const auto& [e, c] : terms_) {
        if (e[var] != k) continue;
        QVec d(e);
        d[var] = 0;
        r.add_term(d, c);
    }
    return r;
}

TruncatedSeries TruncatedSeries::restrict_to_var(std::size_t var) const {
    TruncatedSeries r(nvars_, field_, trunc_);
    for (const auto& [e, c] : terms_) {
        bool pure = true;
        for (std::size_t i = 0; i < nvars_ && pure; ++i)
            if (i != var && e[i] != 0) pure = false;
        if (pure) r.add_term(e, c);
    }
    return r;
}

TruncatedSeries TruncatedSeries::set_var_zero(std::size_t var) const {
    TruncatedSeries r(nvars_, field_, trunc_);
    for (const auto& [e, c] : terms_)
        if (e[var] == 0) r.add_term(e, c);
    return r;
}

Rat TruncatedSeries::var_multiplicity(std::size_t var) const {
    std::optional<Rat> m;
    for (const auto& [e, c] : terms_)
        if (!m || e[var] < *m) m = e[var];
    return m ? *m : Rat(0);
}

TruncatedSeries TruncatedSeries::divide_monomial(const QVec& e) const {
    TruncatedSeries r(nvars_, field_, trunc_);
    for (const auto& [t, c] : terms_) {
        QVec d(t);
        for (std::size_t i = 0; i < nvars_; ++i) {
            d[i] -= e[i];
            if (d[i] < 0)
                throw error(ErrorCode::NotRepresentable, "monomial does not divide series");
        }
        r.add_term(d, c);
    }
    return r;
}

std::string TruncatedSeries::to_string(const std::vector<std::string>& names) const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [e, c] : terms_) {
        if (!first) os << " + ";
        first = false;
        os << "(" << field_->to_string(c) << ")";
        for (std::size_t i = 0; i < nvars_; ++i) {
            if (e[i] == 0) continue;
            os << "*";
            if (i < names.size()) os << names[i];
            else os << "v" << (i + 1);
            if (e[i] != 1) os << "^" << rat_to_string(e[i]);
        }
    }
    return os.str();
}

Assignment Assignment::product(std::vector<SubstFactor> factors) {
    Assignment a;
    a.kind_ = Kind::Product;
    a.factors_ = std::move(factors);
    return a;
}

Assignment Assignment::series(TruncatedSeries body) {
    Assignment a;
    a.kind_ = Kind::Series;
    a.translation_ = body.field()->zero();
    a.body_ = std::move(body);
    a.has_translation_ = false;
    if (auto o = a.body_.ord(); o && *o == 0)
        throw error(ErrorCode::TruncationExhausted,
                    "assigned series has order 0 without a declared translation");
    return a;
}

Assignment Assignment::series(FieldElem translation, TruncatedSeries body) {
    Assignment a;
    a.kind_ = Kind::Series;
    a.has_translation_ = !body.field()->is_zero(translation);
    a.translation_ = std::move(translation);
    a.body_ = std::move(body);
    if (auto o = a.body_.ord(); o && *o == 0)
        throw error(ErrorCode::TruncationExhausted,
                    "assigned series has order 0 beyond its declared translation");
    return a;
}

Substitution::Substitution(std::size_t nvars_in, std::size_t nvars_out, FieldPtr field, Rat trunc)
    : nvars_in_(nvars_in), nvars_out_(nvars_out),
      field_(std::move(field)), trunc_(std::move(trunc)),
      assignments_(nvars_in) {}

Substitution Substitution::identity(std::size_t nvars, FieldPtr field, Rat trunc) {
    Substitution s(nvars, nvars, field, trunc);
    for (std::size_t v = 0; v < nvars; ++v)
        s.set(v, Assignment::product({SubstFactor{v, Rat(1), field->zero()}}));
    return s;
}

void Substitution::set(std::size_t var, Assignment a) {
    if (var >= nvars_in_)
        throw error(ErrorCode::Internal, "substitution variable out of range");
    assignments_[var] = std::move(a);
}

bool Substitution::assigned(std::size_t var) const { return bool(assignments_[var]); }

const Assignment& Substitution::at(std::size_t var) const {
    if (!assignments_[var])
        throw error(ErrorCode::TruncationExhausted,
                    "substitution does not cover variable " + std::to_string(var + 1));
    return *assignments_[var];
}

namespace {

// integer power by repeated squaring with truncation
TruncatedSeries series_int_pow(const TruncatedSeries& s, Int k) {
    TruncatedSeries acc =
        TruncatedSeries::constant(s.nvars(), s.field(), s.trunc(), s.field()->one());
    TruncatedSeries base = s;
    while (k > 0) {
        if (k % 2 == 1) acc = acc * base;
        base = base * base;
        k /= 2;
    }
    return acc;
}

// (y_var + alpha)^e as a series on nvars_out variables
TruncatedSeries factor_power(const SubstFactor& f, const Rat& e,
                             std::size_t nvars_out, const FieldPtr& field, const Rat& trunc) {
    if (f.var >= nvars_out)
        throw error(ErrorCode::Internal, "substitution factor variable out of range");
    if (field->is_zero(f.alpha)) {
        Rat ex = f.exp * e;
        if (ex < 0)
            throw error(ErrorCode::NotRepresentable,
                        "negative exponent in monomial substitution image");
        QVec mono(nvars_out, Rat(0));
        mono[f.var] = ex;
        return TruncatedSeries::monomial(nvars_out, field, trunc, mono, field->one());
    }
    TruncatedSeries base =
        TruncatedSeries::constant(nvars_out, field, trunc, f.alpha);
    QVec mono(nvars_out, Rat(0));
    mono[f.var] = 1;
    base.add_term(mono, field->one());
    return unit_pow(base, f.exp * e);
}

TruncatedSeries assignment_power(const Assignment& a, const Rat& e,
                                 std::size_t nvars_out, const FieldPtr& field, const Rat& trunc) {
    if (a.kind() == Assignment::Kind::Product) {
        TruncatedSeries acc =
            TruncatedSeries::constant(nvars_out, field, trunc, field->one());
        for (const auto& f : a.factors())
            acc = acc * factor_power(f, e, nvars_out, field, trunc);
        return acc;
    }
    TruncatedSeries base = a.body().promoted(field).truncated(trunc);
    if (base.nvars() != nvars_out)
        throw error(ErrorCode::Internal, "assignment body arity mismatch");
    if (a.has_translation()) {
        FieldElem alpha = field->embed(*a.body().field(), a.translation());
        base.add_term(QVec(nvars_out, Rat(0)), alpha);
        return unit_pow(base, e);
    }
    if (is_integer(e) && e >= 0) return series_int_pow(base, num(e));
    if (base.terms().size() == 1) {
        const auto& [me, mc] = *base.terms().begin();
        QVec ex(me);
        for (auto& x : ex) {
            x *= e;
            if (x < 0)
                throw error(ErrorCode::NotRepresentable,
                            "negative exponent from fractional substitution power");
        }
        return TruncatedSeries::monomial(nvars_out, field, trunc, ex,
                                         field->pow_rational(mc, e));
    }
    throw error(ErrorCode::NotAUnit,
                "fractional power of a non-monomial, non-unit substitution image");
}

} // namespace

TruncatedSeries substitute(const TruncatedSeries& g, const Substitution& sigma) {
    if (g.nvars() != sigma.nvars_in())
        throw error(ErrorCode::Internal, "substitution arity mismatch");
    FieldPtr field = join_fields(g.field(), sigma.field());
    Rat trunc = std::min(g.trunc(), sigma.trunc());
    TruncatedSeries out = TruncatedSeries::zero(sigma.nvars_out(), field, trunc);

    // power cache per variable
    std::vector<std::map<Rat, TruncatedSeries>> cache(g.nvars());

    for (const auto& [e, c] : g.terms()) {
        TruncatedSeries term =
            TruncatedSeries::constant(sigma.nvars_out(), field, trunc,
                                      field->embed(*g.field(), c));
        for (std::size_t v = 0; v < g.nvars() && !term.is_zero(); ++v) {
            if (e[v] == 0) continue;
            auto it = cache[v].find(e[v]);
            if (it == cache[v].end()) {
                TruncatedSeries p =
                    assignment_power(sigma.at(v), e[v], sigma.nvars_out(), field, trunc);
                it = cache[v].emplace(e[v], std::move(p)).first;
            }
            term = term * it->second;
        }
        out = out + term;
    }
    return out;
}

TruncatedSeries unit_pow(const TruncatedSeries& u, const Rat& lambda) {
    auto o = u.ord();
    if (!o || *o != 0)
        throw error(ErrorCode::NotAUnit, "unit_pow on a non-unit series");
    const FieldPtr& field = u.field();
    FieldElem c0 = u.constant_term();
    FieldElem c0_pow = field->pow_rational(c0, lambda);

    // w = u / c0 - 1 has order >= 1
    TruncatedSeries w = u.scaled(field->inv(c0));
    w.add_term(QVec(u.nvars(), Rat(0)), field->neg(field->one()));

    TruncatedSeries acc =
        TruncatedSeries::constant(u.nvars(), field, u.trunc(), field->one());
    TruncatedSeries wk = acc;   // w^k
    Rat binom(1);               // lambda choose k
    Rat kfac_arg = lambda;
    long k = 1;
    while (true) {
        wk = wk * w;
        if (wk.is_zero()) break;
        binom = binom * kfac_arg / Rat(k);
        kfac_arg -= 1;
        acc = acc + wk.scaled_rat(binom);
        ++k;
        if (k > 4096)
            throw error(ErrorCode::IterationLimit, "unit_pow expansion runaway");
    }
    return acc.scaled(c0_pow);
}

TruncatedSeries unit_inverse(const TruncatedSeries& u) {
    return unit_pow(u, Rat(-1));
}

std::optional<Rat> ord_in_last(const TruncatedSeries& f, std::size_t var) {
    TruncatedSeries r = f.restrict_to_var(var);
    if (r.is_zero()) return std::nullopt;
    return r.ord();
}

TschirnhausResult tschirnhaus(const TruncatedSeries& f, std::size_t var, long t) {
    auto o = ord_in_last(f, var);
    if (t < 1 || !o || *o != t)
        throw error(ErrorCode::InvalidOrder,
                    "tschirnhaus: distinguished order does not match t");
    const FieldPtr& field = f.field();
    Rat trunc = f.trunc();
    std::size_t n = f.nvars();

    // G = d^(t-1) F / d var^(t-1); G = unit * (var - phi)
    TruncatedSeries g = f;
    for (long i = 0; i < t - 1; ++i) g = g.derivative(var);
    TruncatedSeries gd = g.derivative(var);

    TruncatedSeries phi = TruncatedSeries::zero(n, field, trunc);
    for (int iter = 0;; ++iter) {
        if (iter > 64)
            throw error(ErrorCode::IterationLimit, "tschirnhaus Newton runaway");
        Substitution sub = Substitution::identity(n, field, trunc);
        sub.set(var, Assignment::series(phi));
        TruncatedSeries gval = substitute(g, sub);
        if (gval.is_zero()) break;
        TruncatedSeries gder = substitute(gd, sub);
        if (!gder.is_unit())
            throw error(ErrorCode::InvalidOrder, "tschirnhaus: implicit derivative not a unit");
        phi = phi - gval * unit_inverse(gder);
        if (phi.coeff(QVec(n, Rat(0))).c.size() && !field->is_zero(phi.constant_term()))
            throw error(ErrorCode::Internal, "tschirnhaus: phi acquired a constant term");
    }

    // fbar = F(var -> var + phi)
    Substitution sub = Substitution::identity(n, field, trunc);
    QVec ve(n, Rat(0));
    ve[var] = 1;
    TruncatedSeries body =
        TruncatedSeries::monomial(n, field, trunc, ve, field->one()) + phi;
    sub.set(var, Assignment::series(body));
    TruncatedSeries fbar = substitute(f, sub);
    return TschirnhausResult{std::move(phi), std::move(fbar)};
}

FieldElem residue(const TruncatedSeries& u) {
    if (!u.is_unit())
        throw error(ErrorCode::NotAUnit, "residue of a non-unit series");
    return u.constant_term();
}

} // namespace mono
