#include <mono/cyclotomic.hpp>
#include <mono/error.hpp>

#include <map>
#include <mutex>
#include <sstream>

namespace mono {

namespace {

// dense univariate polynomials over Q, low degree first
using Poly = QVec;

void trim(Poly& p) {
    while (!p.empty() && p.back() == 0) p.pop_back();
}

Poly poly_mul(const Poly& a, const Poly& b) {
    if (a.empty() || b.empty()) return {};
    Poly c(a.size() + b.size() - 1, Rat(0));
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
    }
    return c;
}

// division with remainder; divisor must be monic-ish (nonzero lead)
std::pair<Poly, Poly> poly_divmod(Poly a, const Poly& b) {
    trim(a);
    Poly q;
    if (b.empty() || b.back() == 0)
        throw error(ErrorCode::Internal, "division by zero polynomial");
    if (a.size() >= b.size()) q.assign(a.size() - b.size() + 1, Rat(0));
    while (a.size() >= b.size() && !a.empty()) {
        Rat f = a.back() / b.back();
        std::size_t shift = a.size() - b.size();
        q[shift] = f;
        for (std::size_t i = 0; i < b.size(); ++i) a[shift + i] -= f * b[i];
        trim(a);
        if (!q.empty() && a.size() >= b.size() && a.size() - b.size() == shift)
            throw error(ErrorCode::Internal, "poly division stalled");
    }
    return {q, a};
}

// cyclotomic polynomial by the x^m - 1 quotient formula
Poly cyclotomic_poly(long m) {
    if (m == 1) return Poly{Rat(-1), Rat(1)};
    Poly p(m + 1, Rat(0));
    p[0] = -1;
    p[m] = 1;
    for (long d = 1; d < m; ++d) {
        if (m % d != 0) continue;
        Poly cd = cyclotomic_poly(d);
        p = poly_divmod(p, cd).first;
    }
    return p;
}

long euler_phi(long m) {
    long result = m;
    long n = m;
    for (long p = 2; p * p <= n; ++p) {
        if (n % p) continue;
        while (n % p == 0) n /= p;
        result -= result / p;
    }
    if (n > 1) result -= result / n;
    return result;
}

std::mutex g_field_mutex;
std::map<long, FieldPtr> g_fields;

} // namespace

CycloField::CycloField(long m) : m_(m) {
    if (m < 4 || m % 4 != 0)
        throw error(ErrorCode::Internal, "cyclotomic modulus must be a positive multiple of 4");
    minpoly_ = cyclotomic_poly(m);
    phi_ = minpoly_.size() - 1;
    if ((long)phi_ != euler_phi(m))
        throw error(ErrorCode::Internal, "cyclotomic degree mismatch");
}

FieldPtr CycloField::make(long modulus) {
    std::lock_guard<std::mutex> lock(g_field_mutex);
    auto it = g_fields.find(modulus);
    if (it != g_fields.end()) return it->second;
    FieldPtr f(new CycloField(modulus));
    g_fields[modulus] = f;
    return f;
}

FieldElem CycloField::zero() const { return FieldElem{QVec(phi_, Rat(0))}; }

FieldElem CycloField::one() const {
    auto e = zero();
    e.c[0] = 1;
    return e;
}

FieldElem CycloField::from_rat(const Rat& r) const {
    auto e = zero();
    e.c[0] = r;
    return e;
}

QVec CycloField::reduce(QVec poly) const {
    trim(poly);
    if (poly.size() > phi_) poly = poly_divmod(std::move(poly), minpoly_).second;
    poly.resize(phi_, Rat(0));
    return poly;
}

FieldElem CycloField::zeta_pow(long j) const {
    j %= m_;
    if (j < 0) j += m_;
    QVec poly(j + 1, Rat(0));
    poly[j] = 1;
    return FieldElem{reduce(std::move(poly))};
}

bool CycloField::is_zero(const FieldElem& a) const {
    for (const auto& x : a.c)
        if (x != 0) return false;
    return true;
}

std::optional<Rat> CycloField::as_rational(const FieldElem& a) const {
    for (std::size_t i = 1; i < a.c.size(); ++i)
        if (a.c[i] != 0) return std::nullopt;
    return a.c.empty() ? Rat(0) : a.c[0];
}

FieldElem CycloField::add(const FieldElem& a, const FieldElem& b) const {
    FieldElem r = a;
    for (std::size_t i = 0; i < phi_; ++i) r.c[i] += b.c[i];
    return r;
}

FieldElem CycloField::sub(const FieldElem& a, const FieldElem& b) const {
    FieldElem r = a;
    for (std::size_t i = 0; i < phi_; ++i) r.c[i] -= b.c[i];
    return r;
}

FieldElem CycloField::neg(const FieldElem& a) const {
    FieldElem r = a;
    for (auto& x : r.c) x = -x;
    return r;
}

FieldElem CycloField::mul(const FieldElem& a, const FieldElem& b) const {
    return FieldElem{reduce(poly_mul(a.c, b.c))};
}

FieldElem CycloField::mul_rat(const FieldElem& a, const Rat& r) const {
    FieldElem out = a;
    for (auto& x : out.c) x *= r;
    return out;
}

FieldElem CycloField::inv(const FieldElem& a) const {
    if (is_zero(a)) throw error(ErrorCode::Internal, "field inverse of zero");
    // extended Euclid in Q[x] against the (irreducible) cyclotomic polynomial
    Poly r0 = minpoly_, r1 = a.c;
    trim(r1);
    Poly t0{}, t1{Rat(1)};
    while (!r1.empty()) {
        auto [q, r2] = poly_divmod(r0, r1);
        Poly qt = poly_mul(q, t1);
        Poly t2 = t0;
        t2.resize(std::max(t2.size(), qt.size()), Rat(0));
        for (std::size_t i = 0; i < qt.size(); ++i) t2[i] -= qt[i];
        trim(t2);
        r0 = std::move(r1);
        r1 = std::move(r2);
        t0 = std::move(t1);
        t1 = std::move(t2);
    }
    if (r0.size() != 1)
        throw error(ErrorCode::Internal, "cyclotomic polynomial not coprime to element");
    Rat lead = r0[0];
    for (auto& x : t0) x /= lead;
    return FieldElem{reduce(std::move(t0))};
}

std::optional<std::pair<Rat, long>> CycloField::unit_normal(const FieldElem& a) const {
    if (is_zero(a)) return std::nullopt;
    for (long j = 0; j < m_; ++j) {
        FieldElem q = mul(a, zeta_pow(-j));
        auto r = as_rational(q);
        if (r && *r > 0) return std::make_pair(*r, j);
    }
    return std::nullopt;
}

FieldElem CycloField::pow_rational(const FieldElem& a, const Rat& e) const {
    if (is_integer(e)) {
        Int p = num(e);
        if (is_zero(a)) {
            if (p <= 0) throw error(ErrorCode::Internal, "0^nonpositive");
            return zero();
        }
        FieldElem base = p < 0 ? inv(a) : a;
        Int k = boost::multiprecision::abs(p);
        FieldElem acc = one();
        while (k > 0) {
            if (k % 2 == 1) acc = mul(acc, base);
            base = mul(base, base);
            k /= 2;
        }
        return acc;
    }
    auto un = unit_normal(a);
    long q = (long)den(e);
    if (!un)
        throw mono::FieldExtensionRequired(
            m_ * q, "constant is not a root of unity times a positive rational");
    auto [rho, j] = *un;
    Rat rho_pow;
    if (!rat_pow_exact(rho, e, rho_pow))
        throw mono::FieldExtensionRequired(
            m_ * q, "rational part " + rat_to_string(rho) + " has no exact power " + rat_to_string(e));
    Int jp = Int(j) * num(e);
    if (jp % q != 0) {
        long g = (long)gcd_int(boost::multiprecision::abs(jp), Int(q));
        throw mono::FieldExtensionRequired(
            m_ * (q / g), "needs zeta_" + std::to_string(m_ * (q / g)));
    }
    long jpq = (long)(jp / q % m_);
    return mul_rat(zeta_pow(jpq), rho_pow);
}

FieldElem CycloField::embed(const CycloField& sub, const FieldElem& a) const {
    if (m_ % sub.m_ != 0)
        throw error(ErrorCode::Internal, "embed: not a subfield");
    long step = m_ / sub.m_;
    FieldElem acc = zero();
    for (std::size_t i = 0; i < a.c.size(); ++i) {
        if (a.c[i] == 0) continue;
        acc = add(acc, mul_rat(zeta_pow((long)i * step), a.c[i]));
    }
    return acc;
}

std::string CycloField::to_string(const FieldElem& a) const {
    std::ostringstream os;
    bool first = true;
    for (std::size_t i = 0; i < a.c.size(); ++i) {
        if (a.c[i] == 0) continue;
        if (!first) os << " + ";
        os << rat_to_string(a.c[i]);
        if (i > 0) os << "*z^" << i;
        first = false;
    }
    if (first) os << "0";
    return os.str();
}

FieldPtr join_fields(const FieldPtr& a, const FieldPtr& b) {
    if (a->modulus() == b->modulus()) return a;
    long l = (long)lcm_int(Int(a->modulus()), Int(b->modulus()));
    return CycloField::make(l);
}

} // namespace mono
