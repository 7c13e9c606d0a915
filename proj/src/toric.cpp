#include <mono/toric.hpp>
#include <mono/error.hpp>

#include <algorithm>
#include <functional>
#include <numeric>

namespace mono {

namespace {

bool dominates(const QVec& a, const QVec& b) {
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] < b[i]) return false;
    return true;
}

} // namespace

MonomialIdeal::MonomialIdeal(std::size_t nvars, std::vector<QVec> generators)
    : nvars_(nvars), gens_(std::move(generators)) {
    for (const auto& g : gens_) {
        if (g.size() != nvars_)
            throw error(ErrorCode::Internal, "generator arity mismatch");
        for (const auto& e : g)
            if (e < 0) throw error(ErrorCode::NotRepresentable, "negative generator exponent");
    }
    minimalize();
}

void MonomialIdeal::minimalize() {
    std::sort(gens_.begin(), gens_.end());
    gens_.erase(std::unique(gens_.begin(), gens_.end()), gens_.end());
    std::vector<QVec> kept;
    for (const auto& g : gens_) {
        bool redundant = false;
        for (const auto& h : gens_)
            if (h != g && dominates(g, h)) { redundant = true; break; }
        if (!redundant) kept.push_back(g);
    }
    gens_ = std::move(kept);
}

void TransformSeq::push(const ElementaryBlowup& b) {
    if (b.i >= nvars_ || b.j >= nvars_ || b.i == b.j)
        throw error(ErrorCode::Internal, "bad blowup indices");
    if (b.chart != b.i && b.chart != b.j)
        throw error(ErrorCode::Internal, "chart must pick one of the pair");
    steps_.push_back(b);
}

void TransformSeq::append(const TransformSeq& other) {
    if (other.nvars_ != nvars_)
        throw error(ErrorCode::Internal, "appending sequence of different arity");
    for (const auto& s : other.steps_) steps_.push_back(s);
}

IMat TransformSeq::matrix() const {
    IMat a = imat_identity(nvars_);
    for (const auto& b : steps_) {
        // step matrix: identity except row `divided` gains 1 in column `chart`
        std::size_t divided = (b.chart == b.i) ? b.j : b.i;
        // multiply a by the step matrix on the right: column ops
        for (std::size_t r = 0; r < nvars_; ++r)
            a[r][b.chart] += a[r][divided];
    }
    return a;
}

Int TransformSeq::det() const { return imat_det(matrix()); }

QVec TransformSeq::transform_exponent(QVec e) const {
    for (const auto& b : steps_) {
        std::size_t divided = (b.chart == b.i) ? b.j : b.i;
        e[b.chart] += e[divided];
    }
    return e;
}

std::vector<GroupValue> TransformSeq::transform_values(std::vector<GroupValue> w) const {
    for (const auto& b : steps_) {
        std::size_t divided = (b.chart == b.i) ? b.j : b.i;
        w[divided] = w[divided] - w[b.chart];
    }
    return w;
}

// ---------------------------------------------------------------------
// Lemma 25

PerronResult perron(const std::vector<GroupValue>& w_in, const QVec& dependence,
                    const SquarefreeBasis& basis) {
    if (w_in.size() < 2)
        throw error(ErrorCode::Internal, "perron needs at least two values");
    const std::size_t s = w_in.size() - 1;
    const std::size_t z = s;   // index of the dependent slot
    if (dependence.size() != s)
        throw error(ErrorCode::Internal, "dependence vector length mismatch");

    for (std::size_t i = 0; i < s; ++i)
        if (!value_positive(w_in[i], basis))
            throw error(ErrorCode::NotIndependent,
                        "independent value " + std::to_string(i + 1) + " not positive");
    {
        std::vector<GroupValue> head(w_in.begin(), w_in.begin() + s);
        if (rational_relation(head))
            throw error(ErrorCode::NotIndependent, "first s values admit a rational relation");
    }
    {
        GroupValue acc = monomial_value(std::vector<GroupValue>(w_in.begin(), w_in.begin() + s),
                                        dependence);
        if (!(acc == w_in[z]))
            throw error(ErrorCode::NotDependent, "supplied dependence does not reproduce w[s+1]");
        GroupValue zero = GroupValue::zero(w_in[z].rank(), w_in[z].level(0).dim());
        if (compare(w_in[z], zero, basis) == Ordering::Less)
            throw error(ErrorCode::NotDependent, "dependent value must be >= 0");
    }

    std::vector<GroupValue> w = w_in;
    TransformSeq seq(s + 1);

    // integer certificate: q * w[z] = sum p_i * w[i]
    Int q = 1;
    for (const auto& c : dependence) q = lcm_int(q, den(c));
    IVec p(s);
    for (std::size_t i = 0; i < s; ++i)
        p[i] = num(dependence[i]) * (q / den(dependence[i]));

    auto blow = [&](std::size_t a, std::size_t b, std::size_t chart) {
        ElementaryBlowup step{a, b, chart};
        seq.push(step);
        std::size_t divided = (chart == a) ? b : a;
        w[divided] = w[divided] - w[chart];
    };

    const long cap = 200000;
    for (long iter = 0; iter < cap; ++iter) {
        bool zero_p = std::all_of(p.begin(), p.end(), [](const Int& x) { return x == 0; });
        if (zero_p) {
            PerronResult res{std::move(seq), std::move(w), true};
            return res;
        }

        // exact tie test: p == q * e_i  <=>  w[z] == w[i]
        std::size_t tie = s;
        bool has_negative = false;
        for (std::size_t i = 0; i < s; ++i) {
            if (p[i] < 0) has_negative = true;
        }
        if (!has_negative) {
            for (std::size_t i = 0; i < s; ++i) {
                if (p[i] != q) continue;
                bool rest = true;
                for (std::size_t k = 0; k < s; ++k)
                    if (k != i && p[k] != 0) { rest = false; break; }
                if (rest) { tie = i; break; }
            }
        }
        if (tie < s) {
            // w[z] equals w[tie]; dividing by x_tie zeroes the dependent slot
            blow(tie, z, tie);
            p[tie] = 0;
            continue;
        }

        if (has_negative) {
            // mixed pair: one blow-up strictly reduces sum |p|
            std::size_t pi = s, pj = s;
            for (std::size_t i = 0; i < s && pi == s; ++i)
                if (p[i] > 0) pi = i;
            for (std::size_t j = 0; j < s && pj == s; ++j)
                if (p[j] < 0) pj = j;
            Ordering ord = compare(w[pi], w[pj], basis);
            if (ord == Ordering::Equal)
                throw error(ErrorCode::Internal, "independent values tied in perron");
            if (ord == Ordering::Less) {
                blow(pi, pj, pi);     // w[pj] -= w[pi]
                p[pi] += p[pj];
            } else {
                blow(pi, pj, pj);     // w[pi] -= w[pj]
                p[pj] += p[pi];
            }
            continue;
        }

        // all p >= 0 here
        std::size_t big = s;
        for (std::size_t i = 0; i < s; ++i)
            if (p[i] >= q) { big = i; break; }
        if (big < s) {
            // q*w[z] = sum p w >= q*w[big] + positive rest, so w[z] > w[big]
            blow(big, z, big);
            p[big] -= q;
            continue;
        }

        // all 0 <= p_i < q: look for a divisor variable above w[z]
        std::size_t bmove = s;
        for (std::size_t i = 0; i < s; ++i) {
            if (p[i] == 0) continue;
            if (compare(w[i], w[z], basis) == Ordering::Greater) { bmove = i; break; }
        }
        if (bmove < s) {
            blow(bmove, z, z);        // w[bmove] -= w[z]
            q -= p[bmove];
            if (q <= 0)
                throw error(ErrorCode::Internal, "perron certificate degenerated");
            continue;
        }

        // every active variable sits below w[z]: subtract the largest one,
        // sending its coefficient negative; the mixed-pair rule takes over
        std::size_t dmove = s;
        for (std::size_t i = 0; i < s; ++i) {
            if (p[i] == 0) continue;
            if (dmove == s || compare(w[i], w[dmove], basis) == Ordering::Greater) dmove = i;
        }
        if (dmove == s)
            throw error(ErrorCode::Internal, "perron found no admissible move");
        blow(dmove, z, dmove);
        p[dmove] -= q;
    }
    throw error(ErrorCode::IterationLimit, "perron exceeded its iteration budget");
}

// ---------------------------------------------------------------------
// Lemma 21

PrincipalizeResult principalize(const MonomialIdeal& ideal,
                                const std::vector<GroupValue>& weights,
                                const SquarefreeBasis& basis) {
    const std::size_t n = ideal.nvars();
    if (weights.size() != n)
        throw error(ErrorCode::Internal, "weight count mismatch");
    if (rational_relation(weights))
        throw error(ErrorCode::NotIndependent, "principalize requires independent weights");

    // generator exponents with their (invariant) values
    struct Gen {
        QVec e;
        GroupValue v;
    };
    std::vector<Gen> gens;
    for (const auto& g : ideal.generators())
        gens.push_back({g, monomial_value(weights, g)});

    TransformSeq seq(n);
    std::vector<GroupValue> w = weights;

    auto minimalize = [&]() {
        // drop duplicates, then anything dominating another generator
        std::sort(gens.begin(), gens.end(),
                  [](const Gen& a, const Gen& b) { return a.e < b.e; });
        gens.erase(std::unique(gens.begin(), gens.end(),
                               [](const Gen& a, const Gen& b) { return a.e == b.e; }),
                   gens.end());
        std::vector<Gen> kept;
        for (std::size_t a = 0; a < gens.size(); ++a) {
            bool redundant = false;
            for (std::size_t b = 0; b < gens.size() && !redundant; ++b)
                if (a != b && gens[a].e != gens[b].e && dominates(gens[a].e, gens[b].e))
                    redundant = true;
            if (!redundant) kept.push_back(gens[a]);
        }
        gens = std::move(kept);
    };
    auto blow = [&](std::size_t i, std::size_t j, std::size_t chart) {
        seq.push({i, j, chart});
        std::size_t divided = (chart == i) ? j : i;
        w[divided] = w[divided] - w[chart];
        for (auto& g : gens) g.e[chart] += g.e[divided];
    };

    minimalize();
    const long cap = 200000;
    long iter = 0;
    while (gens.size() > 1) {
        // minimal-value generator (values invariant, distinct by independence)
        std::size_t star = 0;
        for (std::size_t a = 1; a < gens.size(); ++a)
            if (compare(gens[a].v, gens[star].v, basis) == Ordering::Less) star = a;
        std::size_t other = gens.size();
        for (std::size_t a = 0; a < gens.size(); ++a)
            if (a != star && !dominates(gens[a].e, gens[star].e)) { other = a; break; }
        if (other == gens.size()) {
            minimalize();
            continue;
        }
        // pairwise Euclid on (star, other)
        while (!dominates(gens[other].e, gens[star].e)) {
            if (++iter > cap)
                throw error(ErrorCode::IterationLimit, "principalize exceeded its budget");
            std::size_t pi = n, pj = n;
            for (std::size_t c = 0; c < n; ++c) {
                if (pi == n && gens[other].e[c] > gens[star].e[c]) pi = c;
                if (pj == n && gens[other].e[c] < gens[star].e[c]) pj = c;
            }
            if (pi == n || pj == n)
                throw error(ErrorCode::Internal, "principalize lost its mixed pair");
            Ordering ord = compare(w[pi], w[pj], basis);
            if (ord == Ordering::Equal)
                throw error(ErrorCode::Internal, "tied independent values in principalize");
            blow(pi, pj, ord == Ordering::Less ? pi : pj);
        }
        minimalize();
    }
    if (gens.empty())
        throw error(ErrorCode::Internal, "principalize on the zero ideal");
    return PrincipalizeResult{std::move(seq), gens.front().e};
}

// ---------------------------------------------------------------------
// Lemma 26

MakeNonnegResult make_nonneg(const QVec& b, const QMat& c,
                             const std::vector<GroupValue>& x_weights,
                             const SquarefreeBasis& basis) {
    const std::size_t r = b.size();
    if (c.size() != r)
        throw error(ErrorCode::Internal, "make_nonneg matrix row count mismatch");
    QVec bc = qvec_mat(b, c);
    for (const auto& x : bc)
        if (x < 0)
            throw error(ErrorCode::NotRepresentable,
                        "pullback exponent has a negative component");

    QVec pos(r, Rat(0)), negv(r, Rat(0));
    bool any_neg = false;
    for (std::size_t i = 0; i < r; ++i) {
        if (b[i] >= 0) pos[i] = b[i];
        else { negv[i] = -b[i]; any_neg = true; }
    }
    if (!any_neg) return MakeNonnegResult{TransformSeq(r), b};

    MonomialIdeal pair(r, {pos, negv});
    auto pr = principalize(pair, x_weights, basis);
    QVec b_new = pr.seq.transform_exponent(pos);
    QVec n_new = pr.seq.transform_exponent(negv);
    for (std::size_t i = 0; i < r; ++i) {
        b_new[i] -= n_new[i];
        if (b_new[i] < 0)
            throw error(ErrorCode::Internal, "make_nonneg failed to clear negatives");
    }
    return MakeNonnegResult{std::move(pr.seq), std::move(b_new)};
}

// ---------------------------------------------------------------------
// Gordan / Hilbert machinery

namespace {

IVec primitive(QVec v) {
    Int l = 1;
    for (const auto& x : v) l = lcm_int(l, den(x));
    IVec w;
    for (const auto& x : v) w.push_back(num(x) * (l / den(x)));
    Int g = 0;
    for (const auto& x : w) g = gcd_int(g, boost::multiprecision::abs(x));
    if (g > 1)
        for (auto& x : w) x /= g;
    return w;
}

bool in_cone(const IVec& v, const IMat& c) {
    const std::size_t r = v.size(), s = c.empty() ? 0 : c[0].size();
    for (std::size_t j = 0; j < s; ++j) {
        Int acc = 0;
        for (std::size_t i = 0; i < r; ++i) acc += v[i] * c[i][j];
        if (acc < 0) return false;
    }
    return true;
}

// extreme rays of {v : vC >= 0}, pointed by assumption
std::vector<IVec> cone_rays(const IMat& c) {
    const std::size_t r = c.size();
    const std::size_t s = r ? c[0].size() : 0;
    std::vector<IVec> rays;
    if (r == 1) {
        IVec plus{Int(1)}, minus{Int(-1)};
        if (in_cone(plus, c)) rays.push_back(plus);
        if (in_cone(minus, c)) rays.push_back(minus);
        return rays;
    }
    std::vector<std::size_t> idx(s);
    std::iota(idx.begin(), idx.end(), 0);
    std::vector<std::size_t> subset;
    std::function<void(std::size_t)> rec = [&](std::size_t start) {
        if (subset.size() == r - 1) {
            // v with v . c_j = 0 for every chosen constraint: left kernel of
            // the r x (r-1) matrix whose columns are the chosen c_j
            QMat m(r, QVec(subset.size(), Rat(0)));
            for (std::size_t a = 0; a < subset.size(); ++a)
                for (std::size_t i = 0; i < r; ++i) m[i][a] = Rat(c[i][subset[a]]);
            auto kv = left_kernel(m);
            if (kv.size() != 1) return;
            for (int sign = -1; sign <= 1; sign += 2) {
                QVec cand = kv[0];
                for (auto& x : cand) x *= sign;
                IVec iv = primitive(cand);
                bool zero = std::all_of(iv.begin(), iv.end(), [](const Int& x) { return x == 0; });
                if (zero) continue;
                if (!in_cone(iv, c)) continue;
                if (std::find(rays.begin(), rays.end(), iv) == rays.end())
                    rays.push_back(iv);
            }
            return;
        }
        for (std::size_t j = start; j < s; ++j) {
            subset.push_back(idx[j]);
            rec(j + 1);
            subset.pop_back();
        }
    };
    rec(0);
    return rays;
}

// Hilbert basis of {v in Z^r : vC >= 0} by zonotope enumeration + reduction
std::vector<IVec> hilbert_basis(const IMat& c) {
    const std::size_t r = c.size();
    auto rays = cone_rays(c);
    if (rays.empty()) return {};
    IVec lo(r, Int(0)), hi(r, Int(0));
    for (const auto& rho : rays)
        for (std::size_t i = 0; i < r; ++i) {
            if (rho[i] > 0) hi[i] += rho[i];
            else lo[i] += rho[i];
        }
    Int cells = 1;
    for (std::size_t i = 0; i < r; ++i) {
        cells *= (hi[i] - lo[i] + 1);
        if (cells > 4000000)
            throw error(ErrorCode::InstanceTooLarge, "hilbert basis box too large");
    }
    std::vector<IVec> points;
    IVec cur(r);
    std::function<void(std::size_t)> enumerate = [&](std::size_t pos) {
        if (pos == r) {
            bool zero = std::all_of(cur.begin(), cur.end(), [](const Int& x) { return x == 0; });
            if (!zero && in_cone(cur, c)) points.push_back(cur);
            return;
        }
        for (Int v = lo[pos]; v <= hi[pos]; ++v) {
            cur[pos] = v;
            enumerate(pos + 1);
        }
    };
    enumerate(0);
    for (const auto& rho : rays)
        if (std::find(points.begin(), points.end(), rho) == points.end())
            points.push_back(rho);
    // reduce: drop x = y + z with y, z nonzero cone points
    std::vector<IVec> basis;
    for (const auto& x : points) {
        bool reducible = false;
        for (const auto& y : points) {
            if (y == x) continue;
            IVec d(r);
            bool zero = true;
            for (std::size_t i = 0; i < r; ++i) {
                d[i] = x[i] - y[i];
                if (d[i] != 0) zero = false;
            }
            if (zero) continue;
            if (in_cone(d, c)) { reducible = true; break; }
        }
        if (!reducible) basis.push_back(x);
    }
    std::sort(basis.begin(), basis.end());
    return basis;
}

} // namespace

ModuleGenerators module_generators(const IMat& c, const IVec& lambda) {
    const std::size_t r = c.size();
    const std::size_t s = r ? c[0].size() : 0;
    if (lambda.size() != s)
        throw error(ErrorCode::Internal, "lambda length mismatch");
    if (qmat_rank(imat_to_q(c)) != r)
        throw error(ErrorCode::RankDeficient, "matrix C must have full row rank");

    ModuleGenerators out;
    out.h_gens = hilbert_basis(c);

    // lattice G = {v : vC integral}: rows of diag(1/d_k) * U from U C V = D
    auto snf = smith_normal_form(c);
    QMat gbasis(r, QVec(r, Rat(0)));
    Int dcom = 1;
    for (std::size_t k = 0; k < r; ++k) {
        Int dk = snf.d[k][k];
        if (dk == 0) throw error(ErrorCode::RankDeficient, "degenerate Smith form");
        dcom = lcm_int(dcom, dk);
        for (std::size_t i = 0; i < r; ++i) gbasis[k][i] = Rat(snf.u[k][i], dk);
    }
    out.d = dcom;

    // cone in G-coordinates u (v = u * gbasis): pairing matrix is integral
    IMat cprime(r, IVec(s, Int(0)));
    for (std::size_t k = 0; k < r; ++k)
        for (std::size_t j = 0; j < s; ++j) {
            Rat acc(0);
            for (std::size_t i = 0; i < r; ++i) acc += gbasis[k][i] * Rat(c[i][j]);
            if (!is_integer(acc))
                throw error(ErrorCode::Internal, "G-pairing not integral");
            cprime[k][j] = num(acc);
        }

    auto to_v = [&](const IVec& u) {
        QVec v(r, Rat(0));
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t k = 0; k < r; ++k) v[i] += Rat(u[k]) * gbasis[k][i];
        return v;
    };

    for (const auto& u : hilbert_basis(cprime)) out.i_gens.push_back(to_v(u));

    // module generators of M_Lambda over H, enumerated in u-coordinates:
    // {u : u C' + lambda >= 0}, reduced by the Hilbert elements of H
    auto rays = cone_rays(cprime);
    // vertices of the shifted polyhedron (r-subsets of tight constraints)
    std::vector<QVec> verts;
    {
        std::vector<std::size_t> subset;
        std::function<void(std::size_t)> rec = [&](std::size_t start) {
            if (subset.size() == r) {
                QMat m(r, QVec(r, Rat(0)));
                QVec rhs(r, Rat(0));
                for (std::size_t a = 0; a < r; ++a) {
                    for (std::size_t k = 0; k < r; ++k) m[a][k] = Rat(cprime[k][subset[a]]);
                    rhs[a] = Rat(-lambda[subset[a]]);
                }
                // solve u * C'_subset = -lambda_subset: m is transposed pairing
                auto sol = solve_right(m, rhs);
                if (sol) {
                    // feasibility
                    bool ok = true;
                    for (std::size_t j = 0; j < s && ok; ++j) {
                        Rat acc(0);
                        for (std::size_t k = 0; k < r; ++k) acc += (*sol)[k] * Rat(cprime[k][j]);
                        if (acc + Rat(lambda[j]) < 0) ok = false;
                    }
                    if (ok) verts.push_back(*sol);
                }
                return;
            }
            for (std::size_t j = start; j < s; ++j) {
                subset.push_back(j);
                rec(j + 1);
                subset.pop_back();
            }
        };
        if (s >= r) rec(0);
    }
    if (verts.empty()) verts.push_back(QVec(r, Rat(0)));

    // Hilbert elements of H expressed in u-coordinates (H subset of G)
    std::vector<IVec> h_in_u;
    {
        auto ginv = qmat_inverse(gbasis);
        if (!ginv) throw error(ErrorCode::Internal, "G-basis not invertible");
        for (const auto& h : out.h_gens) {
            QVec hv;
            for (const auto& x : h) hv.push_back(Rat(x));
            QVec u = qvec_mat(hv, *ginv);
            IVec iu;
            for (const auto& x : u) {
                if (!is_integer(x))
                    throw error(ErrorCode::Internal, "H element outside G");
                iu.push_back(num(x));
            }
            h_in_u.push_back(iu);
        }
    }

    IVec lo(r), hi(r);
    for (std::size_t i = 0; i < r; ++i) {
        Rat mn = verts[0][i], mx = verts[0][i];
        for (const auto& v : verts) {
            mn = std::min(mn, v[i]);
            mx = std::max(mx, v[i]);
        }
        Int margin = 1;
        for (const auto& rho : rays) margin += boost::multiprecision::abs(rho[i]);
        for (const auto& h : h_in_u) margin += boost::multiprecision::abs(h[i]);
        lo[i] = rat_floor(mn) - margin;
        hi[i] = rat_floor(mx) + margin + 1;
    }
    Int cells = 1;
    for (std::size_t i = 0; i < r; ++i) {
        cells *= (hi[i] - lo[i] + 1);
        if (cells > 4000000)
            throw error(ErrorCode::InstanceTooLarge, "module generator box too large");
    }

    auto in_mlambda = [&](const IVec& u) {
        for (std::size_t j = 0; j < s; ++j) {
            Int acc = lambda[j];
            for (std::size_t k = 0; k < r; ++k) acc += u[k] * cprime[k][j];
            if (acc < 0) return false;
        }
        return true;
    };

    std::vector<IVec> mgen_u;
    IVec cur(r);
    std::function<void(std::size_t)> enumerate = [&](std::size_t pos) {
        if (pos == r) {
            if (!in_mlambda(cur)) return;
            for (const auto& h : h_in_u) {
                IVec d(r);
                for (std::size_t k = 0; k < r; ++k) d[k] = cur[k] - h[k];
                if (in_mlambda(d)) return;   // reducible
            }
            mgen_u.push_back(cur);
            return;
        }
        for (Int v = lo[pos]; v <= hi[pos]; ++v) {
            cur[pos] = v;
            enumerate(pos + 1);
        }
    };
    enumerate(0);
    for (const auto& u : mgen_u) out.m_gens.push_back(to_v(u));

    for (const auto& g : out.i_gens)
        for (const auto& x : g) out.d = lcm_int(out.d, den(x));
    for (const auto& g : out.m_gens)
        for (const auto& x : g) out.d = lcm_int(out.d, den(x));
    return out;
}

} // namespace mono
