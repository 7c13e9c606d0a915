#include <mono/matrix.hpp>
#include <mono/error.hpp>

#include <algorithm>
#include <sstream>

namespace mono {

std::string rat_to_string(const Rat& r) {
    std::ostringstream os;
    os << num(r);
    if (den(r) != 1) os << "/" << den(r);
    return os.str();
}

Rat rat_from_string(const std::string& s) {
    auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return Rat(Int(s));
        Int n(s.substr(0, slash));
        Int d(s.substr(slash + 1));
        if (d == 0) throw std::runtime_error("zero denominator");
        return Rat(n, d);
    } catch (const std::exception& e) {
        throw error(ErrorCode::Internal, "bad rational literal '" + s + "': " + e.what());
    }
}

QMat qmat_identity(std::size_t n) {
    QMat m(n, QVec(n, Rat(0)));
    for (std::size_t i = 0; i < n; ++i) m[i][i] = 1;
    return m;
}

QMat qmat_mul(const QMat& a, const QMat& b) {
    std::size_t n = a.size(), k = b.size(), p = k ? b[0].size() : 0;
    QMat c(n, QVec(p, Rat(0)));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < k; ++j) {
            if (a[i][j] == 0) continue;
            for (std::size_t l = 0; l < p; ++l) c[i][l] += a[i][j] * b[j][l];
        }
    return c;
}

QVec qvec_mat(const QVec& v, const QMat& a) {
    std::size_t n = a.size(), p = n ? a[0].size() : 0;
    QVec r(p, Rat(0));
    for (std::size_t i = 0; i < n; ++i) {
        if (v[i] == 0) continue;
        for (std::size_t j = 0; j < p; ++j) r[j] += v[i] * a[i][j];
    }
    return r;
}

QVec qmat_vec(const QMat& a, const QVec& v) {
    std::size_t n = a.size();
    QVec r(n, Rat(0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < v.size(); ++j) r[i] += a[i][j] * v[j];
    return r;
}

namespace {

// Gaussian elimination; returns pivot columns of the echelonized matrix.
std::vector<std::size_t> echelonize(QMat& a) {
    std::vector<std::size_t> pivots;
    std::size_t rows = a.size(), cols = rows ? a[0].size() : 0;
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t p = r;
        while (p < rows && a[p][c] == 0) ++p;
        if (p == rows) continue;
        std::swap(a[p], a[r]);
        Rat inv = Rat(1) / a[r][c];
        for (std::size_t j = c; j < cols; ++j) a[r][j] *= inv;
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == r || a[i][c] == 0) continue;
            Rat f = a[i][c];
            for (std::size_t j = c; j < cols; ++j) a[i][j] -= f * a[r][j];
        }
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

QMat transpose(const QMat& a) {
    std::size_t n = a.size(), p = n ? a[0].size() : 0;
    QMat t(p, QVec(n, Rat(0)));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < p; ++j) t[j][i] = a[i][j];
    return t;
}

} // namespace

std::size_t qmat_rank(QMat a) {
    return echelonize(a).size();
}

Rat qmat_det(QMat a) {
    std::size_t n = a.size();
    Rat det(1);
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        while (p < n && a[p][c] == 0) ++p;
        if (p == n) return Rat(0);
        if (p != c) { std::swap(a[p], a[c]); det = -det; }
        det *= a[c][c];
        Rat inv = Rat(1) / a[c][c];
        for (std::size_t i = c + 1; i < n; ++i) {
            if (a[i][c] == 0) continue;
            Rat f = a[i][c] * inv;
            for (std::size_t j = c; j < n; ++j) a[i][j] -= f * a[c][j];
        }
    }
    return det;
}

std::optional<QVec> solve_right(const QMat& a, const QVec& b) {
    std::size_t rows = a.size(), cols = rows ? a[0].size() : 0;
    QMat aug(rows, QVec(cols + 1, Rat(0)));
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) aug[i][j] = a[i][j];
        aug[i][cols] = b[i];
    }
    auto pivots = echelonize(aug);
    for (std::size_t i = pivots.size(); i < rows; ++i)
        if (aug[i][cols] != 0) return std::nullopt;
    if (!pivots.empty() && pivots.back() == cols) return std::nullopt;
    QVec x(cols, Rat(0));
    for (std::size_t i = 0; i < pivots.size(); ++i) x[pivots[i]] = aug[i][cols];
    return x;
}

std::optional<QVec> solve_left(const QMat& a, const QVec& b) {
    return solve_right(transpose(a), b);
}

std::vector<QVec> left_kernel(const QMat& a) {
    QMat t = transpose(a);
    std::size_t rows = t.size(), cols = rows ? t[0].size() : 0;
    QMat w = t;
    auto pivots = echelonize(w);
    std::vector<bool> is_pivot(cols, false);
    for (auto c : pivots) is_pivot[c] = true;
    std::vector<QVec> basis;
    for (std::size_t c = 0; c < cols; ++c) {
        if (is_pivot[c]) continue;
        QVec v(cols, Rat(0));
        v[c] = 1;
        for (std::size_t i = 0; i < pivots.size(); ++i) v[pivots[i]] = -w[i][c];
        basis.push_back(std::move(v));
    }
    return basis;
}

std::optional<QVec> left_kernel_vector(const QMat& a) {
    auto basis = left_kernel(a);
    if (basis.empty()) return std::nullopt;
    // clear denominators so callers get an integer relation when possible
    QVec v = basis.front();
    Int l = 1;
    for (auto& x : v) l = lcm_int(l, den(x));
    for (auto& x : v) x *= Rat(l);
    return v;
}

std::optional<QMat> qmat_inverse(const QMat& a) {
    std::size_t n = a.size();
    QMat aug(n, QVec(2 * n, Rat(0)));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) aug[i][j] = a[i][j];
        aug[i][n + i] = 1;
    }
    auto pivots = echelonize(aug);
    if (pivots.size() != n) return std::nullopt;
    for (std::size_t i = 0; i < n; ++i)
        if (pivots[i] != i) return std::nullopt;
    QMat inv(n, QVec(n, Rat(0)));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) inv[i][j] = aug[i][n + j];
    return inv;
}

IMat imat_identity(std::size_t n) {
    IMat m(n, IVec(n, Int(0)));
    for (std::size_t i = 0; i < n; ++i) m[i][i] = 1;
    return m;
}

IMat imat_mul(const IMat& a, const IMat& b) {
    std::size_t n = a.size(), k = b.size(), p = k ? b[0].size() : 0;
    IMat c(n, IVec(p, Int(0)));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < k; ++j) {
            if (a[i][j] == 0) continue;
            for (std::size_t l = 0; l < p; ++l) c[i][l] += a[i][j] * b[j][l];
        }
    return c;
}

QMat imat_to_q(const IMat& a) {
    QMat q(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (auto& x : a[i]) q[i].push_back(Rat(x));
    return q;
}

Int imat_det(IMat a) {
    // fraction-free Bareiss
    std::size_t n = a.size();
    if (n == 0) return 1;
    Int sign = 1, prev = 1;
    for (std::size_t c = 0; c + 1 < n; ++c) {
        std::size_t p = c;
        while (p < n && a[p][c] == 0) ++p;
        if (p == n) return 0;
        if (p != c) { std::swap(a[p], a[c]); sign = -sign; }
        for (std::size_t i = c + 1; i < n; ++i) {
            for (std::size_t j = c + 1; j < n; ++j)
                a[i][j] = (a[i][j] * a[c][c] - a[i][c] * a[c][j]) / prev;
            a[i][c] = 0;
        }
        prev = a[c][c];
    }
    return sign * a[n - 1][n - 1];
}

SmithResult smith_normal_form(IMat a) {
    std::size_t rows = a.size(), cols = rows ? a[0].size() : 0;
    IMat u = imat_identity(rows), v = imat_identity(cols);
    auto row_op = [&](std::size_t i, std::size_t j, const Int& f) {
        for (std::size_t c = 0; c < cols; ++c) a[i][c] -= f * a[j][c];
        for (std::size_t c = 0; c < rows; ++c) u[i][c] -= f * u[j][c];
    };
    auto col_op = [&](std::size_t i, std::size_t j, const Int& f) {
        for (std::size_t r = 0; r < rows; ++r) a[r][i] -= f * a[r][j];
        for (std::size_t r = 0; r < cols; ++r) v[r][i] -= f * v[r][j];
    };
    auto row_swap = [&](std::size_t i, std::size_t j) {
        std::swap(a[i], a[j]);
        std::swap(u[i], u[j]);
    };
    auto col_swap = [&](std::size_t i, std::size_t j) {
        for (std::size_t r = 0; r < rows; ++r) std::swap(a[r][i], a[r][j]);
        for (std::size_t r = 0; r < cols; ++r) std::swap(v[r][i], v[r][j]);
    };

    std::size_t t = 0;
    while (t < rows && t < cols) {
        // find a nonzero pivot
        std::size_t pi = t, pj = t;
        bool found = false;
        for (std::size_t i = t; i < rows && !found; ++i)
            for (std::size_t j = t; j < cols && !found; ++j)
                if (a[i][j] != 0) { pi = i; pj = j; found = true; }
        if (!found) break;
        row_swap(t, pi);
        col_swap(t, pj);
        bool again = true;
        while (again) {
            again = false;
            for (std::size_t i = t + 1; i < rows; ++i) {
                if (a[i][t] == 0) continue;
                if (a[t][t] == 0 || (boost::multiprecision::abs(a[i][t]) < boost::multiprecision::abs(a[t][t]))) {
                    row_swap(t, i);
                    again = true;
                    continue;
                }
                Int f = a[i][t] / a[t][t];
                row_op(i, t, f);
                if (a[i][t] != 0) again = true;
            }
            for (std::size_t j = t + 1; j < cols; ++j) {
                if (a[t][j] == 0) continue;
                if (a[t][t] == 0 || (boost::multiprecision::abs(a[t][j]) < boost::multiprecision::abs(a[t][t]))) {
                    col_swap(t, j);
                    again = true;
                    continue;
                }
                Int f = a[t][j] / a[t][t];
                col_op(j, t, f);
                if (a[t][j] != 0) again = true;
            }
        }
        if (a[t][t] < 0) {
            for (std::size_t c = 0; c < cols; ++c) a[t][c] = -a[t][c];
            for (std::size_t c = 0; c < rows; ++c) u[t][c] = -u[t][c];
        }
        ++t;
    }
    // divisibility chain d_i | d_{i+1}
    for (std::size_t i = 0; t > 0 && i + 1 < t; ++i) {
        for (std::size_t j = i + 1; j < t; ++j) {
            if (a[j][j] % a[i][i] == 0) continue;
            // fold a[j][j] into position i via one col op and restart block
            col_op(i, j, Int(-1));
            std::size_t save = t;
            t = i;
            while (t < save) {
                std::size_t pi = t, pj = t;
                bool found = false;
                for (std::size_t r = t; r < rows && !found; ++r)
                    for (std::size_t c = t; c < cols && !found; ++c)
                        if (a[r][c] != 0) { pi = r; pj = c; found = true; }
                if (!found) break;
                row_swap(t, pi);
                col_swap(t, pj);
                bool again = true;
                while (again) {
                    again = false;
                    for (std::size_t r = t + 1; r < rows; ++r) {
                        if (a[r][t] == 0) continue;
                        if (a[t][t] == 0 || (boost::multiprecision::abs(a[r][t]) < boost::multiprecision::abs(a[t][t]))) { row_swap(t, r); again = true; continue; }
                        Int f = a[r][t] / a[t][t];
                        row_op(r, t, f);
                        if (a[r][t] != 0) again = true;
                    }
                    for (std::size_t c = t + 1; c < cols; ++c) {
                        if (a[t][c] == 0) continue;
                        if (a[t][t] == 0 || (boost::multiprecision::abs(a[t][c]) < boost::multiprecision::abs(a[t][t]))) { col_swap(t, c); again = true; continue; }
                        Int f = a[t][c] / a[t][t];
                        col_op(c, t, f);
                        if (a[t][c] != 0) again = true;
                    }
                }
                if (a[t][t] < 0) {
                    for (std::size_t c = 0; c < cols; ++c) a[t][c] = -a[t][c];
                    for (std::size_t c = 0; c < rows; ++c) u[t][c] = -u[t][c];
                }
                ++t;
            }
            t = save;
        }
    }
    return SmithResult{u, a, v};
}

IMat hnf_rows(IMat a) {
    std::size_t rows = a.size(), cols = rows ? a[0].size() : 0;
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        // gcd-reduce column c below row r
        while (true) {
            std::size_t p = rows;
            for (std::size_t i = r; i < rows; ++i)
                if (a[i][c] != 0 && (p == rows ||
                    boost::multiprecision::abs(a[i][c]) < boost::multiprecision::abs(a[p][c])))
                    p = i;
            if (p == rows) break;
            std::swap(a[p], a[r]);
            bool clean = true;
            for (std::size_t i = r + 1; i < rows; ++i) {
                if (a[i][c] == 0) continue;
                Int f = a[i][c] / a[r][c];
                for (std::size_t j = 0; j < cols; ++j) a[i][j] -= f * a[r][j];
                if (a[i][c] != 0) clean = false;
            }
            if (clean) break;
        }
        if (a[r][c] == 0) continue;
        if (a[r][c] < 0)
            for (std::size_t j = 0; j < cols; ++j) a[r][j] = -a[r][j];
        // reduce rows above
        for (std::size_t i = 0; i < r; ++i) {
            Int q = a[i][c] / a[r][c];
            if (a[i][c] < 0 && q * a[r][c] != a[i][c]) --q;
            if (q == 0) continue;
            for (std::size_t j = 0; j < cols; ++j) a[i][j] -= q * a[r][j];
        }
        ++r;
    }
    a.resize(r);
    return a;
}

IVec hnf_reduce(const IMat& h, IVec v) {
    std::size_t cols = v.size();
    for (const auto& row : h) {
        std::size_t c = 0;
        while (c < cols && row[c] == 0) ++c;
        if (c == cols) continue;
        Int q = v[c] / row[c];
        if (v[c] < 0 && q * row[c] != v[c]) --q;
        if (q == 0) continue;
        for (std::size_t j = 0; j < cols; ++j) v[j] -= q * row[j];
    }
    return v;
}

const char* error_code_name(ErrorCode code) {
    switch (code) {
    case ErrorCode::RankMismatch: return "RankMismatch";
    case ErrorCode::NotAUnit: return "NotAUnit";
    case ErrorCode::FieldExtensionRequired: return "FieldExtensionRequired";
    case ErrorCode::TruncationExhausted: return "TruncationExhausted";
    case ErrorCode::InvalidOrder: return "InvalidOrder";
    case ErrorCode::NotDependent: return "NotDependent";
    case ErrorCode::NotIndependent: return "NotIndependent";
    case ErrorCode::NotRepresentable: return "NotRepresentable";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::InstanceTooLarge: return "InstanceTooLarge";
    case ErrorCode::InvalidPreparedForm: return "InvalidPreparedForm";
    case ErrorCode::InvalidTransformation: return "InvalidTransformation";
    case ErrorCode::IterationLimit: return "IterationLimit";
    case ErrorCode::NotApplicable: return "NotApplicable";
    case ErrorCode::VerifyFailed: return "VerifyFailed";
    case ErrorCode::Internal: return "Internal";
    }
    return "Unknown";
}

} // namespace mono
