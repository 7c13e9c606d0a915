#ifndef MONO_MATRIX_HPP
#define MONO_MATRIX_HPP

#include <mono/rational.hpp>
#include <optional>
#include <vector>

namespace mono {

// Small dense exact matrices.  Everything here is desk scale; no attempt
// is made at asymptotic cleverness.
using QVec = std::vector<Rat>;
using QMat = std::vector<QVec>;   // row major
using IVec = std::vector<Int>;
using IMat = std::vector<IVec>;

QMat qmat_identity(std::size_t n);
QMat qmat_mul(const QMat& a, const QMat& b);
QVec qvec_mat(const QVec& v, const QMat& a);   // row vector times matrix
QVec qmat_vec(const QMat& a, const QVec& v);   // matrix times column vector

std::size_t qmat_rank(QMat a);
Rat qmat_det(QMat a);

// Solve x * A = b for a row vector x (least structure: any solution), or
// A * x = b with solve_left = false.  Returns nullopt when inconsistent.
std::optional<QVec> solve_left(const QMat& a, const QVec& b);
std::optional<QVec> solve_right(const QMat& a, const QVec& b);

// One nonzero vector x with x * A = 0, if any.
std::optional<QVec> left_kernel_vector(const QMat& a);

// Basis of { x : x * A = 0 }.
std::vector<QVec> left_kernel(const QMat& a);

std::optional<QMat> qmat_inverse(const QMat& a);

IMat imat_identity(std::size_t n);
IMat imat_mul(const IMat& a, const IMat& b);
Int imat_det(IMat a);
QMat imat_to_q(const IMat& a);

// Smith normal form: returns (U, D, V) with U*A*V = D, U and V unimodular.
struct SmithResult {
    IMat u, d, v;
};
SmithResult smith_normal_form(IMat a);

// Hermite normal form (row style) of the lattice spanned by the rows.
// Returns a full-row-rank matrix of the same row lattice in echelon shape.
IMat hnf_rows(IMat a);

// Reduce v modulo the row lattice of the HNF basis h, giving the canonical
// coset representative.
IVec hnf_reduce(const IMat& h, IVec v);

} // namespace mono

#endif
