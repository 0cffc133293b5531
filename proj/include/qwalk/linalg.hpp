#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace qwalk {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

namespace linalg {

// Eigenvalues closer than this are treated as one eigenspace.
inline constexpr double kClusterTol = 1e-8;
// Relative singular-value cutoff used for rank decisions.
inline constexpr double kRankTol = 1e-10;

struct EigenPair {
  Complex value;
  Vector vector;
};

/// Hilbert-Schmidt inner product Tr(a b^dagger).
Complex hs_inner(const Matrix& a, const Matrix& b);

double hs_norm(const Matrix& a);

/// Modified Gram-Schmidt (two passes) in the Hilbert-Schmidt geometry.
/// Elements whose residual norm falls below `tol` are dropped; the output
/// order follows the input order.
std::vector<Matrix> gram_schmidt_hs(std::span<const Matrix> set, double tol);

/// Full eigensystem of a normal matrix through its complex Schur form.
///
/// Pairs are sorted by eigenvalue angle in (-pi, pi], then by magnitude.
/// Each eigenvector is rescaled so that its first component with modulus
/// above `tol` is real and positive. Throws DimensionError for non-square
/// input and PreconditionError when the matrix is not normal.
std::vector<EigenPair> eig(const Matrix& m, double tol = 1e-10);

/// Orthonormal basis of {v : |Mv| < tol |M|}, returned as matrix columns.
Matrix kernel_basis(const Matrix& m, double tol = kRankTol);

/// Same as kernel_basis, split into vectors.
std::vector<Vector> kernel(const Matrix& m, double tol = kRankTol);

/// Orthonormal basis (columns) of the column span of `m`.
Matrix range_basis(const Matrix& m, double tol = kRankTol);

/// Largest principal angle between the column spans of two matrices with
/// orthonormal columns. Returns pi/2 when the dimensions differ.
double max_principal_angle(const Matrix& a, const Matrix& b);

/// Vectorises a d x d matrix in row-major order.
Vector vec(const Matrix& m);
Matrix unvec(const Vector& v, Eigen::Index rows, Eigen::Index cols);

double max_abs(const Matrix& m);
bool is_unitary(const Matrix& m, double tol = 1e-12);
bool is_hermitian(const Matrix& m, double tol = 1e-12);

Matrix kron(const Matrix& a, const Matrix& b);

/// Phase angle of z mapped into (-pi, pi], with values within 1e-12 of -pi
/// folded onto +pi.
double canonical_angle(Complex z);

/// Makes the first component with modulus above `tol` real positive.
void fix_phase(Vector& v, double tol = 1e-10);

/// Von Neumann entropy in nats of a Hermitian operator.
double von_neumann_entropy(const Matrix& rho);

}  // namespace linalg
}  // namespace qwalk
