#include "qwalk/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "qwalk/errors.hpp"

namespace qwalk::linalg {

Complex hs_inner(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError("hs_inner: shape mismatch");
  }
  // Tr(a b^dagger) = sum_ij a_ij conj(b_ij)
  return (a.array() * b.array().conjugate()).sum();
}

double hs_norm(const Matrix& a) { return a.norm(); }

std::vector<Matrix> gram_schmidt_hs(std::span<const Matrix> set, double tol) {
  std::vector<Matrix> basis;
  for (const Matrix& x : set) {
    Matrix v = x;
    for (int pass = 0; pass < 2; ++pass) {
      for (const Matrix& g : basis) v -= hs_inner(v, g) * g;
    }
    const double n = hs_norm(v);
    if (n < tol) continue;
    basis.push_back(v / n);
  }
  return basis;
}

double canonical_angle(Complex z) {
  double a = std::arg(z);
  if (a <= -std::numbers::pi + 1e-12) a = std::numbers::pi;
  return a;
}

void fix_phase(Vector& v, double tol) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > tol) {
      v *= std::conj(v[i]) / std::abs(v[i]);
      v[i] = Complex(v[i].real(), 0.0);
      return;
    }
  }
}

std::vector<EigenPair> eig(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) throw DimensionError("eig: matrix is not square");
  const Eigen::Index n = m.rows();
  if (n == 0) return {};
  const Matrix comm = m * m.adjoint() - m.adjoint() * m;
  const double scale = std::max(1.0, max_abs(m) * max_abs(m) * static_cast<double>(n));
  if (max_abs(comm) > 1e-10 * scale) {
    throw PreconditionError("eig: matrix is not normal");
  }

  Eigen::ComplexSchur<Matrix> schur(m);
  const Matrix& t = schur.matrixT();
  const Matrix& q = schur.matrixU();

  std::vector<EigenPair> pairs;
  pairs.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    Vector v = q.col(i);
    fix_phase(v, tol);
    pairs.push_back({t(i, i), std::move(v)});
  }

  std::stable_sort(pairs.begin(), pairs.end(), [](const EigenPair& a, const EigenPair& b) {
    return canonical_angle(a.value) < canonical_angle(b.value);
  });
  // Within runs of equal angle, order by magnitude.
  auto first = pairs.begin();
  while (first != pairs.end()) {
    auto last = first + 1;
    while (last != pairs.end() &&
           std::abs(canonical_angle(last->value) - canonical_angle(first->value)) < 1e-9) {
      ++last;
    }
    std::stable_sort(first, last, [](const EigenPair& a, const EigenPair& b) {
      return std::abs(a.value) < std::abs(b.value);
    });
    first = last;
  }
  return pairs;
}

Matrix kernel_basis(const Matrix& m, double tol) {
  const Eigen::Index n = m.cols();
  if (n == 0) return Matrix(0, 0);
  if (m.rows() == 0 || max_abs(m) == 0.0) return Matrix::Identity(n, n);

  // Tall systems are compressed to their triangular factor first; the SVD of
  // R carries the same right singular vectors as the SVD of m.
  Matrix reduced;
  if (m.rows() > 2 * n) {
    Eigen::HouseholderQR<Matrix> qr(m);
    reduced = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
  } else {
    reduced = m;
  }

  Eigen::BDCSVD<Matrix> svd(reduced, Eigen::ComputeFullV);
  const auto& sigma = svd.singularValues();
  const double smax = sigma.size() > 0 ? sigma[0] : 0.0;
  Eigen::Index rank = 0;
  while (rank < sigma.size() && sigma[rank] >= tol * smax) ++rank;
  return svd.matrixV().rightCols(n - rank);
}

std::vector<Vector> kernel(const Matrix& m, double tol) {
  const Matrix basis = kernel_basis(m, tol);
  std::vector<Vector> out;
  out.reserve(static_cast<std::size_t>(basis.cols()));
  for (Eigen::Index j = 0; j < basis.cols(); ++j) out.emplace_back(basis.col(j));
  return out;
}

Matrix range_basis(const Matrix& m, double tol) {
  if (m.cols() == 0 || m.rows() == 0) return Matrix(m.rows(), 0);
  Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU);
  const auto& sigma = svd.singularValues();
  const double smax = sigma.size() > 0 ? sigma[0] : 0.0;
  if (smax == 0.0) return Matrix(m.rows(), 0);
  Eigen::Index rank = 0;
  while (rank < sigma.size() && sigma[rank] >= tol * smax) ++rank;
  return svd.matrixU().leftCols(rank);
}

double max_principal_angle(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols() || a.rows() != b.rows()) return std::numbers::pi / 2;
  if (a.cols() == 0) return 0.0;
  // sin of the largest angle is the spectral norm of (I - A A^dagger) B.
  const Matrix residual = b - a * (a.adjoint() * b);
  Eigen::JacobiSVD<Matrix> svd(residual);
  const double s = std::min(1.0, svd.singularValues()[0]);
  return std::asin(s);
}

Vector vec(const Matrix& m) {
  Vector v(m.size());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) v[i * m.cols() + j] = m(i, j);
  }
  return v;
}

Matrix unvec(const Vector& v, Eigen::Index rows, Eigen::Index cols) {
  if (v.size() != rows * cols) throw DimensionError("unvec: size mismatch");
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = v[i * cols + j];
  }
  return m;
}

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

bool is_unitary(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return max_abs(m.adjoint() * m - Matrix::Identity(m.rows(), m.cols())) < tol;
}

bool is_hermitian(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return max_abs(m - m.adjoint()) < tol;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

double von_neumann_entropy(const Matrix& rho) {
  const Matrix h = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double l = es.eigenvalues()[i];
    if (l > 1e-15) s -= l * std::log(l);
  }
  return s;
}

}  // namespace qwalk::linalg
