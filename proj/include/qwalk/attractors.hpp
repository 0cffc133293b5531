#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/SparseCore>

#include "qwalk/walk.hpp"

namespace qwalk {

struct CommonEigenstate {
  Complex alpha;
  Vector state;
  double residual = 0.0;  // max_K |U_K psi - alpha psi| over the verification set
};

enum class AttractorKind { PAttractor, General };

struct Attractor {
  Complex lambda;
  Matrix matrix;
  AttractorKind kind = AttractorKind::General;
  double residual = 0.0;
};

const char* to_string(AttractorKind kind);

/// Operator-space guard for the dense solver: d^2 must not exceed this.
inline constexpr int kMaxSolverOperatorDim = 5000;

/// All configurations for |E| <= 10; otherwise the empty and full
/// configurations, every single-edge removal, and 32 seeded random ones.
std::vector<EdgeConfig> verification_configs(const Lattice& lattice);

/// Distinct unit-modulus eigenvalues of (RC) (x) (RC)^*, ordered by angle.
std::vector<Complex> candidate_lambdas(const QuantumWalk& walk);

/// Orthonormal common eigenstates of every U_K, grouped by eigenvalue of RC.
std::vector<CommonEigenstate> common_eigenstates_numeric(const QuantumWalk& walk);

/// Outer products |phi_i><phi_j| with lambda = alpha_i alpha_j^*.
std::vector<Attractor> p_attractors(const std::vector<CommonEigenstate>& eigenstates);

/// Complete attractor basis, HS-orthonormal, ordered by lambda angle with
/// p-attractors ahead of general ones. Takes no edge probabilities.
/// Throws CapacityError when d^2 > kMaxSolverOperatorDim.
std::vector<Attractor> attractor_space_numeric(const QuantumWalk& walk);

/// Number of attractors per distinct lambda, in output order.
std::vector<std::pair<Complex, int>> dimension_summary(const std::vector<Attractor>& attractors);

/// max_K |U_K X - lambda X U_K|_max. P-attractors are also checked against
/// U_K X U_K'^dagger = lambda X over pairs drawn from `configs`.
double verify_attractor(const QuantumWalk& walk, const Attractor& attractor,
                        std::span<const EdgeConfig> configs);

/// Per-eigenstate residual max_K |U_K psi - alpha psi|.
double verify_eigenstate(const QuantumWalk& walk, const Vector& psi, Complex alpha,
                         std::span<const EdgeConfig> configs);

class AsymptoticDecomposition {
 public:
  struct Term {
    Complex lambda;
    int index;
    Complex overlap;  // Tr(rho0 X^dagger)
  };

  AsymptoticDecomposition(std::vector<Attractor> attractors, const Matrix& rho0);

  const std::vector<Term>& terms() const { return terms_; }
  const std::vector<Attractor>& attractors() const { return attractors_; }

  /// rho_as(n) = sum lambda^n Tr(rho0 X^dagger) X.
  Matrix evaluate(long long n) const;
  /// Contribution of the lambda = 1 attractors.
  Matrix stationary_part() const;

 private:
  std::vector<Attractor> attractors_;
  std::vector<Term> terms_;
};

AsymptoticDecomposition asymptotic_decomposition(std::vector<Attractor> attractors,
                                                 const Matrix& rho0);

/// U_K^n P rho0 P (U_K'^dagger)^n + (I - P) Tr(rho0 (I - P)) / Tr(I - P).
///
/// Only meaningful when the attractor space consists of p-attractors and the
/// identity. When `attractor_space` is given it is checked against that
/// shape and a DomainError is thrown on mismatch.
Matrix asymptotic_via_projectors(const QuantumWalk& walk,
                                 const std::vector<CommonEigenstate>& eigenstates,
                                 const Matrix& rho0, long long n,
                                 const std::pair<EdgeConfig, EdgeConfig>& kappa_pair,
                                 const std::vector<Attractor>* attractor_space = nullptr);

/// Same quantity, using alpha^n in place of the matrix powers.
Matrix asymptotic_from_eigenstates(const std::vector<CommonEigenstate>& eigenstates,
                                   const Matrix& rho0, long long n);

/// lambda = 1 part of asymptotic_from_eigenstates.
Matrix stationary_from_eigenstates(const std::vector<CommonEigenstate>& eigenstates,
                                   const Matrix& rho0);

Eigen::SparseMatrix<Complex> sparse_unitary(const QuantumWalk& walk, const EdgeConfig& k);

}  // namespace qwalk
