#pragma once

#include <string>
#include <variant>
#include <vector>

#include "qwalk/lattice.hpp"
#include "qwalk/linalg.hpp"

namespace qwalk {

/// C(alpha, beta, gamma) from the SU(2) family used for 1D walks.
struct SU2Coin {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
};

/// 4x4 Grover diffusion coin on the (L, D, U, R) basis.
struct GroverCoin {};

struct CustomCoin {
  Matrix matrix;
};

using CoinSpec = std::variant<SU2Coin, GroverCoin, CustomCoin>;

struct DefaultReflection {};

struct CustomReflection {
  Matrix matrix;
};

using ReflectionSpec = std::variant<DefaultReflection, CustomReflection>;

/// Throws ValidationError for a non-unitary custom coin.
Matrix build_coin(const CoinSpec& spec);

/// Human-readable notes for coins that produce classical-permutation dynamics.
std::vector<std::string> coin_warnings(const CoinSpec& spec);

/// sigma_x for coin dimension 2, sigma_x (x) sigma_x for coin dimension 4.
///
/// A custom reflection must be unitary and must send every coin direction to
/// its opposite up to a phase; otherwise the percolated step operator would
/// not be unitary for every edge configuration.
Matrix build_reflection(const ReflectionSpec& spec, int coin_dim);

struct SparseEntry {
  int row;
  int col;
  Complex value;
};

using SparseTerm = std::vector<SparseEntry>;

Matrix to_dense(const SparseTerm& term, int dim);

/// S_K = B0 + sum_{e in K} H_e + sum_{e not in K} R_e.
struct EdgeTermDecomposition {
  int dim = 0;
  SparseTerm boundary;
  std::vector<SparseTerm> hop;
  std::vector<SparseTerm> reflect;

  Matrix assemble(const EdgeConfig& k) const;
};

/// Lattice together with its coin and reflection. Carries no edge
/// probabilities, so anything computed from it alone is p-independent.
class QuantumWalk {
 public:
  QuantumWalk(Lattice lattice, CoinSpec coin, ReflectionSpec reflection = DefaultReflection{});

  const Lattice& lattice() const { return lattice_; }
  const CoinSpec& coin_spec() const { return coin_spec_; }
  const ReflectionSpec& reflection_spec() const { return reflection_spec_; }
  const Matrix& coin() const { return coin_; }
  const Matrix& reflection() const { return reflection_; }
  const EdgeTermDecomposition& edge_terms() const { return terms_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  int dimension() const { return lattice_.dimension(); }
  int coin_dim() const { return lattice_.coin_dim(); }
  int edge_count() const { return lattice_.edge_count(); }

  bool uses_grover_coin() const { return std::holds_alternative<GroverCoin>(coin_spec_); }
  bool uses_default_reflection() const {
    return std::holds_alternative<DefaultReflection>(reflection_spec_);
  }

 private:
  Lattice lattice_;
  CoinSpec coin_spec_;
  ReflectionSpec reflection_spec_;
  Matrix coin_;
  Matrix reflection_;
  EdgeTermDecomposition terms_;
  std::vector<std::string> warnings_;
};

/// A quantum walk plus the per-edge probabilities of being intact.
class WalkModel : public QuantumWalk {
 public:
  WalkModel(QuantumWalk walk, EdgeProbabilities probs);
  WalkModel(QuantumWalk walk, double p);

  const EdgeProbabilities& probs() const { return probs_; }
  const QuantumWalk& walk() const { return *this; }

 private:
  EdgeProbabilities probs_;
};

/// Direct construction of S_K from the half-edge rules.
Matrix build_step_operator(const QuantumWalk& walk, const EdgeConfig& k);

/// U_K = S_K (I_P (x) C).
Matrix build_unitary(const QuantumWalk& walk, const EdgeConfig& k);

/// Applies I_P (x) C from the right: returns m (I_P (x) C).
Matrix apply_coin_right(const Matrix& m, const Matrix& coin);

/// Conjugates by I_P (x) C: (I (x) C) rho (I (x) C)^dagger.
Matrix conjugate_by_coin(const Matrix& rho, const Matrix& coin);

/// The local action of T_e: identity outside `support`, `block` on it.
struct Toggle {
  int edge;
  std::vector<int> support;
  Matrix block;
};

std::vector<Toggle> toggle_blocks(const QuantumWalk& walk);

/// T_e = S_full S_{full \ e}^dagger for each edge, as dense matrices.
std::vector<Matrix> toggle_operators(const QuantumWalk& walk);

}  // namespace qwalk
