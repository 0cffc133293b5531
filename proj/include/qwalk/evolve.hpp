#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/SparseCore>

#include "qwalk/walk.hpp"

namespace qwalk {

struct ObservableReport {
  int step = 0;
  std::vector<double> position;
  double manhattan = 0.0;
  double tv = 0.0;
  std::optional<double> entropy;
  std::optional<double> variance;             // 1D only
  std::vector<double> marginal_s, marginal_t;  // 2D only
};

Matrix density_from_state(const Vector& psi);

/// diag(Tr_C rho), i.e. the probability of each vertex.
std::vector<double> position_marginal(const Matrix& rho, int coin_dim);

ObservableReport make_report(int step, const Matrix& rho, const Lattice& lattice);
ObservableReport make_report(int step, const std::vector<double>& position,
                             std::optional<double> entropy, const Lattice& lattice);

/// Re-Hermitizes and restores `trace` when the drift exceeds 1e-12.
void apply_hygiene(Matrix& rho, Complex trace);

/// Sum over every edge configuration. Throws CapacityError for |E| > 20.
Matrix step_exact_bruteforce(const WalkModel& model, const Matrix& rho);

/// Exact channel application regrouped per edge; cost independent of 2^|E|.
class FactorizedStepper {
 public:
  explicit FactorizedStepper(const WalkModel& model);
  Matrix step(const Matrix& rho) const;

 private:
  struct EdgeCorrection {
    SparseTerm hop;
    SparseTerm reflect;
    SparseTerm mean;
    double p;
  };
  Matrix coin_;
  Eigen::SparseMatrix<Complex> mean_step_;
  std::vector<EdgeCorrection> edges_;
};

Matrix step_exact_factorized(const WalkModel& model, const Matrix& rho);

struct ExactRun {
  std::vector<ObservableReport> reports;
  Matrix final_state;
};

/// Iterates the factorized step, reporting at steps 0, k, 2k, ... and at n.
ExactRun run_exact(const WalkModel& model, const Matrix& rho0, int n_steps, int record_every = 1);

/// Matrix after n factorized steps, without observables.
Matrix evolve_exact(const WalkModel& model, const Matrix& rho0, int n_steps);

struct MonteCarloOptions {
  int shots = 1000;
  std::uint64_t seed = 0;
  int threads = 1;
  int record_every = 1;
};

struct MonteCarloRun {
  std::vector<ObservableReport> reports;
  // Ensemble density at the last step; kept when d <= kMaxEnsembleDim.
  std::optional<Matrix> ensemble;
};

inline constexpr int kMaxEnsembleDim = 256;

/// Pure-state trajectories, one edge configuration sampled per step.
///
/// Trajectory i draws from a generator seeded by (seed, i). Sums are taken
/// in fixed trajectory blocks, so the output is identical for any thread
/// count. Entropy is reported only when d <= 64.
MonteCarloRun run_monte_carlo(const WalkModel& model, const Vector& psi0, int n_steps,
                              const MonteCarloOptions& options);

/// Applies U_K to a pure state in O(d).
Vector apply_unitary(const QuantumWalk& walk, const EdgeConfig& k, const Vector& psi);

}  // namespace qwalk
