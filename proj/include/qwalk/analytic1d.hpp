#pragma once

#include <array>
#include <functional>
#include <vector>

#include "qwalk/attractors.hpp"

namespace qwalk::analytic1d {

struct SU2CoinParams {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
};

/// Refuses beta = k pi/2 and alpha = k pi with a DomainError.
void validate(const SU2CoinParams& params);

bool is_degenerate(const SU2CoinParams& params);  // alpha = pi/2 (mod pi)

/// SU(2) walk on a line or cycle with the default reflection.
QuantumWalk make_walk(const SU2CoinParams& params, const Lattice& lattice);

struct CoinEigenpair {
  Complex value;
  Vector vector;
};

/// Eigenpairs of sigma_x C: (e^{i alpha}, v1) and (e^{-i alpha}, v2).
std::array<CoinEigenpair, 2> coin_eigensystem(const SU2CoinParams& params);

struct LineEigenstates {
  CommonEigenstate phi1;  // amplitude ratio cot(beta) e^{-i gamma} per site
  CommonEigenstate phi2;  // amplitude ratio -tan(beta) e^{-i gamma} per site
};

LineEigenstates line_eigenstates(const SU2CoinParams& params, int n);

struct CycleConditions {
  bool phi1_exists = false;
  bool phi2_exists = false;
};

CycleConditions cycle_eigenstate_conditions(const SU2CoinParams& params, int n);

std::vector<Attractor> attractor_catalog_line(const SU2CoinParams& params, int n);
std::vector<Attractor> attractor_catalog_cycle(const SU2CoinParams& params, int n);

enum class DegenerateForm { Recursive, Closed };

/// The lambda = -1 attractor that is not a p-attractor, for alpha = pi/2.
///
/// The raw construction is orthogonalized against the lambda = -1
/// p-attractors and normalized. Recursive requires a line; Closed accepts a
/// line or an even cycle. Throws DomainError when a form is singular for the
/// given beta, gamma or topology.
Matrix degenerate_attractor(const SU2CoinParams& params, const Lattice& lattice,
                            DegenerateForm form);

/// Unnormalized output of the chosen construction.
Matrix degenerate_attractor_raw(const SU2CoinParams& params, const Lattice& lattice,
                                DegenerateForm form);

struct EdgeStateProfile {
  double q = 0.0;           // tan^2 beta
  double normalizer = 0.0;  // (q - 1) / (q^N - 1), or 1/N at q = 1
  double o1 = 0.0;
  double o2 = 0.0;
};

/// Profile of a line walk with overlaps O_i = <phi_i| rho0 |phi_i>.
EdgeStateProfile edge_state_profile(const SU2CoinParams& params, int n, const Matrix& rho0);

/// Closed-form asymptotic position distribution.
///
/// P(s) = O1 P1(s) + O2 P2(s) + (1 - O1 - O2) (2 - P1(s) - P2(s)) / (2N - 2)
/// with P1(s) = normalizer q^{N-1-s} and P2(s) = normalizer q^s.
std::vector<double> edge_state_distribution(const EdgeStateProfile& profile, int n);

/// Position marginal of the stationary part of the attractor expansion.
std::vector<double> edge_state_distribution_attractors(const SU2CoinParams& params, int n,
                                                       const Matrix& rho0);

/// True when every entry of C has modulus 1/sqrt(2) within `tolerance`.
std::function<bool(const SU2CoinParams&)> unbiased_localizing_coins(double tolerance);

}  // namespace qwalk::analytic1d
