#pragma once

#include <vector>

#include "qwalk/attractors.hpp"

namespace qwalk::analytic2d {

enum class GroverFamily { Phi1, Phi2, Phi3, Phi4 };

const char* to_string(GroverFamily family);

struct GroverEigenstate {
  GroverFamily kind;
  int s = -1;  // anchor column for Phi2 and Phi3
  int t = -1;  // anchor row for Phi2 and Phi4
  double alpha = 1.0;
  Vector state;
  double residual = 0.0;
};

struct GroverInventory {
  // Every raw family member that passed the eigenstate check.
  std::vector<GroverEigenstate> raw;
  // Members rejected by the check (e.g. alternating states on odd tori).
  std::vector<GroverEigenstate> rejected;
  // Orthonormal basis obtained from `raw` in order Phi1, Phi2, Phi3, Phi4.
  std::vector<CommonEigenstate> basis;
  // How many basis vectors each family contributed.
  int contributed[4] = {0, 0, 0, 0};
};

/// Grover walk on the given grid with the default reflection.
QuantumWalk make_grover_walk(const Lattice& lattice);

/// Explicit family members. Throws DomainError unless the walk is a Grover
/// walk on a grid with the default reflection.
GroverInventory grover_eigenstates(const QuantumWalk& walk);

Vector phi1(const Lattice& lattice);
/// Clipped at carpet boundaries and renormalized; wraps on a torus.
Vector phi2(const Lattice& lattice, int s, int t);
Vector phi3(const Lattice& lattice, int s);
Vector phi4(const Lattice& lattice, int t);

struct AttractorCount {
  Boundary boundary;
  int m;
  int n;
  long long predicted;
};

AttractorCount predicted_attractor_count(const Lattice& lattice);

/// Asymptotic probability of finding the walker at `site`.
///
/// Uses the attractor expansion when the dense solver applies, and the
/// projector form built from the Grover basis otherwise.
double trapping_probability(const QuantumWalk& walk, const Matrix& rho0, int site);

/// Asymptotic position distribution over every site, from a single solve.
std::vector<double> trapping_distribution(const QuantumWalk& walk, const Matrix& rho0);

/// max_K |U_K psi - psi| over the verification configurations.
double decoherence_free_check(const QuantumWalk& walk, const Vector& state);

}  // namespace qwalk::analytic2d
