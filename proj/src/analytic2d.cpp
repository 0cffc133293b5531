#include "qwalk/analytic2d.hpp"

#include <array>
#include <cmath>
#include <initializer_list>

#include "qwalk/errors.hpp"
#include "qwalk/evolve.hpp"

namespace qwalk::analytic2d {

const char* to_string(GroverFamily family) {
  switch (family) {
    case GroverFamily::Phi1: return "phi1";
    case GroverFamily::Phi2: return "phi2";
    case GroverFamily::Phi3: return "phi3";
    case GroverFamily::Phi4: return "phi4";
  }
  return "?";
}

namespace {

using Coin4 = std::array<double, 4>;

constexpr Coin4 kV1 = {1, -1, -1, 1};
constexpr Coin4 kV2 = {1, 1, 0, 0};
constexpr Coin4 kV3 = {0, -1, 1, 0};
constexpr Coin4 kV4 = {-1, 0, 0, 1};

Coin4 sum(std::initializer_list<Coin4> parts) {
  Coin4 out{0, 0, 0, 0};
  for (const Coin4& p : parts) {
    for (int i = 0; i < 4; ++i) out[i] += p[i];
  }
  return out;
}

void require_grid(const Lattice& lattice) {
  if (!lattice.is_2d()) throw DomainError("Grover eigenstates are defined on 2D grids");
}

void place(Vector& psi, const Lattice& lat, int s, int t, const Coin4& v, double w = 1.0) {
  const int x = lat.vertex_index(s, t);
  for (int c = 0; c < 4; ++c) psi[lat.basis_index(x, c)] += w * v[c];
}

Vector normalized(Vector v) {
  v.normalize();
  return v;
}

}  // namespace

QuantumWalk make_grover_walk(const Lattice& lattice) {
  require_grid(lattice);
  return QuantumWalk(lattice, GroverCoin{});
}

Vector phi1(const Lattice& lat) {
  require_grid(lat);
  Vector psi = Vector::Zero(lat.dimension());
  for (int t = 0; t < lat.extent_n(); ++t) {
    for (int s = 0; s < lat.extent_m(); ++s) place(psi, lat, s, t, kV1);
  }
  return normalized(psi);
}

Vector phi2(const Lattice& lat, int s, int t) {
  require_grid(lat);
  const int m = lat.extent_m();
  const int n = lat.extent_n();
  const bool wrap = lat.boundary() == Boundary::Torus;
  Vector psi = Vector::Zero(lat.dimension());
  auto put = [&](int ds, int dt, const Coin4& v) {
    int ss = s + ds, tt = t + dt;
    if (wrap) {
      ss %= m;
      tt %= n;
    } else if (ss >= m || tt >= n) {
      return;
    }
    place(psi, lat, ss, tt, v);
  };
  put(0, 0, kV2);
  put(0, 1, sum({kV2, kV3}));
  put(1, 0, sum({kV2, kV4}));
  put(1, 1, sum({kV2, kV3, kV4}));
  return normalized(psi);
}

Vector phi3(const Lattice& lat, int s) {
  require_grid(lat);
  Vector psi = Vector::Zero(lat.dimension());
  for (int t = 0; t < lat.extent_n(); ++t) place(psi, lat, s, t, kV3, t % 2 == 0 ? 1.0 : -1.0);
  return normalized(psi);
}

Vector phi4(const Lattice& lat, int t) {
  require_grid(lat);
  Vector psi = Vector::Zero(lat.dimension());
  for (int s = 0; s < lat.extent_m(); ++s) place(psi, lat, s, t, kV4, s % 2 == 0 ? 1.0 : -1.0);
  return normalized(psi);
}

GroverInventory grover_eigenstates(const QuantumWalk& walk) {
  const Lattice& lat = walk.lattice();
  require_grid(lat);
  if (!walk.uses_grover_coin() || !walk.uses_default_reflection()) {
    throw DomainError("Grover eigenstates require the Grover coin and the default reflection");
  }
  const auto configs = verification_configs(lat);
  std::vector<GroverEigenstate> candidates;
  candidates.push_back({GroverFamily::Phi1, -1, -1, -1.0, phi1(lat), 0.0});
  for (int t = 0; t < lat.extent_n(); ++t) {
    for (int s = 0; s < lat.extent_m(); ++s) {
      candidates.push_back({GroverFamily::Phi2, s, t, 1.0, phi2(lat, s, t), 0.0});
    }
  }
  for (int s = 0; s < lat.extent_m(); ++s) {
    candidates.push_back({GroverFamily::Phi3, s, -1, 1.0, phi3(lat, s), 0.0});
  }
  for (int t = 0; t < lat.extent_n(); ++t) {
    candidates.push_back({GroverFamily::Phi4, -1, t, 1.0, phi4(lat, t), 0.0});
  }

  GroverInventory inv;
  for (auto& c : candidates) {
    c.residual = verify_eigenstate(walk, c.state, c.alpha, configs);
    (c.residual < 1e-10 ? inv.raw : inv.rejected).push_back(c);
  }
  // Gram-Schmidt in family order; dependent members contribute nothing.
  for (const auto& c : inv.raw) {
    Vector v = c.state;
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& b : inv.basis) v -= b.state.dot(v) * b.state;
    }
    const double norm = v.norm();
    if (norm < 1e-8) continue;
    v /= norm;
    inv.basis.push_back({c.alpha, v, verify_eigenstate(walk, v, c.alpha, configs)});
    ++inv.contributed[static_cast<int>(c.kind)];
  }
  return inv;
}

AttractorCount predicted_attractor_count(const Lattice& lattice) {
  require_grid(lattice);
  const long long m = lattice.extent_m();
  const long long n = lattice.extent_n();
  long long states = 0;
  if (lattice.boundary() == Boundary::Carpet) {
    states = m * n + m + n + 1;
  } else if (m % 2 == 0 && n % 2 == 0) {
    states = m * n + 2;
  } else {
    states = m * n + 1;
  }
  return {lattice.boundary(), static_cast<int>(m), static_cast<int>(n), states * states + 1};
}

std::vector<double> trapping_distribution(const QuantumWalk& walk, const Matrix& rho0) {
  const Lattice& lat = walk.lattice();
  const long long d = walk.dimension();
  if (rho0.rows() != d || rho0.cols() != d) throw DimensionError("rho0 dimension mismatch");
  Matrix stationary;
  if (d * d <= kMaxSolverOperatorDim) {
    stationary = asymptotic_decomposition(attractor_space_numeric(walk), rho0).stationary_part();
  } else {
    stationary = stationary_from_eigenstates(grover_eigenstates(walk).basis, rho0);
  }
  return position_marginal(stationary, lat.coin_dim());
}

double trapping_probability(const QuantumWalk& walk, const Matrix& rho0, int site) {
  if (site < 0 || site >= walk.lattice().vertex_count()) throw DomainError("site out of range");
  return trapping_distribution(walk, rho0)[site];
}

double decoherence_free_check(const QuantumWalk& walk, const Vector& state) {
  return verify_eigenstate(walk, state, 1.0, verification_configs(walk.lattice()));
}

}  // namespace qwalk::analytic2d
