#include "qwalk/analytic1d.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

#include "qwalk/errors.hpp"
#include "qwalk/evolve.hpp"

namespace qwalk::analytic1d {

namespace {

constexpr double kPi = std::numbers::pi;

bool near_multiple(double x, double period, double tol) {
  return std::abs(std::remainder(x, period)) < tol;
}

void require_1d(const Lattice& lattice) {
  if (lattice.is_2d()) throw DomainError("the 1D catalog applies to lines and cycles only");
}

Matrix outer(const Vector& a, const Vector& b) { return a * b.adjoint(); }

Complex snap(Complex z) {
  if (std::abs(z.imag()) < 1e-13) z = Complex(z.real(), 0.0);
  if (std::abs(z.real()) < 1e-13) z = Complex(0.0, z.imag());
  return z;
}

// Sum_s r^s |s> (x) v, normalized.
Vector geometric_state(Complex ratio, const Vector& v, int n) {
  Vector psi(2 * n);
  Complex a = 1.0;
  for (int s = 0; s < n; ++s) {
    psi.segment(2 * s, 2) = a * v;
    a *= ratio;
  }
  psi.normalize();
  linalg::fix_phase(psi);
  return psi;
}

}  // namespace

void validate(const SU2CoinParams& params) {
  if (near_multiple(params.beta, kPi / 2, 1e-12)) {
    throw DomainError(
        "beta is a multiple of pi/2; the analytic catalog excludes this coin, use the numeric "
        "attractor solver");
  }
  if (near_multiple(params.alpha, kPi, 1e-12)) {
    throw DomainError(
        "alpha is a multiple of pi; the analytic catalog excludes this coin, use the numeric "
        "attractor solver");
  }
}

bool is_degenerate(const SU2CoinParams& params) {
  return near_multiple(params.alpha - kPi / 2, kPi, 1e-9);
}

QuantumWalk make_walk(const SU2CoinParams& params, const Lattice& lattice) {
  return QuantumWalk(lattice, SU2Coin{params.alpha, params.beta, params.gamma});
}

std::array<CoinEigenpair, 2> coin_eigensystem(const SU2CoinParams& params) {
  validate(params);
  const Complex eg = std::polar(1.0, params.gamma);
  Vector v1(2), v2(2);
  v1 << std::cos(params.beta), eg * std::sin(params.beta);
  v2 << std::sin(params.beta), -eg * std::cos(params.beta);
  return {CoinEigenpair{std::polar(1.0, params.alpha), v1},
          CoinEigenpair{std::polar(1.0, -params.alpha), v2}};
}

LineEigenstates line_eigenstates(const SU2CoinParams& params, int n) {
  if (n < 2) throw DomainError("line eigenstates require N >= 2");
  const auto eig = coin_eigensystem(params);
  const Complex phase = std::polar(1.0, -params.gamma);
  const double cot = std::cos(params.beta) / std::sin(params.beta);
  const double tan = std::tan(params.beta);
  return {CommonEigenstate{eig[0].value, geometric_state(cot * phase, eig[0].vector, n), 0.0},
          CommonEigenstate{eig[1].value, geometric_state(-tan * phase, eig[1].vector, n), 0.0}};
}

CycleConditions cycle_eigenstate_conditions(const SU2CoinParams& params, int n) {
  if (n < 3) throw DomainError("cycle conditions require N >= 3");
  const Complex phase = std::polar(1.0, -params.gamma * n);
  const double cot = std::cos(params.beta) / std::sin(params.beta);
  const double tan = std::tan(params.beta);
  CycleConditions c;
  c.phi1_exists = std::abs(std::pow(cot, n) * phase - 1.0) < 1e-9;
  c.phi2_exists = std::abs(std::pow(-tan, n) * phase - 1.0) < 1e-9;
  return c;
}

namespace {

struct Available {
  std::optional<CommonEigenstate> phi1;
  std::optional<CommonEigenstate> phi2;
};

Available available_eigenstates(const SU2CoinParams& params, const Lattice& lattice) {
  require_1d(lattice);
  const int n = lattice.vertex_count();
  const LineEigenstates eig = line_eigenstates(params, n);
  Available a;
  if (lattice.kind() == LatticeKind::Line) {
    a.phi1 = eig.phi1;
    a.phi2 = eig.phi2;
  } else {
    const CycleConditions c = cycle_eigenstate_conditions(params, n);
    if (c.phi1_exists) a.phi1 = eig.phi1;
    if (c.phi2_exists) a.phi2 = eig.phi2;
  }
  return a;
}

std::vector<Attractor> catalog(const SU2CoinParams& params, const Lattice& lattice) {
  validate(params);
  const Available av = available_eigenstates(params, lattice);
  const int d = lattice.dimension();
  const Complex l_plus = snap(std::polar(1.0, 2 * params.alpha));
  const Complex l_minus = snap(std::polar(1.0, -2 * params.alpha));

  std::vector<Attractor> out;
  Matrix rest = Matrix::Identity(d, d);
  int r = 0;
  for (const auto* phi : {&av.phi1, &av.phi2}) {
    if (!*phi) continue;
    const Matrix z = outer((*phi)->state, (*phi)->state);
    out.push_back({1.0, z, AttractorKind::PAttractor, 0.0});
    rest -= z;
    ++r;
  }
  out.push_back({1.0, rest / std::sqrt(static_cast<double>(d - r)), AttractorKind::General, 0.0});
  if (av.phi1 && av.phi2) {
    out.push_back({l_plus, outer(av.phi1->state, av.phi2->state), AttractorKind::PAttractor, 0.0});
    out.push_back({l_minus, outer(av.phi2->state, av.phi1->state), AttractorKind::PAttractor, 0.0});
  }
  const bool even_cycle = lattice.kind() == LatticeKind::Cycle && lattice.vertex_count() % 2 == 0;
  if (is_degenerate(params) && (lattice.kind() == LatticeKind::Line || even_cycle)) {
    // The recursion grows like tan(2 beta)^{-2N}; the closed form stays bounded.
    Matrix x;
    try {
      x = degenerate_attractor(params, lattice, DegenerateForm::Closed);
    } catch (const DomainError&) {
      if (lattice.kind() != LatticeKind::Line) throw;
      x = degenerate_attractor(params, lattice, DegenerateForm::Recursive);
    }
    out.push_back({-1.0, x, AttractorKind::General, 0.0});
  }
  std::stable_sort(out.begin(), out.end(), [](const Attractor& a, const Attractor& b) {
    return linalg::canonical_angle(a.lambda) < linalg::canonical_angle(b.lambda);
  });
  const QuantumWalk walk = make_walk(params, lattice);
  const auto configs = verification_configs(lattice);
  for (auto& a : out) a.residual = verify_attractor(walk, a, configs);
  return out;
}

Matrix block_d(Complex d1, Complex d2, Complex u, Complex v) {
  Matrix m(2, 2);
  m << d1 * (u + v), std::conj(d2) * v, d2 * u, -d1 * (u + v);
  return m;
}

Matrix recursive_form(const SU2CoinParams& params, int n) {
  const double t2b = std::tan(2 * params.beta);
  if (!std::isfinite(t2b) || std::abs(std::cos(2 * params.beta)) < 1e-12) {
    throw DomainError("recursive construction is singular at beta = pi/4 (mod pi/2)");
  }
  const Complex d1 = -0.5 * t2b;
  const Complex d2 = std::polar(1.0, params.gamma);
  const Complex d2c = std::conj(d2);
  std::vector<Complex> u(static_cast<std::size_t>(n * n)), v(u.size());
  auto at = [n](int s, int t) { return static_cast<std::size_t>(s * n + t); };

  // Column neighbour (s, t+1) and row neighbour (s+1, t) rules.
  auto next_col = [&](int s, int t) {
    const Complex w = u[at(s, t)] + v[at(s, t)];
    u[at(s, t + 1)] = -(d2 / d1) * u[at(s, t)] - d1 * d2 * w;
    v[at(s, t + 1)] = d1 * d2 * w;
  };
  auto next_row = [&](int s, int t) {
    const Complex w = u[at(s, t)] + v[at(s, t)];
    u[at(s + 1, t)] = d1 * d2c * w;
    v[at(s + 1, t)] = -(d2c / d1) * v[at(s, t)] - d1 * d2c * w;
  };

  u[at(0, 0)] = v[at(0, 0)] = 0.0;
  v[at(0, 1)] = 1.0;
  u[at(0, 1)] = -(d2 / d1) * u[at(0, 0)] - v[at(0, 1)];
  u[at(1, 0)] = (d2c / d2) * v[at(0, 1)];
  v[at(1, 0)] = -(d2c / d1) * v[at(0, 0)] - u[at(1, 0)];
  for (int t = 2; t < n; ++t) next_col(0, t - 1);
  for (int s = 2; s < n; ++s) next_row(s - 1, 0);
  for (int s = 1; s < n; ++s) {
    for (int t = 1; t < n; ++t) {
      if (t > s) {
        next_row(s - 1, t);
      } else if (t < s) {
        next_col(s, t - 1);
      } else {
        u[at(s, s)] = d1 * (u[at(s - 1, s)] + v[at(s - 1, s)]) / d2;
        v[at(s, s)] = d1 * (u[at(s, s - 1)] + v[at(s, s - 1)]) / d2c;
      }
    }
  }
  Matrix x(2 * n, 2 * n);
  for (int s = 0; s < n; ++s) {
    for (int t = 0; t < n; ++t) x.block(2 * s, 2 * t, 2, 2) = block_d(d1, d2, u[at(s, t)], v[at(s, t)]);
  }
  return x;
}

Matrix closed_form(const SU2CoinParams& params, int n) {
  const int d = 2 * n;
  const double cot2b = std::cos(2 * params.beta) / std::sin(2 * params.beta);
  const Complex i(0.0, 1.0);
  Matrix xm = Matrix::Zero(d, d);
  Matrix f = Matrix::Zero(d, d);
  Matrix e = Matrix::Zero(d, d);
  for (int s = 0; s < n; ++s) {
    const double sign = (s % 2 == 0 ? 1.0 : -1.0) / std::sqrt(2.0 * n);
    xm(2 * s, 2 * s) = sign;
    xm(2 * s + 1, 2 * s + 1) = -sign;
    for (int t = 0; t < n; ++t) {
      const Complex w = std::polar(1.0, 2 * kPi * s * t / n);
      f(2 * s, 2 * t) = w;
      f(2 * s + 1, 2 * t + 1) = w;
    }
  }
  for (int g = 0; g < n; ++g) {
    const double theta = 2 * kPi * g / n;
    const Complex is = i * std::sin(theta - params.gamma);
    const Complex den = is - cot2b;
    if (std::abs(den) < 1e-12) {
      throw DomainError("closed form is singular for this beta and gamma (block " +
                        std::to_string(g) + ")");
    }
    e(2 * g, 2 * g) = is / den;
    e(2 * g, 2 * g + 1) = std::polar(1.0, -theta) * cot2b / den;
    e(2 * g + 1, 2 * g) = std::polar(1.0, theta) * cot2b / den;
    e(2 * g + 1, 2 * g + 1) = is / den;
  }
  return xm * f.adjoint() * e * f;
}

}  // namespace

std::vector<Attractor> attractor_catalog_line(const SU2CoinParams& params, int n) {
  return catalog(params, Lattice::line(n));
}

std::vector<Attractor> attractor_catalog_cycle(const SU2CoinParams& params, int n) {
  return catalog(params, Lattice::cycle(n));
}

Matrix degenerate_attractor_raw(const SU2CoinParams& params, const Lattice& lattice,
                                DegenerateForm form) {
  validate(params);
  require_1d(lattice);
  if (!is_degenerate(params)) throw DomainError("degenerate attractor requires alpha = pi/2");
  const int n = lattice.vertex_count();
  if (lattice.kind() == LatticeKind::Cycle && n % 2 != 0) {
    throw DomainError("degenerate attractor exists on cycles with an even number of vertices only");
  }
  if (form == DegenerateForm::Recursive) {
    if (lattice.kind() != LatticeKind::Line) {
      throw DomainError("recursive construction is defined on lines only");
    }
    return recursive_form(params, n);
  }
  return closed_form(params, n);
}

Matrix degenerate_attractor(const SU2CoinParams& params, const Lattice& lattice,
                            DegenerateForm form) {
  Matrix x = degenerate_attractor_raw(params, lattice, form);
  const Available av = available_eigenstates(params, lattice);
  std::vector<Matrix> pure;
  if (av.phi1 && av.phi2) {
    pure.push_back(outer(av.phi1->state, av.phi2->state));
    pure.push_back(outer(av.phi2->state, av.phi1->state));
  }
  for (int pass = 0; pass < 2; ++pass) {
    for (const Matrix& p : pure) x -= linalg::hs_inner(x, p) * p;
  }
  const double norm = linalg::hs_norm(x);
  if (norm < 1e-10) throw DomainError("degenerate construction collapsed onto p-attractors");
  return x / norm;
}

EdgeStateProfile edge_state_profile(const SU2CoinParams& params, int n, const Matrix& rho0) {
  const LineEigenstates eig = line_eigenstates(params, n);
  if (rho0.rows() != 2 * n || rho0.cols() != 2 * n) throw DimensionError("rho0 dimension mismatch");
  EdgeStateProfile p;
  const double tb = std::tan(params.beta);
  p.q = tb * tb;
  p.normalizer = std::abs(p.q - 1.0) < 1e-14 ? 1.0 / n : (p.q - 1.0) / (std::pow(p.q, n) - 1.0);
  p.o1 = eig.phi1.state.dot(rho0 * eig.phi1.state).real();
  p.o2 = eig.phi2.state.dot(rho0 * eig.phi2.state).real();
  return p;
}

std::vector<double> edge_state_distribution(const EdgeStateProfile& profile, int n) {
  if (n < 2) throw DomainError("edge-state distribution requires N >= 2");
  std::vector<double> out(static_cast<std::size_t>(n));
  const double rest = 1.0 - profile.o1 - profile.o2;
  for (int s = 0; s < n; ++s) {
    const double p1 = profile.normalizer * std::pow(profile.q, n - 1 - s);
    const double p2 = profile.normalizer * std::pow(profile.q, s);
    out[s] = profile.o1 * p1 + profile.o2 * p2 + rest * (2.0 - p1 - p2) / (2.0 * n - 2.0);
  }
  return out;
}

std::vector<double> edge_state_distribution_attractors(const SU2CoinParams& params, int n,
                                                       const Matrix& rho0) {
  const auto dec = asymptotic_decomposition(attractor_catalog_line(params, n), rho0);
  return position_marginal(dec.stationary_part(), 2);
}

std::function<bool(const SU2CoinParams&)> unbiased_localizing_coins(double tolerance) {
  return [tolerance](const SU2CoinParams& p) {
    return std::abs(std::abs(std::sin(p.alpha) * std::sin(2 * p.beta)) - 1.0 / std::sqrt(2.0)) <
           tolerance;
  };
}

}  // namespace qwalk::analytic1d
