#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "doctest.h"
#include "qwalk/errors.hpp"
#include "qwalk/evolve.hpp"

using namespace qwalk;

namespace {

const double kPi = std::numbers::pi;

QuantumWalk example_walk(const Lattice& lat) {
  return QuantumWalk(lat, SU2Coin{kPi / 2, std::atan(0.5), 0.0});
}

Matrix random_density(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrix a(d, d);
  for (int i = 0; i < d; ++i) {
    for (int k = 0; k < d; ++k) a(i, k) = Complex(g(rng), g(rng));
  }
  Matrix rho = a * a.adjoint();
  return rho / rho.trace();
}

Matrix random_unitary(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrix a(d, d);
  for (int i = 0; i < d; ++i) {
    for (int k = 0; k < d; ++k) a(i, k) = Complex(g(rng), g(rng));
  }
  Eigen::HouseholderQR<Matrix> qr(a);
  return qr.householderQ() * Matrix::Identity(d, d);
}

// Sum over every configuration with its probability, written out directly.
Matrix enumerate_channel(const WalkModel& model, const Matrix& rho) {
  Matrix out = Matrix::Zero(rho.rows(), rho.cols());
  for (const auto& k : enumerate_configs(model.lattice())) {
    const double pk = config_probability(model.probs(), k);
    if (pk == 0.0) continue;
    const Matrix u = build_unitary(model, k);
    out += pk * u * rho * u.adjoint();
  }
  return out;
}

Vector psi0_example() {
  Vector v(8);
  v << 2, 1, 2, 1, 2, 1, 2, 1;
  return v / std::sqrt(20.0);
}

}  // namespace

TEST_CASE("brute force matches an independent enumeration") {
  std::mt19937_64 rng(2);
  const WalkModel m(example_walk(Lattice::line(4)), EdgeProbabilities({0.2, 0.5, 0.9}));
  const Matrix rho = random_density(8, rng);
  CHECK(linalg::max_abs(step_exact_bruteforce(m, rho) - enumerate_channel(m, rho)) < 1e-14);
}

TEST_CASE("deterministic extremes") {
  std::mt19937_64 rng(4);
  const QuantumWalk w = example_walk(Lattice::cycle(4));
  const Matrix rho = random_density(8, rng);
  const Matrix uf = build_unitary(w, EdgeConfig::full(4));
  const Matrix u0 = build_unitary(w, EdgeConfig::none(4));
  for (auto step : {step_exact_bruteforce, step_exact_factorized}) {
    CHECK(linalg::max_abs(step(WalkModel(w, 1.0), rho) - uf * rho * uf.adjoint()) < 1e-13);
    CHECK(linalg::max_abs(step(WalkModel(w, 0.0), rho) - u0 * rho * u0.adjoint()) < 1e-13);
  }
}

TEST_CASE("unitality") {
  for (const Lattice& lat : {Lattice::line(5), Lattice::grid(2, 2, Boundary::Carpet)}) {
    const QuantumWalk w = lat.is_2d() ? QuantumWalk(lat, GroverCoin{}) : example_walk(lat);
    const int d = w.dimension();
    const Matrix mixed = Matrix::Identity(d, d) / static_cast<double>(d);
    for (double p : {0.0, 0.3, 1.0}) {
      CHECK(linalg::max_abs(step_exact_factorized(WalkModel(w, p), mixed) - mixed) < 1e-12);
      CHECK(linalg::max_abs(step_exact_bruteforce(WalkModel(w, p), mixed) - mixed) < 1e-12);
    }
  }
}

TEST_CASE("factorized step equals brute force on random instances") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Lattice> lattices = {Lattice::line(4), Lattice::line(7), Lattice::cycle(3), Lattice::cycle(4),
                                   Lattice::cycle(6), Lattice::grid(2, 2, Boundary::Carpet),
                                   Lattice::grid(3, 2, Boundary::Carpet)};
  int instances = 0;
  for (int trial = 0; trial < 3; ++trial) {
    for (const Lattice& lat : lattices) {
      ++instances;
      const int c = lat.coin_dim();
      CoinSpec coin;
      if (c == 2) {
        coin = SU2Coin{u(rng) * 6, u(rng) * 6, u(rng) * 6};
      } else {
        coin = trial == 0 ? CoinSpec{GroverCoin{}} : CoinSpec{CustomCoin{random_unitary(4, rng)}};
      }
      std::vector<double> p(lat.edge_count());
      for (double& x : p) x = u(rng);
      const WalkModel m(QuantumWalk(lat, coin), EdgeProbabilities(p));
      const Matrix rho = random_density(lat.dimension(), rng);
      CHECK(linalg::max_abs(step_exact_factorized(m, rho) - step_exact_bruteforce(m, rho)) < 1e-12);
    }
  }
  CHECK(instances >= 20);
}

TEST_CASE("trace, Hermiticity and entropy are preserved or increase") {
  std::mt19937_64 rng(7);
  const WalkModel m(example_walk(Lattice::line(5)), 0.4);
  Matrix rho = random_density(10, rng);
  for (int n = 0; n < 30; ++n) {
    const Matrix next = step_exact_factorized(m, rho);
    CHECK(std::abs(next.trace() - rho.trace()) < 1e-12);
    CHECK(linalg::max_abs(next - next.adjoint()) < 1e-12);
    CHECK(linalg::von_neumann_entropy(next) >= linalg::von_neumann_entropy(rho) - 1e-9);
    rho = next;
  }
}

TEST_CASE("position marginal examples") {
  const Lattice lat = Lattice::line(4);
  Matrix point = Matrix::Zero(8, 8);
  point(5, 5) = 1.0;  // |2, R>
  const auto p = position_marginal(point, 2);
  CHECK(p == std::vector<double>{0.0, 0.0, 1.0, 0.0});
  const auto u = position_marginal(Matrix::Identity(8, 8) / 8.0, 2);
  for (double x : u) CHECK(x == doctest::Approx(0.25));

  Vector phi(8);
  phi << 8, -16, -4, 8, 2, -4, -1, 2;
  phi /= 5.0 * std::sqrt(17.0);
  const auto z = position_marginal(phi * phi.adjoint(), 2);
  const double expected[4] = {64.0 / 85, 16.0 / 85, 4.0 / 85, 1.0 / 85};
  Vector other(8);
  other << 2, 1, 4, 2, 8, 4, 16, 8;
  other /= 5.0 * std::sqrt(17.0);
  const auto z1 = position_marginal(other * other.adjoint(), 2);
  for (int s = 0; s < 4; ++s) {
    CHECK(std::abs(z[s] - expected[s]) < 1e-15);
    CHECK(std::abs(z1[s] - expected[3 - s]) < 1e-15);
  }
}

TEST_CASE("observable report fields") {
  const Lattice lat = Lattice::line(4);
  Matrix point = Matrix::Zero(8, 8);
  point(0, 0) = 1.0;
  const auto r = make_report(3, point, lat);
  CHECK(r.step == 3);
  CHECK(r.manhattan == doctest::Approx(1.5));
  CHECK(r.tv == doctest::Approx(0.75));
  REQUIRE(r.entropy.has_value());
  CHECK(std::abs(*r.entropy) < 1e-12);
  REQUIRE(r.variance.has_value());
  CHECK(std::abs(*r.variance) < 1e-15);

  const Lattice g = Lattice::grid(2, 3, Boundary::Carpet);
  const auto r2 = make_report(0, Matrix::Identity(24, 24) / 24.0, g);
  CHECK_FALSE(r2.variance.has_value());
  REQUIRE(r2.marginal_s.size() == 2);
  REQUIRE(r2.marginal_t.size() == 3);
  CHECK(r2.marginal_s[1] == doctest::Approx(0.5));
  CHECK(r2.marginal_t[2] == doctest::Approx(1.0 / 3));
}

TEST_CASE("run_exact reporting cadence") {
  const WalkModel m(example_walk(Lattice::line(4)), 0.5);
  const Vector psi = psi0_example();
  const Matrix rho0 = density_from_state(psi);
  const auto zero = run_exact(m, rho0, 0);
  REQUIRE(zero.reports.size() == 1);
  CHECK(zero.reports[0].step == 0);
  CHECK(zero.reports[0].manhattan < 1e-15);
  const auto run = run_exact(m, rho0, 10, 4);
  std::vector<int> steps;
  for (const auto& r : run.reports) steps.push_back(r.step);
  CHECK(steps == std::vector<int>{0, 4, 8, 10});
  CHECK(linalg::max_abs(run.final_state - evolve_exact(m, rho0, 10)) < 1e-15);
  CHECK_THROWS_AS(run_exact(m, rho0, -1), ValidationError);
  CHECK_THROWS_AS(run_exact(m, Matrix::Identity(4, 4), 3), DimensionError);
}

TEST_CASE("Manhattan distance of the worked example converges") {
  const WalkModel m(example_walk(Lattice::line(4)), 0.5);
  const auto run = run_exact(m, density_from_state(psi0_example()), 500, 500);
  CHECK(std::abs(run.reports.back().manhattan - 735.0 / 1156.0) < 1e-6);
}

TEST_CASE("hygiene restores Hermiticity and the requested trace") {
  Matrix rho = Matrix::Identity(3, 3) / 3.0;
  rho(0, 1) = Complex(1e-9, 0.0);
  rho(0, 0) += 1e-9;
  apply_hygiene(rho, Complex(1.0, 0.0));
  CHECK(linalg::max_abs(rho - rho.adjoint()) == 0.0);
  CHECK(std::abs(rho.trace() - Complex(1.0)) < 1e-15);
}

TEST_CASE("Monte Carlo with certain edges follows the unitary trajectory") {
  const QuantumWalk w = example_walk(Lattice::line(4));
  const WalkModel m(w, 1.0);
  const Vector psi = psi0_example();
  MonteCarloOptions opts;
  opts.shots = 1;
  const auto mc = run_monte_carlo(m, psi, 7, opts);
  const Matrix u = build_unitary(w, EdgeConfig::full(3));
  Vector cur = psi;
  for (int n = 0; n <= 7; ++n) {
    const auto exact = position_marginal(density_from_state(cur), 2);
    for (int s = 0; s < 4; ++s) CHECK(std::abs(mc.reports[n].position[s] - exact[s]) < 1e-14);
    cur = u * cur;
  }
}

TEST_CASE("Monte Carlo is deterministic and thread-count independent") {
  const WalkModel m(example_walk(Lattice::line(4)), 0.5);
  MonteCarloOptions a;
  a.shots = 300;
  a.seed = 12345;
  MonteCarloOptions b = a;
  b.threads = 4;
  const auto r1 = run_monte_carlo(m, psi0_example(), 20, a);
  const auto r2 = run_monte_carlo(m, psi0_example(), 20, a);
  const auto r3 = run_monte_carlo(m, psi0_example(), 20, b);
  for (std::size_t i = 0; i < r1.reports.size(); ++i) {
    CHECK(r1.reports[i].position == r2.reports[i].position);
    CHECK(r1.reports[i].position == r3.reports[i].position);
  }
  a.seed = 54321;
  const auto r4 = run_monte_carlo(m, psi0_example(), 20, a);
  CHECK(r4.reports.back().position != r1.reports.back().position);
}

TEST_CASE("Monte Carlo matches the exact distribution at 10^4 shots") {
  const WalkModel m(example_walk(Lattice::line(4)), 0.5);
  const Vector psi = psi0_example();
  MonteCarloOptions opts;
  opts.shots = 10000;
  opts.seed = 1;
  opts.threads = 4;
  opts.record_every = 50;
  const auto mc = run_monte_carlo(m, psi, 50, opts);
  const auto exact = position_marginal(evolve_exact(m, density_from_state(psi), 50), 2);
  double l1 = 0.0;
  for (int s = 0; s < 4; ++s) l1 += std::abs(mc.reports.back().position[s] - exact[s]);
  CHECK(l1 < 0.05);
  REQUIRE(mc.ensemble.has_value());
  CHECK(std::abs(mc.ensemble->trace() - Complex(1.0)) < 1e-12);
}

TEST_CASE("Monte Carlo argument validation") {
  const WalkModel m(example_walk(Lattice::line(4)), 0.5);
  MonteCarloOptions opts;
  opts.shots = 0;
  CHECK_THROWS_AS(run_monte_carlo(m, psi0_example(), 3, opts), ValidationError);
  opts.shots = 10;
  CHECK_THROWS_AS(run_monte_carlo(m, 2.0 * psi0_example(), 3, opts), ValidationError);
}

TEST_CASE("apply_unitary matches the dense operator") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  const QuantumWalk w(Lattice::grid(3, 3, Boundary::Torus), GroverCoin{});
  Vector psi(w.dimension());
  for (auto& x : psi) x = Complex(g(rng), g(rng));
  for (std::uint64_t mask : {0ull, 1ull, 0x2a5ull, (1ull << 18) - 1}) {
    const auto k = EdgeConfig::from_mask(mask, w.edge_count());
    CHECK((apply_unitary(w, k, psi) - build_unitary(w, k) * psi).norm() < 1e-13);
  }
}
