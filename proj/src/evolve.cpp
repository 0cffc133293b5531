#include "qwalk/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>

#include "qwalk/errors.hpp"

namespace qwalk {

Matrix density_from_state(const Vector& psi) { return psi * psi.adjoint(); }

std::vector<double> position_marginal(const Matrix& rho, int coin_dim) {
  const Eigen::Index v = rho.rows() / coin_dim;
  std::vector<double> p(static_cast<std::size_t>(v), 0.0);
  for (Eigen::Index x = 0; x < v; ++x) {
    for (int c = 0; c < coin_dim; ++c) p[x] += rho(x * coin_dim + c, x * coin_dim + c).real();
  }
  return p;
}

ObservableReport make_report(int step, const std::vector<double>& position,
                             std::optional<double> entropy, const Lattice& lattice) {
  ObservableReport r;
  r.step = step;
  r.position = position;
  const double u = 1.0 / static_cast<double>(position.size());
  for (double x : position) r.manhattan += std::abs(x - u);
  r.tv = 0.5 * r.manhattan;
  r.entropy = entropy;
  if (!lattice.is_2d()) {
    double m1 = 0.0, m2 = 0.0;
    for (std::size_t s = 0; s < position.size(); ++s) {
      m1 += static_cast<double>(s) * position[s];
      m2 += static_cast<double>(s * s) * position[s];
    }
    r.variance = m2 - m1 * m1;
  } else {
    r.marginal_s.assign(static_cast<std::size_t>(lattice.extent_m()), 0.0);
    r.marginal_t.assign(static_cast<std::size_t>(lattice.extent_n()), 0.0);
    for (int x = 0; x < lattice.vertex_count(); ++x) {
      const auto [s, t] = lattice.coords(x);
      r.marginal_s[s] += position[x];
      r.marginal_t[t] += position[x];
    }
  }
  return r;
}

ObservableReport make_report(int step, const Matrix& rho, const Lattice& lattice) {
  return make_report(step, position_marginal(rho, lattice.coin_dim()),
                     linalg::von_neumann_entropy(rho), lattice);
}

void apply_hygiene(Matrix& rho, Complex trace) {
  if (linalg::max_abs(rho - rho.adjoint()) > 1e-12) rho = 0.5 * (rho + rho.adjoint()).eval();
  const Complex tr = rho.trace();
  if (std::abs(tr - trace) > 1e-12 && std::abs(tr) > 0.0) rho *= trace / tr;
}

Matrix step_exact_bruteforce(const WalkModel& model, const Matrix& rho) {
  if (rho.rows() != model.dimension() || rho.cols() != model.dimension()) {
    throw DimensionError("density operator dimension does not match the model");
  }
  Matrix out = Matrix::Zero(rho.rows(), rho.cols());
  for (const EdgeConfig& k : enumerate_configs(model.lattice())) {
    const double pi = config_probability(model.probs(), k);
    if (pi == 0.0) continue;
    const Matrix u = build_unitary(model, k);
    out.noalias() += pi * (u * rho * u.adjoint());
  }
  apply_hygiene(out, rho.trace());
  return out;
}

namespace {

// out += w * T rho T^dagger for a sparse T.
void add_sandwich(Matrix& out, const SparseTerm& t, const Matrix& rho, double w) {
  for (const auto& a : t) {
    for (const auto& b : t) {
      out(a.row, b.row) += w * a.value * rho(a.col, b.col) * std::conj(b.value);
    }
  }
}

}  // namespace

FactorizedStepper::FactorizedStepper(const WalkModel& model) : coin_(model.coin()) {
  const EdgeTermDecomposition& terms = model.edge_terms();
  const int d = terms.dim;
  std::vector<Eigen::Triplet<Complex>> triplets;
  for (const auto& e : terms.boundary) triplets.emplace_back(e.row, e.col, e.value);
  for (int e = 0; e < model.edge_count(); ++e) {
    const double p = model.probs()[e];
    EdgeCorrection c{terms.hop[e], terms.reflect[e], {}, p};
    for (const auto& x : c.hop) c.mean.push_back({x.row, x.col, p * x.value});
    for (const auto& x : c.reflect) c.mean.push_back({x.row, x.col, (1.0 - p) * x.value});
    for (const auto& x : c.mean) triplets.emplace_back(x.row, x.col, x.value);
    edges_.push_back(std::move(c));
  }
  mean_step_.resize(d, d);
  mean_step_.setFromTriplets(triplets.begin(), triplets.end());
}

Matrix FactorizedStepper::step(const Matrix& rho) const {
  if (rho.rows() != mean_step_.rows() || rho.cols() != mean_step_.cols()) {
    throw DimensionError("density operator dimension does not match the model");
  }
  const Matrix coined = conjugate_by_coin(rho, coin_);
  const Matrix left = mean_step_ * coined;
  Matrix out = left * mean_step_.adjoint();
  for (const EdgeCorrection& c : edges_) {
    add_sandwich(out, c.hop, coined, c.p);
    add_sandwich(out, c.reflect, coined, 1.0 - c.p);
    add_sandwich(out, c.mean, coined, -1.0);
  }
  apply_hygiene(out, rho.trace());
  return out;
}

Matrix step_exact_factorized(const WalkModel& model, const Matrix& rho) {
  return FactorizedStepper(model).step(rho);
}

ExactRun run_exact(const WalkModel& model, const Matrix& rho0, int n_steps, int record_every) {
  if (n_steps < 0) throw ValidationError("n_steps must be non-negative");
  if (record_every < 1) throw ValidationError("record_every must be positive");
  if (rho0.rows() != model.dimension() || rho0.cols() != model.dimension()) {
    throw DimensionError("initial state dimension does not match the model");
  }
  const FactorizedStepper stepper(model);
  ExactRun run;
  Matrix rho = rho0;
  run.reports.push_back(make_report(0, rho, model.lattice()));
  for (int n = 1; n <= n_steps; ++n) {
    rho = stepper.step(rho);
    if (n % record_every == 0 || n == n_steps) {
      run.reports.push_back(make_report(n, rho, model.lattice()));
    }
  }
  run.final_state = std::move(rho);
  return run;
}

Matrix evolve_exact(const WalkModel& model, const Matrix& rho0, int n_steps) {
  const FactorizedStepper stepper(model);
  Matrix rho = rho0;
  for (int n = 0; n < n_steps; ++n) rho = stepper.step(rho);
  return rho;
}

Vector apply_unitary(const QuantumWalk& walk, const EdgeConfig& k, const Vector& psi) {
  const Matrix& coin = walk.coin();
  const int c = walk.coin_dim();
  Vector coined(psi.size());
  for (Eigen::Index x = 0; x < psi.size() / c; ++x) {
    coined.segment(x * c, c).noalias() = coin * psi.segment(x * c, c);
  }
  const EdgeTermDecomposition& t = walk.edge_terms();
  Vector out = Vector::Zero(psi.size());
  for (const auto& e : t.boundary) out[e.row] += e.value * coined[e.col];
  for (int e = 0; e < k.size(); ++e) {
    for (const auto& x : k.contains(e) ? t.hop[e] : t.reflect[e]) out[x.row] += x.value * coined[x.col];
  }
  return out;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

struct BlockSums {
  std::vector<std::vector<double>> position;
  std::vector<Matrix> density;
  Matrix final_density;
};

constexpr int kBlockSize = 64;

}  // namespace

MonteCarloRun run_monte_carlo(const WalkModel& model, const Vector& psi0, int n_steps,
                              const MonteCarloOptions& options) {
  if (options.shots < 1) throw ValidationError("shots must be at least 1");
  if (n_steps < 0) throw ValidationError("n_steps must be non-negative");
  if (options.record_every < 1) throw ValidationError("record_every must be positive");
  const int d = model.dimension();
  if (psi0.size() != d) throw DimensionError("initial state dimension does not match the model");
  if (std::abs(psi0.norm() - 1.0) > 1e-12) throw ValidationError("initial state is not normalized");

  std::vector<int> record_steps;
  for (int n = 0; n <= n_steps; ++n) {
    if (n % options.record_every == 0 || n == n_steps) record_steps.push_back(n);
  }
  const std::size_t records = record_steps.size();
  const bool track_entropy = d <= 64;
  const bool keep_ensemble = d <= kMaxEnsembleDim;
  const int c = model.coin_dim();
  const int v = model.lattice().vertex_count();

  auto empty_sums = [&] {
    BlockSums b;
    b.position.assign(records, std::vector<double>(static_cast<std::size_t>(v), 0.0));
    if (track_entropy) b.density.assign(records, Matrix::Zero(d, d));
    if (keep_ensemble) b.final_density = Matrix::Zero(d, d);
    return b;
  };

  auto run_block = [&](int block) {
    BlockSums sums = empty_sums();
    const int first = block * kBlockSize;
    const int last = std::min(options.shots, first + kBlockSize);
    for (int traj = first; traj < last; ++traj) {
      std::mt19937_64 rng(splitmix64(options.seed ^ splitmix64(static_cast<std::uint64_t>(traj))));
      Vector psi = psi0;
      std::size_t r = 0;
      for (int n = 0; n <= n_steps; ++n) {
        if (n > 0) psi = apply_unitary(model, sample_config(model.probs(), rng), psi);
        if (r < records && record_steps[r] == n) {
          for (int x = 0; x < v; ++x) sums.position[r][x] += psi.segment(x * c, c).squaredNorm();
          if (track_entropy) sums.density[r].noalias() += psi * psi.adjoint();
          ++r;
        }
      }
      if (keep_ensemble) sums.final_density.noalias() += psi * psi.adjoint();
    }
    return sums;
  };

  const int blocks = (options.shots + kBlockSize - 1) / kBlockSize;
  const int threads = std::max(1, std::min(options.threads, blocks));
  BlockSums total = empty_sums();
  auto accumulate = [&](const BlockSums& b) {
    for (std::size_t r = 0; r < records; ++r) {
      for (int x = 0; x < v; ++x) total.position[r][x] += b.position[r][x];
      if (track_entropy) total.density[r] += b.density[r];
    }
    if (keep_ensemble) total.final_density += b.final_density;
  };

  // Blocks run in waves of `threads` and merge in block order.
  for (int start = 0; start < blocks; start += threads) {
    const int count = std::min(threads, blocks - start);
    std::vector<BlockSums> wave(static_cast<std::size_t>(count));
    if (count == 1) {
      wave[0] = run_block(start);
    } else {
      std::vector<std::thread> pool;
      for (int i = 0; i < count; ++i) {
        pool.emplace_back([&, i] { wave[i] = run_block(start + i); });
      }
      for (auto& t : pool) t.join();
    }
    for (const auto& b : wave) accumulate(b);
  }

  const double inv = 1.0 / static_cast<double>(options.shots);
  MonteCarloRun run;
  for (std::size_t r = 0; r < records; ++r) {
    std::vector<double> p = total.position[r];
    for (double& x : p) x *= inv;
    std::optional<double> entropy;
    if (track_entropy) entropy = linalg::von_neumann_entropy(total.density[r] * inv);
    run.reports.push_back(make_report(record_steps[r], p, entropy, model.lattice()));
  }
  if (keep_ensemble) run.ensemble = total.final_density * inv;
  return run;
}

}  // namespace qwalk
