#include "qwalk/attractors.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "qwalk/errors.hpp"
#include "qwalk/evolve.hpp"

namespace qwalk {

const char* to_string(AttractorKind kind) {
  return kind == AttractorKind::PAttractor ? "p-attractor" : "general";
}

std::vector<EdgeConfig> verification_configs(const Lattice& lattice) {
  const int e = lattice.edge_count();
  std::vector<EdgeConfig> out;
  if (e <= 10) {
    for (EdgeConfig k : enumerate_configs(e)) out.push_back(std::move(k));
    return out;
  }
  out.push_back(EdgeConfig::none(e));
  out.push_back(EdgeConfig::full(e));
  for (int l = 0; l < e; ++l) {
    EdgeConfig k = EdgeConfig::full(e);
    k.set(l, false);
    out.push_back(std::move(k));
  }
  std::mt19937_64 rng(0x5eedULL);
  const EdgeProbabilities half = EdgeProbabilities::uniform(e, 0.5);
  for (int i = 0; i < 32; ++i) out.push_back(sample_config(half, rng));
  return out;
}

namespace {

struct Cluster {
  Complex value;
  std::vector<Vector> vectors;
};

// Groups eigenpairs whose eigenvalues agree within the clustering tolerance.
std::vector<Cluster> cluster_eigenpairs(const std::vector<linalg::EigenPair>& pairs) {
  std::vector<Cluster> clusters;
  for (const auto& p : pairs) {
    auto it = std::find_if(clusters.begin(), clusters.end(), [&](const Cluster& c) {
      return std::abs(c.value - p.value) < linalg::kClusterTol;
    });
    if (it == clusters.end()) {
      clusters.push_back({p.value, {p.vector}});
    } else {
      it->vectors.push_back(p.vector);
    }
  }
  std::stable_sort(clusters.begin(), clusters.end(), [](const Cluster& a, const Cluster& b) {
    return linalg::canonical_angle(a.value) < linalg::canonical_angle(b.value);
  });
  // Snap values that are numerically real unit roots.
  for (auto& c : clusters) {
    if (std::abs(c.value.imag()) < 1e-13) c.value = Complex(c.value.real(), 0.0);
    if (std::abs(c.value.real()) < 1e-13) c.value = Complex(0.0, c.value.imag());
  }
  return clusters;
}

Matrix columns_of(const std::vector<Vector>& vs) {
  Matrix m(vs.empty() ? 0 : vs.front().size(), static_cast<Eigen::Index>(vs.size()));
  for (std::size_t j = 0; j < vs.size(); ++j) m.col(static_cast<Eigen::Index>(j)) = vs[j];
  return m;
}

Matrix walk_rc(const QuantumWalk& walk) { return walk.reflection() * walk.coin(); }

// Orthonormal bases of the coin blocks B with (RC) B (RC)^dagger = lambda B.
std::vector<std::pair<Complex, std::vector<Matrix>>> coin_block_bases(const QuantumWalk& walk) {
  const Matrix rc = walk_rc(walk);
  const Eigen::Index c = rc.rows();
  const auto clusters = cluster_eigenpairs(linalg::eig(linalg::kron(rc, rc.conjugate())));
  std::vector<std::pair<Complex, std::vector<Matrix>>> out;
  for (const auto& cl : clusters) {
    if (std::abs(std::abs(cl.value) - 1.0) > 1e-8) continue;
    const Matrix basis = linalg::range_basis(columns_of(cl.vectors));
    std::vector<Matrix> blocks;
    for (Eigen::Index j = 0; j < basis.cols(); ++j) blocks.push_back(linalg::unvec(basis.col(j), c, c));
    out.emplace_back(cl.value, std::move(blocks));
  }
  return out;
}

Matrix dense_from_triplets(const std::vector<Eigen::Triplet<Complex>>& triplets, int rows, int cols) {
  Eigen::SparseMatrix<Complex, Eigen::RowMajor> a(rows, cols);
  a.setFromTriplets(triplets.begin(), triplets.end());
  std::vector<int> keep;
  for (int r = 0; r < rows; ++r) {
    if (a.row(r).norm() > 0.0) keep.push_back(r);
  }
  Matrix dense = Matrix::Zero(static_cast<Eigen::Index>(keep.size()), cols);
  for (std::size_t i = 0; i < keep.size(); ++i) {
    for (Eigen::SparseMatrix<Complex, Eigen::RowMajor>::InnerIterator it(a, keep[i]); it; ++it) {
      dense(static_cast<Eigen::Index>(i), it.col()) = it.value();
    }
  }
  return dense;
}

void fix_matrix_phase(Matrix& x) {
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      if (std::abs(x(i, j)) > 1e-8) {
        x *= std::conj(x(i, j)) / std::abs(x(i, j));
        return;
      }
    }
  }
}

}  // namespace

std::vector<Complex> candidate_lambdas(const QuantumWalk& walk) {
  std::vector<Complex> out;
  for (const auto& [lambda, blocks] : coin_block_bases(walk)) out.push_back(lambda);
  return out;
}

Eigen::SparseMatrix<Complex> sparse_unitary(const QuantumWalk& walk, const EdgeConfig& k) {
  const EdgeTermDecomposition& t = walk.edge_terms();
  const Matrix& coin = walk.coin();
  const int c = walk.coin_dim();
  std::vector<Eigen::Triplet<Complex>> triplets;
  auto add = [&](const SparseEntry& e) {
    // Column (x, dir) of S_K feeds every column (x, dir') of U_K through C.
    const int x = e.col / c;
    const int dir = e.col % c;
    for (int out = 0; out < c; ++out) {
      const Complex w = coin(dir, out);
      if (w != Complex(0.0, 0.0)) triplets.emplace_back(e.row, x * c + out, e.value * w);
    }
  };
  for (const auto& e : t.boundary) add(e);
  for (int e = 0; e < k.size(); ++e) {
    for (const auto& x : k.contains(e) ? t.hop[e] : t.reflect[e]) add(x);
  }
  Eigen::SparseMatrix<Complex> u(t.dim, t.dim);
  u.setFromTriplets(triplets.begin(), triplets.end());
  return u;
}

double verify_eigenstate(const QuantumWalk& walk, const Vector& psi, Complex alpha,
                         std::span<const EdgeConfig> configs) {
  double worst = 0.0;
  for (const EdgeConfig& k : configs) {
    worst = std::max(worst, (apply_unitary(walk, k, psi) - alpha * psi).norm());
  }
  return worst;
}

std::vector<CommonEigenstate> common_eigenstates_numeric(const QuantumWalk& walk) {
  const Lattice& lat = walk.lattice();
  const int v = lat.vertex_count();
  const int c = lat.coin_dim();
  const auto toggles = toggle_blocks(walk);
  const auto configs = verification_configs(lat);
  std::vector<CommonEigenstate> out;

  for (const Cluster& cl : cluster_eigenpairs(linalg::eig(walk_rc(walk)))) {
    const Matrix local = linalg::range_basis(columns_of(cl.vectors));
    const int k = static_cast<int>(local.cols());
    // psi = sum_{x,j} a_{x,j} |x> (x) v_j; impose T_e psi = psi for every edge.
    std::vector<Eigen::Triplet<Complex>> triplets;
    int row = 0;
    for (const Toggle& t : toggles) {
      const Matrix d = t.block - Matrix::Identity(2, 2);
      for (int i = 0; i < 2; ++i, ++row) {
        for (int m = 0; m < 2; ++m) {
          if (d(i, m) == Complex(0.0, 0.0)) continue;
          const int x = t.support[m] / c;
          const int dir = t.support[m] % c;
          for (int j = 0; j < k; ++j) triplets.emplace_back(row, x * k + j, d(i, m) * local(dir, j));
        }
      }
    }
    const Matrix a = dense_from_triplets(triplets, row, v * k);
    const Matrix kern = linalg::kernel_basis(a);
    for (Eigen::Index col = 0; col < kern.cols(); ++col) {
      Vector psi = Vector::Zero(lat.dimension());
      for (int x = 0; x < v; ++x) {
        for (int j = 0; j < k; ++j) psi.segment(x * c, c) += kern(x * k + j, col) * local.col(j);
      }
      psi.normalize();
      linalg::fix_phase(psi);
      const double res = verify_eigenstate(walk, psi, cl.value, configs);
      out.push_back({cl.value, std::move(psi), res});
    }
  }
  return out;
}

std::vector<Attractor> p_attractors(const std::vector<CommonEigenstate>& eigenstates) {
  std::vector<Attractor> out;
  for (const auto& a : eigenstates) {
    for (const auto& b : eigenstates) {
      Complex lambda = a.alpha * std::conj(b.alpha);
      if (std::abs(lambda.imag()) < 1e-13) lambda = Complex(lambda.real(), 0.0);
      if (std::abs(lambda.real()) < 1e-13) lambda = Complex(0.0, lambda.imag());
      out.push_back({lambda, a.state * b.state.adjoint(), AttractorKind::PAttractor, 0.0});
    }
  }
  // Group by lambda (within the clustering tolerance), preserving pair order.
  std::vector<Complex> reps;
  for (const auto& x : out) {
    const bool seen = std::any_of(reps.begin(), reps.end(), [&](Complex r) {
      return std::abs(r - x.lambda) < linalg::kClusterTol;
    });
    if (!seen) reps.push_back(x.lambda);
  }
  std::stable_sort(reps.begin(), reps.end(), [](Complex a, Complex b) {
    return linalg::canonical_angle(a) < linalg::canonical_angle(b);
  });
  std::vector<Attractor> sorted;
  for (Complex r : reps) {
    for (const auto& x : out) {
      if (std::abs(r - x.lambda) < linalg::kClusterTol) sorted.push_back({r, x.matrix, x.kind, 0.0});
    }
  }
  return sorted;
}

double verify_attractor(const QuantumWalk& walk, const Attractor& attractor,
                        std::span<const EdgeConfig> configs) {
  const Matrix& x = attractor.matrix;
  double worst = 0.0;
  std::vector<Eigen::SparseMatrix<Complex>> unitaries;
  unitaries.reserve(configs.size());
  for (const EdgeConfig& k : configs) {
    unitaries.push_back(sparse_unitary(walk, k));
    const auto& u = unitaries.back();
    const Matrix lhs = u * x;
    const Matrix rhs = attractor.lambda * (x * u);
    worst = std::max(worst, linalg::max_abs(lhs - rhs));
  }
  if (attractor.kind == AttractorKind::PAttractor && !unitaries.empty()) {
    // Pair condition on an evenly spread subset of at most 12 configurations.
    const std::size_t count = std::min<std::size_t>(12, unitaries.size());
    std::vector<std::size_t> pick;
    for (std::size_t i = 0; i < count; ++i) pick.push_back(i * unitaries.size() / count);
    for (std::size_t i : pick) {
      const Matrix ux = unitaries[i] * x;
      for (std::size_t j : pick) {
        const Matrix lhs = ux * Eigen::SparseMatrix<Complex>(unitaries[j].adjoint());
        worst = std::max(worst, linalg::max_abs(lhs - attractor.lambda * x));
      }
    }
  }
  return worst;
}

std::vector<Attractor> attractor_space_numeric(const QuantumWalk& walk) {
  const Lattice& lat = walk.lattice();
  const int d = lat.dimension();
  if (static_cast<long long>(d) * d > kMaxSolverOperatorDim) {
    throw CapacityError("operator space dimension " + std::to_string(d * d) +
                        " exceeds the dense solver limit of " +
                        std::to_string(kMaxSolverOperatorDim));
  }
  const int v = lat.vertex_count();
  const int c = lat.coin_dim();
  const auto toggles = toggle_blocks(walk);
  const auto eigenstates = common_eigenstates_numeric(walk);
  const auto pure = p_attractors(eigenstates);
  const auto configs = verification_configs(lat);

  std::vector<Attractor> out;
  for (const auto& [lambda, blocks] : coin_block_bases(walk)) {
    const int k = static_cast<int>(blocks.size());
    const int unknowns = v * v * k;
    auto idx = [&](int s, int t, int j) { return (s * v + t) * k + j; };

    // X = sum u_{s,t,j} |s><t| (x) B_j. Each constraint row is one entry of
    // T_e X - X T_e, which vanishes outside the rows and columns of supp(T_e).
    std::vector<Eigen::Triplet<Complex>> triplets;
    auto add_entry = [&](int row, int alpha, int beta, Complex w) {
      if (w == Complex(0.0, 0.0)) return;
      const int s = alpha / c, a = alpha % c, t = beta / c, b = beta % c;
      for (int j = 0; j < k; ++j) {
        const Complex coef = w * blocks[j](a, b);
        if (coef != Complex(0.0, 0.0)) triplets.emplace_back(row, idx(s, t, j), coef);
      }
    };
    int row = 0;
    for (const Toggle& t : toggles) {
      const Matrix dm = t.block - Matrix::Identity(2, 2);
      const auto& sup = t.support;
      for (int i = 0; i < 2; ++i) {
        for (int beta = 0; beta < d; ++beta, ++row) {
          for (int m = 0; m < 2; ++m) add_entry(row, sup[m], beta, dm(i, m));
          for (int l = 0; l < 2; ++l) {
            if (beta != sup[l]) continue;
            for (int m = 0; m < 2; ++m) add_entry(row, sup[i], sup[m], -dm(m, l));
          }
        }
      }
      for (int l = 0; l < 2; ++l) {
        for (int a = 0; a < d; ++a, ++row) {
          if (a == sup[0] || a == sup[1]) continue;
          for (int m = 0; m < 2; ++m) add_entry(row, a, sup[m], -dm(m, l));
        }
      }
    }
    const Matrix kern = linalg::kernel_basis(dense_from_triplets(triplets, row, unknowns));
    if (kern.cols() == 0) continue;

    auto to_u = [&](const Matrix& x) {
      Vector u(unknowns);
      for (int s = 0; s < v; ++s) {
        for (int t2 = 0; t2 < v; ++t2) {
          const Matrix blk = x.block(s * c, t2 * c, c, c);
          for (int j = 0; j < k; ++j) u[idx(s, t2, j)] = linalg::hs_inner(blk, blocks[j]);
        }
      }
      return u;
    };
    auto from_u = [&](const Vector& u) {
      Matrix x = Matrix::Zero(d, d);
      for (int s = 0; s < v; ++s) {
        for (int t2 = 0; t2 < v; ++t2) {
          for (int j = 0; j < k; ++j) x.block(s * c, t2 * c, c, c) += u[idx(s, t2, j)] * blocks[j];
        }
      }
      return x;
    };

    std::vector<Attractor> group;
    std::vector<Vector> p_vecs;
    for (const Attractor& p : pure) {
      if (std::abs(p.lambda - lambda) >= linalg::kClusterTol) continue;
      group.push_back({lambda, p.matrix, AttractorKind::PAttractor, 0.0});
      p_vecs.push_back(to_u(p.matrix));
    }
    // General attractors: the part of the kernel orthogonal to the p-span.
    Matrix residual = kern;
    if (!p_vecs.empty()) {
      const Matrix pm = linalg::range_basis(columns_of(p_vecs));
      residual -= pm * (pm.adjoint() * kern);
    }
    const Eigen::Index expected = kern.cols() - static_cast<Eigen::Index>(p_vecs.size());
    if (expected > 0) {
      const Matrix general = linalg::range_basis(residual, 1e-9);
      for (Eigen::Index j = 0; j < std::min(expected, general.cols()); ++j) {
        Matrix x = from_u(general.col(j));
        x /= linalg::hs_norm(x);
        fix_matrix_phase(x);
        group.push_back({lambda, std::move(x), AttractorKind::General, 0.0});
      }
    }
    for (auto& a : group) a.residual = verify_attractor(walk, a, configs);
    for (auto& a : group) out.push_back(std::move(a));
  }
  return out;
}

std::vector<std::pair<Complex, int>> dimension_summary(const std::vector<Attractor>& attractors) {
  std::vector<std::pair<Complex, int>> out;
  for (const auto& a : attractors) {
    if (!out.empty() && std::abs(out.back().first - a.lambda) < linalg::kClusterTol) {
      ++out.back().second;
    } else {
      out.emplace_back(a.lambda, 1);
    }
  }
  return out;
}

namespace {

Complex unit_power(Complex lambda, long long n) {
  if (std::abs(lambda - Complex(1.0, 0.0)) < 1e-14) return 1.0;
  return std::polar(1.0, static_cast<double>(n) * std::arg(lambda));
}

}  // namespace

AsymptoticDecomposition::AsymptoticDecomposition(std::vector<Attractor> attractors, const Matrix& rho0)
    : attractors_(std::move(attractors)) {
  for (std::size_t i = 0; i < attractors_.size(); ++i) {
    const Attractor& x = attractors_[i];
    if (x.matrix.rows() != rho0.rows() || x.matrix.cols() != rho0.cols()) {
      throw DimensionError("attractor and initial state differ in dimension");
    }
    terms_.push_back({x.lambda, static_cast<int>(i), linalg::hs_inner(rho0, x.matrix)});
  }
}

Matrix AsymptoticDecomposition::evaluate(long long n) const {
  if (attractors_.empty()) return Matrix();
  Matrix out = Matrix::Zero(attractors_.front().matrix.rows(), attractors_.front().matrix.cols());
  for (const Term& t : terms_) out += unit_power(t.lambda, n) * t.overlap * attractors_[t.index].matrix;
  return out;
}

Matrix AsymptoticDecomposition::stationary_part() const {
  if (attractors_.empty()) return Matrix();
  Matrix out = Matrix::Zero(attractors_.front().matrix.rows(), attractors_.front().matrix.cols());
  for (const Term& t : terms_) {
    if (std::abs(t.lambda - Complex(1.0, 0.0)) < linalg::kClusterTol) {
      out += t.overlap * attractors_[t.index].matrix;
    }
  }
  return out;
}

AsymptoticDecomposition asymptotic_decomposition(std::vector<Attractor> attractors,
                                                 const Matrix& rho0) {
  return AsymptoticDecomposition(std::move(attractors), rho0);
}

namespace {

Matrix projector(const std::vector<CommonEigenstate>& eigenstates, Eigen::Index d) {
  Matrix p = Matrix::Zero(d, d);
  for (const auto& e : eigenstates) p += e.state * e.state.adjoint();
  return p;
}

Matrix complement_term(const Matrix& p, const Matrix& rho0) {
  const Eigen::Index d = p.rows();
  const Matrix q = Matrix::Identity(d, d) - p;
  const double tr_q = q.trace().real();
  if (tr_q < 0.5) return Matrix::Zero(d, d);
  return q * ((rho0 * q).trace() / tr_q);
}

Matrix power(const Matrix& m, long long n) {
  Matrix result = Matrix::Identity(m.rows(), m.cols());
  Matrix base = m;
  while (n > 0) {
    if (n & 1) result = result * base;
    n >>= 1;
    if (n > 0) base = base * base;
  }
  return result;
}

}  // namespace

Matrix asymptotic_via_projectors(const QuantumWalk& walk,
                                 const std::vector<CommonEigenstate>& eigenstates,
                                 const Matrix& rho0, long long n,
                                 const std::pair<EdgeConfig, EdgeConfig>& kappa_pair,
                                 const std::vector<Attractor>* attractor_space) {
  const Eigen::Index d = walk.dimension();
  if (rho0.rows() != d || rho0.cols() != d) throw DimensionError("initial state dimension mismatch");
  if (n < 0) throw DomainError("n must be non-negative");
  if (attractor_space) {
    const long long r = static_cast<long long>(eigenstates.size());
    long long general = 0;
    for (const auto& a : *attractor_space) general += a.kind == AttractorKind::General ? 1 : 0;
    const long long expected_general = r < d ? 1 : 0;
    if (general != expected_general ||
        static_cast<long long>(attractor_space->size()) != r * r + expected_general) {
      throw DomainError(
          "attractor space is not spanned by p-attractors and the identity; "
          "use asymptotic_decomposition");
    }
  }
  const Matrix p = projector(eigenstates, d);
  const Matrix left = power(build_unitary(walk, kappa_pair.first), n);
  const Matrix right = power(build_unitary(walk, kappa_pair.second), n);
  return left * p * rho0 * p * right.adjoint() + complement_term(p, rho0);
}

Matrix asymptotic_from_eigenstates(const std::vector<CommonEigenstate>& eigenstates,
                                   const Matrix& rho0, long long n) {
  const Eigen::Index d = rho0.rows();
  Matrix out = complement_term(projector(eigenstates, d), rho0);
  for (const auto& a : eigenstates) {
    for (const auto& b : eigenstates) {
      const Complex coef = a.state.dot(rho0 * b.state);  // <a|rho0|b>
      out += coef * unit_power(a.alpha * std::conj(b.alpha), n) * (a.state * b.state.adjoint());
    }
  }
  return out;
}

Matrix stationary_from_eigenstates(const std::vector<CommonEigenstate>& eigenstates,
                                   const Matrix& rho0) {
  const Eigen::Index d = rho0.rows();
  Matrix out = complement_term(projector(eigenstates, d), rho0);
  for (const auto& a : eigenstates) {
    for (const auto& b : eigenstates) {
      if (std::abs(a.alpha - b.alpha) >= linalg::kClusterTol) continue;
      const Complex coef = a.state.dot(rho0 * b.state);
      out += coef * (a.state * b.state.adjoint());
    }
  }
  return out;
}

}  // namespace qwalk
