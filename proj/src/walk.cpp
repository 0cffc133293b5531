#include "qwalk/walk.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "qwalk/errors.hpp"

namespace qwalk {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

bool near_multiple(double x, double period, double tol = 1e-12) {
  const double r = std::remainder(x, period);
  return std::abs(r) < tol;
}

Matrix su2_matrix(const SU2Coin& c) {
  const Complex i(0.0, 1.0);
  const double cb = std::cos(c.beta);
  const double sb = std::sin(c.beta);
  Matrix m(2, 2);
  m(0, 0) = (std::exp(i * (c.alpha + c.gamma)) - std::exp(i * (c.gamma - c.alpha))) * cb * sb;
  m(0, 1) = std::exp(-i * c.alpha) * cb * cb + std::exp(i * c.alpha) * sb * sb;
  m(1, 0) = std::exp(i * c.alpha) * cb * cb + std::exp(-i * c.alpha) * sb * sb;
  m(1, 1) = (std::exp(i * (c.alpha - c.gamma)) - std::exp(-i * (c.alpha + c.gamma))) * cb * sb;
  return m;
}

Matrix grover_matrix() {
  Matrix g = Matrix::Constant(4, 4, Complex(0.5, 0.0));
  for (int j = 0; j < 4; ++j) g(j, j) = Complex(-0.5, 0.0);
  return g;
}

int spec_coin_dim(const CoinSpec& spec) {
  return std::visit(overloaded{[](const SU2Coin&) { return 2; },
                               [](const GroverCoin&) { return 4; },
                               [](const CustomCoin& c) { return static_cast<int>(c.matrix.rows()); }},
                    spec);
}

}  // namespace

Matrix build_coin(const CoinSpec& spec) {
  return std::visit(overloaded{[](const SU2Coin& c) { return su2_matrix(c); },
                               [](const GroverCoin&) { return grover_matrix(); },
                               [](const CustomCoin& c) {
                                 if (!linalg::is_unitary(c.matrix)) {
                                   throw ValidationError("custom coin is not unitary");
                                 }
                                 return c.matrix;
                               }},
                    spec);
}

std::vector<std::string> coin_warnings(const CoinSpec& spec) {
  std::vector<std::string> out;
  if (const auto* c = std::get_if<SU2Coin>(&spec)) {
    if (near_multiple(c->beta, std::numbers::pi / 2)) {
      out.push_back("beta is a multiple of pi/2: the coin is a permutation, dynamics is classical");
    }
    if (near_multiple(c->alpha, std::numbers::pi)) {
      out.push_back("alpha is a multiple of pi: the coin is trivial, dynamics is classical");
    }
  }
  return out;
}

Matrix build_reflection(const ReflectionSpec& spec, int coin_dim) {
  if (coin_dim != 2 && coin_dim != 4) throw ValidationError("coin dimension must be 2 or 4");
  if (std::holds_alternative<DefaultReflection>(spec)) {
    Matrix r = Matrix::Zero(coin_dim, coin_dim);
    for (int c = 0; c < coin_dim; ++c) r(coin_dim - 1 - c, c) = 1.0;
    return r;
  }
  const Matrix& r = std::get<CustomReflection>(spec).matrix;
  if (r.rows() != coin_dim || r.cols() != coin_dim) {
    throw ValidationError("reflection dimension does not match the coin dimension");
  }
  if (!linalg::is_unitary(r)) throw ValidationError("custom reflection is not unitary");
  for (int c = 0; c < coin_dim; ++c) {
    if (std::abs(std::abs(r(coin_dim - 1 - c, c)) - 1.0) > 1e-12) {
      throw ValidationError(
          "custom reflection must map each direction to its opposite up to a phase");
    }
  }
  return r;
}

Matrix to_dense(const SparseTerm& term, int dim) {
  Matrix m = Matrix::Zero(dim, dim);
  for (const auto& e : term) m(e.row, e.col) += e.value;
  return m;
}

Matrix EdgeTermDecomposition::assemble(const EdgeConfig& k) const {
  if (k.size() != static_cast<int>(hop.size())) throw DimensionError("edge config length mismatch");
  Matrix s = to_dense(boundary, dim);
  for (int e = 0; e < k.size(); ++e) {
    for (const auto& x : k.contains(e) ? hop[e] : reflect[e]) s(x.row, x.col) += x.value;
  }
  return s;
}

namespace {

EdgeTermDecomposition decompose(const Lattice& lat, const Matrix& r) {
  EdgeTermDecomposition t;
  t.dim = lat.dimension();
  const int c = lat.coin_dim();
  for (int x = 0; x < lat.vertex_count(); ++x) {
    for (int dir = 0; dir < c; ++dir) {
      if (lat.half_edge(x, dir)) continue;
      const int o = lat.opposite(dir);
      t.boundary.push_back({lat.basis_index(x, o), lat.basis_index(x, dir), r(o, dir)});
    }
  }
  for (const Edge& e : lat.edges()) {
    // Leaving a along dir_a arrives at b still pointing along dir_a.
    const int col_a = lat.basis_index(e.a, e.dir_a);
    const int col_b = lat.basis_index(e.b, e.dir_b);
    const int at_b = lat.basis_index(e.b, e.dir_a);
    const int at_a = lat.basis_index(e.a, e.dir_b);
    t.hop.push_back({{at_b, col_a, 1.0}, {at_a, col_b, 1.0}});
    t.reflect.push_back({{at_a, col_a, r(e.dir_b, e.dir_a)}, {at_b, col_b, r(e.dir_a, e.dir_b)}});
  }
  return t;
}

}  // namespace

QuantumWalk::QuantumWalk(Lattice lattice, CoinSpec coin, ReflectionSpec reflection)
    : lattice_(std::move(lattice)),
      coin_spec_(std::move(coin)),
      reflection_spec_(std::move(reflection)) {
  const int dim = spec_coin_dim(coin_spec_);
  if (dim != lattice_.coin_dim()) {
    std::ostringstream os;
    os << "coin dimension " << dim << " does not match lattice coin dimension "
       << lattice_.coin_dim() << " of " << lattice_.describe();
    throw ValidationError(os.str());
  }
  coin_ = build_coin(coin_spec_);
  reflection_ = build_reflection(reflection_spec_, lattice_.coin_dim());
  terms_ = decompose(lattice_, reflection_);
  warnings_ = coin_warnings(coin_spec_);
}

WalkModel::WalkModel(QuantumWalk walk, EdgeProbabilities probs)
    : QuantumWalk(std::move(walk)), probs_(std::move(probs)) {
  if (probs_.size() != edge_count()) {
    throw ValidationError("expected " + std::to_string(edge_count()) + " edge probabilities, got " +
                          std::to_string(probs_.size()));
  }
}

WalkModel::WalkModel(QuantumWalk walk, double p)
    : WalkModel(walk, EdgeProbabilities::uniform(walk.edge_count(), p)) {}

Matrix build_step_operator(const QuantumWalk& walk, const EdgeConfig& k) {
  const Lattice& lat = walk.lattice();
  if (k.size() != lat.edge_count()) throw DimensionError("edge config length mismatch");
  const int c = lat.coin_dim();
  const Matrix& r = walk.reflection();
  Matrix s = Matrix::Zero(lat.dimension(), lat.dimension());
  for (int x = 0; x < lat.vertex_count(); ++x) {
    for (int dir = 0; dir < c; ++dir) {
      const int col = lat.basis_index(x, dir);
      const auto hop = lat.neighbor(x, dir);
      if (hop && k.contains(hop->edge)) {
        s(lat.basis_index(hop->vertex, dir), col) = 1.0;
      } else {
        for (int out = 0; out < c; ++out) s(lat.basis_index(x, out), col) = r(out, dir);
      }
    }
  }
  return s;
}

Matrix apply_coin_right(const Matrix& m, const Matrix& coin) {
  const Eigen::Index c = coin.rows();
  Matrix out(m.rows(), m.cols());
  for (Eigen::Index x = 0; x < m.cols() / c; ++x) {
    out.middleCols(x * c, c).noalias() = m.middleCols(x * c, c) * coin;
  }
  return out;
}

Matrix conjugate_by_coin(const Matrix& rho, const Matrix& coin) {
  const Eigen::Index c = coin.rows();
  const Eigen::Index blocks = rho.rows() / c;
  Matrix tmp(rho.rows(), rho.cols());
  for (Eigen::Index x = 0; x < blocks; ++x) {
    tmp.middleRows(x * c, c).noalias() = coin * rho.middleRows(x * c, c);
  }
  const Matrix coin_dag = coin.adjoint();
  Matrix out(rho.rows(), rho.cols());
  for (Eigen::Index y = 0; y < blocks; ++y) {
    out.middleCols(y * c, c).noalias() = tmp.middleCols(y * c, c) * coin_dag;
  }
  return out;
}

Matrix build_unitary(const QuantumWalk& walk, const EdgeConfig& k) {
  return apply_coin_right(build_step_operator(walk, k), walk.coin());
}

std::vector<Toggle> toggle_blocks(const QuantumWalk& walk) {
  const Lattice& lat = walk.lattice();
  const Matrix& r = walk.reflection();
  std::vector<Toggle> out;
  out.reserve(static_cast<std::size_t>(lat.edge_count()));
  for (int idx = 0; idx < lat.edge_count(); ++idx) {
    const Edge& e = lat.edges()[static_cast<std::size_t>(idx)];
    const int at_a = lat.basis_index(e.a, e.dir_b);
    const int at_b = lat.basis_index(e.b, e.dir_a);
    // T_e swaps the two arrival states of the edge, undoing the reflection phases.
    Matrix block = Matrix::Zero(2, 2);
    block(1, 0) = std::conj(r(e.dir_b, e.dir_a));
    block(0, 1) = std::conj(r(e.dir_a, e.dir_b));
    out.push_back({idx, {at_a, at_b}, block});
  }
  return out;
}

std::vector<Matrix> toggle_operators(const QuantumWalk& walk) {
  const int d = walk.dimension();
  std::vector<Matrix> out;
  for (const Toggle& t : toggle_blocks(walk)) {
    Matrix m = Matrix::Identity(d, d);
    for (std::size_t i = 0; i < t.support.size(); ++i) {
      for (std::size_t j = 0; j < t.support.size(); ++j) {
        m(t.support[i], t.support[j]) = t.block(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      }
    }
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace qwalk
