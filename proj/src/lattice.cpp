#include "qwalk/lattice.hpp"

#include <sstream>

#include "qwalk/errors.hpp"

namespace qwalk {

Lattice::Lattice(LatticeKind kind, int m, int n, Boundary boundary)
    : kind_(kind), m_(m), n_(n), boundary_(boundary), vertex_count_(m * n) {
  half_edges_.assign(static_cast<std::size_t>(vertex_count_ * coin_dim()), -1);
}

void Lattice::add_edge(int a, int dir_a, int b, int dir_b) {
  const int index = static_cast<int>(edges_.size());
  edges_.push_back({a, dir_a, b, dir_b});
  half_edges_[static_cast<std::size_t>(basis_index(a, dir_a))] = index;
  half_edges_[static_cast<std::size_t>(basis_index(b, dir_b))] = index;
}

Lattice Lattice::line(int n) {
  if (n < 2) throw ValidationError("line lattice requires n >= 2");
  Lattice lat(LatticeKind::Line, n, 1, Boundary::Carpet);
  for (int s = 0; s + 1 < n; ++s) lat.add_edge(s, dir1d::R, s + 1, dir1d::L);
  return lat;
}

Lattice Lattice::cycle(int n) {
  if (n < 3) throw ValidationError("cycle lattice requires n >= 3");
  Lattice lat(LatticeKind::Cycle, n, 1, Boundary::Torus);
  for (int s = 0; s < n; ++s) lat.add_edge(s, dir1d::R, (s + 1) % n, dir1d::L);
  return lat;
}

Lattice Lattice::grid(int m, int n, Boundary boundary) {
  if (boundary == Boundary::Torus && (m < 3 || n < 3)) {
    throw ValidationError("torus lattice requires m, n >= 3");
  }
  if (m < 2 || n < 2) throw ValidationError("grid lattice requires m, n >= 2");
  Lattice lat(LatticeKind::Grid, m, n, boundary);
  const bool wrap = boundary == Boundary::Torus;
  for (int t = 0; t < n; ++t) {
    for (int s = 0; s < m; ++s) {
      if (s + 1 < m || wrap) {
        lat.add_edge(lat.vertex_index(s, t), dir2d::R, lat.vertex_index((s + 1) % m, t), dir2d::L);
      }
    }
  }
  for (int t = 0; t < n; ++t) {
    for (int s = 0; s < m; ++s) {
      if (t + 1 < n || wrap) {
        lat.add_edge(lat.vertex_index(s, t), dir2d::U, lat.vertex_index(s, (t + 1) % n), dir2d::D);
      }
    }
  }
  return lat;
}

std::optional<int> Lattice::half_edge(int vertex, int direction) const {
  if (direction < 0 || direction >= coin_dim()) {
    throw DomainError("invalid coin direction " + std::to_string(direction));
  }
  if (vertex < 0 || vertex >= vertex_count_) {
    throw DomainError("vertex out of range " + std::to_string(vertex));
  }
  const int e = half_edges_[static_cast<std::size_t>(basis_index(vertex, direction))];
  if (e < 0) return std::nullopt;
  return e;
}

std::optional<Hop> Lattice::neighbor(int vertex, int direction) const {
  const auto e = half_edge(vertex, direction);
  if (!e) return std::nullopt;
  const Edge& edge = edges_[static_cast<std::size_t>(*e)];
  const int target = (edge.a == vertex && edge.dir_a == direction) ? edge.b : edge.a;
  return Hop{target, *e};
}

int Lattice::opposite(int direction) const {
  if (direction < 0 || direction >= coin_dim()) {
    throw DomainError("invalid coin direction " + std::to_string(direction));
  }
  // (L, R) and (L, D, U, R) are both palindromic in their opposite pairs.
  return coin_dim() - 1 - direction;
}

int Lattice::vertex_index(int s, int t) const {
  if (s < 0 || s >= m_ || t < 0 || t >= n_) throw DomainError("coordinates out of range");
  return s + m_ * t;
}

std::pair<int, int> Lattice::coords(int vertex) const { return {vertex % m_, vertex / m_}; }

std::string Lattice::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case LatticeKind::Line: os << "Line(" << m_ << ")"; break;
    case LatticeKind::Cycle: os << "Cycle(" << m_ << ")"; break;
    case LatticeKind::Grid:
      os << "Grid(" << m_ << "," << n_ << "," << (boundary_ == Boundary::Torus ? "Torus" : "Carpet")
         << ")";
      break;
  }
  return os.str();
}

EdgeConfig EdgeConfig::from_mask(std::uint64_t mask, int edge_count) {
  EdgeConfig k(edge_count);
  for (int e = 0; e < edge_count && e < 64; ++e) k.set(e, (mask >> e) & 1U);
  return k;
}

int EdgeConfig::count() const {
  int c = 0;
  for (bool b : bits_) c += b ? 1 : 0;
  return c;
}

std::uint64_t EdgeConfig::mask() const {
  if (bits_.size() > 64) throw CapacityError("edge config larger than 64 bits has no mask");
  std::uint64_t m = 0;
  for (std::size_t e = 0; e < bits_.size(); ++e) {
    if (bits_[e]) m |= std::uint64_t{1} << e;
  }
  return m;
}

EdgeProbabilities::EdgeProbabilities(std::vector<double> p) : p_(std::move(p)) {
  for (double x : p_) {
    if (!(x >= 0.0 && x <= 1.0)) throw ValidationError("edge probability outside [0, 1]");
  }
}

EdgeProbabilities EdgeProbabilities::uniform(int edge_count, double p) {
  return EdgeProbabilities(std::vector<double>(static_cast<std::size_t>(edge_count), p));
}

bool EdgeProbabilities::strictly_interior() const {
  for (double x : p_) {
    if (x <= 0.0 || x >= 1.0) return false;
  }
  return true;
}

double config_probability(const EdgeProbabilities& probs, const EdgeConfig& k) {
  if (probs.size() != k.size()) throw DimensionError("config_probability: length mismatch");
  double pi = 1.0;
  for (int e = 0; e < k.size(); ++e) pi *= k.contains(e) ? probs[e] : 1.0 - probs[e];
  return pi;
}

void check_enumerable(int edge_count) {
  if (edge_count > kMaxEnumerableEdges) {
    throw CapacityError("cannot enumerate 2^" + std::to_string(edge_count) +
                        " edge configurations; use the factorized engine");
  }
}

EdgeConfig sample_config(const EdgeProbabilities& probs, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  EdgeConfig k(probs.size());
  for (int e = 0; e < probs.size(); ++e) k.set(e, uniform(rng) < probs[e]);
  return k;
}

}  // namespace qwalk
