#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <ranges>
#include <string>
#include <vector>

namespace qwalk {

enum class LatticeKind { Line, Cycle, Grid };
enum class Boundary { Carpet, Torus };

// Coin directions. 1D walks use {L, R}; 2D walks use {L, D, U, R}.
namespace dir1d {
inline constexpr int L = 0;
inline constexpr int R = 1;
}  // namespace dir1d
namespace dir2d {
inline constexpr int L = 0;
inline constexpr int D = 1;
inline constexpr int U = 2;
inline constexpr int R = 3;
}  // namespace dir2d

struct Hop {
  int vertex;
  int edge;
  bool operator==(const Hop&) const = default;
};

// Undirected edge between `a` and `b`. Leaving `a` in direction `dir_a`
// arrives at `b`; leaving `b` in direction `dir_b` arrives at `a`.
struct Edge {
  int a;
  int dir_a;
  int b;
  int dir_b;
};

/// Finite graph with a coin space: Line(N), Cycle(N) or an M x N grid.
///
/// Vertices of a grid are linearised as s + M*t with s in [0, M) and t in
/// [0, N). Edge indices are stable: for 1D, edge s joins s and s+1 (the
/// closing edge of a cycle is N-1); for grids, all horizontal edges come
/// first (row by row), then all vertical edges.
class Lattice {
 public:
  static Lattice line(int n);
  static Lattice cycle(int n);
  static Lattice grid(int m, int n, Boundary boundary);

  LatticeKind kind() const { return kind_; }
  Boundary boundary() const { return boundary_; }
  int extent_m() const { return m_; }
  int extent_n() const { return n_; }

  int vertex_count() const { return vertex_count_; }
  int coin_dim() const { return kind_ == LatticeKind::Grid ? 4 : 2; }
  int dimension() const { return vertex_count_ * coin_dim(); }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  const std::vector<Edge>& edges() const { return edges_; }

  bool is_2d() const { return kind_ == LatticeKind::Grid; }

  /// Adjacent vertex and connecting edge, or nullopt at a reflecting boundary.
  /// Throws DomainError for a direction outside the coin basis.
  std::optional<Hop> neighbor(int vertex, int direction) const;

  /// Edge attached to the half-edge (vertex, direction), if any.
  std::optional<int> half_edge(int vertex, int direction) const;

  int opposite(int direction) const;

  int vertex_index(int s, int t = 0) const;
  std::pair<int, int> coords(int vertex) const;

  /// Index of basis state |vertex, coin> in the composite space.
  int basis_index(int vertex, int coin) const { return vertex * coin_dim() + coin; }

  std::string describe() const;

 private:
  Lattice(LatticeKind kind, int m, int n, Boundary boundary);

  void add_edge(int a, int dir_a, int b, int dir_b);

  LatticeKind kind_;
  int m_;
  int n_;
  Boundary boundary_;
  int vertex_count_;
  std::vector<Edge> edges_;
  // half_edges_[vertex * coin_dim + direction] = edge index or -1
  std::vector<int> half_edges_;
};

/// Subset K of intact edges; bit e set means edge e is intact.
class EdgeConfig {
 public:
  EdgeConfig() = default;
  explicit EdgeConfig(int edge_count, bool intact = false)
      : bits_(static_cast<std::size_t>(edge_count), intact) {}

  static EdgeConfig full(int edge_count) { return EdgeConfig(edge_count, true); }
  static EdgeConfig none(int edge_count) { return EdgeConfig(edge_count, false); }
  static EdgeConfig from_mask(std::uint64_t mask, int edge_count);

  int size() const { return static_cast<int>(bits_.size()); }
  bool contains(int edge) const { return bits_[static_cast<std::size_t>(edge)]; }
  void set(int edge, bool intact) { bits_[static_cast<std::size_t>(edge)] = intact; }
  int count() const;
  /// Bitmask representation; requires size() <= 64.
  std::uint64_t mask() const;

  bool operator==(const EdgeConfig&) const = default;

 private:
  std::vector<bool> bits_;
};

/// Per-edge probability that the edge is intact during one step.
class EdgeProbabilities {
 public:
  EdgeProbabilities() = default;
  explicit EdgeProbabilities(std::vector<double> p);
  static EdgeProbabilities uniform(int edge_count, double p);

  int size() const { return static_cast<int>(p_.size()); }
  double operator[](int edge) const { return p_[static_cast<std::size_t>(edge)]; }
  const std::vector<double>& values() const { return p_; }
  /// True when every probability lies strictly inside (0, 1).
  bool strictly_interior() const;

 private:
  std::vector<double> p_;
};

inline constexpr int kMaxEnumerableEdges = 20;

/// Probability of configuration k: prod_{l in K} p_l prod_{l not in K} (1 - p_l).
double config_probability(const EdgeProbabilities& probs, const EdgeConfig& k);

/// Each edge intact independently with probability p_l.
EdgeConfig sample_config(const EdgeProbabilities& probs, std::mt19937_64& rng);

void check_enumerable(int edge_count);

/// All 2^|E| configurations in ascending bitmask order. Throws CapacityError
/// for more than kMaxEnumerableEdges edges.
inline auto enumerate_configs(int edge_count) {
  check_enumerable(edge_count);
  const std::uint64_t total = std::uint64_t{1} << edge_count;
  return std::views::iota(std::uint64_t{0}, total) |
         std::views::transform(
             [edge_count](std::uint64_t m) { return EdgeConfig::from_mask(m, edge_count); });
}

inline auto enumerate_configs(const Lattice& lattice) {
  return enumerate_configs(lattice.edge_count());
}

}  // namespace qwalk
