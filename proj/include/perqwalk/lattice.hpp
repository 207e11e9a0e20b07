#pragma once

// Lattice geometry for M x N grids with per-axis boundary conditions,
// directed-basis indexing and undirected edge enumeration.

#include <optional>
#include <stdexcept>
#include <string>

namespace perqwalk {

enum class Boundary { periodic, open };

inline const char* to_string(Boundary b) {
  return b == Boundary::periodic ? "periodic" : "open";
}

inline Boundary boundary_from_string(const std::string& s) {
  if (s == "periodic") return Boundary::periodic;
  if (s == "open") return Boundary::open;
  throw std::invalid_argument("unknown boundary type: " + s);
}

// Coin directions in canonical order. The involution ~ swaps L<->R and D<->U.
enum class Direction : int { L = 0, D = 1, U = 2, R = 3 };

constexpr Direction kDirections[4] = {Direction::L, Direction::D, Direction::U,
                                      Direction::R};

constexpr Direction reflect_dir(Direction c) {
  return static_cast<Direction>(3 - static_cast<int>(c));
}

inline const char* to_string(Direction c) {
  static const char* names[4] = {"L", "D", "U", "R"};
  return names[static_cast<int>(c)];
}

struct Site {
  int s = 0;
  int t = 0;
  friend bool operator==(const Site& a, const Site& b) {
    return a.s == b.s && a.t == b.t;
  }
  friend bool operator!=(const Site& a, const Site& b) { return !(a == b); }
};

// Undirected lattice edge, canonicalized by its lower endpoint and axis.
// axis 0: connects (s,t)-(s+1,t); axis 1: connects (s,t)-(s,t+1).
struct Edge {
  int s = 0;
  int t = 0;
  int axis = 0;
  friend bool operator==(const Edge& a, const Edge& b) {
    return a.s == b.s && a.t == b.t && a.axis == b.axis;
  }
};

class LatticeSpec {
 public:
  LatticeSpec(int extent_s, int extent_t, Boundary bs, Boundary bt)
      : M_(extent_s), N_(extent_t), bs_(bs), bt_(bt) {
    if (M_ < 3 || N_ < 3)
      throw std::invalid_argument("lattice extents must be at least 3");
  }

  int extent_s() const { return M_; }
  int extent_t() const { return N_; }
  Boundary boundary_s() const { return bs_; }
  Boundary boundary_t() const { return bt_; }

  int num_sites() const { return M_ * N_; }
  int dim() const { return 4 * M_ * N_; }

  bool valid_site(Site m) const {
    return m.s >= 0 && m.s < M_ && m.t >= 0 && m.t < N_;
  }

  // Number of s-axis edge columns / t-axis edge rows.
  int s_edges_per_row() const { return bs_ == Boundary::periodic ? M_ : M_ - 1; }
  int t_edges_per_col() const { return bt_ == Boundary::periodic ? N_ : N_ - 1; }

  int num_edges() const {
    return s_edges_per_row() * N_ + M_ * t_edges_per_col();
  }

  // "MxN:<s-boundary>,<t-boundary>"
  std::string to_string() const {
    return std::to_string(M_) + "x" + std::to_string(N_) + ":" +
           perqwalk::to_string(bs_) + "," + perqwalk::to_string(bt_);
  }

  static LatticeSpec parse(const std::string& str) {
    auto xpos = str.find('x');
    auto cpos = str.find(':');
    auto mpos = str.find(',');
    if (xpos == std::string::npos || cpos == std::string::npos ||
        mpos == std::string::npos || !(xpos < cpos && cpos < mpos))
      throw std::invalid_argument("bad lattice spec: " + str);
    int M = std::stoi(str.substr(0, xpos));
    int N = std::stoi(str.substr(xpos + 1, cpos - xpos - 1));
    Boundary bs = boundary_from_string(str.substr(cpos + 1, mpos - cpos - 1));
    Boundary bt = boundary_from_string(str.substr(mpos + 1));
    return LatticeSpec(M, N, bs, bt);
  }

  friend bool operator==(const LatticeSpec& a, const LatticeSpec& b) {
    return a.M_ == b.M_ && a.N_ == b.N_ && a.bs_ == b.bs_ && a.bt_ == b.bt_;
  }

 private:
  int M_, N_;
  Boundary bs_, bt_;
};

// Nearest neighbour in direction c; nullopt when the hop exits an open
// boundary (a Wall).
inline std::optional<Site> neighbor(Site m, Direction c,
                                    const LatticeSpec& spec) {
  int M = spec.extent_s(), N = spec.extent_t();
  int s = m.s, t = m.t;
  switch (c) {
    case Direction::L: s -= 1; break;
    case Direction::R: s += 1; break;
    case Direction::D: t -= 1; break;
    case Direction::U: t += 1; break;
  }
  if (s < 0 || s >= M) {
    if (spec.boundary_s() == Boundary::open) return std::nullopt;
    s = (s + M) % M;
  }
  if (t < 0 || t >= N) {
    if (spec.boundary_t() == Boundary::open) return std::nullopt;
    t = (t + N) % N;
  }
  return Site{s, t};
}

// The unique undirected edge crossed by the directed hop (m, c), or nullopt
// at a Wall. edge_of(m, c) == edge_of(m+c, ~c) whenever both are defined.
inline std::optional<Edge> edge_of(Site m, Direction c,
                                   const LatticeSpec& spec) {
  auto nb = neighbor(m, c, spec);
  if (!nb) return std::nullopt;
  int M = spec.extent_s(), N = spec.extent_t();
  switch (c) {
    case Direction::R: return Edge{m.s, m.t, 0};
    case Direction::L: return Edge{(m.s - 1 + M) % M, m.t, 0};
    case Direction::U: return Edge{m.s, m.t, 1};
    case Direction::D: return Edge{m.s, (m.t - 1 + N) % N, 1};
  }
  return std::nullopt;  // unreachable
}

// Dense edge id in [0, num_edges): s-axis edges first, row-major.
inline int edge_index(const Edge& e, const LatticeSpec& spec) {
  if (e.axis == 0) return e.s * spec.extent_t() + e.t;
  return spec.s_edges_per_row() * spec.extent_t() +
         e.s * spec.t_edges_per_col() + e.t;
}

// Directed basis index: 4*(s*N + t) + c, bijective onto [0, 4MN).
inline int basis_index(Site m, Direction c, const LatticeSpec& spec) {
  if (!spec.valid_site(m))
    throw std::out_of_range("site outside lattice");
  return 4 * (m.s * spec.extent_t() + m.t) + static_cast<int>(c);
}

inline std::pair<Site, Direction> basis_state(int index,
                                              const LatticeSpec& spec) {
  if (index < 0 || index >= spec.dim())
    throw std::out_of_range("basis index outside Hilbert space");
  int c = index % 4;
  int site = index / 4;
  return {Site{site / spec.extent_t(), site % spec.extent_t()},
          static_cast<Direction>(c)};
}

}  // namespace perqwalk
