#pragma once

#include <vector>

#include "diraclab/common.hpp"
#include "diraclab/errors.hpp"

namespace diraclab {

/// Discretization of the phase space: N^3 position sites x_j = j L/N and the
/// momentum lattice p_k = (2 pi hbar / L) k, k in [-N/2, N/2)^3. The effective
/// Planck constant hbar = P L / (pi N) is the single knob of the semiclassical
/// sweep: refining N with (L, P) fixed drives hbar -> 0 while the classical
/// box [-P,P)^3 x [0,L)^3 stays put.
struct GridSpec {
  int N = 8;
  double L = 2.0 * pi;
  double P = pi;

  double hbar() const { return P * L / (pi * N); }
  double a() const { return L / N; }                 // lattice spacing
  double dp() const { return 2.0 * P / N; }          // momentum spacing
  int sites() const { return N * N * N; }
  int dim() const { return 4 * sites(); }
  double cell_volume() const { return a() * a() * a(); }

  /// Axis index <-> integer momentum label: idx in [0,N) maps to k = idx - N/2.
  int k_of_idx(int idx) const { return idx - N / 2; }
  int idx_of_k(int k) const { return k + N / 2; }

  int site_index(const Vec3i& j) const { return j[0] + N * (j[1] + N * j[2]); }
  Vec3i site_coords(int lin) const { return {lin % N, (lin / N) % N, lin / (N * N)}; }

  Vec3 x_of(const Vec3i& j) const { return a() * j.cast<double>(); }
  Vec3 p_of_idx(const Vec3i& kidx) const {
    return dp() * Vec3(k_of_idx(kidx[0]), k_of_idx(kidx[1]), k_of_idx(kidx[2]));
  }

  bool operator==(const GridSpec& o) const { return N == o.N && L == o.L && P == o.P; }
  bool operator!=(const GridSpec& o) const { return !(*this == o); }
};

inline double effective_hbar(const GridSpec& g) { return g.hbar(); }

/// Inner product and norm with the physical cell weight (L/N)^3.
inline cplx grid_inner(const GridSpec& g, const VecX& a, const VecX& b) {
  return g.cell_volume() * a.dot(b);
}
inline double grid_norm(const GridSpec& g, const VecX& v) {
  return std::sqrt(g.cell_volume()) * v.norm();
}
/// Scale an l2-unit vector (as returned by eigensolvers) to physical norm 1.
inline void physical_normalize(const GridSpec& g, VecX& v) {
  const double n = grid_norm(g, v);
  if (n > 0) v /= n;
}

}  // namespace diraclab
