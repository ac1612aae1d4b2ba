#pragma once

#include <optional>
#include <vector>

#include "diraclab/grid.hpp"
#include "diraclab/symbols.hpp"

namespace diraclab {

/// Dense operator on the 4 N^3 dimensional spinor space. Row/column index is
/// 4*site + spin with site = j1 + N j2 + N^2 j3. The matrix acts on raw site
/// vectors; physical inner products carry the (L/N)^3 cell weight.
struct GridOperator {
  MatX M;
  GridSpec g;
};

/// Symbol samples on the (p-lattice) x (x-lattice) nodes, stored in the same
/// dense layout: entry (4*klin + r, 4*jlin + c) = B(p_k, x_j)(r, c).
struct GridSymbol {
  MatX vals;
  GridSpec g;

  Mat4 at(int klin, int jlin) const { return vals.block<4, 4>(4 * klin, 4 * jlin); }
};

struct QuantizeOptions {
  /// GridTooCoarse fires when this fraction of the symbol's displacement
  /// (p-Fourier) energy sits on the outermost lattice shell.
  double tail_threshold = 0.25;
  bool check_tail = true;
};

struct QuantizeStats {
  double tail_fraction = 0.0;
};

/// Discrete Weyl quantization with the midpoint kernel
///   K(x,y) = (1/L^3) sum_p e^{i p.(x-y)/hbar} B(p, (x+y)/2),
/// displacement wrapped to [-L/2, L/2) per axis and midpoints evaluated
/// analytically on the half-lattice. Chords at the Nyquist displacement
/// average their two antipodal midpoints, which keeps adjoint covariance
/// exact: quantize(B)* = quantize(B*) at the kernel level.
GridOperator weyl_quantize(const PhaseSpaceSymbol& sym, const GridSpec& g,
                           const QuantizeOptions& opts = {}, QuantizeStats* stats = nullptr);

/// Inverse map (discrete Wigner symbol of an operator):
///   B(p, x) = sum_y e^{-i p.y/hbar} K(x + y/2, x - y/2),
/// with half-lattice midpoints resolved by exact trigonometric interpolation
/// on the doubled grid. Round-trips weyl_quantize to machine precision for
/// symbols band-limited below Nyquist in both variables.
GridSymbol weyl_symbol_of(const GridOperator& op);

/// Quantization from node samples (band-limited extension of the samples).
GridOperator quantize_grid_symbol(const GridSymbol& sym);

/// Matrix-valued Wigner transform of a state, W[psi] = symbol of the rank-one
/// density a^3 psi psi*; normalized so the phase-space pairing below returns
/// expectation values exactly.
GridSymbol wigner_transform(const VecX& psi, const GridSpec& g);

/// (2 pi hbar)^-3 * sum over nodes of tr(A B) * (cell volumes) = N^-3 sum tr(A B).
cplx phase_space_pair(const GridSymbol& A, const GridSymbol& B);
cplx phase_space_pair(const GridSymbol& A, const PhaseSpaceSymbol& B);

/// <psi, Op psi> with the physical cell weight.
cplx expectation(const VecX& psi, const GridOperator& op);

/// Hilbert-Schmidt norm of the operator; equals N^{-3/2} times the l2 norm of
/// its symbol (discrete Plancherel).
double hs_norm(const GridOperator& op);

/// Evaluate a symbol on all grid nodes (no quantization).
GridSymbol sample_symbol(const PhaseSpaceSymbol& sym, const GridSpec& g);

}  // namespace diraclab
