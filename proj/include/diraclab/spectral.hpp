#pragma once

#include <string>
#include <vector>

#include "diraclab/weyl.hpp"

namespace diraclab {

/// Full dense Hermitian eigendecomposition. Eigenvalues ascending;
/// eigenvector columns are l2-unit with the phase fixed so the component of
/// largest modulus (lowest index on ties) is real positive, which makes
/// caches and tests reproducible.
struct EigenDecomp {
  VecXd evals;
  MatX evecs;
  GridSpec g;

  int dim() const { return static_cast<int>(evals.size()); }
};

struct BuildInfo {
  double herm_correction = 0.0;  // Frobenius norm of the skew part removed
  double tail_fraction = 0.0;
};

/// op^W[H_D], re-Hermitized (M <- (M + M*)/2) with the correction logged.
GridOperator build_hamiltonian(const FieldConfig& f, const DiracParams& prm, const GridSpec& g,
                               const QuantizeOptions& qopts = {}, BuildInfo* info = nullptr);

EigenDecomp eigensolve(const GridOperator& op);
/// In-place variant: steals the matrix storage (it becomes the eigenvector
/// array), halving peak memory at the finest grids.
EigenDecomp eigensolve(GridOperator&& op);

/// Rayleigh quotient v* M v for an l2-unit vector (cell weights cancel).
cplx rayleigh(const VecX& v, const GridOperator& op);

/// Spectral norm of a Hermitian (or anti-Hermitian) matrix by power iteration
/// on M^2 with a deterministic start vector.
double spectral_norm_herm(const MatX& M, int iters = 160);

/// Eigenpairs inside I(E, hbar) = [E - hbar*omega, E + hbar*omega].
struct EigenWindow {
  double E = 0.0, omega = 0.0, hbar = 0.0;
  std::vector<int> indices;  // columns of the decomposition
  VecXd evals;
};
EigenWindow eig_window(const EigenDecomp& d, double E, double omega);

/// Almost projector op^W[pi0^nu] (leading symbol only; the Riesz step below
/// restores exact idempotency).
GridOperator almost_projector(Branch nu, const FieldConfig& f, const DiracParams& prm,
                              const GridSpec& g, const QuantizeOptions& qopts = {});

struct RieszInfo {
  double gap_below = 0.0;       // largest eigenvalue of Pi below 1/2
  double gap_above = 1.0;       // smallest eigenvalue above 1/2
  double dist_to_almost = 0.0;  // ||P - Pi||_2
  bool exact_input = false;     // input was already a projector
};

/// Spectral projector of the almost projector onto eigenvalues > 1/2;
/// identical to the Riesz contour integral over |z - 1| = 1/2 whenever the
/// spectrum avoids [0.4, 0.6] (enforced, SpectralGapViolation otherwise).
/// An input that is already a projector to 1e-12 is returned unchanged.
GridOperator riesz_projector(const GridOperator& almost, RieszInfo* info = nullptr);

struct ProjectorPair {
  GridOperator plus, minus;
  std::string provenance;    // "almost" | "riesz" | "spectral"
  double completeness = 0.0; // ||P+ + P- - I||
};

/// Exact spectral projectors of H at threshold E (below -> minus branch).
ProjectorPair spectral_projector(const EigenDecomp& d, double E);

/// B_d = P+ B P+ + P- B P-,  B_od = P+ B P- + P- B P+.
std::pair<GridOperator, GridOperator> split_blocks(const GridOperator& B,
                                                   const GridOperator& Pplus,
                                                   const GridOperator& Pminus);

struct QuasimodeSet {
  std::vector<int> window_pos;  // positions within the window that survived
  std::vector<int> indices;     // eigenvector columns
  MatX phi;                     // normalized projected eigenspinors (l2-unit columns)
  VecXd norms;                  // ||P psi_n||
  VecXd evals;
  VecXd discrepancies;          // ||(H - E_n) phi_n||
  Branch nu = Branch::plus;
  double delta = 0.0;
};

/// Discrepancies ||(H - E_n) phi|| are evaluated through the decomposition
/// (V (Lambda - E) V* phi), so the dense Hamiltonian is not needed here.
QuasimodeSet quasimodes(const EigenDecomp& d, const EigenWindow& win, const GridOperator& P,
                        Branch nu, double delta);

/// ||[H, A]||_2 evaluated in the eigenbasis of H.
double commutator_norm(const EigenDecomp& d, const GridOperator& A);

/// Heisenberg evolution B(t) = U* B U with U = exp(-i t H / hbar) assembled
/// from the eigendecomposition; orthonormality of the eigenbasis is spot
/// checked to 1e-9.
GridOperator heisenberg_evolve(const GridOperator& B, const EigenDecomp& H, double t,
                               double hbar);

}  // namespace diraclab
