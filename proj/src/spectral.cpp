#include "diraclab/spectral.hpp"

#include <lapacke.h>

#include <cmath>

namespace diraclab {

GridOperator build_hamiltonian(const FieldConfig& f, const DiracParams& prm, const GridSpec& g,
                               const QuantizeOptions& qopts, BuildInfo* info) {
  QuantizeStats stats;
  DiracSymbol sym(f, prm);
  GridOperator H = weyl_quantize(sym, g, qopts, &stats);
  const MatX skew = 0.5 * (H.M - H.M.adjoint());
  const double corr = skew.norm();
  H.M = 0.5 * (H.M + H.M.adjoint()).eval();
  if (info) {
    info->herm_correction = corr;
    info->tail_fraction = stats.tail_fraction;
  }
  return H;
}

namespace {

EigenDecomp eigensolve_impl(MatX&& mat, const GridSpec& g) {
  EigenDecomp d;
  d.g = g;
  d.evecs = std::move(mat);
  const int n = static_cast<int>(d.evecs.rows());
  d.evals.resize(n);
  const int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'L', n,
                                  reinterpret_cast<lapack_complex_double*>(d.evecs.data()), n,
                                  d.evals.data());
  if (info != 0) throw Error("zheevd failed with info " + std::to_string(info));

  // Deterministic gauge: largest-modulus component (lowest index on ties)
  // made real positive.
  for (int c = 0; c < n; ++c) {
    auto col = d.evecs.col(c);
    int best = 0;
    double bestmag = std::norm(col[0]);
    for (int r = 1; r < n; ++r) {
      const double m = std::norm(col[r]);
      if (m > bestmag * (1.0 + 1e-12)) {
        bestmag = m;
        best = r;
      }
    }
    const double mag = std::abs(col[best]);
    if (mag > 0) col *= std::conj(col[best]) / mag;
  }
  return d;
}

}  // namespace

EigenDecomp eigensolve(const GridOperator& op) {
  MatX copy = op.M;
  return eigensolve_impl(std::move(copy), op.g);
}

EigenDecomp eigensolve(GridOperator&& op) { return eigensolve_impl(std::move(op.M), op.g); }

cplx rayleigh(const VecX& v, const GridOperator& op) { return v.dot(op.M * v); }

double spectral_norm_herm(const MatX& M, int iters) {
  const long n = M.rows();
  VecX v(n);
  for (long i = 0; i < n; ++i) v[i] = cplx(1.0 + 0.25 * std::sin(1.7 * i), 0.1 * std::cos(0.3 * i));
  v.normalize();
  double lam2 = 0.0;
  VecX w(n);
  for (int it = 0; it < iters; ++it) {
    w.noalias() = M * v;
    v.noalias() = M.adjoint() * w;
    lam2 = v.norm();
    if (lam2 == 0.0) return 0.0;
    v /= lam2;
  }
  return std::sqrt(lam2);
}

EigenWindow eig_window(const EigenDecomp& d, double E, double omega) {
  EigenWindow w;
  w.E = E;
  w.omega = omega;
  w.hbar = d.g.hbar();
  const double lo = E - w.hbar * omega, hi = E + w.hbar * omega;
  std::vector<double> vals;
  for (int i = 0; i < d.dim(); ++i)
    if (d.evals[i] >= lo && d.evals[i] <= hi) {
      w.indices.push_back(i);
      vals.push_back(d.evals[i]);
    }
  if (w.indices.empty())
    throw EmptyWindow("no eigenvalues in I(E, hbar) = [" + std::to_string(lo) + ", " +
                      std::to_string(hi) + "]");
  w.evals = Eigen::Map<VecXd>(vals.data(), vals.size());
  return w;
}

GridOperator almost_projector(Branch nu, const FieldConfig& f, const DiracParams& prm,
                              const GridSpec& g, const QuantizeOptions& qopts) {
  ProjectorSymbol sym(f, prm, nu);
  GridOperator P = weyl_quantize(sym, g, qopts);
  P.M = 0.5 * (P.M + P.M.adjoint()).eval();
  return P;
}

GridOperator riesz_projector(const GridOperator& almost, RieszInfo* info) {
  // Exact projectors pass through: spectrum within 1e-12 of {0,1} means the
  // threshold construction returns the input up to the same error.
  const MatX defect = almost.M * almost.M - almost.M;
  const double d2 = spectral_norm_herm(defect);
  if (d2 < 1e-12) {
    if (info) {
      info->exact_input = true;
      info->gap_below = 0.0;
      info->gap_above = 1.0;
      info->dist_to_almost = d2;
    }
    return almost;
  }

  EigenDecomp ed = eigensolve(almost);
  double below = -1e300, above = 1e300;
  int split = 0;
  for (int i = 0; i < ed.dim(); ++i) {
    const double lam = ed.evals[i];
    if (lam >= 0.4 && lam <= 0.6)
      throw SpectralGapViolation("almost projector eigenvalue " + std::to_string(lam) +
                                 " inside [0.4, 0.6]; hbar too large for this scenario");
    if (lam < 0.5) {
      below = std::max(below, lam);
      ++split;
    } else {
      above = std::min(above, lam);
    }
  }
  GridOperator P;
  P.g = almost.g;
  const auto upper = ed.evecs.rightCols(ed.dim() - split);
  P.M.noalias() = upper * upper.adjoint();
  P.M = 0.5 * (P.M + P.M.adjoint()).eval();
  if (info) {
    info->exact_input = false;
    info->gap_below = below;
    info->gap_above = above;
    double dist = 0.0;
    for (int i = 0; i < ed.dim(); ++i)
      dist = std::max(dist, std::abs((ed.evals[i] < 0.5 ? 0.0 : 1.0) - ed.evals[i]));
    info->dist_to_almost = dist;
  }
  return P;
}

ProjectorPair spectral_projector(const EigenDecomp& d, double E) {
  int split = 0;
  for (int i = 0; i < d.dim(); ++i) {
    if (std::abs(d.evals[i] - E) < 1e-9)
      throw EigenvalueAtThreshold("eigenvalue " + std::to_string(d.evals[i]) +
                                  " within 1e-9 of threshold " + std::to_string(E));
    if (d.evals[i] < E) ++split;
  }
  ProjectorPair pair;
  pair.provenance = "spectral";
  pair.minus.g = pair.plus.g = d.g;
  const auto lower = d.evecs.leftCols(split);
  pair.minus.M.noalias() = lower * lower.adjoint();
  pair.minus.M = 0.5 * (pair.minus.M + pair.minus.M.adjoint()).eval();
  pair.plus.M = MatX::Identity(d.dim(), d.dim()) - pair.minus.M;
  pair.completeness = 0.0;  // exact by construction
  return pair;
}

std::pair<GridOperator, GridOperator> split_blocks(const GridOperator& B,
                                                   const GridOperator& Pplus,
                                                   const GridOperator& Pminus) {
  if (B.g != Pplus.g || B.g != Pminus.g) throw GridMismatch("split_blocks: grid mismatch");
  GridOperator diag, off;
  diag.g = off.g = B.g;
  const MatX BPp = B.M * Pplus.M;
  const MatX BPm = B.M * Pminus.M;
  diag.M.noalias() = Pplus.M * BPp;
  diag.M.noalias() += Pminus.M * BPm;
  off.M.noalias() = Pplus.M * BPm;
  off.M.noalias() += Pminus.M * BPp;
  return {std::move(diag), std::move(off)};
}

QuasimodeSet quasimodes(const EigenDecomp& d, const EigenWindow& win, const GridOperator& P,
                        Branch nu, double delta) {
  if (delta <= 0.0 || delta >= 1.0) throw ConfigInvalid("quasimodes: need 0 < delta < 1");
  QuasimodeSet qs;
  qs.nu = nu;
  qs.delta = delta;

  std::vector<int> keep_pos;
  std::vector<double> norms, evals;
  MatX proj(d.dim(), win.indices.size());
  for (std::size_t w = 0; w < win.indices.size(); ++w)
    proj.col(w).noalias() = P.M * d.evecs.col(win.indices[w]);
  for (std::size_t w = 0; w < win.indices.size(); ++w) {
    const double nrm = proj.col(w).norm();
    if (nrm >= delta) {
      keep_pos.push_back(static_cast<int>(w));
      norms.push_back(nrm);
      evals.push_back(win.evals[w]);
    }
  }
  if (keep_pos.empty()) throw NoQuasimodes("no projected eigenspinor reached delta");

  qs.window_pos = keep_pos;
  qs.phi.resize(d.dim(), keep_pos.size());
  qs.norms = Eigen::Map<VecXd>(norms.data(), norms.size());
  qs.evals = Eigen::Map<VecXd>(evals.data(), evals.size());
  qs.discrepancies.resize(keep_pos.size());
  for (std::size_t i = 0; i < keep_pos.size(); ++i) {
    qs.indices.push_back(win.indices[keep_pos[i]]);
    qs.phi.col(i) = proj.col(keep_pos[i]) / norms[i];
    // ||(H - E_n) phi|| = ||(Lambda - E_n) V* phi||.
    const VecX coeff = d.evecs.adjoint() * qs.phi.col(i);
    double acc = 0.0;
    for (int r = 0; r < d.dim(); ++r) acc += std::norm(coeff[r]) * std::pow(d.evals[r] - qs.evals[i], 2);
    qs.discrepancies[i] = std::sqrt(acc);
  }
  return qs;
}

double commutator_norm(const EigenDecomp& d, const GridOperator& A) {
  if (A.g != d.g) throw GridMismatch("commutator_norm: grid mismatch");
  MatX C = d.evecs.adjoint() * (A.M * d.evecs);
  for (int j = 0; j < d.dim(); ++j)
    for (int i = 0; i < d.dim(); ++i) C(i, j) *= (d.evals[i] - d.evals[j]);
  return spectral_norm_herm(C);
}

GridOperator heisenberg_evolve(const GridOperator& B, const EigenDecomp& H, double t,
                               double hbar) {
  if (B.g != H.g) throw GridMismatch("heisenberg_evolve: grid mismatch");
  const int n = H.dim();

  // Spot-check orthonormality of the eigenbasis (32 deterministic columns).
  const int probes = std::min(32, n);
  double ortho = 0.0;
  for (int a = 0; a < probes; ++a) {
    const int ca = (static_cast<long>(a) * n) / probes;
    for (int b = 0; b <= a; ++b) {
      const int cb = (static_cast<long>(b) * n) / probes;
      const cplx ip = H.evecs.col(ca).dot(H.evecs.col(cb));
      ortho = std::max(ortho, std::abs(ip - (ca == cb ? 1.0 : 0.0)));
    }
  }
  if (ortho > 1e-9) throw Error("eigenbasis orthonormality residual " + std::to_string(ortho));

  GridOperator out;
  out.g = B.g;
  MatX C = H.evecs.adjoint() * (B.M * H.evecs);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      C(i, j) *= std::exp(iu * (t / hbar) * (H.evals[i] - H.evals[j]));
  out.M.noalias() = H.evecs * (C * H.evecs.adjoint());
  return out;
}

}  // namespace diraclab
