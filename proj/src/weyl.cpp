#include "diraclab/weyl.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace diraclab {

namespace {

int posmod(long v, int n) {
  long r = v % n;
  if (r < 0) r += n;
  return static_cast<int>(r);
}

/// Signed displacement window [-N/2, N/2).
int wrap_disp(int d, int N) {
  int m = posmod(d, N);
  if (m >= N / 2) m -= N;
  return m;
}

/// Per-axis DFT matrix D[m_idx, k_idx] = e^{2 pi i k m / N} / N with the
/// index convention idx <-> value idx - N/2.
Eigen::MatrixXcd dft_matrix(int N) {
  Eigen::MatrixXcd D(N, N);
  for (int mi = 0; mi < N; ++mi)
    for (int ki = 0; ki < N; ++ki) {
      const double m = mi - N / 2, k = ki - N / 2;
      D(mi, ki) = std::exp(2.0 * pi * iu * (k * m / N)) / static_cast<double>(N);
    }
  return D;
}

/// Exact trigonometric interpolation weight: value at integer site n of the
/// sub-Nyquist band-limited extension of samples living at half sites
/// ntil + 1/2.
double half_shift_weight(int n, int ntil, int N) {
  double w = 0.0;
  const double d = n - ntil - 0.5;
  for (int f = -N / 2 + 1; f <= N / 2 - 1; ++f) w += std::cos(2.0 * pi * f * d / N);
  return w / N;
}

/// Interpolation from integer samples to position mu/2 on the doubled grid.
double to_half_grid_weight(int mu, int n, int N) {
  if (mu % 2 == 0) return (posmod(mu / 2, N) == n) ? 1.0 : 0.0;
  double w = 0.0;
  const double d = 0.5 * mu - n;
  for (int f = -N / 2 + 1; f <= N / 2 - 1; ++f) w += std::cos(2.0 * pi * f * d / N);
  return w / N;
}

struct PairTransforms {
  Eigen::MatrixXcd inv;  // [(q_idx, n) <- (j, j')], pair index a*N + b
  Eigen::MatrixXcd fwd;  // [(j, j') <- (k_idx, n)]
};

/// 1D chord-map matrices; the 3D maps are their per-axis tensor products.
const PairTransforms& pair_transforms(int N) {
  static std::map<int, PairTransforms> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(N);
  if (it != cache.end()) return it->second;

  PairTransforms T;
  const int NN = N * N;
  T.inv.setZero(NN, NN);
  T.fwd.setZero(NN, NN);

  // Inverse: even chords read off directly at integer midpoints, odd chords
  // collected at half midpoints and shifted back by exact interpolation.
  for (int qi = 0; qi < N; ++qi) {
    const double q = qi - N / 2;
    for (int m = -N / 2; m < N / 2; ++m) {
      const cplx ph = std::exp(-2.0 * pi * iu * (q * m / N));
      if (posmod(m, 2) == 0) {
        for (int n = 0; n < N; ++n) {
          const int j = posmod(n + m / 2, N), jp = posmod(n - m / 2, N);
          T.inv(qi * N + n, j * N + jp) += ph;
        }
      } else {
        for (int ntil = 0; ntil < N; ++ntil) {
          const int j = posmod(ntil + (m + 1) / 2, N);
          const int jp = posmod(ntil - (m - 1) / 2, N);
          for (int n = 0; n < N; ++n)
            T.inv(qi * N + n, j * N + jp) += half_shift_weight(n, ntil, N) * ph;
        }
      }
    }
  }

  // Forward from node samples; Nyquist-displacement chords average their two
  // antipodal midpoints, which is what keeps adjoint covariance exact.
  for (int j = 0; j < N; ++j)
    for (int jp = 0; jp < N; ++jp) {
      const int m = wrap_disp(j - jp, N);
      const bool nyq = (m == -N / 2);
      const int nvar = nyq ? 2 : 1;
      for (int v = 0; v < nvar; ++v) {
        const int mu2 = posmod(2L * jp + m + static_cast<long>(v) * N, 2 * N);
        const double wv = nyq ? 0.5 : 1.0;
        for (int ki = 0; ki < N; ++ki) {
          const double k = ki - N / 2;
          const cplx ph = std::exp(2.0 * pi * iu * (k * m / N)) / static_cast<double>(N);
          for (int n = 0; n < N; ++n) {
            const double w = to_half_grid_weight(mu2, n, N);
            if (w != 0.0) T.fwd(j * N + jp, ki * N + n) += wv * ph * w;
          }
        }
      }
    }

  auto [ins, ok] = cache.emplace(N, std::move(T));
  (void)ok;
  return ins->second;
}

/// In-place per-axis pair transform: for every fiber over the (j_axis,
/// j'_axis) index pair, apply the N^2 x N^2 matrix T. Fibers are disjoint,
/// so this runs in place with a chunked gather/GEMM/scatter.
void pair_transform_axis(MatX& M, int N, int axis, const Eigen::MatrixXcd& T) {
  const long dim = M.rows();
  long stride = 4;
  for (int a = 0; a < axis; ++a) stride *= N;

  std::vector<long> rest;
  rest.reserve(dim / N);
  for (long r = 0; r < dim; ++r)
    if ((r / stride) % N == 0) rest.push_back(r);

  const int NN = N * N;
  const int chunk = 2048;
  Eigen::MatrixXcd G(NN, chunk), H(NN, chunk);
  const long fibers = static_cast<long>(rest.size()) * static_cast<long>(rest.size());
  for (long f0 = 0; f0 < fibers; f0 += chunk) {
    const int c = static_cast<int>(std::min<long>(chunk, fibers - f0));
    for (int fc = 0; fc < c; ++fc) {
      const long f = f0 + fc;
      const long rr = rest[f / rest.size()], cc = rest[f % rest.size()];
      for (int j = 0; j < N; ++j)
        for (int jp = 0; jp < N; ++jp) G(j * N + jp, fc) = M(rr + stride * j, cc + stride * jp);
    }
    H.leftCols(c).noalias() = T * G.leftCols(c);
    for (int fc = 0; fc < c; ++fc) {
      const long f = f0 + fc;
      const long rr = rest[f / rest.size()], cc = rest[f % rest.size()];
      for (int j = 0; j < N; ++j)
        for (int jp = 0; jp < N; ++jp) M(rr + stride * j, cc + stride * jp) = H(j * N + jp, fc);
    }
  }
}

/// 3D DFT k -> m of one scalar component (contiguous N^3 buffer).
void dft3(cplx* data, int N, const Eigen::MatrixXcd& D) {
  using EMat = Eigen::MatrixXcd;
  const int N2 = N * N;
  {
    Eigen::Map<EMat> A(data, N, N2);
    A = (D * A).eval();
  }
  for (int k3 = 0; k3 < N; ++k3) {
    Eigen::Map<EMat> A(data + static_cast<long>(N2) * k3, N, N);
    A = (A * D.transpose()).eval();
  }
  {
    Eigen::Map<EMat> A(data, N2, N);
    A = (A * D.transpose()).eval();
  }
}

}  // namespace

GridOperator weyl_quantize(const PhaseSpaceSymbol& sym, const GridSpec& g,
                           const QuantizeOptions& opts, QuantizeStats* stats) {
  const int N = g.N;
  const int sites = g.sites();
  GridOperator op;
  op.g = g;
  op.M.setZero(g.dim(), g.dim());

  if (const auto c = sym.constant_value()) {
    for (int s = 0; s < sites; ++s) op.M.block<4, 4>(4 * s, 4 * s) = *c;
    if (stats) stats->tail_fraction = 0.0;
    return op;
  }

  std::vector<Vec3> ps(sites);
  for (int kl = 0; kl < sites; ++kl) ps[kl] = g.p_of_idx(g.site_coords(kl));

  const Eigen::MatrixXcd D = dft_matrix(N);
  std::vector<Mat4> column(sites);
  std::vector<cplx> buf(16L * sites);
  const double half = 0.5 * g.a();

  double tail = 0.0, total = 0.0;
  const int twoN = 2 * N;
  Vec3i mu;
  for (mu[2] = 0; mu[2] < twoN; ++mu[2])
    for (mu[1] = 0; mu[1] < twoN; ++mu[1])
      for (mu[0] = 0; mu[0] < twoN; ++mu[0]) {
        const Vec3 xmid(half * mu[0], half * mu[1], half * mu[2]);
        sym.eval_column(xmid, ps, column.data());
        for (int kl = 0; kl < sites; ++kl)
          for (int cc = 0; cc < 4; ++cc)
            for (int rr = 0; rr < 4; ++rr)
              buf[(static_cast<long>(rr) + 4 * cc) * sites + kl] = column[kl](rr, cc);
        for (int comp = 0; comp < 16; ++comp)
          dft3(buf.data() + static_cast<long>(comp) * sites, N, D);

        for (int ml = 0; ml < sites; ++ml) {
          const Vec3i midx = g.site_coords(ml);
          const Vec3i m(midx[0] - N / 2, midx[1] - N / 2, midx[2] - N / 2);
          bool parity_ok = true;
          int nyq_axes[3];
          int nnyq = 0;
          bool edge = false;
          for (int ax = 0; ax < 3; ++ax) {
            if (posmod(m[ax], 2) != posmod(mu[ax], 2)) parity_ok = false;
            if (m[ax] == -N / 2) nyq_axes[nnyq++] = ax;
            if (m[ax] == -N / 2 || m[ax] == N / 2 - 1) edge = true;
          }
          double sq = 0.0;
          if (opts.check_tail || stats) {
            for (int comp = 0; comp < 16; ++comp)
              sq += std::norm(buf[static_cast<long>(comp) * sites + ml]);
            total += sq;
            if (edge) tail += sq;
          }
          if (!parity_ok) continue;

          // The +-N/2 displacement representative is ambiguous per Nyquist
          // axis; split the weight over both chord assignments (the phase
          // e^{2 pi i k m / N} is the same for both signs).
          const double w = std::pow(0.5, nnyq);
          for (int var = 0; var < (1 << nnyq); ++var) {
            Vec3i meff = m;
            for (int b = 0; b < nnyq; ++b)
              if (var & (1 << b)) meff[nyq_axes[b]] = N / 2;
            Vec3i j, jp;
            for (int ax = 0; ax < 3; ++ax) {
              j[ax] = posmod((static_cast<long>(mu[ax]) + meff[ax]) / 2, N);
              jp[ax] = posmod((static_cast<long>(mu[ax]) - meff[ax]) / 2, N);
            }
            auto block = op.M.block<4, 4>(4 * g.site_index(j), 4 * g.site_index(jp));
            for (int cc = 0; cc < 4; ++cc)
              for (int rr = 0; rr < 4; ++rr)
                block(rr, cc) += w * buf[(static_cast<long>(rr) + 4 * cc) * sites + ml];
          }
        }
      }

  const double frac = total > 0 ? tail / total : 0.0;
  if (stats) stats->tail_fraction = frac;
  if (opts.check_tail && frac > opts.tail_threshold)
    throw GridTooCoarse("symbol displacement tail fraction " + std::to_string(frac) +
                        " exceeds " + std::to_string(opts.tail_threshold));
  return op;
}

GridSymbol weyl_symbol_of(const GridOperator& op) {
  GridSymbol s;
  s.g = op.g;
  s.vals = op.M;
  const auto& T = pair_transforms(op.g.N);
  for (int axis = 0; axis < 3; ++axis) pair_transform_axis(s.vals, op.g.N, axis, T.inv);
  return s;
}

GridOperator quantize_grid_symbol(const GridSymbol& sym) {
  GridOperator op;
  op.g = sym.g;
  op.M = sym.vals;
  const auto& T = pair_transforms(sym.g.N);
  for (int axis = 0; axis < 3; ++axis) pair_transform_axis(op.M, sym.g.N, axis, T.fwd);
  return op;
}

GridSymbol wigner_transform(const VecX& psi, const GridSpec& g) {
  if (psi.size() != g.dim()) throw GridMismatch("wigner_transform: state/grid size mismatch");
  GridOperator rho;
  rho.g = g;
  rho.M = g.cell_volume() * (psi * psi.adjoint());
  return weyl_symbol_of(rho);
}

cplx phase_space_pair(const GridSymbol& A, const GridSymbol& B) {
  if (A.g != B.g) throw GridMismatch("phase_space_pair: grid mismatch");
  const int sites = A.g.sites();
  cplx acc = 0.0;
  for (int kl = 0; kl < sites; ++kl)
    for (int jl = 0; jl < sites; ++jl)
      acc += (A.vals.block<4, 4>(4 * kl, 4 * jl) * B.vals.block<4, 4>(4 * kl, 4 * jl)).trace();
  return acc / static_cast<double>(sites);
}

cplx phase_space_pair(const GridSymbol& A, const PhaseSpaceSymbol& B) {
  const GridSpec& g = A.g;
  const int sites = g.sites();
  std::vector<Vec3> ps(sites);
  for (int kl = 0; kl < sites; ++kl) ps[kl] = g.p_of_idx(g.site_coords(kl));
  std::vector<Mat4> col(sites);
  cplx acc = 0.0;
  for (int jl = 0; jl < sites; ++jl) {
    B.eval_column(g.x_of(g.site_coords(jl)), ps, col.data());
    for (int kl = 0; kl < sites; ++kl)
      acc += (A.vals.block<4, 4>(4 * kl, 4 * jl) * col[kl]).trace();
  }
  return acc / static_cast<double>(sites);
}

cplx expectation(const VecX& psi, const GridOperator& op) {
  if (psi.size() != op.M.rows()) throw GridMismatch("expectation: state/operator mismatch");
  return op.g.cell_volume() * psi.dot(op.M * psi);
}

double hs_norm(const GridOperator& op) { return op.M.norm(); }

GridSymbol sample_symbol(const PhaseSpaceSymbol& sym, const GridSpec& g) {
  GridSymbol s;
  s.g = g;
  s.vals.setZero(g.dim(), g.dim());
  const int sites = g.sites();
  std::vector<Vec3> ps(sites);
  for (int kl = 0; kl < sites; ++kl) ps[kl] = g.p_of_idx(g.site_coords(kl));
  std::vector<Mat4> col(sites);
  for (int jl = 0; jl < sites; ++jl) {
    sym.eval_column(g.x_of(g.site_coords(jl)), ps, col.data());
    for (int kl = 0; kl < sites; ++kl) s.vals.block<4, 4>(4 * kl, 4 * jl) = col[kl];
  }
  return s;
}

}  // namespace diraclab
