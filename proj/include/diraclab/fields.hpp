#pragma once

#include <array>
#include <string>
#include <vector>

#include "diraclab/common.hpp"

namespace diraclab {

/// One real Fourier mode amp * cos(2*pi*k.x/L + phase). Storing amplitude and
/// phase (rather than complex pairs) keeps every potential real by
/// construction, and all derivatives stay exact trigonometric sums.
struct FieldMode {
  Vec3i k = Vec3i::Zero();
  double amp = 0.0;
  double phase = 0.0;
};

/// Smooth periodic electromagnetic potentials on the torus [0, L)^3:
/// a scalar potential phi and vector potential A as trigonometric polynomials.
struct FieldConfig {
  double L = 2.0 * pi;
  std::vector<FieldMode> phi;
  std::array<std::vector<FieldMode>, 3> A;

  bool is_free() const {
    return phi.empty() && A[0].empty() && A[1].empty() && A[2].empty();
  }

  double eval_phi(const Vec3& x) const;
  Vec3 grad_phi(const Vec3& x) const;
  Vec3 eval_A(const Vec3& x) const;
  /// Jacobian J(i,j) = dA_i/dx_j.
  Mat3 grad_A(const Vec3& x) const;

  /// Largest |k_i| over all modes (band-limit of the potentials).
  int max_mode() const;
  /// Sup-norm bound sum |amp| of phi.
  double phi_bound() const;

  /// Structured text (JSON) round trip; schema:
  /// {"L": .., "phi": [[k1,k2,k3,amp,phase],..], "A1": [..], "A2": [..], "A3": [..]}
  std::string to_json() const;
  static FieldConfig from_json(const std::string& text);
};

/// All field data needed by the symbols at one position.
struct FieldsAt {
  double phi = 0.0;
  Vec3 A = Vec3::Zero();
};

inline FieldsAt fields_at(const FieldConfig& f, const Vec3& x) {
  return {f.eval_phi(x), f.eval_A(x)};
}

/// E = -grad phi, B = curl A (potentials are time independent).
struct EBFields {
  Vec3 E = Vec3::Zero();
  Vec3 B = Vec3::Zero();
};

EBFields fields_EB(const FieldConfig& f, const Vec3& x);

}  // namespace diraclab
