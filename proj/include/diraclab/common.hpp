#pragma once

#include <Eigen/Dense>
#include <complex>
#include <numbers>

namespace diraclab {

using cplx = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using Vec3i = Eigen::Vector3i;
using Mat2 = Eigen::Matrix2cd;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4cd;
using Mat4x2 = Eigen::Matrix<cplx, 4, 2>;
using MatX = Eigen::MatrixXcd;
using VecX = Eigen::VectorXcd;
using VecXd = Eigen::VectorXd;

inline constexpr double pi = std::numbers::pi;
inline constexpr cplx iu{0.0, 1.0};

/// Particle (+) / antiparticle (-) branch label.
enum class Branch : int { plus = +1, minus = -1 };

inline int sign_of(Branch nu) { return static_cast<int>(nu); }
inline Branch other(Branch nu) { return nu == Branch::plus ? Branch::minus : Branch::plus; }
inline const char* branch_name(Branch nu) { return nu == Branch::plus ? "plus" : "minus"; }

struct DiracParams {
  double m = 1.0;  // rest mass
  double c = 1.0;  // speed of light
  double e = 1.0;  // charge
};

/// Point (p, x) of the classical phase space; x lives on the torus [0, L)^3.
struct PhasePoint {
  Vec3 p = Vec3::Zero();
  Vec3 x = Vec3::Zero();
};

inline double wrap_coordinate(double x, double L) {
  double y = std::fmod(x, L);
  if (y < 0.0) y += L;
  return y;
}

inline Vec3 wrap_position(const Vec3& x, double L) {
  return {wrap_coordinate(x[0], L), wrap_coordinate(x[1], L), wrap_coordinate(x[2], L)};
}

/// Signed representative of x - y on the circle, in [-L/2, L/2).
inline double wrap_delta(double d, double L) {
  double y = std::fmod(d, L);
  if (y < -L / 2.0) y += L;
  if (y >= L / 2.0) y -= L;
  return y;
}

inline const Mat2& pauli(int k) {
  static const Mat2 s[3] = {(Mat2() << 0, 1, 1, 0).finished(),
                            (Mat2() << 0, -iu, iu, 0).finished(),
                            (Mat2() << 1, 0, 0, -1).finished()};
  return s[k];
}

}  // namespace diraclab
