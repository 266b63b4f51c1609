#pragma once

#include "cliffym/clifford.hpp"
#include "cliffym/types.hpp"

#include <cstdint>
#include <functional>

namespace cliffym {

inline constexpr double kFocalResidualTol = 1e-11;
inline constexpr double kFrameTol = 1e-10;
inline constexpr double kPivotTol = 1e-8;
inline constexpr double kTransportRadius = 1e-2;
inline constexpr double kMaxJacobianCondition = 1e8;

/// Step size and Newton controls shared by projection, retraction and finite differences.
struct FdConfig {
  double step = 1e-5;
  double newton_tol = 1e-13;
  int newton_max_iter = 50;

  /// Throws ConfigError unless step is in [1e-8, 1e-2] and the Newton controls are positive.
  void validate() const;
};

/// A unit vector on M_+ = { x in S^{2l-1} : <P_i x, x> = 0 for all i }.
struct FocalPoint {
  Vector x;
  /// max(| |x|^2 - 1 |, max_i |<P_i x, x>|)
  double residual = 0.0;
  int newton_steps = 0;
};

/// Orthonormal tangent basis e_1..e_n (columns of `tangent`) and normals P_a x
/// (columns of `normal`) at a focal point.
struct AdaptedFrame {
  FocalPoint point;
  Matrix tangent;
  Matrix normal;

  int n() const { return static_cast<int>(tangent.cols()); }
  Eigen::Ref<const Vector> e(int i) const { return tangent.col(i); }
};

double focal_residual(const CliffordSystem& s, const Vector& x);

/// Minimum-norm Newton iteration on F(x) = (|x|^2 - 1, <P_0 x, x>, ..., <P_m x, x>).
/// Returns x0 untouched if it already satisfies the tolerance.
FocalPoint project_to_focal(const CliffordSystem& s, const Vector& x0, const FdConfig& cfg = {});

/// Deterministic in (system, seed): Gaussian draw, normalize, project. Retries up to
/// eight fresh draws on solver failure.
FocalPoint sample_focal_point(const CliffordSystem& s, std::uint64_t seed,
                              const FdConfig& cfg = {});

/// Random tangent basis by projection and modified Gram-Schmidt.
AdaptedFrame adapted_frame(const CliffordSystem& s, const FocalPoint& p, std::uint64_t seed);

/// Same as adapted_frame but the tangent basis starts with the given unit tangent vectors,
/// in order, before random completion.
AdaptedFrame adapted_frame_with(const CliffordSystem& s, const FocalPoint& p,
                                const Matrix& leading, std::uint64_t seed);

/// Projection of x + t v back to M_+. Requires v tangent and |t v| < 0.1.
FocalPoint retract(const CliffordSystem& s, const FocalPoint& p, const Vector& v, double t,
                   const FdConfig& cfg = {});

/// Projects the tangent vectors of `f` onto T_q M_+ and re-orthonormalizes them in order.
/// First-order parallel: the tangential drift vanishes to first order in |q - x|.
AdaptedFrame transport_frame(const CliffordSystem& s, const AdaptedFrame& f, const FocalPoint& q);

/// Max |G - I| over the Gram matrix of {x, normals, tangents}.
double frame_orthonormality_defect(const AdaptedFrame& f);

/// A tensor with frame-covariant components, flattened.
using FrameField = std::function<Vector(const AdaptedFrame&)>;

/// Central difference of `field` along the retraction in direction e_j, with frames
/// transported to the displaced points.
Vector fd_covariant_derivative(const CliffordSystem& s, const FrameField& field,
                               const AdaptedFrame& f, int j, const FdConfig& cfg = {});

/// All n directional derivatives; row j is fd_covariant_derivative along e_j.
Matrix fd_gradient(const CliffordSystem& s, const FrameField& field, const AdaptedFrame& f,
                   const FdConfig& cfg = {});

}  // namespace cliffym
