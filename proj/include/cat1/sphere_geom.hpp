#pragma once

#include "cat1/types.hpp"

#include <random>

namespace cat1 {

/// Geodesic distance in radians (sphere: great-circle arc; segment: |x-y|).
scalar_t dist(const ModelSpace& space, const SpacePoint& x, const SpacePoint& y);

/// The point z on the geodesic [x, y] with dist(x, z) = (1-t) * dist(x, y),
/// i.e. weight t multiplies x. Rejects antipodal inputs and t outside [0, 1].
/// Endpoints are exact: t = 1 returns x, t = 0 returns y.
SpacePoint combine(const ModelSpace& space, scalar_t t, const SpacePoint& x,
                   const SpacePoint& y);

/// LHS - RHS of the spherical comparison inequality with v = combine(t, x, y):
///   cos d(v,z) sin d(x,y) - [cos d(x,z) sin(t d(x,y)) + cos d(y,z) sin((1-t) d(x,y))].
/// Zero up to round-off on the model sphere; nonnegative in general.
scalar_t comparison_residual(const ModelSpace& space, scalar_t t, const SpacePoint& x,
                             const SpacePoint& y, const SpacePoint& z);

/// cos d(v,z) - [t cos d(x,z) + (1-t) cos d(y,z)] with v = combine(t, x, y);
/// nonnegative on all admissible inputs.
scalar_t convexity_residual(const ModelSpace& space, scalar_t t, const SpacePoint& x,
                            const SpacePoint& y, const SpacePoint& z);

/// True iff sin(delta) >= sin(alpha delta) + sin((1-alpha) delta).
/// For delta in [0, pi/2] and alpha in (0, 1) this can only hold near delta = 0.
bool sin_inequality_holds(scalar_t delta, scalar_t alpha);

/// Orthonormal basis of the tangent space at y (sphere: dim columns
/// orthogonal to y; segment: the single direction +1).
Eigen::MatrixXd tangent_basis(const ModelSpace& space, const SpacePoint& y);

/// Point reached after moving arc length s from y along unit tangent v.
/// Segment moves are clamped to [lo, hi].
SpacePoint geodesic_step(const ModelSpace& space, const SpacePoint& y,
                         const Eigen::VectorXd& v, scalar_t s);

using rng_t = std::mt19937_64;

/// Uniform random point of the space (normalized Gaussian on the sphere).
SpacePoint sample_uniform(const ModelSpace& space, rng_t& rng);

/// Uniform random point of the ball {y : dist(y, center) <= radius}, by rejection.
SpacePoint sample_in_ball(const ModelSpace& space, const SpacePoint& center,
                          scalar_t radius, rng_t& rng);

}  // namespace cat1
