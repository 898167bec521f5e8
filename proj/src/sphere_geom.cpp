#include "cat1/sphere_geom.hpp"

#include <algorithm>
#include <cmath>

namespace cat1 {

namespace {

constexpr scalar_t kCoincidentTol = 1e-14;
constexpr scalar_t kAntipodalTol = 1e-9;

scalar_t clamp_unit(scalar_t v) { return std::clamp(v, -1.0, 1.0); }

void require_pair(const ModelSpace& space, const SpacePoint& x, const SpacePoint& y,
                  const char* who) {
  space.require_valid(x, who);
  space.require_valid(y, who);
}

}  // namespace

scalar_t dist(const ModelSpace& space, const SpacePoint& x, const SpacePoint& y) {
  require_pair(space, x, y, "dist");
  if (space.kind == ModelSpace::Kind::Segment) return std::abs(x.value() - y.value());
  const scalar_t dot = x.coords.dot(y.coords);
  // acos loses ~1e-8 of accuracy near dot = 1; the chord form is exact there.
  if (dot >= 0.0) return 2.0 * std::asin(clamp_unit(0.5 * (x.coords - y.coords).norm()));
  return std::acos(clamp_unit(dot));
}

SpacePoint combine(const ModelSpace& space, scalar_t t, const SpacePoint& x,
                   const SpacePoint& y) {
  require_pair(space, x, y, "combine");
  if (!(t >= 0.0 && t <= 1.0))
    throw std::invalid_argument("combine: t must lie in [0, 1]");
  if (t == 1.0) return x;
  if (t == 0.0) return y;

  if (space.kind == ModelSpace::Kind::Segment)
    return SpacePoint::scalar(t * x.value() + (1.0 - t) * y.value());

  const scalar_t theta = dist(space, x, y);
  if (theta < kCoincidentTol) return x;
  if (theta >= kPi - kAntipodalTol)
    throw std::invalid_argument("combine: antipodal inputs, geodesic not unique");

  const scalar_t s = std::sin(theta);
  vector_t z = (std::sin(t * theta) * x.coords + std::sin((1.0 - t) * theta) * y.coords) / s;
  z.normalize();  // drift guard
  return SpacePoint(std::move(z));
}

scalar_t comparison_residual(const ModelSpace& space, scalar_t t, const SpacePoint& x,
                             const SpacePoint& y, const SpacePoint& z) {
  const scalar_t dxy = dist(space, x, y);
  const scalar_t dyz = dist(space, y, z);
  const scalar_t dzx = dist(space, z, x);
  if (!(dxy + dyz + dzx < 2 * kPi))
    throw std::invalid_argument("comparison_residual: triangle perimeter must be below 2*pi");
  const SpacePoint v = combine(space, t, x, y);
  const scalar_t lhs = std::cos(dist(space, v, z)) * std::sin(dxy);
  const scalar_t rhs =
      std::cos(dzx) * std::sin(t * dxy) + std::cos(dyz) * std::sin((1.0 - t) * dxy);
  return lhs - rhs;
}

scalar_t convexity_residual(const ModelSpace& space, scalar_t t, const SpacePoint& x,
                            const SpacePoint& y, const SpacePoint& z) {
  const scalar_t dxy = dist(space, x, y);
  const scalar_t dyz = dist(space, y, z);
  const scalar_t dzx = dist(space, z, x);
  if (!(dxy + dyz + dzx < 2 * kPi))
    throw std::invalid_argument("convexity_residual: triangle perimeter must be below 2*pi");
  const SpacePoint v = combine(space, t, x, y);
  return std::cos(dist(space, v, z)) - (t * std::cos(dzx) + (1.0 - t) * std::cos(dyz));
}

bool sin_inequality_holds(scalar_t delta, scalar_t alpha) {
  if (!(delta >= 0.0 && delta <= kPi / 2))
    throw std::invalid_argument("sin_inequality_holds: delta must lie in [0, pi/2]");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("sin_inequality_holds: alpha must lie in (0, 1)");
  // Strict comparison: any absolute slack would make the predicate true on a
  // neighbourhood of delta = 0 that grows with the slack, breaking the
  // contract that a true result pins delta to (numerical) zero.
  return std::sin(delta) >= std::sin(alpha * delta) + std::sin((1.0 - alpha) * delta);
}

Eigen::MatrixXd tangent_basis(const ModelSpace& space, const SpacePoint& y) {
  if (space.kind == ModelSpace::Kind::Segment) {
    Eigen::MatrixXd b(1, 1);
    b(0, 0) = 1.0;
    return b;
  }
  const Eigen::Index n = y.coords.size();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(y.coords);
  Eigen::MatrixXd q = qr.householderQ();
  return q.rightCols(n - 1);
}

SpacePoint geodesic_step(const ModelSpace& space, const SpacePoint& y,
                         const Eigen::VectorXd& v, scalar_t s) {
  if (space.kind == ModelSpace::Kind::Segment) {
    const scalar_t moved = std::clamp(y.value() + s * v[0], space.lo, space.hi);
    return SpacePoint::scalar(moved);
  }
  vector_t z = std::cos(s) * y.coords + std::sin(s) * v;
  z.normalize();
  return SpacePoint(std::move(z));
}

SpacePoint sample_uniform(const ModelSpace& space, rng_t& rng) {
  if (space.kind == ModelSpace::Kind::Segment) {
    std::uniform_real_distribution<scalar_t> u(space.lo, space.hi);
    return SpacePoint::scalar(u(rng));
  }
  std::normal_distribution<scalar_t> gauss(0.0, 1.0);
  vector_t v(space.ambient_dim());
  do {
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = gauss(rng);
  } while (v.norm() < 1e-8);
  v.normalize();
  return SpacePoint(std::move(v));
}

SpacePoint sample_in_ball(const ModelSpace& space, const SpacePoint& center,
                          scalar_t radius, rng_t& rng) {
  space.require_valid(center, "sample_in_ball");
  for (int tries = 0; tries < 1000000; ++tries) {
    SpacePoint p = sample_uniform(space, rng);
    if (dist(space, p, center) <= radius) return p;
  }
  throw std::runtime_error("sample_in_ball: rejection sampling failed (ball too small)");
}

}  // namespace cat1
