#include "cat1/batteries.hpp"

#include <algorithm>
#include <cmath>

namespace cat1 {

namespace {

// Admissible triple: pairwise distances at most pi/2, the regime every
// iteration theorem works in. The convexity inequality genuinely fails for
// wider triangles (it needs cos d(x,z) and cos d(y,z) nonnegative), even
// though the perimeter bound alone admits them.
bool admissible(const ModelSpace& space, const SpacePoint& x, const SpacePoint& y,
                const SpacePoint& z) {
  const scalar_t dxy = dist(space, x, y);
  const scalar_t dyz = dist(space, y, z);
  const scalar_t dzx = dist(space, z, x);
  return dxy <= kPi / 2 && dyz <= kPi / 2 && dzx <= kPi / 2;
}

SpacePoint perturb(const ModelSpace& space, const SpacePoint& v, scalar_t eps, rng_t& rng) {
  if (eps == 0.0) return v;
  const Eigen::MatrixXd basis = tangent_basis(space, v);
  std::uniform_int_distribution<int> pick(0, static_cast<int>(basis.cols()) - 1);
  return geodesic_step(space, v, basis.col(pick(rng)), eps);
}

}  // namespace

GeometryBatteryReport run_geometry_battery(int count, std::uint64_t seed,
                                           scalar_t corrupt_eps) {
  const ModelSpace space = ModelSpace::sphere(2);
  GeometryBatteryReport rep;
  rep.count = count;
  rep.seed = seed;
  rng_t rng(seed);
  std::uniform_real_distribution<scalar_t> unit(0.0, 1.0);

  for (int i = 0; i < count; ++i) {
    SpacePoint x = sample_uniform(space, rng);
    SpacePoint y = sample_uniform(space, rng);
    SpacePoint z = sample_uniform(space, rng);
    while (!admissible(space, x, y, z)) {
      x = sample_uniform(space, rng);
      y = sample_uniform(space, rng);
      z = sample_uniform(space, rng);
    }
    const scalar_t t = unit(rng);

    const scalar_t dxy = dist(space, x, y);
    const scalar_t dyz = dist(space, y, z);
    const scalar_t dzx = dist(space, z, x);
    rep.worst_symmetry =
        std::max(rep.worst_symmetry, std::abs(dxy - dist(space, y, x)));
    rep.worst_triangle = std::max(rep.worst_triangle, dzx - dxy - dyz);

    SpacePoint v = perturb(space, combine(space, t, x, y), corrupt_eps, rng);
    const scalar_t comparison =
        std::cos(dist(space, v, z)) * std::sin(dxy) -
        (std::cos(dzx) * std::sin(t * dxy) + std::cos(dyz) * std::sin((1.0 - t) * dxy));
    rep.worst_comparison = std::max(rep.worst_comparison, std::abs(comparison));
    const scalar_t convexity = std::cos(dist(space, v, z)) -
                               (t * std::cos(dzx) + (1.0 - t) * std::cos(dyz));
    rep.min_convexity = std::min(rep.min_convexity, convexity);

    rep.worst_interpolation = std::max(
        {rep.worst_interpolation, std::abs(dist(space, x, v) - (1.0 - t) * dxy),
         std::abs(dist(space, y, v) - t * dxy)});
  }

  rep.pass = rep.comparison_ok() && rep.convexity_ok() && rep.worst_symmetry <= 1e-10 &&
             rep.worst_triangle <= 1e-10 && rep.worst_interpolation <= 1e-10;
  return rep;
}

SinSweepReport run_sin_inequality_sweep(int grid_points, scalar_t delta_min) {
  SinSweepReport rep;
  rep.grid_points = grid_points;
  const scalar_t hi = kPi / 2;
  for (int k = 1; k <= grid_points; ++k) {
    const scalar_t delta = delta_min + (hi - delta_min) * k / grid_points;
    for (int a = 1; a <= 9; ++a) {
      if (sin_inequality_holds(delta, 0.1 * a)) ++rep.true_count;
    }
  }
  rep.pass = rep.true_count == 0;
  return rep;
}

}  // namespace cat1
