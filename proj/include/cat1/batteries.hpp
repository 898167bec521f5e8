#pragma once

#include "cat1/sphere_geom.hpp"
#include "cat1/types.hpp"

#include <cstdint>

namespace cat1 {

/// Randomized check of the geometry contracts on S^2: comparison-inequality
/// residual (equality on the model sphere), convexity residual, distance
/// symmetry, triangle inequality and the interpolation distance law.
struct GeometryBatteryReport {
  int count = 0;
  std::uint64_t seed = 0;
  scalar_t worst_comparison = 0.0;    // max |comparison_residual|
  scalar_t min_convexity = 0.0;       // min convexity_residual
  scalar_t worst_symmetry = 0.0;      // max |d(x,y) - d(y,x)|
  scalar_t worst_triangle = 0.0;      // max d(x,z) - d(x,y) - d(y,z)
  scalar_t worst_interpolation = 0.0; // max |d(x, combine) - (1-t) d(x,y)| and dual
  bool pass = false;

  bool comparison_ok() const { return worst_comparison <= 1e-9; }
  bool convexity_ok() const { return min_convexity >= -1e-12; }
};

/// corrupt_eps > 0 perturbs the interpolation point by that many radians
/// before measuring, as a self-test that the battery detects corruption.
GeometryBatteryReport run_geometry_battery(int count, std::uint64_t seed,
                                           scalar_t corrupt_eps = 0.0);

/// Grid confirmation that sin(delta) < sin(alpha delta) + sin((1-alpha) delta)
/// strictly away from zero: sin_inequality_holds must be false on the whole
/// grid of delta in (delta_min, pi/2], alpha in {0.1, ..., 0.9}.
struct SinSweepReport {
  int grid_points = 0;
  int true_count = 0;  // number of grid nodes where the predicate held
  bool pass = false;   // true iff true_count == 0
};

SinSweepReport run_sin_inequality_sweep(int grid_points = 10000, scalar_t delta_min = 1e-4);

}  // namespace cat1
