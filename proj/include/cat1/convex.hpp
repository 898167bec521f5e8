#pragma once

#include "cat1/sphere_geom.hpp"
#include "cat1/types.hpp"

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace cat1 {

inline constexpr scalar_t kInf = std::numeric_limits<scalar_t>::infinity();

/// Spherical cap {y : dist(y, center) <= radius}, geodesically convex for
/// radius < pi/2.
struct Cap {
  SpacePoint center;
  scalar_t radius = 0.0;
};

/// Closed convex subset of the model space: a cap, a finite intersection of
/// caps (with a feasibility witness), or a subinterval of a segment space.
struct ConvexSetHandle {
  enum class Kind { Cap, Intersection, Interval };

  Kind kind = Kind::Cap;
  std::vector<Cap> caps;      // one entry for Cap, several for Intersection
  scalar_t lo = 0.0, hi = 0.0;
  SpacePoint witness;         // member point, required for Intersection

  static ConvexSetHandle cap(Cap c);
  /// Verifies the witness belongs to every cap; rejects otherwise.
  static ConvexSetHandle intersection(const ModelSpace& space, std::vector<Cap> caps,
                                      const SpacePoint& witness);
  static ConvexSetHandle interval(scalar_t lo, scalar_t hi);

  bool contains(const ModelSpace& space, const SpacePoint& p, scalar_t tol = 1e-10) const;

  /// Pulls a nearby point into the set (cap: exact projection; intersection:
  /// cyclic cap projections; interval: clamp). Used to keep solver trial
  /// points feasible, not as a substitute for project_convex.
  SpacePoint restore(const ModelSpace& space, const SpacePoint& p) const;
};

/// Proper convex function on the model space; +inf marks points outside the
/// effective domain and is propagated through comparisons only.
struct ConvexFunctionHandle {
  std::function<scalar_t(const SpacePoint&)> value;
  std::string label;
  std::vector<SpacePoint> known_argmin;
  std::optional<ConvexSetHandle> feasible_set;  // effective domain, when known

  scalar_t operator()(const SpacePoint& x) const { return value(x); }
};

struct SolverSettings {
  int coarse_grid_points = 1024;
  scalar_t refine_tolerance = 1e-8;
  int max_refine_iters = 400;

  void validate() const;
};

/// Thrown when the coarse grid finds no finite objective value, as opposed to
/// invalid input which throws std::invalid_argument.
struct SolverFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ArgminResult {
  SpacePoint point;
  scalar_t value = kInf;
  scalar_t grid_value = kInf;  // best value seen on the coarse grid
};

/// Two-phase derivative-free argmin: deterministic coarse grid (Fibonacci
/// lattice on S^2, uniform on segments) followed by geodesic pattern search
/// with step halving down to refine_tolerance. When `feasible` is given,
/// trial points are restored into the set before evaluation.
ArgminResult argmin(const ModelSpace& space,
                    const std::function<scalar_t(const SpacePoint&)>& objective,
                    const SolverSettings& settings,
                    const std::optional<ConvexSetHandle>& feasible = {},
                    const std::vector<SpacePoint>& hints = {});

/// Analytic metric projection onto a cap.
SpacePoint project_cap(const ModelSpace& space, const Cap& cap, const SpacePoint& x);

/// Metric projection onto an arbitrary set handle (cap: analytic;
/// intersection: numerical argmin of dist(x, .); interval: clamp).
SpacePoint project_convex(const ModelSpace& space, const ConvexSetHandle& set,
                          const SpacePoint& x, const SolverSettings& settings);

/// Resolvent with penalty tan d(y,x) sin d(y,x).
SpacePoint resolvent_tansin(const ModelSpace& space, const ConvexFunctionHandle& f,
                            const SpacePoint& x, const SolverSettings& settings);

/// Resolvent with penalty -log cos d(y,x).
SpacePoint resolvent_logcos(const ModelSpace& space, const ConvexFunctionHandle& f,
                            const SpacePoint& x, const SolverSettings& settings);

/// 0 on the set, +inf off it.
ConvexFunctionHandle indicator_of(const ModelSpace& space, const ConvexSetHandle& set);

/// f(y) = dist(y, c); argmin is {c}.
ConvexFunctionHandle distance_to(const ModelSpace& space, const SpacePoint& c);

/// Nonnegatively weighted sum; known_argmin must be supplied by the caller
/// when analytic.
ConvexFunctionHandle weighted_sum(std::vector<ConvexFunctionHandle> terms,
                                  std::vector<scalar_t> weights,
                                  std::vector<SpacePoint> known_argmin = {});

}  // namespace cat1
