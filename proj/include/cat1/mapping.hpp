#pragma once

#include "cat1/convex.hpp"
#include "cat1/sphere_geom.hpp"
#include "cat1/types.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace cat1 {

/// A self-map of the model space. Property flags are declarative: they are
/// set by constructors that know the mapping class, never verified at
/// runtime (sampled_quasinonexpansive_check is a falsifier, not a verifier).
struct MappingHandle {
  std::function<SpacePoint(const SpacePoint&)> map;
  std::string label;
  bool quasinonexpansive = false;
  bool delta_demiclosed = false;
  std::vector<SpacePoint> fixed_points;        // declared finite fixed set, if any
  std::optional<ConvexSetHandle> fixed_set;    // declared convex fixed set, if any

  SpacePoint operator()(const SpacePoint& x) const { return map(x); }
};

/// Per-iteration coefficient schedule alpha_{n,i} in [a, 1-a], 0 < a < 1/2.
struct WSchedule {
  int r = 0;
  scalar_t a = 0.0;
  std::function<scalar_t(long n, int i)> alpha;  // i in 1..r

  static WSchedule constant(std::vector<scalar_t> alphas, scalar_t a);
  scalar_t at(long n, int i) const;
};

/// alpha T + (1-alpha) I as a geodesic convex combination:
/// S(x) = combine(alpha, T(x), x).
MappingHandle convex_combine_with_identity(const ModelSpace& space, scalar_t alpha,
                                           const MappingHandle& T);

/// Nested combination U_1 = a_1 T_1 + (1-a_1) I,
/// U_k = a_k T_k U_{k-1} + (1-a_k) I, W = U_r. Evaluating W(x) performs
/// exactly r inner-mapping evaluations.
MappingHandle build_w_mapping(const ModelSpace& space,
                              const std::vector<MappingHandle>& mappings,
                              const std::vector<scalar_t>& alphas);

/// Single evaluation of the nested combination without building a handle;
/// bit-identical to build_w_mapping(...)(x).
SpacePoint eval_w_mapping(const ModelSpace& space,
                          const std::vector<MappingHandle>& mappings,
                          const std::vector<scalar_t>& alphas, const SpacePoint& x);

/// [dist(T_i(x), x)] for each mapping.
std::vector<scalar_t> residuals(const ModelSpace& space,
                                const std::vector<MappingHandle>& mappings,
                                const SpacePoint& x);

struct QneReport {
  scalar_t max_violation = 0.0;  // max over samples, fixed points of d(Tx,p) - d(x,p)
  int samples = 0;
  std::uint64_t seed = 0;
  bool pass = false;  // max_violation <= 1e-10
};

/// Draws uniform random points and reports the worst quasinonexpansiveness
/// violation against the supplied fixed points.
QneReport sampled_quasinonexpansive_check(const ModelSpace& space, const MappingHandle& T,
                                          const std::vector<SpacePoint>& fixed_points,
                                          int samples, std::uint64_t seed);

/// Metric projection onto a cap, as a mapping.
MappingHandle cap_projection(const ModelSpace& space, Cap cap);

/// x -> combine(lambda, p, x); fixed set {p} for lambda > 0.
MappingHandle geodesic_contraction(const ModelSpace& space, SpacePoint p, scalar_t lambda);

/// x -> -x on a symmetric segment; quasinonexpansive with F = {0}, but not
/// strongly quasinonexpansive.
MappingHandle segment_negation(const ModelSpace& space);

}  // namespace cat1
