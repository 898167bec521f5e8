#include "cat1/mapping.hpp"

#include <cmath>

namespace cat1 {

WSchedule WSchedule::constant(std::vector<scalar_t> alphas, scalar_t a) {
  if (!(a > 0.0 && a < 0.5))
    throw std::invalid_argument("a must lie in (0, 1/2)");
  if (alphas.empty()) throw std::invalid_argument("WSchedule: empty alpha vector");
  for (scalar_t al : alphas)
    if (!(al >= a && al <= 1.0 - a))
      throw std::invalid_argument("WSchedule: alpha outside [a, 1-a]");
  WSchedule s;
  s.r = static_cast<int>(alphas.size());
  s.a = a;
  s.alpha = [alphas = std::move(alphas)](long, int i) { return alphas[i - 1]; };
  return s;
}

scalar_t WSchedule::at(long n, int i) const {
  const scalar_t v = alpha(n, i);
  if (!(v >= a && v <= 1.0 - a))
    throw std::invalid_argument("WSchedule: emitted alpha outside [a, 1-a]");
  return v;
}

MappingHandle convex_combine_with_identity(const ModelSpace& space, scalar_t alpha,
                                           const MappingHandle& T) {
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw std::invalid_argument("convex_combine_with_identity: alpha outside [0, 1]");
  if (!T.quasinonexpansive)
    throw std::invalid_argument(
        "convex_combine_with_identity: mapping not declared quasinonexpansive");
  MappingHandle s;
  s.label = "combine(" + std::to_string(alpha) + ", " + T.label + ", I)";
  s.quasinonexpansive = true;
  s.delta_demiclosed = T.delta_demiclosed && alpha > 0.0;
  s.fixed_points = T.fixed_points;
  s.fixed_set = T.fixed_set;
  s.map = [space, alpha, inner = T.map](const SpacePoint& x) {
    return combine(space, alpha, inner(x), x);
  };
  return s;
}

SpacePoint eval_w_mapping(const ModelSpace& space,
                          const std::vector<MappingHandle>& mappings,
                          const std::vector<scalar_t>& alphas, const SpacePoint& x) {
  if (mappings.empty()) throw std::invalid_argument("W-mapping: empty mapping list");
  if (mappings.size() != alphas.size())
    throw std::invalid_argument("W-mapping: mappings/alphas length mismatch");
  SpacePoint u = x;
  for (size_t k = 0; k < mappings.size(); ++k)
    u = combine(space, alphas[k], mappings[k](u), x);
  return u;
}

MappingHandle build_w_mapping(const ModelSpace& space,
                              const std::vector<MappingHandle>& mappings,
                              const std::vector<scalar_t>& alphas) {
  if (mappings.empty()) throw std::invalid_argument("build_w_mapping: empty mapping list");
  if (mappings.size() != alphas.size())
    throw std::invalid_argument("build_w_mapping: mappings/alphas length mismatch");
  for (scalar_t al : alphas)
    if (!(al >= 0.0 && al <= 1.0))
      throw std::invalid_argument("build_w_mapping: alpha outside [0, 1]");
  MappingHandle w;
  w.label = "W[r=" + std::to_string(mappings.size()) + "]";
  w.quasinonexpansive = true;
  w.delta_demiclosed = false;
  w.map = [space, mappings, alphas](const SpacePoint& x) {
    return eval_w_mapping(space, mappings, alphas, x);
  };
  return w;
}

std::vector<scalar_t> residuals(const ModelSpace& space,
                                const std::vector<MappingHandle>& mappings,
                                const SpacePoint& x) {
  std::vector<scalar_t> res;
  res.reserve(mappings.size());
  for (const MappingHandle& t : mappings) res.push_back(dist(space, t(x), x));
  return res;
}

QneReport sampled_quasinonexpansive_check(const ModelSpace& space, const MappingHandle& T,
                                          const std::vector<SpacePoint>& fixed_points,
                                          int samples, std::uint64_t seed) {
  if (fixed_points.empty())
    throw std::invalid_argument("sampled_quasinonexpansive_check: no fixed points given");
  QneReport report;
  report.samples = samples;
  report.seed = seed;
  rng_t rng(seed);
  for (int i = 0; i < samples; ++i) {
    const SpacePoint x = sample_uniform(space, rng);
    const SpacePoint tx = T(x);
    for (const SpacePoint& p : fixed_points) {
      const scalar_t v = dist(space, tx, p) - dist(space, x, p);
      report.max_violation = std::max(report.max_violation, v);
    }
  }
  report.pass = report.max_violation <= 1e-10;
  return report;
}

MappingHandle cap_projection(const ModelSpace& space, Cap cap) {
  MappingHandle m;
  m.label = "cap_projection";
  m.quasinonexpansive = true;
  m.delta_demiclosed = true;
  m.fixed_set = ConvexSetHandle::cap(cap);
  m.map = [space, cap = std::move(cap)](const SpacePoint& x) {
    return project_cap(space, cap, x);
  };
  return m;
}

MappingHandle geodesic_contraction(const ModelSpace& space, SpacePoint p, scalar_t lambda) {
  space.require_valid(p, "geodesic_contraction");
  if (!(lambda >= 0.0 && lambda <= 1.0))
    throw std::invalid_argument("geodesic_contraction: lambda outside [0, 1]");
  MappingHandle m;
  m.label = "geodesic_contraction";
  m.quasinonexpansive = true;
  m.delta_demiclosed = true;
  if (lambda > 0.0) m.fixed_points = {p};
  m.map = [space, p = std::move(p), lambda](const SpacePoint& x) {
    return combine(space, lambda, p, x);
  };
  return m;
}

MappingHandle segment_negation(const ModelSpace& space) {
  if (space.kind != ModelSpace::Kind::Segment)
    throw std::invalid_argument("segment_negation requires a segment space");
  if (std::abs(space.lo + space.hi) > 1e-12)
    throw std::invalid_argument("segment_negation requires a symmetric segment");
  MappingHandle m;
  m.label = "segment_negation";
  m.quasinonexpansive = true;
  m.delta_demiclosed = true;
  m.fixed_points = {SpacePoint::scalar(0.0)};
  m.map = [](const SpacePoint& x) { return SpacePoint::scalar(-x.value()); };
  return m;
}

}  // namespace cat1
