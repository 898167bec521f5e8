#include "cat1/convex.hpp"

#include <algorithm>
#include <cmath>

namespace cat1 {

namespace {

constexpr scalar_t kRestoreTol = 1e-12;

/// Deterministic coarse grid over the whole space. S^2 uses a Fibonacci
/// lattice; higher sphere dimensions fall back to a fixed-seed Gaussian cloud.
std::vector<SpacePoint> coarse_grid(const ModelSpace& space, int n) {
  std::vector<SpacePoint> pts;
  pts.reserve(static_cast<size_t>(n));
  if (space.kind == ModelSpace::Kind::Segment) {
    for (int i = 0; i < n; ++i) {
      const scalar_t t = (n == 1) ? 0.5 : static_cast<scalar_t>(i) / (n - 1);
      pts.push_back(SpacePoint::scalar(space.lo + t * (space.hi - space.lo)));
    }
    return pts;
  }
  if (space.dim == 2) {
    const scalar_t golden = (1.0 + std::sqrt(5.0)) / 2.0;
    for (int i = 0; i < n; ++i) {
      const scalar_t z = 1.0 - 2.0 * (i + 0.5) / n;
      const scalar_t r = std::sqrt(std::max(0.0, 1.0 - z * z));
      const scalar_t phi = 2.0 * kPi * i / golden;
      vector_t v(3);
      v << r * std::cos(phi), r * std::sin(phi), z;
      v.normalize();
      pts.emplace_back(std::move(v));
    }
    return pts;
  }
  rng_t rng(0x9e3779b97f4a7c15ull);
  for (int i = 0; i < n; ++i) pts.push_back(sample_uniform(space, rng));
  return pts;
}

scalar_t grid_spacing(const ModelSpace& space, int n) {
  if (space.kind == ModelSpace::Kind::Segment)
    return (space.hi - space.lo) / std::max(1, n - 1);
  return std::sqrt(4.0 * kPi / std::max(1, n));
}

}  // namespace

void SolverSettings::validate() const {
  if (coarse_grid_points <= 0 || refine_tolerance <= 0.0 || max_refine_iters <= 0)
    throw std::invalid_argument("SolverSettings: all fields must be positive");
}

ConvexSetHandle ConvexSetHandle::cap(Cap c) {
  if (!(c.radius >= 0.0 && c.radius < kPi / 2))
    throw std::invalid_argument("cap radius must lie in [0, pi/2)");
  ConvexSetHandle s;
  s.kind = Kind::Cap;
  s.caps.push_back(std::move(c));
  s.witness = s.caps.front().center;
  return s;
}

ConvexSetHandle ConvexSetHandle::intersection(const ModelSpace& space,
                                              std::vector<Cap> caps,
                                              const SpacePoint& witness) {
  if (caps.empty()) throw std::invalid_argument("intersection of zero caps");
  ConvexSetHandle s;
  s.kind = Kind::Intersection;
  s.caps = std::move(caps);
  s.witness = witness;
  for (const Cap& c : s.caps) {
    if (!(c.radius >= 0.0 && c.radius < kPi / 2))
      throw std::invalid_argument("cap radius must lie in [0, pi/2)");
    if (dist(space, witness, c.center) > c.radius + 1e-10)
      throw std::invalid_argument("intersection witness is not a member");
  }
  return s;
}

ConvexSetHandle ConvexSetHandle::interval(scalar_t lo, scalar_t hi) {
  if (!(lo <= hi)) throw std::invalid_argument("interval requires lo <= hi");
  ConvexSetHandle s;
  s.kind = Kind::Interval;
  s.lo = lo;
  s.hi = hi;
  s.witness = SpacePoint::scalar((lo + hi) / 2);
  return s;
}

bool ConvexSetHandle::contains(const ModelSpace& space, const SpacePoint& p,
                               scalar_t tol) const {
  if (kind == Kind::Interval)
    return p.value() >= lo - tol && p.value() <= hi + tol;
  for (const Cap& c : caps)
    if (dist(space, p, c.center) > c.radius + tol) return false;
  return true;
}

SpacePoint ConvexSetHandle::restore(const ModelSpace& space, const SpacePoint& p) const {
  if (kind == Kind::Interval)
    return SpacePoint::scalar(std::clamp(p.value(), lo, hi));
  if (kind == Kind::Cap) return project_cap(space, caps.front(), p);
  SpacePoint y = p;
  for (int round = 0; round < 200; ++round) {
    bool moved = false;
    for (const Cap& c : caps) {
      if (dist(space, y, c.center) > c.radius + kRestoreTol) {
        y = project_cap(space, c, y);
        moved = true;
      }
    }
    if (!moved) return y;
  }
  return y;  // caller re-checks membership
}

SpacePoint project_cap(const ModelSpace& space, const Cap& cap, const SpacePoint& x) {
  space.require_valid(x, "project_cap");
  const scalar_t d = dist(space, cap.center, x);
  if (d <= cap.radius) return x;
  if (d >= kPi - 1e-9)
    throw std::invalid_argument("project_cap: point antipodal to cap center");
  // Point on [center, x] at distance radius from the center.
  return combine(space, 1.0 - cap.radius / d, cap.center, x);
}

ArgminResult argmin(const ModelSpace& space,
                    const std::function<scalar_t(const SpacePoint&)>& objective,
                    const SolverSettings& settings,
                    const std::optional<ConvexSetHandle>& feasible,
                    const std::vector<SpacePoint>& hints) {
  settings.validate();
  ArgminResult best;

  auto consider = [&](const SpacePoint& p) {
    if (feasible && !feasible->contains(space, p)) return;
    const scalar_t v = objective(p);
    if (v < best.value) {
      best.value = v;
      best.point = p;
    }
  };

  for (const SpacePoint& p : coarse_grid(space, settings.coarse_grid_points)) consider(p);
  if (feasible) consider(feasible->witness);
  for (const SpacePoint& h : hints) consider(h);
  best.grid_value = best.value;
  if (!std::isfinite(best.value))
    throw SolverFailure("argmin: no feasible grid point with finite objective");

  SpacePoint y = best.point;
  scalar_t fy = best.value;
  scalar_t step = 2.0 * grid_spacing(space, settings.coarse_grid_points);
  Eigen::MatrixXd basis = tangent_basis(space, y);

  for (int iter = 0; iter < settings.max_refine_iters && step > settings.refine_tolerance;
       ++iter) {
    bool improved = false;
    for (Eigen::Index k = 0; k < basis.cols(); ++k) {
      for (scalar_t sgn : {1.0, -1.0}) {
        SpacePoint cand = geodesic_step(space, y, sgn * basis.col(k), step);
        if (feasible) {
          cand = feasible->restore(space, cand);
          if (!feasible->contains(space, cand)) continue;
        }
        const scalar_t fc = objective(cand);
        if (fc < fy) {
          y = std::move(cand);
          fy = fc;
          basis = tangent_basis(space, y);
          improved = true;
        }
      }
    }
    if (!improved) step /= 2.0;
  }

  best.point = std::move(y);
  best.value = fy;
  return best;
}

SpacePoint project_convex(const ModelSpace& space, const ConvexSetHandle& set,
                          const SpacePoint& x, const SolverSettings& settings) {
  space.require_valid(x, "project_convex");
  switch (set.kind) {
    case ConvexSetHandle::Kind::Cap:
      return project_cap(space, set.caps.front(), x);
    case ConvexSetHandle::Kind::Interval:
      return SpacePoint::scalar(std::clamp(x.value(), set.lo, set.hi));
    case ConvexSetHandle::Kind::Intersection: {
      if (set.contains(space, x)) return x;
      std::vector<SpacePoint> hints;
      hints.push_back(set.witness);
      for (const Cap& c : set.caps) hints.push_back(project_cap(space, c, x));
      auto objective = [&](const SpacePoint& y) { return dist(space, x, y); };
      return argmin(space, objective, settings, set, hints).point;
    }
  }
  throw std::logic_error("project_convex: unknown set kind");
}

namespace {

scalar_t penalty_tansin(scalar_t d) {
  if (d >= kPi / 2 - 1e-9) return kInf;
  return std::tan(d) * std::sin(d);
}

scalar_t penalty_logcos(scalar_t d) {
  if (d >= kPi / 2 - 1e-9) return kInf;
  return -std::log(std::cos(d));
}

SpacePoint resolvent_impl(const ModelSpace& space, const ConvexFunctionHandle& f,
                          const SpacePoint& x, const SolverSettings& settings,
                          scalar_t (*penalty)(scalar_t)) {
  space.require_valid(x, "resolvent");
  if (!f.value) throw std::invalid_argument("resolvent: function has no evaluator");
  auto objective = [&](const SpacePoint& y) {
    const scalar_t fv = f.value(y);
    if (!(fv < kInf)) return kInf;
    const scalar_t p = penalty(dist(space, y, x));
    if (!(p < kInf)) return kInf;
    return fv + p;
  };
  std::vector<SpacePoint> hints;
  if (!f.feasible_set) hints.push_back(x);
  return argmin(space, objective, settings, f.feasible_set, hints).point;
}

}  // namespace

SpacePoint resolvent_tansin(const ModelSpace& space, const ConvexFunctionHandle& f,
                            const SpacePoint& x, const SolverSettings& settings) {
  return resolvent_impl(space, f, x, settings, &penalty_tansin);
}

SpacePoint resolvent_logcos(const ModelSpace& space, const ConvexFunctionHandle& f,
                            const SpacePoint& x, const SolverSettings& settings) {
  return resolvent_impl(space, f, x, settings, &penalty_logcos);
}

namespace {

void require_proper(const ModelSpace& space, const ConvexFunctionHandle& f) {
  if (f.feasible_set && f.value(f.feasible_set->witness) < kInf) return;
  for (const SpacePoint& p : coarse_grid(space, 64))
    if (f.value(p) < kInf) return;
  for (const SpacePoint& p : f.known_argmin)
    if (f.value(p) < kInf) return;
  throw std::invalid_argument("convex function is not proper on the probe grid");
}

}  // namespace

ConvexFunctionHandle indicator_of(const ModelSpace& space, const ConvexSetHandle& set) {
  ConvexFunctionHandle f;
  f.label = "indicator";
  f.feasible_set = set;
  f.value = [space, set](const SpacePoint& y) {
    return set.contains(space, y) ? 0.0 : kInf;
  };
  require_proper(space, f);
  return f;
}

ConvexFunctionHandle distance_to(const ModelSpace& space, const SpacePoint& c) {
  space.require_valid(c, "distance_to");
  ConvexFunctionHandle f;
  f.label = "distance_to";
  f.known_argmin = {c};
  f.value = [space, c](const SpacePoint& y) { return dist(space, y, c); };
  return f;
}

ConvexFunctionHandle weighted_sum(std::vector<ConvexFunctionHandle> terms,
                                  std::vector<scalar_t> weights,
                                  std::vector<SpacePoint> known_argmin) {
  if (terms.empty() || terms.size() != weights.size())
    throw std::invalid_argument("weighted_sum: terms and weights must match and be nonempty");
  for (scalar_t w : weights)
    if (w < 0.0) throw std::invalid_argument("weighted_sum: weights must be nonnegative");
  ConvexFunctionHandle f;
  f.label = "weighted_sum";
  f.known_argmin = std::move(known_argmin);
  for (const ConvexFunctionHandle& t : terms)
    if (t.feasible_set && !f.feasible_set) f.feasible_set = t.feasible_set;
  f.value = [terms = std::move(terms), weights = std::move(weights)](const SpacePoint& y) {
    scalar_t acc = 0.0;
    for (size_t i = 0; i < terms.size(); ++i) {
      const scalar_t v = terms[i].value(y);
      if (!(v < kInf)) return kInf;
      acc += weights[i] * v;
    }
    return acc;
  };
  return f;
}

}  // namespace cat1
