#include "cat1/convex.hpp"
#include "cat1/mapping.hpp"

#include <doctest.h>

#include <cmath>

using namespace cat1;

namespace {

const ModelSpace S2 = ModelSpace::sphere(2);
const SpacePoint e1 = SpacePoint::unit3(1, 0, 0);
const SpacePoint e2 = SpacePoint::unit3(0, 1, 0);

SolverSettings test_settings() {
  SolverSettings s;
  s.coarse_grid_points = 2000;
  s.refine_tolerance = 1e-9;
  s.max_refine_iters = 500;
  return s;
}

// Brute-force nearest point over a dense sample of a cap, independent of the
// projection/solver code path.
SpacePoint grid_nearest_in_cap(const Cap& cap, const SpacePoint& x, int n) {
  rng_t rng(424242);
  SpacePoint best = cap.center;
  scalar_t best_d = dist(S2, x, best);
  for (int i = 0; i < n; ++i) {
    const SpacePoint q = sample_in_ball(S2, cap.center, cap.radius, rng);
    const scalar_t d = dist(S2, x, q);
    if (d < best_d) {
      best_d = d;
      best = q;
    }
  }
  return best;
}

}  // namespace

TEST_CASE("project_cap analytic form") {
  const Cap cap{e1, 0.5};

  SUBCASE("interior points are fixed") {
    rng_t rng(1);
    for (int i = 0; i < 50; ++i) {
      const SpacePoint x = sample_in_ball(S2, e1, 0.5, rng);
      CHECK(dist(S2, project_cap(S2, cap, x), x) <= 1e-14);
    }
  }

  SUBCASE("e2 projects to the boundary point toward e1") {
    const SpacePoint p = project_cap(S2, cap, e2);
    CHECK(p.coords[0] == doctest::Approx(std::cos(0.5)).epsilon(1e-12));
    CHECK(p.coords[1] == doctest::Approx(std::sin(0.5)).epsilon(1e-12));
    CHECK(std::abs(p.coords[2]) <= 1e-14);
    // Dense-sample cross-check of optimality.
    const SpacePoint brute = grid_nearest_in_cap(cap, e2, 20000);
    CHECK(dist(S2, e2, p) <= dist(S2, e2, brute) + 1e-9);
  }

  SUBCASE("zero radius cap is the singleton center") {
    const Cap point_cap{e1, 0.0};
    CHECK(dist(S2, project_cap(S2, point_cap, e2), e1) <= 1e-14);
  }

  SUBCASE("antipodal input rejected") {
    CHECK_THROWS_AS(project_cap(S2, cap, SpacePoint::unit3(-1, 0, 0)),
                    std::invalid_argument);
  }
}

TEST_CASE("projection properties (sampled)") {
  const Cap cap{e1, 0.6};
  const ConvexSetHandle set = ConvexSetHandle::cap(cap);
  rng_t rng(2);

  SUBCASE("idempotence") {
    for (int i = 0; i < 200; ++i) {
      const SpacePoint x = sample_uniform(S2, rng);
      if (dist(S2, x, e1) > kPi - 1e-3) continue;
      const SpacePoint p = project_convex(S2, set, x, test_settings());
      CHECK(dist(S2, project_convex(S2, set, p, test_settings()), p) <= 1e-9);
    }
  }

  SUBCASE("quasinonexpansiveness toward members") {
    for (int i = 0; i < 10000; ++i) {
      const SpacePoint x = sample_uniform(S2, rng);
      if (dist(S2, x, e1) > kPi - 1e-3) continue;
      const SpacePoint p = project_cap(S2, cap, x);
      const SpacePoint member = sample_in_ball(S2, e1, 0.6, rng);
      CHECK(dist(S2, p, member) <= dist(S2, x, member) + 1e-10);
    }
  }

  SUBCASE("variational characterization against a boundary grid") {
    const SpacePoint x = SpacePoint::unit3(0.1, 0.8, 0.5);
    const SpacePoint p = project_cap(S2, cap, x);
    // Boundary circle of the cap, parametrized around e1.
    const Eigen::MatrixXd basis = tangent_basis(S2, e1);
    for (int k = 0; k < 720; ++k) {
      const scalar_t phi = 2 * kPi * k / 720;
      const Eigen::VectorXd v = std::cos(phi) * basis.col(0) + std::sin(phi) * basis.col(1);
      const SpacePoint boundary = geodesic_step(S2, e1, v, 0.6);
      CHECK(dist(S2, x, p) <= dist(S2, x, boundary) + 1e-9);
    }
  }
}

TEST_CASE("project_convex on intersections") {
  const Cap a{SpacePoint::unit3(1.0, 0.25, 0.0), 0.5};
  const Cap b{SpacePoint::unit3(1.0, -0.25, 0.0), 0.5};
  const ConvexSetHandle inter = ConvexSetHandle::intersection(S2, {a, b}, e1);

  SUBCASE("members are fixed") {
    CHECK(dist(S2, project_convex(S2, inter, e1, test_settings()), e1) <= 1e-9);
  }

  SUBCASE("point in one cap only lands on the violated cap's boundary") {
    const SpacePoint inside_a_outside_b = [&] {
      rng_t rng(77);
      while (true) {
        const SpacePoint q = sample_in_ball(S2, a.center, 0.5, rng);
        if (dist(S2, q, b.center) > b.radius + 0.05) return q;
      }
    }();
    const SpacePoint p = project_convex(S2, inter, inside_a_outside_b, test_settings());
    CHECK(inter.contains(S2, p));
    CHECK(std::abs(dist(S2, p, b.center) - b.radius) <= 1e-6);

    // Brute-force oracle: dense sample of the intersection.
    rng_t rng(99);
    scalar_t brute = kInf;
    for (int i = 0; i < 200000; ++i) {
      const SpacePoint q = sample_in_ball(S2, e1, 0.8, rng);
      if (!inter.contains(S2, q)) continue;
      brute = std::min(brute, dist(S2, inside_a_outside_b, q));
    }
    CHECK(dist(S2, inside_a_outside_b, p) <= brute + 1e-4);
  }

  SUBCASE("witness validation") {
    CHECK_THROWS_AS(ConvexSetHandle::intersection(S2, {a, b}, e2), std::invalid_argument);
  }
}

TEST_CASE("segment interval projection clamps") {
  const ModelSpace seg = ModelSpace::segment(-1.0, 1.0);
  const ConvexSetHandle set = ConvexSetHandle::interval(-0.7, 0.7);
  CHECK(project_convex(seg, set, SpacePoint::scalar(0.9), test_settings()).value() ==
        doctest::Approx(0.7).epsilon(1e-15));
  CHECK(project_convex(seg, set, SpacePoint::scalar(0.2), test_settings()).value() ==
        doctest::Approx(0.2).epsilon(1e-15));
}

TEST_CASE("resolvents") {
  const SolverSettings settings = test_settings();

  SUBCASE("zero function returns the anchor") {
    ConvexFunctionHandle zero;
    zero.label = "zero";
    zero.value = [](const SpacePoint&) { return 0.0; };
    rng_t rng(4);
    for (int i = 0; i < 10; ++i) {
      const SpacePoint x = sample_uniform(S2, rng);
      CHECK(dist(S2, resolvent_tansin(S2, zero, x, settings), x) <= 1e-6);
      CHECK(dist(S2, resolvent_logcos(S2, zero, x, settings), x) <= 1e-6);
    }
  }

  SUBCASE("indicator resolvent equals the metric projection") {
    const Cap cap{e1, 0.5};
    const ConvexFunctionHandle ind = indicator_of(S2, ConvexSetHandle::cap(cap));
    rng_t rng(5);
    for (int i = 0; i < 40; ++i) {
      const SpacePoint x = sample_in_ball(S2, e1, 1.4, rng);
      const SpacePoint expected = project_cap(S2, cap, x);
      CHECK(dist(S2, resolvent_tansin(S2, ind, x, settings), expected) <= 1e-4);
      CHECK(dist(S2, resolvent_logcos(S2, ind, x, settings), expected) <= 1e-4);
    }
  }

  SUBCASE("distance function: anchor at the minimizer stays put") {
    const ConvexFunctionHandle f = distance_to(S2, e1);
    CHECK(dist(S2, resolvent_tansin(S2, f, e1, settings), e1) <= 1e-4);
    CHECK(dist(S2, resolvent_logcos(S2, f, e1, settings), e1) <= 1e-4);
  }

  SUBCASE("resolvent fixed points at known argmins") {
    const ConvexFunctionHandle f = distance_to(S2, e1);
    for (const SpacePoint& p : f.known_argmin) {
      CHECK(dist(S2, resolvent_tansin(S2, f, p, settings), p) <= 1e-4);
      CHECK(dist(S2, resolvent_logcos(S2, f, p, settings), p) <= 1e-4);
    }
  }

  SUBCASE("Picard iteration of the resolvent reaches the argmin") {
    const ConvexFunctionHandle f = distance_to(S2, e1);
    rng_t rng(6);
    for (int start = 0; start < 20; ++start) {
      SpacePoint z = sample_in_ball(S2, e1, 1.2, rng);
      for (int k = 0; k < 200; ++k) {
        const SpacePoint next = resolvent_tansin(S2, f, z, settings);
        if (dist(S2, next, z) < 1e-10) {
          z = next;
          break;
        }
        z = next;
      }
      CHECK(dist(S2, z, e1) <= 1e-3);
    }
  }

  SUBCASE("everywhere-infinite function fails distinctly") {
    ConvexFunctionHandle inf_fn;
    inf_fn.label = "inf";
    inf_fn.value = [](const SpacePoint&) { return kInf; };
    CHECK_THROWS_AS(resolvent_tansin(S2, inf_fn, e1, settings), SolverFailure);
  }
}

TEST_CASE("indicator function values") {
  const ConvexSetHandle set = ConvexSetHandle::cap(Cap{e1, 0.5});
  const ConvexFunctionHandle ind = indicator_of(S2, set);
  CHECK(ind(e1) == 0.0);
  CHECK(ind(e2) == kInf);
}

TEST_CASE("weighted sum propagates infinity without arithmetic on it") {
  const ConvexFunctionHandle ind = indicator_of(S2, ConvexSetHandle::cap(Cap{e1, 0.5}));
  const ConvexFunctionHandle d = distance_to(S2, e1);
  const ConvexFunctionHandle f = weighted_sum({ind, d}, {1.0, 2.0}, {e1});
  CHECK(f(e1) == 0.0);
  CHECK(f(e2) == kInf);
  CHECK(std::isfinite(f(SpacePoint::unit3(1.0, 0.2, 0.0))));
  CHECK_THROWS_AS(weighted_sum({d}, {-1.0}), std::invalid_argument);
}

TEST_CASE("set constructor validation") {
  CHECK_THROWS_AS(ConvexSetHandle::cap(Cap{e1, kPi}), std::invalid_argument);
  CHECK_THROWS_AS(ConvexSetHandle::interval(1.0, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(ConvexSetHandle::intersection(S2, {}, e1), std::invalid_argument);
}
