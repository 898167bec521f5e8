#include "cat1/halpern.hpp"

#include <doctest.h>

#include <cmath>

using namespace cat1;

namespace {

const ModelSpace S2 = ModelSpace::sphere(2);
const SpacePoint e1 = SpacePoint::unit3(1, 0, 0);
const SpacePoint e2 = SpacePoint::unit3(0, 1, 0);

MappingHandle identity_mapping() {
  MappingHandle m;
  m.label = "identity";
  m.quasinonexpansive = true;
  m.delta_demiclosed = true;
  m.map = [](const SpacePoint& x) { return x; };
  return m;
}

std::vector<MappingHandle> three_cap_projections() {
  return {
      cap_projection(S2, Cap{SpacePoint::unit3(1.0, 0.3, 0.0), 0.5}),
      cap_projection(S2, Cap{SpacePoint::unit3(1.0, -0.3, 0.1), 0.5}),
      cap_projection(S2, Cap{SpacePoint::unit3(1.0, 0.0, -0.3), 0.5}),
  };
}

}  // namespace

TEST_CASE("beta schedules") {
  const BetaSchedule half = BetaSchedule::power_law(0.5);
  CHECK(half.at(1) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(half.sum_diverges);
  CHECK(half.sum_of_squares_diverges);

  const BetaSchedule one = BetaSchedule::power_law(1.0);
  CHECK(one.sum_diverges);
  CHECK_FALSE(one.sum_of_squares_diverges);

  CHECK_THROWS_AS(BetaSchedule::power_law(0.0), std::invalid_argument);
  CHECK_THROWS_AS(BetaSchedule::power_law(1.5), std::invalid_argument);
  CHECK_THROWS_AS(BetaSchedule::explicit_list({0.5, 1.5}).at(2), std::invalid_argument);
}

TEST_CASE("halpern step") {
  const MappingHandle id = identity_mapping();

  SUBCASE("anchor equal to iterate is fixed") {
    CHECK(dist(S2, halpern_step(S2, e1, e1, id, 0.5), e1) <= 1e-14);
  }

  SUBCASE("identity mapping pulls toward the anchor by the distance law") {
    const SpacePoint next = halpern_step(S2, e1, e2, id, 0.5);
    CHECK(dist(S2, e1, next) == doctest::Approx(0.5 * dist(S2, e1, e2)).epsilon(1e-10));
  }

  SUBCASE("matches independent recomputation for a cap family") {
    const std::vector<MappingHandle> family = three_cap_projections();
    const std::vector<scalar_t> alphas = {0.5, 0.5, 0.5};
    const MappingHandle w = build_w_mapping(S2, family, alphas);
    const SpacePoint x1 = SpacePoint::unit3(0.6, 0.7, 0.2);
    const scalar_t beta1 = 1.0 / std::sqrt(2.0);
    const SpacePoint step = halpern_step(S2, e1, x1, w, beta1);
    const SpacePoint recomputed =
        combine(S2, beta1, e1, eval_w_mapping(S2, family, alphas, x1));
    CHECK(step.coords == recomputed.coords);
  }

  CHECK_THROWS_AS(halpern_step(S2, e1, e2, id, 0.0), std::invalid_argument);
}

TEST_CASE("gamma/t diagnostics") {
  SUBCASE("gamma at beta=0.5, D=1") {
    const SpacePoint w_image = combine(S2, 0.0, e1, SpacePoint::unit3(std::cos(1.0), std::sin(1.0), 0));
    const GammaT gt = diagnostics_gamma_t(S2, e1, w_image, 0.5, e1);
    CHECK(gt.gamma == doctest::Approx(1.0 - std::sin(0.5) / std::sin(1.0)).epsilon(1e-12));
    CHECK(gt.gamma == doctest::Approx(0.43025).epsilon(1e-4));
  }

  SUBCASE("D -> 0 limit gives gamma -> beta") {
    const SpacePoint near = SpacePoint::unit3(1.0, 1e-16, 0.0);
    const GammaT gt = diagnostics_gamma_t(S2, e1, near, 0.3, e2);
    CHECK(gt.gamma == doctest::Approx(0.3).epsilon(1e-9));
  }

  SUBCASE("gamma in (0,1) and above beta cos D on sampled inputs") {
    rng_t rng(8);
    std::uniform_real_distribution<scalar_t> unit(0.01, 0.99);
    for (int i = 0; i < 2000; ++i) {
      const scalar_t beta = unit(rng);
      const SpacePoint w_image = sample_in_ball(S2, e1, kPi / 2 - 0.01, rng);
      const scalar_t D = dist(S2, e1, w_image);
      const GammaT gt = diagnostics_gamma_t(S2, e1, w_image, beta, e2);
      CHECK(gt.gamma > 0.0);
      CHECK(gt.gamma < 1.0);
      CHECK(gt.gamma >= beta * std::cos(D) - 1e-12);
    }
  }

  SUBCASE("u = p makes t nonpositive when the denominator is at least one") {
    rng_t rng(12);
    std::uniform_real_distribution<scalar_t> unit(0.01, 0.99);
    for (int i = 0; i < 2000; ++i) {
      const scalar_t beta = unit(rng);
      const SpacePoint w_image = sample_in_ball(S2, e1, kPi / 2 - 0.01, rng);
      const scalar_t D = dist(S2, e1, w_image);
      const GammaT gt = diagnostics_gamma_t(S2, e1, w_image, beta, e1);
      const scalar_t denom = std::sin(D) * std::tan(0.5 * beta * D) + std::cos(D);
      if (denom >= 1.0) CHECK(gt.t <= 1e-12);
    }
  }

  SUBCASE("undefined beyond pi/2") {
    const SpacePoint far = SpacePoint::unit3(-0.2, 1.0, 0.0);
    REQUIRE(dist(S2, e1, far) >= kPi / 2);
    CHECK_THROWS_AS(diagnostics_gamma_t(S2, e1, far, 0.5, e1), std::invalid_argument);
  }
}

TEST_CASE("condition report") {
  HalpernProblem p;
  p.space = ModelSpace::sphere(2, 1.4);
  p.mappings = {identity_mapping()};
  p.w_schedule = WSchedule::constant({0.5}, 0.4);
  p.u = e1;
  p.x1 = e1;

  SUBCASE("(c) via the power law exponent") {
    p.beta = BetaSchedule::power_law(0.5);
    CHECK(check_conditions(p).c);
    p.beta = BetaSchedule::power_law(1.0);
    CHECK_FALSE(check_conditions(p).c);
  }

  SUBCASE("(a) via the configured diameter bound") {
    p.beta = BetaSchedule::power_law(0.5);
    CHECK(check_conditions(p).a);
    p.space = ModelSpace::sphere(2);
    CHECK_FALSE(check_conditions(p).a);
  }

  SUBCASE("(b) arithmetic: 0.7 < pi/4 and 1.4 < pi/2") {
    p.beta = BetaSchedule::power_law(0.5);
    const SpacePoint target = e1;
    p.u = geodesic_step(S2, target, tangent_basis(S2, target).col(0), 0.7);
    p.x1 = geodesic_step(S2, target, tangent_basis(S2, target).col(1), 0.7);
    p.oracle_target = target;
    CHECK(check_conditions(p).b);
    p.u = geodesic_step(S2, target, tangent_basis(S2, target).col(0), 0.8);
    CHECK_FALSE(check_conditions(p).b);  // 0.8 > pi/4
  }
}

TEST_CASE("run: identity family converges to the anchor") {
  HalpernProblem p;
  p.space = S2;
  p.mappings = {identity_mapping()};
  p.w_schedule = WSchedule::constant({0.5}, 0.4);
  p.beta = BetaSchedule::power_law(0.5);
  p.u = e1;
  p.x1 = e2;
  p.oracle_target = e1;  // F = X, so P_F u = u
  p.max_iters = 2000000;
  p.stop_tolerance = 1e-6;
  p.trace_stride = 1000;

  const RunResult res = run(p);
  CHECK(res.converged);
  CHECK(dist(S2, res.final_point, e1) <= 1e-6);
  CHECK(res.diagnostics.min_lyap_slack >= -1e-10);
  CHECK(res.diagnostics.min_fejer_slack >= -1e-12);
  CHECK(res.diagnostics.max_bound_excess <= 1e-9);
}

TEST_CASE("run: segment negation converges to zero") {
  const ModelSpace seg = ModelSpace::segment(-0.7, 0.7);
  HalpernProblem p;
  p.space = seg;
  p.mappings = {segment_negation(seg)};
  p.w_schedule = WSchedule::constant({0.5}, 0.4);
  p.beta = BetaSchedule::power_law(0.5);
  p.u = SpacePoint::scalar(0.5);
  p.x1 = SpacePoint::scalar(0.5);
  p.oracle_target = SpacePoint::scalar(0.0);  // F(T) = {0}
  p.max_iters = 60000000;
  p.stop_tolerance = 1e-4;
  p.trace_stride = 100000;

  const RunResult res = run(p);
  CHECK(res.converged);
  CHECK(std::abs(res.final_point.value()) <= 1e-4);
  // W x = midpoint of x and -x = 0, so x_{n+1} = beta_n u exactly.
  CHECK(res.diagnostics.min_lyap_slack >= -1e-10);
}

TEST_CASE("run: three caps reach the oracle target") {
  HalpernProblem p;
  p.space = S2;
  p.mappings = three_cap_projections();
  p.w_schedule = WSchedule::constant({0.5, 0.5, 0.5}, 0.4);
  p.beta = BetaSchedule::power_law(0.5);
  rng_t rng(21);
  p.u = sample_in_ball(S2, e1, 0.4, rng);
  p.x1 = sample_in_ball(S2, e1, 0.4, rng);

  // Independent oracle: Picard iteration of the cyclic projection, then
  // metric projection of u by dense sampling of the intersection.
  SpacePoint probe = p.u;
  for (int k = 0; k < 5000; ++k) {
    SpacePoint next = probe;
    for (const MappingHandle& m : p.mappings) next = m(next);
    probe = next;
  }
  scalar_t best = kInf;
  SpacePoint target = probe;
  rng_t rng2(22);
  for (int i = 0; i < 400000; ++i) {
    const SpacePoint q = sample_in_ball(S2, probe, 0.6, rng2);
    bool member = true;
    for (const MappingHandle& m : p.mappings)
      if (!m.fixed_set->contains(S2, q, 1e-12)) {
        member = false;
        break;
      }
    if (!member) continue;
    const scalar_t d = dist(S2, p.u, q);
    if (d < best) {
      best = d;
      target = q;
    }
  }
  p.oracle_target = target;
  p.max_iters = 200000;
  p.stop_tolerance = 5e-3;
  p.trace_stride = 100;

  const RunResult res = run(p);
  CHECK(res.converged);
  CHECK(dist(S2, res.final_point, target) <= 5e-3);
  // Sampled oracle is only ~1e-3 accurate, so allow that much slack in the
  // per-step inequalities.
  CHECK(res.diagnostics.min_lyap_slack >= -1e-5);
  CHECK(res.diagnostics.min_fejer_slack >= -1e-5);

  const TailResidualReport tail = tail_residual_report(S2, res, p.mappings);
  CHECK(tail.pass);
}

TEST_CASE("run: determinism") {
  HalpernProblem p;
  p.space = S2;
  p.mappings = three_cap_projections();
  p.w_schedule = WSchedule::constant({0.5, 0.5, 0.5}, 0.4);
  p.beta = BetaSchedule::power_law(0.5);
  p.u = SpacePoint::unit3(0.9, 0.3, 0.1);
  p.x1 = SpacePoint::unit3(0.9, -0.2, 0.2);
  p.oracle_target = e1;
  p.max_iters = 500;
  p.stop_tolerance = 1e-12;

  const RunResult a = run(p);
  const RunResult b = run(p);
  REQUIRE(a.trace.size() == b.trace.size());
  for (size_t i = 0; i < a.trace.size(); ++i)
    CHECK(a.trace[i].x.coords == b.trace[i].x.coords);
  CHECK(a.final_point.coords == b.final_point.coords);
}

TEST_CASE("run: validation and non-convergence exit") {
  HalpernProblem p;
  p.space = S2;
  p.mappings = {identity_mapping()};
  p.w_schedule = WSchedule::constant({0.5}, 0.4);
  p.beta = BetaSchedule::power_law(0.5);
  p.u = e1;
  p.x1 = e2;
  p.oracle_target = e1;
  p.max_iters = 10;
  p.stop_tolerance = 1e-12;

  const RunResult res = run(p);
  CHECK_FALSE(res.converged);
  CHECK(res.stop_reason == "max_iters");
  CHECK(res.iterations == 10);

  p.mappings.clear();
  CHECK_THROWS_AS(run(p), std::invalid_argument);
}
