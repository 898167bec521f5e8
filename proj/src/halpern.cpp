#include "cat1/halpern.hpp"

#include <cmath>

namespace cat1 {

BetaSchedule BetaSchedule::power_law(scalar_t q) {
  if (!(q > 0.0 && q <= 1.0))
    throw std::invalid_argument("BetaSchedule::power_law: q must lie in (0, 1]");
  BetaSchedule b;
  b.kind = Kind::PowerLaw;
  b.q = q;
  b.sum_diverges = true;             // q <= 1
  b.sum_of_squares_diverges = q <= 0.5;
  return b;
}

BetaSchedule BetaSchedule::explicit_list(std::vector<scalar_t> values) {
  if (values.empty()) throw std::invalid_argument("BetaSchedule: empty list");
  BetaSchedule b;
  b.kind = Kind::ExplicitList;
  b.values = std::move(values);
  return b;
}

BetaSchedule BetaSchedule::custom_rule(std::function<scalar_t(long)> rule,
                                       bool sum_diverges, bool sum_of_squares_diverges) {
  BetaSchedule b;
  b.kind = Kind::Custom;
  b.custom = std::move(rule);
  b.sum_diverges = sum_diverges;
  b.sum_of_squares_diverges = sum_of_squares_diverges;
  return b;
}

scalar_t BetaSchedule::at(long n) const {
  scalar_t v;
  switch (kind) {
    case Kind::PowerLaw:
      v = std::pow(static_cast<scalar_t>(n + 1), -q);
      break;
    case Kind::ExplicitList:
      v = values[static_cast<size_t>((n - 1) % static_cast<long>(values.size()))];
      break;
    case Kind::Custom:
      v = custom(n);
      break;
    default:
      throw std::logic_error("BetaSchedule: unknown kind");
  }
  if (!(v > 0.0 && v < 1.0))
    throw std::invalid_argument("BetaSchedule: beta_n must lie in (0, 1)");
  return v;
}

SpacePoint halpern_step(const ModelSpace& space, const SpacePoint& u, const SpacePoint& x,
                        const MappingHandle& W, scalar_t beta_n) {
  if (!(beta_n > 0.0 && beta_n < 1.0))
    throw std::invalid_argument("halpern_step: beta_n must lie in (0, 1)");
  return combine(space, beta_n, u, W(x));
}

GammaT diagnostics_gamma_t(const ModelSpace& space, const SpacePoint& u,
                           const SpacePoint& w_image, scalar_t beta_n,
                           const SpacePoint& p) {
  const scalar_t D = dist(space, u, w_image);
  if (!(D < kPi / 2))
    throw std::invalid_argument("diagnostics_gamma_t: d(u, W_n x_n) >= pi/2, undefined");
  GammaT out;
  // The denominator is sin(D), not sin(beta_n D): only this reading gives the
  // D -> 0 limit gamma -> beta_n and keeps gamma in (0, 1).
  out.gamma = (D <= 1e-14) ? beta_n : 1.0 - std::sin((1.0 - beta_n) * D) / std::sin(D);
  out.t = 1.0 - std::cos(dist(space, u, p)) /
                    (std::sin(D) * std::tan(0.5 * beta_n * D) + std::cos(D));
  return out;
}

ConditionReport check_conditions(const HalpernProblem& problem) {
  ConditionReport rep;
  rep.a = problem.space.diameter_bound && *problem.space.diameter_bound < kPi / 2;
  if (problem.oracle_target) {
    const scalar_t du = dist(problem.space, problem.u, *problem.oracle_target);
    const scalar_t dx1 = dist(problem.space, problem.x1, *problem.oracle_target);
    rep.b = du < kPi / 4 && du + dx1 < kPi / 2;
  }
  rep.c = problem.beta.sum_of_squares_diverges;
  return rep;
}

namespace {

void require_finite(const SpacePoint& x, long n) {
  if (!x.coords.allFinite())
    throw std::runtime_error("halpern run: non-finite coordinates at step " +
                             std::to_string(n));
}

}  // namespace

RunResult run(const HalpernProblem& problem) {
  if (problem.mappings.empty())
    throw std::invalid_argument("halpern run: mappings list is empty");
  if (static_cast<int>(problem.mappings.size()) != problem.w_schedule.r)
    throw std::invalid_argument("halpern run: schedule width does not match mapping count");
  if (problem.trace_stride < 1)
    throw std::invalid_argument("halpern run: trace_stride must be positive");
  problem.space.require_valid(problem.u, "halpern run (u)");
  problem.space.require_valid(problem.x1, "halpern run (x1)");

  const ModelSpace& space = problem.space;
  const std::optional<SpacePoint>& p = problem.oracle_target;
  const int r = problem.w_schedule.r;

  RunResult result;
  result.trace_stride = problem.trace_stride;
  result.conditions = check_conditions(problem);
  DiagnosticAggregates& agg = result.diagnostics;

  scalar_t cos_dup = kNaN, max_dup_dx1p = kNaN;
  if (p) {
    cos_dup = std::cos(dist(space, problem.u, *p));
    max_dup_dx1p = std::max(dist(space, problem.u, *p), dist(space, problem.x1, *p));
  }

  SpacePoint x = problem.x1;
  std::vector<scalar_t> alphas(static_cast<size_t>(r));
  long n = 0;

  for (n = 1; n <= problem.max_iters; ++n) {
    const scalar_t beta_n = problem.beta.at(n);
    for (int i = 1; i <= r; ++i)
      alphas[static_cast<size_t>(i - 1)] = problem.w_schedule.at(n, i);

    const SpacePoint w_image = eval_w_mapping(space, problem.mappings, alphas, x);
    const SpacePoint x_next = combine(space, beta_n, problem.u, w_image);
    require_finite(x_next, n);

    const bool record = (n - 1) % problem.trace_stride == 0;
    TraceRow row;
    row.n = n;
    row.beta = beta_n;
    row.x = x;

    if (p) {
      const scalar_t dxp = dist(space, x, *p);
      const scalar_t dnext = dist(space, x_next, *p);
      const scalar_t s_n = 1.0 - std::cos(dxp);
      const scalar_t s_next = 1.0 - std::cos(dnext);
      row.d_oracle = dxp;
      row.s = s_n;
      row.d_u_w = dist(space, problem.u, w_image);
      agg.max_d_u_w = std::max(agg.max_d_u_w, row.d_u_w);
      agg.min_fejer_slack = std::min(
          agg.min_fejer_slack, std::cos(dnext) - std::min(cos_dup, std::cos(dxp)));
      agg.max_bound_excess =
          std::max(agg.max_bound_excess, std::max(dxp, dnext) - max_dup_dx1p);
      if (row.d_u_w < kPi / 2) {
        const GammaT gt = diagnostics_gamma_t(space, problem.u, w_image, beta_n, *p);
        row.gamma = gt.gamma;
        row.t = gt.t;
        row.lyap_slack = (1.0 - gt.gamma) * s_n + gt.gamma * gt.t - s_next;
        agg.min_lyap_slack = std::min(agg.min_lyap_slack, row.lyap_slack);
        agg.min_gamma = std::min(agg.min_gamma, gt.gamma);
        agg.max_gamma = std::max(agg.max_gamma, gt.gamma);
        agg.min_gamma_minus_beta_sq_bound =
            std::min(agg.min_gamma_minus_beta_sq_bound,
                     gt.gamma - beta_n * beta_n * kPi * kPi / 16.0);
        agg.min_gamma_over_beta = std::min(agg.min_gamma_over_beta, gt.gamma / beta_n);
      } else {
        ++agg.undefined_gamma_steps;
      }
    }

    bool stop = false;
    if (p) {
      if (dist(space, x_next, *p) < problem.stop_tolerance) {
        stop = true;
        result.converged = true;
        result.stop_reason = "oracle_tolerance";
      }
    } else if (record) {
      // Oracle-free rule: small displacement and small mapping residuals,
      // evaluated on recorded steps only.
      row.residuals = residuals(space, problem.mappings, x);
      scalar_t max_res = 0.0;
      for (scalar_t v : row.residuals) max_res = std::max(max_res, v);
      if (dist(space, x_next, x) < problem.stop_tolerance &&
          max_res < problem.stop_tolerance) {
        stop = true;
        result.converged = true;
        result.stop_reason = "residual_displacement";
      }
    }

    if (record) {
      if (row.residuals.empty())
        row.residuals = residuals(space, problem.mappings, x);
      result.trace.push_back(std::move(row));
    }

    x = x_next;
    if (stop) break;
  }

  if (!result.converged) {
    n = problem.max_iters;
    result.stop_reason = "max_iters";
  }
  result.iterations = std::min(n, problem.max_iters);

  // Terminal row: the state after the last step, so the summary's final point
  // is exactly the last trace row.
  TraceRow last;
  last.n = result.iterations + 1;
  last.x = x;
  if (p) {
    result.final_d_oracle = dist(space, x, *p);
    last.d_oracle = result.final_d_oracle;
    last.s = 1.0 - std::cos(result.final_d_oracle);
    agg.max_bound_excess =
        std::max(agg.max_bound_excess, result.final_d_oracle - max_dup_dx1p);
  }
  last.residuals = residuals(space, problem.mappings, x);
  result.trace.push_back(std::move(last));
  result.final_point = std::move(x);
  return result;
}

TailResidualReport tail_residual_report(const ModelSpace& space, const RunResult& result,
                                        const std::vector<MappingHandle>& mappings,
                                        scalar_t threshold) {
  TailResidualReport rep;
  rep.threshold = threshold;
  const long cutoff = result.iterations - result.iterations / 10;
  for (const TraceRow& row : result.trace) {
    if (row.n < cutoff) continue;
    ++rep.rows_examined;
    std::vector<scalar_t> res =
        row.residuals.empty() ? residuals(space, mappings, row.x) : row.residuals;
    for (scalar_t v : res) rep.max_residual = std::max(rep.max_residual, v);
  }
  rep.pass = rep.rows_examined > 0 && rep.max_residual <= threshold;
  return rep;
}

}  // namespace cat1
