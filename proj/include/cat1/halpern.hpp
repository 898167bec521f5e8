#pragma once

#include "cat1/mapping.hpp"
#include "cat1/types.hpp"

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace cat1 {

inline constexpr scalar_t kNaN = std::numeric_limits<scalar_t>::quiet_NaN();

/// Anchor weights beta_n in (0, 1). PowerLaw(q) emits (n+1)^{-q} with
/// divergence flags set symbolically; explicit lists carry no asymptotic
/// guarantee and leave both flags false.
struct BetaSchedule {
  enum class Kind { PowerLaw, ExplicitList, Custom };

  Kind kind = Kind::PowerLaw;
  scalar_t q = 0.5;
  std::vector<scalar_t> values;
  std::function<scalar_t(long)> custom;
  bool sum_diverges = false;
  bool sum_of_squares_diverges = false;

  static BetaSchedule power_law(scalar_t q);
  static BetaSchedule explicit_list(std::vector<scalar_t> values);
  static BetaSchedule custom_rule(std::function<scalar_t(long)> rule, bool sum_diverges,
                                  bool sum_of_squares_diverges);

  /// beta_n for n = 1, 2, ...; throws if the emitted value leaves (0, 1).
  scalar_t at(long n) const;
};

struct HalpernProblem {
  ModelSpace space;
  std::vector<MappingHandle> mappings;
  WSchedule w_schedule;
  BetaSchedule beta;
  SpacePoint u;
  SpacePoint x1;
  std::optional<SpacePoint> oracle_target;  // P_F u, when known
  long max_iters = 100000;
  scalar_t stop_tolerance = 1e-6;
  long trace_stride = 1;  // record every k-th step; diagnostics still run every step
};

/// Per-step record. Diagnostic fields are NaN when no oracle target is set
/// or when d(u, W_n x_n) >= pi/2 (where gamma/t are undefined).
struct TraceRow {
  long n = 0;
  scalar_t beta = kNaN;
  SpacePoint x;                    // x_n, the point the step starts from
  scalar_t d_oracle = kNaN;        // d(x_n, p)
  scalar_t s = kNaN;               // 1 - cos d(x_n, p)
  scalar_t gamma = kNaN;
  scalar_t t = kNaN;
  scalar_t lyap_slack = kNaN;      // (1-gamma) s_n + gamma t_n - s_{n+1}
  std::vector<scalar_t> residuals; // d(T_i x_n, x_n), on recorded rows
  scalar_t d_u_w = kNaN;           // d(u, W_n x_n)
};

struct ConditionReport {
  bool a = false;  // configured diameter bound below pi/2
  bool b = false;  // d(u,p) < pi/4 and d(u,p) + d(x1,p) < pi/2
  bool c = false;  // sum of beta_n^2 diverges
  bool any() const { return a || b || c; }
};

/// Step-by-step aggregates of the convergence inequalities, maintained over
/// every iteration regardless of trace stride.
struct DiagnosticAggregates {
  scalar_t min_lyap_slack = kInf;
  scalar_t min_fejer_slack = kInf;       // cos d(x_{n+1},p) - min{cos d(u,p), cos d(x_n,p)}
  scalar_t max_bound_excess = -kInf;     // d(x_n,p) - max{d(u,p), d(x_1,p)}
  scalar_t min_gamma = kInf;
  scalar_t max_gamma = -kInf;
  scalar_t min_gamma_minus_beta_sq_bound = kInf;  // gamma_n - beta_n^2 pi^2 / 16
  scalar_t min_gamma_over_beta = kInf;            // for the beta_n cos(M) bound
  scalar_t max_d_u_w = -kInf;                     // M, the max observed d(u, W_n x_n)
  long undefined_gamma_steps = 0;                 // steps with d(u, W_n x_n) >= pi/2
};

struct RunResult {
  std::vector<TraceRow> trace;
  long trace_stride = 1;
  SpacePoint final_point;
  long iterations = 0;
  bool converged = false;
  std::string stop_reason;
  scalar_t final_d_oracle = kNaN;
  ConditionReport conditions;
  DiagnosticAggregates diagnostics;
};

/// One Halpern step: combine(beta_n, u, W(x)).
SpacePoint halpern_step(const ModelSpace& space, const SpacePoint& u, const SpacePoint& x,
                        const MappingHandle& W, scalar_t beta_n);

/// gamma_n and t_n from the anchor u, the image W_n x_n, beta_n and the
/// oracle target p. Requires d(u, w_image) < pi/2.
struct GammaT {
  scalar_t gamma = kNaN;
  scalar_t t = kNaN;
};
GammaT diagnostics_gamma_t(const ModelSpace& space, const SpacePoint& u,
                           const SpacePoint& w_image, scalar_t beta_n,
                           const SpacePoint& p);

ConditionReport check_conditions(const HalpernProblem& problem);

RunResult run(const HalpernProblem& problem);

struct TailResidualReport {
  scalar_t max_residual = 0.0;  // max_i d(T_i x_n, x_n) over the final 10% of recorded rows
  scalar_t threshold = 1e-2;
  long rows_examined = 0;
  bool pass = false;
};

/// Asymptotic-regularity check over the tail of a converged trace: the
/// mapping residuals must vanish along the iteration.
TailResidualReport tail_residual_report(const ModelSpace& space, const RunResult& result,
                                        const std::vector<MappingHandle>& mappings,
                                        scalar_t threshold = 1e-2);

}  // namespace cat1
