#pragma once

#include "cat1/halpern.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace cat1 {

inline constexpr const char* kToolVersion = "0.1.0";

/// Declarative mapping spec, one entry per family member.
struct MappingSpec {
  enum class Kind { CapProjection, Resolvent, GeodesicContraction, SegmentNegation };
  enum class Penalty { TanSin, LogCos };
  enum class FunctionKind { IndicatorCap, IndicatorInterval, DistanceTo };

  Kind kind = Kind::CapProjection;
  // cap_projection / indicator_cap
  std::vector<scalar_t> center;
  scalar_t radius = 0.0;
  // resolvent
  Penalty penalty = Penalty::TanSin;
  FunctionKind function_kind = FunctionKind::IndicatorCap;
  scalar_t lo = 0.0, hi = 0.0;          // indicator_interval
  std::vector<scalar_t> point;          // distance_to / geodesic_contraction
  scalar_t lambda = 0.0;                // geodesic_contraction
};

struct OracleSpec {
  scalar_t resolution = 2e-3;        // target grid spacing, radians
  scalar_t refine_tolerance = 1e-8;
  std::optional<std::vector<scalar_t>> target;  // analytic override
};

/// Parsed experiment configuration. Unknown JSON fields are rejected.
struct ExperimentConfig {
  int schema_version = 1;
  ModelSpace space;
  std::vector<MappingSpec> mappings;
  scalar_t alpha_a = 0.0;
  std::vector<scalar_t> alpha_values;
  BetaSchedule beta;
  std::vector<scalar_t> u;
  std::vector<scalar_t> x1;
  long max_iters = 100000;
  scalar_t stop_tolerance = 1e-6;
  std::optional<OracleSpec> oracle;
  SolverSettings solver;
  std::uint64_t seed = 0;
  std::string trace_path = "trace.csv";
  std::string summary_path = "summary.json";

  std::string raw_text;     // exact file contents, for hashing
};

/// Parses and validates a config file. Throws std::invalid_argument with a
/// field diagnostic on any problem.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& text);

/// Instantiates the mappings and the Halpern problem (without oracle target).
HalpernProblem build_problem(const ExperimentConfig& config);

struct OracleResult {
  SpacePoint point;
  scalar_t distance = 0.0;       // d(u, point)
  scalar_t resolution = 0.0;     // grid spacing used (0 for analytic)
  scalar_t certified_gap = 0.0;  // best grid value minus refined value
  std::string method;
};

/// P_F u over the intersection of the mappings' declared fixed sets,
/// by dense grid plus refinement (or analytically when the fixed set is
/// finite or an interval).
OracleResult compute_oracle(const ModelSpace& space,
                            const std::vector<MappingHandle>& mappings,
                            const SpacePoint& u, const OracleSpec& spec);

/// Shortest round-trip decimal representation (NaN prints as "nan").
std::string format_scalar(scalar_t v);

/// FNV-1a 64-bit hash of the raw config text, as hex.
std::string config_hash(const std::string& text);

/// RFC-4180 CSV with fixed header: n, beta, x0..x{D-1}, d_oracle, s, gamma,
/// t, lyap_slack, res_1..res_r, d_u_w.
void write_trace_csv(const std::string& path, const RunResult& result,
                     const ModelSpace& space, int r);

struct RunSummary {
  const RunResult* result = nullptr;
  const ExperimentConfig* config = nullptr;
  std::optional<OracleResult> oracle;
  std::optional<TailResidualReport> tail;
  std::string error;  // single-line machine-parsable error, empty on success
};

void write_summary_json(const std::string& path, const RunSummary& summary);

/// Minimal summary carrying only an error, for CLI failure paths.
void write_error_summary(const std::string& path, const std::string& message);

void write_oracle_json(const std::string& path, const OracleResult& oracle);

}  // namespace cat1
