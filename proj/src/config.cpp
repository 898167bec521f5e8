#include "cat1/config.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace cat1 {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

void check_keys(const json& j, const char* context,
                std::initializer_list<const char*> allowed) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : allowed)
      if (it.key() == k) {
        known = true;
        break;
      }
    if (!known)
      throw std::invalid_argument(std::string("config: unknown field \"") + it.key() +
                                  "\" in " + context);
  }
}

const json& require(const json& j, const char* key, const char* context) {
  auto it = j.find(key);
  if (it == j.end())
    throw std::invalid_argument(std::string("config: missing field \"") + key + "\" in " +
                                context);
  return *it;
}

std::vector<scalar_t> as_vector(const json& j, const char* context) {
  if (!j.is_array())
    throw std::invalid_argument(std::string("config: ") + context + " must be an array");
  std::vector<scalar_t> v;
  for (const auto& e : j) v.push_back(e.get<scalar_t>());
  return v;
}

ModelSpace parse_space(const json& j) {
  check_keys(j, "space", {"kind", "dim", "lo", "hi", "diameter_bound"});
  const std::string kind = require(j, "kind", "space").get<std::string>();
  std::optional<scalar_t> diam;
  if (j.contains("diameter_bound")) diam = j["diameter_bound"].get<scalar_t>();
  if (kind == "sphere")
    return ModelSpace::sphere(require(j, "dim", "space").get<int>(), diam);
  if (kind == "segment")
    return ModelSpace::segment(require(j, "lo", "space").get<scalar_t>(),
                               require(j, "hi", "space").get<scalar_t>(), diam);
  throw std::invalid_argument("config: space.kind must be \"sphere\" or \"segment\"");
}

MappingSpec parse_mapping(const json& j) {
  MappingSpec m;
  const std::string kind = require(j, "kind", "mapping").get<std::string>();
  if (kind == "cap_projection") {
    check_keys(j, "mapping", {"kind", "center", "radius"});
    m.kind = MappingSpec::Kind::CapProjection;
    m.center = as_vector(require(j, "center", "mapping"), "mapping.center");
    m.radius = require(j, "radius", "mapping").get<scalar_t>();
  } else if (kind == "resolvent") {
    check_keys(j, "mapping", {"kind", "penalty", "function"});
    m.kind = MappingSpec::Kind::Resolvent;
    const std::string pen = require(j, "penalty", "mapping").get<std::string>();
    if (pen == "tansin")
      m.penalty = MappingSpec::Penalty::TanSin;
    else if (pen == "logcos")
      m.penalty = MappingSpec::Penalty::LogCos;
    else
      throw std::invalid_argument("config: resolvent penalty must be \"tansin\" or \"logcos\"");
    const json& f = require(j, "function", "mapping");
    const std::string fk = require(f, "kind", "mapping.function").get<std::string>();
    if (fk == "indicator_cap") {
      check_keys(f, "mapping.function", {"kind", "center", "radius"});
      m.function_kind = MappingSpec::FunctionKind::IndicatorCap;
      m.center = as_vector(require(f, "center", "mapping.function"), "function.center");
      m.radius = require(f, "radius", "mapping.function").get<scalar_t>();
    } else if (fk == "indicator_interval") {
      check_keys(f, "mapping.function", {"kind", "lo", "hi"});
      m.function_kind = MappingSpec::FunctionKind::IndicatorInterval;
      m.lo = require(f, "lo", "mapping.function").get<scalar_t>();
      m.hi = require(f, "hi", "mapping.function").get<scalar_t>();
    } else if (fk == "distance_to") {
      check_keys(f, "mapping.function", {"kind", "point"});
      m.function_kind = MappingSpec::FunctionKind::DistanceTo;
      m.point = as_vector(require(f, "point", "mapping.function"), "function.point");
    } else {
      throw std::invalid_argument("config: unknown mapping.function.kind \"" + fk + "\"");
    }
  } else if (kind == "geodesic_contraction") {
    check_keys(j, "mapping", {"kind", "point", "lambda"});
    m.kind = MappingSpec::Kind::GeodesicContraction;
    m.point = as_vector(require(j, "point", "mapping"), "mapping.point");
    m.lambda = require(j, "lambda", "mapping").get<scalar_t>();
  } else if (kind == "segment_negation") {
    check_keys(j, "mapping", {"kind"});
    m.kind = MappingSpec::Kind::SegmentNegation;
  } else {
    throw std::invalid_argument("config: unknown mapping kind \"" + kind + "\"");
  }
  return m;
}

BetaSchedule parse_beta(const json& j) {
  const std::string kind = require(j, "kind", "beta").get<std::string>();
  if (kind == "power_law") {
    check_keys(j, "beta", {"kind", "q"});
    return BetaSchedule::power_law(require(j, "q", "beta").get<scalar_t>());
  }
  if (kind == "list") {
    check_keys(j, "beta", {"kind", "values"});
    return BetaSchedule::explicit_list(as_vector(require(j, "values", "beta"), "beta.values"));
  }
  throw std::invalid_argument("config: beta.kind must be \"power_law\" or \"list\"");
}

SpacePoint make_point(const ModelSpace& space, const std::vector<scalar_t>& coords,
                      const char* who) {
  vector_t v = Eigen::Map<const vector_t>(coords.data(),
                                          static_cast<Eigen::Index>(coords.size()));
  if (space.kind == ModelSpace::Kind::UnitSphere && v.size() == space.ambient_dim()) {
    const scalar_t norm = v.norm();
    if (std::abs(norm - 1.0) > 1e-6)
      throw std::invalid_argument(std::string(who) + ": sphere point is not a unit vector");
    v /= norm;
  }
  SpacePoint p(std::move(v));
  space.require_valid(p, who);
  return p;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: JSON parse error: ") + e.what());
  }
  check_keys(j, "config",
             {"schema_version", "space", "mappings", "alpha", "beta", "u", "x1",
              "max_iters", "stop_tolerance", "oracle", "solver", "seed", "output"});

  ExperimentConfig c;
  c.raw_text = text;
  c.schema_version = require(j, "schema_version", "config").get<int>();
  if (c.schema_version != 1)
    throw std::invalid_argument("config: unsupported schema_version");
  c.space = parse_space(require(j, "space", "config"));

  for (const auto& m : require(j, "mappings", "config")) c.mappings.push_back(parse_mapping(m));
  if (c.mappings.empty()) throw std::invalid_argument("config: mappings must be nonempty");

  const json& alpha = require(j, "alpha", "config");
  check_keys(alpha, "alpha", {"a", "values"});
  c.alpha_a = require(alpha, "a", "alpha").get<scalar_t>();
  if (!(c.alpha_a > 0.0 && c.alpha_a < 0.5))
    throw std::invalid_argument("a must lie in (0, 1/2)");
  c.alpha_values = as_vector(require(alpha, "values", "alpha"), "alpha.values");
  if (c.alpha_values.size() != c.mappings.size())
    throw std::invalid_argument("config: alpha.values length must match mappings");

  c.beta = parse_beta(require(j, "beta", "config"));
  c.u = as_vector(require(j, "u", "config"), "u");
  c.x1 = as_vector(require(j, "x1", "config"), "x1");
  make_point(c.space, c.u, "u");    // reject bad points at parse time
  make_point(c.space, c.x1, "x1");
  c.max_iters = require(j, "max_iters", "config").get<long>();
  if (c.max_iters < 1) throw std::invalid_argument("config: max_iters must be positive");
  c.stop_tolerance = require(j, "stop_tolerance", "config").get<scalar_t>();
  if (!(c.stop_tolerance > 0.0))
    throw std::invalid_argument("config: stop_tolerance must be positive");

  if (j.contains("oracle")) {
    const json& o = j["oracle"];
    check_keys(o, "oracle", {"resolution", "refine_tolerance", "target"});
    OracleSpec spec;
    if (o.contains("resolution")) spec.resolution = o["resolution"].get<scalar_t>();
    if (o.contains("refine_tolerance"))
      spec.refine_tolerance = o["refine_tolerance"].get<scalar_t>();
    if (o.contains("target")) spec.target = as_vector(o["target"], "oracle.target");
    if (!(spec.resolution > 0.0 && spec.refine_tolerance > 0.0))
      throw std::invalid_argument("config: oracle resolution/refine_tolerance must be positive");
    c.oracle = spec;
  }
  if (j.contains("solver")) {
    const json& s = j["solver"];
    check_keys(s, "solver", {"coarse_grid_points", "refine_tolerance", "max_refine_iters"});
    if (s.contains("coarse_grid_points"))
      c.solver.coarse_grid_points = s["coarse_grid_points"].get<int>();
    if (s.contains("refine_tolerance"))
      c.solver.refine_tolerance = s["refine_tolerance"].get<scalar_t>();
    if (s.contains("max_refine_iters"))
      c.solver.max_refine_iters = s["max_refine_iters"].get<int>();
    c.solver.validate();
  }
  if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("output")) {
    const json& o = j["output"];
    check_keys(o, "output", {"trace", "summary"});
    if (o.contains("trace")) c.trace_path = o["trace"].get<std::string>();
    if (o.contains("summary")) c.summary_path = o["summary"].get<std::string>();
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("config: cannot read file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

namespace {

MappingHandle instantiate(const ModelSpace& space, const MappingSpec& spec,
                          const SolverSettings& solver) {
  switch (spec.kind) {
    case MappingSpec::Kind::CapProjection:
      return cap_projection(space, Cap{make_point(space, spec.center, "mapping.center"),
                                       spec.radius});
    case MappingSpec::Kind::GeodesicContraction:
      return geodesic_contraction(space, make_point(space, spec.point, "mapping.point"),
                                  spec.lambda);
    case MappingSpec::Kind::SegmentNegation:
      return segment_negation(space);
    case MappingSpec::Kind::Resolvent: {
      ConvexFunctionHandle f;
      std::optional<ConvexSetHandle> fixed_set;
      std::vector<SpacePoint> fixed_points;
      switch (spec.function_kind) {
        case MappingSpec::FunctionKind::IndicatorCap: {
          ConvexSetHandle set = ConvexSetHandle::cap(
              Cap{make_point(space, spec.center, "function.center"), spec.radius});
          f = indicator_of(space, set);
          fixed_set = set;
          break;
        }
        case MappingSpec::FunctionKind::IndicatorInterval: {
          ConvexSetHandle set = ConvexSetHandle::interval(spec.lo, spec.hi);
          f = indicator_of(space, set);
          fixed_set = set;
          break;
        }
        case MappingSpec::FunctionKind::DistanceTo: {
          SpacePoint c = make_point(space, spec.point, "function.point");
          f = distance_to(space, c);
          fixed_points = {c};
          break;
        }
      }
      const bool tansin = spec.penalty == MappingSpec::Penalty::TanSin;
      MappingHandle m;
      m.label = std::string("resolvent_") + (tansin ? "tansin" : "logcos") + "(" + f.label + ")";
      m.quasinonexpansive = true;
      m.delta_demiclosed = true;
      m.fixed_set = std::move(fixed_set);
      m.fixed_points = std::move(fixed_points);
      m.map = [space, f = std::move(f), solver, tansin](const SpacePoint& x) {
        return tansin ? resolvent_tansin(space, f, x, solver)
                      : resolvent_logcos(space, f, x, solver);
      };
      return m;
    }
  }
  throw std::logic_error("instantiate: unknown mapping kind");
}

}  // namespace

HalpernProblem build_problem(const ExperimentConfig& config) {
  HalpernProblem p;
  p.space = config.space;
  for (const MappingSpec& spec : config.mappings)
    p.mappings.push_back(instantiate(config.space, spec, config.solver));
  p.w_schedule = WSchedule::constant(config.alpha_values, config.alpha_a);
  p.beta = config.beta;
  p.u = make_point(config.space, config.u, "u");
  p.x1 = make_point(config.space, config.x1, "x1");
  p.max_iters = config.max_iters;
  p.stop_tolerance = config.stop_tolerance;
  return p;
}

OracleResult compute_oracle(const ModelSpace& space,
                            const std::vector<MappingHandle>& mappings,
                            const SpacePoint& u, const OracleSpec& spec) {
  if (spec.target) {
    OracleResult out;
    out.point = make_point(space, *spec.target, "oracle.target");
    out.distance = dist(space, u, out.point);
    out.method = "declared";
    return out;
  }

  std::vector<const ConvexSetHandle*> sets;
  std::vector<const std::vector<SpacePoint>*> finite;
  for (const MappingHandle& m : mappings) {
    if (!m.fixed_points.empty())
      finite.push_back(&m.fixed_points);
    else if (m.fixed_set)
      sets.push_back(&*m.fixed_set);
    else
      throw std::invalid_argument("oracle: mapping \"" + m.label +
                                  "\" declares no fixed set");
  }

  auto member_of_all = [&](const SpacePoint& q, scalar_t tol) {
    for (const ConvexSetHandle* s : sets)
      if (!s->contains(space, q, tol)) return false;
    for (const auto* pts : finite) {
      bool hit = false;
      for (const SpacePoint& p : *pts)
        if (dist(space, q, p) <= tol) {
          hit = true;
          break;
        }
      if (!hit) return false;
    }
    return true;
  };

  OracleResult out;
  if (!finite.empty()) {
    // The common fixed set is a subset of a finite list: intersect and pick
    // the nearest candidate.
    scalar_t best = kInf;
    for (const SpacePoint& q : *finite.front()) {
      if (!member_of_all(q, 1e-8)) continue;
      const scalar_t d = dist(space, u, q);
      if (d < best) {
        best = d;
        out.point = q;
      }
    }
    if (!(best < kInf))
      throw std::invalid_argument("oracle: declared fixed sets have empty intersection");
    out.distance = best;
    out.method = "finite";
    return out;
  }

  if (space.kind == ModelSpace::Kind::Segment) {
    scalar_t lo = space.lo, hi = space.hi;
    for (const ConvexSetHandle* s : sets) {
      if (s->kind != ConvexSetHandle::Kind::Interval)
        throw std::invalid_argument("oracle: segment fixed sets must be intervals");
      lo = std::max(lo, s->lo);
      hi = std::min(hi, s->hi);
    }
    if (lo > hi)
      throw std::invalid_argument("oracle: declared fixed sets have empty intersection");
    out.point = SpacePoint::scalar(std::clamp(u.value(), lo, hi));
    out.distance = dist(space, u, out.point);
    out.method = "interval";
    return out;
  }

  std::vector<Cap> caps;
  for (const ConvexSetHandle* s : sets)
    for (const Cap& c : s->caps) caps.push_back(c);
  if (caps.empty()) throw std::invalid_argument("oracle: no caps declared");

  if (member_of_all(u, 1e-10)) {
    out.point = u;
    out.distance = 0.0;
    out.method = "member";
    return out;
  }

  // Witness by cyclic projection from u, then dense grid + refinement.
  SpacePoint witness = u;
  for (int round = 0; round < 400; ++round) {
    bool moved = false;
    for (const Cap& c : caps)
      if (dist(space, witness, c.center) > c.radius + 1e-13) {
        witness = project_cap(space, c, witness);
        moved = true;
      }
    if (!moved) break;
  }
  ConvexSetHandle set = ConvexSetHandle::intersection(space, caps, witness);

  const long n_long =
      std::lround(std::ceil(4.0 * kPi / (spec.resolution * spec.resolution)));
  const int n = static_cast<int>(std::clamp(n_long, 1000L, 30000000L));
  SolverSettings settings;
  settings.coarse_grid_points = n;
  settings.refine_tolerance = spec.refine_tolerance;
  settings.max_refine_iters = 2000;

  auto objective = [&](const SpacePoint& y) { return dist(space, u, y); };
  ArgminResult res = argmin(space, objective, settings, set, {witness});
  out.point = res.point;
  out.distance = res.value;
  out.resolution = std::sqrt(4.0 * kPi / n);
  out.certified_gap = res.grid_value - res.value;
  out.method = "grid+refine";
  return out;
}

std::string format_scalar(scalar_t v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string config_hash(const std::string& text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_trace_csv(const std::string& path, const RunResult& result,
                     const ModelSpace& space, int r) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write trace file " + path);
  const int d = space.ambient_dim();
  out << "n,beta";
  for (int i = 0; i < d; ++i) out << ",x" << i;
  out << ",d_oracle,s,gamma,t,lyap_slack";
  for (int i = 1; i <= r; ++i) out << ",res_" << i;
  out << ",d_u_w\r\n";
  for (const TraceRow& row : result.trace) {
    out << row.n << ',' << format_scalar(row.beta);
    for (int i = 0; i < d; ++i) out << ',' << format_scalar(row.x.coords[i]);
    out << ',' << format_scalar(row.d_oracle) << ',' << format_scalar(row.s) << ','
        << format_scalar(row.gamma) << ',' << format_scalar(row.t) << ','
        << format_scalar(row.lyap_slack);
    for (int i = 0; i < r; ++i)
      out << ','
          << (i < static_cast<int>(row.residuals.size())
                  ? format_scalar(row.residuals[static_cast<size_t>(i)])
                  : "nan");
    out << ',' << format_scalar(row.d_u_w) << "\r\n";
  }
}

namespace {

ordered_json scalar_or_null(scalar_t v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

ordered_json point_json(const SpacePoint& p) {
  ordered_json arr = ordered_json::array();
  for (Eigen::Index i = 0; i < p.coords.size(); ++i) arr.push_back(p.coords[i]);
  return arr;
}

}  // namespace

void write_summary_json(const std::string& path, const RunSummary& summary) {
  ordered_json j;
  j["tool_version"] = kToolVersion;
  if (summary.config) j["config_hash"] = config_hash(summary.config->raw_text);
  if (!summary.error.empty()) j["error"] = summary.error;
  if (summary.result) {
    const RunResult& r = *summary.result;
    j["final_point"] = point_json(r.final_point);
    j["iterations"] = r.iterations;
    j["converged"] = r.converged;
    j["stop_reason"] = r.stop_reason;
    j["final_d_oracle"] = scalar_or_null(r.final_d_oracle);
    j["conditions"] = {{"a", r.conditions.a}, {"b", r.conditions.b}, {"c", r.conditions.c}};
    const DiagnosticAggregates& a = r.diagnostics;
    j["max_lyapunov_violation"] =
        scalar_or_null(std::isfinite(a.min_lyap_slack) ? std::max(0.0, -a.min_lyap_slack)
                                                       : kNaN);
    j["diagnostics"] = {{"min_lyap_slack", scalar_or_null(a.min_lyap_slack)},
                        {"min_fejer_slack", scalar_or_null(a.min_fejer_slack)},
                        {"max_bound_excess", scalar_or_null(a.max_bound_excess)},
                        {"min_gamma", scalar_or_null(a.min_gamma)},
                        {"max_gamma", scalar_or_null(a.max_gamma)},
                        {"min_gamma_minus_beta_sq_bound",
                         scalar_or_null(a.min_gamma_minus_beta_sq_bound)},
                        {"min_gamma_over_beta", scalar_or_null(a.min_gamma_over_beta)},
                        {"max_d_u_w", scalar_or_null(a.max_d_u_w)},
                        {"undefined_gamma_steps", a.undefined_gamma_steps}};
  }
  if (summary.tail)
    j["tail_residuals"] = {{"max_residual", summary.tail->max_residual},
                           {"threshold", summary.tail->threshold},
                           {"rows_examined", summary.tail->rows_examined},
                           {"pass", summary.tail->pass}};
  if (summary.oracle)
    j["oracle"] = {{"point", point_json(summary.oracle->point)},
                   {"distance", summary.oracle->distance},
                   {"resolution", summary.oracle->resolution},
                   {"certified_gap", summary.oracle->certified_gap},
                   {"method", summary.oracle->method}};
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write summary file " + path);
  out << j.dump(2) << "\n";
}

void write_error_summary(const std::string& path, const std::string& message) {
  ordered_json j;
  j["tool_version"] = kToolVersion;
  j["error"] = message;
  std::ofstream out(path, std::ios::binary);
  if (out) out << j.dump(2) << "\n";
}

void write_oracle_json(const std::string& path, const OracleResult& oracle) {
  ordered_json j;
  j["tool_version"] = kToolVersion;
  j["point"] = point_json(oracle.point);
  j["distance"] = oracle.distance;
  j["resolution"] = oracle.resolution;
  j["certified_gap"] = oracle.certified_gap;
  j["method"] = oracle.method;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write oracle file " + path);
  out << j.dump(2) << "\n";
}

}  // namespace cat1
