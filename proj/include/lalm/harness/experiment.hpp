#pragma once

#include <lalm/blalm.hpp>
#include <lalm/harness/long_run.hpp>
#include <lalm/harness/trace_csv.hpp>
#include <lalm/instances/brute_force.hpp>
#include <lalm/pdyn.hpp>

#include <iostream>

namespace lalm {

enum class Method { lalm, blalm, pdyn };

inline const char* to_string(Method m) {
  switch (m) {
    case Method::lalm: return "lalm";
    case Method::blalm: return "blalm";
    case Method::pdyn: return "pdyn";
  }
  return "unknown";
}

inline Method method_from_string(const std::string& s) {
  if (s == "lalm") return Method::lalm;
  if (s == "blalm") return Method::blalm;
  if (s == "pdyn") return Method::pdyn;
  throw InvalidArgument("unknown method '" + s + "' (expected lalm, blalm or pdyn)");
}

inline StepMode step_mode_from_string(const std::string& s) {
  if (s == "analytic") return StepMode::analytic;
  if (s == "backtracking") return StepMode::backtracking;
  throw InvalidArgument("unknown step mode '" + s + "' (expected analytic or backtracking)");
}

enum class ReferencePolicy { automatic, none };

struct ExperimentConfig {
  Method method = Method::lalm;
  std::string problem = "bpdn";           ///< bpdn | qcqp | minimax | tiny:<kind>
  std::optional<std::string> instance_file;  ///< JSON instance; overrides problem
  std::uint64_t seed = 0;                 ///< instance generation and block sampling
  std::optional<Index> blocks;
  // Generator sizes (defaults are the generators' own).
  std::optional<Index> rows, cols, p, m;
  SolverConfig solver;
  ReferencePolicy reference = ReferencePolicy::automatic;
  LongRunOptions long_run;
  bool timing = true;
  std::string out;  ///< CSV path; empty writes to stdout

  ExperimentConfig() { solver.max_epochs = 100'000; }

  void validate() const {
    solver.validate();
    if (blocks) require(*blocks >= 1, "ExperimentConfig: blocks must be positive");
  }
};

/// Flat keys mirroring the command-line flags.
inline void apply_json(ExperimentConfig& cfg, const Json& j) {
  if (!j.is_object()) throw InvalidArgument("config: expected a JSON object");
  static const std::set<std::string> known{"problem", "method", "seed",  "beta",      "rho-y",        "rho-z",
                                           "delta",   "blocks", "epochs", "tol",      "eta0",         "out",
                                           "instance", "rows",  "cols",  "p",         "m",            "step-mode",
                                           "record-every", "no-timing", "reference", "backtrack-factor"};
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw InvalidArgument("config: unknown key '" + key + "'");
  }
  auto get_index = [&](const char* k) { return j.at(k).get<Index>(); };
  if (j.contains("problem")) cfg.problem = j.at("problem").get<std::string>();
  if (j.contains("method")) cfg.method = method_from_string(j.at("method").get<std::string>());
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("beta")) cfg.solver.beta = j.at("beta").get<double>();
  if (j.contains("rho-y")) cfg.solver.rho_y = j.at("rho-y").get<double>();
  if (j.contains("rho-z")) cfg.solver.rho_z = j.at("rho-z").get<double>();
  if (j.contains("delta")) cfg.solver.delta = j.at("delta").get<double>();
  if (j.contains("blocks")) cfg.blocks = get_index("blocks");
  if (j.contains("epochs")) cfg.solver.max_epochs = get_index("epochs");
  if (j.contains("tol")) cfg.solver.tol = j.at("tol").get<double>();
  if (j.contains("eta0")) cfg.solver.eta0 = j.at("eta0").get<double>();
  if (j.contains("out")) cfg.out = j.at("out").get<std::string>();
  if (j.contains("instance")) cfg.instance_file = j.at("instance").get<std::string>();
  if (j.contains("rows")) cfg.rows = get_index("rows");
  if (j.contains("cols")) cfg.cols = get_index("cols");
  if (j.contains("p")) cfg.p = get_index("p");
  if (j.contains("m")) cfg.m = get_index("m");
  if (j.contains("step-mode")) cfg.solver.step_mode = step_mode_from_string(j.at("step-mode").get<std::string>());
  if (j.contains("record-every")) cfg.solver.record.every = get_index("record-every");
  if (j.contains("no-timing")) cfg.timing = !j.at("no-timing").get<bool>();
  if (j.contains("backtrack-factor")) cfg.solver.backtrack_factor = j.at("backtrack-factor").get<double>();
  if (j.contains("reference")) {
    const auto r = j.at("reference").get<std::string>();
    if (r == "auto") cfg.reference = ReferencePolicy::automatic;
    else if (r == "none") cfg.reference = ReferencePolicy::none;
    else throw InvalidArgument("config: reference must be 'auto' or 'none'");
  }
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config '" + path + "'");
  Json j;
  try {
    in >> j;
  } catch (const Json::parse_error& e) {
    throw InvalidArgument("config '" + path + "': " + e.what());
  }
  ExperimentConfig cfg;
  apply_json(cfg, j);
  return cfg;
}

/// Instance description for a config: the JSON file if given, otherwise a
/// generator run with the config's seed and sizes.
inline InstanceDocument make_instance_document(const ExperimentConfig& cfg) {
  InstanceDocument doc;
  if (cfg.instance_file) {
    doc = load_document(*cfg.instance_file);
  } else if (cfg.problem == "bpdn") {
    BpdnSpec spec;
    spec.seed = cfg.seed;
    if (cfg.rows) spec.rows = *cfg.rows;
    if (cfg.cols) spec.cols = *cfg.cols;
    if (cfg.blocks) spec.blocks = *cfg.blocks;
    doc = make_document(spec);
  } else if (cfg.problem == "qcqp") {
    QcqpSpec spec;
    spec.seed = cfg.seed;
    if (cfg.p) spec.p = *cfg.p;
    if (cfg.m) spec.m = *cfg.m;
    spec.blocks = cfg.blocks.value_or(std::min<Index>(spec.blocks, spec.p));
    doc = make_document(spec);
  } else if (cfg.problem == "minimax") {
    doc.data = random_minimax_1d(cfg.m.value_or(3), cfg.seed);
    doc.spec = Json{{"pieces", cfg.m.value_or(3)}, {"dimension", 1}};
    doc.seed = cfg.seed;
  } else if (cfg.problem.rfind("tiny:", 0) == 0) {
    doc = make_document(tiny_kind_from_string(cfg.problem.substr(5)));
  } else {
    throw InvalidArgument("unknown problem '" + cfg.problem + "' (expected bpdn, qcqp, minimax or tiny:<kind>)");
  }
  return doc;
}

/// Partition override from --blocks applies to every family.
inline ProblemInstance make_problem(const InstanceDocument& doc, const ExperimentConfig& cfg) {
  ProblemInstance prob = build_instance(doc.data);
  if (cfg.blocks) {
    require(*cfg.blocks <= prob.dim, "blocks must not exceed the problem dimension");
    prob.partition = BlockPartition::even(prob.dim, *cfg.blocks);
  }
  return prob;
}

/// Search box for the grid oracle: the domain, with unbounded coordinates
/// (the epigraph variable of a minimax instance) bracketed by constraint values.
inline Box brute_force_search_box(const ProblemInstance& prob) {
  const auto& dom = prob.h.domain();
  if (!dom) throw InvalidArgument("brute-force reference needs a bounded domain");
  Box box = *dom;
  Index unbounded = 0;
  for (Index i = 0; i < prob.dim; ++i) unbounded += std::isfinite(box.lower[i]) && std::isfinite(box.upper[i]) ? 0 : 1;
  if (unbounded == 0) return box;
  if (unbounded > 1 || std::isfinite(box.lower[prob.dim - 1]) || prob.name != "minimax") {
    throw InvalidArgument("brute-force reference: unbounded coordinates are only bracketed for minimax instances");
  }
  // t ranges over [min_x max_j f_j, max_x max_j f_j]; sample the x box.
  const Index p = prob.dim - 1;
  Box xbox{box.lower.head(p), box.upper.head(p)};
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  Vector xt = Vector::Zero(prob.dim);
  detail::for_each_grid_point(xbox.lower, xbox.upper, p == 1 ? 2001 : 101, [&](const Vector& x) {
    xt.head(p) = x;
    xt[p] = 0.0;
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& c : prob.constraints) worst = std::max(worst, c.value(xt));
    lo = std::min(lo, worst);
    hi = std::max(hi, worst);
  });
  const double pad = 1.0 + 0.1 * (hi - lo);
  box.lower[p] = lo - pad;
  box.upper[p] = hi + pad;
  return box;
}

/// Hand reference for tiny kinds, grid oracle for small inequality-only
/// instances, long-run LALM otherwise.
inline std::optional<ReferenceSolution> resolve_reference(const InstanceDocument& doc, const ProblemInstance& prob,
                                                          const ExperimentConfig& cfg) {
  if (cfg.reference == ReferencePolicy::none) return std::nullopt;
  if (const auto* kind = std::get_if<TinyKind>(&doc.data)) return tiny_solution(*kind);
  if (const auto* mm = std::get_if<MinimaxData>(&doc.data)) {
    if (mm->box.size() <= 3) return brute_force_minimax(*mm);
  }
  if (prob.dim <= 3 && prob.affine.is_empty()) {
    BruteForceOptions opt;
    opt.search = brute_force_search_box(prob);
    return brute_force_reference(prob, opt);
  }
  return long_run_reference(doc, cfg.long_run).ref;
}

struct ExperimentOutcome {
  SolveResult result;
  std::optional<ReferenceSolution> reference;
  std::string csv;
};

/// Starting point: the prox of 0, which lies in every supported domain.
inline Vector default_start(const ProblemInstance& prob) { return prob.h.prox(Vector::Zero(prob.dim), 1.0); }

inline SolveResult run_method(const ProblemInstance& prob, const ExperimentConfig& cfg) {
  const Vector x0 = default_start(prob);
  switch (cfg.method) {
    case Method::lalm: return solve_lalm(prob, cfg.solver, x0);
    case Method::blalm: return solve_blalm(prob, cfg.solver, x0, cfg.seed);
    case Method::pdyn: return solve_pdyn(prob, cfg.solver, x0);
  }
  throw InvalidArgument("unknown method");
}

/// Builds the instance, resolves a reference, runs the method and writes the
/// CSV trace (to cfg.out, or only into the outcome when cfg.out is empty).
inline ExperimentOutcome run_experiment(ExperimentConfig cfg) {
  cfg.validate();
  const InstanceDocument doc = make_instance_document(cfg);
  ProblemInstance prob = make_problem(doc, cfg);
  if (cfg.method == Method::pdyn && !prob.affine.is_empty()) {
    throw InvalidArgument("method pdyn does not support equality constraints (instance '" + prob.name + "')");
  }
  if (cfg.method == Method::pdyn && prob.h.l1_weight() != 0.0) {
    throw InvalidArgument("method pdyn needs h to be a box indicator (instance '" + prob.name + "' has an l1 term)");
  }

  ExperimentOutcome outcome;
  outcome.reference = resolve_reference(doc, prob, cfg);
  if (outcome.reference) cfg.solver.f0_star = outcome.reference->f0;
  outcome.result = run_method(prob, cfg);
  outcome.csv = trace_csv(outcome.result.method, outcome.result.trace, CsvOptions{cfg.timing});
  if (!cfg.out.empty()) {
    std::ofstream os(cfg.out, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open '" + cfg.out + "' for writing");
    os << outcome.csv;
    if (!os) throw std::runtime_error("failed writing '" + cfg.out + "'");
  }
  return outcome;
}

}  // namespace lalm
