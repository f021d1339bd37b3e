#pragma once

#include <lalm/instances/serialize.hpp>
#include <lalm/lalm.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>

namespace lalm {

inline constexpr const char* kCacheDirEnv = "LALM_CACHE_DIR";

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

inline std::string instance_hash(const InstanceDocument& doc) { return hex64(fnv1a(to_json(doc).dump())); }

struct LongRunOptions {
  Index budget = 1'000'000;  ///< LALM iterations
  double tol = 1e-10;        ///< target for the largest KKT component
  double beta = 1.0;
  std::optional<double> eta0;
  Index check_every = 50;
  std::optional<std::string> cache_dir;  ///< falls back to $LALM_CACHE_DIR; no caching if neither is set
  bool quiet = false;
};

struct LongRunResult {
  ReferenceSolution ref;
  bool from_cache = false;
  bool converged = false;
  Index iterations = 0;
};

/// LALM run to a tight KKT tolerance.  Returns the iterate with the smallest
/// KKT residual seen; warns if the target was not met.
inline LongRunResult long_run_reference(const ProblemInstance& prob, const LongRunOptions& opt = {}) {
  require(opt.budget >= 1 && opt.check_every >= 1, "long_run_reference: budget and check interval must be positive");
  SolverConfig cfg;
  cfg.beta = opt.beta;
  cfg.step_mode = StepMode::backtracking;
  cfg.eta0 = opt.eta0;
  cfg.track_ergodic = false;
  Lalm solver(prob, cfg, PrimalDualPoint::at(prob, prob.h.prox(Vector::Zero(prob.dim), 1.0)));

  LongRunResult out;
  PrimalDualPoint best = solver.point();
  double best_kkt = kkt_residual(best, prob).max();
  for (Index k = 1; k <= opt.budget && best_kkt > opt.tol; ++k) {
    solver.step();
    if (k % opt.check_every != 0 && k != opt.budget) continue;
    const double kkt = kkt_residual(solver.point(), prob).max();
    if (!std::isfinite(kkt)) throw NumericalError("long_run_reference: non-finite KKT residual");
    if (kkt < best_kkt) {
      best_kkt = kkt;
      best = solver.point();
    }
  }
  out.iterations = solver.iterations();
  out.converged = best_kkt <= opt.tol;
  out.ref.x = best.x;
  out.ref.y = best.y;
  out.ref.z = best.z;
  out.ref.f0 = prob.objective(best.x);
  out.ref.kkt = best_kkt;
  out.ref.provenance = Provenance::long_run;
  if (!out.converged && !opt.quiet) {
    std::cerr << "warning: long-run reference for '" << prob.name << "' stopped at KKT residual " << best_kkt
              << " (target " << opt.tol << ") after " << out.iterations << " iterations\n";
  }
  return out;
}

namespace detail {

inline std::optional<std::filesystem::path> cache_directory(const LongRunOptions& opt) {
  if (opt.cache_dir) return opt.cache_dir->empty() ? std::nullopt : std::optional<std::filesystem::path>(*opt.cache_dir);
  if (const char* env = std::getenv(kCacheDirEnv); env != nullptr && *env != '\0') return std::filesystem::path(env);
  return std::nullopt;
}

inline Json reference_to_json(const ReferenceSolution& ref) {
  return Json{{"x", json_io::vector(ref.x)}, {"y", json_io::vector(ref.y)},   {"z", json_io::vector(ref.z)},
              {"f0", json_io::number(ref.f0)}, {"kkt", json_io::number(ref.kkt)},
              {"provenance", to_string(ref.provenance)}};
}

inline ReferenceSolution reference_from_json(const Json& j) {
  ReferenceSolution ref;
  ref.x = json_io::to_vector(j.at("x"));
  ref.y = json_io::to_vector(j.at("y"));
  ref.z = json_io::to_vector(j.at("z"));
  ref.f0 = json_io::to_number(j.at("f0"));
  ref.kkt = json_io::to_number(j.at("kkt"));
  ref.provenance = provenance_from_string(j.at("provenance").get<std::string>());
  return ref;
}

}  // namespace detail

/// Cached variant keyed by the instance hash and the run options.
inline LongRunResult long_run_reference(const InstanceDocument& doc, const LongRunOptions& opt = {}) {
  const auto dir = detail::cache_directory(opt);
  std::optional<std::filesystem::path> file;
  if (dir) {
    std::ostringstream key;
    key << opt.budget << '/' << opt.tol << '/' << opt.beta << '/' << (opt.eta0 ? *opt.eta0 : -1.0);
    file = *dir / (instance_hash(doc) + "-" + hex64(fnv1a(key.str())) + ".json");
    if (std::filesystem::exists(*file)) {
      std::ifstream in(*file);
      Json j;
      try {
        in >> j;
        LongRunResult cached;
        cached.ref = detail::reference_from_json(j.at("reference"));
        cached.converged = j.at("converged").get<bool>();
        cached.iterations = j.at("iterations").get<Index>();
        cached.from_cache = true;
        return cached;
      } catch (const std::exception& e) {
        if (!opt.quiet) std::cerr << "warning: ignoring unreadable cache entry " << *file << ": " << e.what() << '\n';
      }
    }
  }

  const ProblemInstance prob = build_instance(doc.data);
  LongRunResult out = long_run_reference(prob, opt);
  if (file) {
    std::filesystem::create_directories(*dir);
    const auto tmp = file->string() + ".tmp";
    {
      std::ofstream os(tmp);
      if (!os) throw std::runtime_error("cannot write cache entry '" + tmp + "'");
      os << Json{{"reference", detail::reference_to_json(out.ref)},
                 {"converged", out.converged},
                 {"iterations", out.iterations}}
                .dump()
         << '\n';
    }
    std::filesystem::rename(tmp, *file);
  }
  return out;
}

}  // namespace lalm
