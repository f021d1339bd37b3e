// Benchmark driver: builds an instance, runs one method and writes a CSV trace.

#include <lalm/harness/experiment.hpp>

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Run LALM, BLALM or PD-YN on a generated or stored instance and write a convergence trace."};

  std::string problem, method, config_file, out, instance, export_instance, step_mode, reference;
  std::uint64_t seed = 0;
  double beta = 0, rho_y = 0, rho_z = 0, delta = 0, tol = 0, eta0 = 0, backtrack_factor = 0;
  lalm::Index blocks = 0, epochs = 0, rows = 0, cols = 0, p = 0, m = 0, record_every = 0;
  bool no_timing = false;

  auto* o_problem = app.add_option("--problem", problem, "bpdn | qcqp | minimax | tiny:<kind>");
  auto* o_method = app.add_option("--method", method, "lalm | blalm | pdyn");
  auto* o_seed = app.add_option("--seed", seed, "instance and block-sampler seed");
  auto* o_beta = app.add_option("--beta", beta, "penalty parameter");
  auto* o_rho_y = app.add_option("--rho-y", rho_y, "equality multiplier step (default beta, or beta/n for blalm)");
  auto* o_rho_z = app.add_option("--rho-z", rho_z, "inequality multiplier step (default beta, or beta/n for blalm)");
  auto* o_delta = app.add_option("--delta", delta, "extra proximal weight added to the analytic step");
  auto* o_blocks = app.add_option("--blocks", blocks, "number of coordinate blocks");
  auto* o_epochs = app.add_option("--epochs", epochs, "epoch budget (default 100000)");
  auto* o_tol = app.add_option("--tol", tol, "early-stop tolerance (0 runs the full budget)");
  auto* o_eta0 = app.add_option("--eta0", eta0, "initial backtracking step parameter");
  auto* o_out = app.add_option("--out", out, "CSV output path (stdout if omitted)");
  auto* o_instance = app.add_option("--instance", instance, "load the instance from a JSON file");
  auto* o_rows = app.add_option("--rows", rows, "BPDN rows");
  auto* o_cols = app.add_option("--cols", cols, "BPDN columns");
  auto* o_p = app.add_option("--p", p, "QCQP dimension");
  auto* o_m = app.add_option("--m", m, "QCQP constraints / minimax pieces");
  auto* o_step = app.add_option("--step-mode", step_mode, "backtracking | analytic");
  auto* o_every = app.add_option("--record-every", record_every, "record every k epochs (0 = automatic)");
  auto* o_bt = app.add_option("--backtrack-factor", backtrack_factor, "step growth factor while backtracking");
  auto* o_ref = app.add_option("--reference", reference, "auto | none");
  auto* o_no_timing = app.add_flag("--no-timing", no_timing, "leave time_ms empty (byte-reproducible output)");
  app.add_option("--config", config_file, "JSON config with flat keys mirroring these flags");
  app.add_option("--export-instance", export_instance, "write the instance JSON to this path and exit");

  CLI11_PARSE(app, argc, argv);

  try {
    lalm::ExperimentConfig cfg = config_file.empty() ? lalm::ExperimentConfig{} : lalm::load_config(config_file);
    lalm::Json flags = lalm::Json::object();
    if (*o_problem) flags["problem"] = problem;
    if (*o_method) flags["method"] = method;
    if (*o_seed) flags["seed"] = seed;
    if (*o_beta) flags["beta"] = beta;
    if (*o_rho_y) flags["rho-y"] = rho_y;
    if (*o_rho_z) flags["rho-z"] = rho_z;
    if (*o_delta) flags["delta"] = delta;
    if (*o_blocks) flags["blocks"] = blocks;
    if (*o_epochs) flags["epochs"] = epochs;
    if (*o_tol) flags["tol"] = tol;
    if (*o_eta0) flags["eta0"] = eta0;
    if (*o_out) flags["out"] = out;
    if (*o_instance) flags["instance"] = instance;
    if (*o_rows) flags["rows"] = rows;
    if (*o_cols) flags["cols"] = cols;
    if (*o_p) flags["p"] = p;
    if (*o_m) flags["m"] = m;
    if (*o_step) flags["step-mode"] = step_mode;
    if (*o_every) flags["record-every"] = record_every;
    if (*o_bt) flags["backtrack-factor"] = backtrack_factor;
    if (*o_ref) flags["reference"] = reference;
    if (*o_no_timing) flags["no-timing"] = no_timing;
    lalm::apply_json(cfg, flags);

    if (!export_instance.empty()) {
      lalm::save_document(lalm::make_instance_document(cfg), export_instance);
      return 0;
    }

    const lalm::ExperimentOutcome outcome = lalm::run_experiment(cfg);
    if (cfg.out.empty()) std::cout << outcome.csv;
    const auto& res = outcome.result;
    std::cerr << res.method << ": " << res.epochs << " epochs, " << res.iterations << " iterations, "
              << res.backtracks << " backtracks";
    if (outcome.reference) {
      std::cerr << ", reference f0* = " << outcome.reference->f0 << " (" << lalm::to_string(outcome.reference->provenance)
                << ")";
    }
    std::cerr << '\n';
  } catch (const lalm::SolverAborted& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const lalm::InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
