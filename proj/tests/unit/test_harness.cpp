#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>
#include <unistd.h>

using namespace lalm;
namespace fs = std::filesystem;

namespace {

class TempDir {
 public:
  explicit TempDir(const std::string& tag) : path_(fs::temp_directory_path() / ("lalm_" + tag + "_" + std::to_string(::getpid()))) {
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string file(const std::string& name) const { return (path_ / name).string(); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(LALM_SOLVE_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(RateFit, SyntheticSequences) {
  std::vector<double> k, harmonic, flat, geometric;
  for (int i = 1; i <= 1000; ++i) {
    k.push_back(i);
    harmonic.push_back(5.0 / i);
    flat.push_back(2.0);
    geometric.push_back(3.0 * std::pow(0.9, i));
  }
  EXPECT_NEAR(rate_fit(k, harmonic, 1, 1000), -1.0, 1e-6);
  EXPECT_NEAR(rate_fit(k, flat, 1, 1000), 0.0, 1e-12);
  const double early = rate_fit(k, geometric, 10, 100), late = rate_fit(k, geometric, 100, 300);
  EXPECT_LT(early, -1.0);
  EXPECT_LT(late, early);
}

TEST(RateFit, DropsNonpositiveAndNeedsSamples) {
  std::vector<double> k, v;
  for (int i = 1; i <= 30; ++i) {
    k.push_back(i);
    v.push_back(i % 3 == 0 ? 0.0 : 1.0 / (i * i));
  }
  EXPECT_NEAR(rate_fit(k, v, 1, 30), -2.0, 1e-9);
  std::vector<double> zeros(30, 0.0);
  EXPECT_THROW(rate_fit(k, zeros, 1, 30), InvalidArgument);
  EXPECT_THROW(rate_fit(k, v, 1, 5), InvalidArgument);
}

TEST(RateFit, TraceColumns) {
  std::vector<TraceRecord> trace;
  for (int e = 0; e <= 100; ++e) {
    TraceRecord r;
    r.epoch = e;
    r.kkt_stat = e == 0 ? 1.0 : 1.0 / (e * e * e);
    r.feas = e == 0 ? 1.0 : 4.0 / e;
    trace.push_back(r);
  }
  EXPECT_NEAR(rate_fit(trace, TraceColumn::kkt_stat, 1, 100), -3.0, 1e-9);
  EXPECT_NEAR(rate_fit(trace, trace_column_from_string("feas"), 1, 100), -1.0, 1e-9);
  EXPECT_THROW(rate_fit(trace, TraceColumn::obj_gap, 1, 100), InvalidArgument);
  EXPECT_THROW(trace_column_from_string("bogus"), InvalidArgument);
}

TEST(TraceCsv, HeaderRowsAndEmptyFields) {
  auto [prob, ref] = tiny_reference(TinyKind::scalar_qcqp);
  SolverConfig cfg;
  cfg.max_epochs = 95;
  cfg.record.every = 10;
  const SolveResult res = solve_lalm(prob, cfg, Vector::Zero(1));
  const auto rows = lines(trace_csv(res.method, res.trace));
  ASSERT_EQ(rows.size(), 1u + 95 / 10 + 1);
  EXPECT_EQ(rows[0], "method,epoch,obj,obj_gap,feas,kkt_stat,erg_obj_gap,erg_feas,eta_max,time_ms");
  Index prev = -1;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto cells = split(rows[i]);
    ASSERT_EQ(cells.size(), 10u);
    EXPECT_EQ(cells[0], "lalm");
    const Index epoch = std::stoll(cells[1]);
    EXPECT_GT(epoch, prev);
    prev = epoch;
    EXPECT_GE(std::stod(cells[4]), 0.0);
  }
  EXPECT_EQ(split(rows[1])[6], "");  // no ergodic point at epoch 0

  ProblemInstance anon = prob;
  anon.optimal_value.reset();
  const SolveResult bare = solve_lalm(anon, cfg, Vector::Zero(1));
  const auto bare_rows = lines(trace_csv(bare.method, bare.trace, CsvOptions{false}));
  for (std::size_t i = 1; i < bare_rows.size(); ++i) {
    const auto cells = split(bare_rows[i]);
    EXPECT_EQ(cells[3], "");
    EXPECT_EQ(cells[6], "");
    EXPECT_EQ(cells[9], "");
  }
}

TEST(RecordSchedule, DefaultSpacing) {
  RecordSchedule s;
  EXPECT_EQ(s.epochs(1000).size(), 1001u);
  const auto log = s.epochs(100000);
  EXPECT_EQ(log.front(), 0);
  EXPECT_EQ(log.back(), 100000);
  EXPECT_LE(log.size(), 501u);
  EXPECT_GE(log.size(), 300u);
  EXPECT_TRUE(std::is_sorted(log.begin(), log.end()));
}

TEST(Experiment, LalmOnTinyQcqpReachesGap) {
  ExperimentConfig cfg;
  cfg.problem = "tiny:scalar-qcqp";
  cfg.solver.max_epochs = 1000;
  const ExperimentOutcome out = run_experiment(cfg);
  ASSERT_TRUE(out.reference);
  EXPECT_EQ(out.reference->provenance, Provenance::hand);
  ASSERT_TRUE(out.result.trace.back().obj_gap);
  EXPECT_LE(*out.result.trace.back().obj_gap, 1e-6);
}

TEST(Experiment, BlalmSeedIsByteReproducible) {
  TempDir dir("repro");
  ExperimentConfig cfg;
  cfg.problem = "qcqp";
  cfg.p = 20;
  cfg.m = 3;
  cfg.blocks = 5;
  cfg.method = Method::blalm;
  cfg.seed = 7;
  cfg.solver.max_epochs = 50;
  cfg.timing = false;
  cfg.reference = ReferencePolicy::none;
  cfg.out = dir.file("a.csv");
  run_experiment(cfg);
  cfg.out = dir.file("b.csv");
  run_experiment(cfg);
  const std::string a = slurp(dir.file("a.csv"));
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, slurp(dir.file("b.csv")));
}

TEST(Experiment, PdynRejectsEqualities) {
  ExperimentConfig cfg;
  cfg.problem = "tiny:equality-qp";
  cfg.method = Method::pdyn;
  try {
    run_experiment(cfg);
    FAIL();
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("equality"), std::string::npos);
  }
}

TEST(Experiment, ReferenceResolution) {
  ExperimentConfig cfg;
  cfg.problem = "minimax";
  cfg.solver.max_epochs = 10;
  const ExperimentOutcome mm = run_experiment(cfg);
  ASSERT_TRUE(mm.reference);
  EXPECT_EQ(mm.reference->provenance, Provenance::brute_force);
  cfg.reference = ReferencePolicy::none;
  EXPECT_FALSE(run_experiment(cfg).reference);
  cfg.problem = "lp";
  EXPECT_THROW(run_experiment(cfg), InvalidArgument);
}

TEST(Config, FlatKeysAndOverrides) {
  TempDir dir("config");
  {
    std::ofstream os(dir.file("cfg.json"));
    os << R"({"problem": "qcqp", "method": "blalm", "beta": 0.1, "rho-z": 0.005, "blocks": 20, "epochs": 300,
              "p": 200, "m": 10, "step-mode": "analytic", "no-timing": true})";
  }
  ExperimentConfig cfg = load_config(dir.file("cfg.json"));
  EXPECT_EQ(cfg.method, Method::blalm);
  EXPECT_EQ(cfg.problem, "qcqp");
  EXPECT_DOUBLE_EQ(cfg.solver.beta, 0.1);
  EXPECT_DOUBLE_EQ(*cfg.solver.rho_z, 0.005);
  EXPECT_EQ(*cfg.blocks, 20);
  EXPECT_EQ(cfg.solver.max_epochs, 300);
  EXPECT_EQ(cfg.solver.step_mode, StepMode::analytic);
  EXPECT_FALSE(cfg.timing);
  apply_json(cfg, Json{{"method", "lalm"}, {"beta", 0.2}});
  EXPECT_EQ(cfg.method, Method::lalm);
  EXPECT_DOUBLE_EQ(cfg.solver.beta, 0.2);
  EXPECT_EQ(*cfg.blocks, 20);
  EXPECT_THROW(apply_json(cfg, Json{{"bogus", 1}}), InvalidArgument);
  EXPECT_THROW(apply_json(cfg, Json{{"method", "admm"}}), InvalidArgument);
}

TEST(Cli, FlagsOverrideConfigAndExitCodes) {
  TempDir dir("cli");
  {
    std::ofstream os(dir.file("cfg.json"));
    os << R"({"problem": "tiny:scalar-qcqp", "method": "pdyn", "epochs": 20, "no-timing": true})";
  }
  ASSERT_EQ(run_cli("--config " + dir.file("cfg.json") + " --method lalm --out " + dir.file("t.csv")), 0);
  const auto rows = lines(slurp(dir.file("t.csv")));
  ASSERT_EQ(rows.size(), 22u);
  EXPECT_EQ(split(rows[1])[0], "lalm");
  EXPECT_EQ(split(rows[1]).size(), 10u);

  EXPECT_EQ(run_cli("--problem tiny:equality-qp --method pdyn --epochs 5"), 2);
  EXPECT_EQ(run_cli("--problem qcqp --p 4 --m 1 --beta -1"), 2);
  EXPECT_NE(run_cli("--no-such-flag"), 0);

  ASSERT_EQ(run_cli("--problem qcqp --p 6 --m 2 --seed 3 --export-instance " + dir.file("inst.json")), 0);
  ASSERT_EQ(run_cli("--instance " + dir.file("inst.json") + " --seed 3 --method blalm --blocks 3 --epochs 30 --no-timing "
                    "--reference none --out " + dir.file("x.csv")),
            0);
  ASSERT_EQ(run_cli("--problem qcqp --p 6 --m 2 --seed 3 --method blalm --blocks 3 --epochs 30 --no-timing "
                    "--reference none --out " + dir.file("y.csv")),
            0);
  EXPECT_EQ(slurp(dir.file("x.csv")), slurp(dir.file("y.csv")));
}

TEST(LongRun, MatchesHandReferencesAndCaches) {
  TempDir dir("cache");
  for (TinyKind kind : {TinyKind::equality_qp, TinyKind::scalar_qcqp, TinyKind::scalar_bpdn}) {
    auto [prob, hand] = tiny_reference(kind);
    LongRunOptions opt;
    opt.cache_dir = dir.path().string();
    opt.quiet = true;
    const InstanceDocument doc = make_document(kind);
    const LongRunResult first = long_run_reference(doc, opt);
    EXPECT_EQ(first.ref.provenance, Provenance::long_run);
    EXPECT_TRUE(first.converged) << to_string(kind);
    EXPECT_FALSE(first.from_cache);
    EXPECT_LE((first.ref.x - hand.x).norm(), 1e-8) << to_string(kind);
    EXPECT_NEAR(first.ref.f0, hand.f0, 1e-8) << to_string(kind);

    const LongRunResult second = long_run_reference(doc, opt);
    EXPECT_TRUE(second.from_cache);
    EXPECT_EQ(second.ref.x, first.ref.x);
    EXPECT_EQ(second.ref.z, first.ref.z);
    EXPECT_EQ(second.ref.f0, first.ref.f0);
    EXPECT_EQ(second.iterations, first.iterations);
  }
  LongRunOptions off;
  off.cache_dir = "";
  off.quiet = true;
  EXPECT_FALSE(long_run_reference(make_document(TinyKind::scalar_qcqp), off).from_cache);
  EXPECT_FALSE(long_run_reference(make_document(TinyKind::scalar_qcqp), off).from_cache);
}

TEST(LongRun, BpdnIndependentRunsAgree) {
  BpdnSpec spec;
  const InstanceDocument doc = make_document(spec);
  LongRunOptions a, b;
  a.cache_dir = b.cache_dir = "";
  a.quiet = b.quiet = true;
  a.eta0 = 1.0;
  b.eta0 = 37.0;
  const LongRunResult ra = long_run_reference(doc, a), rb = long_run_reference(doc, b);
  EXPECT_TRUE(ra.converged);
  EXPECT_TRUE(rb.converged);
  EXPECT_NEAR(ra.ref.f0, rb.ref.f0, 1e-7);
}

TEST(LongRun, InstanceHashTracksContent) {
  QcqpSpec spec;
  spec.p = 5;
  spec.m = 1;
  spec.blocks = 1;
  const std::string h = instance_hash(make_document(spec));
  EXPECT_EQ(h, instance_hash(make_document(spec)));
  spec.seed = 1;
  EXPECT_NE(h, instance_hash(make_document(spec)));
  EXPECT_EQ(h.size(), 16u);
}
