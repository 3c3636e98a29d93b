#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>

#include "inls/error.hpp"
#include "inls/harness.hpp"

using namespace inls;
using namespace inls::harness;

namespace {

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = fs::temp_directory_path() / ("inls-harness-" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

ErrorCode code_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error for:\n" << text;
  return ErrorCode::IoError;
}

ExperimentConfig config_in(const TempDir& dir, const std::string& text) {
  ExperimentConfig cfg = parse_config(text);
  cfg.quiet = true;
  cfg.cache.dir = dir.path() / "cache";
  cfg.output.dir = dir.path() / "out";
  return cfg;
}

}  // namespace

TEST(Harness, DefaultsAndSections) {
  const ExperimentConfig cfg = parse_config(
      "action = evolve\nseed = 7\n[params]\nc = -0.2\n[grid]\nN = 512\nexponent = 5\n"
      "[initial_data]\nfamily = chirped_gaussian\nchirp = 0.3\n[evolution]\nt_final = 0.5\n");
  EXPECT_EQ(cfg.action, Action::evolve);
  EXPECT_EQ(cfg.seed, 7u);
  EXPECT_EQ(cfg.params.d, 3);
  EXPECT_EQ(cfg.params.b, 0.5);
  EXPECT_EQ(cfg.params.sigma, 2.0);
  EXPECT_EQ(cfg.params.c, -0.2);
  EXPECT_EQ(cfg.grid.N, 512u);
  EXPECT_EQ(cfg.grid.R_max, 20.0);
  EXPECT_EQ(cfg.grid.mapping.exponent, 5.0);
  EXPECT_EQ(cfg.data.family, Family::chirped_gaussian);
  EXPECT_EQ(cfg.data.chirp, 0.3);
  EXPECT_EQ(cfg.evolution.t_final, 0.5);
  EXPECT_EQ(cfg.verify.checks, all_checks());
}

TEST(Harness, ConfigErrors) {
  EXPECT_EQ(code_of("[parms]\nd = 3\n"), ErrorCode::ConfigParseError);
  EXPECT_EQ(code_of("[params]\ndd = 3\n"), ErrorCode::ConfigParseError);
  EXPECT_EQ(code_of("[grid]\nN = 1e3x\n"), ErrorCode::ConfigParseError);
  EXPECT_EQ(code_of("[grid]\nN = 0\n"), ErrorCode::ConfigParseError);
  EXPECT_EQ(code_of("action = explode\n"), ErrorCode::ConfigParseError);
  EXPECT_EQ(code_of("[params]\nsigma = 5\n"), ErrorCode::SigmaNotIntercritical);
  EXPECT_EQ(code_of("[params]\nc = -0.3\n"), ErrorCode::CouplingBelowHardy);
  EXPECT_EQ(code_of("[evolution]\ndt = 0\n"), ErrorCode::ConfigInvalid);
  EXPECT_EQ(code_of("action = sweep\n"), ErrorCode::ConfigParseError);
  EXPECT_EQ(code_of("action = sweep\n[sweep]\nparams.c = \n"), ErrorCode::ConfigParseError);
  EXPECT_EQ(code_of("action = sweep\n[sweep]\naction = sweep\nparams.c = 0\n"), ErrorCode::ConfigParseError);
  EXPECT_EQ(code_of("action = sweep\n[sweep]\nparams.c = 0, -0.5\n"), ErrorCode::CouplingBelowHardy);
  EXPECT_EQ(code_of("[sweep]\noutput.dir = a, b\n"), ErrorCode::ConfigParseError);
  EXPECT_EQ(code_of("[verify]\nchecks = hardy, nope\n"), ErrorCode::ConfigParseError);
  EXPECT_EQ(code_of("[output]\nsummary = ../x.json\n"), ErrorCode::ConfigParseError);
  EXPECT_EQ(code_of("[params]\nd = 3\nd = 4\n"), ErrorCode::ConfigParseError);
  EXPECT_EQ(parse_config("[verify]\nchecks =\n").verify.checks.size(), 0u);
}

TEST(Harness, GitBlobHash) {
  // git hash-object of "hello\n" and of the empty blob.
  EXPECT_EQ(git_blob_hash("hello\n"), "ce013625030ba8dba906f756967f9e9ca394464a");
  EXPECT_EQ(git_blob_hash(""), "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
}

TEST(Harness, CacheKeyCoversEveryField) {
  const Params p = Params::validate(3, 0.5, 2.0, 0.0);
  const GridConfig g;
  const std::string base = GroundStateCache::key(p, g);
  std::vector<std::string> keys{base};
  keys.push_back(GroundStateCache::key(Params::validate(4, 0.5, 1.2, 0.0), g));
  keys.push_back(GroundStateCache::key(Params::validate(3, 0.6, 2.0, 0.0), g));
  keys.push_back(GroundStateCache::key(Params::validate(3, 0.5, 2.1, 0.0), g));
  keys.push_back(GroundStateCache::key(Params::validate(3, 0.5, 2.0, 1e-15), g));
  GridConfig h = g;
  h.N = 2049;
  keys.push_back(GroundStateCache::key(p, h));
  h = g;
  h.R_max = std::nextafter(20.0, 30.0);
  keys.push_back(GroundStateCache::key(p, h));
  h = g;
  h.mapping.exponent = 5.0;
  keys.push_back(GroundStateCache::key(p, h));
  h = g;
  h.mapping = {MappingKind::uniform, 1.0};
  keys.push_back(GroundStateCache::key(p, h));
  std::sort(keys.begin(), keys.end());
  EXPECT_EQ(std::unique(keys.begin(), keys.end()), keys.end());
  EXPECT_EQ(GroundStateCache::key(p, g), base);
}

TEST(Harness, CacheRoundTripIsBitIdentical) {
  TempDir dir;
  const Params p = Params::validate(3, 0.5, 2.0, 0.5);
  GridConfig grid;
  grid.N = 512;
  const GroundStateCache cache(dir.path() / "cache");
  EXPECT_FALSE(cache.load(p, grid).has_value());
  try {
    cache.obtain(p, grid, true);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::CacheMiss);
  }
  bool hit = true;
  const GroundStateBundle first = cache.obtain(p, grid, false, &hit);
  EXPECT_FALSE(hit);
  const GroundStateBundle direct =
      solve_ground_state(p, std::make_shared<const RadialGrid>(build_grid(p, grid.N, grid.R_max, grid.mapping)));
  const GroundStateBundle again = cache.obtain(p, grid, true, &hit);
  EXPECT_TRUE(hit);
  for (const GroundStateBundle* b : {&direct, &again}) {
    EXPECT_EQ(b->Q, first.Q);
    EXPECT_EQ(b->M_G, first.M_G);
    EXPECT_EQ(b->E_G, first.E_G);
    EXPECT_EQ(b->C_GN, first.C_GN);
    EXPECT_EQ(b->H_G, first.H_G);
    EXPECT_EQ(b->residuals_pohozaev, first.residuals_pohozaev);
    EXPECT_EQ(b->iterations, first.iterations);
  }
  // No temp files left behind.
  int files = 0;
  for (const auto& e : fs::directory_iterator(cache.dir())) {
    ++files;
    EXPECT_EQ(e.path().filename().string().rfind("gs-", 0), 0u);
  }
  EXPECT_EQ(files, 1);
}

TEST(Harness, CorruptCacheFileIsResolved) {
  TempDir dir;
  const Params p = Params::validate(3, 0.5, 2.0, 0.0);
  GridConfig grid;
  grid.N = 256;
  const GroundStateCache cache(dir.path());
  const GroundStateBundle good = cache.obtain(p, grid, false);
  {
    std::ofstream f(cache.path_for(p, grid), std::ios::trunc);
    f << "# inls ground state\nkey garbage\n";
  }
  EXPECT_FALSE(cache.load(p, grid).has_value());
  bool hit = true;
  EXPECT_EQ(cache.obtain(p, grid, false, &hit).Q, good.Q);
  EXPECT_FALSE(hit);
}

TEST(Harness, CacheDirectoryPrecedence) {
  ExperimentConfig cfg;
  cfg.cache.dir = "from_config";
  ::unsetenv("INLS_CACHE_DIR");
  EXPECT_EQ(resolve_cache_dir(cfg, std::nullopt), fs::path("from_config"));
  ::setenv("INLS_CACHE_DIR", "from_env", 1);
  EXPECT_EQ(resolve_cache_dir(cfg, std::nullopt), fs::path("from_env"));
  EXPECT_EQ(resolve_cache_dir(cfg, fs::path("from_flag")), fs::path("from_flag"));
  ::unsetenv("INLS_CACHE_DIR");
}

TEST(Harness, ExitCodes) {
  EXPECT_EQ(exit_code_for(ErrorCode::ConfigParseError), 2);
  EXPECT_EQ(exit_code_for(ErrorCode::SigmaNotIntercritical), 2);
  EXPECT_EQ(exit_code_for(ErrorCode::IoError), 3);
  EXPECT_EQ(exit_code_for(ErrorCode::CacheMiss), 3);
  EXPECT_EQ(exit_code_for(ErrorCode::NoConvergence), 1);
}

TEST(Harness, GroundStateRerunIsByteIdentical) {
  TempDir dir;
  const ExperimentConfig cfg = config_in(dir, "action = ground-state\n[grid]\nN = 1024\n");
  const RunResult first = run_experiment(cfg);
  ASSERT_EQ(first.exit_code, 0);
  const std::string a = slurp(first.artifacts.front());
  const RunResult second = run_experiment(cfg);
  EXPECT_EQ(slurp(second.artifacts.front()), a);
  EXPECT_EQ(first.summary["input_hash"], git_blob_hash(config_echo(cfg).dump()));
  EXPECT_EQ(first.summary["config"]["grid"]["N"], 1024);
  EXPECT_LT(first.summary["ground_state"]["residuals_pohozaev"][0].get<double>(), 1e-5);
  EXPECT_EQ(a.find("hit"), std::string::npos);

  ExperimentConfig other = cfg;
  other.grid.R_max = 25.0;
  EXPECT_NE(run_experiment(other).summary["input_hash"], first.summary["input_hash"]);
}

TEST(Harness, ClassifyScaledGroundState) {
  TempDir dir;
  const ExperimentConfig cfg = config_in(
      dir, "action = classify\n[initial_data]\nfamily = scaled_ground_state\nlambda = 0.9\nmode = amplitude\n");
  const RunResult r = run_experiment(cfg);
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_EQ(r.summary["classification"]["regime"], "below_global");

  ExperimentConfig strict = cfg;
  strict.cache.dir = dir.path() / "empty";
  strict.cache.require_cached_groundstate = true;
  std::string msg;
  EXPECT_EQ(run_guarded(strict, &msg), 3);
  EXPECT_NE(msg.find("CacheMiss"), std::string::npos);
}

TEST(Harness, EvolveWritesTrajectory) {
  TempDir dir;
  const ExperimentConfig cfg = config_in(dir,
                                         "action = evolve\n[grid]\nexponent = 5\n[initial_data]\n"
                                         "family = scaled_ground_state\nlambda = 1.1\n"
                                         "[evolution]\nt_final = 0.1\nsnapshot_stride = 50\n");
  const RunResult r = run_experiment(cfg);
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_EQ(r.summary["trajectory"]["status"], "blowup_detected");
  EXPECT_GE(r.summary["trajectory"]["h1c_norm_growth"].get<double>(), 100.0);
  ASSERT_EQ(r.artifacts.size(), 2u);
  std::ifstream csv(r.artifacts[1]);
  std::string header, line;
  std::getline(csv, header);
  EXPECT_EQ(header, "t,mass,h1c_sq,energy,potential,g_value,variance,variance_rate,dt");
  std::size_t rows = 0;
  while (std::getline(csv, line)) ++rows;
  EXPECT_EQ(rows, r.summary["trajectory"]["snapshots"].get<std::size_t>());
}

TEST(Harness, VerifySuiteReports) {
  TempDir dir;
  ExperimentConfig cfg = config_in(dir, "action = verify\n[verify]\nsamples = 20\n");
  const RunResult fine = run_experiment(cfg);
  EXPECT_EQ(fine.exit_code, 0);
  EXPECT_EQ(fine.summary["failed"], 0);
  EXPECT_EQ(fine.summary["checks"].size(), all_checks().size());
  EXPECT_TRUE(fs::exists(cfg.output.dir / cfg.output.report));
  const auto& rows = fine.summary["order_table"]["rows"];
  ASSERT_EQ(rows.size(), 3u);
  const double order = fine.summary["order_table"]["observed_order"]["M_G"].get<double>();
  EXPECT_GT(order, 3.5);
  EXPECT_LT(order, 4.5);

  ExperimentConfig coarse = cfg;
  coarse.grid.N = 256;
  coarse.verify.checks = {"pohozaev"};
  const RunResult c = run_experiment(coarse);
  const double worst_fine = fine.summary["checks"][1]["measurements"][0]["value"].get<double>();
  const double worst_coarse = c.summary["checks"][0]["measurements"][0]["value"].get<double>();
  EXPECT_GT(worst_coarse, worst_fine);

  ExperimentConfig empty = cfg;
  empty.verify.checks.clear();
  const RunResult e = run_experiment(empty);
  EXPECT_EQ(e.exit_code, 0);
  EXPECT_EQ(e.summary["checks"].size(), 0u);
}

TEST(Harness, VerifyFailureGivesExitOne) {
  TempDir dir;
  // At N = 64 the Pohozaev residuals are far above 1e-5.
  ExperimentConfig cfg = config_in(dir, "action = verify\n[grid]\nN = 64\n[verify]\nchecks = pohozaev\n");
  const RunResult r = run_experiment(cfg);
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_EQ(r.summary["all_passed"], false);
  EXPECT_GT(r.summary["checks"][0]["measurements"][0]["value"].get<double>(), 1e-5);
}

TEST(Harness, SweepWritesPerJobDirectories) {
  TempDir dir;
  const ExperimentConfig cfg = config_in(dir,
                                         "action = sweep\n[grid]\nN = 512\n[initial_data]\nfamily = scaled_ground_state\n"
                                         "[sweep]\naction = classify\nparams.c = 0, 0.5\ninitial_data.lambda = 0.9, 1.1\n");
  const RunResult r = run_experiment(cfg);
  EXPECT_EQ(r.exit_code, 0);
  ASSERT_EQ(r.summary["jobs"].size(), 4u);
  for (const auto& job : r.summary["jobs"]) {
    EXPECT_TRUE(fs::exists(cfg.output.dir / job["dir"].get<std::string>() / "summary.json"));
    const bool below = job["values"]["initial_data.lambda"] == "0.9";
    EXPECT_EQ(job["regime"], below ? "below_global" : "below_blowup");
  }
  const std::string a = slurp(r.artifacts.front());
  EXPECT_EQ(slurp(run_experiment(cfg).artifacts.front()), a);
}

TEST(Harness, UnwritableOutputIsIoError) {
  TempDir dir;
  ExperimentConfig cfg = config_in(dir, "action = ground-state\n[grid]\nN = 128\n");
  const fs::path blocker = dir.path() / "file";
  std::ofstream(blocker) << "x";
  cfg.output.dir = blocker / "sub";
  std::string msg;
  EXPECT_EQ(run_guarded(cfg, &msg), 3);
}
