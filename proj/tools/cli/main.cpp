#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "inls/error.hpp"
#include "inls/harness.hpp"

using namespace inls;
using namespace inls::harness;

int main(int argc, char** argv) {
  CLI::App app{"Radial inhomogeneous NLS with inverse-square potential: ground states, classification, evolution"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string cache_dir, out_dir;
  std::optional<std::uint64_t> seed;
  bool quiet = false;
  app.add_option("--config", config_path, "experiment config (INI)")->required();
  app.add_option("--cache-dir", cache_dir, "ground-state cache directory (default: $INLS_CACHE_DIR, then the config)");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "seed for randomized checks");
  app.add_flag("--quiet", quiet, "no progress messages");

  const std::pair<const char*, const char*> commands[] = {
      {"ground-state", "solve (or load) the ground state and report its constants"},
      {"classify", "classify the initial data against the ground-state thresholds"},
      {"evolve", "evolve the initial data and write the invariant time series"},
      {"verify", "run the identity and inequality checks"},
      {"sweep", "run the [sweep] product of configurations in parallel"},
  };
  for (const auto& [name, help] : commands) app.add_subcommand(name, help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  ExperimentConfig cfg;
  try {
    cfg = load_config(config_path);
    const std::string sub = app.get_subcommands().front()->get_name();
    auto entries = cfg.entries;
    entries["action"] = sub;
    cfg = config_from_entries(entries);
  } catch (const Error& e) {
    std::cerr << "inls: " << e.what() << "\n";
    return exit_code_for(e.code());
  }
  cfg.quiet = quiet;
  if (seed) cfg.seed = *seed;
  if (!out_dir.empty()) cfg.output.dir = out_dir;
  cfg.cache.dir = resolve_cache_dir(cfg, cache_dir.empty() ? std::nullopt : std::optional<fs::path>(cache_dir));

  std::string message;
  const int code = run_guarded(cfg, &message);
  if (!message.empty()) std::cerr << "inls: " << message << "\n";
  if (!quiet && message.empty()) std::cerr << "inls: wrote " << (cfg.output.dir / (cfg.action == Action::verify ? cfg.output.report : cfg.output.summary)).string() << "\n";
  return code;
}
