// Command-line front end; talks to the library only through the C API.
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "poachgrid/poachgrid.h"

namespace {

const char* category(int status) {
  switch (status) {
    case PG_CONFIG_ERROR: return "config";
    case PG_INPUT_ERROR: return "input";
    case PG_INVALID_ARGUMENT: return "usage";
    default: return "internal";
  }
}

int report(const std::string& stage, int status, const std::string& message) {
  const nlohmann::json error = {{"stage", stage}, {"category", category(status)}, {"message", message}};
  std::cerr << error.dump() << "\n";
  return status == PG_INVALID_ARGUMENT ? PG_CONFIG_ERROR : status;
}

struct ContextDeleter {
  void operator()(pg_context* ctx) const { pg_context_destroy(ctx); }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Poaching risk pipeline: synthetic data, features, iWare-E models, risk maps"};
  app.set_version_flag("--version", pg_version());
  app.require_subcommand(1, 1);

  std::string config_path;
  std::vector<double> efforts;
  std::optional<std::uint64_t> seed;

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"synth", "Generate a synthetic park from a synth config"},
      {"featurize", "Build aligned feature layers under <output_dir>/features"},
      {"train", "Train one model per test year and condition"},
      {"predict", "Write risk maps for the test years"},
      {"evaluate", "Score held-out years and write metrics.csv"},
      {"run", "featurize, train, predict and evaluate in order"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "Config file (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "Override the seed");
    if (name == "predict" || name == "run") {
      sub->add_option("--effort", efforts, "Patrol effort for a risk map; repeatable")->take_all();
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    const std::string stage = app.get_subcommands().empty() ? "cli" : app.get_subcommands().front()->get_name();
    return report(stage, PG_CONFIG_ERROR, e.what());
  }
  const std::string command = app.get_subcommands().front()->get_name();

  std::unique_ptr<pg_context, ContextDeleter> ctx(pg_context_create());
  if (!ctx) return report(command, PG_INTERNAL_ERROR, "out of memory");
  if (const char* env = std::getenv("POACHGRID_THREADS"); env && *env) {
    char* end = nullptr;
    const unsigned long threads = std::strtoul(env, &end, 10);
    if (*end != '\0' || threads == 0 || threads > 4096) {
      return report(command, PG_CONFIG_ERROR,
                    std::string("POACHGRID_THREADS must be a positive integer, got '") + env + "'");
    }
    pg_context_set_threads(ctx.get(), static_cast<unsigned>(threads));
  }

  const std::uint64_t* seed_ptr = seed ? &*seed : nullptr;
  const pg_status status =
      command == "synth"
          ? pg_synth(ctx.get(), config_path.c_str(), seed_ptr)
          : pg_run_stage(ctx.get(), command.c_str(), config_path.c_str(), efforts.data(),
                         efforts.size(), seed_ptr);
  if (status != PG_OK) {
    const std::string stage = *pg_last_stage(ctx.get()) ? pg_last_stage(ctx.get()) : command;
    return report(stage, status, pg_last_error(ctx.get()));
  }
  return 0;
}
