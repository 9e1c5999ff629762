#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>
#include <string>

#include "perifront_app/runner.hpp"

namespace {

bool configure_logging() {
  auto logger = spdlog::stderr_color_mt("perifront");
  logger->set_pattern("[%l] %v");
  spdlog::set_default_logger(logger);
  const char* env = std::getenv("PERIFRONT_LOG");
  const std::string level = env ? env : "info";
  if (level == "error") {
    spdlog::set_level(spdlog::level::err);
  } else if (level == "info") {
    spdlog::set_level(spdlog::level::info);
  } else if (level == "debug") {
    spdlog::set_level(spdlog::level::debug);
  } else {
    std::cerr << "PERIFRONT_LOG must be one of error, info, debug (got '" << level << "')\n";
    return false;
  }
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  if (!configure_logging()) return perifront_app::kConfigError;

  CLI::App app{"Pulsating front and spreading-speed experiments for nonlocal KPP equations", "perifront"};
  perifront_app::RunRequest req;
  unsigned threads = 0;
  app.add_option("subcommand", req.subcommand, "Experiment to run")
      ->required()
      ->check(CLI::IsMember(perifront_app::subcommands()));
  app.add_option("--config", req.config, "TOML problem configuration")->required();
  app.add_option("--out", req.out, "Output directory")->required();
  auto* t = app.add_option("--threads", threads, "Worker threads (overrides numerics.threads)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return perifront_app::kConfigError;
  }
  if (t->count() > 0) req.threads = threads;
  return perifront_app::run(req);
}
