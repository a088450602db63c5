#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "newsamp/cli.hpp"

namespace {

using newsamp::cli::KeyValueConfig;

KeyValueConfig build_config(const std::string& config_path,
                            const std::vector<std::string>& overrides) {
  KeyValueConfig cfg = config_path.empty()
                           ? KeyValueConfig{}
                           : KeyValueConfig::from_file(config_path);
  for (const auto& item : overrides) {
    auto eq = item.find('=');
    if (eq == std::string::npos)
      throw newsamp::ConfigError("--set expects key=value, got '" + item +
                                 "'");
    cfg.set(item.substr(0, eq), item.substr(eq + 1));
  }
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sub-sampled Newton optimization toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  app.add_option("-c,--config", config_path, "run configuration file");
  app.add_option("-s,--set", overrides,
                 "override a config key, e.g. --set run.seed=3");

  auto* generate = app.add_subcommand(
      "generate", "write a synthetic spiked-covariance dataset");
  auto* optimize =
      app.add_subcommand("optimize", "run one optimization method");
  auto* benchmark = app.add_subcommand(
      "benchmark", "compare methods against a shared reference solution");
  auto* coeffs = app.add_subcommand(
      "coeffs", "report convergence coefficients and parameter suggestions");
  for (auto* sub : {generate, optimize, benchmark, coeffs})
    sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    KeyValueConfig cfg = build_config(config_path, overrides);
    if (generate->parsed()) return newsamp::cli::cmd_generate(cfg, std::cout);
    if (optimize->parsed()) return newsamp::cli::cmd_optimize(cfg, std::cout);
    if (benchmark->parsed())
      return newsamp::cli::cmd_benchmark(cfg, std::cout);
    if (coeffs->parsed()) return newsamp::cli::cmd_coeffs(cfg, std::cout);
  } catch (const std::exception& e) {
    nlohmann::ordered_json err;
    err["error"]["type"] = newsamp::cli::error_type(e);
    err["error"]["message"] = e.what();
    std::cerr << err.dump() << std::endl;
    return 1;
  }
  return 2;
}
