#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "config.hpp"
#include "fslab/errors.hpp"
#include "fslab/version.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kNumericalFailure = 3;

struct Options {
  std::string config;
  std::string out;
  std::uint64_t seed = 0;
  std::vector<std::string> overrides;
  bool gnuplot = false;
};

}  // namespace

int main(int argc, char** argv) {
  using namespace fslab::cli;

  CLI::App app{"Fock-space lattice toolkit"};
  app.set_version_flag("--version", std::string(fslab::version));
  app.require_subcommand(1);

  Options opts;
  std::vector<std::pair<CLI::App*, const Command*>> subs;
  for (const auto& cmd : commands()) {
    auto* sub = app.add_subcommand(cmd.name, cmd.summary);
    sub->add_option("--config", opts.config, "key = value configuration file")->check(CLI::ExistingFile);
    sub->add_option("--out", opts.out, "output directory")->required();
    sub->add_option("--seed", opts.seed, "random seed")->capture_default_str();
    sub->add_option("--set", opts.overrides, "override a configuration key (key=value)");
    sub->add_flag("--gnuplot", opts.gnuplot, "also write a gnuplot script");
    subs.emplace_back(sub, &cmd);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  const Command* cmd = nullptr;
  for (const auto& [sub, c] : subs) {
    if (sub->parsed()) cmd = c;
  }

  try {
    Config config(cmd->defaults);
    if (!opts.config.empty()) config.load_file(opts.config);
    for (const auto& o : opts.overrides) config.apply_override(o);
    RunContext ctx(std::move(config), opts.out, opts.seed, opts.gnuplot);
    cmd->run(ctx);
    ctx.finish(cmd->name);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const fslab::DimensionError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const fslab::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumericalFailure;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
