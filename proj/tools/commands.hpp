#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "config.hpp"

namespace fslab::cli {

/// Output directory plus the list of files written so far, for the manifest.
class RunContext {
 public:
  RunContext(Config config, std::filesystem::path out_dir, std::uint64_t seed, bool gnuplot);

  const Config& config() const { return config_; }
  std::uint64_t seed() const { return seed_; }
  bool gnuplot() const { return gnuplot_; }

  /// Atomic write into the output directory; records size and checksum.
  void write(const std::string& name, const std::string& contents);
  /// Writes config.cfg and manifest.json. Call last.
  void finish(const std::string& command);

 private:
  Config config_;
  std::filesystem::path out_dir_;
  std::uint64_t seed_;
  bool gnuplot_;
  std::map<std::string, std::string> files_;
};

struct Command {
  std::string name;
  std::string summary;
  std::map<std::string, std::string> defaults;
  std::function<void(RunContext&)> run;
};

const std::vector<Command>& commands();

}  // namespace fslab::cli
