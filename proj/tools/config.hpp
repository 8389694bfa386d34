#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace fslab::cli {

/// Bad user input; maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Line-based `key = value` configuration with `#` comments. Every value
/// remembers where it came from so errors can point at the offending line.
class Config {
 public:
  /// Keys the command accepts, with their default values.
  explicit Config(std::map<std::string, std::string> defaults);

  void load_file(const std::filesystem::path& path);
  /// Applies a `key=value` override from the command line.
  void apply_override(const std::string& assignment);

  std::string text(const std::string& key) const;
  double number(const std::string& key) const;
  int integer(const std::string& key) const;
  bool flag(const std::string& key) const;
  std::vector<double> numbers(const std::string& key) const;
  /// Throws ConfigError naming the key's origin.
  [[noreturn]] void fail(const std::string& key, const std::string& message) const;

  /// Effective configuration in file syntax, keys sorted.
  std::string render() const;

 private:
  struct Entry {
    std::string value;
    std::string origin;
  };
  const Entry& entry(const std::string& key) const;
  void assign(const std::string& key, const std::string& value, const std::string& origin);

  std::map<std::string, Entry> entries_;
};

}  // namespace fslab::cli
