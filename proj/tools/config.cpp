#include "config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace fslab::cli {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool parse_double(const std::string& s, double& out) {
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

}  // namespace

Config::Config(std::map<std::string, std::string> defaults) {
  for (auto& [key, value] : defaults) entries_[key] = {std::move(value), "default"};
}

void Config::assign(const std::string& key, const std::string& value, const std::string& origin) {
  auto it = entries_.find(key);
  if (it == entries_.end()) {
    std::string known;
    for (const auto& [k, e] : entries_) known += (known.empty() ? "" : ", ") + k;
    throw ConfigError(origin + ": unknown key '" + key + "' (accepted: " + known + ")");
  }
  it->second = {value, origin};
}

void Config::load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open config file");
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string origin = path.filename().string() + ":" + std::to_string(number);
    const auto hash = line.find('#');
    const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ": expected 'key = value', got '" + body + "'");
    }
    const std::string key = trim(body.substr(0, eq));
    if (key.empty()) throw ConfigError(origin + ": missing key before '='");
    assign(key, trim(body.substr(eq + 1)), origin);
  }
}

void Config::apply_override(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) {
    throw ConfigError("--set " + assignment + ": expected key=value");
  }
  assign(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)), "--set " + assignment);
}

const Config::Entry& Config::entry(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) throw std::logic_error("config key '" + key + "' not declared");
  return it->second;
}

void Config::fail(const std::string& key, const std::string& message) const {
  const auto& e = entry(key);
  throw ConfigError(e.origin + ": " + key + " = '" + e.value + "': " + message);
}

std::string Config::text(const std::string& key) const { return entry(key).value; }

double Config::number(const std::string& key) const {
  double out = 0.0;
  if (!parse_double(text(key), out)) fail(key, "expected a number");
  return out;
}

int Config::integer(const std::string& key) const {
  const std::string& s = text(key);
  int out = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec != std::errc() || ptr != s.data() + s.size()) fail(key, "expected an integer");
  return out;
}

bool Config::flag(const std::string& key) const {
  const std::string& s = text(key);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  fail(key, "expected true or false");
}

std::vector<double> Config::numbers(const std::string& key) const {
  std::vector<double> out;
  std::stringstream ss(text(key));
  std::string item;
  while (std::getline(ss, item, ',')) {
    double x = 0.0;
    if (!parse_double(trim(item), x)) fail(key, "expected a comma-separated list of numbers");
    out.push_back(x);
  }
  if (out.empty()) fail(key, "list is empty");
  return out;
}

std::string Config::render() const {
  std::string out;
  for (const auto& [key, e] : entries_) out += key + " = " + e.value + "\n";
  return out;
}

}  // namespace fslab::cli
