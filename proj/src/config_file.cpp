#include "asep/config_file.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace asep {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

ConfigFile ConfigFile::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_string(buf.str(), path);
}

ConfigFile ConfigFile::parse_string(const std::string& text,
                                    const std::string& origin) {
  ConfigFile cfg;
  cfg.origin_ = origin;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError(origin + ":" + std::to_string(lineno) +
                          ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty())
        throw ConfigError(origin + ":" + std::to_string(lineno) +
                          ": empty section name");
      continue;
    }
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(lineno) +
                        ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
    if (section.empty())
      throw ConfigError(origin + ":" + std::to_string(lineno) +
                        ": key outside any [section]");
    auto& sec = cfg.sections_[section];
    if (sec.count(key))
      throw ConfigError(origin + ":" + std::to_string(lineno) +
                        ": duplicate key '" + section + "." + key + "'");
    sec[key] = value;
  }
  return cfg;
}

bool ConfigFile::has(const std::string& section, const std::string& key) const {
  auto s = sections_.find(section);
  return s != sections_.end() && s->second.count(key) > 0;
}

std::string ConfigFile::get(const std::string& section,
                            const std::string& key) const {
  auto v = get_opt(section, key);
  if (!v)
    throw ConfigError("config: missing required key '" + section + "." + key +
                      "' in " + origin_);
  return *v;
}

std::optional<std::string> ConfigFile::get_opt(const std::string& section,
                                               const std::string& key) const {
  auto s = sections_.find(section);
  if (s == sections_.end()) return std::nullopt;
  auto k = s->second.find(key);
  if (k == s->second.end()) return std::nullopt;
  consumed_.insert(section + "." + key);
  return k->second;
}

double ConfigFile::get_double(const std::string& section,
                              const std::string& key) const {
  const std::string v = get(section, key);
  char* end = nullptr;
  double x = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0')
    throw ConfigError("config: key '" + section + "." + key +
                      "' is not a number: '" + v + "'");
  return x;
}

double ConfigFile::get_double(const std::string& section,
                              const std::string& key, double fallback) const {
  if (!has(section, key)) return fallback;
  return get_double(section, key);
}

int ConfigFile::get_int(const std::string& section,
                        const std::string& key) const {
  double x = get_double(section, key);
  int i = int(x);
  if (double(i) != x)
    throw ConfigError("config: key '" + section + "." + key +
                      "' must be an integer");
  return i;
}

int ConfigFile::get_int(const std::string& section, const std::string& key,
                        int fallback) const {
  if (!has(section, key)) return fallback;
  return get_int(section, key);
}

uint64_t ConfigFile::get_u64(const std::string& section, const std::string& key,
                             uint64_t fallback) const {
  if (!has(section, key)) return fallback;
  const std::string v = get(section, key);
  char* end = nullptr;
  unsigned long long x = std::strtoull(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0')
    throw ConfigError("config: key '" + section + "." + key +
                      "' is not an unsigned integer: '" + v + "'");
  return uint64_t(x);
}

std::vector<double> ConfigFile::get_doubles(const std::string& section,
                                            const std::string& key) const {
  const std::string v = get(section, key);
  std::vector<double> out;
  std::istringstream in(v);
  std::string tok;
  while (in >> tok) {
    char* end = nullptr;
    double x = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0')
      throw ConfigError("config: key '" + section + "." + key +
                        "' has a non-numeric entry: '" + tok + "'");
    out.push_back(x);
  }
  if (out.empty())
    throw ConfigError("config: key '" + section + "." + key + "' is empty");
  return out;
}

std::vector<int> ConfigFile::get_ints(const std::string& section,
                                      const std::string& key) const {
  auto xs = get_doubles(section, key);
  std::vector<int> out;
  for (double x : xs) {
    int i = int(x);
    if (double(i) != x)
      throw ConfigError("config: key '" + section + "." + key +
                        "' must hold integers");
    out.push_back(i);
  }
  return out;
}

std::vector<std::string> ConfigFile::unknown_keys() const {
  std::vector<std::string> unknown;
  for (const auto& [section, kv] : sections_)
    for (const auto& [key, value] : kv) {
      const std::string full = section + "." + key;
      if (!consumed_.count(full)) unknown.push_back(full);
    }
  return unknown;
}

}  // namespace asep
