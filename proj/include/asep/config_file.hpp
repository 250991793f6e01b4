#ifndef ASEP_CONFIG_FILE_HPP
#define ASEP_CONFIG_FILE_HPP

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace asep {

// Raised for malformed or inconsistent configuration; the CLI maps it to
// exit code 2, as opposed to numerical failures (exit 3).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Flat sectioned key=value text:
//   [section]
//   key = value            # comment
// Values keep everything after '=' (trimmed), so expressions with spaces are
// fine. Duplicate keys are an error.
class ConfigFile {
 public:
  static ConfigFile parse_file(const std::string& path);
  static ConfigFile parse_string(const std::string& text,
                                 const std::string& origin = "<string>");

  bool has(const std::string& section, const std::string& key) const;

  // Typed getters mark the key consumed; unknown_keys() lists everything
  // never consumed, which callers treat as an error.
  std::string get(const std::string& section, const std::string& key) const;
  std::optional<std::string> get_opt(const std::string& section,
                                     const std::string& key) const;
  double get_double(const std::string& section, const std::string& key) const;
  double get_double(const std::string& section, const std::string& key,
                    double fallback) const;
  int get_int(const std::string& section, const std::string& key) const;
  int get_int(const std::string& section, const std::string& key,
              int fallback) const;
  uint64_t get_u64(const std::string& section, const std::string& key,
                   uint64_t fallback) const;
  std::vector<double> get_doubles(const std::string& section,
                                  const std::string& key) const;
  std::vector<int> get_ints(const std::string& section,
                            const std::string& key) const;

  std::vector<std::string> unknown_keys() const;

 private:
  std::map<std::string, std::map<std::string, std::string>> sections_;
  mutable std::set<std::string> consumed_;
  std::string origin_;
};

}  // namespace asep

#endif
