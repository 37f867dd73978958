#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ivuq {

/// Flat `key = value` text with optional `[section]` headers and `#`
/// comments. Keys inside a section are stored as "section.key". Repeated keys
/// keep every value in file order.
class KeyValueFile {
 public:
  static KeyValueFile parse(const std::string& text, const std::string& origin = "<string>");
  static KeyValueFile load(const std::filesystem::path& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  /// Last value for `key`; throws InvalidArgument when absent.
  const std::string& get(const std::string& key) const;
  std::optional<std::string> find(const std::string& key) const;
  const std::vector<std::string>& all(const std::string& key) const;
  std::vector<std::string> keys() const;

  double get_double(const std::string& key) const;
  long long get_int(const std::string& key) const;
  std::vector<double> get_doubles(const std::string& key) const;

  void set(const std::string& key, std::string value);
  void add(const std::string& key, std::string value);

  /// Comment lines are not preserved.
  std::string to_string() const;

 private:
  std::string origin_;
  std::vector<std::string> order_;
  std::map<std::string, std::vector<std::string>> values_;
};

std::vector<double> parse_doubles(const std::string& csv, const std::string& what);
/// Shortest text that reads back to the same double.
std::string format_double(double v);
std::string join_doubles(const std::vector<double>& values);

}  // namespace ivuq
