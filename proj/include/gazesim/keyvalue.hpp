#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace gazesim {

/// Ordered `key = value` record. Lines starting with '#' and blank lines are
/// ignored when parsing; later duplicates overwrite earlier ones.
class KeyValueFile {
 public:
  static KeyValueFile parse(std::string_view text);

  void set(const std::string& key, std::string value);
  std::optional<std::string> get(const std::string& key) const;
  bool contains(const std::string& key) const { return values_.contains(key); }

  /// Typed accessors; throw InvalidArgument when the value does not parse.
  std::optional<double> get_double(const std::string& key) const;
  std::optional<long long> get_int(const std::string& key) const;

  /// One `key=value` line per entry, in key order, after optional `#` comment lines.
  std::string serialize(std::string_view comment = {}) const;

  const std::map<std::string, std::string>& entries() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace gazesim
