#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace pinyinasr {

/// Flat `key = value` settings. '#' starts a comment; later assignments win.
class KeyValueConfig {
 public:
  static KeyValueConfig load(const std::filesystem::path& path);
  static KeyValueConfig parse(std::istream& in, const std::string& source = "<stream>");

  void set(std::string key, std::string value);
  /// Applies a `key=value` override; throws ConfigError if malformed.
  void apply(std::string_view assignment);

  bool contains(std::string_view key) const { return values_.contains(std::string(key)); }
  std::optional<std::string> get(std::string_view key) const;
  std::string get_string(std::string_view key, std::string fallback) const;
  long long get_int(std::string_view key, long long fallback) const;
  std::uint64_t get_uint(std::string_view key, std::uint64_t fallback) const;
  double get_double(std::string_view key, double fallback) const;
  bool get_bool(std::string_view key, bool fallback) const;

  const std::map<std::string, std::string>& values() const { return values_; }

  /// Sorted `key=value` lines.
  std::string canonical() const;
  /// First 16 hex digits of the SHA-256 of canonical().
  std::string hash() const;

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace pinyinasr
