#pragma once

#include "gpbayes/errors.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gpbayes::cli {

/// Config validation failure; the message names the key and, when known, the line.
class ConfigError : public InvalidArgument {
 public:
  ConfigError(const std::string& what, std::string key, int line)
      : InvalidArgument(what), key_(std::move(key)), line_(line) {}
  [[nodiscard]] const std::string& key() const noexcept { return key_; }
  [[nodiscard]] int line() const noexcept { return line_; }

 private:
  std::string key_;
  int line_;
};

/// Flat sectioned key = value file:
///
///   # comment
///   [section]
///   key = value
///   list = 1, 2, 3
///
/// Keys outside any section belong to section "". Every accessor records the effective
/// value (defaults included) so the resolved configuration can be echoed back, and keys
/// that were never read are reported by reject_unknown().
class Config {
 public:
  static Config parse(std::string_view text, std::string source = "<config>");
  static Config load(const std::filesystem::path& path);

  [[nodiscard]] bool has(const std::string& section, const std::string& key) const;
  [[nodiscard]] bool has_section(const std::string& section) const;

  std::string get_string(const std::string& section, const std::string& key,
                         std::optional<std::string> fallback = std::nullopt) const;
  double get_double(const std::string& section, const std::string& key,
                    std::optional<double> fallback = std::nullopt) const;
  /// Strictly positive, finite.
  double get_positive(const std::string& section, const std::string& key,
                      std::optional<double> fallback = std::nullopt) const;
  std::uint64_t get_u64(const std::string& section, const std::string& key,
                        std::optional<std::uint64_t> fallback = std::nullopt) const;
  std::size_t get_size(const std::string& section, const std::string& key,
                       std::optional<std::size_t> fallback = std::nullopt) const;
  bool get_bool(const std::string& section, const std::string& key, std::optional<bool> fallback = std::nullopt) const;
  std::vector<double> get_doubles(const std::string& section, const std::string& key,
                                  std::optional<std::vector<double>> fallback = std::nullopt) const;
  std::vector<std::size_t> get_sizes(const std::string& section, const std::string& key,
                                     std::optional<std::vector<std::size_t>> fallback = std::nullopt) const;
  std::vector<std::string> get_strings(const std::string& section, const std::string& key,
                                       std::optional<std::vector<std::string>> fallback = std::nullopt) const;

  /// Replaces (or adds) a value, e.g. for command-line overrides.
  void set(const std::string& section, const std::string& key, std::string value);

  /// Throws ConfigError for the first key (in file order) no accessor has read.
  void reject_unknown() const;

  /// Every value that was read, with defaults filled in, in canonical order.
  [[nodiscard]] std::string resolved_text() const;

  /// Error for a key with a bad value, carrying its line.
  [[nodiscard]] ConfigError error(const std::string& section, const std::string& key, const std::string& problem) const;

 private:
  struct Entry {
    std::string value;
    int line = 0;
    mutable bool used = false;
  };

  [[nodiscard]] const Entry* find(const std::string& section, const std::string& key) const;
  void record(const std::string& section, const std::string& key, const std::string& value) const;
  [[nodiscard]] std::optional<std::string> raw(const std::string& section, const std::string& key) const;

  std::string source_;
  std::map<std::string, std::map<std::string, Entry>> data_;
  mutable std::map<std::string, std::map<std::string, std::string>> resolved_;
};

std::string format_double(double v);

}  // namespace gpbayes::cli
