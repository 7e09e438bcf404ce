#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace gpbayes::cli {

/// Identifies a run in every `.meta` file.
struct RunInfo {
  std::string kind;
  std::uint64_t seed = 0;
  std::string version;
  std::string config_hash;
};

using Row = std::vector<std::string>;
using KeyValues = std::vector<std::pair<std::string, std::string>>;

std::string cell(double v);
std::string cell(std::size_t v);
std::string cell(int v);

/// 64-bit FNV-1a, as 16 lowercase hex digits.
std::string fnv1a_hex(const std::string& text);

/// Writes experiment outputs into one directory. Each CSV gets a `<name>.meta` sibling.
class OutputDir {
 public:
  OutputDir(std::filesystem::path dir, RunInfo info);

  void csv(const std::string& name, const Row& header, const std::vector<Row>& rows);
  void key_values(const std::string& name, const KeyValues& values);
  void text(const std::string& name, const std::string& content);

  [[nodiscard]] const std::filesystem::path& path() const noexcept { return dir_; }
  [[nodiscard]] const RunInfo& info() const noexcept { return info_; }
  [[nodiscard]] const std::vector<std::filesystem::path>& written() const noexcept { return written_; }

 private:
  void write_file(const std::string& name, const std::string& content);

  std::filesystem::path dir_;
  RunInfo info_;
  std::vector<std::filesystem::path> written_;
};

}  // namespace gpbayes::cli
