#include "output.hpp"

#include "config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace gpbayes::cli {

std::string cell(double v) { return format_double(v); }
std::string cell(std::size_t v) { return std::to_string(v); }
std::string cell(int v) { return std::to_string(v); }

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

OutputDir::OutputDir(std::filesystem::path dir, RunInfo info) : dir_(std::move(dir)), info_(std::move(info)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw std::runtime_error("cannot create output directory '" + dir_.string() + "': " + ec.message());
}

void OutputDir::write_file(const std::string& name, const std::string& content) {
  const auto path = dir_ / name;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
  written_.push_back(path);
}

void OutputDir::csv(const std::string& name, const Row& header, const std::vector<Row>& rows) {
  std::ostringstream os;
  auto emit = [&os](const Row& r) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i) os << ',';
      os << r[i];
    }
    os << '\n';
  };
  emit(header);
  for (const auto& r : rows) {
    if (r.size() != header.size()) {
      throw std::logic_error(name + ": row has " + std::to_string(r.size()) + " cells, header has " +
                             std::to_string(header.size()));
    }
    emit(r);
  }
  write_file(name, os.str());

  std::ostringstream meta;
  meta << "file = " << name << '\n'
       << "kind = " << info_.kind << '\n'
       << "seed = " << info_.seed << '\n'
       << "version = " << info_.version << '\n'
       << "config_hash = " << info_.config_hash << '\n'
       << "rows = " << rows.size() << '\n';
  write_file(name + ".meta", meta.str());
}

void OutputDir::key_values(const std::string& name, const KeyValues& values) {
  std::ostringstream os;
  for (const auto& [k, v] : values) os << k << " = " << v << '\n';
  write_file(name, os.str());
}

void OutputDir::text(const std::string& name, const std::string& content) { write_file(name, content); }

}  // namespace gpbayes::cli
