#include "config.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <tuple>

namespace gpbayes::cli {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string qualified(const std::string& section, const std::string& key) {
  return section.empty() ? key : section + "." + key;
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(v);
  while (std::getline(is, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::optional<double> parse_double(const std::string& s) {
  if (s.empty()) return std::nullopt;
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<std::uint64_t> parse_u64(const std::string& s) {
  std::uint64_t v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
  return v;
}

template <typename T, typename F>
std::string join(const std::vector<T>& xs, F fmt) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ", ";
    out += fmt(xs[i]);
  }
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

Config Config::parse(std::string_view text, std::string source) {
  Config cfg;
  cfg.source_ = std::move(source);
  std::string section;
  std::istringstream is{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']' || t.size() < 3) {
        throw ConfigError(cfg.source_ + ":" + std::to_string(lineno) + ": malformed section header '" + t + "'", t,
                          lineno);
      }
      section = trim(std::string_view(t).substr(1, t.size() - 2));
      cfg.data_[section];
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(cfg.source_ + ":" + std::to_string(lineno) + ": expected 'key = value', got '" + t + "'", t,
                        lineno);
    }
    const std::string key = trim(std::string_view(t).substr(0, eq));
    const std::string value = trim(std::string_view(t).substr(eq + 1));
    if (key.empty()) {
      throw ConfigError(cfg.source_ + ":" + std::to_string(lineno) + ": empty key", key, lineno);
    }
    auto& sec = cfg.data_[section];
    if (sec.count(key)) {
      throw ConfigError(cfg.source_ + ":" + std::to_string(lineno) + ": duplicate key '" + qualified(section, key) +
                            "' (first set on line " + std::to_string(sec[key].line) + ")",
                        qualified(section, key), lineno);
    }
    sec[key] = Entry{value, lineno, false};
  }
  return cfg;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'", "", 0);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.string());
}

const Config::Entry* Config::find(const std::string& section, const std::string& key) const {
  const auto s = data_.find(section);
  if (s == data_.end()) return nullptr;
  const auto k = s->second.find(key);
  return k == s->second.end() ? nullptr : &k->second;
}

bool Config::has(const std::string& section, const std::string& key) const { return find(section, key) != nullptr; }

bool Config::has_section(const std::string& section) const { return data_.count(section) > 0; }

void Config::record(const std::string& section, const std::string& key, const std::string& value) const {
  resolved_[section][key] = value;
}

std::optional<std::string> Config::raw(const std::string& section, const std::string& key) const {
  const Entry* e = find(section, key);
  if (!e) return std::nullopt;
  e->used = true;
  return e->value;
}

ConfigError Config::error(const std::string& section, const std::string& key, const std::string& problem) const {
  const Entry* e = find(section, key);
  const int line = e ? e->line : 0;
  std::string where = source_;
  if (line > 0) where += ":" + std::to_string(line);
  return ConfigError(where + ": key '" + qualified(section, key) + "': " + problem, qualified(section, key), line);
}

std::string Config::get_string(const std::string& section, const std::string& key,
                               std::optional<std::string> fallback) const {
  auto v = raw(section, key);
  if (!v) {
    if (!fallback) throw error(section, key, "required key is missing");
    v = *fallback;
  }
  record(section, key, *v);
  return *v;
}

double Config::get_double(const std::string& section, const std::string& key, std::optional<double> fallback) const {
  const auto v = raw(section, key);
  double out = 0.0;
  if (!v) {
    if (!fallback) throw error(section, key, "required key is missing");
    out = *fallback;
  } else {
    const auto d = parse_double(*v);
    if (!d) throw error(section, key, "expected a finite number, got '" + *v + "'");
    out = *d;
  }
  record(section, key, format_double(out));
  return out;
}

double Config::get_positive(const std::string& section, const std::string& key, std::optional<double> fallback) const {
  const double v = get_double(section, key, fallback);
  if (!(v > 0.0)) throw error(section, key, "must be positive, got " + format_double(v));
  return v;
}

std::uint64_t Config::get_u64(const std::string& section, const std::string& key,
                              std::optional<std::uint64_t> fallback) const {
  const auto v = raw(section, key);
  std::uint64_t out = 0;
  if (!v) {
    if (!fallback) throw error(section, key, "required key is missing");
    out = *fallback;
  } else {
    const auto d = parse_u64(*v);
    if (!d) throw error(section, key, "expected a non-negative integer, got '" + *v + "'");
    out = *d;
  }
  record(section, key, std::to_string(out));
  return out;
}

std::size_t Config::get_size(const std::string& section, const std::string& key,
                             std::optional<std::size_t> fallback) const {
  return static_cast<std::size_t>(get_u64(section, key, fallback));
}

bool Config::get_bool(const std::string& section, const std::string& key, std::optional<bool> fallback) const {
  const auto v = raw(section, key);
  bool out = false;
  if (!v) {
    if (!fallback) throw error(section, key, "required key is missing");
    out = *fallback;
  } else if (*v == "true" || *v == "yes" || *v == "1") {
    out = true;
  } else if (*v == "false" || *v == "no" || *v == "0") {
    out = false;
  } else {
    throw error(section, key, "expected true or false, got '" + *v + "'");
  }
  record(section, key, out ? "true" : "false");
  return out;
}

std::vector<double> Config::get_doubles(const std::string& section, const std::string& key,
                                        std::optional<std::vector<double>> fallback) const {
  const auto v = raw(section, key);
  std::vector<double> out;
  if (!v) {
    if (!fallback) throw error(section, key, "required key is missing");
    out = *fallback;
  } else {
    for (const auto& item : split_list(*v)) {
      const auto d = parse_double(item);
      if (!d) throw error(section, key, "expected a comma-separated list of numbers, got '" + item + "'");
      out.push_back(*d);
    }
    if (out.empty()) throw error(section, key, "empty list");
  }
  record(section, key, join(out, format_double));
  return out;
}

std::vector<std::size_t> Config::get_sizes(const std::string& section, const std::string& key,
                                           std::optional<std::vector<std::size_t>> fallback) const {
  const auto v = raw(section, key);
  std::vector<std::size_t> out;
  if (!v) {
    if (!fallback) throw error(section, key, "required key is missing");
    out = *fallback;
  } else {
    for (const auto& item : split_list(*v)) {
      const auto d = parse_u64(item);
      if (!d) throw error(section, key, "expected a comma-separated list of non-negative integers, got '" + item + "'");
      out.push_back(static_cast<std::size_t>(*d));
    }
    if (out.empty()) throw error(section, key, "empty list");
  }
  record(section, key, join(out, [](std::size_t x) { return std::to_string(x); }));
  return out;
}

std::vector<std::string> Config::get_strings(const std::string& section, const std::string& key,
                                             std::optional<std::vector<std::string>> fallback) const {
  const auto v = raw(section, key);
  std::vector<std::string> out;
  if (!v) {
    if (!fallback) throw error(section, key, "required key is missing");
    out = *fallback;
  } else {
    out = split_list(*v);
    if (out.empty()) throw error(section, key, "empty list");
  }
  record(section, key, join(out, [](const std::string& s) { return s; }));
  return out;
}

void Config::set(const std::string& section, const std::string& key, std::string value) {
  auto& e = data_[section][key];
  e.value = std::move(value);
}

void Config::reject_unknown() const {
  const Entry* worst = nullptr;
  std::string name;
  for (const auto& [section, keys] : data_) {
    for (const auto& [key, entry] : keys) {
      if (entry.used) continue;
      if (!worst || entry.line < worst->line) {
        worst = &entry;
        name = qualified(section, key);
      }
    }
  }
  if (worst) {
    std::string where = source_;
    if (worst->line > 0) where += ":" + std::to_string(worst->line);
    throw ConfigError(where + ": unknown key '" + name + "'", name, worst->line);
  }
}

std::string Config::resolved_text() const {
  std::ostringstream os;
  bool first = true;
  for (const auto& [section, keys] : resolved_) {
    if (!first) os << '\n';
    first = false;
    if (!section.empty()) os << '[' << section << "]\n";
    for (const auto& [key, value] : keys) os << key << " = " << value << '\n';
  }
  return os.str();
}

}  // namespace gpbayes::cli
