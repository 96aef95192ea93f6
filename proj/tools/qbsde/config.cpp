// Copyright 2026 The qbsde Authors
// SPDX-License-Identifier: Apache-2.0
#include "config.hpp"

#include <fstream>
#include <regex>
#include <sstream>

#include <boost/algorithm/string/trim.hpp>
#include <boost/property_tree/ini_parser.hpp>

#include "qbsde/errors.hpp"
#include "qbsde/interval.hpp"

namespace qbsde::cli {

namespace pt = boost::property_tree;

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  return parse(in, path);
}

Config Config::parse(std::istream& is, const std::string& origin) {
  std::stringstream text;
  text << is.rdbuf();
  Config c;
  c.origin_ = origin;
  try {
    pt::ini_parser::read_ini(text, c.tree_);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(origin + ":" + std::to_string(e.line()) + ": " + e.message());
  }
  // The ptree forgets positions; index them for validation messages.
  static const std::regex section(R"(^\s*\[([^\]]+)\]\s*$)");
  static const std::regex entry(R"(^\s*([^=;#\s][^=]*?)\s*=.*$)");
  std::istringstream lines(text.str());
  std::string line, current;
  std::smatch m;
  for (int n = 1; std::getline(lines, line); ++n) {
    if (std::regex_match(line, m, section)) {
      current = boost::algorithm::trim_copy(m[1].str());
      c.lines_[current] = n;
    } else if (std::regex_match(line, m, entry)) {
      c.lines_[current.empty() ? m[1].str() : current + "." + m[1].str()] = n;
    }
  }
  return c;
}

bool Config::has_section(const std::string& section) const {
  if (tree_.get_child_optional(section)) return true;
  const std::string prefix = section + ".";
  for (const auto& [k, v] : overrides_)
    if (k.rfind(prefix, 0) == 0) return true;
  return false;
}

bool Config::has(const std::string& key) const { return raw(key).has_value(); }

std::optional<std::string> Config::raw(const std::string& key) const {
  if (auto it = overrides_.find(key); it != overrides_.end()) return it->second;
  if (auto v = tree_.get_optional<std::string>(key)) {
    std::string s = boost::algorithm::trim_copy(*v);
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
    return s;
  }
  return std::nullopt;
}

void Config::record(const std::string& key, const std::string& value) {
  used_.insert(key);
  resolved_.put(key, value);
}

std::string Config::where(const std::string& key) const {
  if (overrides_.count(key)) return "command line";
  if (auto it = lines_.find(key); it != lines_.end()) return origin_ + ":" + std::to_string(it->second);
  return origin_;
}

void Config::bad_value(const std::string& key, const std::string& expects, const std::string& got) const {
  throw ConfigError(where(key) + ": '" + key + "' expects " + expects + ", got '" + got + "'");
}

std::string Config::str(const std::string& key, const std::string& def) {
  const std::string v = raw(key).value_or(def);
  record(key, v);
  return v;
}

std::string Config::str(const std::string& key) {
  auto v = raw(key);
  if (!v) throw ConfigError(origin_ + ": missing required key '" + key + "'");
  record(key, *v);
  return *v;
}

std::optional<std::string> Config::maybe_str(const std::string& key) {
  auto v = raw(key);
  if (v) record(key, *v);
  return v;
}

double Config::num(const std::string& key, double def) {
  if (!has(key)) {
    record(key, format_double(def));
    return def;
  }
  return num(key);
}

double Config::num(const std::string& key) {
  const std::string v = str(key);
  try {
    const double x = parse_double(v);
    record(key, format_double(x));
    return x;
  } catch (const std::exception&) {
    bad_value(key, "a number", v);
  }
}

std::optional<double> Config::maybe_num(const std::string& key) {
  if (!has(key)) return std::nullopt;
  return num(key);
}

long Config::integer(const std::string& key, long def) {
  if (!has(key)) {
    record(key, std::to_string(def));
    return def;
  }
  const std::string v = str(key);
  std::size_t pos = 0;
  long x = 0;
  try {
    x = std::stol(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != v.size()) bad_value(key, "an integer", v);
  return x;
}

bool Config::flag(const std::string& key, bool def) {
  if (!has(key)) {
    record(key, def ? "true" : "false");
    return def;
  }
  const std::string v = str(key);
  if (v == "true" || v == "1" || v == "yes" || v == "on") {
    record(key, "true");
    return true;
  }
  if (v == "false" || v == "0" || v == "no" || v == "off") {
    record(key, "false");
    return false;
  }
  bad_value(key, "true or false", v);
}

void Config::set(const std::string& key, const std::string& value) { overrides_[key] = value; }

void Config::reject_unknown() const {
  std::string first;
  int first_line = 0;
  for (const auto& [section, child] : tree_) {
    auto check = [&](const std::string& key) {
      if (used_.count(key)) return;
      const int line = lines_.count(key) ? lines_.at(key) : 0;
      if (first.empty() || line < first_line) {
        first = key;
        first_line = line;
      }
    };
    if (child.empty()) {
      check(section);
      continue;
    }
    for (const auto& [name, leaf] : child) check(section + "." + name);
  }
  if (!first.empty()) throw ConfigError(where(first) + ": unknown key '" + first + "' for this command");
}

void Config::write_manifest(std::ostream& os) const {
  os << "; resolved configuration; pass back with --config to reproduce the run\n";
  pt::ini_parser::write_ini(os, resolved_);
}

}  // namespace qbsde::cli
