// Copyright 2026 The qbsde Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>

#include <boost/property_tree/ptree.hpp>

namespace qbsde::cli {

/// INI run configuration. Every value read through here (defaults included)
/// is recorded, so the manifest written afterwards reproduces the run when
/// passed back as --config. Keys are "section.name".
class Config {
 public:
  Config() = default;
  /// Throws ConfigError("path:line: ...") on syntax errors.
  static Config load(const std::string& path);
  static Config parse(std::istream& is, const std::string& origin);

  bool has_section(const std::string& section) const;
  bool has(const std::string& key) const;

  std::string str(const std::string& key, const std::string& def);
  std::string str(const std::string& key);
  std::optional<std::string> maybe_str(const std::string& key);
  double num(const std::string& key, double def);
  double num(const std::string& key);
  std::optional<double> maybe_num(const std::string& key);
  long integer(const std::string& key, long def);
  bool flag(const std::string& key, bool def);

  /// Overrides a value (command-line flags); the override is what gets read.
  void set(const std::string& key, const std::string& value);

  /// Throws ConfigError naming the line of the first key nothing read.
  void reject_unknown() const;

  /// "origin:line" for a key, "origin" when it came from a default.
  std::string where(const std::string& key) const;

  void write_manifest(std::ostream& os) const;

 private:
  std::optional<std::string> raw(const std::string& key) const;
  void record(const std::string& key, const std::string& value);
  [[noreturn]] void bad_value(const std::string& key, const std::string& expects, const std::string& got) const;

  boost::property_tree::ptree tree_;
  boost::property_tree::ptree resolved_;
  std::map<std::string, int> lines_;
  std::set<std::string> used_;
  std::map<std::string, std::string> overrides_;
  std::string origin_ = "<defaults>";
};

}  // namespace qbsde::cli
