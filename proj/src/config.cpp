/*
 * Copyright 2026 The polargrid Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "polargrid/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "polargrid/error.hpp"

namespace polargrid {
namespace {

std::string Trim(const std::string& s) {
  auto begin = std::find_if_not(s.begin(), s.end(),
                                [](unsigned char c) { return std::isspace(c); });
  auto end = std::find_if_not(s.rbegin(), s.rend(),
                              [](unsigned char c) { return std::isspace(c); })
                 .base();
  return begin < end ? std::string(begin, end) : std::string();
}

KeyValueConfig FromPtree(const boost::property_tree::ptree& tree) {
  KeyValueConfig config;
  for (const auto& [name, node] : tree) {
    if (node.empty()) {
      config.Set("", name, Trim(node.data()));
      continue;
    }
    for (const auto& [key, value] : node) {
      config.Set(name, key, Trim(value.data()));
    }
  }
  return config;
}

}  // namespace

KeyValueConfig KeyValueConfig::FromFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kIo, "cannot open config file: " + path);
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    Fail(ErrorCode::kConfig, path + ": " + e.message() + " (line " +
                                 std::to_string(e.line()) + ")");
  }
  return FromPtree(tree);
}

KeyValueConfig KeyValueConfig::FromString(const std::string& text) {
  std::istringstream in(text);
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    Fail(ErrorCode::kConfig, e.message() + " (line " +
                                 std::to_string(e.line()) + ")");
  }
  return FromPtree(tree);
}

const KeyValueConfig::Section* KeyValueConfig::FindSection(
    const std::string& name) const {
  for (const auto& section : sections_) {
    if (section.name == name) return &section;
  }
  return nullptr;
}

std::optional<std::string> KeyValueConfig::Find(const std::string& section,
                                                const std::string& key) const {
  const Section* s = FindSection(section);
  if (s == nullptr) return std::nullopt;
  for (const auto& [k, v] : s->entries) {
    if (k == key) return v;
  }
  return std::nullopt;
}

bool KeyValueConfig::Has(const std::string& section,
                         const std::string& key) const {
  return Find(section, key).has_value();
}

std::string KeyValueConfig::GetString(const std::string& section,
                                      const std::string& key,
                                      const std::string& fallback) const {
  return Find(section, key).value_or(fallback);
}

double KeyValueConfig::GetDouble(const std::string& section,
                                 const std::string& key,
                                 double fallback) const {
  auto v = Find(section, key);
  return v ? ParseDouble(*v, section + "." + key) : fallback;
}

long long KeyValueConfig::GetInt(const std::string& section,
                                 const std::string& key,
                                 long long fallback) const {
  auto v = Find(section, key);
  return v ? ParseInt(*v, section + "." + key) : fallback;
}

bool KeyValueConfig::GetBool(const std::string& section, const std::string& key,
                             bool fallback) const {
  auto v = Find(section, key);
  return v ? ParseBool(*v, section + "." + key) : fallback;
}

std::vector<double> KeyValueConfig::GetDoubleList(
    const std::string& section, const std::string& key,
    const std::vector<double>& fallback) const {
  auto v = Find(section, key);
  if (!v) return fallback;
  std::vector<double> out;
  for (const auto& item : SplitList(*v)) {
    out.push_back(ParseDouble(item, section + "." + key));
  }
  return out;
}

std::vector<int> KeyValueConfig::GetIntList(
    const std::string& section, const std::string& key,
    const std::vector<int>& fallback) const {
  auto v = Find(section, key);
  if (!v) return fallback;
  std::vector<int> out;
  for (const auto& item : SplitList(*v)) {
    out.push_back(static_cast<int>(ParseInt(item, section + "." + key)));
  }
  return out;
}

void KeyValueConfig::Set(const std::string& section, const std::string& key,
                         const std::string& value) {
  auto it = std::find_if(sections_.begin(), sections_.end(),
                         [&](const Section& s) { return s.name == section; });
  if (it == sections_.end()) {
    sections_.push_back({section, {}});
    it = sections_.end() - 1;
  }
  for (auto& [k, v] : it->entries) {
    if (k == key) {
      v = value;
      return;
    }
  }
  it->entries.emplace_back(key, value);
}

std::string KeyValueConfig::ToString() const {
  std::ostringstream out;
  bool first = true;
  // Unsectioned keys must precede the first header.
  for (const auto& section : sections_) {
    if (!section.name.empty()) continue;
    for (const auto& [k, v] : section.entries) out << k << " = " << v << "\n";
    first = false;
  }
  for (const auto& section : sections_) {
    if (section.name.empty()) continue;
    if (!first) out << "\n";
    first = false;
    out << "[" << section.name << "]\n";
    for (const auto& [k, v] : section.entries) out << k << " = " << v << "\n";
  }
  return out.str();
}

void KeyValueConfig::WriteFile(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) Fail(ErrorCode::kIo, "cannot write config file: " + path);
  out << ToString();
  if (!out) Fail(ErrorCode::kIo, "failed writing config file: " + path);
}

double ParseDouble(const std::string& text, const std::string& what) {
  const std::string t = Trim(text);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    Fail(ErrorCode::kConfig, what + ": expected a number, got '" + text + "'");
  }
  return value;
}

long long ParseInt(const std::string& text, const std::string& what) {
  const std::string t = Trim(text);
  long long value = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    Fail(ErrorCode::kConfig,
         what + ": expected an integer, got '" + text + "'");
  }
  return value;
}

bool ParseBool(const std::string& text, const std::string& what) {
  std::string t = Trim(text);
  std::transform(t.begin(), t.end(), t.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (t == "1" || t == "true" || t == "yes" || t == "on") return true;
  if (t == "0" || t == "false" || t == "no" || t == "off") return false;
  Fail(ErrorCode::kConfig, what + ": expected a boolean, got '" + text + "'");
}

std::vector<std::string> SplitList(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    item = Trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string FormatDouble(double value) {
  // Shortest text that parses back to the same double.
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::string JoinDoubles(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += FormatDouble(values[i]);
  }
  return out;
}

std::string JoinInts(const std::vector<int>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(values[i]);
  }
  return out;
}

}  // namespace polargrid
