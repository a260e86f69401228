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

#ifndef POLARGRID_CONFIG_HPP_
#define POLARGRID_CONFIG_HPP_

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace polargrid {

// Sectioned key-value text configuration ("INI" style). Keys outside any
// section live in the section named "". Entry order is preserved so that a
// configuration written back out is byte-stable.
class KeyValueConfig {
 public:
  struct Section {
    std::string name;
    std::vector<std::pair<std::string, std::string>> entries;
  };

  static KeyValueConfig FromFile(const std::string& path);
  static KeyValueConfig FromString(const std::string& text);

  bool Has(const std::string& section, const std::string& key) const;
  std::optional<std::string> Find(const std::string& section,
                                  const std::string& key) const;

  std::string GetString(const std::string& section, const std::string& key,
                        const std::string& fallback) const;
  double GetDouble(const std::string& section, const std::string& key,
                   double fallback) const;
  long long GetInt(const std::string& section, const std::string& key,
                   long long fallback) const;
  bool GetBool(const std::string& section, const std::string& key,
               bool fallback) const;
  std::vector<double> GetDoubleList(const std::string& section,
                                    const std::string& key,
                                    const std::vector<double>& fallback) const;
  std::vector<int> GetIntList(const std::string& section,
                              const std::string& key,
                              const std::vector<int>& fallback) const;

  void Set(const std::string& section, const std::string& key,
           const std::string& value);

  const std::vector<Section>& sections() const { return sections_; }
  const Section* FindSection(const std::string& name) const;

  std::string ToString() const;
  void WriteFile(const std::string& path) const;

 private:
  std::vector<Section> sections_;
};

// Parsing helpers shared by config consumers; all throw Error(kConfig).
double ParseDouble(const std::string& text, const std::string& what);
long long ParseInt(const std::string& text, const std::string& what);
bool ParseBool(const std::string& text, const std::string& what);
std::vector<std::string> SplitList(const std::string& text);

std::string FormatDouble(double value);
std::string JoinDoubles(const std::vector<double>& values);
std::string JoinInts(const std::vector<int>& values);

}  // namespace polargrid

#endif  // POLARGRID_CONFIG_HPP_
