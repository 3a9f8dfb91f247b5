// Copyright 2026 The Podcar DBW Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PODCAR_KEYVALUE_H_
#define PODCAR_KEYVALUE_H_

#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>

namespace podcar {

// Flat `key = value` text. Blank lines and `#` comments are skipped.
class KeyValueFile {
 public:
  // Throws Error(kBadConfig) on malformed or duplicate lines.
  static KeyValueFile Parse(std::istream& in, const std::string& source = "");

  bool Has(const std::string& key) const { return entries_.contains(key); }

  // Each getter marks the key as consumed. Throws Error(kBadConfig) if the
  // value does not parse.
  std::optional<double> GetDouble(const std::string& key) const;
  std::optional<int> GetInt(const std::string& key) const;
  std::optional<bool> GetBool(const std::string& key) const;
  std::optional<std::string> GetString(const std::string& key) const;

  void Set(const std::string& key, const std::string& value);

  // Throws Error(kBadConfig) naming the first key nobody asked for.
  void RejectUnused() const;

 private:
  struct Entry {
    std::string value;
    int line = 0;
  };

  const Entry* Find(const std::string& key) const;
  [[noreturn]] void Fail(const std::string& key, const Entry& entry,
                         const std::string& what) const;

  std::string source_;
  std::map<std::string, Entry> entries_;
  mutable std::set<std::string> used_;
};

}  // namespace podcar

#endif  // PODCAR_KEYVALUE_H_
