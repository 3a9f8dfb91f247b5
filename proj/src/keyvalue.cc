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

#include "podcar/keyvalue.h"

#include <charconv>
#include <istream>

#include "podcar/error.h"

namespace podcar {
namespace {

std::string Trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

KeyValueFile KeyValueFile::Parse(std::istream& in, const std::string& source) {
  KeyValueFile file;
  file.source_ = source.empty() ? "<input>" : source;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = Trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::kBadConfig, file.source_ + ":" +
                                             std::to_string(line_no) +
                                             ": expected `key = value`");
    }
    const std::string key = Trim(line.substr(0, eq));
    const std::string value = Trim(line.substr(eq + 1));
    if (key.empty()) {
      throw Error(ErrorCode::kBadConfig,
                  file.source_ + ":" + std::to_string(line_no) + ": empty key");
    }
    if (file.entries_.contains(key)) {
      throw Error(ErrorCode::kBadConfig, file.source_ + ":" +
                                             std::to_string(line_no) +
                                             ": duplicate key `" + key + "`");
    }
    file.entries_[key] = Entry{value, line_no};
  }
  return file;
}

const KeyValueFile::Entry* KeyValueFile::Find(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return nullptr;
  used_.insert(key);
  return &it->second;
}

void KeyValueFile::Fail(const std::string& key, const Entry& entry,
                        const std::string& what) const {
  throw Error(ErrorCode::kBadConfig, source_ + ":" + std::to_string(entry.line) +
                                         ": `" + key + "`: " + what);
}

std::optional<double> KeyValueFile::GetDouble(const std::string& key) const {
  const Entry* entry = Find(key);
  if (entry == nullptr) return std::nullopt;
  try {
    std::size_t consumed = 0;
    const double value = std::stod(entry->value, &consumed);
    if (consumed != entry->value.size()) Fail(key, *entry, "trailing characters");
    return value;
  } catch (const std::logic_error&) {
    Fail(key, *entry, "expected a number, got `" + entry->value + "`");
  }
}

std::optional<int> KeyValueFile::GetInt(const std::string& key) const {
  const Entry* entry = Find(key);
  if (entry == nullptr) return std::nullopt;
  int value = 0;
  const char* first = entry->value.data();
  const char* last = first + entry->value.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    Fail(key, *entry, "expected an integer, got `" + entry->value + "`");
  }
  return value;
}

std::optional<bool> KeyValueFile::GetBool(const std::string& key) const {
  const Entry* entry = Find(key);
  if (entry == nullptr) return std::nullopt;
  const std::string& v = entry->value;
  if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "off" || v == "no") return false;
  Fail(key, *entry, "expected a boolean, got `" + v + "`");
}

std::optional<std::string> KeyValueFile::GetString(const std::string& key) const {
  const Entry* entry = Find(key);
  if (entry == nullptr) return std::nullopt;
  return entry->value;
}

void KeyValueFile::Set(const std::string& key, const std::string& value) {
  entries_[key] = Entry{value, 0};
}

void KeyValueFile::RejectUnused() const {
  for (const auto& [key, entry] : entries_) {
    if (!used_.contains(key)) Fail(key, entry, "unknown key");
  }
}

}  // namespace podcar
