// Copyright 2026 The Juggle Toolkit Authors
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

#include "juggle/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace juggle {
namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream stream(s);
  while (std::getline(stream, item, sep)) {
    parts.push_back(trim(item));
  }
  return parts;
}

}  // namespace

KeyValueConfig KeyValueConfig::parse_file(const std::string& path) {
  std::ifstream file(path);
  if (!file) {
    throw ConfigError(path + ": cannot open file");
  }
  std::ostringstream buffer;
  buffer << file.rdbuf();
  return parse_string(buffer.str(), path);
}

KeyValueConfig KeyValueConfig::parse_string(const std::string& text, const std::string& name) {
  KeyValueConfig config;
  config.name_ = name;
  std::istringstream stream(text);
  std::string line;
  int line_no = 0;
  while (std::getline(stream, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(name + ":" + std::to_string(line_no) + ": expected `key = value`, got `" +
                        stripped + "`");
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError(name + ":" + std::to_string(line_no) + ": empty key");
    }
    if (config.entries_.count(key) != 0) {
      throw ConfigError(name + ":" + std::to_string(line_no) + ": duplicate key `" + key + "`");
    }
    config.entries_[key] = Entry{value, line_no, false};
    config.order_.push_back(key);
  }
  return config;
}

bool KeyValueConfig::has(const std::string& key) const { return entries_.count(key) != 0; }

void KeyValueConfig::fail(const std::string& key, const std::string& message) const {
  auto it = entries_.find(key);
  const int line = it == entries_.end() ? 0 : it->second.line;
  throw ConfigError(name_ + ":" + std::to_string(line) + ": key `" + key + "`: " + message);
}

const KeyValueConfig::Entry& KeyValueConfig::entry(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) {
    throw ConfigError(name_ + ": missing required key `" + key + "`");
  }
  it->second.read = true;
  return it->second;
}

std::string KeyValueConfig::get_string(const std::string& key) const { return entry(key).value; }

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) const {
  return has(key) ? get_string(key) : fallback;
}

double KeyValueConfig::get_double(const std::string& key) const {
  const std::string& v = entry(key).value;
  try {
    std::size_t pos = 0;
    const double value = std::stod(v, &pos);
    if (pos != v.size()) fail(key, "trailing characters in number `" + v + "`");
    return value;
  } catch (const std::invalid_argument&) {
    fail(key, "not a number: `" + v + "`");
  } catch (const std::out_of_range&) {
    fail(key, "number out of range: `" + v + "`");
  }
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

int KeyValueConfig::get_int(const std::string& key) const {
  const double value = get_double(key);
  const int as_int = static_cast<int>(value);
  if (static_cast<double>(as_int) != value) fail(key, "expected an integer");
  return as_int;
}

int KeyValueConfig::get_int(const std::string& key, int fallback) const {
  return has(key) ? get_int(key) : fallback;
}

std::uint64_t KeyValueConfig::get_uint64(const std::string& key, std::uint64_t fallback) const {
  if (!has(key)) return fallback;
  const std::string& v = entry(key).value;
  try {
    return std::stoull(v);
  } catch (...) {
    fail(key, "not an unsigned integer: `" + v + "`");
  }
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  std::string v = entry(key).value;
  std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  fail(key, "expected a boolean, got `" + v + "`");
}

Vec3 KeyValueConfig::get_vec3(const std::string& key) const {
  const auto parts = split(entry(key).value, ',');
  if (parts.size() != 3) fail(key, "expected three comma-separated numbers");
  try {
    return Vec3(std::stod(parts[0]), std::stod(parts[1]), std::stod(parts[2]));
  } catch (...) {
    fail(key, "expected three comma-separated numbers");
  }
}

Vec3 KeyValueConfig::get_vec3(const std::string& key, const Vec3& fallback) const {
  return has(key) ? get_vec3(key) : fallback;
}

std::vector<double> KeyValueConfig::get_double_list(const std::string& key) const {
  const auto parts = split(entry(key).value, ',');
  std::vector<double> values;
  values.reserve(parts.size());
  for (const auto& part : parts) {
    if (part.empty()) continue;
    try {
      values.push_back(std::stod(part));
    } catch (...) {
      fail(key, "expected comma-separated numbers");
    }
  }
  return values;
}

void KeyValueConfig::set(const std::string& key, const std::string& value) {
  if (entries_.count(key) == 0) order_.push_back(key);
  entries_[key] = Entry{value, 0, false};
}

void KeyValueConfig::set_double(const std::string& key, double value) {
  char buffer[48];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  set(key, buffer);
}

std::vector<std::string> KeyValueConfig::unread_keys() const {
  std::vector<std::string> keys;
  for (const auto& key : order_) {
    if (!entries_.at(key).read) keys.push_back(key);
  }
  return keys;
}

std::string KeyValueConfig::serialize() const {
  std::string out;
  for (const auto& key : order_) {
    out += key;
    out += " = ";
    out += entries_.at(key).value;
    out += '\n';
  }
  return out;
}

std::uint64_t fnv1a_digest(const std::string& text) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::string digest_hex(std::uint64_t digest) {
  char buffer[20];
  std::snprintf(buffer, sizeof(buffer), "%016llx", static_cast<unsigned long long>(digest));
  return std::string(buffer);
}

}  // namespace juggle
