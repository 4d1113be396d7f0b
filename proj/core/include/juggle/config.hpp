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

#ifndef JUGGLE_CONFIG_HPP_
#define JUGGLE_CONFIG_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "juggle/types.hpp"

namespace juggle {

/// Error with file/line context from config parsing or key lookup.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Flat `key = value` config file. Lines starting with '#' and blank lines
/// are ignored; values run to end of line. Keys are unique.
class KeyValueConfig {
 public:
  static KeyValueConfig parse_file(const std::string& path);
  static KeyValueConfig parse_string(const std::string& text, const std::string& name = "<string>");

  bool has(const std::string& key) const;

  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key) const;
  int get_int(const std::string& key, int fallback) const;
  std::uint64_t get_uint64(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  Vec3 get_vec3(const std::string& key) const;
  Vec3 get_vec3(const std::string& key, const Vec3& fallback) const;
  std::vector<double> get_double_list(const std::string& key) const;

  void set(const std::string& key, const std::string& value);
  void set_double(const std::string& key, double value);

  /// Keys present in the file but never read; useful for typo diagnostics.
  std::vector<std::string> unread_keys() const;

  std::string serialize() const;
  const std::string& name() const { return name_; }

 private:
  struct Entry {
    std::string value;
    int line = 0;
    mutable bool read = false;
  };
  [[noreturn]] void fail(const std::string& key, const std::string& message) const;
  const Entry& entry(const std::string& key) const;

  std::string name_;
  std::map<std::string, Entry> entries_;
  std::vector<std::string> order_;
};

/// FNV-1a 64-bit digest, used to stamp result manifests with the config they
/// were produced from.
std::uint64_t fnv1a_digest(const std::string& text);
std::string digest_hex(std::uint64_t digest);

}  // namespace juggle

#endif  // JUGGLE_CONFIG_HPP_
