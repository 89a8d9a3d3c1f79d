// Copyright 2026 The ECSP Authors.
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

#include "ecsp/config.h"

#include <charconv>
#include <fstream>
#include <sstream>

#include "ecsp/common.h"

namespace ecsp {

namespace {

std::string Trim(const std::string &s) {
  const size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

KeyValues ParseKeyValues(const std::string &text) {
  KeyValues kv;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string t = Trim(line);
    if (t.empty() || t[0] == '#') continue;
    const size_t eq = t.find('=');
    if (eq == std::string::npos) {
      throw ParseError("config line " + std::to_string(number) +
                       ": expected key = value");
    }
    const std::string key = Trim(t.substr(0, eq));
    if (key.empty()) {
      throw ParseError("config line " + std::to_string(number) +
                       ": empty key");
    }
    kv[key] = Trim(t.substr(eq + 1));
  }
  return kv;
}

KeyValues ReadKeyValueFile(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseKeyValues(buffer.str());
}

std::string FormatKeyValues(const KeyValues &kv) {
  std::string out;
  for (const auto &[k, v] : kv) out += k + " = " + v + "\n";
  return out;
}

double ParseDouble(const std::string &key, const std::string &value) {
  double v = 0.0;
  const char *end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError("'" + key + "': expected a number, got '" + value + "'");
  }
  return v;
}

long long ParseInt(const std::string &key, const std::string &value) {
  long long v = 0;
  const char *end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError("'" + key + "': expected an integer, got '" + value +
                      "'");
  }
  return v;
}

unsigned long long ParseUnsigned(const std::string &key,
                                 const std::string &value) {
  unsigned long long v = 0;
  const char *end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError("'" + key + "': expected an unsigned integer, got '" +
                      value + "'");
  }
  return v;
}

bool ParseBool(const std::string &key, const std::string &value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError("'" + key + "': expected a boolean, got '" + value + "'");
}

std::string FormatDouble(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace ecsp
