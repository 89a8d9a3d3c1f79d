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

// Flat "key = value" configuration text. Blank lines and lines starting
// with '#' are ignored; later keys override earlier ones.

#ifndef ECSP_CONFIG_H_
#define ECSP_CONFIG_H_

#include <map>
#include <string>

namespace ecsp {

using KeyValues = std::map<std::string, std::string>;

KeyValues ParseKeyValues(const std::string &text);
KeyValues ReadKeyValueFile(const std::string &path);
std::string FormatKeyValues(const KeyValues &kv);

// Typed accessors; throw ConfigError on malformed values.
double ParseDouble(const std::string &key, const std::string &value);
long long ParseInt(const std::string &key, const std::string &value);
unsigned long long ParseUnsigned(const std::string &key,
                                 const std::string &value);
bool ParseBool(const std::string &key, const std::string &value);

// Shortest text that parses back to exactly `v`.
std::string FormatDouble(double v);

}  // namespace ecsp

#endif  // ECSP_CONFIG_H_
