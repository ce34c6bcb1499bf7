/* Copyright 2026 The geodiv Authors.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace geodiv::text {

// NFC normal form of a UTF-8 string. Throws DataError on invalid UTF-8.
std::string nfc(std::string_view utf8);

// Escaping used by every tab-delimited block the engine writes:
// backslash, tab, newline and carriage return become \\ \t \n \r.
std::string escape_field(std::string_view field);
std::string unescape_field(std::string_view field);

// Splits one line on tabs without unescaping.
std::vector<std::string_view> split_tabs(std::string_view line);

// Shortest round-trip decimal form of a double.
std::string format_double(double value);

}  // namespace geodiv::text
