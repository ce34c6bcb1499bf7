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

#include "geodiv/prompt_builder.hpp"

#include <algorithm>
#include <charconv>

#include "geodiv/errors.hpp"
#include "geodiv/text.hpp"

namespace geodiv {
namespace {

// Count for one (object, region) cell, or nullopt when the cell is not generated.
std::optional<std::size_t> cell_count(const PromptSpec& spec, const std::string& object,
                                      const std::string& region) {
  if (!spec.cell_counts) return spec.per_object_region;
  const auto it = spec.cell_counts->find({object, region});
  if (it == spec.cell_counts->end()) return std::nullopt;
  return it->second;
}

void validate(const PromptSpec& spec, PromptKind kind) {
  if (kind == PromptKind::kNone) throw ConfigError("prompt kind \"none\" has no template");
  if (spec.objects.empty()) throw ConfigError("prompt spec has no objects");
  if (spec.regions.empty()) throw ConfigError("prompt spec has no regions");
  if (spec.cell_counts) {
    for (const auto& [cell, count] : *spec.cell_counts) {
      if (std::find(spec.objects.begin(), spec.objects.end(), cell.first) == spec.objects.end() ||
          std::find(spec.regions.begin(), spec.regions.end(), cell.second) == spec.regions.end()) {
        throw ConfigError("cell count for (" + cell.first + ", " + cell.second + ") is outside the vocabularies");
      }
    }
  }
  if (kind == PromptKind::kObjectInCountry) {
    if (spec.countries_per_cell == 0) throw ConfigError("countries_per_cell must be positive");
    for (const auto& region : spec.regions) {
      const auto it = spec.countries_per_region.find(region);
      if (it == spec.countries_per_region.end() || it->second.empty()) {
        throw ConfigError("no countries configured for region \"" + region + "\"");
      }
    }
  }
}

std::vector<std::string> prompted_countries(const PromptSpec& spec, const std::string& region) {
  const auto& all = spec.countries_per_region.at(region);
  const std::size_t n = std::min(spec.countries_per_cell, all.size());
  return {all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n)};
}

// Per-country share of a cell: as even as possible, remainder to the
// earliest (best represented) countries.
std::vector<std::size_t> split_evenly(std::size_t total, std::size_t parts) {
  std::vector<std::size_t> out(parts, total / parts);
  for (std::size_t i = 0; i < total % parts; ++i) ++out[i];
  return out;
}

std::size_t shared_pool_size(const PromptSpec& spec, const std::string& object) {
  if (spec.flat_object_count) return *spec.flat_object_count;
  std::size_t total = 0;
  for (const auto& region : spec.regions) total += cell_count(spec, object, region).value_or(0);
  return total;
}

// Walks cells in spec order and reports (cell, count, template place).
template <typename Visit>
void for_each_cell(const PromptSpec& spec, PromptKind kind, Visit&& visit) {
  validate(spec, kind);
  for (const auto& object : spec.objects) {
    if (kind == PromptKind::kObject && spec.object_pool == ObjectPool::kShared) {
      visit(PromptCell{object, "", ""}, shared_pool_size(spec, object));
      continue;
    }
    for (const auto& region : spec.regions) {
      const auto count = cell_count(spec, object, region);
      if (!count) continue;
      if (kind != PromptKind::kObjectInCountry) {
        visit(PromptCell{object, region, ""}, *count);
        continue;
      }
      const auto countries = prompted_countries(spec, region);
      const auto shares = split_evenly(*count, countries.size());
      for (std::size_t c = 0; c < countries.size(); ++c) {
        if (shares[c] > 0) visit(PromptCell{object, region, countries[c]}, shares[c]);
      }
    }
  }
}

}  // namespace

std::string_view to_string(ObjectPool pool) { return pool == ObjectPool::kShared ? "shared" : "per_region"; }

ObjectPool parse_object_pool(std::string_view text) {
  if (text == "shared") return ObjectPool::kShared;
  if (text == "per_region") return ObjectPool::kPerRegion;
  throw ConfigError("unknown object_pool \"" + std::string(text) + "\"");
}

std::string expand_template(PromptKind kind, std::string_view object, std::string_view place) {
  switch (kind) {
    case PromptKind::kObject:
      return std::string(object);
    case PromptKind::kObjectInRegion:
    case PromptKind::kObjectInCountry:
      return std::string(object) + " in " + std::string(place);
    case PromptKind::kNone:
      break;
  }
  throw ConfigError("prompt kind \"none\" has no template");
}

std::map<PromptCell, std::size_t> expected_counts(const PromptSpec& spec, PromptKind kind) {
  std::map<PromptCell, std::size_t> out;
  for_each_cell(spec, kind, [&out](const PromptCell& cell, std::size_t count) {
    if (count > 0) out[cell] += count;
  });
  return out;
}

std::vector<PromptRecord> build_prompts(const PromptSpec& spec, PromptKind kind) {
  std::vector<PromptRecord> out;
  for_each_cell(spec, kind, [&](const PromptCell& cell, std::size_t count) {
    const std::string& place = kind == PromptKind::kObjectInCountry ? cell.country : cell.region;
    const std::string text = expand_template(kind, cell.object, place);
    std::optional<std::string> country;
    if (!cell.country.empty()) country = cell.country;
    for (std::size_t i = 0; i < count; ++i) {
      out.push_back({text, cell.object, cell.region, country, kind, i});
    }
  });
  return out;
}

std::optional<ParsedPrompt> parse_prompt(std::string_view text, PromptKind kind, const PromptSpec& spec) {
  if (kind == PromptKind::kObject) {
    for (const auto& o : spec.objects) {
      if (text == o) return ParsedPrompt{o, ""};
    }
    return std::nullopt;
  }
  std::vector<std::string> places;
  if (kind == PromptKind::kObjectInRegion) {
    places = spec.regions;
  } else if (kind == PromptKind::kObjectInCountry) {
    for (const auto& [region, countries] : spec.countries_per_region) {
      places.insert(places.end(), countries.begin(), countries.end());
    }
  }
  for (const auto& o : spec.objects) {
    if (text.size() <= o.size() + 4 || text.substr(0, o.size()) != o || text.substr(o.size(), 4) != " in ") {
      continue;
    }
    const std::string_view rest = text.substr(o.size() + 4);
    for (const auto& p : places) {
      if (rest == p) return ParsedPrompt{o, p};
    }
  }
  return std::nullopt;
}

std::string serialize_prompts(const std::vector<PromptRecord>& prompts) {
  std::string out(kPromptHeader);
  out += '\n';
  for (const PromptRecord& p : prompts) {
    out += text::escape_field(p.prompt_text) + '\t' + text::escape_field(p.object) + '\t' +
           text::escape_field(p.region) + '\t' + text::escape_field(p.country.value_or("")) + '\t' +
           std::string(to_string(p.prompt_kind)) + '\t' + std::to_string(p.replicate_index) + '\n';
  }
  return out;
}

std::vector<PromptRecord> parse_prompts(std::string_view text) {
  // Leading "# " lines carry the config echo.
  while (text.starts_with('#')) {
    const std::size_t eol = text.find('\n');
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
  }
  const std::size_t first = text.find('\n');
  if (first == std::string_view::npos || text.substr(0, first) != kPromptHeader) {
    throw DataError("prompt file header does not match the expected columns");
  }
  std::vector<PromptRecord> out;
  std::size_t cursor = first + 1;
  std::size_t row = 0;
  while (cursor < text.size()) {
    std::size_t eol = text.find('\n', cursor);
    if (eol == std::string_view::npos) eol = text.size();
    const auto fields = text::split_tabs(text.substr(cursor, eol - cursor));
    cursor = eol + 1;
    if (fields.size() != 6) throw DataError("prompt row " + std::to_string(row) + ": expected 6 fields");
    PromptRecord p;
    p.prompt_text = text::unescape_field(fields[0]);
    p.object = text::unescape_field(fields[1]);
    p.region = text::unescape_field(fields[2]);
    std::string country = text::unescape_field(fields[3]);
    if (!country.empty()) p.country = std::move(country);
    p.prompt_kind = parse_prompt_kind(fields[4]);
    const auto [ptr, ec] = std::from_chars(fields[5].data(), fields[5].data() + fields[5].size(), p.replicate_index);
    if (ec != std::errc{} || ptr != fields[5].data() + fields[5].size()) {
      throw DataError("prompt row " + std::to_string(row) + ": bad replicate_index");
    }
    out.push_back(std::move(p));
    ++row;
  }
  return out;
}

}  // namespace geodiv
