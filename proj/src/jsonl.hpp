#pragma once

// Line-oriented JSON helpers shared by the readers and writers.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "likefarm/error.hpp"

namespace likefarm::detail {

using Json = nlohmann::ordered_json;

/// Calls `fn(object, line_number)` for every non-blank line of `path`.
/// JSON syntax errors and exceptions thrown by `fn` are rethrown as
/// ParseError prefixed with "path:line: ".
void for_each_jsonl(const std::filesystem::path& path,
                    const std::function<void(const Json&, std::size_t)>& fn);

std::ofstream open_for_write(const std::filesystem::path& path);

const Json& require(const Json& obj, std::string_view key);
std::string require_string(const Json& obj, std::string_view key);
std::int64_t require_int(const Json& obj, std::string_view key);
double require_number(const Json& obj, std::string_view key);
bool require_bool(const Json& obj, std::string_view key);

/// 64-bit FNV-1a, used for dataset fingerprints and config hashes.
std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed = 14695981039346656037ULL);
std::string hex64(std::uint64_t value);

}  // namespace likefarm::detail
