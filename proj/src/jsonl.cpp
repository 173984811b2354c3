#include "jsonl.hpp"

#include <cstdio>

namespace likefarm::detail {

void for_each_jsonl(const std::filesystem::path& path,
                    const std::function<void(const Json&, std::size_t)>& fn) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no) + ": ";
    Json obj;
    try {
      obj = Json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(where + "invalid JSON (" + e.what() + ")");
    }
    if (!obj.is_object()) throw ParseError(where + "expected a JSON object");
    try {
      fn(obj, line_no);
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception& e) {
      throw ParseError(where + e.what());
    }
  }
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

const Json& require(const Json& obj, std::string_view key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw InvalidArgument("missing field \"" + std::string(key) + "\"");
  return *it;
}

std::string require_string(const Json& obj, std::string_view key) {
  const Json& v = require(obj, key);
  if (!v.is_string()) throw InvalidArgument("field \"" + std::string(key) + "\" must be a string");
  return v.get<std::string>();
}

std::int64_t require_int(const Json& obj, std::string_view key) {
  const Json& v = require(obj, key);
  if (!v.is_number_integer())
    throw InvalidArgument("field \"" + std::string(key) + "\" must be an integer");
  return v.get<std::int64_t>();
}

double require_number(const Json& obj, std::string_view key) {
  const Json& v = require(obj, key);
  if (!v.is_number()) throw InvalidArgument("field \"" + std::string(key) + "\" must be a number");
  return v.get<double>();
}

bool require_bool(const Json& obj, std::string_view key) {
  const Json& v = require(obj, key);
  if (!v.is_boolean()) throw InvalidArgument("field \"" + std::string(key) + "\" must be a boolean");
  return v.get<bool>();
}

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

}  // namespace likefarm::detail
