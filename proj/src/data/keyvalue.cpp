#include "mgt/data/keyvalue.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <sstream>

#include "mgt/error.hpp"

namespace mgt::data {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool valid_key(std::string_view k) {
  return !k.empty() && std::all_of(k.begin(), k.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
  });
}

KvValue parse_value(std::string_view raw, std::size_t line) {
  const std::string where = "line " + std::to_string(line) + ": ";
  if (raw.empty()) throw ValidationError(where + "missing value");
  if (raw == "true") return true;
  if (raw == "false") return false;
  if (raw.front() == '"') {
    if (raw.size() < 2 || raw.back() != '"') {
      throw ValidationError(where + "unterminated string " + std::string(raw));
    }
    const auto body = raw.substr(1, raw.size() - 2);
    if (body.find('"') != std::string_view::npos) {
      throw ValidationError(where + "embedded quote in string " + std::string(raw));
    }
    return std::string(body);
  }
  const char* first = raw.data();
  const char* last = raw.data() + raw.size();
  const bool looks_float = raw.find_first_of(".eE") != std::string_view::npos;
  if (!looks_float) {
    std::int64_t i = 0;
    auto [p, ec] = std::from_chars(first, last, i);
    if (ec == std::errc() && p == last) return i;
  } else {
    double d = 0.0;
    auto [p, ec] = std::from_chars(first, last, d);
    if (ec == std::errc() && p == last) return d;
  }
  throw ValidationError(where + "cannot parse value '" + std::string(raw) +
                        "' (strings must be quoted)");
}

}  // namespace

KvDocument KvDocument::parse(std::string_view text) {
  KvDocument doc;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = std::min(text.find('\n', start), text.size());
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    // '#' outside quotes begins a comment.
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') quoted = !quoted;
      if (line[i] == '#' && !quoted) {
        line = line.substr(0, i);
        break;
      }
    }
    line = trim(line);
    if (line.empty()) {
      if (end == text.size()) break;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ValidationError("line " + std::to_string(line_no) + ": expected key = value");
    }
    const auto key = trim(line.substr(0, eq));
    if (!valid_key(key)) {
      throw ValidationError("line " + std::to_string(line_no) + ": invalid key '" +
                            std::string(key) + "'");
    }
    if (doc.find(key)) {
      throw ValidationError("line " + std::to_string(line_no) + ": duplicate key '" +
                            std::string(key) + "'");
    }
    doc.entries_.push_back(
        {std::string(key), parse_value(trim(line.substr(eq + 1)), line_no), line_no});
    if (end == text.size()) break;
  }
  return doc;
}

void KvDocument::set(std::string key, KvValue value) {
  for (auto& e : entries_) {
    if (e.key == key) {
      e.value = std::move(value);
      return;
    }
  }
  entries_.push_back({std::move(key), std::move(value), 0});
}

const KvEntry* KvDocument::find(std::string_view key) const {
  for (const auto& e : entries_) {
    if (e.key == key) return &e;
  }
  return nullptr;
}

std::string KvDocument::serialize() const {
  std::ostringstream os;
  for (const auto& e : entries_) os << e.key << " = " << format_value(e.value) << '\n';
  return os.str();
}

std::string type_name(const KvValue& v) {
  switch (v.index()) {
    case 0: return "bool";
    case 1: return "integer";
    case 2: return "float";
    default: return "string";
  }
}

namespace {

[[noreturn]] void wrong_type(const KvEntry& e, const char* expected) {
  std::string where = e.line ? "line " + std::to_string(e.line) + ": " : "";
  throw ConfigError(where + "key '" + e.key + "' expects " + expected + ", got " +
                    type_name(e.value) + " " + format_value(e.value));
}

}  // namespace

std::int64_t as_int(const KvEntry& e) {
  if (auto i = std::get_if<std::int64_t>(&e.value)) return *i;
  wrong_type(e, "an integer");
}

std::size_t as_count(const KvEntry& e) {
  const auto i = as_int(e);
  if (i < 0) wrong_type(e, "a non-negative integer");
  return static_cast<std::size_t>(i);
}

double as_float(const KvEntry& e) {
  if (auto d = std::get_if<double>(&e.value)) return *d;
  if (auto i = std::get_if<std::int64_t>(&e.value)) return static_cast<double>(*i);
  wrong_type(e, "a number");
}

bool as_bool(const KvEntry& e) {
  if (auto b = std::get_if<bool>(&e.value)) return *b;
  wrong_type(e, "true or false");
}

const std::string& as_string(const KvEntry& e) {
  if (auto s = std::get_if<std::string>(&e.value)) return *s;
  wrong_type(e, "a quoted string");
}

std::string format_value(const KvValue& v) {
  if (auto b = std::get_if<bool>(&v)) return *b ? "true" : "false";
  if (auto i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
  if (auto d = std::get_if<double>(&v)) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, *d);
    std::string s(buf, p);
    if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
    return s;
  }
  return '"' + std::get<std::string>(v) + '"';
}

}  // namespace mgt::data
