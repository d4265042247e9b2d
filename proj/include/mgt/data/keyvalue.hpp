#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace mgt::data {

// Flat `key = value` document. Values are typed by their spelling:
//   true / false        -> bool
//   42, -3              -> integer
//   0.01, 1e-5          -> float
//   "gt-ablation"       -> string
// '#' starts a comment. Keys may appear only once.
using KvValue = std::variant<bool, std::int64_t, double, std::string>;

struct KvEntry {
  std::string key;
  KvValue value;
  std::size_t line = 0;
};

class KvDocument {
 public:
  static KvDocument parse(std::string_view text);

  void set(std::string key, KvValue value);
  const KvEntry* find(std::string_view key) const;
  const std::vector<KvEntry>& entries() const { return entries_; }
  std::string serialize() const;

 private:
  std::vector<KvEntry> entries_;
};

std::string type_name(const KvValue& v);

// Typed views. Each throws ConfigError naming the key (and line when known)
// if the spelling has the wrong type. Integers are accepted where floats are
// expected.
std::int64_t as_int(const KvEntry& e);
std::size_t as_count(const KvEntry& e);  // integer >= 0
double as_float(const KvEntry& e);
bool as_bool(const KvEntry& e);
const std::string& as_string(const KvEntry& e);
std::string format_value(const KvValue& v);

}  // namespace mgt::data
