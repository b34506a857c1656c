#include "mtlkd/cli/config.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>

#include "mtlkd/core/binary_io.hpp"
#include "mtlkd/core/error.hpp"

namespace mtlkd::cli {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
  T v{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError("config: " + key + " expects a number, got '" + text + "'");
  }
  return v;
}

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void Settings::merge_text(std::string_view text, const std::string& origin) {
  int line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos || trim(line.substr(0, eq)).empty()) {
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected key = value");
    }
    set(std::string(trim(line.substr(0, eq))), std::string(trim(line.substr(eq + 1))));
  }
}

void Settings::merge_file(const std::string& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const DataError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  merge_text(text, path);
}

void Settings::set_token(std::string_view token) {
  const auto eq = token.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw ConfigError("config: expected key=value, got '" + std::string(token) + "'");
  }
  set(std::string(token.substr(0, eq)), std::string(token.substr(eq + 1)));
}

void Settings::set(const std::string& key, const std::string& value) { values_[key] = value; }

std::string Settings::str(const std::string& key, const std::string& fallback) {
  const auto it = values_.find(key);
  const std::string v = it == values_.end() ? fallback : it->second;
  resolved_[key] = v;
  return v;
}

std::string Settings::str(const std::string& key) {
  if (!has(key)) throw ConfigError("config: missing required key '" + key + "'");
  return str(key, "");
}

std::vector<std::string> Settings::list(const std::string& key, const std::string& fallback) {
  const std::string v = str(key, fallback);
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= v.size()) {
    const auto comma = v.find(',', pos);
    const auto item = trim(std::string_view(v).substr(pos, comma == std::string::npos ? std::string::npos : comma - pos));
    if (!item.empty()) out.emplace_back(item);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

long long Settings::integer(const std::string& key, long long fallback) {
  if (!has(key)) {
    resolved_[key] = std::to_string(fallback);
    return fallback;
  }
  return parse_number<long long>(key, str(key, ""));
}

double Settings::real(const std::string& key, double fallback) {
  if (!has(key)) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", fallback);
    resolved_[key] = buf;
    return fallback;
  }
  return parse_number<double>(key, str(key, ""));
}

bool Settings::flag(const std::string& key, bool fallback) {
  const std::string v = str(key, fallback ? "true" : "false");
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("config: " + key + " expects true or false, got '" + v + "'");
}

std::uint64_t Settings::seed(std::uint64_t fallback) {
  if (!has("seed")) {
    if (const char* env = std::getenv("MTLKD_SEED"); env != nullptr && *env != '\0') {
      set("seed", env);
    } else {
      set("seed", std::to_string(fallback));
    }
  }
  return parse_number<std::uint64_t>("seed", str("seed", ""));
}

std::vector<std::string> Settings::unused() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : values_) {
    if (!resolved_.count(k)) out.push_back(k);
  }
  return out;
}

void Settings::reject_unused() const {
  const auto u = unused();
  if (!u.empty()) throw ConfigError("config: unknown key '" + u.front() + "'");
}

std::string Settings::echo() const {
  std::string out;
  for (const auto& [k, v] : resolved_) {
    if (k == "threads" || k == "out" || k == "report" || k == "log") continue;
    out += k + "=" + v + "\n";
  }
  return out;
}

}  // namespace mtlkd::cli
