#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace mtlkd::cli {

std::uint64_t fnv1a64(std::string_view bytes);

// Flat key=value settings. Later sources override earlier ones; every read
// records the resolved value so the effective configuration can be echoed
// and hashed. Throws ConfigError on malformed lines or values.
class Settings {
 public:
  // "key = value" lines; blank lines and '#' comments are skipped.
  void merge_text(std::string_view text, const std::string& origin);
  void merge_file(const std::string& path);
  // A single "key=value" token.
  void set_token(std::string_view token);
  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const { return values_.count(key) != 0; }

  std::string str(const std::string& key, const std::string& fallback);
  // Required key; ConfigError if absent.
  std::string str(const std::string& key);
  std::vector<std::string> list(const std::string& key, const std::string& fallback);
  long long integer(const std::string& key, long long fallback);
  double real(const std::string& key, double fallback);
  bool flag(const std::string& key, bool fallback);
  // "seed" key, else MTLKD_SEED, else `fallback`.
  std::uint64_t seed(std::uint64_t fallback = 1);

  // Keys that were supplied but never read.
  std::vector<std::string> unused() const;
  void reject_unused() const;

  // Resolved key=value lines, sorted. Thread count and output destinations
  // (out, report, log) are left out: they never change results.
  std::string echo() const;
  std::uint64_t hash() const { return fnv1a64(echo()); }

 private:
  std::map<std::string, std::string> values_;
  std::map<std::string, std::string> resolved_;
};

std::string hex64(std::uint64_t v);

}  // namespace mtlkd::cli
