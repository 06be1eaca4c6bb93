#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "esnmor/types.hpp"

namespace esnmor {

inline constexpr const char* kToolkitVersion = "0.1.0";

// Flat key = value config (one pair per line, '#' comments). Flag overrides
// are applied on top by the CLI before anything reads values.
class Config {
 public:
  Config() = default;
  static Config from_file(const std::string& path);

  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const;

  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  Index get_index(const std::string& key) const;
  Index get_index(const std::string& key, Index fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  // Resolved key=value dump, sorted; used for manifests and hashing.
  std::string resolved() const;
  // FNV-1a hash of resolved(), hex.
  std::string hash() const;

  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  std::map<std::string, std::string> entries_;
};

}  // namespace esnmor
