#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace levypoly {

// Flat `key = value` configuration with '#' comments; dotted keys form the
// tree (levy.alpha, run.replicas, ...). Values are kept verbatim so
// parse -> emit -> parse is lossless.
class Config {
 public:
  static Config parse_file(const std::string& path);
  static Config parse_text(const std::string& text);
  std::string emit() const;

  bool has(const std::string& key) const { return kv_.count(key) != 0; }
  const std::string& raw(const std::string& key) const;

  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& dflt) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double dflt) const;
  std::int64_t get_int(const std::string& key) const;
  std::int64_t get_int(const std::string& key, std::int64_t dflt) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t dflt) const;
  std::vector<double> get_doubles(const std::string& key) const;  // comma list

  void set(const std::string& key, const std::string& value) { kv_[key] = value; }
  const std::map<std::string, std::string>& items() const { return kv_; }

 private:
  std::map<std::string, std::string> kv_;
};

}  // namespace levypoly
