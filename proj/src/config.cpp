#include "levypoly/config.hpp"

#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace levypoly {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

Config Config::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_text(ss.str());
}

Config Config::parse_text(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string s = trim(line);
    if (s.empty() || s[0] == '#') continue;
    std::size_t eq = s.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config line " + std::to_string(lineno) +
                               ": expected 'key = value', got: " + s);
    std::string key = trim(s.substr(0, eq));
    std::string val = trim(s.substr(eq + 1));
    if (key.empty())
      throw std::runtime_error("config line " + std::to_string(lineno) +
                               ": empty key");
    cfg.kv_[key] = val;
  }
  return cfg;
}

std::string Config::emit() const {
  std::ostringstream os;
  for (const auto& [k, v] : kv_) os << k << " = " << v << "\n";
  return os.str();
}

const std::string& Config::raw(const std::string& key) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) throw std::runtime_error("config: missing key '" + key + "'");
  return it->second;
}

std::string Config::get_string(const std::string& key) const { return raw(key); }

std::string Config::get_string(const std::string& key,
                               const std::string& dflt) const {
  auto it = kv_.find(key);
  return it == kv_.end() ? dflt : it->second;
}

double Config::get_double(const std::string& key) const {
  const std::string& v = raw(key);
  if (v == "inf") return std::numeric_limits<double>::infinity();
  try {
    return std::stod(v);
  } catch (...) {
    throw std::runtime_error("config: key '" + key + "' is not a number: " + v);
  }
}

double Config::get_double(const std::string& key, double dflt) const {
  return has(key) ? get_double(key) : dflt;
}

std::int64_t Config::get_int(const std::string& key) const {
  try {
    return std::stoll(raw(key));
  } catch (...) {
    throw std::runtime_error("config: key '" + key + "' is not an integer");
  }
}

std::int64_t Config::get_int(const std::string& key, std::int64_t dflt) const {
  return has(key) ? get_int(key) : dflt;
}

std::uint64_t Config::get_u64(const std::string& key, std::uint64_t dflt) const {
  if (!has(key)) return dflt;
  try {
    return std::stoull(raw(key));
  } catch (...) {
    throw std::runtime_error("config: key '" + key + "' is not an unsigned integer");
  }
}

std::vector<double> Config::get_doubles(const std::string& key) const {
  std::vector<double> out;
  std::istringstream is(raw(key));
  std::string cell;
  while (std::getline(is, cell, ',')) {
    std::string s = cell;
    s.erase(0, s.find_first_not_of(" \t"));
    if (!s.empty()) s.erase(s.find_last_not_of(" \t") + 1);
    if (s == "inf")
      out.push_back(std::numeric_limits<double>::infinity());
    else
      out.push_back(std::stod(s));
  }
  return out;
}

}  // namespace levypoly
