#include "manin/config.hpp"

#include <cctype>
#include <cinttypes>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace manin {

namespace {

std::string trim(const std::string& s) {
  size_t lo = 0, hi = s.size();
  while (lo < hi && std::isspace(static_cast<unsigned char>(s[lo]))) ++lo;
  while (hi > lo && std::isspace(static_cast<unsigned char>(s[hi - 1]))) --hi;
  return s.substr(lo, hi - lo);
}

// Strips a trailing comment, respecting quoted strings.
std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"' || ch == '\\') out += '\\';
    out += ch;
  }
  out += '"';
  return out;
}

std::string unquote(const std::string& s, int line_no) {
  if (s.size() < 2 || s.front() != '"' || s.back() != '"')
    throw std::runtime_error("line " + std::to_string(line_no) + ": expected a quoted string");
  std::string out;
  for (size_t i = 1; i + 1 < s.size(); ++i) {
    if (s[i] == '\\' && i + 2 < s.size()) ++i;
    out += s[i];
  }
  return out;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s(buf);
  // TOML floats need a decimal point or exponent
  if (s.find_first_of(".eE") == std::string::npos) s += ".0";
  return s;
}

long long parse_int(const std::string& v, int line_no) {
  try {
    size_t used = 0;
    const long long out = std::stoll(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    throw std::runtime_error("line " + std::to_string(line_no) + ": expected an integer, got " + v);
  }
}

double parse_float(const std::string& v, int line_no) {
  try {
    size_t used = 0;
    const double out = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    throw std::runtime_error("line " + std::to_string(line_no) + ": expected a number, got " + v);
  }
}

}  // namespace

std::string RunConfig::to_toml() const {
  std::ostringstream out;
  out << "subcommand = " << quote(subcommand) << "\n";
  out << "n = " << n << "\n";
  out << "L = " << quote(L) << "\n";
  out << "metric = " << quote(metric) << "\n";
  out << "B_max = " << format_double(B_max) << "\n";
  out << "p_max = " << p_max << "\n";
  out << "mc_samples = " << mc_samples << "\n";
  out << "shards = " << shards << "\n";
  out << "seed = " << seed << "\n";
  out << "quad_level = " << quad_level << "\n";
  out << "out_json = " << quote(out_json) << "\n";
  out << "out_csv = " << quote(out_csv) << "\n";
  out << "timing = " << (timing ? "true" : "false") << "\n";
  out << "suite = " << quote(suite) << "\n";
  out << "checkpoints = [";
  for (size_t i = 0; i < checkpoints.size(); ++i) {
    if (i) out << ", ";
    out << checkpoints[i];
  }
  out << "]\n";
  return out.str();
}

RunConfig RunConfig::from_toml(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty() || val.empty())
      throw std::runtime_error("line " + std::to_string(line_no) + ": expected key = value");

    if (key == "subcommand") {
      cfg.subcommand = unquote(val, line_no);
    } else if (key == "n") {
      cfg.n = static_cast<int>(parse_int(val, line_no));
    } else if (key == "L") {
      cfg.L = unquote(val, line_no);
    } else if (key == "metric") {
      cfg.metric = unquote(val, line_no);
    } else if (key == "B_max") {
      cfg.B_max = parse_float(val, line_no);
    } else if (key == "p_max") {
      cfg.p_max = parse_int(val, line_no);
    } else if (key == "mc_samples") {
      cfg.mc_samples = parse_int(val, line_no);
    } else if (key == "shards") {
      cfg.shards = static_cast<int>(parse_int(val, line_no));
    } else if (key == "seed") {
      cfg.seed = static_cast<std::uint64_t>(parse_int(val, line_no));
    } else if (key == "quad_level") {
      cfg.quad_level = static_cast<int>(parse_int(val, line_no));
    } else if (key == "out_json") {
      cfg.out_json = unquote(val, line_no);
    } else if (key == "out_csv") {
      cfg.out_csv = unquote(val, line_no);
    } else if (key == "timing") {
      if (val == "true")
        cfg.timing = true;
      else if (val == "false")
        cfg.timing = false;
      else
        throw std::runtime_error("line " + std::to_string(line_no) + ": expected true or false");
    } else if (key == "suite") {
      cfg.suite = unquote(val, line_no);
    } else if (key == "checkpoints") {
      if (val.front() != '[' || val.back() != ']')
        throw std::runtime_error("line " + std::to_string(line_no) + ": expected [a, b, ...]");
      cfg.checkpoints.clear();
      std::string inner = trim(val.substr(1, val.size() - 2));
      while (!inner.empty()) {
        const size_t comma = inner.find(',');
        const std::string item = trim(inner.substr(0, comma));
        if (!item.empty()) cfg.checkpoints.push_back(parse_int(item, line_no));
        if (comma == std::string::npos) break;
        inner = trim(inner.substr(comma + 1));
      }
    } else {
      throw std::runtime_error("line " + std::to_string(line_no) + ": unknown key " + key);
    }
  }
  return cfg;
}

std::string RunConfig::hash() const {
  // Output routing does not affect the computation, so two runs of the same
  // numbers stamped into different files must carry the same hash.
  RunConfig canonical = *this;
  canonical.out_json.clear();
  canonical.out_csv.clear();
  const std::string canon = canonical.to_toml();
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a 64
  for (unsigned char ch : canon) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return std::string(buf);
}

}  // namespace manin
