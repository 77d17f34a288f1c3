#include "nstr/io.hpp"

#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace nstr::io {

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_iterates_csv(std::ostream& out,
                        const std::vector<trcore::IterateRecord>& records) {
  out << "k,f,norm_g,psi,delta,rho,step_kind,bundle_size,wall_ms\n";
  for (const auto& r : records) {
    out << r.k << ',' << format_real(r.f) << ',' << format_real(r.norm_g) << ',';
    if (r.psi) out << format_real(*r.psi);
    out << ',' << format_real(r.delta) << ',';
    if (r.rho) out << format_real(*r.rho);
    out << ',' << trcore::to_string(r.step_kind) << ',';
    if (r.bundle_size) out << *r.bundle_size;
    out << ',' << format_real(r.wall_ms) << '\n';
  }
}

void write_iterates_csv(const std::string& path,
                        const std::vector<trcore::IterateRecord>& records) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open for writing: " + path);
  write_iterates_csv(out, records);
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

}  // namespace

std::vector<trcore::IterateRecord> parse_iterates_csv(std::istream& in) {
  std::vector<trcore::IterateRecord> out;
  std::string line;
  if (!std::getline(in, line)) throw Error("iterates csv: empty stream");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto f = split_csv_line(line);
    if (f.size() != 9) throw Error("iterates csv: expected 9 fields, got line: " + line);
    trcore::IterateRecord r;
    r.k = std::stoi(f[0]);
    r.f = std::stod(f[1]);
    r.norm_g = std::stod(f[2]);
    if (!f[3].empty()) r.psi = std::stod(f[3]);
    r.delta = std::stod(f[4]);
    if (!f[5].empty()) r.rho = std::stod(f[5]);
    r.step_kind = trcore::step_kind_from_string(f[6]);
    if (!f[7].empty()) r.bundle_size = std::stoi(f[7]);
    r.wall_ms = std::stod(f[8]);
    out.push_back(r);
  }
  return out;
}

std::vector<trcore::IterateRecord> read_iterates_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open: " + path);
  return parse_iterates_csv(in);
}

void write_grid_file(const std::string& path, const Vector& v, int row_len) {
  if (row_len <= 0) row_len = static_cast<int>(v.size());
  std::ofstream out(path);
  if (!out) throw Error("cannot open for writing: " + path);
  for (int i = 0; i < v.size(); ++i) {
    out << format_real(v[i]);
    out << (((i + 1) % row_len == 0) ? '\n' : ' ');
  }
  if (v.size() % row_len != 0) out << '\n';
}

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

void insert_kv(std::map<std::string, std::string>& config, const std::string& item,
               const std::string& where) {
  auto eq = item.find('=');
  if (eq == std::string::npos)
    throw Error(where + ": expected key=value, got: " + item);
  std::string key = trim(item.substr(0, eq));
  std::string val = trim(item.substr(eq + 1));
  if (key.empty()) throw Error(where + ": empty key in: " + item);
  config[key] = val;
}

}  // namespace

std::map<std::string, std::string> parse_config_stream(std::istream& in) {
  std::map<std::string, std::string> config;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    insert_kv(config, line, "config line " + std::to_string(lineno));
  }
  return config;
}

std::map<std::string, std::string> parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file: " + path);
  return parse_config_stream(in);
}

void apply_overrides(std::map<std::string, std::string>& config,
                     const std::vector<std::string>& overrides) {
  for (const auto& item : overrides) insert_kv(config, item, "override");
}

std::string fnv1a_hex(const Vector& v) {
  std::uint64_t h = 1469598103934665603ull;
  const auto* bytes = reinterpret_cast<const unsigned char*>(v.data());
  const std::size_t len = static_cast<std::size_t>(v.size()) * sizeof(double);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= bytes[i];
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, h);
  return buf;
}

}  // namespace nstr::io
