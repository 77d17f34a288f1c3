#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "nstr/common.hpp"
#include "nstr/trcore.hpp"

namespace nstr::io {

/// Shortest representation that round-trips a double (17 significant digits).
std::string format_real(double v);

/// Columns: k,f,norm_g,psi,delta,rho,step_kind,bundle_size,wall_ms.
/// Absent optionals are empty fields.
void write_iterates_csv(std::ostream& out,
                        const std::vector<trcore::IterateRecord>& records);
void write_iterates_csv(const std::string& path,
                        const std::vector<trcore::IterateRecord>& records);

std::vector<trcore::IterateRecord> parse_iterates_csv(std::istream& in);
std::vector<trcore::IterateRecord> read_iterates_csv(const std::string& path);

/// Grid file: row_len values per line, whitespace separated, 17 digits.
void write_grid_file(const std::string& path, const Vector& v, int row_len);

/// Flat key=value configuration file; '#' starts a comment, blank lines are
/// skipped. Later keys override earlier ones.
std::map<std::string, std::string> parse_config_file(const std::string& path);
std::map<std::string, std::string> parse_config_stream(std::istream& in);

/// Applies "key=value" command-line overrides on top of a config map.
void apply_overrides(std::map<std::string, std::string>& config,
                     const std::vector<std::string>& overrides);

/// FNV-1a hash of the raw vector bytes, hex encoded; digest for run summaries.
std::string fnv1a_hex(const Vector& v);

}  // namespace nstr::io
