#include "cbgen/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include "cbgen/params.hpp"

namespace cbgen {

std::string format_number(double v, int digits) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, digits);
  return std::string(buf, res.ptr);
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw std::runtime_error("cannot rename into " + path.string() + ": " + ec.message());
  }
}

std::string lineage_csv(const std::vector<LineageSample>& samples) {
  std::string out = "sample_id,z0,n_lifetimes,lifetimes\n";
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    out += std::to_string(i);
    out += ',';
    out += format_number(s.z0, 12);
    out += ',';
    out += std::to_string(s.lifetimes.size());
    out += ',';
    for (std::size_t k = 0; k < s.lifetimes.size(); ++k) {
      if (k) out += ';';
      out += format_number(s.lifetimes[k], 12);
    }
    out += '\n';
  }
  return out;
}

std::string path_csv(const std::vector<StepPath>& paths) {
  std::string out = "replicate_id,time,count\n";
  for (std::size_t i = 0; i < paths.size(); ++i) {
    const auto& p = paths[i];
    for (std::size_t k = 0; k < p.breakpoints.size(); ++k) {
      out += std::to_string(i);
      out += ',';
      out += format_number(p.breakpoints[k], 12);
      out += ',';
      out += std::to_string(p.values[k]);
      out += '\n';
    }
  }
  return out;
}

std::string genealogy_csv(const GenealogyLog& log) {
  std::string out = "particle_id,parent_id,birth_time,death_time\n";
  for (const auto& r : log.records) {
    out += std::to_string(r.particle_id);
    out += ',';
    out += std::to_string(r.parent_id);
    out += ',';
    out += format_number(r.birth_time, 12);
    out += ',';
    if (r.death_time) out += format_number(*r.death_time, 12);
    out += '\n';
  }
  return out;
}

namespace {

double parse_double(const std::string& s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ConfigError("csv: not a number: '" + s + "'");
  return v;
}

}  // namespace

std::vector<LineageSample> parse_lineage_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "sample_id,z0,n_lifetimes,lifetimes")
    throw ConfigError("csv: unexpected lineage header");
  std::vector<LineageSample> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::string field;
    std::istringstream row(line);
    while (std::getline(row, field, ',')) fields.push_back(field);
    if (fields.size() == 3) fields.emplace_back();
    if (fields.size() != 4) throw ConfigError("csv: malformed lineage row: " + line);
    LineageSample s;
    s.z0 = parse_double(fields[1]);
    const auto count = static_cast<std::size_t>(std::stoull(fields[2]));
    std::istringstream lt(fields[3]);
    while (std::getline(lt, field, ';')) s.lifetimes.push_back(parse_double(field));
    if (s.lifetimes.size() != count) throw ConfigError("csv: lifetime count mismatch: " + line);
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace cbgen
