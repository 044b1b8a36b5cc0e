#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "cbgen/particle.hpp"
#include "cbgen/samplers.hpp"

namespace cbgen {

// Shortest form with at most `digits` significant digits, independent of locale.
std::string format_number(double v, int digits);

// Writes through a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

// sample_id,z0,n_lifetimes,lifetimes (semicolon-joined, 12 significant digits)
std::string lineage_csv(const std::vector<LineageSample>& samples);
// replicate_id,time,count, one row per breakpoint
std::string path_csv(const std::vector<StepPath>& paths);
// particle_id,parent_id,birth_time,death_time (empty while alive)
std::string genealogy_csv(const GenealogyLog& log);

std::vector<LineageSample> parse_lineage_csv(const std::string& text);

}  // namespace cbgen
