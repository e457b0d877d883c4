#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "scenarios.hpp"

namespace caplab::cli {

struct RunOutput {
  json report;  // byte-deterministic for a given config and seed
  json timing;
  std::vector<Entry> entries;
  bool all_ok = false;
};

/// Runs every job on a pool of `jobs` workers and writes report.json,
/// timing.json and the requested CSV/SVG artifacts into out_dir.
RunOutput run_config(const Config& cfg, int jobs, const std::filesystem::path& out_dir);

/// Line field plot: both asymptotic branches as unoriented segments,
/// singularities circled and labelled with their twice_index.
void write_field_svg(const sigma::SigmaGrid& grid, const std::vector<sigma::Singularity>& singularities,
                     const std::string& title, const std::string& path);

/// File-name-safe version of a scenario name.
std::string artifact_stem(const std::string& name);

}  // namespace caplab::cli
