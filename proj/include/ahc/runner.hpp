#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "ahc/config.hpp"

namespace ahc {

struct CsvRow {
  std::string experiment;
  SurfaceTensionSample sample;
};

struct GridDump {
  std::string name;
  Configuration config;
};

struct RunOutput {
  std::vector<CsvRow> rows;
  nlohmann::ordered_json summary;
  std::vector<GridDump> grids;
  bool passed = false;
};

/// Execute the configured experiment with `jobs` worker threads.
RunOutput run_experiment(const RunConfig& config, int jobs);

/// CSV with the fixed column set; wall_ms is written as 0 unless `timing`.
std::string format_csv(const std::vector<CsvRow>& rows, bool timing);

/// JSON text with every floating-point number printed to 17 significant digits
/// (non-finite numbers become null).
std::string dump_json(const nlohmann::ordered_json& j, int indent = 2);

/// Write samples.csv, summary.json and any grid dumps into `dir`. Every file is written to a
/// temporary name first and renamed once all of them are complete.
void write_outputs(const std::filesystem::path& dir, const RunOutput& out, const OutputConfig& opts);

/// Print the stored summary of a finished run. Returns 0 when the run passed, 2 when it
/// recorded a property failure, 1 when the directory holds no readable results.
int report(const std::filesystem::path& dir, std::ostream& out, std::ostream& err);

}  // namespace ahc
