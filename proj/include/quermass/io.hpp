#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "quermass/run_config.hpp"
#include "quermass/sampler.hpp"

namespace quermass {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Creates missing parent directories.
void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

// CSV files start with the resolved-config header block.
std::string trace_csv(const RunConfig& cfg, const Trace& trace);
std::string scan_csv(const RunConfig& cfg, const ScanResult& scan);
std::string pressure_csv(const RunConfig& cfg, const std::vector<std::pair<std::string, PressureCurve>>& curves);

// JSON reports carry the resolved config under "config".
nlohmann::ordered_json report_json(const RunConfig& cfg);
std::string dump_json(const nlohmann::ordered_json& j);

nlohmann::ordered_json snapshots_json(const RunConfig& cfg, const std::vector<Configuration>& snaps);
std::vector<Configuration> snapshots_from_json(const std::string& text);

}  // namespace quermass
