#include "quermass/io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

namespace quermass {

void write_text_file(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  std::error_code ec;
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path(), ec);
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << content;
  if (!out) throw IoError("write failed for '" + path + "'");
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

std::string csv_row(std::initializer_list<std::string> cells) {
  std::string s;
  bool first = true;
  for (const auto& c : cells) {
    if (!first) s += ',';
    s += c;
    first = false;
  }
  return s + '\n';
}

std::string f(double v) { return format_double(v); }
std::string i(long v) { return std::to_string(v); }

}  // namespace

std::string trace_csv(const RunConfig& cfg, const Trace& trace) {
  std::string s = config_header(cfg);
  s += "sweep,n,n_bulk,h,acc_birth,acc_death,acc_move\n";
  for (const auto& r : trace.records)
    s += csv_row({i(r.sweep), i(r.n), i(r.n_bulk), f(r.h), f(r.acc_birth), f(r.acc_death), f(r.acc_move)});
  return s;
}

std::string scan_csv(const RunConfig& cfg, const ScanResult& scan) {
  std::string s = config_header(cfg);
  s += "s,z,bc,rho,rho_se,rho_bulk,rho_bulk_se,psi,psi_se\n";
  for (const auto& r : scan.rows)
    s += csv_row({f(r.s), f(r.z), "wired" + std::to_string(r.bc), f(r.rho), f(r.rho_se), f(r.rho_bulk),
                  f(r.rho_bulk_se), f(r.psi), f(r.psi_se)});
  return s;
}

std::string pressure_csv(const RunConfig& cfg, const std::vector<std::pair<std::string, PressureCurve>>& curves) {
  std::string s = config_header(cfg);
  s += "bc,z,mean_n,mean_n_se,ln_z,ln_z_se,psi,psi_se\n";
  for (const auto& [name, pc] : curves)
    for (std::size_t k = 0; k < pc.z.size(); ++k)
      s += csv_row({name, f(pc.z[k]), f(pc.mean_n[k]), f(pc.mean_n_se[k]), f(pc.ln_z[k]), f(pc.ln_z_se[k]),
                    f(pc.psi(k)), f(pc.psi_se(k))});
  return s;
}

nlohmann::ordered_json report_json(const RunConfig& cfg) {
  nlohmann::ordered_json j;
  j["config"] = config_json(cfg);
  return j;
}

std::string dump_json(const nlohmann::ordered_json& j) { return j.dump(2) + "\n"; }

nlohmann::ordered_json snapshots_json(const RunConfig& cfg, const std::vector<Configuration>& snaps) {
  nlohmann::ordered_json j = report_json(cfg);
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& c : snaps) {
    nlohmann::ordered_json pts = nlohmann::ordered_json::array();
    for (const auto& d : c) pts.push_back({d.x, d.y, d.r});
    arr.push_back(pts);
  }
  j["snapshots"] = arr;
  return j;
}

std::vector<Configuration> snapshots_from_json(const std::string& text) {
  std::vector<Configuration> out;
  try {
    const auto j = nlohmann::json::parse(text);
    for (const auto& snap : j.at("snapshots")) {
      Configuration c;
      for (const auto& p : snap) c.push_back({p.at(0).get<double>(), p.at(1).get<double>(), p.at(2).get<double>()});
      out.push_back(std::move(c));
    }
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("malformed snapshot file: ") + e.what());
  }
  return out;
}

}  // namespace quermass
