#include "run_dir.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "twlab/error.hpp"

namespace twlab::cli {

namespace fs = std::filesystem;

RunDir::RunDir(std::string path, const RunConfig& cfg) : path_(std::move(path)), fingerprint_(twlab::fingerprint(cfg)) {
  const fs::path marker = fs::path(path_) / "run.json";
  if (fs::exists(marker)) {
    std::ifstream in(marker);
    json prev;
    try {
      prev = json::parse(in);
    } catch (const json::parse_error&) {
      throw ValidationError("output: '" + marker.string() + "' is not valid JSON");
    }
    const std::string other = prev.value("fingerprint", "");
    if (other != fingerprint_)
      throw ValidationError("output: directory '" + path_ + "' holds results of config " + other +
                            ", this run is " + fingerprint_ + "; choose another output.directory");
    return;
  }
  std::error_code ec;
  fs::create_directories(path_, ec);
  if (ec) throw ValidationError("output: cannot create '" + path_ + "': " + ec.message());
  write_json("run.json", json::object());
  write_text("config.json", echo_config(cfg));
}

std::string RunDir::file(const std::string& name) const { return (fs::path(path_) / name).string(); }

void RunDir::write_text(const std::string& name, const std::string& text) const {
  std::ofstream os(file(name));
  if (!os) throw ValidationError("output: cannot write '" + file(name) + "'");
  os << text;
}

void RunDir::write_json(const std::string& name, json j) const {
  j["fingerprint"] = fingerprint_;
  write_text(name, j.dump(2) + "\n");
}

void RunDir::write_csv(const std::string& name, const std::vector<std::string>& header,
                       const std::vector<std::vector<double>>& columns, bool blocks) const {
  std::ostringstream os;
  os << "# fingerprint=" << fingerprint_ << '\n';
  for (std::size_t j = 0; j < header.size(); ++j) os << (j ? "," : "") << header[j];
  os << '\n' << std::setprecision(12);
  const std::size_t rows = columns.empty() ? 0 : columns.front().size();
  for (std::size_t r = 0; r < rows; ++r) {
    if (blocks && r > 0 && columns[0][r] != columns[0][r - 1]) os << '\n';
    for (std::size_t j = 0; j < columns.size(); ++j) os << (j ? "," : "") << columns[j][r];
    os << '\n';
  }
  write_text(name, os.str());
}

void RunDir::write_field(const std::string& name, const Field& u) const {
  write_field_csv(file(name), u, fingerprint_);
}

json complex_list(const std::vector<std::complex<double>>& values) {
  json out = json::array();
  for (const auto& z : values) out.push_back({{"re", z.real()}, {"im", z.imag()}});
  return out;
}

}  // namespace twlab::cli
