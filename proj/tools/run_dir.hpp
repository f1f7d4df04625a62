#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "twlab/config.hpp"
#include "twlab/grid.hpp"

namespace twlab::cli {

using nlohmann::json;

/// Output directory bound to one config fingerprint. The first writer records
/// run.json and the echoed config; later writers must carry the same
/// fingerprint.
class RunDir {
 public:
  RunDir(std::string path, const RunConfig& cfg);

  const std::string& path() const { return path_; }
  const std::string& fingerprint() const { return fingerprint_; }
  std::string file(const std::string& name) const;

  /// Writes `j` with a "fingerprint" member added.
  void write_json(const std::string& name, json j) const;
  /// Columns of equal length; the first line is a "# fingerprint=" comment.
  /// With blocks set, a blank line separates runs of equal first-column
  /// values (gnuplot scan lines).
  void write_csv(const std::string& name, const std::vector<std::string>& header,
                 const std::vector<std::vector<double>>& columns, bool blocks = false) const;
  void write_field(const std::string& name, const Field& u) const;
  void write_text(const std::string& name, const std::string& text) const;

 private:
  std::string path_;
  std::string fingerprint_;
};

json complex_list(const std::vector<std::complex<double>>& values);

}  // namespace twlab::cli
