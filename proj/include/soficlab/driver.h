#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "soficlab/config.h"

namespace soficlab {

inline constexpr const char* kToolVersion = "0.1.0";

struct RunOptions {
  std::optional<std::uint64_t> seed;  // overrides model and sampling seeds
  unsigned threads = 1;
  std::optional<std::vector<double>> deltas;
  std::optional<int> window_radius;
  std::optional<std::size_t> max_n;
  bool timing = false;  // fill wall_ms; off keeps outputs byte-identical
  std::string base_dir = ".";
};

struct Table {
  std::string name;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::optional<std::pair<std::string, std::string>> plot;  // x and y columns
};

struct RunReport {
  std::string subcommand;
  std::vector<Table> tables;
  std::map<std::string, std::string> files;  // extra outputs, e.g. model files
  std::string config_hash;
  std::string version = kToolVersion;
  std::vector<std::uint64_t> seeds;
  bool unknown = false;  // some verdict was inconclusive

  int exit_code() const { return unknown ? 2 : 0; }
};

const std::vector<std::string>& subcommands();
RunReport run(const ExperimentConfig& config, const std::string& subcommand, const RunOptions& options = {});

std::string to_csv(const Table& t);
// Whitespace-separated "x y" lines; throws PreconditionError on unknown columns.
std::string emit_plotdata(const Table& t, const std::string& x_column, const std::string& y_column);
std::string emit_plotdata(const Table& t);
std::string report_json(const RunReport& r);

// Shortest round-trip decimal form; "inf", "-inf", "nan" otherwise.
std::string format_number(double v);

}  // namespace soficlab
