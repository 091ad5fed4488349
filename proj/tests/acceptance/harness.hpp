#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace gmfg::acceptance {

namespace fs = std::filesystem;

struct Verdict {
  bool pass = false;
  std::string detail;
};

struct Check {
  std::string name;
  std::function<Verdict()> run;
};

struct Options {
  bool full_determinism = false;
  bool skip_info = false;
};

// "[INFO] name: text", printed as soon as it is known.
void info(const std::string& name, const std::string& text);

std::string fmt(double x, int digits = 4);
std::string fmt_list(const std::vector<double>& xs, int digits = 3);
double median(std::vector<double> xs);
double mean(const std::vector<double>& xs);

// Fresh directory under the system temp dir.
fs::path scratch_dir(const std::string& name);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::size_t col(const std::string& name) const;
  double num(std::size_t row, const std::string& name) const;
  const std::string& str(std::size_t row, const std::string& name) const;
};
Table read_table(const fs::path& file);

// trace_<variant>_seed<n>.csv files of a run directory.
using TraceSet = std::map<std::string, std::map<std::uint64_t, Table>>;
TraceSet read_traces(const fs::path& dir);

// Per-file bytes of every CSV in a directory.
std::map<std::string, std::string> csv_bytes(const fs::path& dir);

std::vector<Check> property_checks();
std::vector<Check> experiment_checks(const Options& options);

}  // namespace gmfg::acceptance
