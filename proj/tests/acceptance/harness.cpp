#include "harness.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numeric>
#include <regex>
#include <sstream>
#include <stdexcept>

#include "gmfg/experiment.hpp"

namespace gmfg::acceptance {

void info(const std::string& name, const std::string& text) {
  std::cout << "[INFO] " << name << ": " << text << std::endl;
}

std::string fmt(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

std::string fmt_list(const std::vector<double>& xs, int digits) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? " " : "") + fmt(xs[i], digits);
  return out;
}

double median(std::vector<double> xs) { return exp::percentile(std::move(xs), 0.5); }

double mean(const std::vector<double>& xs) {
  if (xs.empty()) throw std::runtime_error("mean of empty range");
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

fs::path scratch_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("gmfg_acceptance_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::size_t Table::col(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw std::runtime_error("no column " + name);
  return static_cast<std::size_t>(it - header.begin());
}

double Table::num(std::size_t row, const std::string& name) const { return std::stod(rows.at(row).at(col(name))); }

const std::string& Table::str(std::size_t row, const std::string& name) const { return rows.at(row).at(col(name)); }

namespace {
std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}
}  // namespace

Table read_table(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open " + file.string());
  Table t;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty " + file.string());
  t.header = split(line);
  while (std::getline(in, line))
    if (!line.empty()) t.rows.push_back(split(line));
  return t;
}

TraceSet read_traces(const fs::path& dir) {
  static const std::regex name(R"(trace_(.+)_seed(\d+)\.csv)");
  TraceSet out;
  for (const auto& e : fs::directory_iterator(dir)) {
    std::smatch m;
    const auto file = e.path().filename().string();
    if (std::regex_match(file, m, name)) out[m[1]][std::stoull(m[2])] = read_table(e.path());
  }
  return out;
}

std::map<std::string, std::string> csv_bytes(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file() || e.path().extension() != ".csv") continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    out[fs::relative(e.path(), dir).string()] = ss.str();
  }
  return out;
}

}  // namespace gmfg::acceptance
