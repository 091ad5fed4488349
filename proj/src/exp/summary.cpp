#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "gmfg/errors.hpp"
#include "gmfg/experiment.hpp"
#include "gmfg/serialize.hpp"

namespace gmfg::exp {

namespace fs = std::filesystem;

double percentile(std::vector<double> values, double p) {
  if (values.empty()) throw UsageError("percentile: no values");
  if (!(p >= 0.0 && p <= 1.0)) throw UsageError("percentile: p must lie in [0, 1]");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * p;
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= values.size()) return values.back();
  return values[lo] + (h - static_cast<double>(lo)) * (values[lo + 1] - values[lo]);
}

namespace {

std::vector<std::string> cells(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& path, std::string_view header) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read " + path.string());
  std::string line;
  if (!std::getline(f, line) || line != header)
    throw std::runtime_error("inconsistent schema in " + path.string() + ": expected header '" +
                             std::string(header) + "'");
  const std::size_t width = cells(std::string(header)).size();
  std::vector<std::vector<std::string>> rows;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    auto row = cells(line);
    if (row.size() != width) throw std::runtime_error("malformed row in " + path.string() + ": " + line);
    rows.push_back(std::move(row));
  }
  return rows;
}

double number(const std::string& s, const fs::path& path) {
  char* end = nullptr;
  const double x = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) throw std::runtime_error("non-numeric cell '" + s + "' in " + path.string());
  return x;
}

std::string stats_row(const std::vector<double>& v) {
  return std::to_string(v.size()) + "," + format_real(percentile(v, 0.5)) + "," + format_real(percentile(v, 0.05)) +
         "," + format_real(percentile(v, 0.95));
}

void write_text(const fs::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << content;
}

}  // namespace

std::vector<fs::path> summarize(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw std::runtime_error("summarize: " + dir.string() + " is not a directory");
  const std::vector<std::string> all_metrics = {"W1_step", "dTV_step", "linf_step", "l1_step", "mean_reward"};
  std::vector<std::string> metrics = all_metrics;
  if (fs::exists(dir / "config.ini")) {
    std::ifstream f(dir / "config.ini");
    std::stringstream ss;
    ss << f.rdbuf();
    metrics = Config::parse(ss.str()).words("evaluation.metrics");
    for (const auto& m : metrics)
      if (std::find(all_metrics.begin(), all_metrics.end(), m) == all_metrics.end())
        throw ConfigError("config: unknown metric '" + m + "' in evaluation.metrics");
  }

  std::vector<fs::path> traces;
  for (const auto& e : fs::directory_iterator(dir)) {
    const auto name = e.path().filename().string();
    if (e.is_regular_file() && name.rfind("trace_", 0) == 0 && e.path().extension() == ".csv") traces.push_back(e.path());
  }
  std::sort(traces.begin(), traces.end());
  if (traces.empty() && !fs::exists(dir / "delta_q.csv") && !fs::exists(dir / "exploitability.csv"))
    throw std::runtime_error("summarize: no trace files in " + dir.string());

  // variant -> k -> metric index -> values across traces
  std::map<std::string, std::map<std::size_t, std::vector<std::vector<double>>>> per_k;
  std::map<std::string, std::vector<std::vector<double>>> finals;
  std::vector<std::string> order;
  for (const auto& path : traces) {
    const auto stem = path.stem().string();
    const auto cut = stem.rfind("_seed");
    if (cut == std::string::npos || cut <= 6) throw std::runtime_error("unexpected trace name " + path.string());
    const std::string variant = stem.substr(6, cut - 6);
    if (!per_k.count(variant)) order.push_back(variant);
    const auto rows = read_csv(path, kTraceHeader);
    auto& fin = finals[variant];
    fin.resize(metrics.size());
    std::vector<std::size_t> cols;
    for (const auto& m : metrics)
      cols.push_back(1 + static_cast<std::size_t>(std::find(all_metrics.begin(), all_metrics.end(), m) -
                                                  all_metrics.begin()));
    for (const auto& row : rows) {
      auto& slot = per_k[variant][static_cast<std::size_t>(number(row[0], path))];
      slot.resize(metrics.size());
      for (std::size_t m = 0; m < metrics.size(); ++m) slot[m].push_back(number(row[cols[m]], path));
    }
    if (!rows.empty())
      for (std::size_t m = 0; m < metrics.size(); ++m) fin[m].push_back(number(rows.back()[cols[m]], path));
  }

  std::vector<fs::path> written;
  std::sort(order.begin(), order.end());
  std::string summary(kSummaryHeader);
  summary += '\n';
  std::string final_text(kFinalHeader);
  final_text += '\n';
  auto add_final = [&](const std::string& variant, const std::string& metric, const std::vector<double>& v) {
    if (v.empty()) return;
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    final_text += variant + "," + metric + "," + stats_row(v) + "," + format_real(mean) + "\n";
  };
  for (const auto& variant : order) {
    for (const auto& [k, slot] : per_k[variant])
      for (std::size_t m = 0; m < metrics.size(); ++m)
        summary += variant + "," + std::to_string(k) + "," + metrics[m] + "," + stats_row(slot[m]) + "\n";
    for (std::size_t m = 0; m < metrics.size(); ++m) add_final(variant, metrics[m], finals[variant][m]);
  }

  if (fs::exists(dir / "delta_q.csv")) {
    std::map<long long, std::vector<double>> by_T;
    for (const auto& row : read_csv(dir / "delta_q.csv", kDeltaQHeader))
      by_T[static_cast<long long>(number(row[1], dir / "delta_q.csv"))].push_back(number(row[3], dir / "delta_q.csv"));
    for (const auto& [T, v] : by_T) add_final("gmf_q_T" + std::to_string(T), "delta_q", v);
  }
  if (fs::exists(dir / "exploitability.csv")) {
    std::map<std::string, std::vector<double>> groups;
    std::vector<std::string> keys;
    for (const auto& row : read_csv(dir / "exploitability.csv", kExploitabilityHeader)) {
      const std::string key = row[0] + "_N" + row[1] + "_S" + row[2] + "_steps" + row[5];
      if (!groups.count(key)) keys.push_back(key);
      groups[key].push_back(number(row[6], dir / "exploitability.csv"));
    }
    for (const auto& key : keys) add_final(key, "C", groups[key]);
  }
  write_text(dir / "summary.csv", summary);
  write_text(dir / "final.csv", final_text);
  written.push_back(dir / "summary.csv");
  written.push_back(dir / "final.csv");
  return written;
}

}  // namespace gmfg::exp
