#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "gmfg/errors.hpp"
#include "gmfg/experiment.hpp"

namespace gmfg::exp {

namespace {

// Schema in canonical order; values are the experiment defaults.
const std::vector<std::pair<std::string, std::string>>& schema() {
  static const std::vector<std::pair<std::string, std::string>> s = {
      {"run.preset", "custom"},
      {"run.kind", "convergence"},
      {"model.kind", "auction"},
      {"model.s_max", "9"},
      {"model.rho", "0.2"},
      {"model.M", "5"},
      {"model.discount", "0.8"},
      {"model.values", "1,2,3,4"},
      {"model.value_probs", "0.25,0.25,0.25,0.25"},
      {"model.replenish", "coin"},
      {"model.bids", ""},
      {"model.random_states", "3"},
      {"model.random_actions", "2"},
      {"model.random_coupling", "0.3"},
      {"solver.algorithm", "gmf_q"},
      {"inner.T", "2000"},
      {"inner.mode", "trajectory"},
      {"inner.h", "0.87"},
      {"inner.explore_start", "1"},
      {"inner.explore_end", "0.05"},
      {"inner.explore_fraction", "0.5"},
      {"inner.q_init", "0"},
      {"outer.K", "20"},
      {"outer.c", "4"},
      {"outer.epsilon", "0.01"},
      {"outer.net_mode", "quantized"},
      {"outer.initial", "uniform"},
      {"outer.stop_tol", "0"},
      {"outer.schedule", "fixed"},
      {"outer.warm_start", "false"},
      {"theorem2.eta", "1"},
      {"theorem2.delta", "0.1"},
      {"theorem2.D", "1"},
      {"theorem2.alpha", "1"},
      {"theorem2.dhat", "0.5"},
      {"sweep.algorithm", ""},
      {"sweep.inner_T", ""},
      {"sweep.s_max", ""},
      {"sweep.initial", ""},
      {"reference.algorithm", "gmf_v"},
      {"reference.T", "5000"},
      {"nplayer.cases", "20x10"},
      {"nplayer.clearing", "per_player"},
      {"nplayer.algorithms", "gmf_q,mfq,il"},
      {"nplayer.bins", "10"},
      {"nplayer.mfq_c", "4"},
      {"nplayer.mfq_selection", "boltzmann"},
      {"nplayer.checkpoints", "20"},
      {"evaluation.seeds", "0..19"},
      {"evaluation.metrics", "W1_step,dTV_step,linf_step,l1_step,mean_reward"},
      {"evaluation.mode", "sampled"},
      {"evaluation.eps0", "0.1"},
      {"evaluation.samples", "10000"},
      {"evaluation.horizon", "40"},
      {"output.dir", ""},
      {"output.timing", "false"},
      {"output.q_tables", "true"},
      {"output.q_snapshots", "false"},
  };
  return s;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  if (trim(s).empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto comma = s.find(',', start);
    out.push_back(trim(std::string_view(s).substr(start, comma == std::string::npos ? std::string::npos : comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_real(const std::string& key, const std::string& v) {
  errno = 0;
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE || !std::isfinite(x))
    throw ConfigError("config: " + key + " expects a number, got '" + v + "'");
  return x;
}

long long parse_integer(const std::string& key, const std::string& v) {
  errno = 0;
  char* end = nullptr;
  const long long x = std::strtoll(v.c_str(), &end, 10);
  if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE)
    throw ConfigError("config: " + key + " expects an integer, got '" + v + "'");
  return x;
}

}  // namespace

Config Config::defaults() {
  Config c;
  c.entries_ = schema();
  return c;
}

Config Config::parse(std::string_view text, const Config& base) {
  Config c = base;
  std::string section;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const std::string line = trim(text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos));
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("config line " + std::to_string(line_no) + ": unterminated section");
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (section.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": key outside a section");
    c.set(section + "." + key, value);
  }
  return c;
}

void Config::set(const std::string& key, const std::string& value) {
  for (auto& [k, v] : entries_)
    if (k == key) {
      v = trim(value);
      return;
    }
  throw ConfigError("config: unknown key '" + key + "'");
}

void Config::apply_override(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("override '" + assignment + "' is not key=value");
  set(trim(std::string_view(assignment).substr(0, eq)), std::string(assignment.substr(eq + 1)));
}

bool Config::has(const std::string& key) const {
  return std::any_of(entries_.begin(), entries_.end(), [&](const auto& e) { return e.first == key; });
}

const std::string& Config::text(const std::string& key) const {
  for (const auto& [k, v] : entries_)
    if (k == key) return v;
  throw ConfigError("config: unknown key '" + key + "'");
}

double Config::real(const std::string& key) const { return parse_real(key, text(key)); }

long long Config::integer(const std::string& key) const { return parse_integer(key, text(key)); }

std::size_t Config::count(const std::string& key) const {
  const long long x = integer(key);
  if (x < 0) throw ConfigError("config: " + key + " must be >= 0");
  return static_cast<std::size_t>(x);
}

bool Config::flag(const std::string& key) const {
  const auto& v = text(key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("config: " + key + " expects true/false, got '" + v + "'");
}

std::vector<double> Config::reals(const std::string& key) const {
  std::vector<double> out;
  for (const auto& w : split_list(text(key))) out.push_back(parse_real(key, w));
  return out;
}

std::vector<long long> Config::integers(const std::string& key) const {
  std::vector<long long> out;
  for (const auto& w : split_list(text(key))) out.push_back(parse_integer(key, w));
  return out;
}

std::vector<std::string> Config::words(const std::string& key) const { return split_list(text(key)); }

std::vector<std::uint64_t> Config::seeds(const std::string& key) const {
  std::vector<std::uint64_t> out;
  for (const auto& w : split_list(text(key))) {
    const auto dots = w.find("..");
    if (dots == std::string::npos) {
      const long long x = parse_integer(key, w);
      if (x < 0) throw ConfigError("config: negative seed in " + key);
      out.push_back(static_cast<std::uint64_t>(x));
      continue;
    }
    const long long a = parse_integer(key, w.substr(0, dots)), b = parse_integer(key, w.substr(dots + 2));
    if (a < 0 || b < a) throw ConfigError("config: bad seed range '" + w + "'");
    for (long long x = a; x <= b; ++x) out.push_back(static_cast<std::uint64_t>(x));
  }
  if (out.empty()) throw ConfigError("config: " + key + " is empty");
  return out;
}

std::string Config::canonical() const {
  std::string out, section;
  for (const auto& [k, v] : entries_) {
    const auto dot = k.find('.');
    const std::string sec = k.substr(0, dot);
    if (sec != section) {
      if (!section.empty()) out += '\n';
      out += "[" + sec + "]\n";
      section = sec;
    }
    out += k.substr(dot + 1) + " = " + v + "\n";
  }
  return out;
}

std::uint64_t Config::hash() const { return fnv1a64(canonical()); }

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t x) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
  return buf;
}

}  // namespace gmfg::exp
