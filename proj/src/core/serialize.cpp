#include "gmfg/serialize.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>
#include <vector>

#include "gmfg/errors.hpp"

namespace gmfg {
namespace {

void append_labels(std::string& out, const char* tag, const EmbeddedSpace& space) {
  out += tag;
  for (const auto& l : space.labels()) {
    if (l.find_first_of(" \t\n") != std::string::npos)
      throw UsageError("serialize: label contains whitespace: '" + l + "'");
    out += ' ';
    out += l;
  }
  out += '\n';
}

void append_weights(std::string& out, std::span<const double> w) {
  out += "weights";
  for (double x : w) {
    out += ' ';
    out += format_real(x);
  }
  out += '\n';
}

std::vector<std::string> tokens_of(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> t;
  std::string tok;
  while (in >> tok) t.push_back(tok);
  return t;
}

std::vector<std::vector<std::string>> lines_of(std::string_view text) {
  std::vector<std::vector<std::string>> out;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    auto t = tokens_of(line);
    if (!t.empty()) out.push_back(std::move(t));
  }
  return out;
}

void check_labels(const std::vector<std::string>& row, const char* tag, const EmbeddedSpace& space) {
  if (row.empty() || row[0] != tag) throw UsageError(std::string("parse: expected '") + tag + "' line");
  if (row.size() - 1 != space.size()) throw UsageError(std::string("parse: wrong ") + tag + " count");
  for (std::size_t i = 0; i < space.size(); ++i)
    if (row[i + 1] != space.label(i)) throw UsageError("parse: label mismatch at '" + row[i + 1] + "'");
}

std::vector<double> parse_weights(const std::vector<std::string>& row, std::size_t expected) {
  if (row.empty() || row[0] != "weights") throw UsageError("parse: expected 'weights' line");
  if (row.size() - 1 != expected) throw UsageError("parse: wrong weight count");
  std::vector<double> w(expected);
  for (std::size_t i = 0; i < expected; ++i) {
    const std::string& tok = row[i + 1];
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), w[i]);
    if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size())
      throw UsageError("parse: bad number '" + tok + "'");
  }
  return w;
}

}  // namespace

std::string format_real(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string format_distribution(const Distribution& d) {
  std::string out = "distribution\n";
  append_labels(out, "labels", *d.space());
  append_weights(out, d.weights());
  return out;
}

Distribution parse_distribution(std::string_view text, SpacePtr space) {
  const auto lines = lines_of(text);
  if (lines.size() != 3 || lines[0].size() != 1 || lines[0][0] != "distribution")
    throw UsageError("parse: not a distribution block");
  check_labels(lines[1], "labels", *space);
  return Distribution(space, parse_weights(lines[2], space->size()));
}

std::string format_joint(const JointDistribution& joint) {
  std::string out = "joint\n";
  append_labels(out, "states", *joint.state_space());
  append_labels(out, "actions", *joint.action_space());
  append_weights(out, joint.weights());
  return out;
}

JointDistribution parse_joint(std::string_view text, SpacePtr states, SpacePtr actions) {
  const auto lines = lines_of(text);
  if (lines.size() != 4 || lines[0].size() != 1 || lines[0][0] != "joint")
    throw UsageError("parse: not a joint block");
  check_labels(lines[1], "states", *states);
  check_labels(lines[2], "actions", *actions);
  auto w = parse_weights(lines[3], states->size() * actions->size());
  return JointDistribution(std::move(states), std::move(actions), std::move(w));
}

}  // namespace gmfg
