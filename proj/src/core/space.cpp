#include "gmfg/space.hpp"

#include <cmath>
#include <limits>

#include "gmfg/errors.hpp"

namespace gmfg {

EmbeddedSpace::EmbeddedSpace(std::vector<std::string> labels,
                             std::vector<std::vector<double>> points)
    : labels_(std::move(labels)) {
  if (labels_.empty()) throw UsageError("EmbeddedSpace: need at least one point");
  if (points.size() != labels_.size())
    throw UsageError("EmbeddedSpace: label/point count mismatch");
  dim_ = points.front().size();
  if (dim_ == 0) throw UsageError("EmbeddedSpace: zero-dimensional embedding");
  coords_.reserve(points.size() * dim_);
  for (const auto& p : points) {
    if (p.size() != dim_) throw UsageError("EmbeddedSpace: embedding dimensions differ");
    for (double x : p) {
      if (!std::isfinite(x)) throw UsageError("EmbeddedSpace: non-finite coordinate");
      coords_.push_back(x);
    }
  }
  const std::size_t n = labels_.size();
  min_distance_ = n >= 2 ? std::numeric_limits<double>::infinity() : 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = distance(i, j);
      diameter_ = std::max(diameter_, d);
      min_distance_ = std::min(min_distance_, d);
    }
  }
  if (n >= 2 && !(min_distance_ > 0.0))
    throw UsageError("EmbeddedSpace: two labels share an embedding point");
}

SpacePtr EmbeddedSpace::integer_line(int n, int offset) {
  if (n < 1) throw UsageError("integer_line: n must be >= 1");
  std::vector<std::string> labels;
  std::vector<std::vector<double>> pts;
  for (int k = 0; k < n; ++k) {
    labels.push_back(std::to_string(offset + k));
    pts.push_back({static_cast<double>(offset + k)});
  }
  return std::make_shared<const EmbeddedSpace>(std::move(labels), std::move(pts));
}

SpacePtr EmbeddedSpace::from_levels(std::span<const int> levels) {
  std::vector<std::string> labels;
  std::vector<std::vector<double>> pts;
  for (int v : levels) {
    labels.push_back(std::to_string(v));
    pts.push_back({static_cast<double>(v)});
  }
  return std::make_shared<const EmbeddedSpace>(std::move(labels), std::move(pts));
}

SpacePtr EmbeddedSpace::product(const EmbeddedSpace& first, const EmbeddedSpace& second) {
  std::vector<std::string> labels;
  std::vector<std::vector<double>> pts;
  labels.reserve(first.size() * second.size());
  pts.reserve(first.size() * second.size());
  for (std::size_t i = 0; i < first.size(); ++i) {
    for (std::size_t j = 0; j < second.size(); ++j) {
      labels.push_back(first.label(i) + "|" + second.label(j));
      std::vector<double> p(first.point(i).begin(), first.point(i).end());
      p.insert(p.end(), second.point(j).begin(), second.point(j).end());
      pts.push_back(std::move(p));
    }
  }
  return std::make_shared<const EmbeddedSpace>(std::move(labels), std::move(pts));
}

double EmbeddedSpace::distance(std::size_t i, std::size_t j) const {
  double acc = 0.0;
  for (std::size_t k = 0; k < dim_; ++k) {
    const double d = coords_[i * dim_ + k] - coords_[j * dim_ + k];
    acc += d * d;
  }
  return std::sqrt(acc);
}

bool EmbeddedSpace::operator==(const EmbeddedSpace& other) const {
  return dim_ == other.dim_ && labels_ == other.labels_ && coords_ == other.coords_;
}

bool same_space(const SpacePtr& a, const SpacePtr& b) {
  if (a == b) return true;
  return a && b && *a == *b;
}

}  // namespace gmfg
