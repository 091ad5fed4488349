#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

namespace gmfg {

// Finite labelled point set with real-vector embeddings. The embedding
// supplies the Euclidean ground cost for transport distances.
class EmbeddedSpace {
 public:
  EmbeddedSpace(std::vector<std::string> labels, std::vector<std::vector<double>> points);

  // Labels "offset".."offset+n-1" embedded as the scalars themselves.
  static std::shared_ptr<const EmbeddedSpace> integer_line(int n, int offset = 0);
  // Labels from integers, 1-D coordinates equal to the values.
  static std::shared_ptr<const EmbeddedSpace> from_levels(std::span<const int> levels);
  // Concatenated embeddings, labels "s|a", row-major over (first, second).
  static std::shared_ptr<const EmbeddedSpace> product(const EmbeddedSpace& first,
                                                      const EmbeddedSpace& second);

  std::size_t size() const noexcept { return labels_.size(); }
  std::size_t dim() const noexcept { return dim_; }
  const std::string& label(std::size_t i) const { return labels_.at(i); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  std::span<const double> point(std::size_t i) const {
    return {coords_.data() + i * dim_, dim_};
  }
  double coordinate(std::size_t i, std::size_t axis = 0) const { return coords_[i * dim_ + axis]; }

  double distance(std::size_t i, std::size_t j) const;
  double diameter() const noexcept { return diameter_; }
  // Minimum distance over distinct points; 0 when size() == 1.
  double min_distance() const noexcept { return min_distance_; }

  bool operator==(const EmbeddedSpace& other) const;

 private:
  std::vector<std::string> labels_;
  std::vector<double> coords_;
  std::size_t dim_ = 0;
  double diameter_ = 0.0;
  double min_distance_ = 0.0;
};

using SpacePtr = std::shared_ptr<const EmbeddedSpace>;

bool same_space(const SpacePtr& a, const SpacePtr& b);

}  // namespace gmfg
