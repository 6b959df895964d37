#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <vector>

namespace frostdecay {

using CubeIndex = std::vector<std::int64_t>;

// Finest dyadic level whose integer indices (and the corner coordinates
// index * 2^-level) stay exact in 64-bit integers and binary64.
inline constexpr int kMaxDyadicLevel = 52;

/// Half-open dyadic cube  prod_i [index_i 2^-level, (index_i + 1) 2^-level).
struct DyadicCube {
  int level = 0;
  CubeIndex index;

  std::size_t dim() const { return index.size(); }
  double side() const;
  std::vector<double> center() const;

  /// Cube of level `coarser` (<= level) containing this one.
  DyadicCube ancestor(int coarser) const;
  DyadicCube parent() const { return ancestor(level - 1); }
  std::vector<DyadicCube> children() const;

  /// True when `other` is this cube or one of its descendants.
  bool contains(const DyadicCube& other) const;

  auto operator<=>(const DyadicCube&) const = default;
};

/// A finite union of dyadic cubes, all at one level L.  Members are kept
/// sorted lexicographically and free of duplicates.
class CubeSet {
 public:
  CubeSet(std::size_t dim, int level, std::vector<CubeIndex> members);

  std::size_t dim() const { return dim_; }
  int level() const { return level_; }
  std::size_t size() const { return members_.size(); }
  bool empty() const { return members_.empty(); }

  const std::vector<CubeIndex>& members() const { return members_; }
  DyadicCube cube(std::size_t i) const { return {level_, members_[i]}; }
  bool contains(const CubeIndex& index) const;

  /// The set of level-`coarser` cubes that contain at least one member.
  CubeSet coarsen(int coarser) const;

  /// Centres of the member cubes, flattened (dim() values per member).
  std::vector<double> centers() const;

  bool operator==(const CubeSet&) const = default;

 private:
  std::size_t dim_;
  int level_;
  std::vector<CubeIndex> members_;
};

/// Floor division by 2^shift, valid for negative indices.
inline std::int64_t shift_down(std::int64_t i, int shift) { return i >> shift; }

}  // namespace frostdecay
