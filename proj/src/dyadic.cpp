#include "frostdecay/dyadic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace frostdecay {

namespace {

void check_level(int level) {
  if (level < 0 || level > kMaxDyadicLevel) {
    throw std::out_of_range("dyadic level " + std::to_string(level) + " outside [0, " +
                            std::to_string(kMaxDyadicLevel) + "]");
  }
}

}  // namespace

double DyadicCube::side() const { return std::ldexp(1.0, -level); }

std::vector<double> DyadicCube::center() const {
  std::vector<double> c(index.size());
  const double h = side();
  for (std::size_t i = 0; i < index.size(); ++i) {
    c[i] = (static_cast<double>(index[i]) + 0.5) * h;
  }
  return c;
}

DyadicCube DyadicCube::ancestor(int coarser) const {
  if (coarser < 0 || coarser > level) {
    throw std::out_of_range("ancestor level must lie in [0, level]");
  }
  DyadicCube a{coarser, index};
  const int shift = level - coarser;
  for (auto& i : a.index) i = shift_down(i, shift);
  return a;
}

std::vector<DyadicCube> DyadicCube::children() const {
  check_level(level + 1);
  const std::size_t n = index.size();
  std::vector<DyadicCube> out;
  out.reserve(std::size_t{1} << n);
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    DyadicCube c{level + 1, index};
    for (std::size_t i = 0; i < n; ++i) {
      c.index[i] = 2 * index[i] + static_cast<std::int64_t>((mask >> (n - 1 - i)) & 1u);
    }
    out.push_back(std::move(c));
  }
  return out;
}

bool DyadicCube::contains(const DyadicCube& other) const {
  if (other.index.size() != index.size() || other.level < level) return false;
  return other.ancestor(level).index == index;
}

CubeSet::CubeSet(std::size_t dim, int level, std::vector<CubeIndex> members)
    : dim_(dim), level_(level), members_(std::move(members)) {
  if (dim_ == 0) throw std::invalid_argument("CubeSet dimension must be positive");
  check_level(level_);
  const std::int64_t bound = std::int64_t{1} << 53;
  for (const auto& m : members_) {
    if (m.size() != dim_) {
      throw std::invalid_argument("cube index arity " + std::to_string(m.size()) +
                                  " does not match dimension " + std::to_string(dim_));
    }
    for (auto i : m) {
      if (i <= -bound || i >= bound) throw std::out_of_range("cube index exceeds 2^53");
    }
  }
  std::sort(members_.begin(), members_.end());
  members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
}

bool CubeSet::contains(const CubeIndex& index) const {
  return std::binary_search(members_.begin(), members_.end(), index);
}

CubeSet CubeSet::coarsen(int coarser) const {
  if (coarser < 0 || coarser > level_) {
    throw std::out_of_range("coarsening level must lie in [0, level]");
  }
  const int shift = level_ - coarser;
  std::vector<CubeIndex> out;
  out.reserve(members_.size());
  for (const auto& m : members_) {
    CubeIndex a = m;
    for (auto& i : a) i = shift_down(i, shift);
    out.push_back(std::move(a));
  }
  return {dim_, coarser, std::move(out)};
}

std::vector<double> CubeSet::centers() const {
  std::vector<double> out;
  out.reserve(members_.size() * dim_);
  const double h = std::ldexp(1.0, -level_);
  for (const auto& m : members_) {
    for (auto i : m) out.push_back((static_cast<double>(i) + 0.5) * h);
  }
  return out;
}

}  // namespace frostdecay
