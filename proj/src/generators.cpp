#include "frostdecay/generators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "frostdecay/rng.hpp"

namespace frostdecay {

namespace {

constexpr int kMaxCantorGenerations = 12;

double power_int(double base, int exponent) {
  double v = 1.0;
  for (int i = 0; i < exponent; ++i) v *= base;
  return v;
}

}  // namespace

int dyadic_level_for(double ratio, int generations) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw std::invalid_argument("ratio must lie in (0, 1)");
  if (generations < 0) throw std::invalid_argument("generation count must be non-negative");
  const double target = power_int(ratio, generations);
  int level = 0;
  while (std::ldexp(1.0, -level) > target) {
    if (++level > kMaxDyadicLevel) {
      throw std::out_of_range("required dyadic level exceeds " + std::to_string(kMaxDyadicLevel));
    }
  }
  return level;
}

CubeSet gen_four_corner_cantor(double ratio, int generations, std::optional<int> dyadic_level) {
  if (!(ratio > 0.0 && ratio < 0.5)) {
    throw std::invalid_argument("four-corner ratio must lie in (0, 1/2)");
  }
  if (generations < 0) throw std::invalid_argument("generation count must be non-negative");
  if (generations > kMaxCantorGenerations) {
    throw std::length_error("more than " + std::to_string(kMaxCantorGenerations) +
                            " generations requested");
  }
  const int level = dyadic_level ? *dyadic_level : dyadic_level_for(ratio, generations);
  if (level < 0 || level > kMaxDyadicLevel) {
    throw std::out_of_range("dyadic level " + std::to_string(level) + " cannot be indexed");
  }

  std::vector<double> corners{0.0, 0.0};
  double side = 1.0;
  for (int g = 0; g < generations; ++g) {
    const double step = side * (1.0 - ratio);
    std::vector<double> next;
    next.reserve(corners.size() * 4);
    for (std::size_t c = 0; c < corners.size(); c += 2) {
      for (int dx = 0; dx < 2; ++dx) {
        for (int dy = 0; dy < 2; ++dy) {
          next.push_back(corners[c] + dx * step);
          next.push_back(corners[c + 1] + dy * step);
        }
      }
    }
    corners = std::move(next);
    side *= ratio;
  }

  const double scale = std::ldexp(1.0, level);
  std::vector<CubeIndex> members;
  for (std::size_t c = 0; c < corners.size(); c += 2) {
    const auto x0 = static_cast<std::int64_t>(std::floor(corners[c] * scale));
    const auto x1 = static_cast<std::int64_t>(std::ceil((corners[c] + side) * scale)) - 1;
    const auto y0 = static_cast<std::int64_t>(std::floor(corners[c + 1] * scale));
    const auto y1 = static_cast<std::int64_t>(std::ceil((corners[c + 1] + side) * scale)) - 1;
    for (auto i = x0; i <= x1; ++i) {
      for (auto j = y0; j <= y1; ++j) members.push_back({i, j});
    }
  }
  return {2, level, std::move(members)};
}

AtomicMeasure gen_power_density(std::size_t dim, double exponent, double outer_radius,
                                double step) {
  if (dim == 0) throw std::invalid_argument("dimension must be positive");
  if (!(exponent > 0.0 && exponent < static_cast<double>(dim))) {
    throw std::invalid_argument("density exponent must lie in (0, n)");
  }
  if (!(step > 0.0) || !std::isfinite(step)) throw std::invalid_argument("grid step must be positive");
  if (!(outer_radius > step)) {
    throw std::invalid_argument("outer radius must exceed the grid step (output would be empty)");
  }
  const auto reach = static_cast<std::int64_t>(std::floor(outer_radius / step));
  const double cell_volume = std::pow(step, static_cast<double>(dim));

  std::vector<double> positions;
  std::vector<double> masses;
  std::vector<std::int64_t> idx(dim, -reach);
  std::vector<double> y(dim);
  while (true) {
    bool origin = true;
    for (std::size_t d = 0; d < dim; ++d) {
      y[d] = static_cast<double>(idx[d]) * step;
      origin = origin && idx[d] == 0;
    }
    const double r = norm(y);
    if (!origin && r <= outer_radius) {
      positions.insert(positions.end(), y.begin(), y.end());
      masses.push_back(std::pow(r, -exponent) * cell_volume);
    }
    std::size_t d = dim;
    while (d > 0 && idx[d - 1] == reach) idx[--d] = -reach;
    if (d == 0) break;
    ++idx[d - 1];
  }
  return {dim, std::move(positions), std::move(masses), step};
}

CubeSet gen_random_cubeset(std::size_t dim, int level, double keep, std::int64_t half_width,
                           std::uint64_t seed) {
  if (dim == 0 || dim > 4) throw std::invalid_argument("random cube sets support 1 <= n <= 4");
  if (level < 0 || level > 20) throw std::out_of_range("random cube set level must lie in [0, 20]");
  if (!(keep > 0.0 && keep <= 1.0)) throw std::invalid_argument("keep probability must lie in (0, 1]");
  if (half_width < 1) throw std::invalid_argument("half width must be at least 1");

  Rng rng(seed);
  for (int attempt = 0; attempt < 256; ++attempt) {
    std::vector<DyadicCube> current;
    std::vector<std::int64_t> idx(dim, -half_width);
    while (true) {
      if (rng.uniform() < keep) current.push_back({0, idx});
      std::size_t d = dim;
      while (d > 0 && idx[d - 1] == half_width - 1) idx[--d] = -half_width;
      if (d == 0) break;
      ++idx[d - 1];
    }
    for (int l = 0; l < level && !current.empty(); ++l) {
      std::vector<DyadicCube> next;
      for (const auto& q : current) {
        for (auto& c : q.children()) {
          if (rng.uniform() < keep) next.push_back(std::move(c));
        }
      }
      current = std::move(next);
    }
    if (!current.empty()) {
      std::vector<CubeIndex> members;
      members.reserve(current.size());
      for (auto& q : current) members.push_back(std::move(q.index));
      return {dim, level, std::move(members)};
    }
  }
  CubeIndex single(dim);
  for (auto& i : single) i = static_cast<std::int64_t>(rng.below(std::uint64_t{1} << level));
  return {dim, level, {single}};
}

double box_dimension_estimate(std::span<const CubeSet> sets) {
  if (sets.size() < 3) throw std::invalid_argument("box counting needs at least three levels");
  const std::size_t count0 = sets.front().size();
  bool all_equal = true;
  for (const auto& s : sets) {
    if (s.empty()) throw std::invalid_argument("box counting over an empty cube set");
    all_equal = all_equal && s.size() == count0;
  }
  if (all_equal) return 0.0;

  const double k = static_cast<double>(sets.size());
  double mx = 0.0;
  double my = 0.0;
  for (const auto& s : sets) {
    mx += s.level() * std::log(2.0);
    my += std::log(static_cast<double>(s.size()));
  }
  mx /= k;
  my /= k;
  double sxy = 0.0;
  double sxx = 0.0;
  for (const auto& s : sets) {
    const double dx = s.level() * std::log(2.0) - mx;
    sxy += dx * (std::log(static_cast<double>(s.size())) - my);
    sxx += dx * dx;
  }
  if (sxx == 0.0) throw std::invalid_argument("box counting needs at least two distinct levels");
  return sxy / sxx;
}

}  // namespace frostdecay
