#include "frostdecay/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace frostdecay {

void CompensatedSum::add(double x) {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x)) {
    correction_ += (sum_ - t) + x;
  } else {
    correction_ += (x - t) + sum_;
  }
  sum_ = t;
}

double norm(std::span<const double> x) {
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return std::sqrt(acc);
}

double distance(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return std::sqrt(acc);
}

PointSet::PointSet(std::size_t dim, std::vector<double> coords)
    : dim_(dim), coords_(std::move(coords)) {
  if (dim_ == 0) throw std::invalid_argument("PointSet dimension must be positive");
  if (coords_.size() % dim_ != 0) {
    throw std::invalid_argument("PointSet coordinate count is not a multiple of the dimension");
  }
}

void PointSet::push_back(std::span<const double> p) {
  if (p.size() != dim_) throw std::invalid_argument("point arity does not match PointSet");
  coords_.insert(coords_.end(), p.begin(), p.end());
}

AtomicMeasure::AtomicMeasure(std::size_t dim, std::vector<double> positions,
                             std::vector<double> masses, double r_min)
    : dim_(dim), r_min_(r_min) {
  if (dim_ == 0) throw std::invalid_argument("measure dimension must be positive");
  if (!(std::isfinite(r_min) && r_min > 0.0)) {
    throw std::invalid_argument("measure resolution r_min must be finite and positive");
  }
  if (positions.size() != masses.size() * dim_) {
    throw std::invalid_argument("measure has " + std::to_string(positions.size()) +
                                " coordinates for " + std::to_string(masses.size()) +
                                " atoms in dimension " + std::to_string(dim_));
  }
  for (std::size_t i = 0; i < masses.size(); ++i) {
    if (!(std::isfinite(masses[i]) && masses[i] > 0.0)) {
      throw std::invalid_argument("atom " + std::to_string(i) +
                                  " has non-positive or non-finite mass");
    }
  }
  for (double c : positions) {
    if (!std::isfinite(c)) throw std::invalid_argument("atom position is not finite");
  }

  std::vector<std::size_t> order(masses.size());
  std::iota(order.begin(), order.end(), 0);
  auto less = [&](std::size_t a, std::size_t b) {
    return std::lexicographical_compare(positions.begin() + a * dim_,
                                        positions.begin() + (a + 1) * dim_,
                                        positions.begin() + b * dim_,
                                        positions.begin() + (b + 1) * dim_);
  };
  std::sort(order.begin(), order.end(), less);

  positions_.reserve(positions.size());
  masses_.reserve(masses.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    const std::size_t i = order[k];
    if (k > 0 && !less(order[k - 1], i)) {
      throw std::invalid_argument("duplicate atom position");
    }
    positions_.insert(positions_.end(), positions.begin() + i * dim_,
                      positions.begin() + (i + 1) * dim_);
    masses_.push_back(masses[i]);
  }
}

AtomicMeasure AtomicMeasure::from_atoms(std::size_t dim, const std::vector<Atom>& atoms,
                                        double r_min) {
  std::vector<double> pos;
  std::vector<double> mass;
  pos.reserve(atoms.size() * dim);
  mass.reserve(atoms.size());
  for (const auto& a : atoms) {
    if (a.position.size() != dim) throw std::invalid_argument("atom arity mismatch");
    pos.insert(pos.end(), a.position.begin(), a.position.end());
    mass.push_back(a.mass);
  }
  return {dim, std::move(pos), std::move(mass), r_min};
}

double AtomicMeasure::total_mass() const {
  CompensatedSum s;
  for (double m : masses_) s.add(m);
  return s.value();
}

AtomicMeasure AtomicMeasure::scaled(double factor) const {
  if (!(std::isfinite(factor) && factor > 0.0)) {
    throw std::invalid_argument("measure scale factor must be finite and positive");
  }
  std::vector<double> m = masses_;
  for (auto& v : m) v *= factor;
  return with_masses(std::move(m));
}

AtomicMeasure AtomicMeasure::translated(std::span<const double> shift) const {
  if (shift.size() != dim_) throw std::invalid_argument("shift arity mismatch");
  std::vector<double> p = positions_;
  for (std::size_t i = 0; i < p.size(); ++i) p[i] += shift[i % dim_];
  return {dim_, std::move(p), masses_, r_min_};
}

AtomicMeasure AtomicMeasure::with_masses(std::vector<double> masses) const {
  return {dim_, positions_, std::move(masses), r_min_};
}

AtomicMeasure AtomicMeasure::merged(const AtomicMeasure& other) const {
  if (other.dim_ != dim_) throw std::invalid_argument("cannot merge measures of different dimension");
  std::vector<double> p = positions_;
  p.insert(p.end(), other.positions_.begin(), other.positions_.end());
  std::vector<double> m = masses_;
  m.insert(m.end(), other.masses_.begin(), other.masses_.end());
  return {dim_, std::move(p), std::move(m), std::min(r_min_, other.r_min_)};
}

double ball_mass(const AtomicMeasure& mu, const BallQuery& ball) {
  if (ball.center.size() != mu.dim()) throw std::invalid_argument("ball centre arity mismatch");
  CompensatedSum s;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (distance(mu.position(i), ball.center) <= ball.radius) s.add(mu.mass(i));
  }
  return s.value();
}

std::int64_t annulus_index(std::span<const double> x) {
  return static_cast<std::int64_t>(std::floor(norm(x)));
}

std::map<std::int64_t, double> annulus_masses(const AtomicMeasure& mu) {
  std::map<std::int64_t, CompensatedSum> sums;
  for (std::size_t i = 0; i < mu.size(); ++i) sums[annulus_index(mu.position(i))].add(mu.mass(i));
  std::map<std::int64_t, double> out;
  for (const auto& [k, s] : sums) out[k] = s.value();
  return out;
}

}  // namespace frostdecay
