#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

namespace frostdecay {

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x);
  double value() const { return sum_ + correction_; }

 private:
  double sum_ = 0.0;
  double correction_ = 0.0;
};

double norm(std::span<const double> x);
double distance(std::span<const double> a, std::span<const double> b);

/// Flat list of points in R^n.
class PointSet {
 public:
  PointSet() = default;
  PointSet(std::size_t dim, std::vector<double> coords);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return dim_ == 0 ? 0 : coords_.size() / dim_; }
  bool empty() const { return size() == 0; }
  std::span<const double> point(std::size_t i) const {
    return {coords_.data() + i * dim_, dim_};
  }
  const std::vector<double>& coords() const { return coords_; }

  void push_back(std::span<const double> p);

 private:
  std::size_t dim_ = 0;
  std::vector<double> coords_;
};

struct Atom {
  std::vector<double> position;
  double mass = 0.0;
};

/// Finite positive combination of Dirac masses in R^n together with the
/// resolution r_min below which it makes no claim about the measure it
/// discretizes.
///
/// Atoms are stored sorted lexicographically by position; positions are
/// pairwise distinct and masses finite and strictly positive.  Every
/// summation over atoms runs in that order, so results are reproducible
/// bit for bit.  The empty measure is allowed.
class AtomicMeasure {
 public:
  AtomicMeasure(std::size_t dim, std::vector<double> positions, std::vector<double> masses,
                double r_min);
  static AtomicMeasure from_atoms(std::size_t dim, const std::vector<Atom>& atoms, double r_min);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return masses_.size(); }
  bool empty() const { return masses_.empty(); }
  double r_min() const { return r_min_; }

  std::span<const double> position(std::size_t i) const {
    return {positions_.data() + i * dim_, dim_};
  }
  double mass(std::size_t i) const { return masses_[i]; }
  const std::vector<double>& masses() const { return masses_; }
  const std::vector<double>& positions() const { return positions_; }
  PointSet support() const { return PointSet(dim_, positions_); }

  double total_mass() const;

  AtomicMeasure scaled(double factor) const;
  AtomicMeasure translated(std::span<const double> shift) const;
  /// Same atoms, new masses (one per atom, in storage order).
  AtomicMeasure with_masses(std::vector<double> masses) const;
  /// Atoms of both measures; positions must stay distinct.
  AtomicMeasure merged(const AtomicMeasure& other) const;

  bool operator==(const AtomicMeasure&) const = default;

 private:
  std::size_t dim_;
  std::vector<double> positions_;
  std::vector<double> masses_;
  double r_min_;
};

/// Closed ball B[center, radius].
struct BallQuery {
  std::vector<double> center;
  double radius = 0.0;
};

double ball_mass(const AtomicMeasure& mu, const BallQuery& ball);

/// The k >= 0 with k <= |x| < k + 1.
std::int64_t annulus_index(std::span<const double> x);

/// Mass carried by each occupied annulus {k <= |x| < k + 1}.
std::map<std::int64_t, double> annulus_masses(const AtomicMeasure& mu);

}  // namespace frostdecay
