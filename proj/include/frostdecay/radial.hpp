#pragma once

#include <algorithm>
#include <atomic>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "frostdecay/measure.hpp"
#include "frostdecay/parallel.hpp"

namespace frostdecay {

/// Result of maximizing r -> mu(B[x, r + inflate]) / r^exponent over a
/// radius window.
struct RatioSup {
  double value = 0.0;
  /// Smallest radius attaining `value` (NaN when the window is empty).
  double radius = std::numeric_limits<double>::quiet_NaN();
  /// mu(B[x, radius + inflate]).
  double mass = 0.0;
  bool admissible = false;
};

/// Exact supremum of mu(B[x, r + inflate]) / r^exponent over r in
/// [r_lo, r_hi] (r_hi may be +inf).
///
/// The ball mass is a right-continuous step function of r that jumps only
/// at r = |y - x| - inflate for atoms y, and the ratio decreases between
/// jumps, so the supremum is attained at r_lo or at one of those jump
/// radii.  Atom distances are binned geometrically; a bin is resolved
/// atom by atom only when its upper bound can beat the best exact value
/// already seen, so the answer is the exact maximum over all critical
/// radii without sorting every distance.
///
/// Requires 0 < r_lo, exponent >= 0, inflate >= 0.
RatioSup sup_ball_ratio(const AtomicMeasure& mu, std::span<const double> center, double exponent,
                        double inflate, double r_lo, double r_hi);

/// k-d tree over the atoms of a measure for repeated ratio maximization at
/// many centres.  Holds its own copy of the measure.
class BallTree {
 public:
  explicit BallTree(AtomicMeasure mu);

  const AtomicMeasure& measure() const { return mu_; }

  /// Same supremum as the free function.  Bins whose upper bound falls
  /// below floor * (1 - 1e-9) are skipped, so when the supremum is below
  /// that level the result is only a lower bound for it; at or above the
  /// level it is exact and does not depend on `floor`.
  RatioSup sup_ball_ratio(std::span<const double> center, double exponent, double inflate,
                          double r_lo, double r_hi, double floor = 0.0) const;

 private:
  struct Node {
    std::uint32_t begin = 0;
    std::uint32_t end = 0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    double mass = 0.0;
  };

  std::int32_t build(std::uint32_t begin, std::uint32_t end);
  void box_distances(std::size_t node, std::span<const double> x, double& dmin, double& dmax) const;

  AtomicMeasure mu_;
  std::vector<std::uint32_t> order_;  // atom indices, grouped by node
  std::vector<double> coords_;        // positions in `order_` order
  std::vector<double> masses_;        // masses in `order_` order
  std::vector<Node> nodes_;
  std::vector<double> boxes_;         // per node: lower corner then upper corner
};

struct RadialStep {
  double radius;  ///< a distinct atom distance from the centre
  double mass;    ///< mu(B[x, radius]), cumulative
};

/// Distinct atom distances from `center` up to r_hi, with the closed-ball
/// mass at each.
std::vector<RadialStep> radial_profile(const AtomicMeasure& mu, std::span<const double> center,
                                       double r_hi);

struct CenteredSup {
  std::size_t center = 0;  ///< index into the candidate set
  RatioSup sup;
};

/// Maximizes eval(point, floor) over a candidate set, evaluating candidates
/// in parallel.  `floor` is the largest value returned so far; eval may
/// return any value below floor * (1 - 1e-9) once it knows its own maximum
/// lies there.  Ties go to the lexicographically smallest centre, then to
/// the smallest radius.  Returns nullopt when no candidate is admissible.
template <class Eval>
std::optional<CenteredSup> argmax_over_centers(const PointSet& candidates, Eval&& eval) {
  std::vector<RatioSup> per(candidates.size());
  std::atomic<double> floor{0.0};
  parallel_for(candidates.size(), [&](std::size_t c) {
    per[c] = eval(candidates.point(c), floor.load(std::memory_order_relaxed));
    if (!per[c].admissible) return;
    double seen = floor.load(std::memory_order_relaxed);
    while (per[c].value > seen && !floor.compare_exchange_weak(seen, per[c].value)) {
    }
  });
  std::optional<CenteredSup> best;
  for (std::size_t c = 0; c < per.size(); ++c) {
    if (!per[c].admissible) continue;
    if (!best) {
      best = CenteredSup{c, per[c]};
      continue;
    }
    const RatioSup& b = best->sup;
    bool take = per[c].value > b.value;
    if (per[c].value == b.value) {
      const auto pc = candidates.point(c);
      const auto pb = candidates.point(best->center);
      if (std::lexicographical_compare(pc.begin(), pc.end(), pb.begin(), pb.end())) {
        take = true;
      } else if (std::equal(pc.begin(), pc.end(), pb.begin()) && per[c].radius < b.radius) {
        take = true;
      }
    }
    if (take) best = CenteredSup{c, per[c]};
  }
  return best;
}

}  // namespace frostdecay
