#pragma once

#include <cstddef>
#include <vector>

#include "frostdecay/dyadic.hpp"
#include "frostdecay/measure.hpp"

namespace frostdecay {

/// Dyadic s-content of a CubeSet: the minimum of sum side(Q)^s over
/// antichains of dyadic cubes (levels 0..L) covering every member.
struct DyadicContent {
  double s = 0.0;
  double value = 0.0;
  std::vector<DyadicCube> antichain;
};

/// Frostman measure on the member cubes of S.
///
/// Every member starts with mass 2^{-Ls}.  Levels L-1, ..., 0 are then
/// swept; whenever the current mass T below a level-j cube exceeds its cap
/// 2^{-js}, all masses below it are scaled by 2^{-js} / T.  Afterwards every
/// dyadic cube Q of level 0..L carries at most side(Q)^s, and the total mass
/// equals the dyadic s-content of S.  One atom sits at the centre of each
/// member; r_min is 2^{-L}.
///
/// Throws std::invalid_argument unless 0 < s < n and S is nonempty.
AtomicMeasure greedy_frostman(const CubeSet& set, double s);

/// Exhaustive minimum over every antichain cover of S by dyadic cubes that
/// meet S.  Ties (relative 1e-12) go to the cover with the fewest cubes,
/// then to the one found first, which selects coarse cubes before their
/// children.  Refuses with std::length_error when the number of covers
/// exceeds `max_covers`.
DyadicContent dyadic_content_bruteforce(const CubeSet& set, double s,
                                        std::size_t max_covers = 1'000'000);

/// Number of antichain covers dyadic_content_bruteforce would visit
/// (saturates at SIZE_MAX).
std::size_t count_antichain_covers(const CubeSet& set);

struct NormalizedMeasure {
  AtomicMeasure measure;
  double constant = 0.0;        ///< M; the input equals M * measure
  std::vector<double> center;   ///< candidate attaining M
  double radius = 0.0;          ///< radius r attaining M (ball radius r + delta)
};

/// Rescales nu so that nu(B[x, r]) <= r^s for r >= r_min at every x within
/// delta of a candidate.
///
/// M is the exact supremum of nu(B[c, r + delta]) / r^s over candidates c
/// and r >= r_min.  Since B[x, r] lies inside B[c, r + delta] whenever
/// |x - c| <= delta, nu / M obeys the bound at all such x.
NormalizedMeasure ball_growth_normalize(const AtomicMeasure& nu, double s,
                                        const PointSet& candidates, double delta);

/// Centres of the member cubes plus the origin: a 2^{-L}-net of S (the
/// half-diagonal of a level-L cube is below 2^{-L} for n <= 4) that also
/// contains the centre used by the origin-centred growth checks.
PointSet member_centers_with_origin(const CubeSet& set);

}  // namespace frostdecay
