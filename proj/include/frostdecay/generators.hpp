#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "frostdecay/dyadic.hpp"
#include "frostdecay/measure.hpp"

namespace frostdecay {

/// Coarsest dyadic level whose cube side does not exceed ratio^generations.
int dyadic_level_for(double ratio, int generations);

/// Outer dyadic approximation of the planar four-corner Cantor set.
///
/// Generation k consists of 4^k closed squares of side ratio^k inside
/// [0,1]^2, each generation-(k-1) square being replaced by its four corner
/// copies scaled by `ratio`.  Every generation-k square is replaced by the
/// level-L dyadic cubes meeting its interior, where L defaults to
/// dyadic_level_for(ratio, generations).  For ratio = 1/4 the squares are
/// dyadic and the result has exactly 4^k members at level 2k.
CubeSet gen_four_corner_cantor(double ratio, int generations,
                               std::optional<int> dyadic_level = std::nullopt);

/// Cell-centred discretization of |x|^-exponent dx on the ball of radius
/// `outer_radius`: one atom per cell centre y = h * i (i in Z^n, i != 0,
/// |y| <= R) with mass |y|^-exponent h^n.  The cell at the origin, where the
/// density is singular, is left out.  r_min of the result is h.
AtomicMeasure gen_power_density(std::size_t dim, double exponent, double outer_radius,
                                double step);

/// Random self-similar-ish subset: level-0 cubes with indices in
/// [-half_width, half_width)^n are kept with probability `keep`, and every
/// kept cube keeps each child with the same probability down to `level`.
/// Never returns an empty set (the draw is repeated).
CubeSet gen_random_cubeset(std::size_t dim, int level, double keep, std::int64_t half_width,
                           std::uint64_t seed);

/// Least-squares slope of log(#members) against level * log 2.
/// Needs at least three sets; equal counts give slope 0.
double box_dimension_estimate(std::span<const CubeSet> sets);

}  // namespace frostdecay
