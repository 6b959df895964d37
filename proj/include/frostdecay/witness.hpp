#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "frostdecay/io.hpp"
#include "frostdecay/measure.hpp"

namespace frostdecay {

/// Surface area 2 pi^{n/2} / Gamma(n/2) of the unit sphere in R^n.
double unit_sphere_area(int n);

/// Gradient of the Newtonian potential, x / (sigma_{n-1} |x|^n); its
/// distributional divergence is the Dirac mass at 0.  Throws for x = 0.
std::vector<double> kernel_eval(int n, std::span<const double> x);

struct WitnessField {
  FieldSamples samples;    ///< evaluated (non-excluded) points only
  double sup_norm = 0.0;   ///< max |f| over the evaluated points
  std::size_t skipped = 0;
  double rho = 0.0;
  std::string diagnostic;
};

/// f(x) = sum_i m_i K(x - y_i) at every point farther than rho from all
/// atoms (a point sitting on an atom is skipped even for rho = 0).
WitnessField solve_divergence(const AtomicMeasure& mu, const PointSet& points, double rho);

/// phi(x) = exp(-r^2 / (2 w^2)) (1 - r^2/R^2)^4 for r = |x - c| < R, else 0.
class Bump {
 public:
  Bump(std::vector<double> center, double radius, double width);

  const std::vector<double>& center() const { return center_; }
  double radius() const { return radius_; }
  double width() const { return width_; }

  double value(std::span<const double> x) const;
  std::vector<double> gradient(std::span<const double> x) const;
  /// max |grad phi| (radial profile sampled at 2^17 + 1 radii).
  double gradient_sup() const { return gradient_sup_; }

 private:
  // grad phi(x) = g(r) (x - c)
  double radial_factor(double r2) const;

  std::vector<double> center_;
  double radius_;
  double width_;
  double gradient_sup_ = 0.0;
};

/// Tensor grid of `cells` equal cells per axis on the box [lower, upper].
struct QuadratureGrid {
  std::vector<double> lower;
  std::vector<double> upper;
  std::size_t cells = 0;
};

struct WeakResidual {
  double residual = 0.0;      ///< |int f . grad phi dx + int phi dmu|
  double field_term = 0.0;    ///< midpoint-rule value of int f . grad phi dx
  double atom_term = 0.0;     ///< sum_i m_i phi(y_i)
  double scale = 0.0;         ///< total mass * sup |grad phi|
  double excluded_bound = 0.0;  ///< bound on the part of the integral left out
  std::size_t skipped_cells = 0;
  double step = 0.0;
};

/// Weak form of div f = mu against the bump, by the midpoint rule over the
/// cells meeting the bump support.  Cells whose centre lies within rho of
/// an atom are left out; each such exclusion ball costs at most
/// total mass * rho * sup |grad phi|, which is reported in excluded_bound.
/// Throws when the bump ball leaves the grid box or the grid has fewer than
/// 16 cells per bump radius.
WeakResidual weak_divergence_residual(const AtomicMeasure& mu, const Bump& phi,
                                      const QuadratureGrid& grid, double rho);

struct StudyLevel {
  int level = 0;
  AtomicMeasure measure;
  PointSet points;
  double rho = 0.0;
};

struct StudyRow {
  int level = 0;
  std::size_t grid = 0;  ///< evaluated points
  double rho = 0.0;
  double sup = 0.0;
  double ratio = 0.0;    ///< sup / previous sup (NaN on the first row)
};

enum class Trend { bounded, diverging, inconclusive };
const char* to_string(Trend t);

/// Spread below this fraction of the smallest sup counts as bounded.
inline constexpr double kBoundedSpread = 0.1;
/// Every consecutive ratio at least this large counts as diverging.
inline constexpr double kDivergingFactor = 5.0;

struct RefinementStudy {
  std::vector<StudyRow> rows;
  double spread = 0.0;  ///< (max sup - min sup) / min sup
  Trend verdict = Trend::inconclusive;
};

/// sup |f| per level; needs at least three levels.
RefinementStudy supnorm_refinement_study(std::span<const StudyLevel> levels);

/// Ratios, spread and verdict for rows whose level, grid, rho and sup are
/// already filled in; needs at least three rows.
RefinementStudy summarize_refinement(std::vector<StudyRow> rows);

/// `level,grid,rho,sup,ratio` table.
void write_study_table(std::ostream& out, const RefinementStudy& study);

}  // namespace frostdecay
