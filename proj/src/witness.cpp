#include "frostdecay/witness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "frostdecay/parallel.hpp"

namespace frostdecay {

double unit_sphere_area(int n) {
  if (n < 1) throw std::invalid_argument("dimension must be positive");
  return 2.0 * std::pow(std::numbers::pi, n / 2.0) / std::tgamma(n / 2.0);
}

std::vector<double> kernel_eval(int n, std::span<const double> x) {
  if (static_cast<int>(x.size()) != n) throw std::invalid_argument("point arity differs from n");
  const double r = norm(x);
  if (r == 0.0) throw std::invalid_argument("kernel is singular at x = 0");
  const double c = 1.0 / (unit_sphere_area(n) * std::pow(r, n));
  std::vector<double> k(x.begin(), x.end());
  for (auto& v : k) v *= c;
  return k;
}

WitnessField solve_divergence(const AtomicMeasure& mu, const PointSet& points, double rho) {
  if (points.dim() != mu.dim()) throw std::invalid_argument("point arity differs from the measure");
  if (!(rho >= 0.0)) throw std::invalid_argument("exclusion radius must be non-negative");
  const std::size_t n = mu.dim();
  const double sigma = unit_sphere_area(static_cast<int>(n));
  const double rho2 = rho * rho;
  std::vector<double> values(points.size() * n, 0.0);
  std::vector<char> excluded(points.size(), 0);

  parallel_for(points.size(), [&](std::size_t p) {
    const auto x = points.point(p);
    std::vector<CompensatedSum> acc(n);
    std::vector<double> diff(n);
    for (std::size_t i = 0; i < mu.size(); ++i) {
      const auto y = mu.position(i);
      double r2 = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        diff[k] = x[k] - y[k];
        r2 += diff[k] * diff[k];
      }
      if (r2 == 0.0 || r2 < rho2) {
        excluded[p] = 1;
        return;
      }
      // |x - y|^n from the squared distance
      double rn = (n % 2 == 1) ? std::sqrt(r2) : 1.0;
      for (std::size_t k = 0; k < n / 2; ++k) rn *= r2;
      const double c = mu.mass(i) / (sigma * rn);
      for (std::size_t k = 0; k < n; ++k) acc[k].add(c * diff[k]);
    }
    for (std::size_t k = 0; k < n; ++k) values[p * n + k] = acc[k].value();
  });

  WitnessField field;
  field.rho = rho;
  field.samples.dim = n;
  for (std::size_t p = 0; p < points.size(); ++p) {
    if (excluded[p]) {
      ++field.skipped;
      continue;
    }
    const auto x = points.point(p);
    const std::span<const double> f(values.data() + p * n, n);
    field.samples.points.insert(field.samples.points.end(), x.begin(), x.end());
    field.samples.values.insert(field.samples.values.end(), f.begin(), f.end());
    field.sup_norm = std::max(field.sup_norm, norm(f));
  }
  if (field.samples.size() == 0) field.diagnostic = "every point lies within rho of an atom";
  return field;
}

Bump::Bump(std::vector<double> center, double radius, double width)
    : center_(std::move(center)), radius_(radius), width_(width) {
  if (center_.empty()) throw std::invalid_argument("bump centre is empty");
  if (!(radius_ > 0.0) || !(width_ > 0.0) || !std::isfinite(radius_) || !std::isfinite(width_)) {
    throw std::invalid_argument("bump radius and width must be positive");
  }
  constexpr int kSamples = 1 << 17;
  for (int i = 0; i <= kSamples; ++i) {
    const double r = radius_ * i / kSamples;
    gradient_sup_ = std::max(gradient_sup_, std::abs(radial_factor(r * r)) * r);
  }
}

double Bump::radial_factor(double r2) const {
  const double q = r2 / (radius_ * radius_);
  if (q >= 1.0) return 0.0;
  const double t = 1.0 - q;
  const double g = std::exp(-r2 / (2.0 * width_ * width_));
  return g * (-t * t * t * t / (width_ * width_) - 8.0 * t * t * t / (radius_ * radius_));
}

double Bump::value(std::span<const double> x) const {
  if (x.size() != center_.size()) throw std::invalid_argument("point arity differs from the bump");
  double r2 = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) r2 += (x[k] - center_[k]) * (x[k] - center_[k]);
  const double q = r2 / (radius_ * radius_);
  if (q >= 1.0) return 0.0;
  const double t = 1.0 - q;
  return std::exp(-r2 / (2.0 * width_ * width_)) * t * t * t * t;
}

std::vector<double> Bump::gradient(std::span<const double> x) const {
  if (x.size() != center_.size()) throw std::invalid_argument("point arity differs from the bump");
  std::vector<double> d(x.size());
  double r2 = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    d[k] = x[k] - center_[k];
    r2 += d[k] * d[k];
  }
  const double g = radial_factor(r2);
  for (auto& v : d) v *= g;
  return d;
}

WeakResidual weak_divergence_residual(const AtomicMeasure& mu, const Bump& phi,
                                      const QuadratureGrid& grid, double rho) {
  const std::size_t n = mu.dim();
  if (phi.center().size() != n || grid.lower.size() != n || grid.upper.size() != n) {
    throw std::invalid_argument("bump, grid and measure dimensions differ");
  }
  if (grid.cells == 0) throw std::invalid_argument("grid needs at least one cell");
  if (!(rho >= 0.0)) throw std::invalid_argument("exclusion radius must be non-negative");
  std::vector<double> step(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (!(grid.upper[k] > grid.lower[k])) throw std::invalid_argument("grid box is empty");
    step[k] = (grid.upper[k] - grid.lower[k]) / static_cast<double>(grid.cells);
    if (phi.center()[k] - phi.radius() < grid.lower[k] ||
        phi.center()[k] + phi.radius() > grid.upper[k]) {
      throw std::invalid_argument("bump support reaches the edge of the quadrature box");
    }
    if (phi.radius() / step[k] < 16.0) {
      throw std::invalid_argument("grid resolves the bump with fewer than 16 cells per radius");
    }
  }
  const double sigma = unit_sphere_area(static_cast<int>(n));
  double volume = 1.0;
  for (double h : step) volume *= h;

  // Cell index ranges covering the bump ball.
  std::vector<std::size_t> first(n), count(n);
  std::size_t total = 1;
  for (std::size_t k = 0; k < n; ++k) {
    const double lo = (phi.center()[k] - phi.radius() - grid.lower[k]) / step[k];
    const double hi = (phi.center()[k] + phi.radius() - grid.lower[k]) / step[k];
    first[k] = static_cast<std::size_t>(std::max(0.0, std::floor(lo)));
    const auto last = std::min(grid.cells - 1, static_cast<std::size_t>(std::ceil(hi)));
    count[k] = last - first[k] + 1;
    total *= count[k];
  }
  // One slab per first-axis index, summed in index order afterwards.
  std::vector<double> slab(count[0], 0.0);
  std::vector<std::size_t> slab_skipped(count[0], 0);
  const std::size_t per_slab = total / count[0];
  parallel_for(count[0], [&](std::size_t s) {
    CompensatedSum acc;
    std::vector<double> x(n), diff(n);
    for (std::size_t c = 0; c < per_slab; ++c) {
      std::size_t rem = c;
      for (std::size_t k = n; k-- > 1;) {
        x[k] = grid.lower[k] + (static_cast<double>(first[k] + rem % count[k]) + 0.5) * step[k];
        rem /= count[k];
      }
      x[0] = grid.lower[0] + (static_cast<double>(first[0] + s) + 0.5) * step[0];
      const auto grad = phi.gradient(x);
      if (std::all_of(grad.begin(), grad.end(), [](double v) { return v == 0.0; })) continue;
      bool skip = false;
      CompensatedSum dot;
      for (std::size_t i = 0; i < mu.size() && !skip; ++i) {
        const auto y = mu.position(i);
        for (std::size_t k = 0; k < n; ++k) diff[k] = x[k] - y[k];
        const double r = norm(diff);
        if (r == 0.0 || r < rho) {
          skip = true;
          break;
        }
        const double w = mu.mass(i) / (sigma * std::pow(r, static_cast<double>(n)));
        double d = 0.0;
        for (std::size_t k = 0; k < n; ++k) d += diff[k] * grad[k];
        dot.add(w * d);
      }
      if (skip) {
        ++slab_skipped[s];
        continue;
      }
      acc.add(dot.value() * volume);
    }
    slab[s] = acc.value();
  });

  WeakResidual res;
  res.step = step[0];
  CompensatedSum field;
  for (std::size_t s = 0; s < count[0]; ++s) {
    field.add(slab[s]);
    res.skipped_cells += slab_skipped[s];
  }
  res.field_term = field.value();
  CompensatedSum atoms;
  std::size_t excluded_atoms = 0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    atoms.add(mu.mass(i) * phi.value(mu.position(i)));
    if (rho > 0.0 && distance(mu.position(i), phi.center()) < phi.radius() + rho) ++excluded_atoms;
  }
  res.atom_term = atoms.value();
  res.residual = std::abs(res.field_term + res.atom_term);
  res.scale = mu.total_mass() * phi.gradient_sup();
  // |f| integrates to at most (total mass) rho over any rho-ball.
  res.excluded_bound = static_cast<double>(excluded_atoms) * res.scale * rho;
  return res;
}

const char* to_string(Trend t) {
  switch (t) {
    case Trend::bounded: return "bounded";
    case Trend::diverging: return "diverging";
    case Trend::inconclusive: return "inconclusive";
  }
  return "?";
}

RefinementStudy summarize_refinement(std::vector<StudyRow> rows) {
  if (rows.size() < 3) throw std::invalid_argument("refinement study needs at least three levels");
  RefinementStudy study;
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  bool diverging = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    StudyRow& row = rows[i];
    row.ratio = std::numeric_limits<double>::quiet_NaN();
    if (i > 0) {
      row.ratio = row.sup / rows[i - 1].sup;
      diverging = diverging && row.ratio >= kDivergingFactor;
    }
    lo = std::min(lo, row.sup);
    hi = std::max(hi, row.sup);
  }
  study.rows = std::move(rows);
  study.spread = lo > 0.0 ? (hi - lo) / lo : std::numeric_limits<double>::infinity();
  if (study.spread < kBoundedSpread) {
    study.verdict = Trend::bounded;
  } else if (diverging) {
    study.verdict = Trend::diverging;
  }
  return study;
}

RefinementStudy supnorm_refinement_study(std::span<const StudyLevel> levels) {
  if (levels.size() < 3) throw std::invalid_argument("refinement study needs at least three levels");
  std::vector<StudyRow> rows;
  for (const StudyLevel& lv : levels) {
    const WitnessField f = solve_divergence(lv.measure, lv.points, lv.rho);
    rows.push_back({lv.level, f.samples.size(), lv.rho, f.sup_norm, 0.0});
  }
  return summarize_refinement(std::move(rows));
}

void write_study_table(std::ostream& out, const RefinementStudy& study) {
  out << "level,grid,rho,sup,ratio\n";
  for (const StudyRow& r : study.rows) {
    out << r.level << ',' << r.grid << ',' << format_double(r.rho) << ',' << format_double(r.sup)
        << ',' << format_double(r.ratio) << '\n';
  }
}

}  // namespace frostdecay
