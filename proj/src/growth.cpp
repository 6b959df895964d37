#include "frostdecay/growth.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "frostdecay/decay.hpp"
#include "frostdecay/io.hpp"
#include "frostdecay/radial.hpp"

namespace frostdecay {

namespace {

void write_point(std::ostream& out, const std::vector<double>& p) {
  for (std::size_t i = 0; i < p.size(); ++i) out << (i ? " " : "") << format_double(p[i]);
}

// Integral of M r^{-(p+1)} over [lo, hi].
double step_integral(double mass, double lo, double hi, double p) {
  return mass * (std::pow(lo, -p) - std::pow(hi, -p)) / p;
}

}  // namespace

void OperatorOrderParams::validate() const {
  if (!(0 < m && m < n)) {
    throw std::invalid_argument("operator order needs 0 < m < n (n=" + std::to_string(n) +
                                ", m=" + std::to_string(m) + ")");
  }
}

OriginGrowth bp1_sup(const AtomicMeasure& mu, const OperatorOrderParams& params, double r_min,
                     double r_max) {
  params.validate();
  if (mu.dim() != static_cast<std::size_t>(params.n)) throw std::invalid_argument("measure dimension differs from n");
  if (!(r_min > 0.0) || !(r_max >= r_min)) throw std::invalid_argument("need 0 < r_min <= r_max");
  OriginGrowth g;
  const std::vector<double> origin(mu.dim(), 0.0);
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const double d = norm(mu.position(i));
    if (d == 0.0) {
      g.sup = std::numeric_limits<double>::infinity();
      g.radius = 0.0;
      g.finite = false;
      g.diagnostic = "atom at the origin: ratio diverges as r -> 0";
      return g;
    }
    if (d > r_max) {
      throw std::invalid_argument("r_max=" + format_double(r_max) +
                                  " does not reach atom at distance " + format_double(d));
    }
  }
  const RatioSup s = sup_ball_ratio(mu, origin, params.codim(), 0.0, r_min, r_max);
  g.sup = s.value;
  g.radius = s.radius;
  return g;
}

DiniReport dini_integral(const AtomicMeasure& mu, std::span<const double> x,
                         const OperatorOrderParams& params, double r_min, double a) {
  params.validate();
  if (x.size() != mu.dim()) throw std::invalid_argument("centre arity mismatch");
  if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("radius fraction a must lie in (0, 1)");
  if (!(r_min > 0.0)) throw std::invalid_argument("r_min must be positive");
  const double rx = norm(x);
  if (rx == 0.0) throw std::invalid_argument("Dini integral is only defined for x != 0");

  DiniReport rep;
  rep.center.assign(x.begin(), x.end());
  rep.r_min = r_min;
  rep.upper_limit = a * rx;
  const double p = params.codim();
  const double upper = rep.upper_limit;
  const auto steps = radial_profile(mu, x, upper);

  // (0, min(r_min, upper)): reported separately.
  const double cut = std::min(r_min, upper);
  CompensatedSum below;
  bool atom_at_x = false;
  std::size_t k = 0;
  for (; k < steps.size() && steps[k].radius < cut; ++k) {
    if (steps[k].radius == 0.0) {
      atom_at_x = true;
      continue;
    }
    const double next = (k + 1 < steps.size() && steps[k + 1].radius < cut) ? steps[k + 1].radius : cut;
    below.add(step_integral(steps[k].mass, steps[k].radius, next, p));
  }
  rep.below_resolution = atom_at_x ? std::numeric_limits<double>::infinity() : below.value();
  if (upper <= r_min) return rep;

  // [r_min, upper]: M_0 = mu(B[x, r_min]), then one step per atom distance.
  while (k < steps.size() && steps[k].radius <= r_min) ++k;
  double mass = 0.0;
  if (k > 0) mass = steps[k - 1].mass;
  CompensatedSum value;
  double lo = r_min;
  for (; k < steps.size(); ++k) {
    value.add(step_integral(mass, lo, steps[k].radius, p));
    lo = steps[k].radius;
    mass = steps[k].mass;
  }
  value.add(step_integral(mass, lo, upper, p));
  rep.value = value.value();
  return rep;
}

UniformDini bp2_uniform(const AtomicMeasure& mu, const OperatorOrderParams& params,
                        const PointSet& samples, double threshold, double a) {
  if (samples.empty()) throw std::invalid_argument("uniform Dini check needs sample centres");
  std::vector<double> values(samples.size());
  parallel_for(samples.size(), [&](std::size_t i) {
    values[i] = dini_integral(mu, samples.point(i), params, mu.r_min(), a).value;
  });
  std::size_t arg = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    const auto pi = samples.point(i);
    const auto pa = samples.point(arg);
    if (values[i] > values[arg] ||
        (values[i] == values[arg] &&
         std::lexicographical_compare(pi.begin(), pi.end(), pa.begin(), pa.end()))) {
      arg = i;
    }
  }
  UniformDini out;
  out.sup = values[arg];
  const auto c = samples.point(arg);
  out.center.assign(c.begin(), c.end());
  out.threshold = threshold;
  out.pass = out.sup <= threshold;
  out.samples = samples.size();
  return out;
}

PointwiseReport pointwise_regularity_check(const AtomicMeasure& mu,
                                           const OperatorOrderParams& params, double c2,
                                           const PointSet& candidates, double delta, double a) {
  params.validate();
  if (mu.dim() != static_cast<std::size_t>(params.n)) throw std::invalid_argument("measure dimension differs from n");
  if (!(c2 > 0.0)) throw std::invalid_argument("C_2 must be positive");
  if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("radius fraction a must lie in (0, 1)");
  if (!(delta >= 0.0)) throw std::invalid_argument("net spacing must be non-negative");
  if (!candidates.empty() && candidates.dim() != mu.dim()) throw std::invalid_argument("candidate arity mismatch");

  PointwiseReport rep;
  rep.constant = c2;
  rep.implied_dini_bound = c2 * std::pow(a, params.m) / params.m;
  const double r_min = mu.r_min();
  const BallTree tree(mu);
  const auto best = argmax_over_centers(candidates, [&](std::span<const double> x, double floor) {
    const double rx = norm(x);
    if (rx <= 2.0 * r_min) return RatioSup{};
    const double weight = std::pow(rx, params.m);
    RatioSup r = tree.sup_ball_ratio(x, params.n, delta, r_min, a * rx, floor / weight);
    r.value *= weight;
    return r;
  });
  if (!best) {
    rep.pass = true;
    rep.diagnostic = "no admissible (x, r) pair; certificate holds vacuously";
    return rep;
  }
  const auto c = candidates.point(best->center);
  rep.sup = best->sup.value;
  rep.center.assign(c.begin(), c.end());
  rep.radius = best->sup.radius;
  rep.pass = rep.sup <= c2 * (1.0 + kCertificateSlack);
  return rep;
}

CovectorMeasure::CovectorMeasure(AtomicMeasure base, std::vector<std::complex<double>> covector)
    : base_(std::move(base)), covector_(std::move(covector)) {
  double acc = 0.0;
  for (const auto& c : covector_) acc += std::norm(c);
  norm_ = std::sqrt(acc);
  if (!(norm_ > 0.0) || !std::isfinite(norm_)) {
    throw std::invalid_argument("covector must be nonzero and finite");
  }
}

double CovectorMeasure::total_variation(const BallQuery& ball) const {
  return norm_ * ball_mass(base_, ball);
}

CovectorMeasure vectorize(const AtomicMeasure& mu, std::vector<std::complex<double>> e) {
  return {mu, std::move(e)};
}

OriginGrowth bp1_sup(const CovectorMeasure& mu, const OperatorOrderParams& params, double r_min,
                     double r_max) {
  OriginGrowth g = bp1_sup(mu.base(), params, r_min, r_max);
  g.sup *= mu.covector_norm();
  return g;
}

DiniReport dini_integral(const CovectorMeasure& mu, std::span<const double> x,
                         const OperatorOrderParams& params, double r_min, double a) {
  DiniReport r = dini_integral(mu.base(), x, params, r_min, a);
  r.value *= mu.covector_norm();
  r.below_resolution *= mu.covector_norm();
  return r;
}

void write_origin_growth(std::ostream& out, const OriginGrowth& g) {
  out << "kind=bp1\n";
  out << "sup=" << format_double(g.sup) << '\n';
  out << "radius=" << format_double(g.radius) << '\n';
  out << "finite=" << (g.finite ? "true" : "false") << '\n';
  if (!g.diagnostic.empty()) out << "note=" << g.diagnostic << '\n';
}

void write_dini(std::ostream& out, const UniformDini& d) {
  out << "kind=bp2\n";
  out << "sup=" << format_double(d.sup) << '\n';
  out << "threshold=" << format_double(d.threshold) << '\n';
  out << "center=";
  write_point(out, d.center);
  out << '\n';
  out << "samples=" << d.samples << '\n';
  out << "pass=" << (d.pass ? "true" : "false") << '\n';
}

void write_pointwise(std::ostream& out, const PointwiseReport& p) {
  out << "kind=pointwise\n";
  out << "sup=" << format_double(p.sup) << '\n';
  out << "constant=" << format_double(p.constant) << '\n';
  out << "center=";
  write_point(out, p.center);
  out << '\n';
  out << "radius=" << format_double(p.radius) << '\n';
  out << "implied_dini_bound=" << format_double(p.implied_dini_bound) << '\n';
  out << "pass=" << (p.pass ? "true" : "false") << '\n';
  if (!p.diagnostic.empty()) out << "note=" << p.diagnostic << '\n';
}

}  // namespace frostdecay
