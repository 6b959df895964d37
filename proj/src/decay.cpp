#include "frostdecay/decay.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "frostdecay/io.hpp"
#include "frostdecay/radial.hpp"

namespace frostdecay {

void DecayParams::validate() const {
  if (n < 1) throw std::invalid_argument("ambient dimension must be positive");
  if (!(alpha > 0.0 && alpha < s && s < static_cast<double>(n))) {
    throw std::invalid_argument("decay parameters need 0 < alpha < s < n (alpha=" +
                                format_double(alpha) + ", s=" + format_double(s) +
                                ", n=" + std::to_string(n) + ")");
  }
}

const char* to_string(DecayKind kind) { return kind == DecayKind::cond1 ? "cond1" : "cond2"; }

void write_certificate(std::ostream& out, const DecayCertificate& cert) {
  out << "kind=" << to_string(cert.kind) << '\n';
  out << "sup=" << format_double(cert.sup) << '\n';
  out << "constant=" << format_double(cert.constant) << '\n';
  out << "center=";
  for (std::size_t i = 0; i < cert.center.size(); ++i) out << (i ? " " : "") << format_double(cert.center[i]);
  out << '\n';
  out << "radius=" << format_double(cert.radius) << '\n';
  out << "r_min=" << format_double(cert.r_min) << '\n';
  out << "pass=" << (cert.pass ? "true" : "false") << '\n';
  if (!cert.diagnostic.empty()) out << "note=" << cert.diagnostic << '\n';
}

AtomicMeasure reweight(const AtomicMeasure& nu, double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("alpha must be positive");
  std::vector<double> masses = nu.masses();
  for (std::size_t i = 0; i < masses.size(); ++i) {
    const auto k = annulus_index(nu.position(i));
    masses[i] *= std::exp2(-static_cast<double>(k) * alpha);
  }
  return nu.with_masses(std::move(masses));
}

double constant_C_alpha_s(double alpha, double s) {
  if (!(alpha > 0.0) || !(s > 0.0)) throw std::invalid_argument("C_{alpha,s} needs alpha, s > 0");
  const double q = std::exp2(-alpha / 2.0);
  // Beyond k0 consecutive terms shrink at least by the factor q.
  auto term = [&](double k) { return std::exp2(-k * alpha + s * std::log2(k + 1.0)); };
  std::int64_t k0 = 0;
  while (s * std::log2((k0 + 2.0) / (k0 + 1.0)) > alpha / 2.0) ++k0;

  CompensatedSum sum;
  sum.add(1.0);
  std::int64_t k = 0;
  for (;; ++k) {
    const double t = term(static_cast<double>(k));
    sum.add(t);
    if (k >= k0 && t < 1e-15 * sum.value()) break;
  }
  sum.add(term(static_cast<double>(k + 1)) / (1.0 - q));
  return sum.value();
}

double cond2_constant(double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("cond2 constant needs alpha > 0");
  return std::exp2(alpha / 2.0) * std::pow(3.0, alpha) / (1.0 - std::exp2(-alpha));
}

std::pair<std::int64_t, std::int64_t> annulus_window(std::int64_t j) {
  if (j < 0) throw std::invalid_argument("annulus index must be non-negative");
  // floor((j-1)/2) and ceil(3(j+1)/2) in integer arithmetic
  const std::int64_t lo = (j - 1 >= 0) ? (j - 1) / 2 : -1;
  const std::int64_t hi = (3 * (j + 1) + 1) / 2;
  return {lo, hi};
}

DecayCertificate certify_cond1(const AtomicMeasure& mu, const DecayParams& params,
                               std::optional<double> r_max) {
  params.validate();
  if (mu.dim() != static_cast<std::size_t>(params.n)) throw std::invalid_argument("measure dimension differs from n");
  DecayCertificate cert;
  cert.kind = DecayKind::cond1;
  cert.constant = constant_C_alpha_s(params.alpha, params.s);
  cert.center.assign(mu.dim(), 0.0);
  cert.r_min = mu.r_min();

  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (norm(mu.position(i)) == 0.0) {
      cert.sup = std::numeric_limits<double>::infinity();
      cert.radius = 0.0;
      cert.pass = false;
      cert.diagnostic = "atom at the origin: ratio diverges as r -> 0";
      return cert;
    }
  }
  const double hi = r_max.value_or(std::numeric_limits<double>::infinity());
  const RatioSup sup = sup_ball_ratio(mu, cert.center, params.s - params.alpha, 0.0, mu.r_min(), hi);
  cert.sup = sup.value;
  cert.radius = sup.radius;
  cert.pass = cert.sup <= cert.constant * (1.0 + kCertificateSlack);
  return cert;
}

DecayCertificate certify_cond2(const AtomicMeasure& mu, const DecayParams& params,
                               const PointSet& candidates, double delta, double a) {
  params.validate();
  if (mu.dim() != static_cast<std::size_t>(params.n)) throw std::invalid_argument("measure dimension differs from n");
  if (!candidates.empty() && candidates.dim() != mu.dim()) throw std::invalid_argument("candidate arity mismatch");
  if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("radius fraction a must lie in (0, 1)");
  if (!(delta >= 0.0)) throw std::invalid_argument("net spacing must be non-negative");

  DecayCertificate cert;
  cert.kind = DecayKind::cond2;
  cert.constant = cond2_constant(params.alpha);
  cert.r_min = mu.r_min();

  const double r_min = mu.r_min();
  const BallTree tree(mu);
  const auto best = argmax_over_centers(candidates, [&](std::span<const double> x, double floor) {
    const double rx = norm(x);
    if (rx <= 2.0 * r_min) return RatioSup{};
    const double weight = std::pow(rx, params.alpha);
    RatioSup r = tree.sup_ball_ratio(x, params.s, delta, r_min, a * rx, floor / weight);
    r.value *= weight;
    return r;
  });
  if (!best) {
    cert.sup = 0.0;
    cert.pass = true;
    cert.diagnostic = "no admissible (x, r) pair; certificate holds vacuously";
    return cert;
  }
  const auto c = candidates.point(best->center);
  cert.sup = best->sup.value;
  cert.center.assign(c.begin(), c.end());
  cert.radius = best->sup.radius;
  cert.pass = cert.sup <= cert.constant * (1.0 + kCertificateSlack);
  return cert;
}

}  // namespace frostdecay
