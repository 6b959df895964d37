#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "frostdecay/measure.hpp"

namespace frostdecay {

/// Exponents of the decay construction; valid when 0 < alpha < s < n.
struct DecayParams {
  double alpha = 0.0;
  double s = 0.0;
  int n = 0;

  void validate() const;
};

enum class DecayKind { cond1, cond2 };
const char* to_string(DecayKind kind);

/// Relative slack allowed when comparing a measured supremum with its
/// closed-form constant.
inline constexpr double kCertificateSlack = 1e-9;

struct DecayCertificate {
  DecayKind kind = DecayKind::cond1;
  double sup = 0.0;
  double constant = 0.0;
  std::vector<double> center;
  double radius = 0.0;
  double r_min = 0.0;
  bool pass = false;
  std::string diagnostic;
};

/// Writes the certificate as a `key=value` block.
void write_certificate(std::ostream& out, const DecayCertificate& cert);

/// mu = sum_k 2^{-k alpha} nu restricted to {k <= |x| < k+1}.
AtomicMeasure reweight(const AtomicMeasure& nu, double alpha);

/// 1 + sum_{k>=0} 2^{-k alpha} (k+1)^s, as a guaranteed upper bound: the
/// partial sum is extended by a geometric bound on the omitted tail.
double constant_C_alpha_s(double alpha, double s);

/// 2^{alpha/2} 3^alpha / (1 - 2^{-alpha}).
double cond2_constant(double alpha);

/// Annuli a ball B[x, r] with j <= |x| < j+1 and r <= |x|/2 can meet:
/// floor((j-1)/2) <= k <= ceil(3(j+1)/2).
std::pair<std::int64_t, std::int64_t> annulus_window(std::int64_t j);

/// sup over r >= r_min of mu(B[0, r]) / r^{s - alpha}, compared with
/// C_{alpha,s}.  The supremum is exact: it is attained at r_min or at an
/// atom distance.  An atom at the origin makes the supremum over r > 0
/// infinite and fails the certificate.  `r_max` caps the radius window
/// (default: unbounded).
DecayCertificate certify_cond1(const AtomicMeasure& mu, const DecayParams& params,
                               std::optional<double> r_max = std::nullopt);

/// sup of mu(B[x, r + delta]) / (|x|^{-alpha} r^s) over candidates x with
/// |x| > 2 r_min and r in [r_min, a|x|] (a = 1/2 by default), compared with
/// cond2_constant(alpha).  With no admissible pair the certificate passes
/// vacuously with sup 0 and a diagnostic.
DecayCertificate certify_cond2(const AtomicMeasure& mu, const DecayParams& params,
                               const PointSet& candidates, double delta, double a = 0.5);

}  // namespace frostdecay
