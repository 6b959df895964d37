#pragma once

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "frostdecay/measure.hpp"

namespace frostdecay {

/// Ambient dimension and operator order, 0 < m < n.
struct OperatorOrderParams {
  int n = 0;
  int m = 0;

  void validate() const;
  int codim() const { return n - m; }
};

struct OriginGrowth {
  double sup = 0.0;
  double radius = 0.0;  ///< attaining radius (0 when the sup is infinite)
  bool finite = true;
  std::string diagnostic;
};

/// Exact sup over r in [r_min, r_max] of mu(B[0, r]) / r^{n-m}.  An atom at
/// the origin makes the supremum over r > 0 infinite.  Requires r_max to
/// reach every atom.
OriginGrowth bp1_sup(const AtomicMeasure& mu, const OperatorOrderParams& params, double r_min,
                     double r_max);

struct DiniReport {
  std::vector<double> center;
  /// Exact integral of mu(B[x, r]) r^{-(n-m+1)} over [r_min, a|x|].
  double value = 0.0;
  /// The same integral over (0, r_min); infinite when x is itself an atom.
  /// Reported only: the measure is not trusted below its resolution.
  double below_resolution = 0.0;
  double r_min = 0.0;
  double upper_limit = 0.0;  ///< a|x|
};

/// Integral of the step function r -> mu(B[x, r]) against r^{-(n-m+1)} dr.
/// With critical radii r_0 = r_min < r_1 < ... < r_K < r_{K+1} = a|x| and
/// step values M_i = mu(B[x, r_i]) the value is
///   sum_i M_i (r_i^{-(n-m)} - r_{i+1}^{-(n-m)}) / (n-m).
/// Throws for x = 0.
DiniReport dini_integral(const AtomicMeasure& mu, std::span<const double> x,
                         const OperatorOrderParams& params, double r_min, double a = 0.5);

struct UniformDini {
  double sup = 0.0;
  std::vector<double> center;
  double threshold = 0.0;
  bool pass = false;
  std::size_t samples = 0;
};

/// Largest Dini integral over the sample centres (all nonzero); passes
/// when it does not exceed `threshold`.
UniformDini bp2_uniform(const AtomicMeasure& mu, const OperatorOrderParams& params,
                        const PointSet& samples, double threshold, double a = 0.5);

struct PointwiseReport {
  double sup = 0.0;          ///< sup of mu(B[x, r+delta]) / (|x|^{-m} r^n)
  double constant = 0.0;     ///< C_2
  std::vector<double> center;
  double radius = 0.0;
  bool pass = false;
  /// C_2 a^m / m: the Dini bound implied at every passing centre.
  double implied_dini_bound = 0.0;
  std::string diagnostic;
};

/// Certifies mu(B[x, r]) <= C_2 |x|^{-m} r^n for candidates x (|x| > 2 r_min)
/// and r in [r_min, a|x|] using inflated balls B[x, r + delta].  When it
/// passes, every candidate's Dini integral is at most C_2 a^m / m.
PointwiseReport pointwise_regularity_check(const AtomicMeasure& mu,
                                           const OperatorOrderParams& params, double c2,
                                           const PointSet& candidates, double delta,
                                           double a = 0.5);

/// Fixed-direction vector measure mu_e(B) = mu(B) e; |mu_e| = |e| mu.
class CovectorMeasure {
 public:
  CovectorMeasure(AtomicMeasure base, std::vector<std::complex<double>> covector);

  const AtomicMeasure& base() const { return base_; }
  const std::vector<std::complex<double>>& covector() const { return covector_; }
  double covector_norm() const { return norm_; }

  /// |mu_e|(B[x, r]).
  double total_variation(const BallQuery& ball) const;

 private:
  AtomicMeasure base_;
  std::vector<std::complex<double>> covector_;
  double norm_;
};

CovectorMeasure vectorize(const AtomicMeasure& mu, std::vector<std::complex<double>> e);

OriginGrowth bp1_sup(const CovectorMeasure& mu, const OperatorOrderParams& params, double r_min,
                     double r_max);
DiniReport dini_integral(const CovectorMeasure& mu, std::span<const double> x,
                         const OperatorOrderParams& params, double r_min, double a = 0.5);

void write_origin_growth(std::ostream& out, const OriginGrowth& g);
void write_dini(std::ostream& out, const UniformDini& d);
void write_pointwise(std::ostream& out, const PointwiseReport& p);

}  // namespace frostdecay
