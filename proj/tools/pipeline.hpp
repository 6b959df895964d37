#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "frostdecay/decay.hpp"
#include "frostdecay/dyadic.hpp"
#include "frostdecay/growth.hpp"
#include "frostdecay/witness.hpp"

namespace frostdecay {

struct PipelineConfig {
  std::string set = "four-corner";  ///< four-corner | random
  double ratio = 0.35;
  std::vector<int> levels{6};       ///< generations (four-corner) or dyadic levels (random)
  double keep = 0.6;
  std::int64_t half_width = 3;
  std::optional<double> s;          ///< must equal n - m + alpha when given
  double alpha = 0.2;
  int n = 2;
  int m = 1;
  std::uint64_t seed = 0;
  std::size_t dini_samples = 100;
  double a = 0.5;
  bool witness = true;
  double eval_lower = -0.1;
  double eval_upper = 1.1;
  std::size_t eval_points = 121;    ///< per axis
  /// Exclusion radius shared by every level (default: largest r_min).
  std::optional<double> witness_rho;

  /// Throws std::invalid_argument on inconsistent settings.
  void validate() const;
  double exponent() const { return s.value_or(n - m + alpha); }
};

struct PipelineLevel {
  int level = 0;
  int dyadic_level = 0;
  std::size_t members = 0;
  double frostman_mass = 0.0;
  double growth_constant = 0.0;
  double total_mass = 0.0;
  DecayCertificate cond1;
  DecayCertificate cond2;
  OriginGrowth bp1;
  double bp1_constant = 0.0;
  bool bp1_pass = false;
  UniformDini bp2;
  std::optional<double> witness_sup;
  std::size_t witness_points = 0;

  bool certified() const { return cond1.pass && cond2.pass && bp1_pass && bp2.pass; }
};

struct PipelineResult {
  std::vector<PipelineLevel> levels;
  std::optional<double> box_dimension;
  std::optional<RefinementStudy> study;

  bool certified() const;
  /// Certified and, when a study ran, bounded.
  bool pass() const;
};

/// Generate -> Frostman -> reweight -> certify -> witness, once per level,
/// writing a key=value report.  Deterministic for a fixed config.
PipelineResult run_pipeline(const PipelineConfig& config, std::ostream& report);

/// Evaluation lattice of the witness stage.
PointSet witness_lattice(std::size_t dim, double lower, double upper, std::size_t per_axis);

/// `count` distinct nonzero candidates chosen with the seed (all of them
/// when fewer are available), in candidate order.
PointSet sample_nonzero(const PointSet& candidates, std::size_t count, std::uint64_t seed);

}  // namespace frostdecay
