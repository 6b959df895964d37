#include "pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "frostdecay/frostman.hpp"
#include "frostdecay/generators.hpp"
#include "frostdecay/io.hpp"
#include "frostdecay/rng.hpp"

namespace frostdecay {

namespace {

void write_point(std::ostream& out, std::span<const double> p) {
  for (std::size_t i = 0; i < p.size(); ++i) out << (i ? " " : "") << format_double(p[i]);
}

CubeSet make_set(const PipelineConfig& c, int level) {
  if (c.set == "four-corner") return gen_four_corner_cantor(c.ratio, level);
  return gen_random_cubeset(static_cast<std::size_t>(c.n), level, c.keep, c.half_width, c.seed);
}

double max_distance_from_origin(const AtomicMeasure& mu) {
  double r = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) r = std::max(r, norm(mu.position(i)));
  return r;
}

}  // namespace

void PipelineConfig::validate() const {
  if (set != "four-corner" && set != "random") {
    throw std::invalid_argument("unknown set kind '" + set + "' (four-corner | random)");
  }
  OperatorOrderParams{n, m}.validate();
  if (set == "four-corner" && n != 2) throw std::invalid_argument("the four-corner set lives in n = 2");
  if (s && std::abs(*s - (n - m + alpha)) > 1e-12 * std::max(1.0, std::abs(*s))) {
    throw std::invalid_argument("pipeline requires s = n - m + alpha = " +
                                format_double(n - m + alpha) + ", got s = " + format_double(*s));
  }
  DecayParams{alpha, exponent(), n}.validate();
  if (levels.empty()) throw std::invalid_argument("pipeline needs at least one level");
  if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("radius fraction a must lie in (0, 1)");
  if (dini_samples == 0) throw std::invalid_argument("need at least one Dini sample");
  if (witness && (eval_points < 2 || !(eval_upper > eval_lower))) {
    throw std::invalid_argument("witness lattice needs >= 2 points per axis on a nonempty box");
  }
  if (witness_rho && !(*witness_rho >= 0.0)) throw std::invalid_argument("witness rho must be non-negative");
}

bool PipelineResult::certified() const {
  return std::all_of(levels.begin(), levels.end(), [](const PipelineLevel& l) { return l.certified(); });
}

bool PipelineResult::pass() const {
  return certified() && (!study || study->verdict == Trend::bounded);
}

PointSet witness_lattice(std::size_t dim, double lower, double upper, std::size_t per_axis) {
  PointSet pts(dim, {});
  std::vector<std::size_t> idx(dim, 0);
  std::vector<double> p(dim);
  const double step = (upper - lower) / static_cast<double>(per_axis - 1);
  while (true) {
    for (std::size_t k = 0; k < dim; ++k) p[k] = lower + step * static_cast<double>(idx[k]);
    pts.push_back(p);
    std::size_t d = dim;
    while (d > 0 && idx[d - 1] == per_axis - 1) idx[--d] = 0;
    if (d == 0) break;
    ++idx[d - 1];
  }
  return pts;
}

PointSet sample_nonzero(const PointSet& candidates, std::size_t count, std::uint64_t seed) {
  std::vector<std::size_t> pool;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (norm(candidates.point(i)) > 0.0) pool.push_back(i);
  }
  Rng rng(seed);
  const std::size_t take = std::min(count, pool.size());
  for (std::size_t i = 0; i < take; ++i) {
    std::swap(pool[i], pool[i + rng.below(pool.size() - i)]);
  }
  pool.resize(take);
  std::sort(pool.begin(), pool.end());
  PointSet out(candidates.dim(), {});
  for (auto i : pool) out.push_back(candidates.point(i));
  return out;
}

PipelineResult run_pipeline(const PipelineConfig& config, std::ostream& report) {
  config.validate();
  const double s = config.exponent();
  const DecayParams dp{config.alpha, s, config.n};
  const OperatorOrderParams op{config.n, config.m};
  PipelineResult result;

  report << "[config]\n";
  report << "set=" << config.set << '\n';
  if (config.set == "four-corner") report << "ratio=" << format_double(config.ratio) << '\n';
  report << "n=" << config.n << "\nm=" << config.m << '\n';
  report << "alpha=" << format_double(config.alpha) << "\ns=" << format_double(s) << '\n';
  report << "seed=" << config.seed << '\n';
  report << "note=constants are explicit closed forms; verdict thresholds are fixed conventions\n";

  if (config.set == "four-corner") {
    const int top = *std::max_element(config.levels.begin(), config.levels.end());
    if (top >= 3) {
      std::vector<CubeSet> sets;
      for (int g = std::max(1, top - 3); g <= top; ++g) sets.push_back(make_set(config, g));
      result.box_dimension = box_dimension_estimate(sets);
    }
  }

  std::vector<StudyRow> study;
  const PointSet lattice =
      config.witness ? witness_lattice(static_cast<std::size_t>(config.n), config.eval_lower,
                                       config.eval_upper, config.eval_points)
                     : PointSet{};

  std::vector<CubeSet> sets;
  for (int level : config.levels) sets.push_back(make_set(config, level));
  double rho = 0.0;
  for (const auto& set : sets) rho = std::max(rho, std::ldexp(1.0, -set.level()));
  if (config.witness_rho) rho = *config.witness_rho;

  for (std::size_t li = 0; li < sets.size(); ++li) {
    const int level = config.levels[li];
    const CubeSet& set = sets[li];
    PipelineLevel out;
    out.level = level;

    out.dyadic_level = set.level();
    out.members = set.size();
    report << "\n[stage 1: generate]\nlevel=" << level << "\ndyadic_level=" << set.level()
           << "\nmembers=" << set.size() << '\n';
    if (result.box_dimension && level == config.levels.back()) {
      report << "box_dimension=" << format_double(*result.box_dimension) << '\n';
    }

    const AtomicMeasure nu0 = greedy_frostman(set, s);
    const PointSet candidates = member_centers_with_origin(set);
    const double delta = std::ldexp(1.0, -set.level());
    const NormalizedMeasure nu = ball_growth_normalize(nu0, s, candidates, delta);
    out.frostman_mass = nu0.total_mass();
    out.growth_constant = nu.constant;
    report << "\n[stage 2: frostman]\ncontent=" << format_double(out.frostman_mass)
           << "\ngrowth_constant=" << format_double(nu.constant) << "\ngrowth_center=";
    write_point(report, nu.center);
    report << "\ngrowth_radius=" << format_double(nu.radius) << "\ndelta=" << format_double(delta)
           << '\n';

    const AtomicMeasure mu = reweight(nu.measure, config.alpha);
    out.total_mass = mu.total_mass();
    report << "\n[stage 3: reweight]\natoms=" << mu.size()
           << "\ntotal_mass=" << format_double(out.total_mass) << '\n';

    out.cond1 = certify_cond1(mu, dp);
    out.cond2 = certify_cond2(mu, dp, candidates, delta, config.a);
    out.bp1 = bp1_sup(mu, op, mu.r_min(), std::max(mu.r_min(), max_distance_from_origin(mu)));
    out.bp1_constant = out.cond1.constant;
    out.bp1_pass = out.bp1.finite && out.bp1.sup <= out.bp1_constant * (1.0 + kCertificateSlack);
    const double dini_bound =
        out.cond2.sup * std::exp2(-config.alpha) / config.alpha + 1e-9;
    const PointSet samples = sample_nonzero(candidates, config.dini_samples, config.seed);
    out.bp2 = bp2_uniform(mu, op, samples, dini_bound, config.a);
    report << "\n[stage 4: certify]\n";
    write_certificate(report, out.cond1);
    write_certificate(report, out.cond2);
    write_origin_growth(report, out.bp1);
    report << "constant=" << format_double(out.bp1_constant)
           << "\npass=" << (out.bp1_pass ? "true" : "false") << '\n';
    write_dini(report, out.bp2);

    report << "\n[stage 5: witness]\n";
    if (config.witness) {
      const AtomicMeasure unit = mu.scaled(1.0 / mu.total_mass());
      const WitnessField f = solve_divergence(unit, lattice, rho);
      out.witness_sup = f.sup_norm;
      out.witness_points = f.samples.size();
      report << "mass_normalization=1\nrho=" << format_double(rho)
             << "\npoints=" << f.samples.size() << "\nskipped=" << f.skipped
             << "\nsup=" << format_double(f.sup_norm) << '\n';
      study.push_back({level, f.samples.size(), rho, f.sup_norm, 0.0});
    } else {
      report << "skipped=true\n";
    }
    report << "certified=" << (out.certified() ? "true" : "false") << '\n';
    result.levels.push_back(std::move(out));
  }

  if (study.size() >= 3) {
    result.study = summarize_refinement(std::move(study));
    report << "\n[study]\nspread=" << format_double(result.study->spread)
           << "\nverdict=" << to_string(result.study->verdict)
           << "\nbounded_below=" << format_double(kBoundedSpread)
           << "\ndiverging_factor=" << format_double(kDivergingFactor) << '\n';
    write_study_table(report, *result.study);
  }
  report << "\n[result]\ncertified=" << (result.certified() ? "true" : "false")
         << "\npass=" << (result.pass() ? "true" : "false") << '\n';
  return result;
}

}  // namespace frostdecay
