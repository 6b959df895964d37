#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>

#include "frostdecay/decay.hpp"
#include "frostdecay/frostman.hpp"
#include "frostdecay/generators.hpp"
#include "frostdecay/growth.hpp"
#include "frostdecay/io.hpp"
#include "frostdecay/parallel.hpp"
#include "frostdecay/symbol.hpp"
#include "frostdecay/witness.hpp"
#include "pipeline.hpp"

namespace frostdecay {

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

struct Globals {
  std::uint64_t seed = 0;
  unsigned threads = 0;
};

struct GenOptions {
  std::string set = "four-corner";
  double ratio = 0.35;
  int level = 6;
  std::optional<int> dyadic_level;
  int dim = 2;
  double keep = 0.6;
  std::int64_t half_width = 3;
  int n = 2;
  double m = 1.0;
  double radius = 1.0;
  double step = 1.0 / 64;
  std::string out;
};

struct FrostmanOptions {
  std::string in;
  double s = 1.0;
  bool normalize = false;
  std::optional<double> delta;
  std::string out;
};

struct ReweightOptions {
  std::string in;
  double alpha = 0.2;
  std::string out;
};

struct VerifyOptions {
  std::string in;
  int n = 2;
  int m = 1;
  std::optional<double> alpha;
  std::optional<double> s;
  std::optional<double> threshold;
  std::optional<double> c2;
  std::optional<double> r_max;
  std::string cubes;
  std::optional<double> delta;
  double a = 0.5;
  std::size_t samples = 100;
};

struct SymbolOptions {
  std::string op = "gradient";
  std::string file;
  int n = 2;
  int resolution = 17;
  std::size_t random = 1024;
  bool adjoint = false;
};

struct WitnessOptions {
  std::string in;
  std::optional<double> rho;
  double lower = -1.0;
  double upper = 1.0;
  std::size_t points = 41;
  std::string out;
  std::vector<double> bump_center;
  double bump_radius = 0.0;
  std::optional<double> bump_width;
  std::size_t cells = 256;
  double box = 1.0;
};

struct PipelineOptions {
  PipelineConfig config;
  std::vector<int> levels;
  std::optional<double> s;
  std::string table;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string env_name(const std::string& prefix, const std::string& name) {
  std::string out = "FROSTDECAY_" + prefix;
  for (char c : name) out.push_back(c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  return out;
}

// Every long option can also come from FROSTDECAY_[SUB_]NAME.
void attach_env(CLI::App& app, const std::string& prefix) {
  for (CLI::Option* opt : app.get_options()) {
    const auto& names = opt->get_lnames();
    if (names.empty() || names.front() == "help" || names.front() == "config") continue;
    opt->envname(env_name(prefix, names.front()));
  }
}

void write_point(std::ostream& out, std::span<const double> p) {
  for (std::size_t i = 0; i < p.size(); ++i) out << (i ? " " : "") << format_double(p[i]);
}

template <class Write>
void emit(const std::string& path, std::ostream& out, Write&& write) {
  if (path.empty() || path == "-") {
    write(out);
    return;
  }
  std::ofstream f(path);
  if (!f) throw UsageError("cannot open '" + path + "' for writing");
  write(f);
  if (!f) throw UsageError("failed writing '" + path + "'");
}

AtomicMeasure load_measure_arg(const std::string& path) {
  if (path.empty()) throw UsageError("an input measure (--in) is required");
  return load_measure(path);
}

double max_distance_from_origin(const AtomicMeasure& mu) {
  double r = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) r = std::max(r, norm(mu.position(i)));
  return r;
}

int run_gen(const GenOptions& o, const Globals& g, std::ostream& out) {
  if (o.set == "four-corner") {
    const CubeSet s = gen_four_corner_cantor(o.ratio, o.level, o.dyadic_level);
    emit(o.out, out, [&](std::ostream& os) { write_cubeset(os, s); });
  } else if (o.set == "random") {
    const CubeSet s = gen_random_cubeset(static_cast<std::size_t>(o.dim), o.level, o.keep,
                                         o.half_width, g.seed);
    emit(o.out, out, [&](std::ostream& os) { write_cubeset(os, s); });
  } else if (o.set == "power-density") {
    const AtomicMeasure mu = gen_power_density(static_cast<std::size_t>(o.n), o.m, o.radius, o.step);
    emit(o.out, out, [&](std::ostream& os) { write_measure(os, mu); });
  } else {
    throw UsageError("unknown set kind '" + o.set + "' (four-corner | random | power-density)");
  }
  return kExitPass;
}

int run_frostman(const FrostmanOptions& o, std::ostream& out) {
  if (o.in.empty()) throw UsageError("an input cube set (--in) is required");
  const CubeSet set = load_cubeset(o.in);
  AtomicMeasure nu = greedy_frostman(set, o.s);
  std::ostringstream rep;
  rep << "kind=frostman\ns=" << format_double(o.s) << "\nlevel=" << set.level()
      << "\nmembers=" << set.size() << "\ncontent=" << format_double(nu.total_mass()) << '\n';
  if (o.normalize) {
    const double delta = o.delta.value_or(std::ldexp(1.0, -set.level()));
    const NormalizedMeasure n = ball_growth_normalize(nu, o.s, member_centers_with_origin(set), delta);
    rep << "growth_constant=" << format_double(n.constant) << "\ngrowth_center=";
    write_point(rep, n.center);
    rep << "\ngrowth_radius=" << format_double(n.radius) << "\ndelta=" << format_double(delta) << '\n';
    nu = n.measure;
  }
  if (o.out.empty()) {
    write_measure(out, nu);
  } else {
    save_measure(o.out, nu);
    out << rep.str();
  }
  return kExitPass;
}

int run_reweight(const ReweightOptions& o, std::ostream& out) {
  const AtomicMeasure mu = reweight(load_measure_arg(o.in), o.alpha);
  emit(o.out, out, [&](std::ostream& os) { write_measure(os, mu); });
  if (!o.out.empty()) {
    out << "kind=reweight\nalpha=" << format_double(o.alpha) << "\ntotal_mass="
        << format_double(mu.total_mass()) << '\n';
    for (const auto& [k, m] : annulus_masses(mu)) out << "annulus_" << k << '=' << format_double(m) << '\n';
  }
  return kExitPass;
}

int run_verify(const VerifyOptions& o, const Globals& g, std::ostream& out) {
  const AtomicMeasure mu = load_measure_arg(o.in);
  const OperatorOrderParams op{o.n, o.m};
  op.validate();
  if (mu.dim() != static_cast<std::size_t>(o.n)) throw UsageError("measure dimension differs from --n");
  if (o.alpha.has_value() != o.s.has_value()) throw UsageError("--alpha and --s go together");

  PointSet candidates;
  double delta = o.delta.value_or(0.0);
  if (!o.cubes.empty()) {
    const CubeSet set = load_cubeset(o.cubes);
    candidates = member_centers_with_origin(set);
    if (!o.delta) delta = std::ldexp(1.0, -set.level());
  } else {
    candidates = mu.support();
    if (candidates.empty()) candidates = PointSet(mu.dim(), {});
  }

  bool pass = true;
  const double r_max = o.r_max.value_or(std::max(mu.r_min(), max_distance_from_origin(mu)));
  const OriginGrowth bp1 = bp1_sup(mu, op, mu.r_min(), r_max);
  out << "[bp1]\n";
  write_origin_growth(out, bp1);
  if (!bp1.finite) {
    out << "pass=false\n";
    pass = false;
  }

  std::optional<DecayCertificate> cond2;
  if (o.alpha) {
    const DecayParams dp{*o.alpha, *o.s, o.n};
    const DecayCertificate c1 = certify_cond1(mu, dp, o.r_max);
    cond2 = certify_cond2(mu, dp, candidates, delta, o.a);
    out << "\n[cond1]\n";
    write_certificate(out, c1);
    out << "\n[cond2]\n";
    write_certificate(out, *cond2);
    pass = pass && c1.pass && cond2->pass;
  }

  std::optional<double> threshold = o.threshold;
  if (!threshold && cond2 && std::abs(*o.s - (o.n - o.m + *o.alpha)) <= 1e-12) {
    threshold = cond2->sup * std::exp2(-*o.alpha) / *o.alpha + 1e-9;
  }
  if (threshold) {
    const PointSet samples = sample_nonzero(candidates, o.samples, g.seed);
    if (!samples.empty()) {
      const UniformDini d = bp2_uniform(mu, op, samples, *threshold, o.a);
      out << "\n[bp2]\n";
      write_dini(out, d);
      pass = pass && d.pass;
    }
  }
  if (o.c2) {
    const PointwiseReport p = pointwise_regularity_check(mu, op, *o.c2, candidates, delta, o.a);
    out << "\n[pointwise]\n";
    write_pointwise(out, p);
    pass = pass && p.pass;
  }
  out << "\n[result]\npass=" << (pass ? "true" : "false") << '\n';
  return pass ? kExitPass : kExitFail;
}

int run_symbol(const SymbolOptions& o, const Globals& g, std::ostream& out) {
  OperatorSymbol op = [&] {
    if (!o.file.empty()) {
      std::ifstream f(o.file);
      if (!f) throw UsageError("cannot open '" + o.file + "'");
      return read_symbol(f);
    }
    return OperatorSymbol::builtin(o.op, o.n);
  }();
  if (o.adjoint) op = op.adjoint();
  const PointSet samples = sphere_samples(op.n(), o.resolution, o.random, g.seed);
  const EllipticityResult e = ellipticity_margin(op, samples);
  out << "kind=symbol\nn=" << op.n() << "\nm=" << op.order() << "\ndimE=" << op.dim_e()
      << "\ndimF=" << op.dim_f() << "\nsamples=" << samples.size() << "\nseed=" << g.seed
      << "\nresolution=" << o.resolution << "\nrank_tolerance=" << format_double(kRankTolerance) << '\n';
  if (e.rejected_by_dimension) {
    out << "elliptic=false\nmargin=0\nnote=dimE > dimF: the symbol cannot be injective\n";
  } else {
    out << "margin=" << format_double(e.margin) << "\nwitness=";
    write_point(out, e.witness);
    out << "\nelliptic=" << (e.elliptic ? "true" : "false") << '\n';
  }
  if (samples.size() >= 2) {
    const CancelingResult c = canceling_defect(op, samples);
    out << "canceling_defect=" << c.defect << "\ncanceling=" << (c.defect == 0 ? "true" : "false")
        << "\nindeterminate=" << (c.indeterminate ? "true" : "false")
        << "\nsamples_used=" << c.samples_used << '\n';
  }
  out << "note=sampling falsifier: a positive margin or zero defect means no counterexample was sampled\n";
  return kExitPass;
}

int run_witness(const WitnessOptions& o, std::ostream& out) {
  const AtomicMeasure mu = load_measure_arg(o.in);
  const double rho = o.rho.value_or(mu.r_min());
  if (!o.bump_center.empty()) {
    if (o.bump_center.size() != mu.dim()) throw UsageError("--bump-center arity differs from the measure");
    const Bump phi(o.bump_center, o.bump_radius, o.bump_width.value_or(o.bump_radius / 3.0));
    QuadratureGrid grid;
    for (std::size_t k = 0; k < mu.dim(); ++k) {
      grid.lower.push_back(o.bump_center[k] - o.box);
      grid.upper.push_back(o.bump_center[k] + o.box);
    }
    grid.cells = o.cells;
    const WeakResidual w = weak_divergence_residual(mu, phi, grid, rho);
    out << "kind=weak_residual\nresidual=" << format_double(w.residual)
        << "\nfield_term=" << format_double(w.field_term) << "\natom_term=" << format_double(w.atom_term)
        << "\nscale=" << format_double(w.scale) << "\nrelative=" << format_double(w.residual / w.scale)
        << "\nexcluded_bound=" << format_double(w.excluded_bound) << "\nskipped_cells=" << w.skipped_cells
        << "\nstep=" << format_double(w.step) << '\n';
    return kExitPass;
  }
  const PointSet pts = witness_lattice(mu.dim(), o.lower, o.upper, o.points);
  const WitnessField f = solve_divergence(mu, pts, rho);
  if (!o.out.empty()) {
    emit(o.out, out, [&](std::ostream& os) { write_field_samples(os, f.samples); });
  }
  out << "kind=witness\nrho=" << format_double(f.rho) << "\npoints=" << pts.size()
      << "\nevaluated=" << f.samples.size()
      << "\nskipped=" << f.skipped << "\nsup=" << format_double(f.sup_norm) << '\n';
  if (!f.diagnostic.empty()) out << "note=" << f.diagnostic << '\n';
  return kExitPass;
}

int run_pipeline_cmd(PipelineOptions& o, const Globals& g, std::ostream& out) {
  if (!o.levels.empty()) o.config.levels = o.levels;
  o.config.s = o.s;
  o.config.seed = g.seed;
  const PipelineResult r = run_pipeline(o.config, out);
  if (!o.table.empty() && r.study) {
    emit(o.table, out, [&](std::ostream& os) { write_study_table(os, *r.study); });
  }
  return r.pass() ? kExitPass : kExitFail;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Frostman measures with power decay: construction, certificates and witnesses",
               "frostdecay"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value file; flags given on the command line take precedence");
  Globals g;
  app.add_option("--seed", g.seed, "seed for every random choice")->capture_default_str();
  app.add_option("--threads", g.threads, "worker thread cap (0 = hardware)")->capture_default_str();
  attach_env(app, "");

  GenOptions gen;
  auto* gen_cmd = app.add_subcommand("gen", "generate a cube set or a discretized density");
  gen_cmd->add_option("--set", gen.set, "four-corner | random | power-density")->capture_default_str();
  gen_cmd->add_option("--ratio", gen.ratio, "four-corner contraction ratio in (0, 1/2)")->capture_default_str();
  gen_cmd->add_option("--level", gen.level, "four-corner generation or random-set level")->capture_default_str();
  gen_cmd->add_option("--dyadic-level", gen.dyadic_level, "snapping level (default: coarsest fine enough)");
  gen_cmd->add_option("--dim", gen.dim, "random-set dimension")->capture_default_str();
  gen_cmd->add_option("--keep", gen.keep, "random-set keep probability")->capture_default_str();
  gen_cmd->add_option("--half-width", gen.half_width, "random-set level-0 half width")->capture_default_str();
  gen_cmd->add_option("--n", gen.n, "power-density dimension")->capture_default_str();
  gen_cmd->add_option("--m", gen.m, "power-density exponent")->capture_default_str();
  gen_cmd->add_option("--radius", gen.radius, "power-density outer radius")->capture_default_str();
  gen_cmd->add_option("--step", gen.step, "power-density grid step")->capture_default_str();
  gen_cmd->add_option("--out", gen.out, "output file (default stdout)");
  attach_env(*gen_cmd, "GEN_");

  FrostmanOptions fm;
  auto* fm_cmd = app.add_subcommand("frostman", "Frostman measure on a cube set");
  fm_cmd->add_option("--in", fm.in, "cube set file")->required();
  fm_cmd->add_option("--s", fm.s, "growth exponent in (0, n)")->required();
  fm_cmd->add_flag("--normalize", fm.normalize, "rescale so balls obey r^s at every centre");
  fm_cmd->add_option("--delta", fm.delta, "net spacing (default 2^-level)");
  fm_cmd->add_option("--out", fm.out, "output measure file (default stdout)");
  attach_env(*fm_cmd, "FROSTMAN_");

  ReweightOptions rw;
  auto* rw_cmd = app.add_subcommand("reweight", "annular reweighting by 2^{-k alpha}");
  rw_cmd->add_option("--in", rw.in, "measure file")->required();
  rw_cmd->add_option("--alpha", rw.alpha, "decay exponent")->required();
  rw_cmd->add_option("--out", rw.out, "output measure file (default stdout)");
  attach_env(*rw_cmd, "REWEIGHT_");

  VerifyOptions vf;
  auto* vf_cmd = app.add_subcommand("verify", "growth and decay certificates of a measure");
  vf_cmd->add_option("--in", vf.in, "measure file")->required();
  vf_cmd->add_option("--n", vf.n, "ambient dimension")->capture_default_str();
  vf_cmd->add_option("--m", vf.m, "operator order")->capture_default_str();
  vf_cmd->add_option("--alpha", vf.alpha, "decay exponent (enables cond1/cond2)");
  vf_cmd->add_option("--s", vf.s, "growth exponent (with --alpha)");
  vf_cmd->add_option("--threshold", vf.threshold, "uniform Dini threshold");
  vf_cmd->add_option("--c2", vf.c2, "pointwise constant C_2");
  vf_cmd->add_option("--r-max", vf.r_max, "largest radius for origin-centred checks");
  vf_cmd->add_option("--cubes", vf.cubes, "cube set whose centres form the candidate net");
  vf_cmd->add_option("--delta", vf.delta, "net spacing");
  vf_cmd->add_option("--a", vf.a, "radius fraction a in (0, 1)")->capture_default_str();
  vf_cmd->add_option("--samples", vf.samples, "Dini sample count")->capture_default_str();
  attach_env(*vf_cmd, "VERIFY_");

  SymbolOptions sy;
  auto* sy_cmd = app.add_subcommand("symbol", "ellipticity and canceling diagnostics");
  sy_cmd->add_option("--op", sy.op, "gradient | laplacian | partialK")->capture_default_str();
  sy_cmd->add_option("--file", sy.file, "operator description file");
  sy_cmd->add_option("--n", sy.n, "dimension for built-ins")->capture_default_str();
  sy_cmd->add_option("--resolution", sy.resolution, "sphere grid points per face edge")->capture_default_str();
  sy_cmd->add_option("--random", sy.random, "seeded random sphere samples")->capture_default_str();
  sy_cmd->add_flag("--adjoint", sy.adjoint, "analyse the formal adjoint instead");
  attach_env(*sy_cmd, "SYMBOL_");

  WitnessOptions wt;
  auto* wt_cmd = app.add_subcommand("witness", "field with div f = mu and its weak residual");
  wt_cmd->add_option("--in", wt.in, "measure file")->required();
  wt_cmd->add_option("--rho", wt.rho, "exclusion radius (default r_min)");
  wt_cmd->add_option("--lower", wt.lower, "evaluation lattice lower corner")->capture_default_str();
  wt_cmd->add_option("--upper", wt.upper, "evaluation lattice upper corner")->capture_default_str();
  wt_cmd->add_option("--points", wt.points, "lattice points per axis")->capture_default_str()->check(CLI::Range(2, 100000));
  wt_cmd->add_option("--out", wt.out, "field sample file");
  wt_cmd->add_option("--bump-center", wt.bump_center, "centre of the test bump (enables the weak check)")->delimiter(',');
  wt_cmd->add_option("--bump-radius", wt.bump_radius, "support radius of the bump");
  wt_cmd->add_option("--bump-width", wt.bump_width, "Gaussian width (default radius/3)");
  wt_cmd->add_option("--cells", wt.cells, "quadrature cells per axis")->capture_default_str();
  wt_cmd->add_option("--box", wt.box, "quadrature box half width around the bump centre")->capture_default_str();
  attach_env(*wt_cmd, "WITNESS_");

  PipelineOptions pl;
  auto* pl_cmd = app.add_subcommand("pipeline", "generate, build, reweight, certify and witness");
  pl_cmd->add_option("--set", pl.config.set, "four-corner | random")->capture_default_str();
  pl_cmd->add_option("--ratio", pl.config.ratio, "four-corner ratio")->capture_default_str();
  pl_cmd->add_option("--level", pl.levels, "generation(s); repeat or comma-separate")->delimiter(',');
  pl_cmd->add_option("--keep", pl.config.keep, "random-set keep probability")->capture_default_str();
  pl_cmd->add_option("--half-width", pl.config.half_width, "random-set half width")->capture_default_str();
  pl_cmd->add_option("--alpha", pl.config.alpha, "decay exponent")->capture_default_str();
  pl_cmd->add_option("--s", pl.s, "growth exponent; must equal n - m + alpha");
  pl_cmd->add_option("--n", pl.config.n, "ambient dimension")->capture_default_str();
  pl_cmd->add_option("--m", pl.config.m, "operator order")->capture_default_str();
  pl_cmd->add_option("--samples", pl.config.dini_samples, "Dini sample count")->capture_default_str();
  pl_cmd->add_option("--a", pl.config.a, "radius fraction a")->capture_default_str();
  pl_cmd->add_flag("!--no-witness", pl.config.witness, "skip the witness stage");
  pl_cmd->add_option("--rho", pl.config.witness_rho, "witness exclusion radius (default: largest r_min)");
  pl_cmd->add_option("--eval-points", pl.config.eval_points, "witness lattice points per axis")->capture_default_str();
  pl_cmd->add_option("--table", pl.table, "write the study table here");
  attach_env(*pl_cmd, "PIPELINE_");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitPass : kExitUsage;
  }

  try {
    set_worker_threads(g.threads);
    if (*gen_cmd) return run_gen(gen, g, out);
    if (*fm_cmd) return run_frostman(fm, out);
    if (*rw_cmd) return run_reweight(rw, out);
    if (*vf_cmd) return run_verify(vf, g, out);
    if (*sy_cmd) return run_symbol(sy, g, out);
    if (*wt_cmd) return run_witness(wt, out);
    if (*pl_cmd) return run_pipeline_cmd(pl, g, out);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::length_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::runtime_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace frostdecay
