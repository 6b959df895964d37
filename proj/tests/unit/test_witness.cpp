#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "frostdecay/rng.hpp"
#include "frostdecay/witness.hpp"

using namespace frostdecay;

namespace {

constexpr double kPi = std::numbers::pi;

AtomicMeasure random_measure(Rng& rng, std::size_t atoms, double spread) {
  std::vector<double> pos, mass;
  for (std::size_t i = 0; i < atoms; ++i) {
    pos.push_back(rng.uniform(-spread, spread));
    pos.push_back(rng.uniform(-spread, spread));
    mass.push_back(rng.uniform(0.01, 1.0));
  }
  return {2, pos, mass, 0.01};
}

PointSet random_points(Rng& rng, std::size_t count, double spread) {
  PointSet p(2, {});
  for (std::size_t i = 0; i < count; ++i) {
    p.push_back(std::vector<double>{rng.uniform(-spread, spread), rng.uniform(-spread, spread)});
  }
  return p;
}

QuadratureGrid square_grid(double half, std::size_t cells) {
  return {{-half, -half}, {half, half}, cells};
}

}  // namespace

TEST_CASE("sphere areas") {
  CHECK(unit_sphere_area(2) == doctest::Approx(2.0 * kPi).epsilon(1e-15));
  CHECK(unit_sphere_area(3) == doctest::Approx(4.0 * kPi).epsilon(1e-15));
  CHECK(unit_sphere_area(4) == doctest::Approx(2.0 * kPi * kPi).epsilon(1e-15));
}

TEST_CASE("kernel values") {
  const auto k2 = kernel_eval(2, std::vector<double>{1.0, 0.0});
  CHECK(k2[0] == doctest::Approx(1.0 / (2.0 * kPi)).epsilon(1e-15));
  CHECK(k2[0] == doctest::Approx(0.159155).epsilon(1e-6));
  CHECK(k2[1] == 0.0);
  const auto k3 = kernel_eval(3, std::vector<double>{0.6, 0.0, 0.8});
  CHECK(norm(k3) == doctest::Approx(1.0 / (4.0 * kPi)).epsilon(1e-15));
  Rng rng(2);
  for (int n = 2; n <= 4; ++n) {
    std::vector<double> x(n), x2(n);
    for (int i = 0; i < n; ++i) {
      x[i] = rng.normal();
      x2[i] = 2.0 * x[i];
    }
    const auto a = kernel_eval(n, x);
    const auto b = kernel_eval(n, x2);
    for (int i = 0; i < n; ++i) CHECK(b[i] == doctest::Approx(std::pow(2.0, 1 - n) * a[i]).epsilon(1e-14));
  }
  CHECK_THROWS(kernel_eval(2, std::vector<double>{0.0, 0.0}));
}

TEST_CASE("field of a unit atom") {
  const AtomicMeasure mu(2, {0.0, 0.0}, {1.0}, 0.01);
  const auto f = solve_divergence(mu, PointSet(2, {1.0, 0.0, 0.0, 0.0}), 0.01);
  REQUIRE(f.samples.size() == 1);
  CHECK(f.skipped == 1);
  CHECK(f.samples.values[0] == doctest::Approx(1.0 / (2.0 * kPi)).epsilon(1e-15));
  CHECK(f.sup_norm == doctest::Approx(1.0 / (2.0 * kPi)).epsilon(1e-15));
  const auto none = solve_divergence(mu, PointSet(2, {0.0, 0.005}), 0.01);
  CHECK(none.samples.size() == 0);
  CHECK_FALSE(none.diagnostic.empty());
}

TEST_CASE("field is linear and translation equivariant") {
  Rng rng(10);
  for (int t = 0; t < 10; ++t) {
    const auto a = random_measure(rng, 30, 1.0);
    const auto b = random_measure(rng, 30, 1.0);
    const auto pts = random_points(rng, 50, 3.0);
    const auto fa = solve_divergence(a, pts, 0.0);
    const auto fb = solve_divergence(b, pts, 0.0);
    const auto fab = solve_divergence(a.merged(b), pts, 0.0);
    REQUIRE(fab.samples.size() == 50);
    for (std::size_t i = 0; i < fab.samples.values.size(); ++i) {
      CHECK(fab.samples.values[i] ==
            doctest::Approx(fa.samples.values[i] + fb.samples.values[i]).epsilon(1e-12).scale(1.0));
    }
    CHECK(fab.sup_norm <= fa.sup_norm + fb.sup_norm + 1e-12);
    CHECK(solve_divergence(a.scaled(3.0), pts, 0.0).sup_norm ==
          doctest::Approx(3.0 * fa.sup_norm).epsilon(1e-14));

    const std::vector<double> shift{rng.uniform(-5, 5), rng.uniform(-5, 5)};
    PointSet moved(2, {});
    for (std::size_t i = 0; i < pts.size(); ++i) {
      moved.push_back(std::vector<double>{pts.point(i)[0] + shift[0], pts.point(i)[1] + shift[1]});
    }
    const auto fm = solve_divergence(a.translated(shift), moved, 0.0);
    for (std::size_t i = 0; i < fm.samples.values.size(); ++i) {
      CHECK(fm.samples.values[i] == doctest::Approx(fa.samples.values[i]).epsilon(1e-9).scale(1.0));
    }
  }
}

TEST_CASE("far field decays") {
  Rng rng(14);
  for (int t = 0; t < 10; ++t) {
    const auto mu = random_measure(rng, 40, 0.7);
    const double R = 1.0;
    PointSet far(2, {});
    std::vector<double> radius;
    for (int i = 0; i < 50; ++i) {
      const double r = rng.uniform(2.0 * R, 10.0);
      const double th = rng.uniform(0.0, 2.0 * kPi);
      far.push_back(std::vector<double>{r * std::cos(th), r * std::sin(th)});
      radius.push_back(r);
    }
    const auto f = solve_divergence(mu, far, 0.0);
    for (std::size_t i = 0; i < radius.size(); ++i) {
      const double v = std::hypot(f.samples.values[2 * i], f.samples.values[2 * i + 1]);
      CHECK(v <= mu.total_mass() / (2.0 * kPi * (radius[i] - R)));
    }
  }
}

TEST_CASE("bump profile") {
  const Bump phi({0.0, 0.0}, 0.8, 0.8 / 3);
  CHECK(phi.value(std::vector<double>{0.0, 0.0}) == 1.0);
  CHECK(phi.value(std::vector<double>{0.8, 0.0}) == 0.0);
  // Gradient against central differences.
  Rng rng(1);
  for (int t = 0; t < 50; ++t) {
    const std::vector<double> x{rng.uniform(-0.7, 0.7), rng.uniform(-0.5, 0.5)};
    const auto g = phi.gradient(x);
    for (int k = 0; k < 2; ++k) {
      const double h = 1e-6;
      auto xp = x, xm = x;
      xp[k] += h;
      xm[k] -= h;
      CHECK(g[k] == doctest::Approx((phi.value(xp) - phi.value(xm)) / (2 * h)).epsilon(1e-6).scale(1.0));
    }
    CHECK(norm(g) <= phi.gradient_sup() * (1.0 + 1e-9));
  }
}

TEST_CASE("weak residual of the zero measure vanishes") {
  const AtomicMeasure zero(2, {}, {}, 0.01);
  const Bump phi({0.0, 0.0}, 0.8, 0.8 / 3);
  const auto w = weak_divergence_residual(zero, phi, square_grid(1.0, 64), 0.0);
  CHECK(w.residual == 0.0);
}

TEST_CASE("weak residual of a unit atom under a centred bump") {
  const AtomicMeasure mu(2, {0.0, 0.0}, {1.0}, 0.01);
  const Bump phi({0.0, 0.0}, 0.8, 0.8 / 3);
  const auto w = weak_divergence_residual(mu, phi, square_grid(1.0, 256), 0.0);
  CHECK(w.atom_term == 1.0);
  CHECK(w.skipped_cells == 0);
  CHECK(w.residual <= 1e-3 * w.scale);
}

TEST_CASE("weak residual shrinks under refinement") {
  const AtomicMeasure mu(2, {0.0, 0.0}, {1.0}, 0.01);
  const Bump phi({0.1, 0.05}, 0.8, 0.8 / 3);
  double prev = 0.0, prev_h = 0.0;
  for (std::size_t cells : {128, 256, 512}) {
    const auto w = weak_divergence_residual(mu, phi, square_grid(1.0, cells), 0.0);
    if (prev > 0.0) {
      CHECK(std::log(prev / w.residual) / std::log(prev_h / w.step) >= 0.9);
    }
    prev = w.residual;
    prev_h = w.step;
  }
  CHECK(prev <= 1e-3 * mu.total_mass() * phi.gradient_sup());
}

TEST_CASE("exclusion is reported and bounded") {
  const AtomicMeasure mu(2, {0.0, 0.0}, {1.0}, 0.01);
  const Bump phi({0.1, 0.05}, 0.8, 0.8 / 3);
  const auto base = weak_divergence_residual(mu, phi, square_grid(1.0, 256), 0.0);
  const auto cut = weak_divergence_residual(mu, phi, square_grid(1.0, 256), 0.05);
  CHECK(cut.skipped_cells > 0);
  CHECK(cut.excluded_bound == doctest::Approx(0.05 * cut.scale).epsilon(1e-15));
  CHECK(std::abs(cut.field_term - base.field_term) <= cut.excluded_bound);
}

TEST_CASE("weak residual preconditions") {
  const AtomicMeasure mu(2, {0.0, 0.0}, {1.0}, 0.01);
  CHECK_THROWS(weak_divergence_residual(mu, Bump({0.5, 0.0}, 0.8, 0.2), square_grid(1.0, 256), 0.0));
  CHECK_THROWS(weak_divergence_residual(mu, Bump({0.0, 0.0}, 0.8, 0.2), square_grid(1.0, 32), 0.0));
  CHECK_THROWS(Bump({0.0, 0.0}, 0.0, 0.2));
}

TEST_CASE("refinement study verdicts") {
  // Point mass: the nearest evaluated point approaches the atom with rho.
  std::vector<StudyLevel> levels;
  for (int k = 1; k <= 4; ++k) {
    const double rho = std::pow(10.0, -k);
    PointSet pts(2, {});
    for (int i = 0; i < 8; ++i) {
      const double th = 2.0 * kPi * i / 8;
      pts.push_back(std::vector<double>{rho * std::cos(th), rho * std::sin(th)});
      pts.push_back(std::vector<double>{0.5 * std::cos(th), 0.5 * std::sin(th)});
    }
    levels.push_back({k, AtomicMeasure(2, {0.0, 0.0}, {1.0}, rho), pts, rho});
  }
  const auto point = supnorm_refinement_study(levels);
  CHECK(point.verdict == Trend::diverging);
  for (std::size_t i = 1; i < point.rows.size(); ++i) {
    CHECK(point.rows[i].ratio == doctest::Approx(10.0).epsilon(1e-9));
  }
  CHECK(point.rows[0].sup == doctest::Approx(1.0 / (2.0 * kPi * 0.1)).epsilon(1e-12));

  // Smooth measure on fixed points: identical sups.
  Rng rng(3);
  const auto mu = random_measure(rng, 20, 0.5);
  const auto pts = random_points(rng, 30, 3.0);
  std::vector<StudyLevel> flat;
  for (int k = 0; k < 3; ++k) flat.push_back({k, mu, pts, 0.01});
  const auto bounded = supnorm_refinement_study(flat);
  CHECK(bounded.verdict == Trend::bounded);
  CHECK(bounded.spread == 0.0);

  // Rescaling rescales every sup.
  std::vector<StudyLevel> scaled = levels;
  for (auto& lv : scaled) lv.measure = lv.measure.scaled(2.5);
  const auto s = supnorm_refinement_study(scaled);
  for (std::size_t i = 0; i < s.rows.size(); ++i) {
    CHECK(s.rows[i].sup == doctest::Approx(2.5 * point.rows[i].sup).epsilon(1e-14));
  }

  CHECK_THROWS(supnorm_refinement_study(std::span<const StudyLevel>(flat.data(), 2)));

  std::ostringstream out;
  write_study_table(out, bounded);
  CHECK(out.str().rfind("level,grid,rho,sup,ratio\n0,30,", 0) == 0);
}
