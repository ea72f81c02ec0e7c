#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "sdelab/scenarios.hpp"
#include "sdelab/stats.hpp"

using namespace sdelab;

namespace {

Vec point2(double x, double y) {
  Vec v(2);
  v << x, y;
  return v;
}

Vec point3(double x, double y, double z) {
  Vec v(3);
  v << x, y, z;
  return v;
}

}  // namespace

TEST_CASE("power drift builder wires the radial law and its metadata") {
  const Scenario s = build_power_drift(2, 0.5);
  CHECK(s.name == "power_drift:n=2,alpha=0.5");
  CHECK(s.system.dim_state == 2);
  CHECK(s.system.dim_noise == 2);
  CHECK((s.x0 - point2(5.0, 0.0)).norm() == 0.0);

  const Vec a = s.system.drift(point2(3.0, 4.0));
  CHECK(a[0] == doctest::Approx(3.0 / std::sqrt(5.0)).epsilon(1e-15));
  CHECK(a[1] == doctest::Approx(4.0 / std::sqrt(5.0)).epsilon(1e-15));
  CHECK((s.system.diffusion(point2(1.0, 0.0)) - Mat::Identity(2, 2)).norm() == 0.0);

  REQUIRE(s.polar_truth.has_value());
  CHECK(s.polar_truth->alpha == 0.5);
  CHECK(s.polar_truth->big_m(point2(1.0, 0.0)) == 1.0);

  REQUIRE(s.angle_spec.has_value());
  CHECK(s.angle_spec->gamma == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(s.angle_spec->delta1 == 2.0);
  CHECK(s.angle_spec->delta2 == 1.0);
  CHECK(s.angle_spec->nu_star == 0.5);
  CHECK(s.angle_spec->chi_star == 1.0);

  REQUIRE(s.certificates.size() == 1);
  CHECK(s.certificates[0].candidate.label == "inverse_r");
  CHECK(s.certificates[0].r_lo == 10.0);
  CHECK(std::isinf(s.certificates[0].r_hi));
  CHECK(s.certificates[0].expected_certified);

  REQUIRE(s.radial_mu);
  REQUIRE(s.radial_sigma);
  CHECK(s.radial_mu(2.0) == doctest::Approx(std::sqrt(2.0) + 0.25).epsilon(1e-15));
  CHECK(s.radial_sigma(3.0) == 1.0);
  REQUIRE(s.scale_expectation.has_value());
  CHECK(s.scale_expectation->left_divergent);
  CHECK(s.scale_expectation->right_finite);

  CHECK_THROWS_AS(build_power_drift(1, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(build_power_drift(2, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(build_power_drift(2, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(build_power_drift(2, 0.5, 0.0), std::invalid_argument);
}

TEST_CASE("perturbed drift adds a purely tangential component") {
  const Scenario s = build_perturbed_drift(2, 0.0, 0.5, 0.1);
  // At (2,0): radial part (1,0), tangential 0.1 * 2^{-1/2} * (0,1).
  const Vec a = s.system.drift(point2(2.0, 0.0));
  CHECK(a[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(a[1] == doctest::Approx(0.1 / std::sqrt(2.0)).epsilon(1e-15));

  // The perturbation never feeds the radius: (a - radial part) . x = 0.
  for (const Vec& x : {point2(1.3, -0.4), point2(-2.0, 5.0)}) {
    const double r = x.norm();
    const Vec tang = s.system.drift(x) - Vec(std::pow(r, -1.0) * x);
    CHECK(std::fabs(tang.dot(x)) <= 1e-14 * r * tang.norm() + 1e-300);
  }

  // In n >= 3 the regularized projection vanishes on the distinguished axis.
  const Scenario s3 = build_perturbed_drift(3, 0.0, 0.5, 0.1);
  const Vec a3 = s3.system.drift(point3(0.0, 0.0, 2.0));
  CHECK(a3[0] == 0.0);
  CHECK(a3[1] == 0.0);
  CHECK(a3[2] == doctest::Approx(1.0).epsilon(1e-15));
  const Vec generic = point3(1.0, -2.0, 2.0);
  const Vec tang3 = s3.system.drift(generic) - Vec(std::pow(generic.norm(), -1.0) * generic);
  CHECK(std::fabs(tang3.dot(generic)) <= 1e-14 * tang3.norm() * generic.norm());

  CHECK(s.angle_spec->delta1 == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(s.angle_spec->nu_star == doctest::Approx(0.1 + 0.5).epsilon(1e-15));

  // The inner certificate expectation flips with alpha.
  REQUIRE(s.certificates.size() == 2);
  CHECK(s.certificates[0].candidate.label == "neg_r_pow_1");
  CHECK(s.certificates[0].expected_certified);  // 0.1^{1} <= 1/2
  const Scenario shallow = build_perturbed_drift(2, -0.8, 0.5, 0.1);
  CHECK_FALSE(shallow.certificates[0].expected_certified);  // 0.1^{0.2} > 1/2

  CHECK_THROWS_AS(build_perturbed_drift(2, 0.0, 0.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(build_perturbed_drift(2, 0.0, 0.5, -0.1), std::invalid_argument);
  CHECK_NOTHROW(build_perturbed_drift(2, 0.0, 0.5, 0.0));
}

TEST_CASE("planar square-root drift acts componentwise") {
  const Scenario s = build_planar_sqrt();
  CHECK(s.system.dim_state == 2);
  const Vec a1 = s.system.drift(point2(4.0, 0.0));
  CHECK(a1[0] == 2.0);
  CHECK(a1[1] == 0.0);
  const Vec a2 = s.system.drift(point2(0.0, -9.0));
  CHECK(a2[0] == 0.0);
  CHECK(a2[1] == -3.0);
  const Vec a3 = s.system.drift(point2(-0.25, 0.01));
  CHECK(a3[0] == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(a3[1] == doctest::Approx(0.1).epsilon(1e-15));

  REQUIRE(s.polar_truth.has_value());
  CHECK(s.polar_truth->alpha == 0.5);
  CHECK(s.polar_truth->big_m(point2(1.0, 0.0)) == doctest::Approx(1.0).epsilon(1e-15));
  const double diag = 1.0 / std::sqrt(2.0);
  CHECK(s.polar_truth->big_m(point2(diag, diag)) ==
        doctest::Approx(std::pow(2.0, 0.25)).epsilon(1e-14));

  // The angular factor varies, so no scalar radial closure is attached.
  CHECK_FALSE(static_cast<bool>(s.radial_mu));
  REQUIRE(s.certificates.size() == 2);
  CHECK(s.certificates[0].candidate.label == "log_r");
  CHECK(s.certificates[0].expected_certified);
  CHECK(s.certificates[1].candidate.label == "inverse_r");
  CHECK(s.certificates[1].r_hi == 1e4);
}

TEST_CASE("inward drift is the advertised negative control") {
  const Scenario s = build_inward_drift();
  const Vec a = s.system.drift(point2(0.0, 3.0));
  CHECK(a[0] == 0.0);
  CHECK(a[1] == -1.0);
  CHECK(s.system.drift(point2(0.0, 0.0)).norm() == 0.0);
  CHECK_FALSE(s.polar_truth.has_value());
  REQUIRE(s.scale_expectation.has_value());
  CHECK(s.scale_expectation->left_divergent);
  CHECK_FALSE(s.scale_expectation->right_finite);
  REQUIRE(s.certificates.size() == 1);
  CHECK(s.certificates[0].expected_certified);  // deliberately wrong claim
  CHECK(s.radial_mu(1.0) == doctest::Approx(-0.5).epsilon(1e-15));
}

TEST_CASE("registry names are canonical and round-trip through lookup") {
  const std::vector<std::string> names = registry_list();
  CHECK(names.size() == 6);
  CHECK(std::is_sorted(names.begin(), names.end()));
  for (const std::string& name : names) {
    const Scenario s = registry_lookup(name);
    CHECK(s.name == name);
    CHECK(s.x0.norm() == doctest::Approx(kDefaultStartRadius).epsilon(1e-15));
  }

  // r0 is accepted everywhere but kept out of the canonical name.
  const Scenario small = registry_lookup("power_drift:n=2,alpha=0.5,r0=2");
  CHECK(small.name == "power_drift:n=2,alpha=0.5");
  CHECK(small.params.at("r0") == 2.0);
  CHECK((small.x0 - point2(2.0, 0.0)).norm() == 0.0);
}

TEST_CASE("registry lookup explains what went wrong") {
  try {
    registry_lookup("powr_drift:n=2,alpha=0.5");
    FAIL("expected an exception");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("power_drift") != std::string::npos);
  }
  CHECK_THROWS_AS(registry_lookup("power_drift:n=2"), std::invalid_argument);
  CHECK_THROWS_AS(registry_lookup("power_drift:n=2,alpha=0.5,bogus=1"),
                  std::invalid_argument);
  CHECK_THROWS_AS(registry_lookup("power_drift:n=2,alpha=xyz"), std::invalid_argument);
  CHECK_THROWS_AS(registry_lookup("power_drift:n=2,,alpha=0"), std::invalid_argument);
  CHECK_THROWS_AS(registry_lookup("power_drift:n=2,n=3,alpha=0"), std::invalid_argument);
  CHECK_THROWS_AS(registry_lookup("power_drift:n=2.5,alpha=0"), std::invalid_argument);
  CHECK_THROWS_AS(registry_lookup("planar_sqrt:foo=1"), std::invalid_argument);
  CHECK_NOTHROW(registry_lookup("planar_sqrt:r0=3"));
}

TEST_CASE("scenario configs round-trip exactly") {
  for (const std::string& name : registry_list()) {
    Scenario original = registry_lookup(name);
    original.default_seed = 77;
    const Scenario copy = read_scenario_config(write_scenario_config(original));
    CHECK(copy.name == original.name);
    CHECK(copy.family == original.family);
    CHECK(copy.default_seed == 77);
    CHECK((copy.x0 - original.x0).norm() == 0.0);
    REQUIRE(copy.params.size() == original.params.size());
    for (const auto& [key, value] : original.params) {
      CHECK(copy.params.at(key) == value);
    }
    // Rebuilt dynamics agree bit for bit on probe points.
    Vec probe = Vec::Constant(original.system.dim_state, 0.7);
    probe[0] = -1.2;
    CHECK((copy.system.drift(probe) - original.system.drift(probe)).norm() == 0.0);
    CHECK((copy.system.diffusion(probe) - original.system.diffusion(probe)).norm() == 0.0);
  }
}

TEST_CASE("config reader accepts the documented subset") {
  const std::string text =
      "# leading comment\n"
      "name = \"power_drift\"  # family\n"
      "\n"
      "n = 2\n"
      "m = 2\n"
      "alpha = 0.5\n"
      "x0 = [3, 4]\n"
      "seed = 9\n";
  const Scenario s = read_scenario_config(text);
  CHECK(s.name == "power_drift:n=2,alpha=0.5");
  CHECK((s.x0 - point2(3.0, 4.0)).norm() == 0.0);
  CHECK(s.params.at("r0") == 5.0);  // |x0|
  CHECK(s.default_seed == 9);

  // m and n are optional for the fixed-dimension families.
  CHECK_NOTHROW(read_scenario_config("name = \"planar_sqrt\"\n"));
  CHECK_NOTHROW(read_scenario_config("name = \"planar_sqrt\"\nn = 2\n"));
}

TEST_CASE("config reader rejects malformed input with line context") {
  auto rejects = [](const std::string& text, const char* needle) {
    try {
      read_scenario_config(text);
      FAIL_CHECK("expected a parse failure for: " << text);
    } catch (const std::invalid_argument& e) {
      CHECK(std::string(e.what()).find(needle) != std::string::npos);
    }
  };
  rejects("n = 2\n", "missing 'name'");
  rejects("name = power_drift\n", "quoted");
  rejects("name = \"power_drift\"\n[section]\n", "section");
  rejects("name = \"power_drift\"\nalpha 0.5\n", "key = value");
  rejects("name = \"power_drift\"\na-b = 1\n", "invalid key");
  rejects("name = \"power_drift\"\nn = 2\nn = 3\nalpha = 0\n", "duplicate");
  rejects("name = \"power_drift\"\nn = 2\nalpha = 0\nx0 = []\n", "x0");
  rejects("name = \"power_drift\"\nn = 2\nalpha = 0\nx0 = [1]\n", "dimension");
  rejects("name = \"power_drift\"\nn = 2\nalpha = 0\nx0 = [0, 0]\n", "origin");
  rejects("name = \"power_drift\"\nn = 2\nalpha = 0\nseed = -1\n", "seed");
  rejects("name = \"power_drift\"\nn = 2\nalpha = 0\nseed = 1.5\n", "seed");
  rejects("name = \"planar_sqrt\"\nm = 3\n", "noise dimension");
  rejects("name = \"planar_sqrt\"\nn = 3\n", "two-dimensional");
  rejects("name = \"power_drift\"\nn = 2\nalpha = zz\n", "parse");
}

TEST_CASE("outward scenarios actually escape and never touch the floor") {
  const Scenario s = registry_lookup("perturbed_drift:n=3,alpha=0,eps=0.5,c2=0.1");
  const StepSchedule sched = default_schedule(200.0);
  EnsembleOptions opts;
  const Ensemble ens = run_scenario_ensemble(s, 48, sched, s.default_seed, opts);
  const EnsembleSummary sum = summarize_ensemble(ens, opts);
  CHECK(sum.floor_hit_fraction == 0.0);
  CHECK(sum.transience_fraction == 1.0);  // threshold 10 |x0| = 50, R(200) ~ 200
  CHECK(sum.n_paths == 48);
}
