// Experiment harness: deterministic families, config hashing/serialization,
// CSV schema and byte-for-byte reproducibility, and small end-to-end runs.
#include <set>
#include <sstream>
#include <string>

#include "doctest.h"
#include "families.hpp"
#include "harness.hpp"

using namespace rispace;

TEST_CASE("random simple families are deterministic and well formed") {
  auto fam1 = random_simple_family(42, 25);
  auto fam2 = random_simple_family(42, 25);
  auto fam3 = random_simple_family(43, 25);
  REQUIRE(fam1.size() == 25);
  bool any_diff = false;
  for (int i = 0; i < 25; ++i) {
    CHECK(nlohmann::json(fam1[i]) == nlohmann::json(fam2[i]));
    if (nlohmann::json(fam1[i]) != nlohmann::json(fam3[i])) any_diff = true;
    REQUIRE(fam1[i].total_measure() <= 1.0 + 1e-10);
    for (const auto& pc : fam1[i].pieces()) REQUIRE(pc.measure > 0.0);
  }
  CHECK(any_diff);  // different seeds give different draws
}

TEST_CASE("power-log profiles are decreasing with the advertised tail") {
  SimpleFunction f = power_log_profile(0.4, 0.0, 48);
  CHECK(f.total_measure() == doctest::Approx(1.0));
  // rearranging a decreasing profile must not change its norm
  const SpaceSpec l2 = SpaceSpec::lebesgue(2.0);
  StepFunction fs = rearrange(f);
  CHECK(space_norm(fs, l2) == doctest::Approx(space_norm(f, l2)).epsilon(1e-12));
  // gamma below 1/q keeps the q-norm finite; the dyadic sums reflect the tail
  CHECK(space_norm(f, l2) > space_norm(f, SpaceSpec::lebesgue(1.0)));

  auto fam = power_log_family(0.5, 12);
  REQUIRE(fam.size() == 12);
  for (const auto& g : fam) {
    REQUIRE_FALSE(g.is_zero());
    REQUIRE(std::isfinite(space_norm(g, SpaceSpec::lebesgue(1.0))));
  }
  // tail exponents climb toward the boundary: L^2 norms grow along the family
  CHECK(space_norm(fam.back(), l2) > space_norm(fam.front(), l2));
}

TEST_CASE("data descriptors serialize and realize at any resolution") {
  std::mt19937_64 rng(7);
  DataDescriptor d = draw_descriptor(rng, 2, 0.5, 1.2);
  REQUIRE_FALSE(d.spikes.empty());
  nlohmann::json j = d;
  DataDescriptor back = j.get<DataDescriptor>();
  REQUIRE(back.spikes.size() == d.spikes.size());
  REQUIRE(back.bumps.size() == d.bumps.size());
  CHECK(back.cap_radius == d.cap_radius);
  CHECK(back.spikes[0].gamma == d.spikes[0].gamma);

  Grid coarse = Grid::square(16);
  Grid fine = Grid::square(48);
  GridFunction uc = d.realize(coarse);
  GridFunction uf = d.realize(fine);
  CHECK(uc.max_abs() > 0.0);
  // same underlying function: L1 means agree across resolutions
  const double m_c = space_norm(uc.cell_view(), SpaceSpec::lebesgue(1.0));
  const double m_f = space_norm(uf.cell_view(), SpaceSpec::lebesgue(1.0));
  CHECK(m_c == doctest::Approx(m_f).epsilon(0.15));

  DataDescriptor empty;
  GridFunction one = empty.realize(coarse);
  CHECK(one.max_abs() == doctest::Approx(1.0));
}

TEST_CASE("experiment configs hash stably and round-trip through JSON") {
  ExperimentConfig c;
  c.experiment = "holder";
  c.variant = "dual";
  c.p = 3.0;
  c.dim = 2;
  c.levels = {16, 24};
  c.samples = 6;
  c.seed = 99;

  const std::uint64_t h1 = config_hash(c);
  CHECK(h1 == config_hash(c));  // pure function of the config

  nlohmann::json j = c;
  ExperimentConfig back = j.get<ExperimentConfig>();
  CHECK(back.variant == "dual");
  CHECK(back.levels == c.levels);
  CHECK(back.seed == 99);
  CHECK(config_hash(back) == h1);

  ExperimentConfig other = c;
  other.seed = 100;
  CHECK(config_hash(other) != h1);

  // verify-style configs carry couple/params/spaces through JSON too
  ExperimentConfig v;
  v.experiment = "verify";
  v.variant = "identification";
  v.couple = CoupleSpec(SpaceSpec::lebesgue(1.0), SpaceSpec::lebesgue(2.0));
  v.params = {0.5, 1.0, 0.0};
  v.family_size = 8;
  nlohmann::json jv = v;
  ExperimentConfig vb = jv.get<ExperimentConfig>();
  CHECK(vb.couple.x1.p == 2.0);
  CHECK(vb.params.theta == 0.5);
  CHECK(config_hash(vb) == config_hash(v));
}

TEST_CASE("effective Sobolev exponent honors the override convention") {
  CHECK(effective_pstar(1.5, 2, 0.0) == doctest::Approx(6.0));
  CHECK(effective_pstar(1.5, 2, 42.0) == doctest::Approx(6.0));  // p < n ignores it
  CHECK(effective_pstar(3.0, 2, 0.0) == doctest::Approx(9.0));   // default 3p
  CHECK(effective_pstar(3.0, 2, 7.0) == doctest::Approx(7.0));
}

TEST_CASE("CSV output is schema-stable and byte-identical across runs") {
  ExperimentConfig c;
  c.experiment = "bounds";
  c.variant = "uniform";
  c.p = 1.5;
  c.dim = 2;
  c.levels = {12};
  c.seed = 5;
  c.solver_tol = 1e-10;

  ExperimentResult r1 = run_experiment(c);
  ExperimentResult r2 = run_experiment(c);
  const std::string csv1 = r1.csv(false);
  CHECK(csv1 == r2.csv(false));
  CHECK(csv1.substr(0, csv1.find('\n')) ==
        "experiment,config_hash,sample_id,norm_src,norm_tgt,ratio,pass,seconds");

  // without --seconds the timing column is zeroed, so reruns match bytewise
  std::istringstream lines(csv1);
  std::string line;
  std::getline(lines, line);  // header
  int rows = 0;
  while (std::getline(lines, line)) {
    ++rows;
    CHECK(line.substr(line.size() - 9) == ",0.000000");
    // the hash column is 16 hex digits
    const auto a = line.find(','), b = line.find(',', line.find(',') + 1);
    CHECK(b - a - 1 == 16);
  }
  CHECK(rows == static_cast<int>(r1.rows.size()));

  // timed CSV keeps the same shape but may differ between runs
  const std::string timed = r1.csv(true);
  CHECK(timed.substr(0, timed.find('\n')) == csv1.substr(0, csv1.find('\n')));
}

TEST_CASE("uniform bound check certifies load-scaling invariance") {
  ExperimentConfig c;
  c.experiment = "bounds";
  c.variant = "uniform";
  c.p = 1.5;
  c.dim = 2;
  c.levels = {12};
  c.seed = 11;
  ExperimentResult r = run_experiment(c);
  CHECK(r.pass);
  REQUIRE(r.rows.size() == 4);  // one row per decade scale
  std::set<double> ratios;
  for (const auto& row : r.rows) {
    CHECK(row.pass);
    ratios.insert(row.ratio);
  }
  const double spread = *ratios.rbegin() / *ratios.begin() - 1.0;
  CHECK(spread <= 1e-6);
  CHECK(r.summary.contains("ratio_spread"));
}

TEST_CASE("verify experiments wrap identification and embedding checks") {
  ExperimentConfig c;
  c.experiment = "verify";
  c.variant = "identification";
  c.couple = CoupleSpec(SpaceSpec::lebesgue(1.0), SpaceSpec::lebesgue(kInf));
  c.params = {0.5, 1.0, 0.0};
  c.family_size = 10;
  c.budget = 1e3;
  ExperimentResult r = run_experiment(c);
  CHECK(r.pass);
  CHECK(r.summary["identified"]["space"]["kind"] == "lorentz_zygmund");
  CHECK(r.summary["identified"]["case"] == "ordinary_case");
  CHECK(r.summary["quotient_target"] == doctest::Approx(1.0));
  REQUIRE(r.rows.size() == 10);
  for (const auto& row : r.rows) CHECK(std::isfinite(row.ratio));

  ExperimentConfig e;
  e.experiment = "verify";
  e.variant = "embedding";
  e.src = SpaceSpec::lebesgue(2.0);
  e.tgt = SpaceSpec::lebesgue(1.5);
  e.seed = 3;
  e.family_size = 12;
  ExperimentResult re = run_experiment(e);
  CHECK(re.pass);
  CHECK(re.summary["rule"] == "lower_primary_exponent");

  // an unsupported pair propagates as the dedicated exception type
  ExperimentConfig bad = e;
  bad.src = SpaceSpec::lebesgue(1.5);
  bad.tgt = SpaceSpec::lebesgue(2.0);
  CHECK_THROWS_AS(run_experiment(bad), unsupported_embedding);
}

TEST_CASE("unknown experiments and variants are rejected") {
  ExperimentConfig c;
  c.experiment = "frobnicate";
  CHECK_THROWS_AS(run_experiment(c), spec_error);
  c.experiment = "holder";
  c.variant = "sideways";
  CHECK_THROWS_AS(run_experiment(c), spec_error);
  c.variant = "lipschitz";
  c.p = 3.0;  // lipschitz drift needs 1 < p < 2
  CHECK_THROWS_AS(run_experiment(c), spec_error);
}

TEST_CASE("holder experiment smoke run stays finite and ordered") {
  ExperimentConfig c;
  c.experiment = "holder";
  c.variant = "weak";
  c.p = 2.0;
  c.dim = 2;
  c.levels = {12, 16};
  c.samples = 6;
  c.seed = 21;
  c.solver_tol = 1e-10;
  ExperimentResult r = run_experiment(c);
  CHECK(r.pass);
  CHECK(r.summary["delta_monotone"].get<bool>());
  CHECK(r.summary["sup_finite"].get<bool>());
  REQUIRE(r.rows.size() == 12);  // samples x levels
  for (const auto& row : r.rows) {
    CHECK(std::isfinite(row.ratio));
    CHECK(row.pass);
  }
  // payload mirrors the CSV rows and zeroes seconds when asked
  nlohmann::json payload = r.to_json_payload(false);
  REQUIRE(payload["rows"].size() == r.rows.size());
  CHECK(payload["rows"][0]["seconds"] == 0.0);
  CHECK(payload["pass"] == r.pass);
}
