#include <algorithm>
#include <cmath>
#include <vector>

#include <doctest.h>

#include "sae/dataset.hpp"
#include "sae/draws.hpp"
#include "sae/errors.hpp"
#include "sae/models.hpp"
#include "sae/rng.hpp"
#include "test_support.hpp"

using namespace sae;

namespace {

SurveyDataset tiny_dataset() {
  SurveyDataset ds;
  ds.area_ids = {"a", "b", "c"};
  ds.y = Vector{{1.0, 2.0, 3.0}};
  ds.d = Vector{{4.0, 4.0, 4.0}};
  ds.x = Matrix::Ones(3, 1);
  return ds;
}

}  // namespace

TEST_CASE("dataset validation catches structural defects") {
  CHECK_NOTHROW(tiny_dataset().validate());

  auto empty = tiny_dataset();
  empty.area_ids.clear();
  empty.y.resize(0);
  empty.d.resize(0);
  empty.x.resize(0, 1);
  CHECK_THROWS_AS(empty.validate(), DataError);

  auto mismatch = tiny_dataset();
  mismatch.d.resize(2);
  CHECK_THROWS_AS(mismatch.validate(), DataError);

  auto dup = tiny_dataset();
  dup.area_ids[2] = "a";
  CHECK_THROWS_WITH_AS(dup.validate(), doctest::Contains("duplicate"), DataError);

  auto nan_y = tiny_dataset();
  nan_y.y[1] = std::nan("");
  CHECK_THROWS_AS(nan_y.validate(), DataError);

  auto bad_d = tiny_dataset();
  bad_d.d[0] = 0.0;
  CHECK_THROWS_WITH_AS(bad_d.validate(), doctest::Contains("positive"), DataError);

  auto rank = tiny_dataset();
  rank.x = Matrix::Ones(3, 2);  // two identical columns
  CHECK_THROWS_WITH_AS(rank.validate(), doctest::Contains("rank"), DataError);

  auto wide = tiny_dataset();
  wide.x = Matrix::Identity(3, 3) + Matrix::Ones(3, 3);
  wide.x.conservativeResize(3, 3);
  CHECK_NOTHROW(wide.validate());

  auto graph_mismatch = tiny_dataset();
  graph_mismatch.graph = build_area_graph(4, {{0, 1}, {1, 2}, {2, 3}});
  CHECK_THROWS_AS(graph_mismatch.validate(), DataError);
}

TEST_CASE("standardize matches the worked example and inverts exactly") {
  auto [std_ds, rec] = standardize(tiny_dataset());
  CHECK(rec.applied);
  CHECK(rec.center == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(rec.spread == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std_ds.y[0] == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(std_ds.y[1] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(std_ds.y[2] == doctest::Approx(1.0).epsilon(1e-15));
  for (int i = 0; i < 3; ++i) CHECK(std_ds.d[i] == doctest::Approx(4.0).epsilon(1e-15));

  // round trip on a less tidy dataset
  SurveyDataset ds;
  ds.area_ids = {"a", "b", "c", "d"};
  ds.y = Vector{{-3.2, 0.7, 11.0, 2.25}};
  ds.d = Vector{{0.5, 1.5, 2.0, 0.25}};
  ds.x = Matrix::Ones(4, 1);
  auto [zds, zrec] = standardize(ds);
  for (int i = 0; i < 4; ++i) {
    CHECK(zrec.to_original(zds.y[i]) == doctest::Approx(ds.y[i]).epsilon(1e-12));
    CHECK(zds.d[i] * zrec.spread * zrec.spread == doctest::Approx(ds.d[i]).epsilon(1e-12));
    CHECK(zrec.to_standardized(ds.y[i]) == doctest::Approx(zds.y[i]).epsilon(1e-12));
  }
  CHECK(std::abs(zds.y.mean()) < 1e-14);

  auto flat = tiny_dataset();
  flat.y.setConstant(5.0);
  CHECK_THROWS_WITH_AS(standardize(flat), doctest::Contains("constant"), DataError);
}

TEST_CASE("prior and mcmc config validation") {
  PriorConfig priors;
  CHECK_NOTHROW(priors.validate());
  priors.sigma1_shape = 0.0;
  CHECK_THROWS_AS(priors.validate(), UsageError);
  priors = PriorConfig{};
  priors.dm_sigma_scale = -1.0;
  CHECK_THROWS_AS(priors.validate(), UsageError);

  McmcConfig mcmc;
  CHECK_NOTHROW(mcmc.validate());
  mcmc.iterations = 0;
  CHECK_THROWS_AS(mcmc.validate(), UsageError);
  mcmc = McmcConfig{};
  mcmc.thin = 0;
  CHECK_THROWS_AS(mcmc.validate(), UsageError);
  mcmc = McmcConfig{};
  mcmc.chains = 0;
  CHECK_THROWS_AS(mcmc.validate(), UsageError);
}

TEST_CASE("quantile interpolation against a sort-based oracle") {
  std::vector<double> draws(100);
  for (int i = 0; i < 100; ++i) draws[i] = static_cast<double>(i + 1);

  CHECK(quantile_sorted(draws, 0.05) == doctest::Approx(5.95).epsilon(1e-13));
  CHECK(quantile_sorted(draws, 0.95) == doctest::Approx(95.05).epsilon(1e-13));
  CHECK(quantile_sorted(draws, 0.0) == 1.0);
  CHECK(quantile_sorted(draws, 1.0) == 100.0);
  CHECK(quantile_sorted(draws, 0.5) == doctest::Approx(50.5).epsilon(1e-13));

  // independent oracle on irregular data: same h = (S-1) tau rule recomputed
  // from scratch with long double arithmetic
  RngStream rng(911);
  std::vector<double> sample(37);
  for (double& v : sample) v = rng.normal() * 3.0 + 1.0;
  std::sort(sample.begin(), sample.end());
  for (double tau : {0.0, 0.013, 0.25, 0.5, 0.75, 0.9, 0.999, 1.0}) {
    const long double h = (static_cast<long double>(sample.size()) - 1.0L) * static_cast<long double>(tau);
    const auto lo = static_cast<std::size_t>(h);
    const long double expect =
        lo + 1 >= sample.size()
            ? sample.back()
            : sample[lo] + (h - static_cast<long double>(lo)) * (sample[lo + 1] - sample[lo]);
    CHECK(quantile_sorted(sample, tau) ==
          doctest::Approx(static_cast<double>(expect)).epsilon(1e-13));
  }

  CHECK_THROWS_AS(quantile_sorted({}, 0.5), UsageError);
  CHECK_THROWS_AS(quantile_sorted(draws, -0.1), UsageError);
  CHECK_THROWS_AS(quantile_sorted(draws, 1.1), UsageError);
}

TEST_CASE("summarize: degenerate draws, median collapse, and quantile pinning") {
  PosteriorDraws pd;
  pd.model = ModelKind::fh;
  pd.area_ids = {"a", "b"};
  pd.beta = Matrix::Zero(100, 1);
  pd.theta.resize(100, 2);
  pd.u = Matrix::Zero(100, 2);
  for (int s = 0; s < 100; ++s) {
    pd.theta(s, 0) = 7.25;                         // constant draws
    pd.theta(s, 1) = static_cast<double>(s + 1);   // {1..100}
  }
  pd.scalars["sigma_fh_sq"] = Vector::Constant(100, 2.0);

  FitSummary fs = summarize(pd, 0.10);
  CHECK(fs.model == ModelKind::fh);
  CHECK_FALSE(fs.has_selection);
  REQUIRE(fs.areas.size() == 2);
  CHECK(fs.areas[0].mean == doctest::Approx(7.25).epsilon(1e-15));
  CHECK(fs.areas[0].sd == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(fs.areas[0].lower == doctest::Approx(7.25).epsilon(1e-15));
  CHECK(fs.areas[0].upper == doctest::Approx(7.25).epsilon(1e-15));
  CHECK(fs.areas[1].mean == doctest::Approx(50.5).epsilon(1e-13));
  CHECK(fs.areas[1].lower == doctest::Approx(5.95).epsilon(1e-13));
  CHECK(fs.areas[1].upper == doctest::Approx(95.05).epsilon(1e-13));
  CHECK(fs.scalar_means.at("sigma_fh_sq") == doctest::Approx(2.0).epsilon(1e-15));

  FitSummary median = summarize(pd, 1.0);
  CHECK(median.areas[1].lower == doctest::Approx(50.5).epsilon(1e-13));
  CHECK(median.areas[1].upper == doctest::Approx(50.5).epsilon(1e-13));
  CHECK(median.areas[1].lower == median.areas[1].upper);

  CHECK_THROWS_AS(summarize(pd, 0.0), UsageError);
  CHECK_THROWS_AS(summarize(pd, 1.5), UsageError);
}

TEST_CASE("summarize back-transforms per draw when standardized") {
  PosteriorDraws pd;
  pd.model = ModelKind::ssd;
  pd.area_ids = {"a"};
  pd.beta = Matrix::Zero(4, 1);
  pd.theta.resize(4, 1);
  pd.theta << -1.0, 0.0, 1.0, 2.0;
  pd.u = Matrix::Zero(4, 1);
  pd.delta = Matrix::Ones(4, 1);
  StandardizationRecord rec;
  rec.center = 10.0;
  rec.spread = 3.0;
  rec.applied = true;
  pd.standardization = rec;

  FitSummary fs = summarize(pd, 0.5);
  // modeling scale untouched
  CHECK(fs.areas_modeling[0].mean == doctest::Approx(0.5).epsilon(1e-15));
  // original scale: draws {7, 10, 13, 16}
  CHECK(fs.areas[0].mean == doctest::Approx(11.5).epsilon(1e-13));
  CHECK(fs.areas[0].lower == doctest::Approx(7.0 + 0.75 * 3.0).epsilon(1e-13));
  CHECK(fs.areas[0].upper == doctest::Approx(16.0 - 0.75 * 3.0).epsilon(1e-13));
  // sd scales linearly: sd of {-1,0,1,2} is sqrt(5/3), times spread 3
  CHECK(fs.areas[0].sd == doctest::Approx(3.0 * std::sqrt(5.0 / 3.0)).epsilon(1e-13));
  CHECK(fs.has_selection);
  CHECK(fs.areas[0].selection_rate == doctest::Approx(1.0).epsilon(1e-15));
}

namespace {

// Direct two-density evaluation of the selection posterior: the effect-present
// explanation has residual density N(v, d), the effect-absent one N(0, d).
double selection_oracle(double p, double r, double v, double d) {
  const double num = p * std::exp(-(r - v) * (r - v) / (2.0 * d));
  const double den = num + (1.0 - p) * std::exp(-r * r / (2.0 * d));
  return num / den;
}

}  // namespace

TEST_CASE("selection probability: exact values, oracle sweep, monotonicity") {
  // zero effect leaves the prior untouched, for any residual
  CHECK(selection_probability(0.37, 5.0, 0.0, 0.8) == 0.37);
  CHECK(selection_probability(0.0, 1.0, 2.0, 1.0) == 0.0);
  CHECK(selection_probability(1.0, -9.0, 2.0, 1.0) == 1.0);

  // worked value: log-odds = 0 + 2*2/1 - 4/2 = 2
  const double expect = 1.0 / (1.0 + std::exp(-2.0));
  CHECK(selection_probability(0.5, 2.0, 2.0, 1.0) == doctest::Approx(expect).epsilon(1e-15));
  CHECK(selection_probability(0.5, 2.0, 2.0, 1.0) == doctest::Approx(0.8808).epsilon(1e-4));
  CHECK(selection_oracle(0.5, 2.0, 2.0, 1.0) == doctest::Approx(expect).epsilon(1e-13));

  RngStream rng(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    const double p = 0.01 + 0.98 * rng.uniform01();
    const double r = 6.0 * rng.uniform01() - 3.0;
    const double v = 6.0 * rng.uniform01() - 3.0;
    const double d = 0.1 + 4.9 * rng.uniform01();
    const double got = selection_probability(p, r, v, d);
    const double want = selection_oracle(p, r, v, d);
    CHECK(std::abs(got - want) < 1e-12);
  }

  // nondecreasing in the prior for fixed evidence
  for (double r : {-2.0, 0.3, 1.7}) {
    for (double v : {-1.0, 0.4, 2.5}) {
      double prev = 0.0;
      for (int k = 0; k <= 50; ++k) {
        const double p = static_cast<double>(k) / 50.0;
        const double cur = selection_probability(p, r, v, 0.7);
        CHECK(cur >= prev - 1e-15);
        prev = cur;
      }
      CHECK(prev == 1.0);
    }
  }

  // continuity toward the zero-effect limit: |dp/dv| <= 1/4 here
  for (double v : {1e-3, 1e-6, 1e-9}) {
    CHECK(std::abs(selection_probability(0.3, 1.0, v, 1.0) - 0.3) <= 0.25 * v);
  }

  // extreme tilts saturate cleanly instead of overflowing
  CHECK(selection_probability(0.5, 1e6, 1.0, 1e-3) == 1.0);
  CHECK(selection_probability(0.5, -1e6, 1.0, 1e-3) < 1e-300);
  CHECK(std::isfinite(selection_probability(1e-300, 50.0, 50.0, 1e-2)));

  CHECK_THROWS_AS(selection_probability(0.5, 0.0, 0.0, 0.0), Error);
  CHECK_THROWS_AS(selection_probability(1.2, 0.0, 0.0, 1.0), Error);
  CHECK_THROWS_AS(selection_probability(0.5, std::nan(""), 0.0, 1.0), Error);
}
