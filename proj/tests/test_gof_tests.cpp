// SPDX-License-Identifier: Apache-2.0
//
// fadestat - fading channel statistics toolkit
// Copyright (C) 2026 The fadestat authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "fadestat/error.hpp"
#include "fadestat/gof_tests.hpp"
#include "oracles.hpp"

using namespace fadestat;

namespace {

// n * integral over [0, 1] of (F_n(u) - u)^2 / (u (1 - u)) for the step EDF of
// the given ascending cdf values, by quadrature on each step.
double ad_integral(const std::vector<double>& u) {
  const double n = static_cast<double>(u.size());
  std::vector<double> cuts{0.0};
  cuts.insert(cuts.end(), u.begin(), u.end());
  cuts.push_back(1.0);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double level = static_cast<double>(i) / n;
    total += oracle::integrate([level](double t) { return (level - t) * (level - t) / (t * (1.0 - t)); },
                               cuts[i], cuts[i + 1], 1e-15, 1e-13);
  }
  return n * total;
}

std::vector<double> ideal_cdf(std::size_t n) {
  std::vector<double> u(n);
  for (std::size_t i = 0; i < n; ++i) u[i] = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
  return u;
}

std::vector<double> cdf_of(const FadingModel& m, const SampleSet& s) {
  const auto x = s.sorted();
  return cdf_sorted(m, x);
}

}  // namespace

TEST_CASE("edf") {
  const SampleSet d({1.0, 2.0, 3.0});
  CHECK(edf(d, 2.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(edf(d, 0.5) == 0.0);
  CHECK(edf(d, 3.0) == 1.0);
  CHECK(edf(SampleSet({1.0, 1.0, 2.0}), 1.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));

  RandomStream rng(21);
  std::vector<double> v(1000);
  for (double& x : v) x = rng.uniform();
  CHECK(std::fabs(edf(SampleSet(v), 0.5) - 0.5) < 0.05);
}

TEST_CASE("KS statistic") {
  const auto ideal = ideal_cdf(100);
  const auto s = ks_from_cdf(ideal);
  CHECK(s.value == doctest::Approx(0.005).epsilon(1e-12));
  CHECK(s.d_plus == doctest::Approx(0.005).epsilon(1e-12));
  CHECK(s.d_minus == doctest::Approx(0.005).epsilon(1e-12));

  // Ideal sample in data space through the Rayleigh quantile function.
  std::vector<double> x(100);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::sqrt(-2.0 * std::log1p(-ideal[i]));
  CHECK(ks_statistic(SampleSet(x), FadingModel::rayleigh(1.0)).value == doctest::Approx(0.005).epsilon(1e-10));

  RandomStream rng(22);
  const auto data = sample(FadingModel::rayleigh(1.0), 200, rng);
  const auto own = ks_statistic(data, FadingModel::rayleigh(1.0));
  CHECK(own.value * ks_scale_factor(200) < 1.224);

  // sup |F_1 - F_3| over t = x^2 is attained at t = 9 ln 9 / 4.
  const double t = 9.0 * std::log(9.0) / 4.0;
  const double sep = std::exp(-t / 18.0) - std::exp(-t / 2.0);
  CHECK(sep > 0.6);
  CHECK(ks_statistic(data, FadingModel::rayleigh(3.0)).value > 0.4);

  CHECK_THROWS_AS(ks_statistic(SampleSet(std::vector<double>(19, 1.0)), FadingModel::rayleigh(1.0)), Error);
}

TEST_CASE("KS bounds") {
  RandomStream rng(23);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t n = 20 + 10 * rep;
    const auto d = sample(FadingModel::nakagami(1.5, 1.0), n, rng);
    for (const auto& m : {FadingModel::nakagami(1.5, 1.0), FadingModel::rayleigh(0.2), FadingModel::k(0.6, 4.0)}) {
      const double v = ks_statistic(d, m).value;
      CHECK(v >= 0.5 / n - 1e-15);
      CHECK(v <= 1.0);
    }
  }
}

TEST_CASE("AD statistic against direct integration") {
  const auto ideal = ideal_cdf(100);
  const double a2 = ad_from_cdf(ideal).value;
  CHECK(std::fabs(a2 - ad_integral(ideal)) < 1e-6);
  CHECK(a2 == doctest::Approx(0.0114951327).epsilon(1e-8));

  RandomStream rng(24);
  const auto data = sample(FadingModel::rayleigh(1.0), 200, rng);
  const auto u = cdf_of(FadingModel::rayleigh(1.0), data);
  CHECK(std::fabs(ad_from_cdf(u).value - ad_integral(u)) < 1e-6);
  CHECK(ad_statistic(data, FadingModel::rayleigh(1.0)).value < 2.492);
  CHECK_FALSE(ad_statistic(data, FadingModel::rayleigh(1.0)).clamped);
}

TEST_CASE("AD tail weighting") {
  RandomStream rng(25);
  auto u = cdf_of(FadingModel::rayleigh(1.0), sample(FadingModel::rayleigh(1.0), 199, rng));
  const double base = ad_from_cdf(u).value;
  auto with_outlier = u;
  with_outlier.push_back(1.0 - 1e-12);
  const double a2 = ad_from_cdf(with_outlier).value;
  CHECK(a2 > base);
  CHECK(std::fabs(a2 - ad_integral(with_outlier)) < 1e-6);
  // The same point moves KS by at most 1/n; AD moves by more.
  const double dks = ks_from_cdf(with_outlier).value - ks_from_cdf(u).value;
  CHECK(dks <= 1.0 / 199.0);
  CHECK(a2 - base > dks);

  for (double tail : {1e-9, 1e-12, 1e-14}) {
    auto w = u;
    w.push_back(1.0 - tail);
    CHECK(ad_from_cdf(w).value > base);
  }

  auto extreme = u;
  extreme.back() = 1.0;
  CHECK(ad_from_cdf(extreme).clamped);
  CHECK(std::isfinite(ad_from_cdf(extreme).value));
}

TEST_CASE("table levels") {
  const auto& ks = table_row(StatisticKind::ks);
  const auto& ad = table_row(StatisticKind::ad);
  for (std::size_t j = 0; j < 3; ++j) {
    EdfStatistic k{StatisticKind::ks, 0.0, 100};
    k.d_plus = ks.critical[j] / ks_scale_factor(100);
    k.value = k.d_plus;
    CHECK(table_alpha(k, Family::rayleigh).alpha_level == doctest::Approx(ks.alpha[j]).epsilon(1e-12));
    EdfStatistic a{StatisticKind::ad, ad.critical[j], 100};
    CHECK(table_alpha(a, Family::rayleigh).alpha_level == ad.alpha[j]);
    CHECK_FALSE(table_alpha(a, Family::rayleigh).extrapolated);
  }

  EdfStatistic a{StatisticKind::ad, 1.248, 100};
  CHECK(table_alpha(a, Family::weibull).alpha_level == 0.25);
  a.value = 2.492;
  CHECK(table_alpha(a, Family::weibull).alpha_level == 0.05);
  CHECK_FALSE(table_alpha(a, Family::weibull).confirmed);
  a.value = std::nextafter(2.492, 0.0);
  CHECK(table_alpha(a, Family::weibull).confirmed);
  CHECK(table_alpha(a, Family::weibull).estimated_parameters);
  CHECK_FALSE(table_alpha(a, Family::weibull, false).estimated_parameters);

  a.value = 0.3;
  CHECK(table_alpha(a, Family::gamma).alpha_level == 0.25);
  CHECK(table_alpha(a, Family::gamma).extrapolated);
  a.value = 40.0;
  CHECK(table_alpha(a, Family::gamma).alpha_level == 0.001);
  CHECK(table_alpha(a, Family::gamma).extrapolated);

  for (Family f : {Family::k, Family::f, Family::kg}) {
    CHECK_FALSE(table_alpha(a, f).available);
    CHECK_FALSE(table_alpha(a, f).confirmed);
    EdfStatistic k{StatisticKind::ks, 0.1, 100};
    k.d_plus = 0.05;
    CHECK(table_alpha(k, f).available);
  }

  // Midway between anchors in the statistic is the geometric mean in level.
  a.value = 0.5 * (1.248 + 2.492);
  CHECK(table_alpha(a, Family::rayleigh).alpha_level == doctest::Approx(std::sqrt(0.25 * 0.05)).epsilon(1e-12));
}

TEST_CASE("table level is monotone and the decision follows it") {
  double prev = 1.0;
  for (double t = 0.0; t < 8.0; t += 0.01) {
    EdfStatistic a{StatisticKind::ad, t, 50};
    const auto d = table_alpha(a, Family::rayleigh);
    CHECK(d.alpha_level <= prev);
    CHECK(d.confirmed == (d.alpha_level > 0.05));
    prev = d.alpha_level;
  }
  prev = 1.0;
  for (double t = 0.0; t < 0.4; t += 0.001) {
    EdfStatistic k{StatisticKind::ks, t, 100};
    k.d_plus = t;
    const auto d = table_alpha(k, Family::nakagami);
    CHECK(d.alpha_level <= prev);
    CHECK(d.confirmed == (d.alpha_level > 0.05));
    prev = d.alpha_level;
  }
}

TEST_CASE("Monte Carlo quantiles reproduce the table") {
  const auto model = FadingModel::rayleigh(1.0);
  const std::size_t reps = 100000;
  std::vector<double> ks(reps), ad(reps);
  RandomStream root(26);
  for (std::size_t r = 0; r < reps; ++r) {
    auto rng = root.substream(r);
    const auto u = cdf_of(model, sample(model, 100, rng));
    ks[r] = table_statistic(ks_from_cdf(u));
    ad[r] = ad_from_cdf(u).value;
  }
  std::sort(ks.begin(), ks.end());
  std::sort(ad.begin(), ad.end());
  const auto q = [&](const std::vector<double>& v, double p) { return v[static_cast<std::size_t>(p * reps)]; };
  CHECK(std::fabs(q(ks, 0.95) - 1.224) < 0.05);
  CHECK(std::fabs(q(ad, 0.95) - 2.492) < 0.15);
  CHECK(std::fabs(q(ks, 0.75) - 0.828) < 0.05);
  CHECK(std::fabs(q(ad, 0.75) - 1.248) < 0.15);
}

TEST_CASE("bootstrap level") {
  const std::vector<double> reps{0.1, 0.2, 0.3, std::nan(""), 0.4};
  CHECK(bootstrap_level(reps, 0.25) == 0.5);
  CHECK(bootstrap_level(reps, 0.3) == 0.5);
  CHECK(bootstrap_level(reps, 0.0) == 1.0);
  CHECK(bootstrap_level(reps, 9.0) == 0.0);
  double prev = 1.0;
  for (double t = 0.0; t < 0.5; t += 0.01) {
    CHECK(bootstrap_level(reps, t) <= prev);
    prev = bootstrap_level(reps, t);
  }
}

TEST_CASE("bootstrap is deterministic and matches the serial reference") {
  RandomStream rng(27);
  const auto data = sample(FadingModel::k(0.7793, 0.901), 300, rng);
  for (Family fam : {Family::rayleigh, Family::k, Family::nakagami}) {
    const auto fitted = fit(fam, data);
    BootstrapOptions opt;
    opt.replicates = 60;
    opt.seed = 9;
    const auto a = bootstrap_alpha(data, fitted, opt);
    const auto b = bootstrap_alpha_serial(data, fitted, opt);
    const auto c = bootstrap_alpha(data, fitted, opt);
    REQUIRE(a.ks_replicates.size() == 60);
    for (std::size_t r = 0; r < 60; ++r) {
      CHECK(a.ks_replicates[r] == b.ks_replicates[r]);
      CHECK(a.ad_replicates[r] == b.ad_replicates[r]);
      CHECK(a.ks_replicates[r] == c.ks_replicates[r]);
    }
    CHECK(a.ks.alpha_level == b.ks.alpha_level);
    CHECK(a.ad.alpha_level == b.ad.alpha_level);
    CHECK(a.ks.method == AlphaMethod::bootstrap);
    CHECK(a.ks.confirmed == (a.ks.alpha_level > 0.05));
  }
}

TEST_CASE("bootstrap rejects a wrong family") {
  RandomStream rng(28);
  const auto data = sample(FadingModel::k(0.7793, 0.901), 1000, rng);
  BootstrapOptions opt;
  opt.replicates = 200;
  const auto r = bootstrap_alpha(data, fit(Family::rayleigh, data), opt);
  CHECK(r.ks.alpha_level < 0.01);
  CHECK(r.ad.alpha_level < 0.01);
  CHECK_FALSE(r.ks.confirmed);
}

TEST_CASE("bootstrap calibration under the null") {
  const auto truth = FadingModel::rayleigh(1.0);
  RandomStream root(29);
  int confirmed = 0;
  for (std::uint64_t rep = 0; rep < 100; ++rep) {
    auto rng = root.substream(rep);
    const auto data = sample(truth, 500, rng);
    BootstrapOptions opt;
    opt.seed = 1000 + rep;
    const auto r = bootstrap_alpha(data, fit(Family::rayleigh, data), opt);
    if (r.ks.alpha_level > 0.05) ++confirmed;
  }
  CAPTURE(confirmed);
  CHECK(confirmed >= 95);
}
