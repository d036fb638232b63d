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
#include <numbers>
#include <vector>

#include "doctest.h"
#include "fadestat/error.hpp"
#include "fadestat/fading_models.hpp"
#include "oracles.hpp"

using namespace fadestat;

namespace {

double rel(double a, double b) { return std::fabs(a - b) / std::fabs(b); }

std::vector<FadingModel> parameter_grid() {
  return {
      FadingModel::weibull(0.8, 1.0),  FadingModel::weibull(2.0, 1.5),   FadingModel::weibull(5.0, 0.7),
      FadingModel::rician(1.0, 0.35),  FadingModel::rician(0.5, 1.0),    FadingModel::rician(3.0, 0.5),
      FadingModel::rayleigh(0.5),      FadingModel::rayleigh(1.0),       FadingModel::rayleigh(2.0),
      FadingModel::nakagami(0.5, 1.0), FadingModel::nakagami(1.7, 2.0),  FadingModel::nakagami(6.0, 0.5),
      FadingModel::gamma(0.7, 1.0),    FadingModel::gamma(2.0, 0.5),     FadingModel::gamma(9.0, 0.2),
      FadingModel::k(0.7793, 0.901),   FadingModel::k(2.0, 1.0),         FadingModel::k(15.0, 3.0),
      FadingModel::f(1.0, 1.2, 1.0),   FadingModel::f(2.0, 3.0, 2.0),    FadingModel::f(0.5, 5.0, 1.0),
      FadingModel::kg(1.0, 1.5, 1.0),  FadingModel::kg(2.0, 3.0, 1.0),   FadingModel::kg(0.7, 4.5, 2.0),
  };
}

double total_mass(const FadingModel& model) {
  return oracle::integrate_log_axis([&](double x) { return pdf(model, x); }, -40.0, 12.0, 1e-15);
}

// Exact one-sample KS distance of data against the model cdf.
double ks_distance(std::vector<double> data, const FadingModel& model) {
  std::sort(data.begin(), data.end());
  const auto f = cdf_sorted(model, data);
  const double n = static_cast<double>(data.size());
  double d = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    d = std::max({d, (i + 1) / n - f[i], f[i] - i / n});
  }
  return d;
}

double two_sample_ks(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::fabs(double(i) / a.size() - double(j) / b.size()));
  }
  return d;
}

}  // namespace

TEST_CASE("model construction and validation") {
  CHECK_THROWS_AS(FadingModel::rayleigh(0.0), Error);
  CHECK_THROWS_AS(FadingModel::rayleigh(-1.0), Error);
  CHECK_THROWS_AS(FadingModel::nakagami(0.4, 1.0), Error);
  CHECK_THROWS_AS(FadingModel::f(0.3, 2.0, 1.0), Error);
  CHECK_THROWS_AS(FadingModel::k(NAN, 1.0), Error);
  CHECK_THROWS_AS(FadingModel::kg(1.0, std::numeric_limits<double>::infinity(), 1.0), Error);
  CHECK_NOTHROW(FadingModel::nakagami(0.5, 1.0));

  CHECK(FadingModel::f(1.0, 0.8, 1.0).has_finite_mean_power() == false);
  CHECK(FadingModel::f(1.0, 1.2, 1.0).has_finite_mean_power());

  try {
    FadingModel::gamma(1.0, -2.0);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::invalid_parameter);
  }
}

TEST_CASE("text records round-trip") {
  for (const auto& m : parameter_grid()) {
    const auto text = m.to_string();
    CHECK(FadingModel::parse(text) == m);
  }
  CHECK(FadingModel::k(0.7793, 0.901).to_string() == "K nu=0.7793 c=0.901");
  CHECK(FadingModel::parse("kg omega=2 m=0.5 k=3") == FadingModel::kg(0.5, 3.0, 2.0));
  CHECK_THROWS_AS(FadingModel::parse("Lognormal mu=1"), Error);
  CHECK_THROWS_AS(FadingModel::parse("K nu=1"), Error);
  CHECK_THROWS_AS(FadingModel::parse("K nu=1 c=x"), Error);
  CHECK_THROWS_AS(FadingModel::parse("K nu=1 c=1 z=2"), Error);
  CHECK(parse_family("rayleigh") == Family::rayleigh);
  CHECK(family_name(Family::kg) == "KG");
}

TEST_CASE("pdf reference values") {
  CHECK(rel(pdf(FadingModel::rayleigh(1.0), 1.0), std::exp(-0.5)) < 1e-14);
  CHECK(rel(pdf(FadingModel::k(0.7793, 0.901), 1.2), oracle::k_mixture_pdf(0.7793, 0.901, 1.2)) < 1e-9);
  CHECK(rel(pdf(FadingModel::f(1.0, 2.0, 1.0), 0.8), oracle::f_compound_pdf(1.0, 2.0, 1.0, 0.8)) < 1e-9);
  CHECK_THROWS_AS(pdf(FadingModel::rayleigh(1.0), -0.1), Error);
  CHECK_THROWS_AS(cdf(FadingModel::rayleigh(1.0), -0.1), Error);
}

TEST_CASE("pdf at the origin") {
  CHECK(pdf(FadingModel::rayleigh(1.0), 0.0) == 0.0);
  CHECK(pdf(FadingModel::gamma(0.7, 1.0), 0.0) == kInfiniteDensity);
  CHECK(pdf(FadingModel::weibull(0.5, 1.0), 0.0) == kInfiniteDensity);
  CHECK(pdf(FadingModel::weibull(1.0, 2.0), 0.0) == doctest::Approx(0.5));
  CHECK(pdf(FadingModel::k(0.3, 1.0), 0.0) == kInfiniteDensity);
  CHECK(pdf(FadingModel::kg(0.4, 2.0, 1.0), 0.0) == kInfiniteDensity);
  CHECK(pdf(FadingModel::kg(2.0, 3.0, 1.0), 0.0) == 0.0);
  // Continuous limits where the density is finite and non-zero at 0.
  for (const auto& m : {FadingModel::nakagami(0.5, 1.3), FadingModel::k(0.5, 1.7), FadingModel::f(0.5, 2.0, 1.5),
                        FadingModel::kg(0.5, 2.5, 1.2), FadingModel::kg(3.0, 0.5, 0.8)}) {
    CAPTURE(m.to_string());
    CHECK(rel(pdf(m, 0.0), pdf(m, 1e-9)) < 1e-6);
  }
}

TEST_CASE("normalization over the parameter grid") {
  for (const auto& m : parameter_grid()) {
    CAPTURE(m.to_string());
    CHECK(std::fabs(total_mass(m) - 1.0) < 1e-6);
  }
}

TEST_CASE("cdf limits and derivative") {
  CHECK(std::fabs(cdf(FadingModel::rayleigh(1.0), 40.0) - 1.0) < 1e-12);
  const double scale = std::sqrt(2.0);
  CHECK(cdf(FadingModel::weibull(2.0, scale), scale * std::sqrt(std::log(2.0))) == doctest::Approx(0.5).epsilon(1e-14));

  for (const auto& m : parameter_grid()) {
    CAPTURE(m.to_string());
    const double rms = std::sqrt(moment(m, m.family() == Family::f ? 1 : 2));
    double prev = 0.0;
    for (int i = 1; i <= 20; ++i) {
      const double x = rms * 0.12 * i;
      const double h = 1e-5 * rms;
      const double slope = (cdf(m, x + h) - cdf(m, x - h)) / (2.0 * h);
      CHECK(std::fabs(slope - pdf(m, x)) < 1e-5 * std::max(1.0, pdf(m, x)));
      const double c = cdf(m, x);
      CHECK(c >= prev);
      CHECK(c <= 1.0);
      prev = c;
    }
    CHECK(cdf(m, 0.0) == 0.0);
  }
}

TEST_CASE("K cdf against self-validating quadrature") {
  const auto m = FadingModel::k(2.0, 1.0);
  auto f = [&](double t) { return oracle::k_mixture_pdf(2.0, 1.0, t); };
  const double coarse = oracle::integrate(f, 0.0, 3.0, 1e-11);
  const double fine = oracle::integrate(f, 0.0, 1.5, 5e-12) + oracle::integrate(f, 1.5, 3.0, 5e-12);
  CHECK(std::fabs(coarse - fine) < 1e-9);
  CHECK(std::fabs(cdf(m, 3.0) - fine) < 1e-9);
}

TEST_CASE("cdf_sorted agrees with pointwise cdf") {
  std::vector<double> xs;
  for (int i = 0; i < 60; ++i) xs.push_back(0.01 + 0.08 * i);
  for (const auto& m : parameter_grid()) {
    const auto bulk = cdf_sorted(m, xs);
    for (std::size_t i = 0; i < xs.size(); ++i) CHECK(std::fabs(bulk[i] - cdf(m, xs[i])) < 1e-10);
  }
  std::vector<double> bad = {1.0, 0.5};
  CHECK_THROWS_AS(cdf_sorted(FadingModel::kg(1.0, 2.0, 1.0), bad), Error);
}

TEST_CASE("K mixture and F compounding oracles") {
  for (double x = 0.05; x <= 8.0; x *= 1.3) {
    CAPTURE(x);
    for (auto [nu, c] : {std::pair{0.7793, 0.901}, std::pair{2.0, 1.0}, std::pair{4.5, 2.5}}) {
      CHECK(rel(pdf(FadingModel::k(nu, c), x), oracle::k_mixture_pdf(nu, c, x)) < 1e-8);
    }
    for (auto [m, ms, om] : {std::tuple{1.0, 2.0, 1.0}, std::tuple{2.0, 3.0, 2.0}, std::tuple{3.0, 1.5, 1.0}}) {
      CHECK(rel(pdf(FadingModel::f(m, ms, om), x), oracle::f_compound_pdf(m, ms, om, x)) < 1e-8);
    }
  }
}

TEST_CASE("moments") {
  CHECK(rel(moment(FadingModel::rayleigh(1.7), 2), 2.0 * 1.7 * 1.7) < 1e-14);
  CHECK(rel(moment(FadingModel::nakagami(2.3, 0.6), 2), 0.6) < 1e-14);
  const double k2 = oracle::integrate_log_axis([](double x) { return x * x * oracle::k_mixture_pdf(3.0, 2.0, x); },
                                               -20.0, 4.0, 1e-15);
  CHECK(rel(moment(FadingModel::k(3.0, 2.0), 2), k2) < 1e-8);
  CHECK(rel(moment(FadingModel::k(3.0, 2.0), 2), 4.0 * 3.0 / 4.0) < 1e-13);
  CHECK(rel(moment(FadingModel::kg(1.4, 2.2, 0.7), 2), 0.7) < 1e-13);
  CHECK(rel(moment(FadingModel::f(2.0, 3.0, 1.0), 2), 3.0 / 2.0) < 1e-13);
  CHECK_THROWS_AS(moment(FadingModel::f(1.0, 1.0, 1.0), 2), Error);
  CHECK_NOTHROW(moment(FadingModel::f(1.0, 1.0, 1.0), 1));

  for (const auto& m : parameter_grid()) {
    for (int order : {1, 2, 3}) {
      if (m.family() == Family::f && m.as<FParams>().ms <= 0.5 * order + 0.5) continue;
      CAPTURE(m.to_string());
      CAPTURE(order);
      const double q = oracle::integrate_log_axis([&](double x) { return std::pow(x, order) * pdf(m, x); }, -40.0,
                                                  12.0, 1e-15);
      CHECK(rel(moment(m, order), q) < 1e-6);
    }
  }
}

TEST_CASE("sampling reproducibility and moments") {
  RandomStream a(42), b(42);
  const auto sa = sample(FadingModel::kg(1.0, 2.0, 2.0), 1000, a);
  const auto sb = sample(FadingModel::kg(1.0, 2.0, 2.0), 1000, b);
  CHECK(sa.values() == sb.values());
  CHECK_THROWS_AS(sample(FadingModel::rayleigh(1.0), 0, a), Error);

  RandomStream rng(7);
  const auto ray = sample(FadingModel::rayleigh(1.0), 1000000, rng);
  double m2 = 0.0;
  for (double v : ray.values()) m2 += v * v;
  CHECK(std::fabs(m2 / ray.size() - 2.0) < 0.01);

  const auto fm = FadingModel::f(2.0, 3.0, 1.0);
  const auto fs = sample(fm, 1000000, rng);
  double s1 = 0.0, s2 = 0.0;
  for (double v : fs.values()) {
    s1 += v * v;
    s2 += v * v * v * v;
  }
  const double n = fs.size();
  const double mean = s1 / n;
  const double se = std::sqrt((s2 / n - mean * mean) / n);
  const double oracle_m2 =
      oracle::integrate_log_axis([](double x) { return x * x * oracle::f_compound_pdf(2.0, 3.0, 1.0, x); }, -20.0,
                                 10.0, 1e-15);
  CHECK(std::fabs(mean - oracle_m2) < 3.0 * se);
}

TEST_CASE("KG sampler against inverse-cdf sampling") {
  const auto m = FadingModel::kg(1.0, 2.0, 2.0);
  // Tabulated inverse cdf on a dense grid.
  std::vector<double> grid;
  for (int i = 0; i <= 40000; ++i) grid.push_back(12.0 * i / 40000.0);
  const auto table = cdf_sorted(m, grid);
  RandomStream rng(99);
  std::vector<double> inverse(200000);
  for (double& v : inverse) {
    const double u = rng.uniform();
    const auto it = std::lower_bound(table.begin(), table.end(), u);
    const std::size_t j = std::clamp<std::size_t>(it - table.begin(), 1, table.size() - 1);
    const double t = (u - table[j - 1]) / std::max(table[j] - table[j - 1], 1e-300);
    v = grid[j - 1] + t * (grid[j] - grid[j - 1]);
  }
  const auto drawn = sample(m, 1000000, rng);
  const double n1 = drawn.size(), n2 = inverse.size();
  const double critical = 1.628 * std::sqrt((n1 + n2) / (n1 * n2));
  CHECK(two_sample_ks(drawn.values(), inverse) < critical);
}

TEST_CASE("sampling consistency against own cdf") {
  RandomStream root(2024);
  std::uint64_t key = 0;
  for (const auto& m : parameter_grid()) {
    auto rng = root.substream(key++);
    const auto s = sample(m, 100000, rng);
    CAPTURE(m.to_string());
    CHECK(ks_distance(s.values(), m) < 1.628 / std::sqrt(100000.0));
  }
}

TEST_CASE("KG reductions") {
  const auto to_k = reduce_kg(FadingModel::kg(1.0, 1.5, 1.0), Family::k);
  CHECK(to_k.exact);
  CHECK(to_k.model.family() == Family::k);
  CHECK(to_k.max_rel_gap <= 1e-9);

  const auto to_n = reduce_kg(FadingModel::kg(2.0, 1e4, 1.0), Family::nakagami);
  CHECK(to_n.model == FadingModel::nakagami(2.0, 1.0));
  CHECK(to_n.sup_abs_gap <= 1e-3);

  try {
    reduce_kg(FadingModel::kg(2.0, 1.0, 1.0), Family::k);
    FAIL("expected not_reducible");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::not_reducible);
  }
  CHECK_THROWS_AS(reduce_kg(FadingModel::rayleigh(1.0), Family::k), Error);
}

TEST_CASE("KG is symmetric in its two shapes") {
  const auto a = FadingModel::kg(1.3, 2.6, 1.1);
  const auto b = FadingModel::kg(2.6, 1.3, 1.1);
  for (double x = 0.05; x < 5.0; x += 0.3) CHECK(rel(pdf(a, x), pdf(b, x)) < 1e-12);
}

TEST_CASE("K tends to Rayleigh at fixed power") {
  const double omega = 1.0;
  double prev = std::numeric_limits<double>::infinity();
  for (double nu : {5.0, 10.0, 20.0, 40.0, 80.0}) {
    const auto km = FadingModel::k(nu, 2.0 * std::sqrt(nu / omega));
    const auto ray = FadingModel::rayleigh(std::sqrt(omega / 2.0));
    double sup = 0.0;
    for (int i = 1; i <= 2000; ++i) {
      const double x = 4.0 * i / 2000.0;
      sup = std::max(sup, std::fabs(pdf(km, x) - pdf(ray, x)));
    }
    CHECK(sup <= prev);
    prev = sup;
  }
  CHECK(prev < 0.01);
}

TEST_CASE("sum_log_pdf matches pointwise log_pdf") {
  RandomStream rng(5);
  for (const auto& m : parameter_grid()) {
    auto s = sample(m, 200, rng).values();
    s.push_back(0.0);
    double direct = 0.0;
    for (double x : s) direct += log_pdf(m, x);
    CAPTURE(m.to_string());
    if (std::isinf(direct)) {
      CHECK(sum_log_pdf(m, s) == direct);
    } else {
      CHECK(sum_log_pdf(m, s) == doctest::Approx(direct).epsilon(1e-12));
    }
  }
}
