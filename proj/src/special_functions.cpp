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

#include "fadestat/special_functions.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>

#include "fadestat/error.hpp"

namespace fadestat {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEps = 1e-16;
constexpr double kLn2 = std::numbers::ln2;
constexpr int kMaxIter = 10000;

// Orders above this use the Debye uniform expansion instead of recurrence.
constexpr double kDebyeOrder = 100.0;

void require_positive(double x, const char* fn) {
  if (!(x > 0.0) || std::isnan(x)) {
    fail(ErrorKind::domain, std::string(fn) + ": argument must be positive, got " + std::to_string(x));
  }
}

// ln K_mu(x) and ln K_{mu+1}(x) for |mu| <= 1/2 and x <= 2 (Temme's series).
void temme_series(const BesselKOrder::TemmeConstants& tc, double mu, double x, double& lk0, double& lk1) {
  const double x2 = 0.5 * x;
  double d = -std::log(x2);
  double e = mu * d;
  const double fact2 = std::fabs(e) < kEps ? 1.0 : std::sinh(e) / e;

  double ff = tc.fact * (tc.gam1 * std::cosh(e) + tc.gam2 * fact2 * d);
  double sum = ff;
  e = std::exp(e);
  double p = 0.5 * e / tc.gampl;
  double q = 0.5 / (e * tc.gammi);
  double c = 1.0;
  d = x2 * x2;
  double sum1 = p;
  const double mu2 = mu * mu;
  for (int i = 1; i <= kMaxIter; ++i) {
    const double di = i;
    ff = (di * ff + p + q) / (di * di - mu2);
    c *= d / di;
    p /= di - mu;
    q /= di + mu;
    const double del = c * ff;
    sum += del;
    sum1 += c * (p - di * ff);
    if (std::fabs(del) < std::fabs(sum) * kEps) break;
  }
  lk0 = std::log(sum);
  lk1 = std::log(sum1) + kLn2 - std::log(x);
}

// ln K_mu(x) and ln K_{mu+1}(x) for |mu| <= 1/2 and x > 2 (Steed's CF2).
void steed_cf2(double mu, double x, double& lk0, double& lk1) {
  const double mu2 = mu * mu;
  double b = 2.0 * (1.0 + x);
  double d = 1.0 / b;
  double h = d;
  double delh = d;
  double q1 = 0.0;
  double q2 = 1.0;
  const double a1 = 0.25 - mu2;
  double q = a1;
  double c = a1;
  double a = -a1;
  double s = 1.0 + q * delh;
  for (int i = 2; i <= kMaxIter; ++i) {
    a -= 2.0 * (i - 1);
    c = -a * c / i;
    const double qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2.0;
    d = 1.0 / (b + a * d);
    delh = (b * d - 1.0) * delh;
    h += delh;
    const double dels = q * delh;
    s += dels;
    if (std::fabs(dels / s) < kEps) break;
  }
  h = a1 * h;
  lk0 = 0.5 * std::log(kPi / (2.0 * x)) - x - std::log(s);
  lk1 = lk0 + std::log((mu + x + 0.5 - h) / x);
}

// Debye uniform asymptotic expansion of ln K_nu(x) for large nu.
double debye_ln_k(double nu, double x) {
  const double z = x / nu;
  const double sq = std::sqrt(1.0 + z * z);
  const double p = 1.0 / sq;
  const double eta = sq + std::log(z) - std::log1p(sq);
  const double p2 = p * p;
  const double u1 = p * (3.0 - 5.0 * p2) / 24.0;
  const double u2 = p2 * (81.0 + p2 * (-462.0 + p2 * 385.0)) / 1152.0;
  const double u3 = p * p2 * (30375.0 + p2 * (-369603.0 + p2 * (765765.0 - p2 * 425425.0))) / 414720.0;
  const double u4 =
      p2 * p2 *
      (4465125.0 + p2 * (-94121676.0 + p2 * (349922430.0 + p2 * (-446185740.0 + p2 * 185910725.0)))) /
      39813120.0;
  const double inv = 1.0 / nu;
  const double series = 1.0 + inv * (-u1 + inv * (u2 + inv * (-u3 + inv * u4)));
  return 0.5 * std::log(kPi / (2.0 * nu)) - nu * eta - 0.5 * std::log(sq) + std::log(series);
}

}  // namespace

double gamma_fn(double x) {
  require_positive(x, "gamma_fn");
  if (x > 171.6243769563027) fail(ErrorKind::overflow, "gamma_fn: overflow for x = " + std::to_string(x));
  return std::tgamma(x);
}

double ln_gamma(double x) {
  require_positive(x, "ln_gamma");
  int sign = 0;
  return ::lgamma_r(x, &sign);
}

double ln_beta(double a, double b) {
  require_positive(a, "beta_fn");
  require_positive(b, "beta_fn");
  return ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b);
}

double beta_fn(double a, double b) { return std::exp(ln_beta(a, b)); }

BesselKOrder::BesselKOrder(double nu) : nu_(std::fabs(nu)) {
  if (std::isnan(nu)) fail(ErrorKind::domain, "bessel_k: order is NaN");
  debye_ = nu_ > kDebyeOrder;
  if (debye_) return;
  nl_ = static_cast<int>(nu_ + 0.5);
  mu_ = nu_ - nl_;
  // 1/Gamma(1 +- mu) and the two combinations Temme needs; gam1 is formed
  // from Gamma(1+x)-1 so it stays accurate as mu -> 0.
  const double pimu = kPi * mu_;
  temme_.fact = std::fabs(pimu) < kEps ? 1.0 : pimu / std::sin(pimu);
  const double gp = boost::math::tgamma1pm1(mu_);
  const double gm = boost::math::tgamma1pm1(-mu_);
  temme_.gampl = 1.0 / (1.0 + gp);
  temme_.gammi = 1.0 / (1.0 + gm);
  temme_.gam1 = std::fabs(mu_) < kEps ? -std::numbers::egamma : (gp - gm) / (2.0 * mu_ * (1.0 + gp) * (1.0 + gm));
  temme_.gam2 = 0.5 * (temme_.gammi + temme_.gampl);
}

double BesselKOrder::ln_k(double x) const {
  require_positive(x, "bessel_k");
  if (std::isinf(x)) return -std::numeric_limits<double>::infinity();
  if (debye_) return debye_ln_k(nu_, x);

  double lk0 = 0.0;
  double lk1 = 0.0;
  if (x <= 2.0) {
    temme_series(temme_, mu_, x, lk0, lk1);
  } else {
    steed_cf2(mu_, x, lk0, lk1);
  }
  if (nl_ == 0) return lk0;

  // Upward recurrence K_{v+1} = K_{v-1} + (2v/x) K_v.
  if (x >= 1e-100) {
    // Plain recurrence on values scaled by exp(-scale); one step grows by at
    // most 2v/x + 1 < 1e103, so rescaling at 1e200 cannot overflow.
    double scale = lk1;
    double k0 = std::exp(lk0 - lk1);
    double k1 = 1.0;
    const double xi2 = 2.0 / x;
    for (int i = 1; i < nl_; ++i) {
      const double kt = (mu_ + i) * xi2 * k1 + k0;
      k0 = k1;
      k1 = kt;
      if (k1 > 1e200) {
        k0 *= 1e-200;
        k1 *= 1e-200;
        scale += 200.0 * std::numbers::ln10;
      }
    }
    return std::log(k1) + scale;
  }
  // Tiny arguments: carry the ratio q = K_{v-1}/K_v <= 1 and a running
  // logarithm so that 2v/x never has to be formed.
  double lk = lk1;
  double q = std::exp(lk0 - lk1);
  const double lx = std::log(x);
  for (int i = 1; i < nl_; ++i) {
    const double v = mu_ + i;
    const double lt = std::log(2.0 * v) - lx + std::log1p(q * x / (2.0 * v));
    lk += lt;
    q = std::exp(-lt);
  }
  return lk;
}

double ln_bessel_k(double nu, double x) {
  require_positive(x, "bessel_k");
  return BesselKOrder(nu).ln_k(x);
}

double bessel_k(double nu, double x) { return std::exp(ln_bessel_k(nu, x)); }

double ln_bessel_i0(double x) {
  if (!(x >= 0.0)) fail(ErrorKind::domain, "ln_bessel_i0: argument must be non-negative");
  if (x < 700.0) return std::log(boost::math::cyl_bessel_i(0, x));
  const double r = 1.0 / (8.0 * x);
  const double series = 1.0 + r * (1.0 + r * (4.5 + r * 37.5));
  return x - 0.5 * std::log(2.0 * kPi * x) + std::log(series);
}

double digamma(double x) {
  require_positive(x, "digamma");
  return boost::math::digamma(x);
}

double trigamma(double x) {
  require_positive(x, "trigamma");
  return boost::math::trigamma(x);
}

double gamma_p(double a, double x) {
  require_positive(a, "gamma_p");
  if (x <= 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  return boost::math::gamma_p(a, x);
}

double beta_inc(double a, double b, double x) {
  require_positive(a, "beta_inc");
  require_positive(b, "beta_inc");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return boost::math::ibeta(a, b, x);
}

}  // namespace fadestat
