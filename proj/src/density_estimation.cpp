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

#include "fadestat/density_estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "fadestat/error.hpp"

namespace fadestat {

namespace {

const double kSqrt3 = std::sqrt(3.0);
const double kSqrt5 = std::sqrt(5.0);
const double kSqrt6 = std::sqrt(6.0);

constexpr std::size_t kMinKdeSamples = 20;
constexpr double kMassTolerance = 1e-6;
constexpr unsigned kMaxDepth = 8;
constexpr double kQuadTolerance = 1e-8;

double quantile_sorted(const std::vector<double>& s, double p) {
  const double pos = p * static_cast<double>(s.size() - 1);
  const auto i = static_cast<std::size_t>(pos);
  if (i + 1 >= s.size()) return s.back();
  const double w = pos - static_cast<double>(i);
  return s[i] + w * (s[i + 1] - s[i]);
}

template <typename F>
double panel_integral(F&& f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, kMaxDepth, kQuadTolerance);
}

}  // namespace

std::string_view to_string(KernelKind kind) noexcept {
  switch (kind) {
    case KernelKind::epanechnikov: return "epanechnikov";
    case KernelKind::triangular: return "triangular";
    case KernelKind::boxcar: return "boxcar";
  }
  return "?";
}

double epanechnikov(double t) noexcept {
  const double t2 = t * t;
  return t2 <= 5.0 ? 3.0 / (4.0 * kSqrt5) * (1.0 - t2 / 5.0) : 0.0;
}

double kernel_value(KernelKind kind, double t) noexcept {
  const double a = std::fabs(t);
  switch (kind) {
    case KernelKind::epanechnikov: return epanechnikov(t);
    case KernelKind::triangular: return a <= kSqrt6 ? (1.0 - a / kSqrt6) / kSqrt6 : 0.0;
    case KernelKind::boxcar: return a <= kSqrt3 ? 0.5 / kSqrt3 : 0.0;
  }
  return 0.0;
}

double kernel_support(KernelKind kind) noexcept {
  switch (kind) {
    case KernelKind::epanechnikov: return kSqrt5;
    case KernelKind::triangular: return kSqrt6;
    case KernelKind::boxcar: return kSqrt3;
  }
  return 0.0;
}

double kernel_roughness(KernelKind kind) noexcept {
  switch (kind) {
    case KernelKind::epanechnikov: return 3.0 / (5.0 * kSqrt5);
    case KernelKind::triangular: return 2.0 / (3.0 * kSqrt6);
    case KernelKind::boxcar: return 0.5 / kSqrt3;
  }
  return 0.0;
}

double kernel_cdf(KernelKind kind, double t) noexcept {
  const double s = kernel_support(kind);
  if (t <= -s) return 0.0;
  if (t >= s) return 1.0;
  switch (kind) {
    case KernelKind::epanechnikov: return 0.5 + 3.0 / (4.0 * kSqrt5) * (t - t * t * t / 15.0);
    case KernelKind::triangular: {
      const double a = s - std::fabs(t);
      const double tail = a * a / (2.0 * s * s);
      return t <= 0.0 ? tail : 1.0 - tail;
    }
    case KernelKind::boxcar: return (t + s) / (2.0 * s);
  }
  return 0.0;
}

double pilot_scale(const SampleSet& data) {
  const auto& v = data.values();
  const double n = static_cast<double>(v.size());
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= n;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  const double sd = v.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  const auto s = data.sorted();
  const double iqr = quantile_sorted(s, 0.75) - quantile_sorted(s, 0.25);
  const double robust = iqr / 1.349;
  return robust > 0.0 ? std::min(sd, robust) : sd;
}

double optimal_bandwidth(const SampleSet& data, KernelKind kind) {
  if (data.size() < kMinKdeSamples) {
    fail(ErrorKind::invalid_parameter, "optimal_bandwidth needs at least 20 samples, got " + std::to_string(data.size()));
  }
  const double s = pilot_scale(data);
  if (!(s > 0.0)) fail(ErrorKind::degenerate_data, "optimal_bandwidth: data have zero spread");
  // Normal reference: ∫ f''^2 = 3 / (8 sqrt(pi) s^5); k2 = 1 for every kernel here.
  const double curvature = 3.0 / (8.0 * std::sqrt(std::numbers::pi) * std::pow(s, 5));
  const double n = static_cast<double>(data.size());
  return std::pow(kernel_roughness(kind) / curvature, 0.2) * std::pow(n, -0.2);
}

KernelDensity::KernelDensity(const SampleSet& data, double bandwidth, KernelKind kind)
    : centers_(data.sorted()), h_(bandwidth), kind_(kind), reach_(kernel_support(kind) * bandwidth) {
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) {
    fail(ErrorKind::invalid_parameter, "KernelDensity: bandwidth must be positive");
  }
}

KernelDensity::KernelDensity(const SampleSet& data, KernelKind kind)
    : KernelDensity(data, optimal_bandwidth(data, kind), kind) {}

double KernelDensity::operator()(double x) const noexcept {
  const auto first = std::lower_bound(centers_.begin(), centers_.end(), x - reach_);
  const auto last = std::upper_bound(first, centers_.end(), x + reach_);
  const double inv_h = 1.0 / h_;
  double sum = 0.0;
  for (auto it = first; it != last; ++it) sum += kernel_value(kind_, (x - *it) * inv_h);
  return sum * inv_h / static_cast<double>(centers_.size());
}

Interval KernelDensity::support() const noexcept {
  return {std::max(0.0, centers_.front() - 5.0 * h_), centers_.back() + 5.0 * h_};
}

double KernelDensity::mass(Interval range) const noexcept {
  double sum = 0.0;
  for (double c : centers_) sum += kernel_cdf(kind_, (range.hi - c) / h_) - kernel_cdf(kind_, (range.lo - c) / h_);
  return sum / static_cast<double>(centers_.size());
}

KldResult kld(const Density& p, const Density& q, Interval support, double panel_width) {
  if (!(support.hi > support.lo)) fail(ErrorKind::invalid_parameter, "kld: empty support");
  const double width = support.hi - support.lo;
  const auto panels =
      panel_width > 0.0 ? static_cast<std::size_t>(std::ceil(width / panel_width)) : std::size_t{1};
  const double step = width / static_cast<double>(panels);

  bool floored = false;
  const auto term = [&](double x) {
    const double pv = p(x);
    if (!(pv > 0.0)) return 0.0;
    double qv = q(x);
    if (!(qv >= kDensityFloor)) {
      floored = true;
      qv = kDensityFloor;
    }
    return pv * (std::log(pv) - std::log(qv));
  };

  double total = 0.0;
  for (std::size_t i = 0; i < panels; ++i) {
    const double a = support.lo + step * static_cast<double>(i);
    const double b = i + 1 == panels ? support.hi : a + step;
    total += panel_integral(term, a, b);
  }

  if (floored) {
    double orphan = 0.0;
    const auto mass = [&](double x) {
      const double qv = q(x);
      return qv >= kDensityFloor ? 0.0 : std::max(p(x), 0.0);
    };
    for (std::size_t i = 0; i < panels; ++i) {
      const double a = support.lo + step * static_cast<double>(i);
      orphan += panel_integral(mass, a, i + 1 == panels ? support.hi : a + step);
    }
    if (orphan >= kMassTolerance) {
      fail(ErrorKind::support_mismatch,
           "kld: reference density has mass " + std::to_string(orphan) + " where the candidate vanishes");
    }
  }
  return {total, floored};
}

KldResult kld(const KernelDensity& kd, const FadingModel& model) {
  const Interval support = kd.support();
  const double scale = 1.0 / kd.mass(support);
  return kld([&kd, scale](double x) { return scale * kd(x); }, [&model](double x) { return pdf(model, x); }, support,
             kd.bandwidth());
}

double kld_score(double kld_value) {
  if (kld_value < 0.0 || std::isnan(kld_value)) fail(ErrorKind::domain, "kld_score: divergence must be non-negative");
  if (kld_value == 0.0) return std::numeric_limits<double>::infinity();
  return -20.0 * std::log10(kld_value);
}

std::vector<CurvePoint> kde_curve(const KernelDensity& kd, std::size_t points) {
  if (points < 2) fail(ErrorKind::invalid_parameter, "kde_curve needs at least two points");
  const Interval s = kd.support();
  std::vector<CurvePoint> out(points);
  for (std::size_t i = 0; i < points; ++i) {
    const double x = s.lo + (s.hi - s.lo) * static_cast<double>(i) / static_cast<double>(points - 1);
    out[i] = {x, kd(x)};
  }
  return out;
}

}  // namespace fadestat
