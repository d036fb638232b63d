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

#ifndef FADESTAT_DENSITY_ESTIMATION_HPP
#define FADESTAT_DENSITY_ESTIMATION_HPP

#include <cstddef>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "fadestat/fading_models.hpp"

namespace fadestat {

/// Kernels normalized to unit second moment, so one bandwidth rule serves all.
enum class KernelKind { epanechnikov, triangular, boxcar };

std::string_view to_string(KernelKind kind) noexcept;

/// (3 / (4 sqrt 5)) (1 - t^2 / 5) on |t| <= sqrt 5.
double epanechnikov(double t) noexcept;
double kernel_value(KernelKind kind, double t) noexcept;
/// Half-width of the kernel's support.
double kernel_support(KernelKind kind) noexcept;
/// Integral of K(t)^2.
double kernel_roughness(KernelKind kind) noexcept;
/// Integral of K over (-inf, t].
double kernel_cdf(KernelKind kind, double t) noexcept;

/// Scale estimate of the normal-reference pilot: min(sd, IQR / 1.349).
double pilot_scale(const SampleSet& data);

/// MISE-optimal bandwidth with ∫f''^2 taken from a normal density of scale
/// pilot_scale(data): h = R(K)^(1/5) (∫f''^2)^(-1/5) n^(-1/5).
/// Throws ErrorKind::invalid_parameter below 20 samples and
/// ErrorKind::degenerate_data for zero spread.
double optimal_bandwidth(const SampleSet& data, KernelKind kind = KernelKind::epanechnikov);

struct Interval {
  double lo;
  double hi;
};

/// Immutable kernel density estimate.
class KernelDensity {
 public:
  /// Throws ErrorKind::invalid_parameter for a non-positive bandwidth.
  KernelDensity(const SampleSet& data, double bandwidth, KernelKind kind = KernelKind::epanechnikov);
  /// Uses optimal_bandwidth(data, kind).
  explicit KernelDensity(const SampleSet& data, KernelKind kind = KernelKind::epanechnikov);

  double operator()(double x) const noexcept;
  double bandwidth() const noexcept { return h_; }
  KernelKind kind() const noexcept { return kind_; }
  const std::vector<double>& centers() const noexcept { return centers_; }

  /// Hull of the centers widened by 5h, lower end clipped at 0.
  Interval support() const noexcept;

  /// Exact mass of the estimate on [range.lo, range.hi].
  double mass(Interval range) const noexcept;

 private:
  std::vector<double> centers_;
  double h_;
  KernelKind kind_;
  double reach_;
};

using Density = std::function<double(double)>;

/// Floor applied to q inside kld().
inline constexpr double kDensityFloor = 1e-300;

struct KldResult {
  double value;
  /// q was below kDensityFloor somewhere p was positive.
  bool floored = false;
};

/// ∫ p ln(p / q) over the support (natural log), by adaptive Gauss-Kronrod
/// quadrature on panels of at most `panel_width` (whole support if <= 0).
/// Throws ErrorKind::support_mismatch when p puts >= 1e-6 mass where q is
/// below kDensityFloor.
KldResult kld(const Density& p, const Density& q, Interval support, double panel_width = 0.0);

/// kld with p the kernel estimate and q the model pdf, over kd.support().
/// The estimate is rescaled to unit mass on the support, since clipping at 0
/// removes the part of the kernels that falls below the origin.
KldResult kld(const KernelDensity& kd, const FadingModel& model);

/// -20 log10(kld_value); +inf for 0. Throws ErrorKind::domain for negative input.
double kld_score(double kld_value);

struct CurvePoint {
  double x;
  double density;
};

/// Estimate at `points` evenly spaced abscissae across kd.support().
std::vector<CurvePoint> kde_curve(const KernelDensity& kd, std::size_t points = 501);

}  // namespace fadestat

#endif  // FADESTAT_DENSITY_ESTIMATION_HPP
