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

#ifndef FADESTAT_MLE_FITTING_HPP
#define FADESTAT_MLE_FITTING_HPP

#include <cstddef>
#include <optional>
#include <span>

#include "fadestat/fading_models.hpp"

namespace fadestat {

struct FitOptions {
  /// Start the numerical search here instead of at the moment-based point.
  /// Used by the bootstrap, which refits data drawn from a known model.
  std::optional<FadingModel> start;
  /// Relative tolerance on the per-sample negative log-likelihood.
  double rel_tol = 1e-8;
};

struct FitResult {
  FadingModel model;
  double log_likelihood;
  bool converged;
  std::size_t iterations;
  /// Starting point of the search (method-of-moments for most families).
  FadingModel init;
  /// Zero-valued samples removed before fitting.
  std::size_t dropped_zeros;
};

/// Minimum number of positive samples accepted by fit().
inline constexpr std::size_t kMinFitSamples = 20;

/// Sum of ln pdf over the data; -inf if any sample has zero density.
double log_likelihood(const FadingModel& model, const SampleSet& data);

/// Maximum-likelihood fit. Rayleigh is closed form; Weibull, Gamma and
/// Nakagami solve their one-dimensional likelihood equations; Rician, K, F and
/// KG are maximized numerically over log-parameters.
/// Throws ErrorKind::degenerate_data when all values coincide and
/// ErrorKind::invalid_parameter with fewer than kMinFitSamples positive values.
FitResult fit(Family family, const SampleSet& data, const FitOptions& options = {});
FitResult fit(Family family, std::span<const double> values, const FitOptions& options = {});

}  // namespace fadestat

#endif  // FADESTAT_MLE_FITTING_HPP
