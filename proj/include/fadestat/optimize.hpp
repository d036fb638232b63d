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

#ifndef FADESTAT_OPTIMIZE_HPP
#define FADESTAT_OPTIMIZE_HPP

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace fadestat {

using Objective = std::function<double(std::span<const double>)>;

struct NelderMeadOptions {
  /// Stop when the simplex values spread by less than rel_tol * max(1, |f_best|).
  double rel_tol = 1e-8;
  /// Iteration cap; 0 selects 200 * dimension.
  std::size_t max_iterations = 0;
  /// Edge length of the initial simplex, per coordinate.
  double initial_step = 0.1;
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  bool converged = false;
  std::size_t iterations = 0;
  std::size_t evaluations = 0;
};

/// Derivative-free minimization (Nelder-Mead with the standard coefficients).
/// Non-finite objective values are treated as +inf, so infeasible regions can
/// be expressed by returning infinity.
NelderMeadResult nelder_mead(const Objective& f, std::vector<double> x0, const NelderMeadOptions& options = {});

}  // namespace fadestat

#endif  // FADESTAT_OPTIMIZE_HPP
