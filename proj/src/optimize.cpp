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

#include "fadestat/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace fadestat {

namespace {

double safe_eval(const Objective& f, std::span<const double> x) {
  const double v = f(x);
  return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
}

}  // namespace

NelderMeadResult nelder_mead(const Objective& f, std::vector<double> x0, const NelderMeadOptions& options) {
  const std::size_t dim = x0.size();
  const std::size_t cap = options.max_iterations > 0 ? options.max_iterations : 200 * dim;
  NelderMeadResult result;

  std::vector<std::vector<double>> simplex(dim + 1, x0);
  for (std::size_t i = 0; i < dim; ++i) simplex[i + 1][i] += options.initial_step;
  std::vector<double> values(dim + 1);
  for (std::size_t i = 0; i <= dim; ++i) values[i] = safe_eval(f, simplex[i]);
  result.evaluations = dim + 1;

  std::vector<std::size_t> order(dim + 1);
  std::vector<double> centroid(dim), trial(dim), trial2(dim);
  auto point = [&](double t, std::vector<double>& out) {
    // centroid + t * (centroid - worst)
    const auto& worst = simplex[order[dim]];
    for (std::size_t j = 0; j < dim; ++j) out[j] = centroid[j] + t * (centroid[j] - worst[j]);
  };

  for (result.iterations = 0; result.iterations < cap; ++result.iterations) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    // Stable ordering keeps ties deterministic.
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    const double best = values[order[0]];
    const double worst = values[order[dim]];
    if (std::isfinite(worst) && worst - best <= options.rel_tol * std::max(1.0, std::fabs(best))) {
      result.converged = true;
      break;
    }

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i < dim; ++i) {
      for (std::size_t j = 0; j < dim; ++j) centroid[j] += simplex[order[i]][j];
    }
    for (double& c : centroid) c /= static_cast<double>(dim);

    point(1.0, trial);
    const double fr = safe_eval(f, trial);
    ++result.evaluations;
    const double second_worst = values[order[dim - 1]];
    if (fr < best) {
      point(2.0, trial2);
      const double fe = safe_eval(f, trial2);
      ++result.evaluations;
      if (fe < fr) {
        simplex[order[dim]] = trial2;
        values[order[dim]] = fe;
      } else {
        simplex[order[dim]] = trial;
        values[order[dim]] = fr;
      }
      continue;
    }
    if (fr < second_worst) {
      simplex[order[dim]] = trial;
      values[order[dim]] = fr;
      continue;
    }
    // Outside contraction when the reflection improved on the worst point,
    // inside contraction otherwise.
    const bool outside = fr < worst;
    point(outside ? 0.5 : -0.5, trial2);
    const double fc = safe_eval(f, trial2);
    ++result.evaluations;
    if (fc < (outside ? fr : worst)) {
      simplex[order[dim]] = trial2;
      values[order[dim]] = fc;
      continue;
    }
    // Shrink towards the best vertex.
    const auto& xb = simplex[order[0]];
    for (std::size_t i = 1; i <= dim; ++i) {
      auto& v = simplex[order[i]];
      for (std::size_t j = 0; j < dim; ++j) v[j] = xb[j] + 0.5 * (v[j] - xb[j]);
      values[order[i]] = safe_eval(f, v);
    }
    result.evaluations += dim;
  }

  const auto best_it = std::min_element(values.begin(), values.end());
  result.x = simplex[static_cast<std::size_t>(best_it - values.begin())];
  result.value = *best_it;
  return result;
}

}  // namespace fadestat
