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

#include "fadestat/mle_fitting.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "fadestat/error.hpp"
#include "fadestat/optimize.hpp"
#include "fadestat/special_functions.hpp"

namespace fadestat {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Log-parameters are kept inside this box; beyond it the objective is +inf.
constexpr double kLogBound = 30.0;
// Shape parameters past this are indistinguishable from their limiting
// family (Rayleigh for K, Nakagami for KG and F) at any realistic n.
constexpr double kMaxLogShape = 11.5;

// Summary statistics of the data after scaling to unit mean square.
struct Moments {
  std::size_t n = 0;
  double mean = 0.0;     // E[y]
  double m4 = 0.0;       // E[y^4]
  double mean_ln = 0.0;  // E[ln y]
  double var_ln2 = 0.0;  // Var[ln y^2]
};

Moments moments_of(std::span<const double> y) {
  Moments m;
  m.n = y.size();
  const double n = static_cast<double>(y.size());
  for (double v : y) {
    m.mean += v;
    m.m4 += v * v * v * v;
    m.mean_ln += std::log(v);
  }
  m.mean /= n;
  m.m4 /= n;
  m.mean_ln /= n;
  for (double v : y) {
    const double d = 2.0 * (std::log(v) - m.mean_ln);
    m.var_ln2 += d * d;
  }
  m.var_ln2 /= n;
  return m;
}

// Root of a monotone function on (lo, hi), widening the bracket geometrically
// until the sign changes.
template <typename F>
double solve_monotone(F f, double lo, double hi, std::size_t& iterations) {
  double flo = f(lo);
  double fhi = f(hi);
  for (int i = 0; i < 60 && flo * fhi > 0.0; ++i) {
    if (std::fabs(flo) < std::fabs(fhi)) {
      lo *= 0.1;
      flo = f(lo);
    } else {
      hi *= 10.0;
      fhi = f(hi);
    }
  }
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if (flo * fhi > 0.0) return std::fabs(flo) < std::fabs(fhi) ? lo : hi;
  std::uintmax_t max_iter = 200;
  const auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, boost::math::tools::eps_tolerance<double>(52),
                                                   max_iter);
  iterations += static_cast<std::size_t>(max_iter);
  return 0.5 * (r.first + r.second);
}

// Solves ln k - digamma(k) = s for s > 0.
double solve_log_minus_digamma(double s, std::size_t& iterations) {
  const double guess = (3.0 - s + std::sqrt((s - 3.0) * (s - 3.0) + 24.0 * s)) / (12.0 * s);
  return solve_monotone([s](double k) { return std::log(k) - digamma(k) - s; }, 0.5 * guess, 2.0 * guess, iterations);
}

// Solves trigamma(x) = t for t > 0.
double inverse_trigamma(double t) {
  std::size_t unused = 0;
  const double guess = 0.5 + 1.0 / t;
  return solve_monotone([t](double x) { return trigamma(x) - t; }, 0.5 * guess, 2.0 * guess, unused);
}

FadingModel rescale(const FadingModel& m, double s) {
  return std::visit(
      [&](const auto& p) -> FadingModel {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, RayleighParams>) return FadingModel::rayleigh(p.sigma * s);
        if constexpr (std::is_same_v<P, RicianParams>) return FadingModel::rician(p.nu_los * s, p.sigma * s);
        if constexpr (std::is_same_v<P, NakagamiParams>) return FadingModel::nakagami(p.m, p.omega * s * s);
        if constexpr (std::is_same_v<P, WeibullParams>) return FadingModel::weibull(p.shape, p.scale * s);
        if constexpr (std::is_same_v<P, GammaParams>) return FadingModel::gamma(p.shape, p.scale * s);
        if constexpr (std::is_same_v<P, KParams>) return FadingModel::k(p.nu, p.c / s);
        if constexpr (std::is_same_v<P, FParams>) return FadingModel::f(p.m, p.ms, p.omega * s * s);
        if constexpr (std::is_same_v<P, KgParams>) return FadingModel::kg(p.m, p.k, p.omega * s * s);
      },
      m.params());
}

// Put KG into the canonical m <= k order (the density is symmetric in them).
FadingModel canonical(const FadingModel& m) {
  if (const auto* p = std::get_if<KgParams>(&m.params()); p != nullptr && p->m > p->k) {
    return FadingModel::kg(p->k, p->m, p->omega);
  }
  return m;
}

// ---- log-parameter maps for the numerically fitted families ----

std::vector<double> to_search(const FadingModel& m) {
  return std::visit(
      [](const auto& p) -> std::vector<double> {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, RicianParams>) return {std::log(p.nu_los), std::log(p.sigma)};
        if constexpr (std::is_same_v<P, KParams>) return {std::log(p.nu), std::log(p.c)};
        if constexpr (std::is_same_v<P, FParams>)
          return {std::log(std::max(p.m - 0.5, 1e-6)), std::log(p.ms), std::log(p.omega)};
        if constexpr (std::is_same_v<P, KgParams>) return {std::log(p.m), std::log(p.k), std::log(p.omega)};
        return {};
      },
      m.params());
}

std::optional<FadingModel> from_search(Family family, std::span<const double> u) {
  for (double v : u) {
    if (!(std::fabs(v) <= kLogBound)) return std::nullopt;
  }
  const bool shape_ok = family == Family::rician || family == Family::k ? u[0] <= kMaxLogShape
                                                                        : u[0] <= kMaxLogShape && u[1] <= kMaxLogShape;
  if (!shape_ok) return std::nullopt;
  switch (family) {
    case Family::rician: return FadingModel::rician(std::exp(u[0]), std::exp(u[1]));
    case Family::k: return FadingModel::k(std::exp(u[0]), std::exp(u[1]));
    case Family::f: return FadingModel::f(0.5 + std::exp(u[0]), std::exp(u[1]), std::exp(u[2]));
    case Family::kg: return FadingModel::kg(std::exp(u[0]), std::exp(u[1]), std::exp(u[2]));
    default: return std::nullopt;
  }
}

double mean_neg_loglik(const FadingModel& m, std::span<const double> y) {
  const double ll = sum_log_pdf(m, y);
  return std::isfinite(ll) ? -ll / static_cast<double>(y.size()) : kInf;
}

// ---- starting points (unit mean-square data) ----

std::vector<FadingModel> start_candidates(Family family, const Moments& mo) {
  std::vector<FadingModel> out;
  switch (family) {
    case Family::rician: {
      // E[y^2] = nu^2 + 2 s^2 = 1 and E[y^4] = nu^4 + 8 nu^2 s^2 + 8 s^4.
      const double nu4 = 2.0 - mo.m4;
      if (nu4 > 1e-4) {
        const double nu2 = std::min(std::sqrt(nu4), 0.999);
        out.push_back(FadingModel::rician(std::sqrt(nu2), std::sqrt(0.5 * (1.0 - nu2))));
      }
      for (double kf : {0.05, 0.5, 2.0, 8.0}) {
        out.push_back(FadingModel::rician(std::sqrt(kf / (kf + 1.0)), std::sqrt(0.5 / (kf + 1.0))));
      }
      break;
    }
    case Family::k: {
      // E[y^4] / E[y^2]^2 = 2 (nu + 1) / nu.
      const double ratio = mo.m4;
      const double nu = ratio > 2.02 ? std::clamp(2.0 / (ratio - 2.0), 0.05, 100.0) : 100.0;
      out.push_back(FadingModel::k(nu, 2.0 * std::sqrt(nu)));
      for (double g : {0.3, 1.0, 3.0, 10.0}) out.push_back(FadingModel::k(g, 2.0 * std::sqrt(g)));
      break;
    }
    case Family::f:
    case Family::kg: {
      // Log-moment matching: ln y^2 is a sum (F: difference) of log-gamma
      // variates, so its variance is a sum of trigammas.
      const double lm = 2.0 * mo.mean_ln;
      for (double m : {0.6, 1.0, 2.0, 4.0, 8.0}) {
        const double t = mo.var_ln2 - trigamma(m);
        const double other = t > 1e-4 ? std::clamp(inverse_trigamma(t), 0.3, 1e4) : 1e3;
        if (family == Family::kg) {
          // E[ln y^2] = ln(Omega / (m k)) + digamma(m) + digamma(k).
          const double omega = m * other * std::exp(lm - digamma(m) - digamma(other));
          out.push_back(FadingModel::kg(m, other, omega));
        } else {
          // E[ln y^2] = ln(ms Omega / m) + digamma(m) - digamma(ms).
          const double ms = std::max(other, 0.55);
          const double omega = m / ms * std::exp(lm - digamma(m) + digamma(ms));
          out.push_back(FadingModel::f(m, ms, omega));
        }
      }
      break;
    }
    default: break;
  }
  return out;
}

struct Fitted {
  FadingModel model;  // unit mean-square units
  FadingModel init;
  bool converged;
  std::size_t iterations;
};

Fitted fit_numerical(Family family, std::span<const double> y, const Moments& mo,
                     const std::optional<FadingModel>& warm, double rel_tol) {
  auto objective = [&](std::span<const double> u) {
    const auto m = from_search(family, u);
    if (!m) return kInf;
    try {
      return mean_neg_loglik(*m, y);
    } catch (const Error&) {
      return kInf;
    }
  };

  std::vector<FadingModel> candidates = warm ? std::vector<FadingModel>{*warm} : start_candidates(family, mo);
  std::size_t best = 0;
  double best_value = kInf;
  if (candidates.size() > 1) {
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      const double v = objective(to_search(candidates[i]));
      if (v < best_value) {
        best_value = v;
        best = i;
      }
    }
  }
  const FadingModel init = candidates[best];

  NelderMeadOptions opt;
  opt.rel_tol = rel_tol;
  opt.initial_step = warm ? 0.05 : 0.1;
  auto result = nelder_mead(objective, to_search(init), opt);
  std::size_t iterations = result.iterations;
  if (!result.converged) {
    opt.initial_step = 0.05;
    auto retry = nelder_mead(objective, result.x, opt);
    iterations += retry.iterations;
    if (retry.value <= result.value) result = retry;
  }
  if (!warm && result.converged) {
    // A fresh small simplex at the optimum guards against collapse onto a
    // non-stationary point.
    opt.initial_step = 0.02;
    auto polish = nelder_mead(objective, result.x, opt);
    iterations += polish.iterations;
    if (polish.value <= result.value) {
      result.x = polish.x;
      result.value = polish.value;
    }
    result.converged = polish.converged;
  }
  auto model = from_search(family, result.x);
  if (!model) model = init;
  return {*model, init, result.converged && std::isfinite(result.value), iterations};
}

Fitted fit_unit(Family family, std::span<const double> y, const std::optional<FadingModel>& warm, double rel_tol) {
  const Moments mo = moments_of(y);
  std::size_t iterations = 0;
  switch (family) {
    case Family::rayleigh: {
      const auto m = FadingModel::rayleigh(std::sqrt(0.5));
      return {m, m, true, 0};
    }
    case Family::nakagami: {
      // ln m - digamma(m) = ln E[y^2] - E[ln y^2], and Omega = E[y^2] = 1.
      const double s = -2.0 * mo.mean_ln;
      const double var2 = mo.m4 - 1.0;
      const auto init = FadingModel::nakagami(std::max(0.5, var2 > 0.0 ? 1.0 / var2 : 0.5), 1.0);
      const double m = s > 0.0 ? solve_log_minus_digamma(s, iterations) : 1e6;
      return {FadingModel::nakagami(std::max(m, 0.5), 1.0), init, true, iterations};
    }
    case Family::gamma: {
      const double s = std::log(mo.mean) - mo.mean_ln;
      const double var = 1.0 - mo.mean * mo.mean;
      const double k0 = var > 0.0 ? mo.mean * mo.mean / var : 1e6;
      const auto init = FadingModel::gamma(k0, mo.mean / k0);
      const double k = s > 0.0 ? solve_log_minus_digamma(s, iterations) : 1e6;
      return {FadingModel::gamma(k, mo.mean / k), init, true, iterations};
    }
    case Family::weibull: {
      const double ymax = *std::max_element(y.begin(), y.end());
      const double lmax = std::log(ymax);
      auto g = [&](double k) {
        double s0 = 0.0, s1 = 0.0;
        for (double v : y) {
          const double l = std::log(v);
          const double w = std::exp(k * (l - lmax));
          s0 += w;
          s1 += w * l;
        }
        return s1 / s0 - 1.0 / k - mo.mean_ln;
      };
      // Moment guess from the coefficient of variation of ln y.
      const double sd_ln = std::sqrt(mo.var_ln2) / 2.0;
      const double k0 = std::clamp(1.2825 / std::max(sd_ln, 1e-6), 0.05, 1e4);
      const auto init = FadingModel::weibull(k0, std::exp(mo.mean_ln + 0.5772156649015329 / k0));
      const double k = solve_monotone(g, 0.5 * k0, 2.0 * k0, iterations);
      double s0 = 0.0;
      for (double v : y) s0 += std::exp(k * (std::log(v) - lmax));
      const double scale = ymax * std::pow(s0 / static_cast<double>(y.size()), 1.0 / k);
      return {FadingModel::weibull(k, scale), init, true, iterations};
    }
    default: return fit_numerical(family, y, mo, warm, rel_tol);
  }
}

}  // namespace

double log_likelihood(const FadingModel& model, const SampleSet& data) { return sum_log_pdf(model, data.values()); }

FitResult fit(Family family, const SampleSet& data, const FitOptions& options) {
  return fit(family, std::span<const double>(data.values()), options);
}

FitResult fit(Family family, std::span<const double> values, const FitOptions& options) {
  std::vector<double> positive;
  positive.reserve(values.size());
  std::size_t zeros = 0;
  for (double v : values) {
    if (!(v >= 0.0) || !std::isfinite(v)) fail(ErrorKind::invalid_parameter, "fit: samples must be finite and >= 0");
    if (v == 0.0) {
      ++zeros;
    } else {
      positive.push_back(v);
    }
  }
  if (positive.size() < kMinFitSamples) {
    fail(ErrorKind::invalid_parameter, "fit: at least " + std::to_string(kMinFitSamples) + " positive samples required");
  }
  const auto [lo, hi] = std::minmax_element(positive.begin(), positive.end());
  if (*hi - *lo <= 1e-9 * *hi) fail(ErrorKind::degenerate_data, "fit: all samples are identical");

  // Work on data scaled to unit mean square; every family is closed under
  // scaling, so the fit maps back exactly.
  double m2 = 0.0;
  for (double v : positive) m2 += v * v;
  const double scale = std::sqrt(m2 / static_cast<double>(positive.size()));
  std::vector<double> y(positive.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = positive[i] / scale;

  std::optional<FadingModel> warm;
  if (options.start) {
    if (options.start->family() != family) {
      fail(ErrorKind::invalid_parameter, "fit: starting model belongs to another family");
    }
    warm = rescale(*options.start, 1.0 / scale);
  }
  const auto f = fit_unit(family, y, warm, options.rel_tol);
  const FadingModel model = canonical(rescale(f.model, scale));
  const double ll = sum_log_pdf(model, positive);
  return {model, ll, f.converged && std::isfinite(ll), f.iterations, canonical(rescale(f.init, scale)), zeros};
}

}  // namespace fadestat
