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

#ifndef FADESTAT_FADING_MODELS_HPP
#define FADESTAT_FADING_MODELS_HPP

#include <array>
#include <limits>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "fadestat/random.hpp"

namespace fadestat {

enum class Family { weibull, rician, rayleigh, nakagami, gamma, k, f, kg };

/// Report order of the families (Weibull, Rician, Rayleigh, Nakagami, Gamma, K, F, KG).
inline constexpr std::array<Family, 8> kAllFamilies = {Family::weibull, Family::rician, Family::rayleigh,
                                                       Family::nakagami, Family::gamma, Family::k,
                                                       Family::f, Family::kg};

std::string_view family_name(Family family) noexcept;
/// Case-insensitive lookup; throws ErrorKind::input for unknown names.
Family parse_family(std::string_view name);
/// Number of free parameters of the family.
std::size_t parameter_count(Family family) noexcept;

struct RayleighParams {
  double sigma;
};
struct RicianParams {
  double nu_los;
  double sigma;
};
struct NakagamiParams {
  double m;
  double omega;
};
struct WeibullParams {
  double shape;
  double scale;
};
/// Gamma law applied to the envelope itself.
struct GammaParams {
  double shape;
  double scale;
};
/// f(t) = 2c/Gamma(nu) (ct/2)^nu K_{nu-1}(ct); nu is the shape, c the scale.
struct KParams {
  double nu;
  double c;
};
/// f(r) = 2 m^m (ms Omega)^ms r^(2m-1) / (B(m, ms) (m r^2 + ms Omega)^(m+ms)).
struct FParams {
  double m;
  double ms;
  double omega;
};
/// Generalized-K with alpha = k - m, beta = k + m - 1 and E[X^2] = Omega.
struct KgParams {
  double m;
  double k;
  double omega;
};

/// Immutable, validated member of one of the eight fading families.
class FadingModel {
 public:
  using Params = std::variant<WeibullParams, RicianParams, RayleighParams, NakagamiParams, GammaParams,
                              KParams, FParams, KgParams>;

  /// Throws ErrorKind::invalid_parameter when an invariant is violated.
  explicit FadingModel(Params params);

  static FadingModel rayleigh(double sigma) { return FadingModel(RayleighParams{sigma}); }
  static FadingModel rician(double nu_los, double sigma) { return FadingModel(RicianParams{nu_los, sigma}); }
  static FadingModel nakagami(double m, double omega) { return FadingModel(NakagamiParams{m, omega}); }
  static FadingModel weibull(double shape, double scale) { return FadingModel(WeibullParams{shape, scale}); }
  static FadingModel gamma(double shape, double scale) { return FadingModel(GammaParams{shape, scale}); }
  static FadingModel k(double nu, double c) { return FadingModel(KParams{nu, c}); }
  static FadingModel f(double m, double ms, double omega) { return FadingModel(FParams{m, ms, omega}); }
  static FadingModel kg(double m, double k, double omega) { return FadingModel(KgParams{m, k, omega}); }

  /// Builds a model from its parameters in declaration order.
  static FadingModel from_vector(Family family, std::span<const double> values);

  Family family() const noexcept { return static_cast<Family>(params_.index()); }
  const Params& params() const noexcept { return params_; }
  template <typename P>
  const P& as() const {
    return std::get<P>(params_);
  }

  std::vector<double> to_vector() const;

  /// Finite mean power; false only for F with ms <= 1.
  bool has_finite_mean_power() const noexcept;

  /// Text record such as `K nu=0.7793 c=0.901` (shortest round-trip decimals).
  std::string to_string() const;
  static FadingModel parse(std::string_view text);

  friend bool operator==(const FadingModel& a, const FadingModel& b) noexcept;

 private:
  Params params_;
};

std::vector<std::string_view> parameter_names(Family family);

/// Non-negative envelope samples with a provenance label.
class SampleSet {
 public:
  /// Throws ErrorKind::invalid_parameter for empty input or negative/non-finite values.
  explicit SampleSet(std::vector<double> values, std::string label = {});

  const std::vector<double>& values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  const std::string& label() const noexcept { return label_; }

  /// Ascending copy of the values.
  std::vector<double> sorted() const;

 private:
  std::vector<double> values_;
  std::string label_;
};

/// Returned by pdf() at x = 0 when the density diverges there (shape < 1
/// Gamma/Weibull, K with nu < 1/2, KG with min(m, k) < 1/2).
inline constexpr double kInfiniteDensity = std::numeric_limits<double>::infinity();

double pdf(const FadingModel& model, double x);
double log_pdf(const FadingModel& model, double x);
double cdf(const FadingModel& model, double x);

/// Sum of log_pdf over xs with the parameter-only terms formed once; the
/// likelihood kernel of the fitting code. -inf when any point has zero density.
double sum_log_pdf(const FadingModel& model, std::span<const double> xs);

/// CDF at each point of an ascending sequence; shares quadrature work between
/// neighbours for the families without a closed form.
std::vector<double> cdf_sorted(const FadingModel& model, std::span<const double> sorted_x);

/// One draw; K, F and KG are drawn compositionally (mixing power, then the
/// conditional envelope).
double draw(const FadingModel& model, RandomStream& rng);
SampleSet sample(const FadingModel& model, std::size_t n, RandomStream& rng);

/// Raw moment E[X^order]. Throws ErrorKind::nonexistent_moment for F with ms <= order/2.
double moment(const FadingModel& model, int order);

struct ReductionReport {
  FadingModel model;
  bool exact;
  /// sup |f_kg - f_target| on the comparison grid.
  double sup_abs_gap;
  /// max |f_kg - f_target| / f_target on the comparison grid.
  double max_rel_gap;
};

/// Reduces a KG model to K (exact, requires m = 1) or to its Nakagami limit.
/// Throws ErrorKind::not_reducible for target K with m != 1.
ReductionReport reduce_kg(const FadingModel& model, Family target);

}  // namespace fadestat

#endif  // FADESTAT_FADING_MODELS_HPP
