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

#ifndef FADESTAT_PIPELINE_HPP
#define FADESTAT_PIPELINE_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fadestat/density_estimation.hpp"
#include "fadestat/error.hpp"
#include "fadestat/fading_models.hpp"
#include "fadestat/gof_tests.hpp"
#include "fadestat/gsm_channel.hpp"
#include "fadestat/mle_fitting.hpp"

namespace fadestat {

/// Library version reported in every analysis report.
std::string_view version() noexcept;

inline constexpr int kReportSchema = 1;

struct AnalysisConfig {
  std::vector<Family> families{kAllFamilies.begin(), kAllFamilies.end()};
  AlphaMethod gof_mode = AlphaMethod::bootstrap;
  std::size_t bootstrap_b = 1000;
  std::uint64_t seed = 1;
  /// Tap columns to analyze; empty means all.
  std::vector<std::size_t> taps;
  /// Free-form description of the input, echoed in the report.
  std::string source;

  /// Throws ErrorKind::input for an empty family list, duplicate families,
  /// bootstrap_b < 100 in bootstrap mode or a tap index >= 14.
  void validate() const;
};

struct FailureInfo {
  ErrorKind kind;
  std::string message;
};

struct StatisticResult {
  double statistic = 0.0;
  GofDecision decision{};
};

struct FamilyResult {
  Family family;
  /// Set when the fit (or anything after it) failed; the fields below are
  /// then unset or zero.
  std::optional<FailureInfo> failure;
  std::optional<FadingModel> model;
  double log_likelihood = 0.0;
  bool converged = false;
  std::size_t iterations = 0;
  StatisticResult ks;
  StatisticResult ad;
  /// Divergence of the kernel estimate from the fitted pdf; unset when it
  /// could not be evaluated.
  std::optional<double> kld;
  std::optional<FailureInfo> kld_failure;
  bool kld_floored = false;
  bool confirmed = false;
};

struct TapReport {
  std::size_t tap = 0;
  std::size_t samples = 0;
  std::size_t skipped_bursts = 0;
  /// Kernel bandwidth; unset when the estimate could not be formed.
  std::optional<double> bandwidth;
  std::vector<FamilyResult> families;
};

struct AnalysisReport {
  AnalysisConfig config;
  std::string version;
  std::vector<TapReport> taps;

  const TapReport& tap(std::size_t index) const;
};

/// Maximum likelihood fit of one family on one tap, or why it failed.
struct FamilyFit {
  Family family;
  std::optional<FailureInfo> failure;
  std::optional<FadingModel> model;
  double log_likelihood = 0.0;
  bool converged = false;
  std::size_t iterations = 0;
};

struct TapFits {
  std::size_t tap = 0;
  std::size_t samples = 0;
  std::vector<FamilyFit> families;
};

/// Fitted models per tap; the artifact passed from `fit` to `gof`.
struct FitTable {
  std::vector<TapFits> taps;
};

FitTable run_fits(const TapEnsemble& ensemble, const AnalysisConfig& config);
std::string to_json(const FitTable& fits);
FitTable fits_from_json(std::string_view text);

/// run_analysis with the models taken from `fits` instead of refitted. Every
/// selected (tap, family) pair must be present in `fits` (ErrorKind::input).
AnalysisReport run_gof(const TapEnsemble& ensemble, const FitTable& fits, const AnalysisConfig& config);

/// KS level above kConfirmLevel and AD level above it or AD untabulated.
bool combined_decision(const GofDecision& ks, const GofDecision& ad) noexcept;

/// Fits every selected family on every selected tap, computes both EDF
/// statistics with their levels, the kernel estimate and the divergence of
/// each fit. Per-family failures are recorded, never thrown. Bootstrap mode
/// runs the replicates in parallel, table mode the (tap, family) grid; the
/// bootstrap seed of a cell depends only on (seed, tap, family). Throws
/// ErrorKind::no_bursts_found for an empty ensemble and ErrorKind::input for
/// an invalid config.
AnalysisReport run_analysis(const TapEnsemble& ensemble, const AnalysisConfig& config);
/// Single-threaded reference; identical output.
AnalysisReport run_analysis_serial(const TapEnsemble& ensemble, const AnalysisConfig& config);

/// Schema 1 JSON; non-finite numbers as the strings "+inf", "-inf", "nan".
std::string to_json(const AnalysisReport& report);
AnalysisReport report_from_json(std::string_view text);

/// Text layout of the per-tap table; ErrorKind::unknown_tap if absent.
std::string emit_table(const AnalysisReport& report, std::size_t tap);
std::string emit_table_csv(const AnalysisReport& report, std::size_t tap);
/// Rows are taps, columns the selected families, values KS levels, plus the
/// decision threshold.
std::string emit_alpha_bars(const AnalysisReport& report);

/// Level in table notation: "-" when unavailable, scientific below 1e-3,
/// two significant digits below 0.01, otherwise two decimals.
std::string format_alpha(const GofDecision& decision);

struct SynthPreset {
  std::string name;
  std::string description;
  ChannelProfile profile;
  SimulationOptions simulation;
  /// Tap the verdict is about.
  std::size_t dominant_tap = 0;
};

/// "main-lobe", "back-lobe", "rayleigh", "identity".
std::vector<std::string> preset_names();
/// Throws ErrorKind::unknown_preset.
SynthPreset find_preset(std::string_view name);

struct SynthOutcome {
  SynthPreset preset;
  TapEnsemble ensemble;
  AnalysisReport report;
  bool verdict = false;
  std::string summary;
};

/// Simulates the preset with `seed`, builds the ensemble and analyzes it.
/// `config.taps` empty means the preset's dominant tap only; config.seed is
/// replaced by `seed`.
SynthOutcome run_synth_experiment(std::string_view preset, std::uint64_t seed, AnalysisConfig config = {},
                                  std::optional<std::size_t> bursts = std::nullopt);

}  // namespace fadestat

#endif  // FADESTAT_PIPELINE_HPP
