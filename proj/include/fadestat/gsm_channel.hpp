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

#ifndef FADESTAT_GSM_CHANNEL_HPP
#define FADESTAT_GSM_CHANNEL_HPP

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "fadestat/fading_models.hpp"

namespace fadestat {

using Complex = std::complex<double>;

/// GSM symbol rate, 1625000 / 6 Hz.
inline constexpr double kGsmSampleRate = 1625000.0 / 6.0;
/// Length of an estimated channel impulse response.
inline constexpr std::size_t kChannelTaps = 14;
/// Symbols per TDMA frame (8 timeslots of 156.25 symbols).
inline constexpr std::size_t kFramePeriod = 1250;

enum class CaptureOrigin { file, synthetic };

/// Complex baseband samples at one sample per symbol.
struct IqCapture {
  std::vector<Complex> samples;
  double sample_rate = kGsmSampleRate;
  CaptureOrigin origin = CaptureOrigin::synthetic;

  /// Throws ErrorKind::input for a non-positive rate or non-finite samples.
  void validate() const;
};

/// Interleaved little-endian float32 I/Q pairs without a header.
IqCapture read_iq_file(const std::string& path, double sample_rate = kGsmSampleRate);
void write_iq_file(const std::string& path, const IqCapture& capture);

struct GmskOptions {
  double bt = 0.3;
  /// Oversampling of the phase synthesis; output is decimated to 1 sample/symbol.
  int oversampling = 4;
  /// Truncation of the Gaussian frequency pulse in symbols.
  int pulse_span = 4;
};

/// GSM differential encoding, Gaussian frequency pulse, modulation index 1/2.
/// All-zero bits produce a tone at +1/4 of the symbol rate.
std::vector<Complex> gmsk_modulate(std::span<const std::uint8_t> bits, const GmskOptions& options = {});

/// Bits from a string of '0' and '1'; throws ErrorKind::input otherwise.
std::vector<std::uint8_t> parse_bits(std::string_view text);

class TrainingSequence {
 public:
  /// 64-bit extended training sequence of the synchronization burst.
  static TrainingSequence etsi64();
  /// 63-bit variant.
  static TrainingSequence paper63();
  static TrainingSequence custom(std::span<const std::uint8_t> bits);
  /// "etsi64", "paper63" or "custom:<bits>".
  static TrainingSequence parse(std::string_view spec);

  const std::string& name() const noexcept { return name_; }
  const std::vector<std::uint8_t>& bits() const noexcept { return bits_; }
  const std::vector<Complex>& baseband() const noexcept { return baseband_; }
  std::size_t size() const noexcept { return bits_.size(); }
  /// Name for configs: "etsi64", "paper63" or "custom:<bits>".
  std::string spec() const;

 private:
  TrainingSequence(std::string name, std::vector<std::uint8_t> bits);
  std::string name_;
  std::vector<std::uint8_t> bits_;
  std::vector<Complex> baseband_;
};

struct FcchOptions {
  double tolerance = 0.3;
  std::size_t window = 32;
  double fraction = 0.9;
  std::size_t min_run = 100;
};

/// Start indices of runs of at least min_run samples covered by windows in
/// which the given fraction of phase increments lies within tolerance of +pi/2.
std::vector<std::size_t> detect_fcch(const IqCapture& capture, const FcchOptions& options = {});

struct EstimatorOptions {
  std::size_t fft_size = 128;
  std::size_t taps = kChannelTaps;
  /// Bins with |S_i| below gate * max |S_i| are set to zero.
  double gate = 0.02;
};

struct ChannelEstimate {
  std::vector<Complex> taps;
  double tap_spacing = 1.0 / kGsmSampleRate;
  std::size_t burst_index = 0;
};

/// Frequency-domain deconvolution against one training sequence. The training
/// spectrum and FFT plans are prepared once; estimate() is thread-safe.
class ChannelEstimator {
 public:
  explicit ChannelEstimator(const TrainingSequence& training, const EstimatorOptions& options = {},
                            double sample_rate = kGsmSampleRate);
  ~ChannelEstimator();
  ChannelEstimator(const ChannelEstimator&) = delete;
  ChannelEstimator& operator=(const ChannelEstimator&) = delete;

  /// Training length + taps - 1: the span affected by the training symbols.
  std::size_t segment_length() const noexcept { return segment_; }
  /// min |S_i| / max |S_i| over the FFT bins.
  double spectral_floor() const noexcept { return floor_; }
  std::size_t gated_bins() const noexcept { return gated_; }

  /// `received` starts at the first training symbol's tap-0 arrival; at most
  /// fft_size samples are used. Throws ErrorKind::empty_signal when all zero.
  ChannelEstimate estimate(std::span<const Complex> received, std::size_t burst_index = 0) const;

 private:
  struct Plans;
  EstimatorOptions options_;
  double sample_rate_;
  std::size_t segment_;
  double floor_ = 0.0;
  std::size_t gated_ = 0;
  std::vector<Complex> inverse_spectrum_;
  Plans* plans_;
};

ChannelEstimate estimate_channel(std::span<const Complex> received, const TrainingSequence& training,
                                 const EstimatorOptions& options = {});

struct CorrelationPeak {
  std::size_t offset;
  double magnitude;
  /// Peak over the largest value more than taps - 1 samples away.
  double psr;
};

/// |sum x[p + i] conj(t_i)| for every p with a full overlap.
std::vector<double> training_correlation(std::span<const Complex> x, const TrainingSequence& training);

/// Strongest correlation in x. Throws ErrorKind::alignment_failure when x is
/// shorter than the training sequence.
CorrelationPeak locate_training(std::span<const Complex> x, const TrainingSequence& training,
                                std::size_t exclusion = kChannelTaps - 1);

/// Constant tap magnitude; uniform random phase unless one is given.
struct FixedGain {
  double magnitude;
  std::optional<double> phase;
};
/// A silent tap, a constant gain or a fading law.
using TapSpec = std::variant<std::monostate, FixedGain, FadingModel>;
using ChannelProfile = std::array<TapSpec, kChannelTaps>;

/// Mean power of a tap spec; infinite for F with ms <= 1.
double mean_power(const TapSpec& spec);

/// Burst magnitudes, one row of kChannelTaps per burst.
class TapEnsemble {
 public:
  TapEnsemble() = default;
  explicit TapEnsemble(std::string label) : label_(std::move(label)) {}

  void add_row(std::size_t burst, std::span<const double> magnitudes);
  std::size_t rows() const noexcept { return bursts_.size(); }
  std::size_t burst(std::size_t row) const { return bursts_.at(row); }
  double magnitude(std::size_t row, std::size_t tap) const { return values_.at(row * kChannelTaps + tap); }
  std::vector<double> column_values(std::size_t tap) const;
  /// Column as a SampleSet labelled "<label> tap <j>".
  SampleSet column(std::size_t tap) const;

  const std::string& label() const noexcept { return label_; }
  std::size_t skipped() const noexcept { return skipped_; }
  void set_skipped(std::size_t n) noexcept { skipped_ = n; }

  /// Header `burst,tap_0,...,tap_13`; shortest round-trip decimals.
  std::string to_csv() const;
  static TapEnsemble from_csv(std::string_view text, std::string label = {});

 private:
  std::string label_;
  std::vector<std::size_t> bursts_;
  std::vector<double> values_;
  std::size_t skipped_ = 0;
};

void write_ensemble_csv(const std::string& path, const TapEnsemble& ensemble);
TapEnsemble read_ensemble_csv(const std::string& path);

struct SimulationOptions {
  std::size_t n_bursts = 3000;
  /// Mean total channel power over the noise variance, in dB. Infinite for none.
  double snr_db = 20.0;
  std::uint64_t seed = 1;
  std::size_t burst_period = kFramePeriod;
  /// Position of the first training symbol inside each period.
  std::size_t training_offset = 600;
  /// Precede each training burst by an FCCH burst of 148 zero bits.
  bool include_fcch = true;
  std::size_t fcch_offset = 100;
};

struct Simulation {
  IqCapture capture;
  /// Drawn tap magnitudes, one row per burst.
  TapEnsemble truth;
  double noise_variance = 0.0;
};

/// Per burst b (substream b of the seed): draw each tap's magnitude and a
/// uniform phase, convolve the burst content with the channel and add
/// circular complex Gaussian noise. Throws ErrorKind::invalid_parameter
/// without any active tap.
Simulation simulate_bursts(const ChannelProfile& profile, const TrainingSequence& training,
                           const SimulationOptions& options);

enum class SyncMode { grid, fcch, search };
std::string_view to_string(SyncMode mode) noexcept;
SyncMode parse_sync_mode(std::string_view text);

struct EnsembleOptions {
  /// grid: bursts every burst_period samples at a phase acquired from the
  /// strongest average correlation; fcch: training searched after each FCCH
  /// run; search: every isolated correlation peak.
  SyncMode sync = SyncMode::grid;
  std::size_t burst_period = kFramePeriod;
  double min_psr = 2.0;
  /// Average-profile level that marks the earliest path, relative to its peak.
  double lead_threshold = 0.05;
  EstimatorOptions estimator;
  std::string label = "ensemble";
};

/// Locates the training segments, aligns them on the average power delay
/// profile so that the earliest significant path is tap 0, and stacks the
/// tap magnitudes. Rows are ordered by burst position. Throws
/// ErrorKind::no_bursts_found when nothing is located.
TapEnsemble build_ensemble(const IqCapture& capture, const TrainingSequence& training,
                           const EnsembleOptions& options = {});
/// Single-threaded reference; identical output.
TapEnsemble build_ensemble_serial(const IqCapture& capture, const TrainingSequence& training,
                                  const EnsembleOptions& options = {});

}  // namespace fadestat

#endif  // FADESTAT_GSM_CHANNEL_HPP
