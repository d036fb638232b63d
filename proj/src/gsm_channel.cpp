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

#include "fadestat/gsm_channel.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <mutex>
#include <numbers>
#include <sstream>

#include <fftw3.h>

#include "fadestat/error.hpp"
#include "fadestat/parallel.hpp"

namespace fadestat {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::size_t kFcchBits = 148;
constexpr std::size_t kAcquisitionBursts = 32;

constexpr std::string_view kEtsi64 = "1011100101100010000001000000111100101101010001010111011000011011";
constexpr std::string_view kPaper63 = "101110010110001000001000000111100101101010001010111011000011011";

// FFTW's planner is not thread-safe; execution on new arrays is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_complex* as_fftw(Complex* p) { return reinterpret_cast<fftw_complex*>(p); }

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double draw_magnitude(const TapSpec& spec, RandomStream& rng) {
  return std::visit(
      [&rng](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return 0.0;
        } else if constexpr (std::is_same_v<T, FixedGain>) {
          return s.magnitude;
        } else {
          return draw(s, rng);
        }
      },
      spec);
}

bool active(const TapSpec& spec) { return !std::holds_alternative<std::monostate>(spec); }

}  // namespace

void IqCapture::validate() const {
  if (!(sample_rate > 0.0) || !std::isfinite(sample_rate)) fail(ErrorKind::input, "IQ capture: sample rate must be positive");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!std::isfinite(samples[i].real()) || !std::isfinite(samples[i].imag())) {
      fail(ErrorKind::input, "IQ capture: non-finite sample at index " + std::to_string(i));
    }
  }
}

IqCapture read_iq_file(const std::string& path, double sample_rate) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::input, "cannot open IQ file " + path);
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() % 8 != 0) {
    fail(ErrorKind::input, path + ": size " + std::to_string(bytes.size()) + " is not a whole number of float32 I/Q pairs");
  }
  IqCapture cap;
  cap.sample_rate = sample_rate;
  cap.origin = CaptureOrigin::file;
  cap.samples.resize(bytes.size() / 8);
  for (std::size_t i = 0; i < cap.samples.size(); ++i) {
    std::uint32_t w[2];
    std::memcpy(w, bytes.data() + 8 * i, 8);
    if constexpr (std::endian::native == std::endian::big) {
      w[0] = __builtin_bswap32(w[0]);
      w[1] = __builtin_bswap32(w[1]);
    }
    cap.samples[i] = {std::bit_cast<float>(w[0]), std::bit_cast<float>(w[1])};
  }
  try {
    cap.validate();
  } catch (const Error& e) {
    fail(ErrorKind::input, path + ": " + e.what());
  }
  return cap;
}

void write_iq_file(const std::string& path, const IqCapture& capture) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::input, "cannot write IQ file " + path);
  for (const Complex& s : capture.samples) {
    std::uint32_t w[2] = {std::bit_cast<std::uint32_t>(static_cast<float>(s.real())),
                          std::bit_cast<std::uint32_t>(static_cast<float>(s.imag()))};
    if constexpr (std::endian::native == std::endian::big) {
      w[0] = __builtin_bswap32(w[0]);
      w[1] = __builtin_bswap32(w[1]);
    }
    out.write(reinterpret_cast<const char*>(w), 8);
  }
}

std::vector<Complex> gmsk_modulate(std::span<const std::uint8_t> bits, const GmskOptions& options) {
  if (bits.empty()) fail(ErrorKind::invalid_parameter, "gmsk_modulate: no bits");
  const int os = options.oversampling;
  const int span = options.pulse_span;
  if (os < 1 || span < 1 || !(options.bt > 0.0)) fail(ErrorKind::invalid_parameter, "gmsk_modulate: bad options");

  // Frequency pulse: rectangle of one symbol convolved with a Gaussian of
  // time-bandwidth product BT, normalized to unit area.
  const std::size_t taps = static_cast<std::size_t>(span * os);
  std::vector<double> g(taps);
  const double k = 2.0 * kPi * options.bt / std::sqrt(std::log(2.0));
  const auto q = [](double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); };
  double area = 0.0;
  for (std::size_t i = 0; i < taps; ++i) {
    const double t = (static_cast<double>(i) + 0.5) / os - 0.5 * span;
    g[i] = q(k * (t - 0.5)) - q(k * (t + 0.5));
    area += g[i];
  }
  for (double& v : g) v /= area;

  // Differential encoding with a leading 1; a = +1 advances the phase by pi/2.
  const std::size_t n = bits.size();
  std::vector<double> a(n);
  std::uint8_t prev = 1;
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint8_t b = bits[i] & 1u;
    a[i] = (b ^ prev) ? -1.0 : 1.0;
    prev = b;
  }

  const std::size_t fine = n * static_cast<std::size_t>(os) + taps;
  std::vector<double> freq(fine, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < taps; ++j) freq[i * os + j] += a[i] * g[j];
  }
  const std::size_t delay = taps / 2;
  std::vector<Complex> out(n);
  double phase = 0.0;
  std::size_t next = 0;
  for (std::size_t f = 0; f < fine && next < n; ++f) {
    phase += 0.5 * kPi * freq[f];
    if (f == next * os + delay) out[next++] = std::polar(1.0, phase);
  }
  return out;
}

std::vector<std::uint8_t> parse_bits(std::string_view text) {
  std::vector<std::uint8_t> bits;
  bits.reserve(text.size());
  for (char c : text) {
    if (c != '0' && c != '1') fail(ErrorKind::input, "bit string may only contain 0 and 1: '" + std::string(text) + "'");
    bits.push_back(static_cast<std::uint8_t>(c - '0'));
  }
  if (bits.empty()) fail(ErrorKind::input, "empty bit string");
  return bits;
}

TrainingSequence::TrainingSequence(std::string name, std::vector<std::uint8_t> bits)
    : name_(std::move(name)), bits_(std::move(bits)), baseband_(gmsk_modulate(bits_)) {}

TrainingSequence TrainingSequence::etsi64() { return TrainingSequence("etsi64", parse_bits(kEtsi64)); }

TrainingSequence TrainingSequence::paper63() { return TrainingSequence("paper63", parse_bits(kPaper63)); }

TrainingSequence TrainingSequence::custom(std::span<const std::uint8_t> bits) {
  if (bits.empty()) fail(ErrorKind::input, "custom training sequence is empty");
  return TrainingSequence("custom", std::vector<std::uint8_t>(bits.begin(), bits.end()));
}

TrainingSequence TrainingSequence::parse(std::string_view spec) {
  if (spec == "etsi64") return etsi64();
  if (spec == "paper63") return paper63();
  constexpr std::string_view prefix = "custom:";
  if (spec.substr(0, prefix.size()) == prefix) {
    const auto bits = parse_bits(spec.substr(prefix.size()));
    return custom(bits);
  }
  fail(ErrorKind::input, "unknown training sequence '" + std::string(spec) + "' (etsi64, paper63, custom:<bits>)");
}

std::string TrainingSequence::spec() const {
  if (name_ != "custom") return name_;
  std::string s = "custom:";
  for (auto b : bits_) s.push_back(static_cast<char>('0' + b));
  return s;
}

std::vector<std::size_t> detect_fcch(const IqCapture& capture, const FcchOptions& options) {
  const auto& x = capture.samples;
  std::vector<std::size_t> starts;
  const std::size_t w = options.window;
  if (w == 0 || x.size() < w + 1) return starts;
  const std::size_t inc = x.size() - 1;
  std::vector<std::size_t> prefix(inc + 1, 0);
  for (std::size_t k = 0; k < inc; ++k) {
    const double d = std::arg(x[k + 1] * std::conj(x[k]));
    const bool good = std::abs(x[k]) > 0.0 && std::abs(x[k + 1]) > 0.0 && std::fabs(d - 0.5 * kPi) <= options.tolerance;
    prefix[k + 1] = prefix[k] + (good ? 1 : 0);
  }
  const auto need = static_cast<std::size_t>(std::ceil(options.fraction * static_cast<double>(w)));
  std::vector<int> cover(x.size() + 1, 0);
  for (std::size_t k = 0; k + w <= inc; ++k) {
    if (prefix[k + w] - prefix[k] >= need) {
      ++cover[k];
      --cover[k + w + 1];
    }
  }
  int depth = 0;
  std::size_t run_start = 0;
  std::size_t run = 0;
  for (std::size_t i = 0; i <= x.size(); ++i) {
    depth += cover[i];
    const bool covered = i < x.size() && depth > 0;
    if (covered) {
      if (run == 0) run_start = i;
      ++run;
    } else {
      if (run >= options.min_run) starts.push_back(run_start);
      run = 0;
    }
  }
  return starts;
}

struct ChannelEstimator::Plans {
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;
};

ChannelEstimator::ChannelEstimator(const TrainingSequence& training, const EstimatorOptions& options,
                                   double sample_rate)
    : options_(options), sample_rate_(sample_rate), segment_(training.size() + options.taps - 1), plans_(new Plans) {
  const std::size_t n = options.fft_size;
  if (options.taps == 0 || segment_ > n) {
    delete plans_;
    fail(ErrorKind::invalid_parameter, "channel estimator: training length + taps - 1 exceeds the FFT size");
  }
  std::vector<Complex> in(n), out(n);
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    const int len = static_cast<int>(n);
    plans_->forward = fftw_plan_dft_1d(len, as_fftw(in.data()), as_fftw(out.data()), FFTW_FORWARD,
                                       FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_->inverse = fftw_plan_dft_1d(len, as_fftw(in.data()), as_fftw(out.data()), FFTW_BACKWARD,
                                       FFTW_ESTIMATE | FFTW_UNALIGNED);
  }
  std::fill(in.begin(), in.end(), Complex{});
  std::copy(training.baseband().begin(), training.baseband().end(), in.begin());
  fftw_execute_dft(plans_->forward, as_fftw(in.data()), as_fftw(out.data()));
  double peak = 0.0;
  double low = std::numeric_limits<double>::infinity();
  for (const Complex& s : out) {
    peak = std::max(peak, std::abs(s));
    low = std::min(low, std::abs(s));
  }
  floor_ = low / peak;
  inverse_spectrum_.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (std::abs(out[k]) >= options.gate * peak) {
      inverse_spectrum_[k] = 1.0 / (out[k] * static_cast<double>(n));
    } else {
      inverse_spectrum_[k] = 0.0;
      ++gated_;
    }
  }
}

ChannelEstimator::~ChannelEstimator() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(plans_->forward);
  fftw_destroy_plan(plans_->inverse);
  delete plans_;
}

ChannelEstimate ChannelEstimator::estimate(std::span<const Complex> received, std::size_t burst_index) const {
  const std::size_t n = options_.fft_size;
  const std::size_t used = std::min(received.size(), segment_);
  bool any = false;
  for (std::size_t i = 0; i < used; ++i) any = any || received[i] != Complex{};
  if (!any) fail(ErrorKind::empty_signal, "channel estimate: received segment is all zero");

  std::vector<Complex> buf(n), spec(n);
  std::copy(received.begin(), received.begin() + static_cast<std::ptrdiff_t>(used), buf.begin());
  fftw_execute_dft(plans_->forward, as_fftw(buf.data()), as_fftw(spec.data()));
  for (std::size_t k = 0; k < n; ++k) spec[k] *= inverse_spectrum_[k];
  fftw_execute_dft(plans_->inverse, as_fftw(spec.data()), as_fftw(buf.data()));

  ChannelEstimate est;
  est.taps.assign(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(options_.taps));
  est.tap_spacing = 1.0 / sample_rate_;
  est.burst_index = burst_index;
  return est;
}

ChannelEstimate estimate_channel(std::span<const Complex> received, const TrainingSequence& training,
                                 const EstimatorOptions& options) {
  return ChannelEstimator(training, options).estimate(received);
}

std::vector<double> training_correlation(std::span<const Complex> x, const TrainingSequence& training) {
  const auto& t = training.baseband();
  const std::size_t l = t.size();
  if (x.size() < l) return {};
  const std::size_t count = x.size() - l + 1;
  std::vector<double> c(count);
  const auto total = static_cast<long long>(count);
  FADESTAT_OMP_STATIC_LOOP
  for (long long p = 0; p < total; ++p) {
    Complex acc{};
    for (std::size_t i = 0; i < l; ++i) acc += x[static_cast<std::size_t>(p) + i] * std::conj(t[i]);
    c[static_cast<std::size_t>(p)] = std::abs(acc);
  }
  return c;
}

namespace {

CorrelationPeak peak_of(std::span<const double> c, std::size_t exclusion) {
  const auto it = std::max_element(c.begin(), c.end());
  CorrelationPeak pk{static_cast<std::size_t>(it - c.begin()), *it, std::numeric_limits<double>::infinity()};
  double side = 0.0;
  for (std::size_t q = 0; q < c.size(); ++q) {
    const std::size_t dist = q > pk.offset ? q - pk.offset : pk.offset - q;
    if (dist > exclusion) side = std::max(side, c[q]);
  }
  if (side > 0.0) pk.psr = pk.magnitude / side;
  return pk;
}

}  // namespace

CorrelationPeak locate_training(std::span<const Complex> x, const TrainingSequence& training, std::size_t exclusion) {
  if (x.size() < training.size()) fail(ErrorKind::alignment_failure, "segment shorter than the training sequence");
  const auto c = training_correlation(x, training);
  return peak_of(c, exclusion);
}

double mean_power(const TapSpec& spec) {
  return std::visit(
      [](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return 0.0;
        } else if constexpr (std::is_same_v<T, FixedGain>) {
          return s.magnitude * s.magnitude;
        } else {
          return s.has_finite_mean_power() ? moment(s, 2) : std::numeric_limits<double>::infinity();
        }
      },
      spec);
}

void TapEnsemble::add_row(std::size_t burst, std::span<const double> magnitudes) {
  if (magnitudes.size() != kChannelTaps) fail(ErrorKind::invalid_parameter, "ensemble row must have 14 taps");
  for (double m : magnitudes) {
    if (!(m >= 0.0) || !std::isfinite(m)) fail(ErrorKind::invalid_parameter, "ensemble magnitudes must be finite and >= 0");
  }
  bursts_.push_back(burst);
  values_.insert(values_.end(), magnitudes.begin(), magnitudes.end());
}

std::vector<double> TapEnsemble::column_values(std::size_t tap) const {
  if (tap >= kChannelTaps) fail(ErrorKind::unknown_tap, "tap index " + std::to_string(tap) + " out of range");
  std::vector<double> v(rows());
  for (std::size_t r = 0; r < rows(); ++r) v[r] = values_[r * kChannelTaps + tap];
  return v;
}

SampleSet TapEnsemble::column(std::size_t tap) const {
  if (rows() == 0) fail(ErrorKind::no_bursts_found, "ensemble has no rows");
  return SampleSet(column_values(tap), label_ + " tap " + std::to_string(tap));
}

std::string TapEnsemble::to_csv() const {
  std::string out = "burst";
  for (std::size_t j = 0; j < kChannelTaps; ++j) out += ",tap_" + std::to_string(j);
  out += '\n';
  for (std::size_t r = 0; r < rows(); ++r) {
    out += std::to_string(bursts_[r]);
    for (std::size_t j = 0; j < kChannelTaps; ++j) {
      out += ',';
      out += format_double(values_[r * kChannelTaps + j]);
    }
    out += '\n';
  }
  return out;
}

TapEnsemble TapEnsemble::from_csv(std::string_view text, std::string label) {
  TapEnsemble ens(std::move(label));
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (line_no == 1) {
      if (line.substr(0, 5) != "burst") fail(ErrorKind::input, "ensemble CSV line 1: expected header 'burst,tap_0,...'");
      continue;
    }
    std::vector<double> fields;
    std::size_t start = 0;
    while (start <= line.size()) {
      std::size_t comma = line.find(',', start);
      if (comma == std::string_view::npos) comma = line.size();
      const std::string_view f = line.substr(start, comma - start);
      double v = 0.0;
      const auto res = std::from_chars(f.data(), f.data() + f.size(), v);
      if (res.ec != std::errc() || res.ptr != f.data() + f.size()) {
        fail(ErrorKind::input, "ensemble CSV line " + std::to_string(line_no) + ": bad number '" + std::string(f) + "'");
      }
      fields.push_back(v);
      start = comma + 1;
    }
    if (fields.size() != kChannelTaps + 1) {
      fail(ErrorKind::input, "ensemble CSV line " + std::to_string(line_no) + ": expected 15 fields, got " +
                                 std::to_string(fields.size()));
    }
    try {
      ens.add_row(static_cast<std::size_t>(fields[0]), std::span<const double>(fields).subspan(1));
    } catch (const Error& e) {
      fail(ErrorKind::input, "ensemble CSV line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return ens;
}

void write_ensemble_csv(const std::string& path, const TapEnsemble& ensemble) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::input, "cannot write " + path);
  out << ensemble.to_csv();
}

TapEnsemble read_ensemble_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::input, "cannot open ensemble CSV " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return TapEnsemble::from_csv(ss.str(), path);
}

Simulation simulate_bursts(const ChannelProfile& profile, const TrainingSequence& training,
                           const SimulationOptions& options) {
  if (std::none_of(profile.begin(), profile.end(), active)) {
    fail(ErrorKind::invalid_parameter, "simulate_bursts: no active tap");
  }
  if (options.n_bursts == 0) fail(ErrorKind::invalid_parameter, "simulate_bursts: n_bursts must be >= 1");
  const std::size_t period = options.burst_period;
  const std::size_t l = training.size();
  if (options.training_offset + l + kChannelTaps - 1 > period ||
      (options.include_fcch && options.fcch_offset + kFcchBits > options.training_offset)) {
    fail(ErrorKind::invalid_parameter, "simulate_bursts: bursts do not fit the period");
  }

  // Burst content shared by every period.
  std::vector<Complex> content(period, Complex{});
  if (options.include_fcch) {
    const std::vector<std::uint8_t> zeros(kFcchBits, 0);
    const auto tone = gmsk_modulate(zeros);
    std::copy(tone.begin(), tone.end(), content.begin() + static_cast<std::ptrdiff_t>(options.fcch_offset));
  }
  std::copy(training.baseband().begin(), training.baseband().end(),
            content.begin() + static_cast<std::ptrdiff_t>(options.training_offset));

  const std::size_t nb = options.n_bursts;
  const RandomStream root(options.seed);
  std::vector<std::array<Complex, kChannelTaps>> channels(nb);
  const auto total = static_cast<long long>(nb);
  {
    ExceptionSlot slot;
    FADESTAT_OMP_STATIC_LOOP
    for (long long b = 0; b < total; ++b) {
      slot.run([&] {
        RandomStream rng = root.substream(2 * static_cast<std::uint64_t>(b));
        for (std::size_t j = 0; j < kChannelTaps; ++j) {
          const double mag = draw_magnitude(profile[j], rng);
          const auto* fixed = std::get_if<FixedGain>(&profile[j]);
          double phase = 0.0;
          if (fixed != nullptr && fixed->phase) {
            phase = *fixed->phase;
          } else if (active(profile[j])) {
            phase = 2.0 * kPi * rng.uniform();
          }
          channels[static_cast<std::size_t>(b)][j] = std::polar(mag, phase);
        }
      });
    }
    slot.rethrow();
  }

  double power = 0.0;
  for (const auto& spec : profile) power += mean_power(spec);
  if (!std::isfinite(power)) {
    // Infinite mean power (F with ms <= 1): fall back to the drawn bursts.
    power = 0.0;
    for (const auto& h : channels) {
      for (const Complex& t : h) power += std::norm(t);
    }
    power /= static_cast<double>(nb);
  }

  Simulation sim;
  sim.noise_variance = std::isinf(options.snr_db) && options.snr_db > 0 ? 0.0 : power / std::pow(10.0, options.snr_db / 10.0);
  sim.capture.sample_rate = kGsmSampleRate;
  sim.capture.origin = CaptureOrigin::synthetic;
  sim.capture.samples.assign(nb * period, Complex{});
  const double sd = std::sqrt(0.5 * sim.noise_variance);

  FADESTAT_OMP_STATIC_LOOP
  for (long long b = 0; b < total; ++b) {
    const auto& h = channels[static_cast<std::size_t>(b)];
    Complex* out = sim.capture.samples.data() + static_cast<std::size_t>(b) * period;
    for (std::size_t n = 0; n < period; ++n) {
      Complex acc{};
      for (std::size_t j = 0; j < kChannelTaps && j <= n; ++j) acc += h[j] * content[n - j];
      out[n] = acc;
    }
    if (sd > 0.0) {
      RandomStream rng = root.substream(2 * static_cast<std::uint64_t>(b) + 1);
      for (std::size_t n = 0; n < period; ++n) {
        const double re = rng.normal();
        const double im = rng.normal();
        out[n] += Complex(sd * re, sd * im);
      }
    }
  }

  sim.truth = TapEnsemble("truth");
  std::array<double, kChannelTaps> row{};
  for (std::size_t b = 0; b < nb; ++b) {
    for (std::size_t j = 0; j < kChannelTaps; ++j) row[j] = std::abs(channels[b][j]);
    sim.truth.add_row(b, row);
  }
  return sim;
}

std::string_view to_string(SyncMode mode) noexcept {
  switch (mode) {
    case SyncMode::grid: return "grid";
    case SyncMode::fcch: return "fcch";
    case SyncMode::search: return "search";
  }
  return "?";
}

SyncMode parse_sync_mode(std::string_view text) {
  if (text == "grid") return SyncMode::grid;
  if (text == "fcch") return SyncMode::fcch;
  if (text == "search") return SyncMode::search;
  fail(ErrorKind::input, "unknown sync mode '" + std::string(text) + "' (grid, fcch, search)");
}

namespace {

struct Anchors {
  // Expected position of the training sequence of each located burst.
  std::vector<std::size_t> positions;
  std::vector<std::size_t> bursts;
  std::size_t skipped = 0;
};

Anchors grid_anchors(const IqCapture& capture, const TrainingSequence& training, const EnsembleOptions& options) {
  const std::size_t period = options.burst_period;
  const std::size_t l = training.size();
  const auto& x = capture.samples;
  if (period < l || x.size() < period) fail(ErrorKind::no_bursts_found, "capture shorter than one burst period");
  const std::size_t nb = x.size() / period;
  const std::size_t acq = std::min(nb, kAcquisitionBursts);

  // Average correlation power over the first bursts, per phase in the period.
  std::vector<double> profile(period - l + 1, 0.0);
  for (std::size_t b = 0; b < acq; ++b) {
    const auto c = training_correlation(std::span<const Complex>(x).subspan(b * period, period), training);
    for (std::size_t p = 0; p < profile.size(); ++p) profile[p] += c[p] * c[p];
  }
  for (double& v : profile) v = std::sqrt(v / static_cast<double>(acq));
  const CorrelationPeak pk = peak_of(profile, kChannelTaps - 1);
  if (!(pk.magnitude > 0.0) || pk.psr < options.min_psr) {
    fail(ErrorKind::no_bursts_found, "no training sequence found on the burst grid (peak-to-sidelobe " +
                                         std::to_string(pk.psr) + ")");
  }
  Anchors a;
  for (std::size_t b = 0; b < nb; ++b) {
    a.positions.push_back(b * period + pk.offset);
    a.bursts.push_back(b);
  }
  return a;
}

Anchors peak_anchors(const IqCapture& capture, const TrainingSequence& training, const EnsembleOptions& options,
                     const std::vector<std::pair<std::size_t, std::size_t>>& windows) {
  Anchors a;
  const auto& x = capture.samples;
  for (std::size_t w = 0; w < windows.size(); ++w) {
    const auto [lo, hi] = windows[w];
    if (hi <= lo || hi - lo < training.size()) {
      ++a.skipped;
      continue;
    }
    const CorrelationPeak pk = locate_training(std::span<const Complex>(x).subspan(lo, hi - lo), training);
    if (pk.psr < options.min_psr || !(pk.magnitude > 0.0)) {
      ++a.skipped;
      continue;
    }
    a.positions.push_back(lo + pk.offset);
    a.bursts.push_back(w);
  }
  return a;
}

Anchors fcch_anchors(const IqCapture& capture, const TrainingSequence& training, const EnsembleOptions& options) {
  const auto fcch = detect_fcch(capture);
  const std::size_t n = capture.samples.size();
  std::vector<std::pair<std::size_t, std::size_t>> windows;
  for (std::size_t f : fcch) {
    const std::size_t lo = std::min(n, f + kFcchBits - 6);
    const std::size_t hi = std::min(n, lo + options.burst_period + 2 * training.size());
    windows.emplace_back(lo, hi);
  }
  return peak_anchors(capture, training, options, windows);
}

Anchors search_anchors(const IqCapture& capture, const TrainingSequence& training, const EnsembleOptions& options) {
  const auto c = training_correlation(capture.samples, training);
  Anchors a;
  if (c.empty()) return a;
  const double top = *std::max_element(c.begin(), c.end());
  const std::size_t radius = 2 * training.size();
  std::size_t index = 0;
  for (std::size_t p = 0; p < c.size(); ++p) {
    if (c[p] < 0.1 * top) continue;
    const std::size_t lo = p > radius ? p - radius : 0;
    const std::size_t hi = std::min(c.size(), p + radius + 1);
    bool is_max = true;
    double side = 0.0;
    for (std::size_t q = lo; q < hi && is_max; ++q) {
      if (c[q] > c[p] || (c[q] == c[p] && q < p)) is_max = false;
      const std::size_t dist = q > p ? q - p : p - q;
      if (dist > kChannelTaps - 1) side = std::max(side, c[q]);
    }
    if (!is_max) continue;
    if (side > 0.0 && c[p] / side < options.min_psr) {
      ++a.skipped;
      continue;
    }
    a.positions.push_back(p);
    a.bursts.push_back(index++);
  }
  return a;
}

// Offset from an anchor to the earliest significant path, found on the power
// delay profile averaged over the first bursts with a wide estimate that also
// covers the taps - 1 positions ahead of the anchor.
std::ptrdiff_t earliest_path(const IqCapture& capture, const TrainingSequence& training, const Anchors& a,
                             const EnsembleOptions& options) {
  const std::size_t back = kChannelTaps - 1;
  EstimatorOptions wide = options.estimator;
  wide.taps = 2 * kChannelTaps - 1;
  const ChannelEstimator est(training, wide, capture.sample_rate);
  std::vector<double> pdp(wide.taps, 0.0);
  std::size_t used = 0;
  const auto& x = capture.samples;
  for (std::size_t i = 0; i < a.positions.size() && used < kAcquisitionBursts; ++i) {
    const std::size_t p = a.positions[i];
    if (p < back || p - back + est.segment_length() > x.size()) continue;
    try {
      const auto h = est.estimate(std::span<const Complex>(x).subspan(p - back, est.segment_length()));
      for (std::size_t j = 0; j < wide.taps; ++j) pdp[j] += std::norm(h.taps[j]);
      ++used;
    } catch (const Error&) {
    }
  }
  if (used == 0) return 0;
  const auto peak = static_cast<std::size_t>(std::max_element(pdp.begin(), pdp.end()) - pdp.begin());
  std::size_t first = peak;
  for (std::size_t j = peak >= back ? peak - back : 0; j < peak; ++j) {
    if (pdp[j] >= options.lead_threshold * pdp[peak]) {
      first = j;
      break;
    }
  }
  return static_cast<std::ptrdiff_t>(first) - static_cast<std::ptrdiff_t>(back);
}

TapEnsemble build_impl(const IqCapture& capture, const TrainingSequence& training, const EnsembleOptions& options,
                       bool parallel) {
  capture.validate();
  Anchors a;
  switch (options.sync) {
    case SyncMode::grid: a = grid_anchors(capture, training, options); break;
    case SyncMode::fcch: a = fcch_anchors(capture, training, options); break;
    case SyncMode::search: a = search_anchors(capture, training, options); break;
  }
  if (a.positions.empty()) fail(ErrorKind::no_bursts_found, "no training sequence located in the capture");
  const std::ptrdiff_t shift = earliest_path(capture, training, a, options);

  const ChannelEstimator est(training, options.estimator, capture.sample_rate);
  const std::size_t count = a.positions.size();
  std::vector<std::array<double, kChannelTaps>> rows(count);
  std::vector<char> ok(count, 0);
  const auto& x = capture.samples;
  const auto seg = est.segment_length();
  const auto one = [&](std::size_t i) {
    const std::ptrdiff_t start = static_cast<std::ptrdiff_t>(a.positions[i]) + shift;
    if (start < 0 || static_cast<std::size_t>(start) + seg > x.size()) return;
    try {
      const auto h = est.estimate(std::span<const Complex>(x).subspan(static_cast<std::size_t>(start), seg), a.bursts[i]);
      for (std::size_t j = 0; j < kChannelTaps; ++j) rows[i][j] = std::abs(h.taps[j]);
      ok[i] = 1;
    } catch (const Error&) {
    }
  };
  if (parallel) {
    const auto total = static_cast<long long>(count);
    FADESTAT_OMP_STATIC_LOOP
    for (long long i = 0; i < total; ++i) one(static_cast<std::size_t>(i));
  } else {
    for (std::size_t i = 0; i < count; ++i) one(i);
  }

  TapEnsemble ens(options.label);
  for (std::size_t i = 0; i < count; ++i) {
    if (ok[i]) ens.add_row(a.bursts[i], rows[i]);
  }
  ens.set_skipped(a.skipped + (count - ens.rows()));
  if (ens.rows() == 0) fail(ErrorKind::no_bursts_found, "no burst produced a channel estimate");
  return ens;
}

}  // namespace

TapEnsemble build_ensemble(const IqCapture& capture, const TrainingSequence& training, const EnsembleOptions& options) {
  return build_impl(capture, training, options, true);
}

TapEnsemble build_ensemble_serial(const IqCapture& capture, const TrainingSequence& training,
                                  const EnsembleOptions& options) {
  return build_impl(capture, training, options, false);
}

}  // namespace fadestat
