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

// Command-line front end: estimate, fit, gof, analyze, synth, table, bars.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fadestat/error.hpp"
#include "fadestat/gsm_channel.hpp"
#include "fadestat/pipeline.hpp"

using namespace fadestat;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitAnalysis = 3;

struct InputOptions {
  std::string input;
  std::string format;
  double sample_rate = kGsmSampleRate;
  std::string training = "etsi64";
  std::string sync = "grid";
  std::size_t burst_period = kFramePeriod;
};

struct AnalysisOptions {
  std::string families = "all";
  std::string gof = "bootstrap";
  std::size_t bootstrap_b = 1000;
  std::uint64_t seed = 1;
  std::vector<std::size_t> taps;
};

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::input, "cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::input, "cannot write " + path);
  out << text;
}

void add_input_options(CLI::App* app, InputOptions& o) {
  app->add_option("--input", o.input, "IQ capture (float32 I/Q pairs) or tap-ensemble CSV")->required();
  app->add_option("--format", o.format, "Input format; inferred from the extension when omitted")
      ->check(CLI::IsMember({"iq", "csv"}));
  app->add_option("--sample-rate", o.sample_rate, "IQ sample rate in Hz")->capture_default_str();
  app->add_option("--training", o.training, "etsi64, paper63 or custom:<bits>")->capture_default_str();
  app->add_option("--sync", o.sync, "Burst location: grid, fcch or search")
      ->check(CLI::IsMember({"grid", "fcch", "search"}))
      ->capture_default_str();
  app->add_option("--burst-period", o.burst_period, "Samples between bursts for grid sync")->capture_default_str();
}

void add_analysis_options(CLI::App* app, AnalysisOptions& o, bool with_gof) {
  app->add_option("--families", o.families, "Comma-separated families or 'all'")->capture_default_str();
  app->add_option("--tap", o.taps, "Tap indices to analyze (default all)")->delimiter(',');
  if (!with_gof) return;
  app->add_option("--gof", o.gof, "Level method")->check(CLI::IsMember({"table", "bootstrap"}))->capture_default_str();
  app->add_option("--bootstrap-B", o.bootstrap_b, "Bootstrap replicates")->capture_default_str();
  app->add_option("--seed", o.seed, "Bootstrap seed")->capture_default_str();
}

std::vector<Family> parse_families(const std::string& text) {
  if (text == "all") return {kAllFamilies.begin(), kAllFamilies.end()};
  std::vector<Family> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(parse_family(item));
  }
  return out;
}

AnalysisConfig make_config(const AnalysisOptions& o, const std::string& source) {
  AnalysisConfig c;
  c.families = parse_families(o.families);
  c.gof_mode = o.gof == "table" ? AlphaMethod::table : AlphaMethod::bootstrap;
  c.bootstrap_b = o.bootstrap_b;
  c.seed = o.seed;
  c.taps = o.taps;
  c.source = source;
  c.validate();
  return c;
}

bool is_csv(const InputOptions& o) {
  if (!o.format.empty()) return o.format == "csv";
  return o.input.size() >= 4 && o.input.substr(o.input.size() - 4) == ".csv";
}

EnsembleOptions ensemble_options(const InputOptions& o) {
  EnsembleOptions eo;
  eo.sync = parse_sync_mode(o.sync);
  eo.burst_period = o.burst_period;
  eo.label = o.input;
  return eo;
}

TapEnsemble load_ensemble(const InputOptions& o) {
  if (is_csv(o)) return read_ensemble_csv(o.input);
  const IqCapture capture = read_iq_file(o.input, o.sample_rate);
  const TrainingSequence training = TrainingSequence::parse(o.training);
  TapEnsemble e = build_ensemble(capture, training, ensemble_options(o));
  std::cerr << "located " << e.rows() << " bursts, skipped " << e.skipped() << "\n";
  return e;
}

void warn_failures(const AnalysisReport& report) {
  for (const auto& t : report.taps) {
    for (const auto& r : t.families) {
      if (r.failure) {
        std::cerr << "tap " << t.tap << " " << family_name(r.family) << ": " << to_string(r.failure->kind) << ": "
                  << r.failure->message << "\n";
      }
    }
  }
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::input:
    case ErrorKind::unknown_tap:
    case ErrorKind::unknown_preset: return kExitInput;
    default: return kExitAnalysis;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fadestat: fading channel statistics from GSM training bursts"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(version()));

  InputOptions in;
  AnalysisOptions an;
  std::string out;
  std::string models;
  std::string preset;
  std::optional<std::size_t> bursts;
  std::string ensemble_out;
  std::string iq_out;
  bool csv = false;

  auto* estimate = app.add_subcommand("estimate", "IQ capture to tap-ensemble CSV");
  add_input_options(estimate, in);
  estimate->add_option("--out", out, "Output CSV (default stdout)");

  auto* fit_cmd = app.add_subcommand("fit", "Tap ensemble to fitted models JSON");
  add_input_options(fit_cmd, in);
  add_analysis_options(fit_cmd, an, false);
  fit_cmd->add_option("--out", out, "Output JSON (default stdout)");

  auto* gof = app.add_subcommand("gof", "Tap ensemble and fitted models to report JSON");
  add_input_options(gof, in);
  add_analysis_options(gof, an, true);
  gof->add_option("--models", models, "Fitted models JSON from 'fit'")->required();
  gof->add_option("--out", out, "Output JSON (default stdout)");

  auto* analyze = app.add_subcommand("analyze", "Fit, test and score every family on every tap");
  add_input_options(analyze, in);
  add_analysis_options(analyze, an, true);
  analyze->add_option("--out", out, "Output JSON (default stdout)");

  auto* synth = app.add_subcommand("synth", "Run a synthetic preset experiment");
  synth->add_option("preset", preset, "main-lobe, back-lobe, rayleigh or identity")->required();
  add_analysis_options(synth, an, true);
  synth->add_option("--bursts", bursts, "Override the preset burst count");
  synth->add_option("--out", out, "Report JSON");
  synth->add_option("--ensemble-out", ensemble_out, "Tap-ensemble CSV");
  synth->add_option("--iq-out", iq_out, "Simulated IQ capture");

  auto* table = app.add_subcommand("table", "Render per-tap tables from a report");
  table->add_option("--input", in.input, "Report JSON")->required();
  table->add_option("--tap", an.taps, "Taps to render (default all)")->delimiter(',');
  table->add_flag("--csv", csv, "CSV instead of text");
  table->add_option("--out", out, "Output file (default stdout)");

  auto* bars = app.add_subcommand("bars", "K-S level matrix (tap x family) from a report");
  bars->add_option("--input", in.input, "Report JSON")->required();
  bars->add_option("--out", out, "Output CSV (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    (void)app.exit(e);
    return kExitInput;
  }

  try {
    if (*estimate) {
      const IqCapture capture = read_iq_file(in.input, in.sample_rate);
      const TrainingSequence training = TrainingSequence::parse(in.training);
      const TapEnsemble e = build_ensemble(capture, training, ensemble_options(in));
      std::cerr << "located " << e.rows() << " bursts, skipped " << e.skipped() << "\n";
      write_text(out, e.to_csv());
    } else if (*fit_cmd) {
      const AnalysisConfig c = make_config(an, in.input);
      write_text(out, to_json(run_fits(load_ensemble(in), c)));
    } else if (*gof) {
      const FitTable fits = fits_from_json(read_text(models));
      AnalysisConfig c = make_config(an, in.input);
      if (gof->count("--families") == 0 && !fits.taps.empty()) {
        c.families.clear();
        for (const auto& f : fits.taps.front().families) c.families.push_back(f.family);
      }
      if (c.taps.empty()) {
        for (const auto& t : fits.taps) c.taps.push_back(t.tap);
      }
      c.validate();
      const AnalysisReport report = run_gof(load_ensemble(in), fits, c);
      warn_failures(report);
      write_text(out, to_json(report));
    } else if (*analyze) {
      const AnalysisConfig c = make_config(an, in.input);
      const AnalysisReport report = run_analysis(load_ensemble(in), c);
      warn_failures(report);
      write_text(out, to_json(report));
    } else if (*synth) {
      const SynthPreset p = find_preset(preset);
      AnalysisConfig c = make_config(an, {});
      const SynthOutcome o = run_synth_experiment(preset, an.seed, c, bursts);
      if (!out.empty()) write_text(out, to_json(o.report));
      if (!ensemble_out.empty()) write_ensemble_csv(ensemble_out, o.ensemble);
      if (!iq_out.empty()) {
        SimulationOptions so = p.simulation;
        so.seed = an.seed;
        if (bursts) so.n_bursts = *bursts;
        write_iq_file(iq_out, simulate_bursts(p.profile, TrainingSequence::etsi64(), so).capture);
      }
      for (const auto& t : o.report.taps) std::cout << emit_table(o.report, t.tap) << "\n";
      std::cout << o.summary << "\n";
    } else if (*table) {
      const AnalysisReport report = report_from_json(read_text(in.input));
      std::vector<std::size_t> taps = an.taps;
      if (taps.empty()) {
        for (const auto& t : report.taps) taps.push_back(t.tap);
      }
      std::string text;
      for (std::size_t i = 0; i < taps.size(); ++i) {
        if (csv) {
          std::string part = emit_table_csv(report, taps[i]);
          text += i == 0 ? part : part.substr(part.find('\n') + 1);
        } else {
          text += (i ? "\n" : "") + emit_table(report, taps[i]);
        }
      }
      write_text(out, text);
    } else if (*bars) {
      write_text(out, emit_alpha_bars(report_from_json(read_text(in.input))));
    }
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitAnalysis;
  }
  return 0;
}
