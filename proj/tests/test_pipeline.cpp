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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "fadestat/error.hpp"
#include "fadestat/pipeline.hpp"

using namespace fadestat;

namespace {

std::string read_fixture(const std::string& name) {
  std::ifstream in(std::string(FADESTAT_TEST_DATA_DIR) + "/" + name, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

GofDecision level(double alpha, AlphaMethod method, bool available = true) {
  GofDecision d{};
  d.alpha_level = available ? alpha : std::nan("");
  d.confirmed = available && alpha > kConfirmLevel;
  d.method = method;
  d.available = available;
  return d;
}

// A row with the levels and score fed in; the model is a placeholder.
FamilyResult fed_row(Family family, double ad, double ks, double score, AlphaMethod method, bool ad_available = true) {
  FamilyResult r{};
  r.family = family;
  r.model = FadingModel::rayleigh(1.0);
  r.ad.decision = level(ad, method, ad_available);
  r.ks.decision = level(ks, method);
  r.kld = std::pow(10.0, -score / 20.0);
  r.confirmed = combined_decision(r.ks.decision, r.ad.decision);
  return r;
}

AnalysisReport fed_report(std::size_t tap, std::vector<FamilyResult> rows, AlphaMethod method) {
  AnalysisReport rep;
  rep.config.gof_mode = method;
  rep.config.families.clear();
  for (const auto& r : rows) rep.config.families.push_back(r.family);
  rep.version = std::string(version());
  TapReport t;
  t.tap = tap;
  t.samples = 3000;
  t.skipped_bursts = 0;
  t.families = std::move(rows);
  rep.taps.push_back(std::move(t));
  return rep;
}

// Line-of-sight tap: Rician and Nakagami fit, the rest do not.
AnalysisReport los_fixture() {
  const auto m = AlphaMethod::bootstrap;
  return fed_report(4,
                    {fed_row(Family::weibull, 0.012, 0.031, 22.4, m), fed_row(Family::rician, 0.65, 0.83, 29.6, m),
                     fed_row(Family::rayleigh, 3.2e-4, 0.004, 18.7, m),
                     fed_row(Family::nakagami, 0.41, 0.57, 27.9, m), fed_row(Family::gamma, 0.0, 2.1e-5, 15.2, m),
                     fed_row(Family::k, 0.021, 0.043, 24.0, m), fed_row(Family::f, 0.038, 0.072, 25.3, m),
                     fed_row(Family::kg, 0.3, 0.045, 26.1, m)},
                    m);
}

// Limited-reflection tap in table mode: only F fits; no AD row for K, F, KG.
AnalysisReport reflection_fixture() {
  const auto m = AlphaMethod::table;
  return fed_report(10,
                    {fed_row(Family::weibull, 1e-3, 0.002, 12.8, m), fed_row(Family::rician, 5e-4, 7e-4, 9.1, m),
                     fed_row(Family::rayleigh, 1e-3, 1.7e-5, 8.3, m), fed_row(Family::nakagami, 0.02, 0.03, 14.6, m),
                     fed_row(Family::gamma, 1e-3, 0.001, 11.9, m), fed_row(Family::k, 0.0, 0.04, 19.9, m, false),
                     fed_row(Family::f, 0.0, 0.11, 31.2, m, false), fed_row(Family::kg, 0.0, 0.01, 20.5, m, false)},
                    m);
}

TapEnsemble drawn_ensemble(const FadingModel& tap0, std::size_t rows, std::uint64_t seed) {
  RandomStream rng(seed);
  TapEnsemble e("drawn");
  std::vector<double> row(kChannelTaps, 0.0);
  for (std::size_t b = 0; b < rows; ++b) {
    row[0] = draw(tap0, rng);
    row[1] = draw(FadingModel::rayleigh(0.3), rng);
    e.add_row(b, row);
  }
  return e;
}

}  // namespace

TEST_CASE("config validation") {
  AnalysisConfig c;
  CHECK_NOTHROW(c.validate());
  CHECK(c.families.size() == 8);
  CHECK(c.gof_mode == AlphaMethod::bootstrap);
  CHECK(c.bootstrap_b == 1000);

  auto expect_input = [](const AnalysisConfig& cfg) {
    try {
      cfg.validate();
      FAIL("accepted an invalid config");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::input);
    }
  };
  AnalysisConfig none = c;
  none.families.clear();
  expect_input(none);
  AnalysisConfig dup = c;
  dup.families = {Family::f, Family::f};
  expect_input(dup);
  AnalysisConfig small = c;
  small.bootstrap_b = 99;
  expect_input(small);
  small.gof_mode = AlphaMethod::table;
  CHECK_NOTHROW(small.validate());
  AnalysisConfig tap = c;
  tap.taps = {14};
  expect_input(tap);
}

TEST_CASE("combined decision rule") {
  const auto b = AlphaMethod::bootstrap;
  CHECK(combined_decision(level(0.06, b), level(0.06, b)));
  CHECK_FALSE(combined_decision(level(0.05, b), level(0.9, b)));
  CHECK_FALSE(combined_decision(level(0.9, b), level(0.05, b)));
  CHECK(combined_decision(level(0.9, AlphaMethod::table), level(0.0, AlphaMethod::table, false)));
  CHECK_FALSE(combined_decision(level(0.01, AlphaMethod::table), level(0.0, AlphaMethod::table, false)));
}

TEST_CASE("empty ensemble") {
  try {
    (void)run_analysis(TapEnsemble("empty"), AnalysisConfig{});
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::no_bursts_found);
  }
}

TEST_CASE("completeness, decision consistency and recorded failures") {
  const TapEnsemble e = drawn_ensemble(FadingModel::nakagami(1.5, 1.0), 400, 5);
  AnalysisConfig c;
  c.gof_mode = AlphaMethod::table;
  const AnalysisReport rep = run_analysis(e, c);
  REQUIRE(rep.taps.size() == kChannelTaps);
  for (std::size_t t = 0; t < kChannelTaps; ++t) {
    const TapReport& tr = rep.taps[t];
    CHECK(tr.tap == t);
    REQUIRE(tr.families.size() == 8);
    for (std::size_t f = 0; f < 8; ++f) {
      const FamilyResult& r = tr.families[f];
      CHECK(r.family == kAllFamilies[f]);
      CHECK(r.confirmed == (!r.failure && combined_decision(r.ks.decision, r.ad.decision)));
      if (t >= 2) {
        // all-zero columns: zeros are dropped, nothing is left to fit
        REQUIRE(r.failure.has_value());
        CHECK_FALSE(r.model.has_value());
      } else {
        CHECK_FALSE(r.failure.has_value());
        CHECK(r.kld.has_value());
        CHECK(r.ad.decision.available == (f < 5));
      }
    }
  }
  CHECK(rep.tap(0).bandwidth.has_value());
  CHECK_FALSE(rep.tap(5).bandwidth.has_value());
  try {
    (void)rep.tap(20);
    FAIL("no error");
  } catch (const Error& err) {
    CHECK(err.kind() == ErrorKind::unknown_tap);
  }
}

TEST_CASE("deterministic and schedule-independent report") {
  const TapEnsemble e = drawn_ensemble(FadingModel::rayleigh(1.0), 300, 9);
  AnalysisConfig c;
  c.families = {Family::rayleigh, Family::nakagami, Family::f};
  c.bootstrap_b = 100;
  c.seed = 4;
  c.taps = {0, 1};
  const std::string a = to_json(run_analysis(e, c));
  CHECK(a == to_json(run_analysis(e, c)));
  CHECK(a == to_json(run_analysis_serial(e, c)));
  c.seed = 5;
  CHECK(a != to_json(run_analysis(e, c)));

  c.gof_mode = AlphaMethod::table;
  CHECK(to_json(run_analysis(e, c)) == to_json(run_analysis_serial(e, c)));
}

TEST_CASE("bootstrap seeds depend on tap and family only") {
  const TapEnsemble e = drawn_ensemble(FadingModel::rayleigh(1.0), 300, 9);
  AnalysisConfig c;
  c.families = {Family::rayleigh, Family::weibull};
  c.bootstrap_b = 100;
  c.taps = {0, 1};
  const AnalysisReport both = run_analysis(e, c);
  c.families = {Family::weibull};
  c.taps = {1};
  const AnalysisReport one = run_analysis(e, c);
  CHECK(one.tap(1).families[0].ks.decision.alpha_level == both.tap(1).families[1].ks.decision.alpha_level);
}

TEST_CASE("report JSON") {
  const TapEnsemble e = drawn_ensemble(FadingModel::rayleigh(1.0), 300, 2);
  AnalysisConfig c;
  c.gof_mode = AlphaMethod::table;
  c.taps = {0, 3};
  c.source = "drawn";
  const AnalysisReport rep = run_analysis(e, c);
  const std::string text = to_json(rep);
  CHECK(text.find("\"schema\": 1") != std::string::npos);
  CHECK(text.find("\"version\": \"" + std::string(version()) + "\"") != std::string::npos);
  const AnalysisReport back = report_from_json(text);
  CHECK(to_json(back) == text);
  CHECK(emit_table(back, 0) == emit_table(rep, 0));
  CHECK(back.tap(0).families[2].model == rep.tap(0).families[2].model);

  // non-finite values travel as strings
  AnalysisReport edge = los_fixture();
  edge.taps[0].families[0].kld = 0.0;
  edge.taps[0].families[1].log_likelihood = -std::numeric_limits<double>::infinity();
  edge.taps[0].families[2].ks.statistic = std::nan("");
  const std::string et = to_json(edge);
  CHECK(et.find("\"kld_score\": \"+inf\"") != std::string::npos);
  CHECK(et.find("\"log_likelihood\": \"-inf\"") != std::string::npos);
  CHECK(et.find("\"statistic\": \"nan\"") != std::string::npos);
  const AnalysisReport eb = report_from_json(et);
  CHECK(std::isinf(eb.taps[0].families[1].log_likelihood));
  CHECK(std::isnan(eb.taps[0].families[2].ks.statistic));
  CHECK(to_json(eb) == et);

  // shortest round trip
  AnalysisReport rt = los_fixture();
  rt.taps[0].families[0].log_likelihood = 0.1;
  CHECK(to_json(rt).find("\"log_likelihood\": 0.1,") != std::string::npos);

  for (const char* bad : {"{", "{\"schema\": 2}", "{\"schema\": 1}"}) {
    try {
      (void)report_from_json(bad);
      FAIL("accepted malformed report");
    } catch (const Error& err) {
      CHECK(err.kind() == ErrorKind::input);
    }
  }
}

TEST_CASE("alpha formatting") {
  const auto b = AlphaMethod::bootstrap;
  CHECK(format_alpha(level(0.65, b)) == "0.65");
  CHECK(format_alpha(level(0.11, b)) == "0.11");
  CHECK(format_alpha(level(1.0, b)) == "1.00");
  CHECK(format_alpha(level(0.004, b)) == "0.004");
  CHECK(format_alpha(level(0.0012, b)) == "0.0012");
  CHECK(format_alpha(level(1.7e-5, b)) == "1.7e-05");
  CHECK(format_alpha(level(9.99e-4, b)) == "1.0e-03");
  CHECK(format_alpha(level(0.0, b)) == "0");
  CHECK(format_alpha(level(0.5, AlphaMethod::table, false)) == "-");
}

TEST_CASE("golden tables") {
  const AnalysisReport los = los_fixture();
  CHECK(emit_table(los, 4) == read_fixture("table_los.txt"));
  CHECK(emit_table_csv(los, 4) == read_fixture("table_los.csv"));
  const auto& rician = los.tap(4).families[1];
  CHECK(rician.confirmed);
  CHECK(emit_table(los, 4).find("Rician   | confirmed       | 0.65            | 0.83            | 29.6") !=
        std::string::npos);

  const AnalysisReport refl = reflection_fixture();
  CHECK(emit_table(refl, 10) == read_fixture("table_reflection.txt"));
  for (const auto& r : refl.tap(10).families) CHECK(r.confirmed == (r.family == Family::f));

  const AnalysisReport one = fed_report(0, {fed_row(Family::rayleigh, 0.3, 0.4, 30.0, AlphaMethod::bootstrap)},
                                        AlphaMethod::bootstrap);
  const std::string t1 = emit_table(one, 0);
  CHECK(std::count(t1.begin(), t1.end(), '\n') == 4);

  try {
    (void)emit_table(los, 3);
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::unknown_tap);
  }
}

TEST_CASE("failed families render as errors") {
  AnalysisReport rep = fed_report(0, {fed_row(Family::rayleigh, 0.3, 0.4, 30.0, AlphaMethod::bootstrap)},
                                  AlphaMethod::bootstrap);
  FamilyResult bad{};
  bad.family = Family::kg;
  bad.failure = FailureInfo{ErrorKind::degenerate_data, "constant data"};
  bad.ks.decision = level(0, AlphaMethod::bootstrap, false);
  bad.ad.decision = level(0, AlphaMethod::bootstrap, false);
  rep.taps[0].families.push_back(bad);
  rep.config.families.push_back(Family::kg);
  const std::string t = emit_table(rep, 0);
  CHECK(t.find("KG       | error: degenerate_data | -") != std::string::npos);
  CHECK(to_json(report_from_json(to_json(rep))) == to_json(rep));
  CHECK(emit_alpha_bars(rep) == "tap,Rayleigh,KG,threshold\n0,0.4,,0.05\n");
}

TEST_CASE("alpha bars shape") {
  const TapEnsemble e = drawn_ensemble(FadingModel::rayleigh(1.0), 200, 3);
  AnalysisConfig c;
  c.gof_mode = AlphaMethod::table;
  const std::string bars = emit_alpha_bars(run_analysis(e, c));
  std::istringstream in(bars);
  std::string line;
  std::getline(in, line);
  CHECK(line == "tap,Weibull,Rician,Rayleigh,Nakagami,Gamma,K,F,KG,threshold");
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    CHECK(std::count(line.begin(), line.end(), ',') == 9);
    CHECK(line.substr(line.rfind(',') + 1) == "0.05");
    ++rows;
  }
  CHECK(rows == 14);
}

TEST_CASE("alpha bars calibration on Rayleigh taps") {
  // Fixed seeds 1..50; expected 47.5 confirmations under the null.
  std::size_t confirmed = 0;
  AnalysisConfig c;
  c.families = {Family::rayleigh};
  c.bootstrap_b = 200;
  c.taps = {0};
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    c.seed = seed;
    const AnalysisReport rep = run_analysis(drawn_ensemble(FadingModel::rayleigh(0.8), 300, 100 + seed), c);
    if (rep.tap(0).families[0].ks.decision.alpha_level > kConfirmLevel) ++confirmed;
  }
  MESSAGE("Rayleigh column above 0.05 in " << confirmed << " of 50 runs");
  CHECK(confirmed >= 45);
}

TEST_CASE("alpha bars calibration on noise-only taps" * doctest::may_fail()) {
  // The magnitude of circular complex Gaussian noise is exactly Rayleigh, so
  // the nesting families confirm and this calibration does not hold.
  const auto preset = find_preset("rayleigh");
  std::size_t none_confirmed = 0;
  AnalysisConfig c;
  c.gof_mode = AlphaMethod::table;
  c.taps = {10};
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    SimulationOptions so = preset.simulation;
    so.seed = seed;
    so.n_bursts = 300;
    const TrainingSequence ts = TrainingSequence::etsi64();
    const Simulation sim = simulate_bursts(preset.profile, ts, so);
    const AnalysisReport rep = run_analysis(build_ensemble(sim.capture, ts), c);
    bool any = false;
    for (const auto& r : rep.tap(10).families) any = any || r.confirmed;
    if (!any) ++none_confirmed;
  }
  MESSAGE("noise-only tap with no family confirmed in " << none_confirmed << " of 10 runs");
  CHECK(none_confirmed >= 9);
}

TEST_CASE("Rayleigh scenario") {
  const SynthOutcome table = [] {
    AnalysisConfig c;
    c.gof_mode = AlphaMethod::table;
    return run_synth_experiment("rayleigh", 3, c);
  }();
  const TapReport& tt = table.report.tap(0);
  CHECK(tt.samples == 3000);
  std::vector<std::pair<double, Family>> scores;
  for (const auto& r : tt.families) {
    REQUIRE(r.kld.has_value());
    scores.emplace_back(kld_score(*r.kld), r.family);
  }
  std::sort(scores.rbegin(), scores.rend());
  bool top3 = false;
  for (std::size_t i = 0; i < 3; ++i) top3 = top3 || scores[i].second == Family::rayleigh;
  CHECK(top3);

  AnalysisConfig c;
  c.families = {Family::rician, Family::rayleigh, Family::nakagami, Family::gamma};
  c.bootstrap_b = 200;
  const SynthOutcome boot = run_synth_experiment("rayleigh", 3, c);
  const TapReport& bt = boot.report.tap(0);
  CHECK(boot.verdict);
  CHECK(bt.families[0].confirmed);
  CHECK(bt.families[1].confirmed);
  CHECK(bt.families[2].confirmed);
  CHECK_FALSE(bt.families[3].confirmed);
}

TEST_CASE("presets") {
  CHECK(preset_names() == std::vector<std::string>{"main-lobe", "back-lobe", "rayleigh", "identity"});
  for (const auto& name : preset_names()) CHECK(find_preset(name).name == name);
  try {
    (void)find_preset("side-lobe");
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::unknown_preset);
  }
  const SynthOutcome id = run_synth_experiment("identity", 1);
  CHECK(id.verdict);
  const TapReport& t = id.report.tap(0);
  REQUIRE(t.families.size() == 8);
  for (const auto& r : t.families) {
    REQUIRE(r.failure.has_value());
    CHECK(r.failure->kind == ErrorKind::degenerate_data);
    CHECK_FALSE(r.confirmed);
  }
  CHECK(emit_table(id.report, 0).find("error: degenerate_data") != std::string::npos);
}

TEST_CASE("fit table feeds the EDF stage") {
  const TapEnsemble e = drawn_ensemble(FadingModel::nakagami(2.0, 1.0), 300, 8);
  AnalysisConfig c;
  c.families = {Family::rayleigh, Family::nakagami, Family::k};
  c.bootstrap_b = 100;
  c.taps = {0, 5};
  const FitTable fits = run_fits(e, c);
  REQUIRE(fits.taps.size() == 2);
  CHECK(fits.taps[1].families[0].failure.has_value());
  const std::string text = to_json(fits);
  const FitTable back = fits_from_json(text);
  CHECK(to_json(back) == text);
  CHECK(to_json(run_gof(e, back, c)) == to_json(run_analysis(e, c)));

  AnalysisConfig more = c;
  more.families.push_back(Family::f);
  try {
    (void)run_gof(e, back, more);
    FAIL("no error");
  } catch (const Error& err) {
    CHECK(err.kind() == ErrorKind::input);
  }

  // a supplied model is used as given
  FitTable swapped = back;
  swapped.taps[0].families[0].model = FadingModel::rayleigh(3.0);
  const AnalysisReport rep = run_gof(e, swapped, c);
  CHECK(rep.tap(0).families[0].model == FadingModel::rayleigh(3.0));
  CHECK_FALSE(rep.tap(0).families[0].confirmed);
}
