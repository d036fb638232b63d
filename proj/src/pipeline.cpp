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

#include "fadestat/pipeline.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <sstream>

#include "json.hpp"

#include "fadestat/parallel.hpp"

#ifndef FADESTAT_VERSION
#define FADESTAT_VERSION "0.0.0"
#endif

namespace fadestat {

namespace {

using Json = nlohmann::ordered_json;

constexpr double kInf = std::numeric_limits<double>::infinity();

std::size_t family_index(Family family) { return static_cast<std::size_t>(family); }

// Numbers go out as JSON numbers (shortest round trip); the three
// non-finite values as strings.
Json number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "+inf" : "-inf";
  return v;
}

double number_from(const Json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "+inf") return kInf;
    if (s == "-inf") return -kInf;
  }
  fail(ErrorKind::input, "report: expected a number, got " + j.dump());
}

std::string shortest(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

ErrorKind parse_error_kind(std::string_view text) {
  for (int i = 0; i <= static_cast<int>(ErrorKind::input); ++i) {
    const auto kind = static_cast<ErrorKind>(i);
    if (to_string(kind) == text) return kind;
  }
  fail(ErrorKind::input, "report: unknown error kind '" + std::string(text) + "'");
}

AlphaMethod parse_alpha_method(std::string_view text) {
  if (text == "table") return AlphaMethod::table;
  if (text == "bootstrap") return AlphaMethod::bootstrap;
  fail(ErrorKind::input, "report: unknown gof mode '" + std::string(text) + "'");
}

FailureInfo failure_of(const Error& e) { return {e.kind(), e.what()}; }

GofDecision unavailable(AlphaMethod method) {
  GofDecision d{};
  d.alpha_level = std::numeric_limits<double>::quiet_NaN();
  d.confirmed = false;
  d.method = method;
  d.available = false;
  return d;
}

struct TapInput {
  std::size_t tap;
  std::optional<SampleSet> data;
  std::optional<FailureInfo> data_failure;
  std::optional<KernelDensity> kde;
  std::optional<FailureInfo> kde_failure;
};

FamilyFit fit_family(const SampleSet& data, Family family) {
  FamilyFit out{};
  out.family = family;
  try {
    const FitResult r = fit(family, data);
    out.model = r.model;
    out.log_likelihood = r.log_likelihood;
    out.converged = r.converged;
    out.iterations = r.iterations;
  } catch (const Error& e) {
    out.failure = failure_of(e);
  }
  return out;
}

FamilyResult analyze_family(const TapInput& input, Family family, const AnalysisConfig& config,
                            bool parallel_bootstrap, const FamilyFit* given) {
  FamilyResult out{};
  out.family = family;
  out.ks.decision = unavailable(config.gof_mode);
  out.ad.decision = unavailable(config.gof_mode);
  if (!input.data) {
    out.failure = input.data_failure;
    return out;
  }
  const SampleSet& data = *input.data;
  try {
    const FamilyFit ff = given ? *given : fit_family(data, family);
    if (ff.failure) throw Error(ff.failure->kind, ff.failure->message);
    if (ff.family != family || !ff.model || ff.model->family() != family) {
      fail(ErrorKind::input, "fit table: no " + std::string(family_name(family)) + " model for tap " +
                                 std::to_string(input.tap));
    }
    const FitResult fitted{*ff.model, ff.log_likelihood, ff.converged, ff.iterations, *ff.model, 0};
    out.model = fitted.model;
    out.log_likelihood = fitted.log_likelihood;
    out.converged = fitted.converged;
    out.iterations = fitted.iterations;

    const EdfStatistic ks = ks_statistic(data, fitted.model);
    const EdfStatistic ad = ad_statistic(data, fitted.model);
    out.ks.statistic = ks.value;
    out.ad.statistic = ad.value;
    if (config.gof_mode == AlphaMethod::table) {
      out.ks.decision = table_alpha(ks, family);
      out.ad.decision = table_alpha(ad, family);
    } else {
      BootstrapOptions opts;
      opts.replicates = config.bootstrap_b;
      opts.seed = RandomStream(config.seed).substream(input.tap * kAllFamilies.size() + family_index(family)).seed();
      const BootstrapResult boot =
          parallel_bootstrap ? bootstrap_alpha(data, fitted, opts) : bootstrap_alpha_serial(data, fitted, opts);
      out.ks.decision = boot.ks;
      out.ad.decision = boot.ad;
    }
    out.confirmed = combined_decision(out.ks.decision, out.ad.decision);
  } catch (const Error& e) {
    FamilyResult failed{};
    failed.family = family;
    failed.failure = failure_of(e);
    failed.ks.decision = unavailable(config.gof_mode);
    failed.ad.decision = unavailable(config.gof_mode);
    return failed;
  }

  if (!input.kde) {
    out.kld_failure = input.kde_failure;
    return out;
  }
  try {
    const KldResult k = kld(*input.kde, *out.model);
    out.kld = k.value;
    out.kld_floored = k.floored;
  } catch (const Error& e) {
    out.kld_failure = failure_of(e);
  }
  return out;
}

std::vector<std::size_t> selected_taps(const AnalysisConfig& config) {
  std::vector<std::size_t> taps = config.taps;
  if (taps.empty()) {
    for (std::size_t t = 0; t < kChannelTaps; ++t) taps.push_back(t);
  }
  return taps;
}

void check_ensemble(const TapEnsemble& ensemble, const AnalysisConfig& config) {
  config.validate();
  if (ensemble.rows() == 0) fail(ErrorKind::no_bursts_found, "analysis: the tap ensemble has no bursts");
}

// The stored fit of (tap, family) when the model comes from a fit table.
const FamilyFit* lookup_fit(const FitTable* fits, std::size_t tap, Family family) {
  if (!fits) return nullptr;
  for (const auto& t : fits->taps) {
    if (t.tap != tap) continue;
    for (const auto& f : t.families) {
      if (f.family == family) return &f;
    }
  }
  fail(ErrorKind::input, "fit table: no " + std::string(family_name(family)) + " entry for tap " + std::to_string(tap));
}

AnalysisReport analyze(const TapEnsemble& ensemble, const AnalysisConfig& config, bool parallel,
                       const FitTable* fits) {
  check_ensemble(ensemble, config);
  const std::vector<std::size_t> taps = selected_taps(config);
  for (const std::size_t t : taps) {
    for (const Family f : config.families) (void)lookup_fit(fits, t, f);
  }

  std::vector<TapInput> inputs(taps.size());
  for (std::size_t i = 0; i < taps.size(); ++i) {
    TapInput& in = inputs[i];
    in.tap = taps[i];
    try {
      in.data = ensemble.column(in.tap);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::unknown_tap) throw;
      in.data_failure = failure_of(e);
      continue;
    }
    try {
      in.kde.emplace(*in.data);
    } catch (const Error& e) {
      in.kde_failure = failure_of(e);
    }
  }

  const std::size_t n_fam = config.families.size();
  const std::size_t cells = inputs.size() * n_fam;
  std::vector<FamilyResult> grid(cells);
  // Bootstrap cells are dominated by one family (KG), so the replicates are
  // the parallel axis there; table mode parallelizes the grid itself.
  const bool parallel_grid = parallel && config.gof_mode == AlphaMethod::table;
  const bool parallel_bootstrap = parallel && config.gof_mode == AlphaMethod::bootstrap;
  if (parallel_grid) {
    ExceptionSlot slot;
    FADESTAT_OMP_DYNAMIC_LOOP
    for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(cells); ++c) {
      slot.run([&] {
        const auto u = static_cast<std::size_t>(c);
        const TapInput& in = inputs[u / n_fam];
        const Family f = config.families[u % n_fam];
        grid[u] = analyze_family(in, f, config, false, lookup_fit(fits, in.tap, f));
      });
    }
    slot.rethrow();
  } else {
    for (std::size_t c = 0; c < cells; ++c) {
      const TapInput& in = inputs[c / n_fam];
      const Family f = config.families[c % n_fam];
      grid[c] = analyze_family(in, f, config, parallel_bootstrap, lookup_fit(fits, in.tap, f));
    }
  }

  AnalysisReport report;
  report.config = config;
  report.version = std::string(version());
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    TapReport tr;
    tr.tap = inputs[i].tap;
    tr.samples = inputs[i].data ? inputs[i].data->size() : 0;
    tr.skipped_bursts = ensemble.skipped();
    if (inputs[i].kde) tr.bandwidth = inputs[i].kde->bandwidth();
    for (std::size_t f = 0; f < n_fam; ++f) tr.families.push_back(std::move(grid[i * n_fam + f]));
    report.taps.push_back(std::move(tr));
  }
  return report;
}

Json decision_json(const StatisticResult& s) {
  Json j;
  j["statistic"] = number(s.statistic);
  j["alpha_level"] = s.decision.available ? number(s.decision.alpha_level) : Json(nullptr);
  j["confirmed"] = s.decision.confirmed;
  j["method"] = std::string(to_string(s.decision.method));
  j["available"] = s.decision.available;
  j["extrapolated"] = s.decision.extrapolated;
  j["estimated_parameters"] = s.decision.estimated_parameters;
  return j;
}

StatisticResult decision_from(const Json& j) {
  StatisticResult s;
  s.statistic = number_from(j.at("statistic"));
  s.decision.available = j.at("available").get<bool>();
  s.decision.alpha_level =
      j.at("alpha_level").is_null() ? std::numeric_limits<double>::quiet_NaN() : number_from(j.at("alpha_level"));
  s.decision.confirmed = j.at("confirmed").get<bool>();
  s.decision.method = parse_alpha_method(j.at("method").get<std::string>());
  s.decision.extrapolated = j.at("extrapolated").get<bool>();
  s.decision.estimated_parameters = j.at("estimated_parameters").get<bool>();
  return s;
}

Json failure_json(const std::optional<FailureInfo>& f) {
  if (!f) return nullptr;
  Json j;
  j["kind"] = std::string(to_string(f->kind));
  j["message"] = f->message;
  return j;
}

std::optional<FailureInfo> failure_from(const Json& j) {
  if (j.is_null()) return std::nullopt;
  return FailureInfo{parse_error_kind(j.at("kind").get<std::string>()), j.at("message").get<std::string>()};
}

Json model_json(const FadingModel& model) {
  Json j;
  j["family"] = std::string(family_name(model.family()));
  Json params = Json::object();
  const auto names = parameter_names(model.family());
  const auto values = model.to_vector();
  for (std::size_t i = 0; i < names.size(); ++i) params[std::string(names[i])] = number(values[i]);
  j["params"] = params;
  j["text"] = model.to_string();
  return j;
}

FadingModel model_from(const Json& j) {
  const Family family = parse_family(j.at("family").get<std::string>());
  std::vector<double> values;
  for (const auto name : parameter_names(family)) values.push_back(number_from(j.at("params").at(std::string(name))));
  return FadingModel::from_vector(family, values);
}

std::string score_text(const FamilyResult& r) {
  if (!r.kld) return "-";
  const double s = kld_score(*r.kld);
  if (std::isinf(s)) return s > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", s);
  return buf;
}

std::string hypothesis_text(const FamilyResult& r) {
  if (r.failure) return "error: " + std::string(to_string(r.failure->kind));
  return r.confirmed ? "confirmed" : "rejected";
}

struct TableCells {
  std::string pdf, hypothesis, ad, ks, score;
};

std::vector<TableCells> table_cells(const TapReport& tap) {
  std::vector<TableCells> rows;
  for (const Family family : kAllFamilies) {
    const auto it = std::find_if(tap.families.begin(), tap.families.end(),
                                 [&](const FamilyResult& r) { return r.family == family; });
    if (it == tap.families.end()) continue;
    rows.push_back({std::string(family_name(family)), hypothesis_text(*it), format_alpha(it->ad.decision),
                    format_alpha(it->ks.decision), score_text(*it)});
  }
  return rows;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

ChannelProfile silent_profile() {
  ChannelProfile p;
  p.fill(std::monostate{});
  return p;
}

const FamilyResult* find_family(const TapReport& tap, Family family) {
  for (const auto& r : tap.families) {
    if (r.family == family) return &r;
  }
  return nullptr;
}

bool is_confirmed(const TapReport& tap, Family family) {
  const FamilyResult* r = find_family(tap, family);
  return r && !r->failure && r->confirmed;
}

std::string confirmed_list(const TapReport& tap) {
  std::string out;
  for (const auto& r : tap.families) {
    if (r.failure || !r.confirmed) continue;
    if (!out.empty()) out += ", ";
    out += family_name(r.family);
  }
  return out.empty() ? "none" : out;
}

}  // namespace

std::string_view version() noexcept { return FADESTAT_VERSION; }

void AnalysisConfig::validate() const {
  if (families.empty()) fail(ErrorKind::input, "config: select at least one family");
  std::set<Family> seen;
  for (const Family f : families) {
    if (!seen.insert(f).second) fail(ErrorKind::input, "config: family '" + std::string(family_name(f)) + "' listed twice");
  }
  if (gof_mode == AlphaMethod::bootstrap && bootstrap_b < 100) {
    fail(ErrorKind::input, "config: bootstrap_B must be at least 100, got " + std::to_string(bootstrap_b));
  }
  std::set<std::size_t> tap_seen;
  for (const std::size_t t : taps) {
    if (t >= kChannelTaps) fail(ErrorKind::input, "config: tap index " + std::to_string(t) + " out of range 0..13");
    if (!tap_seen.insert(t).second) fail(ErrorKind::input, "config: tap " + std::to_string(t) + " listed twice");
  }
}

const TapReport& AnalysisReport::tap(std::size_t index) const {
  for (const auto& t : taps) {
    if (t.tap == index) return t;
  }
  fail(ErrorKind::unknown_tap, "report: tap " + std::to_string(index) + " is not in the report");
}

bool combined_decision(const GofDecision& ks, const GofDecision& ad) noexcept {
  const bool ks_ok = ks.available && ks.alpha_level > kConfirmLevel;
  const bool ad_ok = !ad.available || ad.alpha_level > kConfirmLevel;
  return ks_ok && ad_ok;
}

AnalysisReport run_analysis(const TapEnsemble& ensemble, const AnalysisConfig& config) {
  return analyze(ensemble, config, true, nullptr);
}

AnalysisReport run_analysis_serial(const TapEnsemble& ensemble, const AnalysisConfig& config) {
  return analyze(ensemble, config, false, nullptr);
}

AnalysisReport run_gof(const TapEnsemble& ensemble, const FitTable& fits, const AnalysisConfig& config) {
  return analyze(ensemble, config, true, &fits);
}

FitTable run_fits(const TapEnsemble& ensemble, const AnalysisConfig& config) {
  check_ensemble(ensemble, config);
  const std::vector<std::size_t> taps = selected_taps(config);
  const std::size_t n_fam = config.families.size();
  std::vector<std::optional<SampleSet>> columns(taps.size());
  std::vector<std::optional<FailureInfo>> column_failures(taps.size());
  for (std::size_t i = 0; i < taps.size(); ++i) {
    try {
      columns[i] = ensemble.column(taps[i]);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::unknown_tap) throw;
      column_failures[i] = failure_of(e);
    }
  }
  std::vector<FamilyFit> grid(taps.size() * n_fam);
  ExceptionSlot slot;
  FADESTAT_OMP_DYNAMIC_LOOP
  for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(grid.size()); ++c) {
    slot.run([&] {
      const auto u = static_cast<std::size_t>(c);
      const std::size_t i = u / n_fam;
      const Family f = config.families[u % n_fam];
      if (columns[i]) {
        grid[u] = fit_family(*columns[i], f);
      } else {
        grid[u].family = f;
        grid[u].failure = column_failures[i];
      }
    });
  }
  slot.rethrow();
  FitTable table;
  for (std::size_t i = 0; i < taps.size(); ++i) {
    TapFits tf;
    tf.tap = taps[i];
    tf.samples = columns[i] ? columns[i]->size() : 0;
    for (std::size_t f = 0; f < n_fam; ++f) tf.families.push_back(std::move(grid[i * n_fam + f]));
    table.taps.push_back(std::move(tf));
  }
  return table;
}

std::string to_json(const FitTable& fits) {
  Json root;
  root["schema"] = kReportSchema;
  root["tool"] = "fadestat";
  root["version"] = std::string(version());
  Json taps = Json::array();
  for (const auto& t : fits.taps) {
    Json jt;
    jt["tap"] = t.tap;
    jt["samples"] = t.samples;
    Json rows = Json::array();
    for (const auto& f : t.families) {
      Json jr;
      jr["family"] = std::string(family_name(f.family));
      jr["status"] = f.failure ? "error" : "ok";
      jr["error"] = failure_json(f.failure);
      if (!f.failure) {
        jr["model"] = model_json(*f.model);
        jr["log_likelihood"] = number(f.log_likelihood);
        jr["converged"] = f.converged;
        jr["iterations"] = f.iterations;
      }
      rows.push_back(jr);
    }
    jt["families"] = rows;
    taps.push_back(jt);
  }
  root["taps"] = taps;
  return root.dump(2) + "\n";
}

FitTable fits_from_json(std::string_view text) {
  Json root;
  try {
    root = Json::parse(text.begin(), text.end());
  } catch (const Json::exception& e) {
    fail(ErrorKind::input, std::string("fit table: malformed JSON: ") + e.what());
  }
  try {
    if (root.at("schema").get<int>() != kReportSchema) {
      fail(ErrorKind::input, "fit table: unsupported schema " + root.at("schema").dump());
    }
    FitTable table;
    for (const auto& jt : root.at("taps")) {
      TapFits t;
      t.tap = jt.at("tap").get<std::size_t>();
      t.samples = jt.at("samples").get<std::size_t>();
      for (const auto& jr : jt.at("families")) {
        FamilyFit f{};
        f.family = parse_family(jr.at("family").get<std::string>());
        f.failure = failure_from(jr.at("error"));
        if (!f.failure) {
          f.model = model_from(jr.at("model"));
          f.log_likelihood = number_from(jr.at("log_likelihood"));
          f.converged = jr.at("converged").get<bool>();
          f.iterations = jr.at("iterations").get<std::size_t>();
        }
        t.families.push_back(std::move(f));
      }
      table.taps.push_back(std::move(t));
    }
    return table;
  } catch (const Json::exception& e) {
    fail(ErrorKind::input, std::string("fit table: ") + e.what());
  }
}

std::string to_json(const AnalysisReport& report) {
  Json root;
  root["schema"] = kReportSchema;
  root["tool"] = "fadestat";
  root["version"] = report.version;

  Json cfg;
  Json fams = Json::array();
  for (const Family f : report.config.families) fams.push_back(std::string(family_name(f)));
  cfg["families"] = fams;
  cfg["gof_mode"] = std::string(to_string(report.config.gof_mode));
  cfg["bootstrap_B"] = report.config.bootstrap_b;
  cfg["seed"] = report.config.seed;
  cfg["taps"] = report.config.taps;
  cfg["source"] = report.config.source;
  root["config"] = cfg;

  Json taps = Json::array();
  for (const auto& t : report.taps) {
    Json jt;
    jt["tap"] = t.tap;
    jt["samples"] = t.samples;
    jt["skipped_bursts"] = t.skipped_bursts;
    jt["bandwidth"] = t.bandwidth ? number(*t.bandwidth) : Json(nullptr);
    Json rows = Json::array();
    for (const auto& r : t.families) {
      Json jr;
      jr["family"] = std::string(family_name(r.family));
      jr["status"] = r.failure ? "error" : "ok";
      jr["error"] = failure_json(r.failure);
      if (!r.failure) {
        jr["model"] = model_json(*r.model);
        jr["log_likelihood"] = number(r.log_likelihood);
        jr["converged"] = r.converged;
        jr["iterations"] = r.iterations;
        jr["ks"] = decision_json(r.ks);
        jr["ad"] = decision_json(r.ad);
        jr["kld"] = r.kld ? number(*r.kld) : Json(nullptr);
        jr["kld_score"] = r.kld ? number(kld_score(*r.kld)) : Json(nullptr);
        jr["kld_floored"] = r.kld_floored;
        jr["kld_error"] = failure_json(r.kld_failure);
      }
      jr["confirmed"] = r.confirmed;
      rows.push_back(jr);
    }
    jt["families"] = rows;
    taps.push_back(jt);
  }
  root["taps"] = taps;
  return root.dump(2) + "\n";
}

AnalysisReport report_from_json(std::string_view text) {
  Json root;
  try {
    root = Json::parse(text.begin(), text.end());
  } catch (const Json::exception& e) {
    fail(ErrorKind::input, std::string("report: malformed JSON: ") + e.what());
  }
  try {
    if (root.at("schema").get<int>() != kReportSchema) {
      fail(ErrorKind::input, "report: unsupported schema " + root.at("schema").dump());
    }
    AnalysisReport report;
    report.version = root.at("version").get<std::string>();
    const Json& cfg = root.at("config");
    report.config.families.clear();
    for (const auto& f : cfg.at("families")) report.config.families.push_back(parse_family(f.get<std::string>()));
    report.config.gof_mode = parse_alpha_method(cfg.at("gof_mode").get<std::string>());
    report.config.bootstrap_b = cfg.at("bootstrap_B").get<std::size_t>();
    report.config.seed = cfg.at("seed").get<std::uint64_t>();
    report.config.taps = cfg.at("taps").get<std::vector<std::size_t>>();
    report.config.source = cfg.at("source").get<std::string>();

    for (const auto& jt : root.at("taps")) {
      TapReport t;
      t.tap = jt.at("tap").get<std::size_t>();
      t.samples = jt.at("samples").get<std::size_t>();
      t.skipped_bursts = jt.at("skipped_bursts").get<std::size_t>();
      if (!jt.at("bandwidth").is_null()) t.bandwidth = number_from(jt.at("bandwidth"));
      for (const auto& jr : jt.at("families")) {
        FamilyResult r{};
        r.family = parse_family(jr.at("family").get<std::string>());
        r.failure = failure_from(jr.at("error"));
        r.confirmed = jr.at("confirmed").get<bool>();
        if (r.failure) {
          r.ks.decision = unavailable(report.config.gof_mode);
          r.ad.decision = unavailable(report.config.gof_mode);
        } else {
          r.model = model_from(jr.at("model"));
          r.log_likelihood = number_from(jr.at("log_likelihood"));
          r.converged = jr.at("converged").get<bool>();
          r.iterations = jr.at("iterations").get<std::size_t>();
          r.ks = decision_from(jr.at("ks"));
          r.ad = decision_from(jr.at("ad"));
          if (!jr.at("kld").is_null()) r.kld = number_from(jr.at("kld"));
          r.kld_floored = jr.at("kld_floored").get<bool>();
          r.kld_failure = failure_from(jr.at("kld_error"));
        }
        t.families.push_back(std::move(r));
      }
      report.taps.push_back(std::move(t));
    }
    return report;
  } catch (const Json::exception& e) {
    fail(ErrorKind::input, std::string("report: ") + e.what());
  }
}

std::string format_alpha(const GofDecision& decision) {
  if (!decision.available || std::isnan(decision.alpha_level)) return "-";
  const double a = decision.alpha_level;
  if (a == 0.0) return "0";
  char buf[32];
  if (a < 1e-3) {
    std::snprintf(buf, sizeof buf, "%.1e", a);
  } else if (a < 1e-2) {
    std::snprintf(buf, sizeof buf, "%.2g", a);
  } else {
    std::snprintf(buf, sizeof buf, "%.2f", a);
  }
  return buf;
}

std::string emit_table(const AnalysisReport& report, std::size_t tap) {
  const TapReport& t = report.tap(tap);
  const auto rows = table_cells(t);
  const std::array<std::string, 5> header = {"PDF", "Null hypothesis", "alpha-level A-D", "alpha-level K-S",
                                             "-20log KLD"};
  std::array<std::size_t, 5> width{};
  for (std::size_t c = 0; c < 5; ++c) width[c] = header[c].size();
  for (const auto& r : rows) {
    const std::array<const std::string*, 5> cells = {&r.pdf, &r.hypothesis, &r.ad, &r.ks, &r.score};
    for (std::size_t c = 0; c < 5; ++c) width[c] = std::max(width[c], cells[c]->size());
  }
  std::ostringstream os;
  os << "tap " << t.tap << ": " << t.samples << " samples, " << t.skipped_bursts << " skipped bursts, alpha by "
     << to_string(report.config.gof_mode) << "\n";
  auto line = [&](const std::array<const std::string*, 5>& cells) {
    for (std::size_t c = 0; c < 5; ++c) {
      if (c) os << " | ";
      os << *cells[c];
      if (c + 1 < 5) os << std::string(width[c] - cells[c]->size(), ' ');
    }
    os << "\n";
  };
  line({&header[0], &header[1], &header[2], &header[3], &header[4]});
  for (std::size_t c = 0; c < 5; ++c) {
    if (c) os << "-+-";
    os << std::string(width[c], '-');
  }
  os << "\n";
  for (const auto& r : rows) line({&r.pdf, &r.hypothesis, &r.ad, &r.ks, &r.score});
  return os.str();
}

std::string emit_table_csv(const AnalysisReport& report, std::size_t tap) {
  const TapReport& t = report.tap(tap);
  std::ostringstream os;
  os << "tap,pdf,null_hypothesis,alpha_ad,alpha_ks,score\n";
  for (const auto& r : table_cells(t)) {
    os << t.tap << ',' << r.pdf << ',' << csv_field(r.hypothesis) << ',' << r.ad << ',' << r.ks << ',' << r.score
       << "\n";
  }
  return os.str();
}

std::string emit_alpha_bars(const AnalysisReport& report) {
  std::vector<Family> columns;
  for (const Family family : kAllFamilies) {
    if (std::find(report.config.families.begin(), report.config.families.end(), family) !=
        report.config.families.end()) {
      columns.push_back(family);
    }
  }
  std::ostringstream os;
  os << "tap";
  for (const Family f : columns) os << ',' << family_name(f);
  os << ",threshold\n";
  for (const auto& t : report.taps) {
    os << t.tap;
    for (const Family f : columns) {
      os << ',';
      const FamilyResult* r = find_family(t, f);
      if (r && !r->failure && r->ks.decision.available) os << shortest(r->ks.decision.alpha_level);
    }
    os << ',' << shortest(kConfirmLevel) << "\n";
  }
  return os.str();
}

std::vector<std::string> preset_names() { return {"main-lobe", "back-lobe", "rayleigh", "identity"}; }

SynthPreset find_preset(std::string_view name) {
  SynthPreset p;
  p.name = std::string(name);
  p.profile = silent_profile();
  p.simulation = SimulationOptions{};
  if (name == "main-lobe") {
    p.description = "line-of-sight tap 0 (Rician) followed by three diffuse Rayleigh echoes, 20 dB";
    p.profile[0] = FadingModel::rician(1.0, 0.35);
    p.profile[1] = FadingModel::rayleigh(0.3);
    p.profile[3] = FadingModel::rayleigh(0.15);
    p.profile[6] = FadingModel::rayleigh(0.08);
    p.simulation.snr_db = 20.0;
  } else if (name == "back-lobe") {
    p.description = "limited-reflection tap 0 (F composite) followed by two Rayleigh echoes, 20 dB";
    p.profile[0] = FadingModel::f(1.0, 1.2, 1.0);
    p.profile[2] = FadingModel::rayleigh(0.3);
    p.profile[5] = FadingModel::rayleigh(0.15);
    p.simulation.snr_db = 20.0;
  } else if (name == "rayleigh") {
    p.description = "single Rayleigh tap, 25 dB";
    p.profile[0] = FadingModel::rayleigh(1.0);
    p.simulation.snr_db = 25.0;
  } else if (name == "identity") {
    p.description = "fixed gains without fading or noise";
    p.profile[0] = FixedGain{1.0, 0.0};
    p.profile[1] = FixedGain{0.5, 0.0};
    p.profile[4] = FixedGain{0.25, 0.0};
    p.simulation.snr_db = kInf;
    p.simulation.n_bursts = 200;
  } else {
    fail(ErrorKind::unknown_preset, "unknown preset '" + std::string(name) + "'");
  }
  return p;
}

SynthOutcome run_synth_experiment(std::string_view preset, std::uint64_t seed, AnalysisConfig config,
                                  std::optional<std::size_t> bursts) {
  SynthOutcome out{find_preset(preset), {}, {}, false, {}};
  SimulationOptions sim = out.preset.simulation;
  sim.seed = seed;
  if (bursts) sim.n_bursts = *bursts;
  const TrainingSequence training = TrainingSequence::etsi64();
  const Simulation s = simulate_bursts(out.preset.profile, training, sim);
  EnsembleOptions eo;
  eo.label = "synth:" + out.preset.name;
  out.ensemble = build_ensemble(s.capture, training, eo);

  config.seed = seed;
  if (config.taps.empty()) config.taps = {out.preset.dominant_tap};
  if (config.source.empty()) {
    config.source = "synth:" + out.preset.name + " bursts=" + std::to_string(sim.n_bursts) + " seed=" + std::to_string(seed);
  }
  out.report = run_analysis(out.ensemble, config);

  const TapReport& tap = out.report.tap(out.preset.dominant_tap);
  std::ostringstream summary;
  summary << "preset " << out.preset.name << ", seed " << seed << ", tap " << tap.tap << ": confirmed "
          << confirmed_list(tap);
  if (out.preset.name == "main-lobe") {
    out.verdict = is_confirmed(tap, Family::rician);
    summary << "; expected Rician confirmed";
  } else if (out.preset.name == "back-lobe") {
    const FamilyResult* f = find_family(tap, Family::f);
    const FamilyResult* r = find_family(tap, Family::rayleigh);
    const bool rayleigh_rejected = r && !r->failure && r->ks.decision.alpha_level < 1e-3;
    bool others_rejected = true;
    for (const auto& row : tap.families) {
      if (row.family != Family::f && !row.failure && row.confirmed) others_rejected = false;
    }
    out.verdict = f && is_confirmed(tap, Family::f) && rayleigh_rejected && others_rejected;
    summary << "; expected only F confirmed, Rayleigh K-S level below 0.001";
  } else if (out.preset.name == "rayleigh") {
    out.verdict = is_confirmed(tap, Family::rayleigh);
    summary << "; expected Rayleigh confirmed";
  } else {
    bool all_degenerate = true;
    for (const auto& row : tap.families) {
      if (!row.failure || row.failure->kind != ErrorKind::degenerate_data) all_degenerate = false;
    }
    out.verdict = all_degenerate;
    summary << "; expected degenerate_data for every family";
  }
  summary << " -> " << (out.verdict ? "PASS" : "FAIL");
  out.summary = summary.str();
  return out;
}

}  // namespace fadestat
