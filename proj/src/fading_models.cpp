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

#include "fadestat/fading_models.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/distributions/non_central_chi_squared.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/hypergeometric_1F1.hpp>

#include "fadestat/error.hpp"
#include "fadestat/special_functions.hpp"

namespace fadestat {

namespace {

constexpr double kLn2 = std::numbers::ln2;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

void require(bool ok, const std::string& what) {
  if (!ok) fail(ErrorKind::invalid_parameter, what);
}

bool positive(double v) { return v > 0.0 && std::isfinite(v); }

// ---- Generalized-K pieces shared by pdf and the quadrature cdf ----

// KG log-density with the parameter-only terms and the Bessel order set up once.
class KgDensity {
 public:
  explicit KgDensity(const KgParams& p)
      : beta_(p.k + p.m - 1.0), bessel_(p.k - p.m), arg_scale_(2.0 * std::sqrt(p.m * p.k / p.omega)) {
    constant_ = 2.0 * kLn2 + 0.5 * (beta_ + 1.0) * std::log(p.m * p.k / p.omega) - ln_gamma(p.m) - ln_gamma(p.k);
  }

  double log_density(double x) const { return constant_ + beta_ * std::log(x) + bessel_.ln_k(arg_scale_ * x); }
  double operator()(double x) const { return x > 0.0 ? std::exp(log_density(x)) : 0.0; }

 private:
  double beta_;
  BesselKOrder bessel_;
  double arg_scale_;
  double constant_ = 0.0;
};

struct KgQuadrature {
  boost::math::quadrature::tanh_sinh<double> head;
  boost::math::quadrature::exp_sinh<double> tail;
};

// One set of integrators per thread: the Boost objects grow their abscissa
// tables lazily and are not safe to share.
KgQuadrature& kg_quadrature() {
  thread_local KgQuadrature q;
  return q;
}

double kg_integral_head(const KgDensity& f, double x) {
  if (x <= 0.0) return 0.0;
  return kg_quadrature().head.integrate(f, 0.0, x, 1e-13);
}

double kg_integral_tail(const KgDensity& f, double x) {
  return kg_quadrature().tail.integrate(f, x, std::numeric_limits<double>::infinity(), 1e-13);
}

// Fixed-order Gauss-Legendre on panels no wider than `panel` and no wider than
// half their left end, so the x^(2 min(m,k) - 1) behaviour near the origin
// is resolved without adaptive refinement.
double kg_integral_between(const KgDensity& f, double a, double b, double panel) {
  double sum = 0.0;
  double lo = a;
  while (lo < b) {
    double hi = std::min({b, lo + panel, lo > 0.0 ? 1.5 * lo : b});
    if (b - hi < 1e-3 * panel) hi = b;
    sum += boost::math::quadrature::gauss<double, 10>::integrate(f, lo, hi);
    lo = hi;
  }
  return sum;
}

double kg_cdf(const KgParams& p, double x) {
  if (x <= 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  const KgDensity f(p);
  const double head = kg_integral_head(f, x);
  if (head < 0.5) return std::clamp(head, 0.0, 1.0);
  return std::clamp(1.0 - kg_integral_tail(f, x), 0.0, 1.0);
}

double density_at_zero(const FadingModel& model) {
  return std::visit(
      Overloaded{
          [](const RayleighParams&) { return 0.0; },
          [](const RicianParams&) { return 0.0; },
          [](const NakagamiParams& p) {
            return p.m == 0.5 ? std::sqrt(2.0 / (std::numbers::pi * p.omega)) : 0.0;
          },
          [](const WeibullParams& p) {
            if (p.shape < 1.0) return kInfiniteDensity;
            return p.shape == 1.0 ? 1.0 / p.scale : 0.0;
          },
          [](const GammaParams& p) {
            if (p.shape < 1.0) return kInfiniteDensity;
            return p.shape == 1.0 ? 1.0 / p.scale : 0.0;
          },
          [](const KParams& p) {
            if (p.nu < 0.5) return kInfiniteDensity;
            return p.nu == 0.5 ? p.c : 0.0;
          },
          [](const FParams& p) {
            return p.m == 0.5 ? 2.0 * std::exp(p.m * std::log(p.m) - ln_beta(p.m, p.ms) -
                                               p.m * std::log(p.ms * p.omega))
                              : 0.0;
          },
          [](const KgParams& p) {
            const double lo = std::min(p.m, p.k);
            if (lo < 0.5) return kInfiniteDensity;
            if (lo > 0.5) return 0.0;
            const double alpha = std::fabs(p.k - p.m);
            if (alpha == 0.0) return kInfiniteDensity;
            const double half_b = std::sqrt(p.m * p.k / p.omega);
            return 2.0 * std::exp(ln_gamma(alpha) - ln_gamma(p.m) - ln_gamma(p.k)) * half_b;
          },
      },
      model.params());
}

double ln_gamma_ratio(double a, double shift) { return ln_gamma(a + shift) - ln_gamma(a); }

}  // namespace

// ---- family metadata ----

std::string_view family_name(Family family) noexcept {
  switch (family) {
    case Family::weibull: return "Weibull";
    case Family::rician: return "Rician";
    case Family::rayleigh: return "Rayleigh";
    case Family::nakagami: return "Nakagami";
    case Family::gamma: return "Gamma";
    case Family::k: return "K";
    case Family::f: return "F";
    case Family::kg: return "KG";
  }
  return "?";
}

Family parse_family(std::string_view name) {
  auto lower = [](std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
  };
  const std::string key = lower(name);
  for (Family f : kAllFamilies) {
    if (lower(family_name(f)) == key) return f;
  }
  fail(ErrorKind::input, "unknown distribution family '" + std::string(name) + "'");
}

std::size_t parameter_count(Family family) noexcept {
  switch (family) {
    case Family::rayleigh: return 1;
    case Family::f:
    case Family::kg: return 3;
    default: return 2;
  }
}

std::vector<std::string_view> parameter_names(Family family) {
  switch (family) {
    case Family::weibull: return {"shape", "scale"};
    case Family::rician: return {"nu", "sigma"};
    case Family::rayleigh: return {"sigma"};
    case Family::nakagami: return {"m", "omega"};
    case Family::gamma: return {"shape", "scale"};
    case Family::k: return {"nu", "c"};
    case Family::f: return {"m", "ms", "omega"};
    case Family::kg: return {"m", "k", "omega"};
  }
  return {};
}

// ---- FadingModel ----

FadingModel::FadingModel(Params params) : params_(params) {
  const std::string name(family_name(family()));
  for (double v : to_vector()) {
    require(positive(v), name + ": parameters must be finite and strictly positive");
  }
  if (const auto* p = std::get_if<NakagamiParams>(&params_)) {
    require(p->m >= 0.5, "Nakagami: fading figure m must be >= 0.5");
  }
  if (const auto* p = std::get_if<FParams>(&params_)) {
    require(p->m >= 0.5, "F: m must be >= 0.5");
  }
}

FadingModel FadingModel::from_vector(Family family, std::span<const double> v) {
  if (v.size() != parameter_count(family)) {
    fail(ErrorKind::invalid_parameter,
         std::string(family_name(family)) + ": expected " + std::to_string(parameter_count(family)) +
             " parameters");
  }
  switch (family) {
    case Family::weibull: return weibull(v[0], v[1]);
    case Family::rician: return rician(v[0], v[1]);
    case Family::rayleigh: return rayleigh(v[0]);
    case Family::nakagami: return nakagami(v[0], v[1]);
    case Family::gamma: return gamma(v[0], v[1]);
    case Family::k: return k(v[0], v[1]);
    case Family::f: return f(v[0], v[1], v[2]);
    case Family::kg: return kg(v[0], v[1], v[2]);
  }
  fail(ErrorKind::invalid_parameter, "unknown family");
}

std::vector<double> FadingModel::to_vector() const {
  return std::visit(Overloaded{
                        [](const WeibullParams& p) { return std::vector<double>{p.shape, p.scale}; },
                        [](const RicianParams& p) { return std::vector<double>{p.nu_los, p.sigma}; },
                        [](const RayleighParams& p) { return std::vector<double>{p.sigma}; },
                        [](const NakagamiParams& p) { return std::vector<double>{p.m, p.omega}; },
                        [](const GammaParams& p) { return std::vector<double>{p.shape, p.scale}; },
                        [](const KParams& p) { return std::vector<double>{p.nu, p.c}; },
                        [](const FParams& p) { return std::vector<double>{p.m, p.ms, p.omega}; },
                        [](const KgParams& p) { return std::vector<double>{p.m, p.k, p.omega}; },
                    },
                    params_);
}

bool FadingModel::has_finite_mean_power() const noexcept {
  if (const auto* p = std::get_if<FParams>(&params_)) return p->ms > 1.0;
  return true;
}

std::string FadingModel::to_string() const {
  std::string out(family_name(family()));
  const auto names = parameter_names(family());
  const auto values = to_vector();
  for (std::size_t i = 0; i < values.size(); ++i) {
    out += ' ';
    out += names[i];
    out += '=';
    out += format_double(values[i]);
  }
  return out;
}

FadingModel FadingModel::parse(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string head;
  if (!(in >> head)) fail(ErrorKind::input, "empty model record");
  const Family family = parse_family(head);
  const auto names = parameter_names(family);
  std::vector<double> values(names.size(), std::numeric_limits<double>::quiet_NaN());
  std::string token;
  while (in >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos) fail(ErrorKind::input, "malformed parameter '" + token + "'");
    const std::string_view key(token.data(), eq);
    const auto it = std::find(names.begin(), names.end(), key);
    if (it == names.end()) {
      fail(ErrorKind::input, "unknown parameter '" + std::string(key) + "' for " + head);
    }
    double v = 0.0;
    const char* first = token.data() + eq + 1;
    const char* last = token.data() + token.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) fail(ErrorKind::input, "bad number in '" + token + "'");
    values[static_cast<std::size_t>(it - names.begin())] = v;
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (std::isnan(values[i])) fail(ErrorKind::input, "missing parameter '" + std::string(names[i]) + "'");
  }
  return from_vector(family, values);
}

bool operator==(const FadingModel& a, const FadingModel& b) noexcept {
  return a.family() == b.family() && a.to_vector() == b.to_vector();
}

// ---- SampleSet ----

SampleSet::SampleSet(std::vector<double> values, std::string label)
    : values_(std::move(values)), label_(std::move(label)) {
  if (values_.empty()) fail(ErrorKind::invalid_parameter, "SampleSet: at least one value required");
  for (double v : values_) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      fail(ErrorKind::invalid_parameter, "SampleSet: values must be finite and non-negative");
    }
  }
}

std::vector<double> SampleSet::sorted() const {
  std::vector<double> out = values_;
  std::sort(out.begin(), out.end());
  return out;
}

// ---- densities ----

double log_pdf(const FadingModel& model, double x) {
  if (!(x >= 0.0)) fail(ErrorKind::domain, "pdf: x must be non-negative");
  if (x == 0.0) return std::log(density_at_zero(model));
  if (std::isinf(x)) return -std::numeric_limits<double>::infinity();
  const double lx = std::log(x);
  return std::visit(
      Overloaded{
          [&](const RayleighParams& p) {
            const double s2 = p.sigma * p.sigma;
            return lx - std::log(s2) - x * x / (2.0 * s2);
          },
          [&](const RicianParams& p) {
            const double s2 = p.sigma * p.sigma;
            const double d = x - p.nu_los;
            // (x^2 + nu^2)/2s^2 - x nu/s^2 folded into (x - nu)^2/2s^2 with the
            // exponentially scaled I0 to keep large K-factors finite.
            const double z = x * p.nu_los / s2;
            return lx - std::log(s2) - d * d / (2.0 * s2) + (ln_bessel_i0(z) - z);
          },
          [&](const NakagamiParams& p) {
            return kLn2 + p.m * std::log(p.m / p.omega) - ln_gamma(p.m) + (2.0 * p.m - 1.0) * lx -
                   p.m * x * x / p.omega;
          },
          [&](const WeibullParams& p) {
            const double lz = lx - std::log(p.scale);
            return std::log(p.shape / p.scale) + (p.shape - 1.0) * lz - std::exp(p.shape * lz);
          },
          [&](const GammaParams& p) {
            return (p.shape - 1.0) * lx - x / p.scale - ln_gamma(p.shape) - p.shape * std::log(p.scale);
          },
          [&](const KParams& p) {
            const double u = p.c * x;
            return std::log(2.0 * p.c) - ln_gamma(p.nu) + p.nu * std::log(0.5 * u) +
                   ln_bessel_k(p.nu - 1.0, u);
          },
          [&](const FParams& p) {
            const double s = p.ms * p.omega;
            return kLn2 + p.m * std::log(p.m) + p.ms * std::log(s) + (2.0 * p.m - 1.0) * lx -
                   ln_beta(p.m, p.ms) - (p.m + p.ms) * std::log(p.m * x * x + s);
          },
          [&](const KgParams& p) { return KgDensity(p).log_density(x); },
      },
      model.params());
}

double sum_log_pdf(const FadingModel& model, std::span<const double> xs) {
  double zeros = 0.0;
  std::size_t n_zero = 0;
  for (double x : xs) {
    if (!(x >= 0.0)) fail(ErrorKind::domain, "pdf: x must be non-negative");
    if (x == 0.0) ++n_zero;
  }
  if (n_zero > 0) zeros = static_cast<double>(n_zero) * log_pdf(model, 0.0);
  if (zeros == -std::numeric_limits<double>::infinity()) return zeros;

  // Each family contributes constant + sum of a per-point term over x > 0.
  auto accumulate = [&](double constant, auto&& term) {
    double sum = 0.0;
    std::size_t count = 0;
    for (double x : xs) {
      if (x == 0.0) continue;
      if (std::isinf(x)) return -std::numeric_limits<double>::infinity();
      sum += term(x);
      ++count;
    }
    return zeros + static_cast<double>(count) * constant + sum;
  };
  return std::visit(
      Overloaded{
          [&](const RayleighParams& p) {
            const double s2 = p.sigma * p.sigma;
            return accumulate(-std::log(s2), [&](double x) { return std::log(x) - x * x / (2.0 * s2); });
          },
          [&](const RicianParams& p) {
            const double s2 = p.sigma * p.sigma;
            return accumulate(-std::log(s2), [&](double x) {
              const double d = x - p.nu_los;
              const double z = x * p.nu_los / s2;
              return std::log(x) - d * d / (2.0 * s2) + (ln_bessel_i0(z) - z);
            });
          },
          [&](const NakagamiParams& p) {
            const double rate = p.m / p.omega;
            return accumulate(kLn2 + p.m * std::log(rate) - ln_gamma(p.m),
                              [&](double x) { return (2.0 * p.m - 1.0) * std::log(x) - rate * x * x; });
          },
          [&](const WeibullParams& p) {
            const double ls = std::log(p.scale);
            return accumulate(std::log(p.shape / p.scale), [&](double x) {
              const double lz = std::log(x) - ls;
              return (p.shape - 1.0) * lz - std::exp(p.shape * lz);
            });
          },
          [&](const GammaParams& p) {
            return accumulate(-ln_gamma(p.shape) - p.shape * std::log(p.scale),
                              [&](double x) { return (p.shape - 1.0) * std::log(x) - x / p.scale; });
          },
          [&](const KParams& p) {
            const BesselKOrder bessel(p.nu - 1.0);
            return accumulate(std::log(2.0 * p.c) - ln_gamma(p.nu), [&](double x) {
              const double u = p.c * x;
              return p.nu * std::log(0.5 * u) + bessel.ln_k(u);
            });
          },
          [&](const FParams& p) {
            const double s = p.ms * p.omega;
            return accumulate(kLn2 + p.m * std::log(p.m) + p.ms * std::log(s) - ln_beta(p.m, p.ms), [&](double x) {
              return (2.0 * p.m - 1.0) * std::log(x) - (p.m + p.ms) * std::log(p.m * x * x + s);
            });
          },
          [&](const KgParams& p) {
            const KgDensity f(p);
            return accumulate(0.0, [&](double x) { return f.log_density(x); });
          },
      },
      model.params());
}

double pdf(const FadingModel& model, double x) {
  if (!(x >= 0.0)) fail(ErrorKind::domain, "pdf: x must be non-negative");
  if (x == 0.0) return density_at_zero(model);
  return std::exp(log_pdf(model, x));
}

double cdf(const FadingModel& model, double x) {
  if (!(x >= 0.0)) fail(ErrorKind::domain, "cdf: x must be non-negative");
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  return std::visit(
      Overloaded{
          [&](const RayleighParams& p) { return -std::expm1(-x * x / (2.0 * p.sigma * p.sigma)); },
          [&](const RicianParams& p) {
            const double s2 = p.sigma * p.sigma;
            boost::math::non_central_chi_squared_distribution<double> dist(2.0, p.nu_los * p.nu_los / s2);
            return boost::math::cdf(dist, x * x / s2);
          },
          [&](const NakagamiParams& p) { return gamma_p(p.m, p.m * x * x / p.omega); },
          [&](const WeibullParams& p) { return -std::expm1(-std::pow(x / p.scale, p.shape)); },
          [&](const GammaParams& p) { return gamma_p(p.shape, x / p.scale); },
          [&](const KParams& p) {
            // d/dt [(ct/2)^nu K_nu(ct)] = -c (ct/2)^nu K_{nu-1}(ct)
            const double u = p.c * x;
            const double lsurv = kLn2 - ln_gamma(p.nu) + p.nu * std::log(0.5 * u) + ln_bessel_k(p.nu, u);
            return std::clamp(-std::expm1(lsurv), 0.0, 1.0);
          },
          [&](const FParams& p) {
            const double a = p.m * x * x;
            const double s = p.ms * p.omega;
            const double z = a / (a + s);
            if (z <= 0.5) return beta_inc(p.m, p.ms, z);
            return 1.0 - beta_inc(p.ms, p.m, s / (a + s));
          },
          [&](const KgParams& p) { return kg_cdf(p, x); },
      },
      model.params());
}

std::vector<double> cdf_sorted(const FadingModel& model, std::span<const double> xs) {
  std::vector<double> out(xs.size());
  if (xs.empty()) return out;
  const auto* kg = std::get_if<KgParams>(&model.params());
  if (kg == nullptr) {
    for (std::size_t i = 0; i < xs.size(); ++i) out[i] = cdf(model, xs[i]);
    return out;
  }
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (xs[i] < xs[i - 1]) fail(ErrorKind::domain, "cdf_sorted: input must be ascending");
  }
  if (!(xs.front() >= 0.0)) fail(ErrorKind::domain, "cdf: x must be non-negative");

  // Left and right cumulative sums of the per-gap integrals, so each point is
  // taken from whichever tail keeps the complement accurate.
  const KgDensity f(*kg);
  const double panel = 0.05 * std::sqrt(kg->omega);
  const std::size_t n = xs.size();
  std::vector<double> gap(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) {
    if (std::isinf(xs[i])) break;
    gap[i] = kg_integral_between(f, xs[i - 1], xs[i], panel);
  }
  const double head = kg_integral_head(f, xs.front());
  double tail = 0.0;
  std::size_t last = n - 1;
  while (std::isinf(xs[last]) && last > 0) --last;
  if (!std::isinf(xs[last])) tail = kg_integral_tail(f, xs[last]);

  std::vector<double> right(n, 0.0);
  right[last] = tail;
  for (std::size_t i = last; i > 0; --i) right[i - 1] = right[i] + gap[i];

  double left = head;
  for (std::size_t i = 0; i < n; ++i) {
    if (std::isinf(xs[i])) {
      out[i] = 1.0;
      continue;
    }
    if (i > 0) left += gap[i];
    const double v = left < 0.5 ? left : 1.0 - right[i];
    out[i] = std::clamp(v, 0.0, 1.0);
  }
  return out;
}

// ---- sampling ----

double draw(const FadingModel& model, RandomStream& rng) {
  return std::visit(
      Overloaded{
          [&](const RayleighParams& p) { return p.sigma * std::sqrt(2.0 * rng.exponential()); },
          [&](const RicianParams& p) {
            const double re = p.nu_los + p.sigma * rng.normal();
            const double im = p.sigma * rng.normal();
            return std::hypot(re, im);
          },
          [&](const NakagamiParams& p) { return std::sqrt(rng.gamma(p.m, p.omega / p.m)); },
          [&](const WeibullParams& p) {
            return std::weibull_distribution<double>(p.shape, p.scale)(rng.engine());
          },
          [&](const GammaParams& p) { return rng.gamma(p.shape, p.scale); },
          [&](const KParams& p) {
            // Rayleigh envelope whose local mean power is Gamma(nu, 4/c^2).
            const double power = rng.gamma(p.nu, 4.0 / (p.c * p.c));
            return std::sqrt(power * rng.exponential());
          },
          [&](const FParams& p) {
            // Inverse-Nakagami RMS amplitude A (A^2 = ms / Gamma(ms, 1)), then a
            // Nakagami envelope of mean power A^2 Omega.
            const double a2 = p.ms / rng.gamma(p.ms, 1.0);
            return std::sqrt(rng.gamma(p.m, a2 * p.omega / p.m));
          },
          [&](const KgParams& p) {
            const double power = rng.gamma(p.k, p.omega / p.k);
            return std::sqrt(rng.gamma(p.m, power / p.m));
          },
      },
      model.params());
}

SampleSet sample(const FadingModel& model, std::size_t n, RandomStream& rng) {
  if (n == 0) fail(ErrorKind::invalid_parameter, "sample: n must be >= 1");
  std::vector<double> values(n);
  for (double& v : values) v = draw(model, rng);
  return SampleSet(std::move(values), model.to_string());
}

// ---- moments ----

double moment(const FadingModel& model, int order) {
  if (order < 1) fail(ErrorKind::invalid_parameter, "moment: order must be a positive integer");
  const double n = order;
  const double h = 0.5 * n;
  return std::visit(
      Overloaded{
          [&](const RayleighParams& p) { return std::exp(n * std::log(std::sqrt(2.0) * p.sigma) + ln_gamma(1.0 + h)); },
          [&](const RicianParams& p) {
            const double kf = p.nu_los * p.nu_los / (2.0 * p.sigma * p.sigma);
            return std::pow(std::sqrt(2.0) * p.sigma, n) * gamma_fn(1.0 + h) *
                   boost::math::hypergeometric_1F1(-h, 1.0, -kf);
          },
          [&](const NakagamiParams& p) { return std::exp(ln_gamma_ratio(p.m, h) + h * std::log(p.omega / p.m)); },
          [&](const WeibullParams& p) { return std::exp(n * std::log(p.scale) + ln_gamma(1.0 + n / p.shape)); },
          [&](const GammaParams& p) { return std::exp(n * std::log(p.scale) + ln_gamma_ratio(p.shape, n)); },
          [&](const KParams& p) {
            return std::exp(n * std::log(2.0 / p.c) + ln_gamma(1.0 + h) + ln_gamma_ratio(p.nu, h));
          },
          [&](const FParams& p) {
            if (!(p.ms > h)) {
              fail(ErrorKind::nonexistent_moment,
                   "F: moment of order " + std::to_string(order) + " requires ms > " + format_double(h));
            }
            return std::exp(h * std::log(p.ms * p.omega / p.m) + ln_gamma_ratio(p.m, h) + ln_gamma(p.ms - h) -
                            ln_gamma(p.ms));
          },
          [&](const KgParams& p) {
            return std::exp(h * std::log(p.omega / (p.m * p.k)) + ln_gamma_ratio(p.m, h) + ln_gamma_ratio(p.k, h));
          },
      },
      model.params());
}

// ---- reductions ----

ReductionReport reduce_kg(const FadingModel& model, Family target) {
  const auto* p = std::get_if<KgParams>(&model.params());
  if (p == nullptr) fail(ErrorKind::not_reducible, "reduce_kg: model is not a KG model");

  std::optional<FadingModel> reduced;
  bool exact = false;
  if (target == Family::k) {
    if (std::fabs(p->m - 1.0) > 1e-12) {
      fail(ErrorKind::not_reducible, "reduce_kg: KG reduces to K only for m = 1");
    }
    reduced = FadingModel::k(p->k, 2.0 * std::sqrt(p->k / p->omega));
    exact = true;
  } else if (target == Family::nakagami) {
    reduced = FadingModel::nakagami(std::max(p->m, 0.5), p->omega);
  } else {
    fail(ErrorKind::not_reducible, "reduce_kg: target must be K or Nakagami");
  }

  constexpr int kGrid = 1000;
  double sup_abs = 0.0;
  double max_rel = 0.0;
  for (int i = 0; i < kGrid; ++i) {
    const double x = 0.01 + (10.0 - 0.01) * i / (kGrid - 1);
    const double a = pdf(model, x);
    const double b = pdf(*reduced, x);
    const double gap = std::fabs(a - b);
    sup_abs = std::max(sup_abs, gap);
    if (b > 0.0) max_rel = std::max(max_rel, gap / b);
  }
  return {*reduced, exact, sup_abs, max_rel};
}

}  // namespace fadestat
