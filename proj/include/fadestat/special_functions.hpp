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

#ifndef FADESTAT_SPECIAL_FUNCTIONS_HPP
#define FADESTAT_SPECIAL_FUNCTIONS_HPP

// Real-valued special functions used by the fading densities. All functions
// are pure and thread-safe. Domain violations throw fadestat::Error.

namespace fadestat {

/// Gamma function for x > 0. Throws ErrorKind::overflow past ~171.6.
double gamma_fn(double x);

/// ln Gamma(x) for x > 0.
double ln_gamma(double x);

/// Beta function B(a, b), evaluated in log space.
double beta_fn(double a, double b);
double ln_beta(double a, double b);

/// Modified Bessel function of the second kind K_nu(x), real order, x > 0.
/// Negative orders use K_{-nu} = K_nu. Underflows to 0 for very large x.
double bessel_k(double nu, double x);

/// ln K_nu(x). Finite wherever K_nu(x) is positive, including arguments
/// where K_nu itself overflows or underflows a double.
double ln_bessel_k(double nu, double x);

/// ln K_nu(x) for a fixed order across many arguments. The order-dependent
/// constants of the small-argument series are computed once.
class BesselKOrder {
 public:
  explicit BesselKOrder(double nu);
  double ln_k(double x) const;

  struct TemmeConstants {
    double fact = 1.0;
    double gam1 = 0.0;
    double gam2 = 1.0;
    double gampl = 1.0;
    double gammi = 1.0;
  };

 private:
  double nu_;
  double mu_ = 0.0;
  int nl_ = 0;
  bool debye_ = false;
  TemmeConstants temme_;
};

/// ln I_0(x) for x >= 0, stable for large x.
double ln_bessel_i0(double x);

double digamma(double x);
double trigamma(double x);

/// Regularized lower incomplete gamma P(a, x).
double gamma_p(double a, double x);

/// Regularized incomplete beta I_x(a, b).
double beta_inc(double a, double b, double x);

}  // namespace fadestat

#endif  // FADESTAT_SPECIAL_FUNCTIONS_HPP
