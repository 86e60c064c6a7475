// Copyright 2026 The bayespc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <limits>
#include <span>

namespace bayespc {

/// Natural-log probability or score. May be -infinity for impossible events,
/// never NaN.
using LogScore = double;

inline constexpr LogScore kLogZero = -std::numeric_limits<double>::infinity();

/// ln Gamma(x) for x > 0. Relative error is at most 1e-12 on [1e-3, 1e8]
/// away from the roots at x = 1 and x = 2, where the absolute error is below
/// 1e-15. Non-integer arguments are fine (fractional EM counts end up here).
/// Throws std::domain_error for x <= 0 or non-finite x.
LogScore log_gamma(double x);

/// ln B(a, b) = ln Gamma(a) + ln Gamma(b) - ln Gamma(a + b), for a, b > 0.
LogScore log_beta(double a, double b);

/// Shannon entropy in nats of the categorical distribution proportional to
/// `counts`, with 0 log 0 = 0. Returns 0 when all counts are zero.
/// Throws std::invalid_argument on a negative or non-finite count.
double entropy(std::span<const double> counts);

/// ln sum_i exp(values[i]), stable under max-shift. Returns -infinity iff all
/// inputs are -infinity. Throws std::invalid_argument on an empty input.
LogScore log_sum_exp(std::span<const double> values);

/// n * ln(p) with the convention 0 * ln(0) = 0 (and 0 * ln(anything) = 0).
inline double xlogy(double n, double p) {
  return n == 0.0 ? 0.0 : n * std::log(p);
}

}  // namespace bayespc
