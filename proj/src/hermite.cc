// Copyright 2026 The Gaussify Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "gaussify/hermite.h"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace gaussify {

namespace {

constexpr double kRescaleThreshold = 1e150;

}  // namespace

void hermite_functions(double x, std::span<double> out) {
    if (out.empty()) {
        return;
    }
    // psi_n = v_n * exp(log_scale), with v_0 = 1 and log_scale starting at log psi_0.
    double log_scale = -0.5 * x * x - 0.25 * std::log(std::numbers::pi);
    double prev = 0.0;
    double cur = 1.0;
    out[0] = std::exp(log_scale);
    for (std::size_t n = 0; n + 1 < out.size(); ++n) {
        double dn = static_cast<double>(n);
        double next = x * std::sqrt(2.0 / (dn + 1.0)) * cur - std::sqrt(dn / (dn + 1.0)) * prev;
        prev = cur;
        cur = next;
        double mag = std::abs(cur);
        if (mag > kRescaleThreshold) {
            prev /= mag;
            cur /= mag;
            log_scale += std::log(mag);
        }
        out[n + 1] = cur * std::exp(log_scale);
    }
}

std::vector<double> hermite_functions(double x, int n_max) {
    std::vector<double> out(static_cast<std::size_t>(n_max) + 1);
    hermite_functions(x, out);
    return out;
}

void hermite_function_cdfs(double x, std::span<double> out) {
    if (out.empty()) {
        return;
    }
    std::vector<double> psi(out.size());
    hermite_functions(x, psi);
    out[0] = 0.5 * std::erfc(-x);
    for (std::size_t n = 1; n < out.size(); ++n) {
        double v = out[n - 1] - psi[n] * psi[n - 1] / std::sqrt(2.0 * static_cast<double>(n));
        out[n] = std::clamp(v, 0.0, 1.0);
    }
}

long double hermite_polynomial(int k, long double x) {
    if (k <= 0) {
        return 1.0L;
    }
    long double prev = 1.0L;
    long double cur = 2.0L * x;
    for (int n = 1; n < k; ++n) {
        long double next = 2.0L * x * cur - 2.0L * n * prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

}  // namespace gaussify
