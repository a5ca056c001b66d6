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

// Independent reference computations used only by the tests. Nothing here
// shares code paths with the library.

#ifndef GAUSSIFY_TESTS_ORACLES_H
#define GAUSSIFY_TESTS_ORACLES_H

#include <cmath>
#include <functional>
#include <random>
#include <vector>

namespace gaussify::oracle {

inline long double binomial(int n, int k) {
    if (k < 0 || k > n) {
        return 0.0L;
    }
    long double r = 1.0L;
    for (int i = 1; i <= k; ++i) {
        r = r * (n - k + i) / i;
    }
    return r;
}

inline long double factorial(int n) {
    long double r = 1.0L;
    for (int i = 2; i <= n; ++i) {
        r *= i;
    }
    return r;
}

/// <j, k| U |m, n> by expanding (a'^dag)^m (b'^dag)^n as a polynomial, where
/// a^dag -> (a^dag + b^dag)/sqrt(2) and b^dag -> (sign_a a^dag + sign_b b^dag)/sqrt(2).
inline long double bs_amplitude(int j, int k, int m, int n, int sign_a = 1, int sign_b = -1) {
    if (j + k != m + n) {
        return 0.0L;
    }
    long double coef = 0.0L;
    for (int r = 0; r <= m; ++r) {
        int s = j - r;  // photons of b that exit in port a
        if (s < 0 || s > n) {
            continue;
        }
        long double term = binomial(m, r) * binomial(n, s);
        term *= std::pow(static_cast<long double>(sign_a), s) * std::pow(static_cast<long double>(sign_b), n - s);
        coef += term;
    }
    return coef * std::sqrt(factorial(j) * factorial(k) / (factorial(m) * factorial(n))) /
           std::pow(2.0L, (m + n) / 2.0L);
}

/// q_j = sum_{m,n} p_m p_n |<j, m+n-j|U|m, n>|^2 w_{m+n-j}, unnormalized.
inline std::vector<double> merge_unnormalized(const std::vector<double> &p, const std::vector<double> &w,
                                              int sign_a = 1, int sign_b = -1) {
    int n_max = static_cast<int>(p.size()) - 1;
    std::vector<double> q(static_cast<std::size_t>(2 * n_max + 1), 0.0);
    for (int m = 0; m <= n_max; ++m) {
        for (int n = 0; n <= n_max; ++n) {
            for (int j = 0; j <= m + n; ++j) {
                long double a = bs_amplitude(j, m + n - j, m, n, sign_a, sign_b);
                q[static_cast<std::size_t>(j)] +=
                    static_cast<double>(p[static_cast<std::size_t>(m)] * p[static_cast<std::size_t>(n)] * a * a *
                                        w[static_cast<std::size_t>(m + n - j)]);
            }
        }
    }
    return q;
}

/// <n| x^k |n> with x = (a + a^dag)/sqrt(2), by repeated matrix-vector products.
inline double fock_x_power(int n, int k) {
    int dim = n + k + 2;
    std::vector<long double> v(static_cast<std::size_t>(dim), 0.0L);
    v[static_cast<std::size_t>(n)] = 1.0L;
    for (int step = 0; step < k; ++step) {
        std::vector<long double> next(static_cast<std::size_t>(dim), 0.0L);
        for (int i = 0; i < dim; ++i) {
            long double acc = 0.0L;
            if (i >= 1) {
                acc += std::sqrt(static_cast<long double>(i)) * v[static_cast<std::size_t>(i - 1)];
            }
            if (i + 1 < dim) {
                acc += std::sqrt(static_cast<long double>(i + 1)) * v[static_cast<std::size_t>(i + 1)];
            }
            next[static_cast<std::size_t>(i)] = acc / std::sqrt(2.0L);
        }
        v = std::move(next);
    }
    return static_cast<double>(v[static_cast<std::size_t>(n)]);
}

/// Composite Simpson rule with `intervals` (even) panels.
inline double simpson(const std::function<double(double)> &f, double a, double b, int intervals) {
    double h = (b - a) / intervals;
    double total = f(a) + f(b);
    for (int i = 1; i < intervals; ++i) {
        total += f(a + h * i) * (i % 2 == 1 ? 4.0 : 2.0);
    }
    return total * h / 3.0;
}

/// Random weights on 0..support-1, normalized, with a fixed generator.
inline std::vector<double> random_distribution(std::mt19937_64 &rng, int support) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> p(static_cast<std::size_t>(support));
    double total = 0.0;
    for (double &x : p) {
        x = u(rng);
        total += x;
    }
    for (double &x : p) {
        x /= total;
    }
    return p;
}

}  // namespace gaussify::oracle

#endif
