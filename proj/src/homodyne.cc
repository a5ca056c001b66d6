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

#include "gaussify/homodyne.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "gaussify/errors.h"
#include "gaussify/hermite.h"
#include "gaussify/seeding.h"

namespace gaussify {

namespace {

void check_batch(const QuadratureBatch &batch) {
    if (batch.samples.empty()) {
        throw DomainError("quadrature batch is empty");
    }
    if (!(batch.eta_h.value() > 0.0)) {
        throw DomainError("homodyne efficiency must be positive");
    }
}

// Sums of the six patterns that feed every composite estimate.
struct PatternSums {
    long double x[4] = {0, 0, 0, 0};
    long double n[2] = {0, 0};
};

struct PatternTable {
    std::vector<double> x[4];
    std::vector<double> n[2];
};

PatternTable tabulate_patterns(const QuadratureBatch &batch) {
    PatternTable t;
    std::size_t size = batch.samples.size();
    for (auto &v : t.x) {
        v.resize(size);
    }
    for (auto &v : t.n) {
        v.resize(size);
    }
    double eta = batch.eta_h.value();
    for (std::size_t i = 0; i < size; ++i) {
        double xm = batch.samples[i];
        for (int k = 1; k <= 4; ++k) {
            t.x[k - 1][i] = x_moment_pattern(xm, eta, k);
        }
        for (int k = 1; k <= 2; ++k) {
            t.n[k - 1][i] = n_moment_pattern(xm, eta, k);
        }
    }
    return t;
}

struct Composite {
    double x[4];
    double n[2];
    double mean_n;
    double variance_n;
    double kurtosis;
};

Composite compose(const PatternSums &sums, std::size_t count) {
    Composite c{};
    long double inv = 1.0L / static_cast<long double>(count);
    for (int k = 0; k < 4; ++k) {
        c.x[k] = static_cast<double>(sums.x[k] * inv);
    }
    for (int k = 0; k < 2; ++k) {
        c.n[k] = static_cast<double>(sums.n[k] * inv);
    }
    long double m1 = sums.x[0] * inv;
    long double m2 = sums.x[1] * inv;
    long double m3 = sums.x[2] * inv;
    long double m4 = sums.x[3] * inv;
    long double mu2 = m2 - m1 * m1;
    long double mu4 = m4 - 4 * m1 * m3 + 6 * m1 * m1 * m2 - 3 * m1 * m1 * m1 * m1;
    c.kurtosis = static_cast<double>(mu4 / (mu2 * mu2) - 3.0L);
    c.mean_n = c.n[0];
    c.variance_n = c.n[1] + c.n[0] - c.n[0] * c.n[0];
    return c;
}

}  // namespace

QuadratureBatch sample_homodyne(const PhotonDistribution &state, DetectorEfficiency eta_h, std::size_t count,
                                std::uint64_t seed, std::string source) {
    if (count < 1) {
        throw DomainError("sample count must be at least 1");
    }
    if (!(eta_h.value() > 0.0)) {
        throw DomainError("homodyne efficiency must be positive");
    }
    PhotonDistribution measured = apply_loss(state, eta_h);
    double limit = quadrature_window(measured);
    std::size_t points = kInverseCdfGridPoints;
    double step = 2.0 * limit / static_cast<double>(points - 1);
    std::vector<double> grid(points);
    std::vector<double> cdf(points);
    for (std::size_t i = 0; i < points; ++i) {
        grid[i] = -limit + step * static_cast<double>(i);
        cdf[i] = quadrature_cdf(measured, grid[i]);
    }
    double lo = cdf.front();
    double span = cdf.back() - lo;
    for (std::size_t i = 0; i < points; ++i) {
        double c = (cdf[i] - lo) / span;
        cdf[i] = i == 0 ? 0.0 : std::max(cdf[i - 1], c);
    }
    cdf.back() = 1.0;

    QuadratureBatch batch{{}, eta_h, seed, std::move(source)};
    batch.samples.resize(count);
    Rng rng(seed);
    for (double &x : batch.samples) {
        double u = uniform01(rng);
        auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        std::size_t hi = std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), points - 1);
        std::size_t i = hi == 0 ? 0 : hi - 1;
        double width = cdf[i + 1] - cdf[i];
        double frac = width > 0.0 ? (u - cdf[i]) / width : 0.0;
        x = grid[i] + frac * step;
    }
    return batch;
}

double x_moment_pattern(double x_m, double eta_h, int k) {
    if (k < 1 || k > kMaxPatternXOrder) {
        throw DomainError("quadrature pattern order must lie in [1, " + std::to_string(kMaxPatternXOrder) + "]");
    }
    long double a = x_m / std::sqrt(static_cast<long double>(eta_h));
    long double b = (1.0L - eta_h) / (2.0L * eta_h);
    long double prev = 1.0L;
    long double cur = a;
    for (int i = 1; i < k; ++i) {
        long double next = a * cur - i * b * prev;
        prev = cur;
        cur = next;
    }
    return static_cast<double>(cur);
}

double n_moment_pattern(double x_m, double eta_h, int k) {
    if (k < 1 || k > kMaxPatternNOrder) {
        throw DomainError("photon-number pattern order must lie in [1, " + std::to_string(kMaxPatternNOrder) + "]");
    }
    long double coeff = 1.0L;
    for (int i = 1; i <= k; ++i) {
        coeff *= static_cast<long double>(i) * i;
    }
    for (int i = 1; i <= 2 * k; ++i) {
        coeff /= i;
    }
    coeff /= std::pow(2.0L * eta_h, k);
    return static_cast<double>(coeff * hermite_polynomial(2 * k, x_m));
}

double estimate_x_moment(const QuadratureBatch &batch, int k) {
    if (k < 1 || k > kMaxPatternXOrder) {
        throw DomainError("quadrature pattern order must lie in [1, " + std::to_string(kMaxPatternXOrder) + "]");
    }
    check_batch(batch);
    long double total = 0.0L;
    for (double x : batch.samples) {
        total += x_moment_pattern(x, batch.eta_h.value(), k);
    }
    return static_cast<double>(total / static_cast<long double>(batch.samples.size()));
}

double estimate_n_moment(const QuadratureBatch &batch, int k) {
    if (k < 1 || k > kMaxPatternNOrder) {
        throw DomainError("photon-number pattern order must lie in [1, " + std::to_string(kMaxPatternNOrder) + "]");
    }
    check_batch(batch);
    long double total = 0.0L;
    for (double x : batch.samples) {
        total += n_moment_pattern(x, batch.eta_h.value(), k);
    }
    return static_cast<double>(total / static_cast<long double>(batch.samples.size()));
}

PhotonStatisticsEstimate estimate_variance_and_kurtosis(const QuadratureBatch &batch) {
    check_batch(batch);
    if (batch.samples.size() < kMinSamplesForStatistics) {
        throw DomainError("need at least " + std::to_string(kMinSamplesForStatistics) +
                          " samples for variance and kurtosis estimates");
    }
    PatternSums sums;
    double eta = batch.eta_h.value();
    for (double x : batch.samples) {
        for (int k = 1; k <= 4; ++k) {
            sums.x[k - 1] += x_moment_pattern(x, eta, k);
        }
        for (int k = 1; k <= 2; ++k) {
            sums.n[k - 1] += n_moment_pattern(x, eta, k);
        }
    }
    Composite c = compose(sums, batch.samples.size());
    return {c.variance_n, c.kurtosis, c.mean_n};
}

MomentReport estimate_moments(const QuadratureBatch &batch, int resamples, std::uint64_t seed) {
    check_batch(batch);
    if (resamples < 2) {
        throw DomainError("bootstrap needs at least 2 resamples");
    }
    PatternTable table = tabulate_patterns(batch);
    std::size_t size = batch.samples.size();
    PatternSums full;
    for (std::size_t i = 0; i < size; ++i) {
        for (int k = 0; k < 4; ++k) {
            full.x[k] += table.x[k][i];
        }
        for (int k = 0; k < 2; ++k) {
            full.n[k] += table.n[k][i];
        }
    }
    Composite point = compose(full, size);

    std::vector<Composite> replicas;
    replicas.reserve(static_cast<std::size_t>(resamples));
    for (int r = 0; r < resamples; ++r) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
        PatternSums sums;
        for (std::size_t i = 0; i < size; ++i) {
            std::size_t idx = uniform_index(rng, size);
            for (int k = 0; k < 4; ++k) {
                sums.x[k] += table.x[k][idx];
            }
            for (int k = 0; k < 2; ++k) {
                sums.n[k] += table.n[k][idx];
            }
        }
        replicas.push_back(compose(sums, size));
    }
    auto spread = [&](auto field) {
        double mean = 0.0;
        for (const Composite &c : replicas) {
            mean += field(c);
        }
        mean /= resamples;
        double ss = 0.0;
        for (const Composite &c : replicas) {
            double d = field(c) - mean;
            ss += d * d;
        }
        return std::sqrt(ss / (resamples - 1));
    };
    MomentReport report{};
    for (int k = 0; k < 4; ++k) {
        report.x_moments[static_cast<std::size_t>(k)] = {point.x[k], spread([k](const Composite &c) { return c.x[k]; })};
    }
    for (int k = 0; k < 2; ++k) {
        report.n_moments[static_cast<std::size_t>(k)] = {point.n[k], spread([k](const Composite &c) { return c.n[k]; })};
    }
    report.mean_n = {point.mean_n, spread([](const Composite &c) { return c.mean_n; })};
    report.variance_n = {point.variance_n, spread([](const Composite &c) { return c.variance_n; })};
    report.kurtosis = {point.kurtosis, spread([](const Composite &c) { return c.kurtosis; })};
    return report;
}

double binned_distance_to_gaussian(const QuadratureBatch &batch, int bins) {
    check_batch(batch);
    if (bins < 2) {
        throw DomainError("binned distance needs at least 2 bins");
    }
    std::size_t size = batch.samples.size();
    long double sum = 0.0L;
    long double sum_sq = 0.0L;
    for (double x : batch.samples) {
        sum += x;
        sum_sq += static_cast<long double>(x) * x;
    }
    double mean = static_cast<double>(sum / size);
    double sigma = std::sqrt(std::max(0.0, static_cast<double>(sum_sq / size) - mean * mean));
    if (!(sigma > 0.0)) {
        throw DomainError("batch has zero spread");
    }
    double lo = mean - 6.0 * sigma;
    double width = 12.0 * sigma / bins;
    // counts[0] and counts[bins + 1] collect underflow and overflow.
    std::vector<std::size_t> counts(static_cast<std::size_t>(bins) + 2, 0);
    for (double x : batch.samples) {
        double pos = (x - lo) / width;
        std::size_t idx;
        if (pos < 0.0) {
            idx = 0;
        } else if (pos >= bins) {
            idx = static_cast<std::size_t>(bins) + 1;
        } else {
            idx = static_cast<std::size_t>(pos) + 1;
        }
        ++counts[idx];
    }
    auto gauss_cdf = [&](double x) { return 0.5 * std::erfc(-(x - mean) / (sigma * std::sqrt(2.0))); };
    double total = 0.0;
    double prev_cdf = 0.0;
    for (int b = 0; b <= bins + 1; ++b) {
        double next_cdf = b <= bins ? gauss_cdf(lo + width * b) : 1.0;
        double g = next_cdf - prev_cdf;
        double f = static_cast<double>(counts[static_cast<std::size_t>(b)]) / static_cast<double>(size);
        total += std::abs(f - g);
        prev_cdf = next_cdf;
    }
    return 0.5 * total;
}

}  // namespace gaussify
