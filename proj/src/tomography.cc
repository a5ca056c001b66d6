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

#include "gaussify/tomography.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

#include "gaussify/errors.h"
#include "gaussify/hermite.h"
#include "gaussify/seeding.h"

namespace gaussify {

namespace {

constexpr double kSupportTailMass = 1e-4;

struct SampleSpread {
    double mean;
    double variance;
};

SampleSpread sample_spread(std::span<const double> samples) {
    long double sum = 0.0L;
    long double sum_sq = 0.0L;
    for (double x : samples) {
        sum += x;
        sum_sq += static_cast<long double>(x) * x;
    }
    auto n = static_cast<long double>(samples.size());
    double mean = static_cast<double>(sum / n);
    return {mean, std::max(0.0, static_cast<double>(sum_sq / n) - mean * mean)};
}

// C(n, k) t^k (1-t)^(n-k) for k = 0..n.
std::vector<double> binomial_row(int n, double t) {
    std::vector<double> row(static_cast<std::size_t>(n) + 1, 0.0);
    if (t <= 0.0) {
        row[0] = 1.0;
        return row;
    }
    if (t >= 1.0) {
        row.back() = 1.0;
        return row;
    }
    double log_t = std::log(t);
    double log_r = std::log1p(-t);
    double lg_n = std::lgamma(n + 1.0);
    for (int k = 0; k <= n; ++k) {
        row[static_cast<std::size_t>(k)] =
            std::exp(lg_n - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) + k * log_t + (n - k) * log_r);
    }
    return row;
}

}  // namespace

ResponseMatrix::ResponseMatrix(int n_max, std::vector<double> edges, std::vector<double> entries)
    : n_max_(n_max), edges_(std::move(edges)), entries_(std::move(entries)) {
}

ResponseMatrix build_response(int n_max, DetectorEfficiency eta_h, std::span<const double> edges) {
    if (n_max < 0) {
        throw DomainError("response matrix needs n_max >= 0");
    }
    if (edges.empty()) {
        throw DomainError("response matrix needs at least one bin edge");
    }
    for (std::size_t i = 1; i < edges.size(); ++i) {
        if (!(edges[i] > edges[i - 1])) {
            throw DomainError("bin edges must be strictly increasing");
        }
    }
    auto levels = static_cast<std::size_t>(n_max) + 1;
    std::size_t bins = edges.size() + 1;
    // mass[k * bins + b] = int_bin psi_k^2
    std::vector<double> mass(levels * bins);
    std::vector<double> prev_cdf(levels, 0.0);
    std::vector<double> cdf(levels);
    for (std::size_t b = 0; b < bins; ++b) {
        if (b < edges.size()) {
            hermite_function_cdfs(edges[b], cdf);
        } else {
            std::fill(cdf.begin(), cdf.end(), 1.0);
        }
        for (std::size_t k = 0; k < levels; ++k) {
            mass[k * bins + b] = std::max(0.0, cdf[k] - prev_cdf[k]);
        }
        prev_cdf = cdf;
    }
    std::vector<double> entries(levels * bins, 0.0);
    for (int n = 0; n <= n_max; ++n) {
        std::vector<double> binom = binomial_row(n, eta_h.value());
        double *row = entries.data() + static_cast<std::size_t>(n) * bins;
        for (int k = 0; k <= n; ++k) {
            double w = binom[static_cast<std::size_t>(k)];
            if (w == 0.0) {
                continue;
            }
            const double *src = mass.data() + static_cast<std::size_t>(k) * bins;
            for (std::size_t b = 0; b < bins; ++b) {
                row[b] += w * src[b];
            }
        }
    }
    return ResponseMatrix(n_max, std::vector<double>(edges.begin(), edges.end()), std::move(entries));
}

int reconstruction_n_max(double quadrature_variance, DetectorEfficiency eta_h) {
    double eta = eta_h.value();
    if (!(eta > 0.0)) {
        throw DomainError("homodyne efficiency must be positive");
    }
    int n_max = std::max(1, static_cast<int>(std::ceil(4.0 * quadrature_variance / eta)));
    // also cover a thermal tail of the loss-compensated mean down to 1e-4
    double nbar = std::max(0.0, (quadrature_variance - 0.5) / eta);
    if (nbar > 0.0) {
        double thermal = std::ceil(std::log(kSupportTailMass) / std::log(nbar / (nbar + 1.0))) - 1.0;
        n_max = std::max(n_max, static_cast<int>(std::min(thermal, 4096.0)));
    }
    return n_max;
}

int default_reconstruction_n_max(const QuadratureBatch &batch) {
    if (batch.samples.empty()) {
        throw DomainError("quadrature batch is empty");
    }
    return reconstruction_n_max(sample_spread(batch.samples).variance, batch.eta_h);
}

Reconstruction reconstruct_maxlik(const QuadratureBatch &batch, const MaxLikOptions &options) {
    if (batch.samples.empty()) {
        throw DomainError("quadrature batch is empty");
    }
    if (options.bins < 1) {
        throw DomainError("reconstruction needs at least one bin");
    }
    if (options.max_iterations < 0) {
        throw DomainError("max_iterations must be non-negative");
    }
    int n_max = options.n_max ? *options.n_max : default_reconstruction_n_max(batch);
    if (n_max < 0) {
        throw DomainError("reconstruction n_max must be non-negative");
    }
    SampleSpread spread = sample_spread(batch.samples);
    double sigma = std::sqrt(spread.variance);
    if (!(sigma > 0.0)) {
        throw ReconstructionError("batch has zero spread");
    }
    std::vector<double> edges(static_cast<std::size_t>(options.bins) + 1);
    double lo = spread.mean - 6.0 * sigma;
    double width = 12.0 * sigma / options.bins;
    for (std::size_t i = 0; i < edges.size(); ++i) {
        edges[i] = lo + width * static_cast<double>(i);
    }
    ResponseMatrix response = build_response(n_max, batch.eta_h, edges);
    std::size_t bins = response.bins();

    std::vector<double> freq(bins, 0.0);
    for (double x : batch.samples) {
        auto it = std::upper_bound(edges.begin(), edges.end(), x);
        freq[static_cast<std::size_t>(it - edges.begin())] += 1.0;
    }
    for (double &f : freq) {
        f /= static_cast<double>(batch.samples.size());
    }

    auto levels = static_cast<std::size_t>(n_max) + 1;
    std::vector<double> p(levels, 1.0 / static_cast<double>(levels));
    std::vector<double> predicted(bins);
    auto log_likelihood = [&]() {
        std::fill(predicted.begin(), predicted.end(), 0.0);
        for (std::size_t n = 0; n < levels; ++n) {
            auto row = response.row(static_cast<int>(n));
            for (std::size_t b = 0; b < bins; ++b) {
                predicted[b] += p[n] * row[b];
            }
        }
        double ll = 0.0;
        for (std::size_t b = 0; b < bins; ++b) {
            if (freq[b] == 0.0) {
                continue;
            }
            if (!(predicted[b] > 0.0)) {
                throw ReconstructionError("observed bin " + std::to_string(b) +
                                          " has zero probability under every photon number");
            }
            ll += freq[b] * std::log(predicted[b]);
        }
        return ll;
    };

    Reconstruction out{PhotonDistribution::from_weights({1.0}), {}, 0, false};
    out.log_likelihood.push_back(log_likelihood());
    std::vector<double> ratio(bins);
    for (int it = 0; it < options.max_iterations; ++it) {
        for (std::size_t b = 0; b < bins; ++b) {
            ratio[b] = freq[b] > 0.0 ? freq[b] / predicted[b] : 0.0;
        }
        double total = 0.0;
        for (std::size_t n = 0; n < levels; ++n) {
            auto row = response.row(static_cast<int>(n));
            double s = 0.0;
            for (std::size_t b = 0; b < bins; ++b) {
                s += row[b] * ratio[b];
            }
            p[n] *= s;
            total += p[n];
        }
        for (double &v : p) {
            v /= total;
        }
        double ll = log_likelihood();
        double gain = ll - out.log_likelihood.back();
        out.log_likelihood.push_back(ll);
        out.iterations = it + 1;
        if (gain < options.tolerance) {
            out.converged = true;
            break;
        }
    }
    out.state = PhotonDistribution::from_weights(std::move(p));
    return out;
}

MonteCarloErrors monte_carlo_errors(const PhotonDistribution &truth, DetectorEfficiency eta_h, std::size_t count,
                                    int runs, std::uint64_t master_seed, MaxLikOptions options, int jobs) {
    if (runs < 2) {
        throw DomainError("Monte Carlo error estimation needs at least 2 runs");
    }
    if (!options.n_max) {
        double measured_variance = eta_h.value() * photon_moments(truth).mean + 0.5;
        options.n_max = reconstruction_n_max(measured_variance, eta_h);
    }
    std::vector<std::optional<PhotonDistribution>> results(static_cast<std::size_t>(runs));
    std::atomic<int> next{0};
    std::mutex error_mutex;
    std::exception_ptr error;
    int error_run = -1;
    auto worker = [&]() {
        for (int r = next++; r < runs; r = next++) {
            try {
                QuadratureBatch batch = sample_homodyne(truth, eta_h, count, derive_seed(master_seed, static_cast<std::uint64_t>(r)),
                                                        "monte-carlo run " + std::to_string(r));
                results[static_cast<std::size_t>(r)] = reconstruct_maxlik(batch, options).state;
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error || r < error_run) {
                    error = std::current_exception();
                    error_run = r;
                }
            }
        }
    };
    int threads = std::clamp(jobs, 1, runs);
    std::vector<std::thread> pool;
    for (int t = 1; t < threads; ++t) {
        pool.emplace_back(worker);
    }
    worker();
    for (auto &th : pool) {
        th.join();
    }
    if (error) {
        try {
            std::rethrow_exception(error);
        } catch (const std::exception &e) {
            throw ReconstructionError("Monte Carlo run " + std::to_string(error_run) + ": " + e.what());
        }
    }

    auto levels = static_cast<std::size_t>(*options.n_max) + 1;
    MonteCarloErrors out;
    out.mean.assign(levels, 0.0);
    out.std_dev.assign(levels, 0.0);
    for (auto &r : results) {
        out.runs.push_back(std::move(*r));
    }
    for (const PhotonDistribution &r : out.runs) {
        for (std::size_t n = 0; n < levels; ++n) {
            out.mean[n] += r[n];
        }
    }
    for (double &m : out.mean) {
        m /= runs;
    }
    for (const PhotonDistribution &r : out.runs) {
        for (std::size_t n = 0; n < levels; ++n) {
            double d = r[n] - out.mean[n];
            out.std_dev[n] += d * d;
        }
    }
    for (double &s : out.std_dev) {
        s = std::sqrt(s / (runs - 1));
    }
    return out;
}

}  // namespace gaussify
