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

#ifndef GAUSSIFY_HOMODYNE_H
#define GAUSSIFY_HOMODYNE_H

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "gaussify/photon_distribution.h"

namespace gaussify {

constexpr std::size_t kInverseCdfGridPoints = std::size_t{1} << 14;
constexpr int kDefaultDistanceBins = 200;
constexpr int kDefaultBootstrapResamples = 50;
constexpr std::size_t kMinSamplesForStatistics = 10000;
constexpr int kMaxPatternXOrder = 8;
constexpr int kMaxPatternNOrder = 4;

/// Homodyne samples x_M of a phase-randomized state, taken by a detector of
/// overall efficiency eta_h (x_M = sqrt(eta_h) x + sqrt(1 - eta_h) x_vac).
struct QuadratureBatch {
    std::vector<double> samples;
    DetectorEfficiency eta_h{1.0};
    std::uint64_t seed = 0;
    std::string source;
};

/// Draws `count` i.i.d. samples from the quadrature distribution of
/// apply_loss(state, eta_h) by inverse-CDF lookup on a 2^14-point grid over
/// +-(6 sqrt(<n> + 1/2) + 2). Deterministic in `seed`.
QuadratureBatch sample_homodyne(const PhotonDistribution &state, DetectorEfficiency eta_h, std::size_t count,
                                std::uint64_t seed, std::string source = "");

/// Loss-compensating pattern for <x^k>:
/// (sqrt(1-eta)/(2 sqrt(eta)))^k H_k(x_M / sqrt(1-eta)), evaluated through the
/// equivalent recurrence h_{k+1} = (x/sqrt(eta)) h_k - k (1-eta)/(2 eta) h_{k-1},
/// which reduces to x^k at eta = 1.
double x_moment_pattern(double x_m, double eta_h, int k);

/// Loss-compensating pattern for <a^dag^k a^k>:
/// eta^-k k! k! / (2^k (2k)!) H_{2k}(x_M).
double n_moment_pattern(double x_m, double eta_h, int k);

/// Sample average of x_moment_pattern; k in [1, 8].
double estimate_x_moment(const QuadratureBatch &batch, int k);

/// Sample average of n_moment_pattern; k in [1, 4].
double estimate_n_moment(const QuadratureBatch &batch, int k);

struct PhotonStatisticsEstimate {
    double variance;
    double kurtosis;
    double mean;
};

/// V_n = <a^dag^2 a^2> + <n> - <n>^2 and K from mean-subtracted quadrature
/// moments. Needs at least kMinSamplesForStatistics samples.
PhotonStatisticsEstimate estimate_variance_and_kurtosis(const QuadratureBatch &batch);

struct EstimateWithError {
    double value;
    double std_error;
};

struct MomentReport {
    std::array<EstimateWithError, 4> x_moments;  // k = 1..4
    std::array<EstimateWithError, 2> n_moments;  // k = 1..2
    EstimateWithError mean_n;
    EstimateWithError variance_n;
    EstimateWithError kurtosis;
};

/// All pattern-function estimates with bootstrap standard errors
/// (`resamples` resamplings of the batch, seeded by `seed`).
MomentReport estimate_moments(const QuadratureBatch &batch, int resamples = kDefaultBootstrapResamples,
                              std::uint64_t seed = 0);

/// Half L1 distance between the binned empirical distribution and the
/// Gaussian with the batch's sample mean and variance, on `bins` equal bins
/// over mean +- 6 sigma plus one underflow and one overflow bin.
double binned_distance_to_gaussian(const QuadratureBatch &batch, int bins = kDefaultDistanceBins);

}  // namespace gaussify

#endif
